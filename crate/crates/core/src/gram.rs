//! Ensembles, Gram matrices, the ensemble operator and its Schmidt data.

use std::fmt::Write as _;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupTable;
use crate::multiplier::Multiplier;
use crate::numerics::{
    c64, complete_orthonormal_basis, hermitian_eig, hermiticity_deviation, identity, is_psd, max_abs,
    max_abs_diff, pinv, projector, sqrtm_psd, CMat, CVec, HermitianSpectrum, C64, DEGENERACY_TOL,
};
use crate::rep::{left_regular, IsotypicDecomposition, UnitaryRep};

pub const SEED_NORM_TOL: f64 = 1e-12;
/// Gram matrices with `λ_min < -GRAM_PSD_TOL·‖G‖_max` are rejected.
pub const GRAM_PSD_TOL: f64 = 1e-8;
/// Allowed off-block leakage of the rotated ensemble operator.
pub const LEAKAGE_TOL: f64 = 1e-8;

/// `{U_g|ψ⟩}` with uniform priors `1/|𝒢|`.
#[derive(Clone, Debug)]
pub struct Ensemble {
    rep: UnitaryRep,
    seed: CVec,
}

impl Ensemble {
    pub fn new(rep: UnitaryRep, seed: CVec) -> Result<Self> {
        if seed.len() != rep.dim() {
            return Err(Error::Precondition(format!(
                "seed has {} components, representation acts on {}",
                seed.len(),
                rep.dim()
            )));
        }
        let norm = seed.norm();
        if (norm - 1.0).abs() > SEED_NORM_TOL {
            return Err(Error::Precondition(format!("seed norm is {norm}, expected 1")));
        }
        Ok(Self { rep, seed })
    }

    pub fn rep(&self) -> &UnitaryRep {
        &self.rep
    }

    pub fn group(&self) -> &GroupTable {
        self.rep.group()
    }

    pub fn multiplier(&self) -> &Multiplier {
        self.rep.multiplier()
    }

    pub fn seed(&self) -> &CVec {
        &self.seed
    }

    pub fn order(&self) -> usize {
        self.group().order()
    }

    pub fn dim(&self) -> usize {
        self.rep.dim()
    }

    pub fn priors(&self) -> Vec<f64> {
        vec![1.0 / self.order() as f64; self.order()]
    }

    /// `|ψ_g⟩ = U_g|ψ⟩`
    pub fn state(&self, g: usize) -> CVec {
        self.rep.apply(g, &self.seed)
    }

    pub fn states(&self) -> Vec<CVec> {
        self.group().elements().map(|g| self.state(g)).collect()
    }

    /// Columns are the states, in element order.
    pub fn state_matrix(&self) -> CMat {
        CMat::from_columns(&self.states())
    }

    /// `X = Σ_k √η_k |ψ_k⟩⟨k|`, the map used to move POVMs between spaces.
    pub fn state_map(&self) -> CMat {
        self.state_matrix().unscale((self.order() as f64).sqrt())
    }

    /// `Ω = Σ_g U_g|ψ⟩⟨ψ|U_g†`
    pub fn ensemble_operator_direct(&self) -> CMat {
        let mut omega = CMat::zeros(self.dim(), self.dim());
        for s in self.states() {
            omega += projector(&s);
        }
        omega
    }

    /// Projector onto the span of the states.
    pub fn span_projector(&self) -> CMat {
        let x = self.state_matrix();
        let p = &x * pinv(&x);
        (p.clone() + p.adjoint()).scale(0.5)
    }
}

/// Hermitian PSD matrix of overlaps with a lazily computed spectrum.
#[derive(Debug)]
pub struct GramMatrix {
    entries: CMat,
    coefficients: Option<Vec<C64>>,
    multiplier: Option<Multiplier>,
    spectrum: OnceLock<HermitianSpectrum>,
}

impl Clone for GramMatrix {
    fn clone(&self) -> Self {
        let spectrum = OnceLock::new();
        if let Some(s) = self.spectrum.get() {
            let _ = spectrum.set(s.clone());
        }
        Self {
            entries: self.entries.clone(),
            coefficients: self.coefficients.clone(),
            multiplier: self.multiplier.clone(),
            spectrum,
        }
    }
}

impl GramMatrix {
    /// Checks Hermiticity, unit diagonal and positivity.
    pub fn from_matrix(entries: CMat, multiplier: Option<Multiplier>) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(Error::InvalidGram("matrix must be square and nonempty".into()));
        }
        if let Some(m) = &multiplier {
            if m.group().order() != entries.nrows() {
                return Err(Error::InvalidGram(format!(
                    "{}x{} matrix for a group of order {}",
                    entries.nrows(),
                    entries.ncols(),
                    m.group().order()
                )));
            }
        }
        let scale = max_abs(&entries).max(1.0);
        let dev = hermiticity_deviation(&entries);
        if dev > 1e-10 * scale {
            return Err(Error::InvalidGram(format!("not Hermitian (deviation {dev:.3e})")));
        }
        if let Some(k) = (0..entries.nrows()).find(|&k| (entries[(k, k)] - 1.0).norm() > 1e-10) {
            return Err(Error::InvalidGram(format!("diagonal entry {k} is {}, expected 1", entries[(k, k)])));
        }
        let gram = Self::new_unchecked(entries, None, multiplier);
        let min = gram.spectrum().min_eigenvalue();
        if min < -GRAM_PSD_TOL * scale {
            return Err(Error::InvalidGram(format!(
                "negative eigenvalue {min:.6e}; coefficients do not describe any set of states"
            )));
        }
        Ok(gram)
    }

    fn new_unchecked(mut entries: CMat, coefficients: Option<Vec<C64>>, multiplier: Option<Multiplier>) -> Self {
        let n = entries.nrows();
        // exact Hermiticity and unit diagonal
        for r in 0..n {
            entries[(r, r)] = c64(1.0, 0.0);
            for c in (r + 1)..n {
                let avg = (entries[(r, c)] + entries[(c, r)].conj()) * 0.5;
                entries[(r, c)] = avg;
                entries[(c, r)] = avg.conj();
            }
        }
        Self {
            entries,
            coefficients,
            multiplier,
            spectrum: OnceLock::new(),
        }
    }

    pub fn entries(&self) -> &CMat {
        &self.entries
    }

    pub fn order(&self) -> usize {
        self.entries.nrows()
    }

    pub fn coefficients(&self) -> Option<&[C64]> {
        self.coefficients.as_deref()
    }

    pub fn multiplier(&self) -> Option<&Multiplier> {
        self.multiplier.as_ref()
    }

    pub fn spectrum(&self) -> &HermitianSpectrum {
        self.spectrum
            .get_or_init(|| hermitian_eig(&self.entries).expect("Gram entries are Hermitian by construction"))
    }

    /// Descending eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectrum().eigenvalues
    }
}

/// Pairwise overlaps of the states; also records `c_g = ⟨ψ|U_g|ψ⟩`.
pub fn gram_from_states(e: &Ensemble) -> GramMatrix {
    let x = e.state_matrix();
    let entries = x.adjoint() * &x;
    let coefficients = e.group().elements().map(|g| e.seed().dotc(&e.state(g))).collect();
    GramMatrix::new_unchecked(entries, Some(coefficients), Some(e.multiplier().clone()))
}

/// `G = Σ_l c_l R_l*`, the conjugate right regular matrices reducing to
/// `R_l` for a trivial multiplier. Entry `(g, h)` is `ω(g⁻¹, h) c_{g⁻¹h}`.
pub fn gram_from_coefficients(c: &[C64], multiplier: &Multiplier) -> Result<GramMatrix> {
    let group = multiplier.group();
    let n = group.order();
    if c.len() != n {
        return Err(Error::InvalidGram(format!("{} coefficients for a group of order {n}", c.len())));
    }
    if (c[0] - 1.0).norm() > 1e-12 {
        return Err(Error::InvalidGram(format!("c_e must be 1, got {}", c[0])));
    }
    for l in group.elements() {
        let li = group.inv(l);
        if (c[li] - c[l].conj()).norm() > 1e-10 {
            let what = if li == l {
                format!("c_{} must be real", group.name(l))
            } else {
                format!("c_{} must equal the conjugate of c_{}", group.name(li), group.name(l))
            };
            return Err(Error::InvalidGram(format!("Hermiticity violated: {what}")));
        }
    }
    let r = crate::rep::right_regular(multiplier)?;
    let mut entries = CMat::zeros(n, n);
    for (l, cl) in c.iter().enumerate() {
        entries += r.matrix(l).map(|z| z.conj()) * *cl;
    }
    let dev = hermiticity_deviation(&entries);
    if dev > 1e-10 {
        return Err(Error::InvalidGram(format!("assembled matrix is not Hermitian (deviation {dev:.3e})")));
    }
    let gram = GramMatrix::new_unchecked(entries, Some(c.to_vec()), Some(multiplier.clone()));
    let scale = max_abs(gram.entries()).max(1.0);
    let min = gram.spectrum().min_eigenvalue();
    if min < -GRAM_PSD_TOL * scale {
        return Err(Error::InvalidGram(format!(
            "negative eigenvalue {min:.6e}; coefficients do not describe any set of states"
        )));
    }
    Ok(gram)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatternEntry {
    /// Element whose coefficient sits here (`g⁻¹h` at position `(g, h)`).
    pub label: usize,
    pub phase: C64,
}

/// The symbolic Gram matrix of a group with multiplier.
#[derive(Debug, Clone)]
pub struct CanonicalPattern {
    pub multiplier: Multiplier,
    pub entries: Vec<Vec<PatternEntry>>,
    /// Labels whose coefficient must be real (self-inverse elements).
    pub real_labels: Vec<usize>,
    /// `(l, l⁻¹)` pairs with `c_{l⁻¹} = c_l*`, `l < l⁻¹`.
    pub conjugate_pairs: Vec<(usize, usize)>,
}

/// Builds the table of `g⁻¹h` with phases `ω(g⁻¹, h)`, then reads off the
/// Hermiticity constraints.
pub fn canonical_pattern(multiplier: &Multiplier) -> Result<CanonicalPattern> {
    if !multiplier.is_normalized() {
        return Err(Error::Precondition("multiplier must be normalized".into()));
    }
    let g = multiplier.group();
    let entries = g
        .elements()
        .map(|r| {
            g.elements()
                .map(|c| PatternEntry {
                    label: g.mul(g.inv(r), c),
                    phase: multiplier.omega(g.inv(r), c),
                })
                .collect()
        })
        .collect();
    let real_labels = g.elements().skip(1).filter(|&l| g.inv(l) == l).collect();
    let conjugate_pairs = g.elements().filter(|&l| l < g.inv(l)).map(|l| (l, g.inv(l))).collect();
    Ok(CanonicalPattern {
        multiplier: multiplier.clone(),
        entries,
        real_labels,
        conjugate_pairs,
    })
}

impl CanonicalPattern {
    pub fn substitute(&self, c: &[C64]) -> CMat {
        let n = self.entries.len();
        CMat::from_fn(n, n, |r, col| {
            let e = self.entries[r][col];
            e.phase * c[e.label]
        })
    }

    pub fn label_name(&self, l: usize) -> String {
        if l == 0 {
            "1".to_string()
        } else {
            format!("c_{}", self.multiplier.group().name(l))
        }
    }

    fn entry_text(&self, e: &PatternEntry) -> String {
        let name = self.label_name(e.label);
        let p = e.phase;
        let near = |z: C64| (p - z).norm() < 1e-12;
        if near(c64(1.0, 0.0)) {
            name
        } else if near(c64(-1.0, 0.0)) {
            format!("-{name}")
        } else if near(c64(0.0, 1.0)) {
            format!("i{name}")
        } else if near(c64(0.0, -1.0)) {
            format!("-i{name}")
        } else {
            format!("({:.6}{:+.6}i){name}", p.re, p.im)
        }
    }

    pub fn text_rows(&self) -> Vec<Vec<String>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(|e| self.entry_text(e)).collect())
            .collect()
    }

    pub fn constraint_lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        for &l in &self.real_labels {
            out.push(format!("{} real", self.label_name(l)));
        }
        for &(l, li) in &self.conjugate_pairs {
            out.push(format!("{} = conj({})", self.label_name(li), self.label_name(l)));
        }
        out.push("G >= 0".to_string());
        out
    }

    pub fn render(&self) -> String {
        let rows = self.text_rows();
        let width = rows.iter().flatten().map(|s| s.chars().count()).max().unwrap_or(1);
        let mut out = String::new();
        for row in &rows {
            let cells: Vec<String> = row.iter().map(|s| format!("{s:>width$}")).collect();
            let _ = writeln!(out, "[ {} ]", cells.join("  "));
        }
        for line in self.constraint_lines() {
            let _ = writeln!(out, "{line}");
        }
        out
    }
}

/// The columns of `S = √G` as an ensemble of the left regular representation.
pub fn associated_ensemble(gram: &GramMatrix) -> Result<Ensemble> {
    let multiplier = gram
        .multiplier()
        .ok_or_else(|| Error::Precondition("the associated ensemble needs a group context".into()))?;
    let s = sqrtm_psd(gram.entries())?;
    let rep = left_regular(multiplier)?;
    let mut seed: CVec = s.column(0).into_owned();
    // ‖φ_e‖² = G_ee = 1 up to roundoff in the square root
    let norm = seed.norm();
    seed.unscale_mut(norm);
    Ensemble::new(rep, seed)
}

/// One isotypic block of the seed in Schmidt form.
#[derive(Debug, Clone)]
pub struct SchmidtBlock {
    pub irrep: usize,
    pub label: String,
    pub dim: usize,
    pub multiplicity: usize,
    pub offset: usize,
    /// Descending, length `min(d, m)`.
    pub alphas: Vec<f64>,
    /// `d×d` unitary; the first `alphas.len()` columns are the `|v_k⟩`.
    pub v: CMat,
    /// `m×m` unitary; the first `alphas.len()` columns are the `|u_k⟩`.
    pub u: CMat,
}

impl SchmidtBlock {
    pub fn rank(&self) -> usize {
        self.alphas.len()
    }

    /// Number of `α_k` above `tol`.
    pub fn support(&self, tol: f64) -> usize {
        self.alphas.iter().filter(|&&a| a > tol).count()
    }

    pub fn v_k(&self, k: usize) -> CVec {
        self.v.column(k).into_owned()
    }

    pub fn u_k(&self, k: usize) -> CVec {
        self.u.column(k).into_owned()
    }

    /// Embeds `a ⊗ b` (irrep ⊗ multiplicity) into the rotated space of size `n`.
    pub fn embed(&self, a: &CVec, b: &CVec, n: usize) -> CVec {
        let mut out = CVec::zeros(n);
        for i in 0..self.dim {
            for j in 0..self.multiplicity {
                out[self.offset + i * self.multiplicity + j] = a[i] * b[j];
            }
        }
        out
    }

    /// `|ξ_k⟩ = |v_k⟩|u_k⟩` in the rotated space.
    pub fn xi(&self, k: usize, n: usize) -> CVec {
        self.embed(&self.v_k(k), &self.u_k(k), n)
    }
}

/// Per-block Schmidt decomposition of the seed plus the flat eigenvalue
/// multiset it induces.
#[derive(Debug, Clone)]
pub struct SchmidtData {
    pub ensemble: Ensemble,
    pub decomposition: IsotypicDecomposition,
    pub blocks: Vec<SchmidtBlock>,
    /// `𝒰|ψ⟩`
    pub rotated_seed: CVec,
    /// Each `α_k^μ` repeated `d_μ` times, zero-padded to `|𝒢|`, descending.
    pub lambdas: Vec<f64>,
    /// `Ω` in the original space.
    pub omega: CMat,
}

impl SchmidtData {
    pub fn order(&self) -> usize {
        self.ensemble.order()
    }

    pub fn dim(&self) -> usize {
        self.ensemble.dim()
    }

    /// `(block, k)` of the largest `α`, first in block order on ties.
    pub fn top(&self) -> (usize, usize) {
        let mut best = (0, 0);
        let mut best_alpha = f64::NEG_INFINITY;
        for (b, blk) in self.blocks.iter().enumerate() {
            if let Some(&a) = blk.alphas.first() {
                if a > best_alpha {
                    best_alpha = a;
                    best = (b, 0);
                }
            }
        }
        best
    }

    /// `Σ_μ d_μ Σ_k α_k^μ / |𝒢|`, which is the seed norm squared.
    pub fn normalization(&self) -> f64 {
        let total: f64 = self
            .blocks
            .iter()
            .map(|b| b.dim as f64 * b.alphas.iter().sum::<f64>())
            .sum();
        total / self.order() as f64
    }

    /// `⨁_μ 𝟙_{d_μ} ⊗ Σ_k α_k |u_k⟩⟨u_k|` in rotated coordinates.
    pub fn omega_rotated_from_schmidt(&self) -> CMat {
        let n = self.dim();
        let mut out = CMat::zeros(n, n);
        for b in &self.blocks {
            let mut inner = CMat::zeros(b.multiplicity, b.multiplicity);
            for (k, &a) in b.alphas.iter().enumerate() {
                inner += projector(&b.u_k(k)) * c64(a, 0.0);
            }
            let blk = identity(b.dim).kronecker(&inner);
            out.view_mut((b.offset, b.offset), (b.size(), b.size())).copy_from(&blk);
        }
        out
    }
}

impl SchmidtBlock {
    fn size(&self) -> usize {
        self.dim * self.multiplicity
    }
}

/// Assembles `Ω`, rotates it into the isotypic basis and extracts the
/// per-block Schmidt data of the seed.
pub fn ensemble_operator(e: &Ensemble, decomposition: &IsotypicDecomposition) -> Result<SchmidtData> {
    if decomposition.source.dim() != e.dim() || decomposition.source.group() != e.group() {
        return Err(Error::InvalidParameter("decomposition does not belong to this ensemble".into()));
    }
    let order = e.order();
    let rotated_seed = decomposition.rotate(e.seed());
    let mut blocks = Vec::with_capacity(decomposition.blocks.len());
    for blk in &decomposition.blocks {
        let (d, m) = (blk.dim, blk.multiplicity);
        let scale = (order as f64 / d as f64).sqrt();
        let mat = CMat::from_fn(d, m, |i, j| rotated_seed[blk.index(i, j)] * scale);
        let svd = mat.svd(true, true);
        let u_svd = svd.u.expect("svd computed with u");
        let w_adj = svd.v_t.expect("svd computed with v_t");
        let r = d.min(m);
        let mut order_k: Vec<usize> = (0..r).collect();
        order_k.sort_by(|&a, &b| {
            svd.singular_values[b]
                .total_cmp(&svd.singular_values[a])
                .then(a.cmp(&b))
        });
        let alphas: Vec<f64> = order_k.iter().map(|&k| svd.singular_values[k].powi(2)).collect();
        let v_cols: Vec<CVec> = order_k.iter().map(|&k| u_svd.column(k).into_owned()).collect();
        // u_k = conj(W column k) = row k of W† transposed
        let u_cols: Vec<CVec> = order_k.iter().map(|&k| w_adj.row(k).transpose()).collect();
        let v = complete_orthonormal_basis(&CMat::from_columns(&v_cols));
        let u = complete_orthonormal_basis(&CMat::from_columns(&u_cols));
        blocks.push(SchmidtBlock {
            irrep: blk.irrep,
            label: blk.label.clone(),
            dim: d,
            multiplicity: m,
            offset: blk.offset,
            alphas,
            v,
            u,
        });
    }
    let mut lambdas: Vec<f64> = blocks
        .iter()
        .flat_map(|b| b.alphas.iter().flat_map(move |&a| std::iter::repeat_n(a, b.dim)))
        .collect();
    if lambdas.len() > order {
        return Err(Error::Consistency(format!(
            "{} Schmidt eigenvalues for a group of order {order}",
            lambdas.len()
        )));
    }
    lambdas.resize(order, 0.0);
    lambdas.sort_by(|a, b| b.total_cmp(a));

    let omega = e.ensemble_operator_direct();
    let data = SchmidtData {
        ensemble: e.clone(),
        decomposition: decomposition.clone(),
        blocks,
        rotated_seed,
        lambdas,
        omega,
    };
    let u = &decomposition.change_of_basis;
    let rotated = u * &data.omega * u.adjoint();
    let leakage = max_abs_diff(&rotated, &data.omega_rotated_from_schmidt());
    if leakage > LEAKAGE_TOL * max_abs(&rotated).max(1.0) {
        return Err(Error::Consistency(format!(
            "rotated ensemble operator deviates from its Schmidt form by {leakage:.3e}"
        )));
    }
    Ok(data)
}

/// Nonzero parts of two descending spectra agree within `tol`.
pub fn nonzero_spectra_agree(a: &[f64], b: &[f64], tol: f64) -> bool {
    let nz = |v: &[f64]| -> Vec<f64> { v.iter().copied().filter(|x| *x > tol).collect() };
    let (x, y) = (nz(a), nz(b));
    x.len() == y.len() && x.iter().zip(&y).all(|(p, q)| (p - q).abs() <= tol)
}

/// Largest gap between consecutive eigenvalues considered equal, useful for
/// reporting degeneracy of `λ₁`.
pub fn top_multiplicity(lambdas: &[f64]) -> usize {
    match lambdas.first() {
        None => 0,
        Some(&top) => lambdas.iter().take_while(|&&l| (top - l).abs() <= DEGENERACY_TOL).count(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransferDirection {
    /// `Ξ_k = X†Π_kX`, from the state space to `ℂ^N`.
    Forward,
    /// `Π_k = (X⁺)†Ξ_kX⁺`, back to the state space.
    Converse,
}

/// Moves POVM elements across the state map `X = Σ_k √η_k|ψ_k⟩⟨k|`.
/// Note that `X†X` is the prior-weighted Gram matrix `G/|𝒢|`.
pub fn transfer_povm(x: &CMat, povm: &[CMat], direction: TransferDirection) -> Result<Vec<CMat>> {
    for p in povm {
        let check = is_psd(p, 1e-9);
        if !check.psd {
            return Err(Error::NotPsd {
                min_eigenvalue: check.min_eigenvalue,
            });
        }
    }
    Ok(match direction {
        TransferDirection::Forward => povm.iter().map(|p| x.adjoint() * p * x).collect(),
        TransferDirection::Converse => {
            let xp = pinv(x);
            povm.iter().map(|p| xp.adjoint() * p * &xp).collect()
        }
    })
}

/// `Π̃_k = (X X̃⁺)† Π_k X X̃⁺`: same joint probabilities for an ensemble with
/// the same Gram matrix and state map `X̃`.
pub fn transfer_between(x_from: &CMat, x_to: &CMat, povm: &[CMat]) -> Result<Vec<CMat>> {
    let t = x_from * pinv(x_to);
    for p in povm {
        let check = is_psd(p, 1e-9);
        if !check.psd {
            return Err(Error::NotPsd {
                min_eigenvalue: check.min_eigenvalue,
            });
        }
    }
    Ok(povm.iter().map(|p| t.adjoint() * p * &t).collect())
}

/// `p[k][l] = ⟨k|X†Π_lX|k⟩ = η_k⟨ψ_k|Π_l|ψ_k⟩`.
pub fn joint_probabilities(x: &CMat, povm: &[CMat]) -> Vec<Vec<f64>> {
    (0..x.ncols())
        .map(|k| {
            let col: CVec = x.column(k).into_owned();
            povm.iter().map(|p| col.dotc(&(p * &col)).re).collect()
        })
        .collect()
}

/// `p[k][l] = ⟨k|Ξ_l|k⟩` for operators on `ℂ^N`.
pub fn index_probabilities(xi: &[CMat]) -> Vec<Vec<f64>> {
    let n = xi.first().map_or(0, |m| m.nrows());
    (0..n).map(|k| xi.iter().map(|m| m[(k, k)].re).collect()).collect()
}
