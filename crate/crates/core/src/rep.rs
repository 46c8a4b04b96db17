//! Unitary (projective) representations, irrep catalogs and isotypic
//! decomposition.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupKind, GroupTable};
use crate::multiplier::{Multiplier, COCYCLE_TOL};
use crate::numerics::{c64, identity, kron, max_abs_diff, CMat, CVec, C64};

pub const UNITARY_TOL: f64 = 1e-10;
pub const DECOMPOSITION_TOL: f64 = 1e-9;

/// `g ↦ U_g` with `U_g U_h = ω(g, h) U_{gh}`.
#[derive(Clone, Debug)]
pub struct UnitaryRep {
    multiplier: Multiplier,
    dim: usize,
    matrices: Arc<Vec<CMat>>,
}

impl UnitaryRep {
    /// Wraps explicit matrices and checks the representation axioms.
    pub fn new(multiplier: &Multiplier, matrices: Vec<CMat>) -> Result<Self> {
        let rep = Self::new_unchecked(multiplier, matrices)?;
        let report = verify_representation(&rep);
        if !report.passed {
            return Err(Error::Precondition(format!(
                "matrices do not form a representation with this multiplier: {}",
                report.summary()
            )));
        }
        Ok(rep)
    }

    /// Only the shapes are checked.
    pub fn new_unchecked(multiplier: &Multiplier, matrices: Vec<CMat>) -> Result<Self> {
        let n = multiplier.group().order();
        if matrices.len() != n {
            return Err(Error::InvalidParameter(format!(
                "{} matrices for a group of order {n}",
                matrices.len()
            )));
        }
        let dim = matrices[0].nrows();
        if dim == 0 || matrices.iter().any(|m| m.nrows() != dim || m.ncols() != dim) {
            return Err(Error::InvalidParameter(
                "representation matrices must be square, nonempty and of equal size".into(),
            ));
        }
        Ok(Self {
            multiplier: multiplier.clone(),
            dim,
            matrices: Arc::new(matrices),
        })
    }

    pub fn group(&self) -> &GroupTable {
        self.multiplier.group()
    }

    pub fn multiplier(&self) -> &Multiplier {
        &self.multiplier
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self, g: usize) -> &CMat {
        &self.matrices[g]
    }

    pub fn matrices(&self) -> &[CMat] {
        &self.matrices
    }

    pub fn apply(&self, g: usize, v: &CVec) -> CVec {
        &self.matrices[g] * v
    }

    /// `Tr U_g` for every `g`.
    pub fn characters(&self) -> Vec<C64> {
        self.matrices.iter().map(|m| m.trace()).collect()
    }
}

fn require_normalized(m: &Multiplier) -> Result<()> {
    if m.is_normalized() {
        Ok(())
    } else {
        Err(Error::Precondition(
            "multiplier must satisfy ω(g, g⁻¹) = 1; normalize it first".into(),
        ))
    }
}

/// `L_g|c⟩ = ω(g, c)|gc⟩`, i.e. `(L_g)_{r,c} = ω(rc⁻¹, c) δ_{g, rc⁻¹}`.
pub fn left_regular(multiplier: &Multiplier) -> Result<UnitaryRep> {
    require_normalized(multiplier)?;
    let g = multiplier.group();
    let n = g.order();
    let matrices = g
        .elements()
        .map(|a| {
            let mut m = CMat::zeros(n, n);
            for c in 0..n {
                m[(g.mul(a, c), c)] = multiplier.omega(a, c);
            }
            m
        })
        .collect();
    UnitaryRep::new_unchecked(multiplier, matrices)
}

/// `R_g|c⟩ = ω(g, c⁻¹)|cg⁻¹⟩`, i.e. `(R_g)_{r,c} = ω(r⁻¹c, c⁻¹) δ_{g, r⁻¹c}`.
pub fn right_regular(multiplier: &Multiplier) -> Result<UnitaryRep> {
    require_normalized(multiplier)?;
    let g = multiplier.group();
    let n = g.order();
    let matrices = g
        .elements()
        .map(|a| {
            let mut m = CMat::zeros(n, n);
            for c in 0..n {
                m[(g.mul(c, g.inv(a)), c)] = multiplier.omega(a, g.inv(c));
            }
            m
        })
        .collect();
    UnitaryRep::new_unchecked(multiplier, matrices)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepValidation {
    pub passed: bool,
    pub max_unitarity_deviation: f64,
    pub max_homomorphism_deviation: f64,
    pub identity_deviation: f64,
    /// Pair `(g, h)` with the largest homomorphism deviation.
    pub worst_pair: Option<(usize, usize)>,
}

impl RepValidation {
    pub fn summary(&self) -> String {
        format!(
            "unitarity {:.3e}, homomorphism {:.3e} at {:?}, identity {:.3e}",
            self.max_unitarity_deviation, self.max_homomorphism_deviation, self.worst_pair, self.identity_deviation
        )
    }
}

/// Checks unitarity, `U_e = 𝟙` and the twisted law `U_g U_h = ω(g, h) U_{gh}`.
pub fn verify_representation(rep: &UnitaryRep) -> RepValidation {
    let g = rep.group();
    let id = identity(rep.dim());
    let max_unitarity_deviation = rep
        .matrices()
        .iter()
        .map(|m| max_abs_diff(&(m.adjoint() * m), &id))
        .fold(0.0, f64::max);
    let identity_deviation = max_abs_diff(rep.matrix(0), &id);
    let mut max_homomorphism_deviation: f64 = 0.0;
    let mut worst_pair = None;
    for a in g.elements() {
        for b in g.elements() {
            let lhs = rep.matrix(a) * rep.matrix(b);
            let rhs = rep.matrix(g.mul(a, b)) * rep.multiplier().omega(a, b);
            let dev = max_abs_diff(&lhs, &rhs);
            if dev > max_homomorphism_deviation {
                max_homomorphism_deviation = dev;
                worst_pair = Some((a, b));
            }
        }
    }
    RepValidation {
        passed: max_unitarity_deviation <= UNITARY_TOL
            && max_homomorphism_deviation <= UNITARY_TOL
            && identity_deviation <= 1e-12,
        max_unitarity_deviation,
        max_homomorphism_deviation,
        identity_deviation,
        worst_pair,
    }
}

#[derive(Clone, Debug)]
pub struct Irrep {
    pub label: String,
    pub rep: UnitaryRep,
}

impl Irrep {
    pub fn dim(&self) -> usize {
        self.rep.dim()
    }
}

/// A list of inequivalent irreps sharing one multiplier.
#[derive(Clone, Debug)]
pub struct IrrepCatalog {
    multiplier: Multiplier,
    irreps: Vec<Irrep>,
}

impl IrrepCatalog {
    /// Validates every irrep and the pairwise orthogonality relations.
    pub fn new(multiplier: &Multiplier, irreps: Vec<(String, Vec<CMat>)>) -> Result<Self> {
        require_normalized(multiplier)?;
        if irreps.is_empty() {
            return Err(Error::InvalidParameter("empty irrep catalog".into()));
        }
        let irreps = irreps
            .into_iter()
            .map(|(label, mats)| {
                let rep = UnitaryRep::new(multiplier, mats)
                    .map_err(|e| Error::InvalidParameter(format!("irrep {label}: {e}")))?;
                Ok(Irrep { label, rep })
            })
            .collect::<Result<Vec<_>>>()?;
        let catalog = Self {
            multiplier: multiplier.clone(),
            irreps,
        };
        let dev = great_orthogonality_check(&catalog);
        if dev > 1e-8 {
            return Err(Error::InvalidParameter(format!(
                "catalog violates the orthogonality relations by {dev:.3e} (reducible or repeated irreps?)"
            )));
        }
        Ok(catalog)
    }

    pub fn multiplier(&self) -> &Multiplier {
        &self.multiplier
    }

    pub fn group(&self) -> &GroupTable {
        self.multiplier.group()
    }

    pub fn irreps(&self) -> &[Irrep] {
        &self.irreps
    }

    pub fn len(&self) -> usize {
        self.irreps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.irreps.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.irreps.iter().map(Irrep::dim).collect()
    }

    pub fn characters(&self) -> Vec<Vec<C64>> {
        self.irreps.iter().map(|i| i.rep.characters()).collect()
    }

    /// `Σ_μ d_μ² = |𝒢|`
    pub fn is_complete(&self) -> bool {
        self.dims().iter().map(|d| d * d).sum::<usize>() == self.group().order()
    }
}

/// Largest violation of
/// `Σ_g (U^μ_g)_{nm} (U^ν_g)*_{n′m′} = δ_{μν} δ_{nn′} δ_{mm′} |𝒢|/d_μ`.
pub fn great_orthogonality_check(catalog: &IrrepCatalog) -> f64 {
    let order = catalog.group().order();
    let irreps = catalog.irreps();
    let mut worst: f64 = 0.0;
    for (mu, a) in irreps.iter().enumerate() {
        for (nu, b) in irreps.iter().enumerate().skip(mu) {
            let (da, db) = (a.dim(), b.dim());
            for n in 0..da {
                for m in 0..da {
                    for n2 in 0..db {
                        for m2 in 0..db {
                            let sum: C64 = (0..order)
                                .map(|g| a.rep.matrix(g)[(n, m)] * b.rep.matrix(g)[(n2, m2)].conj())
                                .sum();
                            let expected = if mu == nu && n == n2 && m == m2 {
                                order as f64 / da as f64
                            } else {
                                0.0
                            };
                            worst = worst.max((sum - expected).norm());
                        }
                    }
                }
            }
        }
    }
    worst
}

fn scalar(z: C64) -> CMat {
    CMat::from_element(1, 1, z)
}

fn rotation(theta: f64) -> CMat {
    let (s, c) = theta.sin_cos();
    CMat::from_row_slice(2, 2, &[c64(c, 0.0), c64(-s, 0.0), c64(s, 0.0), c64(c, 0.0)])
}

fn pauli_matrices() -> [CMat; 4] {
    let (o, z, i) = (c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 1.0));
    [
        CMat::from_row_slice(2, 2, &[o, z, z, o]),
        CMat::from_row_slice(2, 2, &[z, o, o, z]),
        CMat::from_row_slice(2, 2, &[z, -i, i, z]),
        CMat::from_row_slice(2, 2, &[o, z, z, -o]),
    ]
}

fn same_phases(a: &Multiplier, b: &Multiplier) -> bool {
    let n = a.group().order();
    (0..n).all(|g| (0..n).all(|h| (a.omega(g, h) - b.omega(g, h)).norm() <= COCYCLE_TOL))
}

/// Catalogs shipped for the built-in families: ℤ_n, the Klein four-group
/// (trivial or Pauli multiplier) and D_n, all with the multiplier that
/// the constructors produce.
pub fn builtin_irreps(multiplier: &Multiplier) -> Result<IrrepCatalog> {
    let group = multiplier.group();
    let unsupported = || {
        Error::Unsupported(format!(
            "no built-in irrep catalog for {:?} with {} multiplier; supply a catalog",
            group.kind(),
            if multiplier.is_trivial() { "trivial" } else { "this" }
        ))
    };
    let irreps: Vec<(String, Vec<CMat>)> = match group.kind() {
        GroupKind::Cyclic(n) if multiplier.is_trivial() => (0..n)
            .map(|j| {
                let mats = (0..n)
                    .map(|k| scalar(C64::from_polar(1.0, 2.0 * PI * ((j * k) % n) as f64 / n as f64)))
                    .collect();
                (format!("chi{j}"), mats)
            })
            .collect(),
        GroupKind::KleinFour if multiplier.is_trivial() => (0..4usize)
            .map(|s| {
                let mats = (0..4usize)
                    .map(|g| scalar(c64(if (s & g).count_ones() % 2 == 0 { 1.0 } else { -1.0 }, 0.0)))
                    .collect();
                (format!("chi{s}"), mats)
            })
            .collect(),
        GroupKind::KleinFour => {
            let pauli = Multiplier::pauli(group)?;
            if !same_phases(multiplier, &pauli) {
                return Err(unsupported());
            }
            vec![("pauli".to_string(), pauli_matrices().to_vec())]
        }
        GroupKind::Dihedral(n) if multiplier.is_trivial() => dihedral_irreps(n),
        _ => return Err(unsupported()),
    };
    IrrepCatalog::new(multiplier, irreps)
}

fn dihedral_irreps(n: usize) -> Vec<(String, Vec<CMat>)> {
    let one_dim = |name: &str, rot: f64, refl: f64| {
        let mats = (0..2 * n)
            .map(|g| {
                let (k, f) = if g < n { (g, 0) } else { (g - n, 1) };
                let v = rot.powi(k as i32) * if f == 1 { refl } else { 1.0 };
                scalar(c64(v, 0.0))
            })
            .collect();
        (name.to_string(), mats)
    };
    let mut irreps = vec![one_dim("trivial", 1.0, 1.0), one_dim("sign", 1.0, -1.0)];
    if n.is_multiple_of(2) {
        irreps.push(one_dim("alt_plus", -1.0, 1.0));
        irreps.push(one_dim("alt_minus", -1.0, -1.0));
    }
    let reflection = CMat::from_row_slice(2, 2, &[c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(-1.0, 0.0)]);
    for j in 1..=(n - 1) / 2 {
        let mats = (0..2 * n)
            .map(|g| {
                let (k, f) = if g < n { (g, 0) } else { (g - n, 1) };
                let r = rotation(2.0 * PI * (j * k) as f64 / n as f64);
                if f == 1 {
                    r * &reflection
                } else {
                    r
                }
            })
            .collect();
        irreps.push((format!("std{j}"), mats));
    }
    irreps
}

/// One isotypic block of the rotated space. Basis vector `(i, j)` of the
/// block sits at index `offset + i·multiplicity + j`, with `i` the irrep
/// index and `j` the multiplicity index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsotypicBlock {
    pub irrep: usize,
    pub label: String,
    pub dim: usize,
    pub multiplicity: usize,
    pub offset: usize,
}

impl IsotypicBlock {
    pub fn size(&self) -> usize {
        self.dim * self.multiplicity
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        self.offset + i * self.multiplicity + j
    }
}

/// `𝒰 U_g 𝒰† = ⨁_μ U^μ_g ⊗ 𝟙_{m_μ}`.
#[derive(Debug, Clone)]
pub struct IsotypicDecomposition {
    pub source: UnitaryRep,
    pub catalog: IrrepCatalog,
    pub blocks: Vec<IsotypicBlock>,
    pub change_of_basis: CMat,
}

impl IsotypicDecomposition {
    pub fn dim(&self) -> usize {
        self.source.dim()
    }

    /// `⨁_μ U^μ_g ⊗ 𝟙_{m_μ}` for the blocks present.
    pub fn block_matrix(&self, g: usize) -> CMat {
        let n = self.dim();
        let mut out = CMat::zeros(n, n);
        for b in &self.blocks {
            let blk = kron(
                self.catalog.irreps()[b.irrep].rep.matrix(g),
                &identity(b.multiplicity),
            );
            out.view_mut((b.offset, b.offset), (b.size(), b.size())).copy_from(&blk);
        }
        out
    }

    /// Largest entrywise deviation of `𝒰 U_g 𝒰†` from the block form.
    pub fn max_deviation(&self) -> f64 {
        let u = &self.change_of_basis;
        let unitarity = max_abs_diff(&(u * u.adjoint()), &identity(self.dim()));
        self.source
            .group()
            .elements()
            .map(|g| max_abs_diff(&(u * self.source.matrix(g) * u.adjoint()), &self.block_matrix(g)))
            .fold(unitarity, f64::max)
    }

    /// `𝒰 v`
    pub fn rotate(&self, v: &CVec) -> CVec {
        &self.change_of_basis * v
    }

    /// `𝒰† w`
    pub fn unrotate(&self, w: &CVec) -> CVec {
        self.change_of_basis.adjoint() * w
    }

    fn checked(self) -> Result<Self> {
        let dev = self.max_deviation();
        if dev > DECOMPOSITION_TOL {
            return Err(Error::Consistency(format!(
                "isotypic decomposition off by {dev:.3e}"
            )));
        }
        Ok(self)
    }
}

fn check_catalog_matches(rep: &UnitaryRep, catalog: &IrrepCatalog) -> Result<()> {
    if rep.group() != catalog.group() || !same_phases(rep.multiplier(), catalog.multiplier()) {
        return Err(Error::InvalidParameter(
            "catalog and representation use different groups or multipliers".into(),
        ));
    }
    Ok(())
}

/// Decomposes the left regular representation with the explicit rows
/// `𝒰_{(μ,i,j), g} = √(d_μ/|𝒢|) (U^μ_g)_{ij}`.
pub fn decompose_regular(multiplier: &Multiplier, catalog: &IrrepCatalog) -> Result<IsotypicDecomposition> {
    let rep = left_regular(multiplier)?;
    check_catalog_matches(&rep, catalog)?;
    if !catalog.is_complete() {
        return Err(Error::InvalidParameter(format!(
            "catalog is incomplete: Σ d² = {} but |𝒢| = {}",
            catalog.dims().iter().map(|d| d * d).sum::<usize>(),
            rep.dim()
        )));
    }
    let n = rep.dim();
    let mut u = CMat::zeros(n, n);
    let mut blocks = Vec::with_capacity(catalog.len());
    let mut offset = 0;
    for (mu, irrep) in catalog.irreps().iter().enumerate() {
        let d = irrep.dim();
        let block = IsotypicBlock {
            irrep: mu,
            label: irrep.label.clone(),
            dim: d,
            multiplicity: d,
            offset,
        };
        let scale = (d as f64 / n as f64).sqrt();
        for i in 0..d {
            for j in 0..d {
                let row = block.index(i, j);
                for g in 0..n {
                    u[(row, g)] = irrep.rep.matrix(g)[(i, j)] * scale;
                }
            }
        }
        offset += block.size();
        blocks.push(block);
    }
    IsotypicDecomposition {
        source: rep,
        catalog: catalog.clone(),
        blocks,
        change_of_basis: u,
    }
    .checked()
}

/// `P^μ_{ij} = (d_μ/|𝒢|) Σ_g (U^μ_g)*_{ij} U_g`
fn matrix_element_projector(rep: &UnitaryRep, irrep: &Irrep, i: usize, j: usize) -> CMat {
    let n = rep.group().order();
    let d = irrep.dim();
    let mut p = CMat::zeros(rep.dim(), rep.dim());
    for g in 0..n {
        p += rep.matrix(g) * irrep.rep.matrix(g)[(i, j)].conj();
    }
    p * c64(d as f64 / n as f64, 0.0)
}

/// Orthonormal basis of the column space, by Gram–Schmidt over columns in
/// index order.
fn column_basis(p: &CMat) -> Vec<CVec> {
    let mut basis: Vec<CVec> = Vec::new();
    for col in p.column_iter() {
        let mut v: CVec = col.into_owned();
        for _ in 0..2 {
            for b in &basis {
                let c = b.dotc(&v);
                v -= b * c;
            }
        }
        let norm = v.norm();
        if norm > 1e-7 {
            basis.push(v.unscale(norm));
        }
    }
    basis
}

/// Decomposes an arbitrary representation against a catalog.
///
/// A basis `w_j` of `range(P^μ_{11})` is completed to `|μ,i,j⟩ = P^μ_{i1} w_j`.
/// Irreps with multiplicity zero produce no block.
pub fn decompose(rep: &UnitaryRep, catalog: &IrrepCatalog) -> Result<IsotypicDecomposition> {
    check_catalog_matches(rep, catalog)?;
    let dim = rep.dim();
    let mut rows: Vec<CVec> = Vec::with_capacity(dim);
    let mut blocks = Vec::new();
    let mut offset = 0;
    for (mu, irrep) in catalog.irreps().iter().enumerate() {
        let d = irrep.dim();
        let p11 = matrix_element_projector(rep, irrep, 0, 0);
        let w = column_basis(&p11);
        let m = w.len();
        if m == 0 {
            continue;
        }
        let block = IsotypicBlock {
            irrep: mu,
            label: irrep.label.clone(),
            dim: d,
            multiplicity: m,
            offset,
        };
        let mut vectors = vec![CVec::zeros(dim); d * m];
        for i in 0..d {
            let pi1 = if i == 0 { p11.clone() } else { matrix_element_projector(rep, irrep, i, 0) };
            for (j, wj) in w.iter().enumerate() {
                vectors[i * m + j] = &pi1 * wj;
            }
        }
        rows.extend(vectors);
        offset += block.size();
        blocks.push(block);
    }
    if offset != dim {
        return Err(Error::InvalidParameter(format!(
            "catalog accounts for {offset} of {dim} dimensions; irreps are missing"
        )));
    }
    let mut u = CMat::zeros(dim, dim);
    for (r, v) in rows.iter().enumerate() {
        u.row_mut(r).copy_from(&v.adjoint());
    }
    IsotypicDecomposition {
        source: rep.clone(),
        catalog: catalog.clone(),
        blocks,
        change_of_basis: u,
    }
    .checked()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_cyclic, build_dihedral, build_direct_product, build_klein_four};

    fn builtin_groups() -> Vec<GroupTable> {
        let mut v = vec![build_klein_four()];
        v.extend((1..=8).map(|n| build_cyclic(n).unwrap()));
        v.extend((1..=4).map(|n| build_dihedral(n).unwrap()));
        v
    }

    fn pauli_setup() -> (Multiplier, UnitaryRep) {
        let k = build_klein_four();
        let m = Multiplier::pauli(&k).unwrap();
        let rep = UnitaryRep::new(&m, pauli_matrices().to_vec()).unwrap();
        (m, rep)
    }

    #[test]
    fn regular_traces() {
        for g in builtin_groups() {
            let m = Multiplier::trivial(&g);
            for rep in [left_regular(&m).unwrap(), right_regular(&m).unwrap()] {
                for (h, chi) in rep.characters().iter().enumerate() {
                    let want = if h == 0 { g.order() as f64 } else { 0.0 };
                    assert!((chi - want).norm() < 1e-12);
                }
            }
        }
        let (m, _) = pauli_setup();
        let l = left_regular(&m).unwrap();
        assert!((l.matrix(1).trace()).norm() < 1e-12);
    }

    #[test]
    fn z2_left_regular_is_swap() {
        let m = Multiplier::trivial(&build_cyclic(2).unwrap());
        let l = left_regular(&m).unwrap();
        let swap = CMat::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)]);
        assert_eq!(l.matrix(1), &swap);
    }

    #[test]
    fn pauli_left_regular_matches_hand_built() {
        // L_x|c⟩ = ω(x, c)|xc⟩ from the Pauli multiplier table
        let (m, _) = pauli_setup();
        let l = left_regular(&m).unwrap();
        let (o, z, i) = (c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 1.0));
        let lx = CMat::from_row_slice(4, 4, &[z, o, z, z, o, z, z, z, z, z, z, -i, z, z, i, z]);
        assert!(max_abs_diff(l.matrix(1), &lx) < 1e-15);
        for g in 0..4 {
            assert!(l.matrix(g).iter().all(|e| e.norm() == 0.0 || (e.norm() - 1.0).abs() < 1e-15));
        }
    }

    #[test]
    fn regular_reps_verify() {
        for g in builtin_groups() {
            let m = Multiplier::trivial(&g);
            assert!(verify_representation(&left_regular(&m).unwrap()).passed);
            assert!(verify_representation(&right_regular(&m).unwrap()).passed);
        }
        let (m, _) = pauli_setup();
        assert!(verify_representation(&left_regular(&m).unwrap()).passed);
        assert!(verify_representation(&right_regular(&m).unwrap()).passed);
    }

    #[test]
    fn left_and_right_commute() {
        for g in builtin_groups() {
            let m = Multiplier::trivial(&g);
            let l = left_regular(&m).unwrap();
            let r = right_regular(&m).unwrap();
            for a in g.elements() {
                for b in g.elements() {
                    let comm = l.matrix(a) * r.matrix(b) - r.matrix(b) * l.matrix(a);
                    assert!(comm.iter().all(|z| z.norm() < 1e-14));
                }
            }
        }
    }

    #[test]
    fn pauli_rep_verifies_only_with_its_multiplier() {
        let (_, rep) = pauli_setup();
        assert!(verify_representation(&rep).passed);
        let trivial = Multiplier::trivial(rep.group());
        let wrong = UnitaryRep::new_unchecked(&trivial, pauli_matrices().to_vec()).unwrap();
        let report = verify_representation(&wrong);
        assert!(!report.passed);
        assert!(report.max_homomorphism_deviation > 1.0);
    }

    #[test]
    fn unnormalized_multiplier_rejected() {
        let k = build_klein_four();
        let raw = Multiplier::pauli_rotations(&k).unwrap();
        assert!(matches!(left_regular(&raw), Err(Error::Precondition(_))));
        assert!(matches!(right_regular(&raw), Err(Error::Precondition(_))));
    }

    #[test]
    fn builtin_catalogs_are_complete_and_orthogonal() {
        for g in builtin_groups() {
            let m = Multiplier::trivial(&g);
            let cat = builtin_irreps(&m).unwrap();
            assert!(cat.is_complete(), "{g:?}");
            assert!(great_orthogonality_check(&cat) < 1e-10, "{g:?}");
        }
        let (m, _) = pauli_setup();
        let cat = builtin_irreps(&m).unwrap();
        assert_eq!(cat.dims(), vec![2]);
        assert!(cat.is_complete());
        assert!(great_orthogonality_check(&cat) < 1e-12);
    }

    #[test]
    fn z3_characters_are_dft_rows() {
        let cat = builtin_irreps(&Multiplier::trivial(&build_cyclic(3).unwrap())).unwrap();
        let w = C64::from_polar(1.0, 2.0 * PI / 3.0);
        let chars = cat.characters();
        for j in 0..3 {
            for k in 0..3 {
                assert!((chars[j][k] - w.powu((j * k) as u32)).norm() < 1e-14);
            }
        }
        assert!(great_orthogonality_check(&cat) < 1e-12);
    }

    #[test]
    fn d3_dims() {
        let cat = builtin_irreps(&Multiplier::trivial(&build_dihedral(3).unwrap())).unwrap();
        assert_eq!(cat.dims(), vec![1, 1, 2]);
    }

    #[test]
    fn products_have_no_builtin_catalog() {
        let p = build_direct_product(&build_cyclic(2).unwrap(), &build_cyclic(3).unwrap());
        assert!(matches!(builtin_irreps(&Multiplier::trivial(&p)), Err(Error::Unsupported(_))));
    }

    #[test]
    fn regular_decompositions_round_trip() {
        let mut cases: Vec<Multiplier> = builtin_groups().iter().map(Multiplier::trivial).collect();
        cases.push(pauli_setup().0);
        for m in cases {
            let cat = builtin_irreps(&m).unwrap();
            let dec = decompose_regular(&m, &cat).unwrap();
            assert!(dec.max_deviation() < 1e-9);
            let u = &dec.change_of_basis;
            for g in m.group().elements() {
                let back = u.adjoint() * dec.block_matrix(g) * u;
                assert!(max_abs_diff(&back, dec.source.matrix(g)) < 1e-9);
            }
            let total: usize = dec.blocks.iter().map(|b| b.dim * b.multiplicity).sum();
            assert_eq!(total, m.group().order());
        }
    }

    #[test]
    fn cyclic_decomposition_is_fourier() {
        let n = 5;
        let m = Multiplier::trivial(&build_cyclic(n).unwrap());
        let dec = decompose_regular(&m, &builtin_irreps(&m).unwrap()).unwrap();
        for j in 0..n {
            for k in 0..n {
                let f = C64::from_polar(1.0 / (n as f64).sqrt(), 2.0 * PI * (j * k) as f64 / n as f64);
                assert!((dec.change_of_basis[(j, k)] - f).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn incomplete_catalog_rejected() {
        let m = Multiplier::trivial(&build_dihedral(3).unwrap());
        let full = builtin_irreps(&m).unwrap();
        let partial: Vec<(String, Vec<CMat>)> = full.irreps()[..2]
            .iter()
            .map(|i| (i.label.clone(), i.rep.matrices().to_vec()))
            .collect();
        let cat = IrrepCatalog::new(&m, partial).unwrap();
        assert!(!cat.is_complete());
        assert!(decompose_regular(&m, &cat).is_err());
    }

    #[test]
    fn general_decomposition_of_pauli_and_sums() {
        let (m, rep) = pauli_setup();
        let cat = builtin_irreps(&m).unwrap();
        let dec = decompose(&rep, &cat).unwrap();
        assert_eq!(dec.blocks.len(), 1);
        assert_eq!(dec.blocks[0].multiplicity, 1);

        // D₃ acting on std ⊕ trivial ⊕ std, conjugated by a fixed unitary
        let g = build_dihedral(3).unwrap();
        let m = Multiplier::trivial(&g);
        let cat = builtin_irreps(&m).unwrap();
        let std = &cat.irreps()[2].rep;
        let triv = &cat.irreps()[0].rep;
        let mats: Vec<CMat> = g
            .elements()
            .map(|h| {
                let mut out = CMat::zeros(5, 5);
                out.view_mut((0, 0), (2, 2)).copy_from(std.matrix(h));
                out.view_mut((2, 2), (1, 1)).copy_from(triv.matrix(h));
                out.view_mut((3, 3), (2, 2)).copy_from(std.matrix(h));
                out
            })
            .collect();
        let theta: f64 = 0.37;
        let mut w = identity(5);
        w[(0, 0)] = c64(theta.cos(), 0.0);
        w[(0, 4)] = c64(0.0, theta.sin());
        w[(4, 0)] = c64(0.0, theta.sin());
        w[(4, 4)] = c64(theta.cos(), 0.0);
        let mats: Vec<CMat> = mats.into_iter().map(|x| &w * x * w.adjoint()).collect();
        let rep = UnitaryRep::new(&m, mats).unwrap();
        let dec = decompose(&rep, &cat).unwrap();
        let mult: Vec<(usize, usize)> = dec.blocks.iter().map(|b| (b.dim, b.multiplicity)).collect();
        assert_eq!(mult, vec![(1, 1), (2, 2)]);
        assert!(dec.max_deviation() < 1e-9);
    }

    #[test]
    fn general_matches_regular_structure() {
        let m = Multiplier::trivial(&build_dihedral(4).unwrap());
        let cat = builtin_irreps(&m).unwrap();
        let dec = decompose(&left_regular(&m).unwrap(), &cat).unwrap();
        let fast = decompose_regular(&m, &cat).unwrap();
        assert_eq!(dec.blocks, fast.blocks);
    }

    #[test]
    fn missing_irreps_detected() {
        let m = Multiplier::trivial(&build_cyclic(3).unwrap());
        let cat = builtin_irreps(&m).unwrap();
        let partial = IrrepCatalog::new(
            &m,
            vec![(cat.irreps()[0].label.clone(), cat.irreps()[0].rep.matrices().to_vec())],
        )
        .unwrap();
        assert!(decompose(&left_regular(&m).unwrap(), &partial).is_err());
    }
}
