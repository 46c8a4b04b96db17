//! Dense complex linear algebra kernels.
//!
//! Everything here works on small (at most a few dozen rows) dense matrices of
//! order-one entries, so all tolerances are taken relative to
//! `max(1, ‖A‖_max)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Default relative tolerance for positive-semidefiniteness checks.
pub const PSD_TOL: f64 = 1e-9;
/// Relative Hermiticity tolerance accepted by the eigensolver.
pub const HERMITIAN_TOL: f64 = 1e-9;
/// Eigenvalues closer than this are treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Largest entry modulus, `‖A‖_max`.
pub fn max_abs(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max(1, ‖A‖_max)`, the scale every relative tolerance is measured against.
pub fn scale_of(a: &CMat) -> f64 {
    max_abs(a).max(1.0)
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn hermiticity_deviation(a: &CMat) -> f64 {
    max_abs_diff(a, &a.adjoint())
}

/// `(A + A†)/2`
pub fn hermitian_part(a: &CMat) -> CMat {
    (a + a.adjoint()).scale(0.5)
}

/// `|v⟩⟨w|`
pub fn outer(v: &CVec, w: &CVec) -> CMat {
    v * w.adjoint()
}

pub fn projector(v: &CVec) -> CMat {
    outer(v, v)
}

/// Kronecker product `A ⊗ B`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.
#[derive(Debug, Clone)]
pub struct HermitianSpectrum {
    pub eigenvalues: Vec<f64>,
    /// Columns are eigenvectors, in the order of `eigenvalues`.
    pub eigenvectors: CMat,
    pub dim: usize,
}

impl HermitianSpectrum {
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    /// `V f(Λ) V†`
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> CMat {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let fl = f(lam);
            scaled.column_mut(j).scale_mut(fl);
        }
        &scaled * v.adjoint()
    }

    pub fn reconstruct(&self) -> CMat {
        self.apply(|x| x)
    }
}

/// Hermitian eigendecomposition with a descending spectrum.
pub fn hermitian_eig(a: &CMat) -> Result<HermitianSpectrum> {
    if !a.is_square() {
        return Err(Error::Precondition(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let deviation = hermiticity_deviation(a);
    if deviation > HERMITIAN_TOL * scale_of(a) {
        return Err(Error::NotHermitian { deviation });
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(HermitianSpectrum {
            eigenvalues: vec![],
            eigenvectors: CMat::zeros(0, 0),
            dim: 0,
        });
    }
    let eig = SymmetricEigen::new(hermitian_part(a));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = CMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermitianSpectrum {
        eigenvalues,
        eigenvectors,
        dim: n,
    })
}

/// Principal square root of a Hermitian PSD matrix. Eigenvalues in
/// `[-1e-9·scale, 0)` are clamped to zero, and so are positive ones at the
/// roundoff level, whose square roots would otherwise be of order 1e-8.
pub fn sqrtm_psd(a: &CMat) -> Result<CMat> {
    let spec = hermitian_eig(a)?;
    let floor = -PSD_TOL * scale_of(a);
    let min = spec.min_eigenvalue();
    if min < floor {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    let noise = 64.0 * f64::EPSILON * scale_of(a);
    Ok(hermitian_part(&spec.apply(|x| if x <= noise { 0.0 } else { x.sqrt() })))
}

/// Moore–Penrose pseudoinverse via the singular value decomposition.
pub fn pinv(x: &CMat) -> CMat {
    let (m, n) = x.shape();
    if m == 0 || n == 0 {
        return CMat::zeros(n, m);
    }
    let svd = x.clone().svd(true, true);
    let u = svd.u.expect("svd computed with u");
    let v_t = svd.v_t.expect("svd computed with v_t");
    let s_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = 1e-10 * s_max.max(f64::MIN_POSITIVE);
    let mut out = CMat::zeros(n, m);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff && s_max > 0.0 {
            let vk = v_t.row(k).adjoint();
            let uk = u.column(k);
            out += (vk * uk.adjoint()).scale(1.0 / s);
        }
    }
    out
}

/// Orthogonal projector onto the column space of `x`.
pub fn range_projector(x: &CMat) -> CMat {
    hermitian_part(&(x * pinv(x)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdCheck {
    pub psd: bool,
    pub min_eigenvalue: f64,
}

/// `λ_min(A) ≥ -tol·max(1, ‖A‖_max)`. The Hermitian part of `a` is used.
pub fn is_psd(a: &CMat, tol: f64) -> PsdCheck {
    if a.nrows() == 0 {
        return PsdCheck {
            psd: true,
            min_eigenvalue: 0.0,
        };
    }
    let h = hermitian_part(a);
    let eig = SymmetricEigen::new(h);
    let min_eigenvalue = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    PsdCheck {
        psd: min_eigenvalue >= -tol * scale_of(a),
        min_eigenvalue,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinorCheck {
    pub positive: bool,
    /// Order (1-based) of the first leading principal minor that is not positive.
    pub first_failing_order: Option<usize>,
    /// Elimination pivots; the `l`-th leading minor is the product of the first `l`.
    pub pivots: Vec<f64>,
}

/// Sylvester criterion: are all leading principal minors strictly positive?
///
/// Minors are read off the pivots of Gaussian elimination without row
/// exchanges, `det A_l = ∏_{k≤l} p_k`.
pub fn leading_minors_positive(a: &CMat) -> MinorCheck {
    let n = a.nrows();
    let threshold = 64.0 * f64::EPSILON * scale_of(a);
    let mut m = hermitian_part(a);
    let mut pivots = Vec::with_capacity(n);
    for k in 0..n {
        let p = m[(k, k)].re;
        pivots.push(p);
        if p <= threshold {
            return MinorCheck {
                positive: false,
                first_failing_order: Some(k + 1),
                pivots,
            };
        }
        for i in (k + 1)..n {
            let factor = m[(i, k)] / p;
            for j in k..n {
                let delta = factor * m[(k, j)];
                m[(i, j)] -= delta;
            }
        }
    }
    MinorCheck {
        positive: true,
        first_failing_order: None,
        pivots,
    }
}

/// Completes the orthonormal columns of `q` (n×k) to an n×n unitary,
/// filling with Gram–Schmidt over the standard basis in index order.
pub fn complete_orthonormal_basis(q: &CMat) -> CMat {
    let n = q.nrows();
    let mut cols: Vec<CVec> = q.column_iter().map(|c| c.into_owned()).collect();
    let mut e = 0;
    while cols.len() < n && e < n {
        let mut v = CVec::zeros(n);
        v[e] = C64::new(1.0, 0.0);
        // two passes of modified Gram–Schmidt
        for _ in 0..2 {
            for c in &cols {
                let proj = c.dotc(&v);
                v -= c * proj;
            }
        }
        let norm = v.norm();
        if norm > 1e-8 {
            cols.push(v.unscale(norm));
        }
        e += 1;
    }
    CMat::from_columns(&cols)
}
