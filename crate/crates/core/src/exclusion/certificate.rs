//! Dual certificates for the two optimal values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gram::SchmidtData;
use crate::numerics::{
    c64, hermiticity_deviation, identity, is_psd, leading_minors_positive, max_abs, max_abs_diff, outer,
    projector, CMat, CVec,
};
use crate::serial::{matrix_to_rows, Rows};

use super::povm::ExclusionSolution;
use super::{Mode, SUPPORT_TOL};

pub const TRACE_TOL: f64 = 1e-9;
pub const FEASIBILITY_TOL: f64 = 1e-8;
pub const DUAL_TOL: f64 = 1e-8;
pub const DEFAULT_EPSILON: f64 = 1e-6;
/// Doubling of `ν̃` stops here.
pub const MAX_NU_TILDE: f64 = 18_446_744_073_709_551_616.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinErrorCertificate {
    pub passed: bool,
    pub failures: Vec<String>,
    pub p_min: f64,
    /// `Tr Y`, the dual value.
    pub trace_y: f64,
    /// `λ_min(|ψ⟩⟨ψ| − |𝒢|Y)`
    pub feasibility_min_eigenvalue: f64,
    pub hermiticity_deviation: f64,
    /// `ζ = β₁ − Σ_{μ≠1} d_μ Σ_k β_k`; absent in the perfect region.
    pub zeta: Option<f64>,
    pub betas: Vec<f64>,
    /// Distance between `|ψ⟩⟨ψ| − |𝒢|Y` and `ζZ + ζΣβ_k|φ_k⟩⟨φ_k| + |Ψ⟩⟨Ψ|`.
    pub decomposition_residual: Option<f64>,
    pub y: Rows,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnambiguousCertificate {
    pub passed: bool,
    pub failures: Vec<String>,
    pub q_min: f64,
    pub epsilon: f64,
    pub trace_x: f64,
    /// `1 − Tr X`, expected to equal `Q − ε`.
    pub dual_value: f64,
    /// `Δ = Σ_{μ≠1} d_μ Σ_k β_k`
    pub delta: f64,
    pub nu_tilde: f64,
    /// `ν = ν̃/ε`
    pub nu: f64,
    pub minor_pivots: Vec<f64>,
    pub k_matrix: Rows,
    /// `λ_min(X + ν|ψ⟩⟨ψ| − Ω/|𝒢|)`
    pub feasibility_min_eigenvalue: f64,
    /// `max_g ‖U_g X U_g† − X‖_max`
    pub invariance_deviation: f64,
    pub x: Rows,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum DualCertificate {
    MinError(MinErrorCertificate),
    Unambiguous(UnambiguousCertificate),
}

impl DualCertificate {
    pub fn passed(&self) -> bool {
        match self {
            DualCertificate::MinError(c) => c.passed,
            DualCertificate::Unambiguous(c) => c.passed,
        }
    }

    pub fn failures(&self) -> &[String] {
        match self {
            DualCertificate::MinError(c) => &c.failures,
            DualCertificate::Unambiguous(c) => &c.failures,
        }
    }

    /// Turns a failed certificate into an error.
    pub fn require(self) -> Result<Self> {
        if self.passed() {
            Ok(self)
        } else {
            Err(Error::CertificationFailed(self.failures().join("; ")))
        }
    }
}

/// `β_k = √(α_k/|𝒢|)` for the top term and for the other Schmidt terms as
/// `(d_μ, β_k, |ξ_k⟩, block, k)`, rotated coordinates.
struct Betas {
    top: f64,
    top_xi: CVec,
    others: Vec<(usize, f64, CVec, usize, usize)>,
}

fn betas(data: &SchmidtData) -> Betas {
    let n = data.dim();
    let order = data.order() as f64;
    let top = data.top();
    let (tb, tk) = top;
    let mut others = Vec::new();
    for (b, blk) in data.blocks.iter().enumerate() {
        for (k, &a) in blk.alphas.iter().enumerate() {
            if (b, k) != top {
                others.push((blk.dim, (a.max(0.0) / order).sqrt(), blk.xi(k, n), b, k));
            }
        }
    }
    Betas {
        top: (data.blocks[tb].alphas[tk].max(0.0) / order).sqrt(),
        top_xi: data.blocks[tb].xi(tk, n),
        others,
    }
}

/// Builds and checks the minimum-error certificate without raising.
pub fn evaluate_min_error(sol: &ExclusionSolution, data: &SchmidtData) -> MinErrorCertificate {
    let order = data.order();
    let n = data.dim();
    let psi = data.ensemble.seed().clone();
    let omega = &sol.seed_omega;
    let overlap = (omega.adjoint() * &psi)[(0, 0)];
    let rep = data.ensemble.rep();
    let mut y = CMat::zeros(n, n);
    for g in 0..order {
        let u = rep.matrix(g);
        y += u * outer(omega, &psi) * u.adjoint();
    }
    y *= overlap / c64(order as f64, 0.0);
    let trace_y = y.trace().re;
    let f = projector(&psi) - &y * c64(order as f64, 0.0);
    let herm = hermiticity_deviation(&f);
    let min_eig = is_psd(&f, 0.0).min_eigenvalue;

    let mut failures = Vec::new();
    if (trace_y - sol.p_min()).abs() > TRACE_TOL {
        failures.push(format!("Tr Y = {trace_y:.12} differs from P = {:.12}", sol.p_min()));
    }
    if herm > TRACE_TOL {
        failures.push(format!("feasibility operator is not Hermitian (deviation {herm:.3e})"));
    }
    if min_eig < -FEASIBILITY_TOL {
        failures.push(format!("feasibility operator has eigenvalue {min_eig:.3e}"));
    }

    let bt = betas(data);
    let mut all_betas = vec![bt.top];
    all_betas.extend(bt.others.iter().map(|o| o.1));
    let (zeta, residual, note) = if sol.perfect() {
        (None, None, Some("P = 0 is attained, so it is its own certificate".to_string()))
    } else {
        let zeta = bt.top - bt.others.iter().map(|(d, b, ..)| *d as f64 * b).sum::<f64>();
        let mut rhs = CMat::zeros(n, n);
        let mut big_psi = CVec::zeros(n);
        for (d, b, xi, blk_idx, k) in &bt.others {
            let blk = &data.blocks[*blk_idx];
            for l in (0..blk.dim).filter(|l| l != k) {
                let vu = blk.embed(&blk.v_k(l), &blk.u_k(*k), n);
                rhs += projector(&vu) * c64(zeta * b, 0.0);
            }
            let phi = &bt.top_xi * c64((*d as f64).sqrt(), 0.0) + xi;
            rhs += projector(&phi) * c64(zeta * b, 0.0);
            big_psi += phi * c64((*d as f64).sqrt() * b, 0.0);
        }
        rhs += projector(&big_psi);
        let u = &data.decomposition.change_of_basis;
        let f_rot = u * &f * u.adjoint();
        (Some(zeta), Some(max_abs_diff(&f_rot, &rhs)), None)
    };

    MinErrorCertificate {
        passed: failures.is_empty(),
        failures,
        p_min: sol.p_min(),
        trace_y,
        feasibility_min_eigenvalue: min_eig,
        hermiticity_deviation: herm,
        zeta,
        betas: all_betas,
        decomposition_residual: residual,
        y: matrix_to_rows(&y),
        note,
    }
}

pub fn certify_min_error(sol: &ExclusionSolution, data: &SchmidtData) -> Result<DualCertificate> {
    DualCertificate::MinError(evaluate_min_error(sol, data)).require()
}

/// Builds and checks the unambiguous certificate without raising. Requires
/// the region where `Q > 0`.
pub fn evaluate_unambiguous(
    sol: &ExclusionSolution,
    data: &SchmidtData,
    epsilon: f64,
) -> Result<UnambiguousCertificate> {
    if sol.perfect() {
        return Err(Error::Precondition(
            "Q = 0 is attained in the perfect region; there is nothing to certify".into(),
        ));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    let n = data.dim();
    let order = data.order();
    let bt = betas(data);
    let delta: f64 = bt.others.iter().map(|(d, b, ..)| *d as f64 * b).sum();

    // term carrying ε: smallest nonzero β among the others
    let lambda_term = bt
        .others
        .iter()
        .enumerate()
        .filter(|(_, o)| o.1 * o.1 * order as f64 > SUPPORT_TOL)
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, _)| i);

    let mut x_rot = CMat::zeros(n, n);
    for (i, (d, b, _, blk_idx, k)) in bt.others.iter().enumerate() {
        let blk = &data.blocks[*blk_idx];
        let mut w = b * (b + delta);
        if Some(i) == lambda_term {
            w += epsilon / *d as f64;
        }
        if w != 0.0 {
            let p = identity(blk.dim).kronecker(&projector(&blk.u_k(*k)));
            let size = blk.dim * blk.multiplicity;
            let mut view = x_rot.view_mut((blk.offset, blk.offset), (size, size));
            view += p * c64(w, 0.0);
        }
    }
    if lambda_term.is_none() {
        x_rot += projector(&bt.top_xi) * c64(epsilon, 0.0);
    }
    let trace_x = x_rot.trace().re;
    let dual_value = 1.0 - trace_x;

    // K on span{ξ_p : β_p > 0}, index 0 for the top term
    let support: Vec<usize> = (0..bt.others.len())
        .filter(|&i| bt.others[i].1 * bt.others[i].1 * order as f64 > SUPPORT_TOL)
        .collect();
    let dim_k = support.len() + 1;
    let mut psi_t = CVec::zeros(dim_k);
    psi_t[0] = c64(bt.top, 0.0);
    let mut diag = vec![0.0; dim_k];
    if lambda_term.is_none() {
        diag[0] = epsilon;
    }
    for (p, &i) in support.iter().enumerate() {
        let (d, b, ..) = bt.others[i];
        psi_t[p + 1] = c64((d as f64).sqrt() * b, 0.0);
        diag[p + 1] = b * delta + if Some(i) == lambda_term { epsilon / d as f64 } else { 0.0 };
    }
    let base = CMat::from_fn(dim_k, dim_k, |r, c| {
        let mut v = c64(0.0, 0.0);
        if r == c {
            v += c64(diag[r], 0.0);
        }
        if r == 0 && c == 0 {
            v -= c64(bt.top * bt.top, 0.0);
        }
        v
    });
    let mut failures = Vec::new();
    let mut nu_tilde = 1.0;
    let (k_matrix, minors) = loop {
        let k = &base + projector(&psi_t) * c64(nu_tilde / epsilon, 0.0);
        let m = leading_minors_positive(&k);
        if m.positive {
            break (k, m);
        }
        if nu_tilde >= MAX_NU_TILDE {
            failures.push(format!("no ν̃ up to {MAX_NU_TILDE:e} makes K positive definite"));
            break (k, m);
        }
        nu_tilde *= 2.0;
    };
    let nu = nu_tilde / epsilon;

    let u = &data.decomposition.change_of_basis;
    let x = u.adjoint() * &x_rot * u;
    let psi = data.ensemble.seed();
    let f = &x + projector(psi) * c64(nu, 0.0) - &data.omega / c64(order as f64, 0.0);
    let min_eig = is_psd(&f, 0.0).min_eigenvalue;
    let rep = data.ensemble.rep();
    let invariance = (0..order)
        .map(|g| max_abs_diff(&(rep.matrix(g) * &x * rep.matrix(g).adjoint()), &x))
        .fold(0.0, f64::max);

    if (dual_value - (sol.q_min() - epsilon)).abs() > DUAL_TOL {
        failures.push(format!(
            "dual value {dual_value:.12} differs from Q − ε = {:.12}",
            sol.q_min() - epsilon
        ));
    }
    if min_eig < -FEASIBILITY_TOL {
        failures.push(format!("feasibility operator has eigenvalue {min_eig:.3e}"));
    }
    if invariance > FEASIBILITY_TOL * max_abs(&x).max(1.0) {
        failures.push(format!("X is not invariant (deviation {invariance:.3e})"));
    }
    // the primal side: the solution must attain Q with no errors
    let achieved = sol.diagnostics.achieved_inconclusive;
    if (achieved - sol.q_min()).abs() > DUAL_TOL || sol.diagnostics.achieved_error > DUAL_TOL {
        failures.push(format!(
            "measurement attains inconclusive {achieved:.12} and error {:.3e}",
            sol.diagnostics.achieved_error
        ));
    }

    Ok(UnambiguousCertificate {
        passed: failures.is_empty(),
        failures,
        q_min: sol.q_min(),
        epsilon,
        trace_x,
        dual_value,
        delta,
        nu_tilde,
        nu,
        minor_pivots: minors.pivots,
        k_matrix: matrix_to_rows(&k_matrix),
        feasibility_min_eigenvalue: min_eig,
        invariance_deviation: invariance,
        x: matrix_to_rows(&x),
    })
}

pub fn certify_unambiguous(sol: &ExclusionSolution, data: &SchmidtData, epsilon: f64) -> Result<DualCertificate> {
    DualCertificate::Unambiguous(evaluate_unambiguous(sol, data, epsilon)?).require()
}

/// Certificate matching the solution's mode.
pub fn certify(sol: &ExclusionSolution, data: &SchmidtData, epsilon: f64) -> Result<DualCertificate> {
    match sol.mode {
        Mode::MinError => certify_min_error(sol, data),
        Mode::Unambiguous => certify_unambiguous(sol, data, epsilon),
    }
}
