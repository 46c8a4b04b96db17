//! Covariant exclusion measurements `Π_g = U_g|ω⟩⟨ω|U_g†`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gram::SchmidtData;
use crate::numerics::{c64, hermitian_part, identity, is_psd, max_abs_diff, projector, CMat, CVec, C64};

use super::phases::{solve_phase_closure, PhaseSolution, TermKind};
use super::probabilities::Probabilities;
use super::{Mode, SUPPORT_TOL};

/// Tolerance on completeness and on achieved versus closed-form values.
pub const POVM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PovmDiagnostics {
    /// `‖Σ_g Π_g + Π_? − P_span‖_max` against the closed-form `Π_?`.
    pub completeness_deviation: f64,
    pub min_element_eigenvalue: f64,
    pub inconclusive_min_eigenvalue: f64,
    /// `(1/|𝒢|) Σ_g ⟨ψ_g|Π_g|ψ_g⟩`
    pub achieved_error: f64,
    /// `(1/|𝒢|) Σ_g ⟨ψ_g|Π_?|ψ_g⟩`
    pub achieved_inconclusive: f64,
    /// Spread of `⟨ψ_g|Π_g|ψ_g⟩` over `g`.
    pub covariance_spread: f64,
}

#[derive(Debug, Clone)]
pub struct ExclusionSolution {
    pub mode: Mode,
    pub probabilities: Probabilities,
    /// `γ`; 1 for minimum error.
    pub gamma: f64,
    /// `|ω⟩` in the original space.
    pub seed_omega: CVec,
    pub povm: Vec<CMat>,
    /// `Π_? = P_span − Σ_g Π_g`
    pub inconclusive: CMat,
    pub phases: Option<PhaseSolution>,
    pub diagnostics: PovmDiagnostics,
    pub note: Option<String>,
}

impl ExclusionSolution {
    pub fn p_min(&self) -> f64 {
        self.probabilities.p_min
    }

    pub fn q_min(&self) -> f64 {
        self.probabilities.q_min
    }

    pub fn perfect(&self) -> bool {
        self.probabilities.perfect
    }

    /// Same solution with `|ω⟩` replaced, diagnostics recomputed and nothing
    /// validated. Used to exercise the certificate checks.
    pub fn with_seed(&self, data: &SchmidtData, omega: CVec) -> Self {
        assemble(
            data,
            self.mode,
            self.probabilities,
            self.gamma,
            omega,
            self.phases.clone(),
        )
    }
}

/// `⨁_μ 𝟙_{d_μ} ⊗ Σ_{α_k>0} |u_k⟩⟨u_k|`, the projector onto the span of the
/// orbit, in the original space.
pub fn support_projector(data: &SchmidtData) -> CMat {
    let n = data.dim();
    let mut rot = CMat::zeros(n, n);
    for b in &data.blocks {
        let mut inner = CMat::zeros(b.multiplicity, b.multiplicity);
        for (k, _) in b.alphas.iter().enumerate().filter(|(_, &a)| a > SUPPORT_TOL) {
            inner += projector(&b.u_k(k));
        }
        let blk = identity(b.dim).kronecker(&inner);
        let size = b.dim * b.multiplicity;
        rot.view_mut((b.offset, b.offset), (size, size)).copy_from(&blk);
    }
    let u = &data.decomposition.change_of_basis;
    hermitian_part(&(u.adjoint() * rot * u))
}

/// `|ξ₁⟩` in the original space.
pub fn top_vector(data: &SchmidtData) -> CVec {
    let (b, k) = data.top();
    data.decomposition.unrotate(&data.blocks[b].xi(k, data.dim()))
}

pub fn build_min_error_povm(data: &SchmidtData) -> Result<ExclusionSolution> {
    build(data, Mode::MinError)
}

pub fn build_unambiguous_povm(data: &SchmidtData) -> Result<ExclusionSolution> {
    build(data, Mode::Unambiguous)
}

pub fn build(data: &SchmidtData, mode: Mode) -> Result<ExclusionSolution> {
    let probabilities = Probabilities::from_lambdas(&data.lambdas, data.order())?;
    let (rotated, gamma, phases) = if probabilities.perfect {
        let phases = solve_phase_closure(data)?;
        (perfect_seed(data, &phases)?, 1.0, Some(phases))
    } else {
        let gamma = match mode {
            Mode::MinError => 1.0,
            Mode::Unambiguous => unambiguous_gamma(data),
        };
        (imperfect_seed(data, gamma), gamma, None)
    };
    let omega = data.decomposition.unrotate(&rotated);
    let mut sol = assemble(data, mode, probabilities, gamma, omega, phases);
    if probabilities.perfect && mode == Mode::Unambiguous {
        sol.note = Some("perfect exclusion is possible: the zero-error measurement needs no inconclusive outcome".into());
    }
    validate(&sol)?;
    Ok(sol)
}

/// `Σ_{μ≠1} Σ_k d_μ √α_k / √α₁`
pub fn unambiguous_gamma(data: &SchmidtData) -> f64 {
    let (tb, tk) = data.top();
    let top = data.blocks[tb].alphas[tk];
    if top <= 0.0 {
        return 0.0;
    }
    others(data).map(|(d, a, _)| d as f64 * a.sqrt()).sum::<f64>() / top.sqrt()
}

/// `(d_μ, α_k, |ξ_k⟩)` over the support, excluding the top term.
fn others(data: &SchmidtData) -> impl Iterator<Item = (usize, f64, CVec)> + '_ {
    let top = data.top();
    let n = data.dim();
    data.blocks.iter().enumerate().flat_map(move |(b, blk)| {
        blk.alphas
            .iter()
            .enumerate()
            .filter(move |&(k, &a)| a > SUPPORT_TOL && (b, k) != top)
            .map(move |(k, &a)| (blk.dim, a, blk.xi(k, n)))
    })
}

/// `(1/√|𝒢|)(γ|ξ₁⟩ − Σ_{μ≠1} √d_μ Σ_k |ξ_k⟩)` in rotated coordinates.
fn imperfect_seed(data: &SchmidtData, gamma: f64) -> CVec {
    let n = data.dim();
    let (tb, tk) = data.top();
    let mut w = data.blocks[tb].xi(tk, n) * c64(gamma, 0.0);
    for (d, _, xi) in others(data) {
        w -= xi * c64((d as f64).sqrt(), 0.0);
    }
    w / c64((data.order() as f64).sqrt(), 0.0)
}

/// `(1/√|𝒢|) Σ_μ √d_μ Σ_j |e_j⟩|u_j⟩`, with the `|e_j⟩` chosen so block `μ`
/// contributes its assigned term to `|𝒢|⟨ω|ψ⟩`.
fn perfect_seed(data: &SchmidtData, phases: &PhaseSolution) -> Result<CVec> {
    let n = data.dim();
    let mut w = CVec::zeros(n);
    for term in &phases.terms {
        let blk = &data.blocks[term.block];
        let s = blk.support(SUPPORT_TOL);
        let d = blk.dim;
        let rho = if term.max_length > 0.0 {
            term.value() / term.max_length
        } else {
            C64::new(0.0, 0.0)
        };
        // ⟨e_j|v_j⟩ = ρ for every j < s
        let es: Vec<CVec> = match (term.kind, s) {
            (_, 0) => vec![],
            (TermKind::Rigid, _) => vec![blk.v_k(0) * rho.conj()],
            (TermKind::Flexible, 1) => {
                let rest = (1.0 - rho.norm_sqr()).max(0.0).sqrt();
                vec![blk.v_k(0) * rho.conj() + blk.v_k(1) * c64(rest, 0.0)]
            }
            (TermKind::Flexible, _) => {
                let e = constant_diagonal_unitary(s, rho.conj());
                (0..s)
                    .map(|j| (0..s).fold(CVec::zeros(d), |acc, l| acc + blk.v_k(l) * e[(l, j)]))
                    .collect()
            }
        };
        let scale = c64((d as f64 / data.order() as f64).sqrt(), 0.0);
        for (j, e) in es.iter().enumerate() {
            w += blk.embed(e, &blk.u_k(j), n) * scale;
        }
    }
    Ok(w)
}

/// An `s×s` unitary (`s ≥ 2`) whose diagonal entries all equal `c`, `|c| ≤ 1`:
/// `F D F†` with `F` the Fourier matrix and `D` a fan of phases around `arg c`.
pub fn constant_diagonal_unitary(s: usize, c: C64) -> CMat {
    let r = c.norm().min(1.0);
    let sf = s as f64;
    // mean of e^{it(k-(s-1)/2)} over k, decreasing from 1 to 0 on [0, 2π/s]
    let mean = |t: f64| -> f64 {
        if t.abs() < 1e-300 {
            1.0
        } else {
            (sf * t / 2.0).sin() / (sf * (t / 2.0).sin())
        }
    };
    let (mut lo, mut hi) = (0.0, 2.0 * PI / sf);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean(mid) > r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    let phi = c.arg();
    let f = CMat::from_fn(s, s, |l, k| C64::from_polar(1.0 / sf.sqrt(), 2.0 * PI * (l * k) as f64 / sf));
    let d = CMat::from_fn(s, s, |i, j| {
        if i == j {
            C64::from_polar(1.0, phi + t * (i as f64 - (sf - 1.0) / 2.0))
        } else {
            C64::new(0.0, 0.0)
        }
    });
    &f * d * f.adjoint()
}

fn assemble(
    data: &SchmidtData,
    mode: Mode,
    probabilities: Probabilities,
    gamma: f64,
    omega: CVec,
    phases: Option<PhaseSolution>,
) -> ExclusionSolution {
    let rep = data.ensemble.rep();
    let order = data.order();
    let povm: Vec<CMat> = (0..order)
        .map(|g| projector(&rep.apply(g, &omega)))
        .collect();
    let span = support_projector(data);
    let total = povm.iter().fold(CMat::zeros(data.dim(), data.dim()), |acc, p| acc + p);
    let inconclusive = hermitian_part(&(&span - &total));
    let expected_inconclusive = if probabilities.perfect {
        CMat::zeros(data.dim(), data.dim())
    } else {
        projector(&top_vector(data)) * c64(1.0 - gamma * gamma, 0.0)
    };
    let states = data.ensemble.states();
    let errors: Vec<f64> = states
        .iter()
        .zip(&povm)
        .map(|(psi, p)| (psi.adjoint() * p * psi)[(0, 0)].re)
        .collect();
    let achieved_error = errors.iter().sum::<f64>() / order as f64;
    let achieved_inconclusive = states
        .iter()
        .map(|psi| (psi.adjoint() * &inconclusive * psi)[(0, 0)].re)
        .sum::<f64>()
        / order as f64;
    let spread = errors.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - errors.iter().copied().fold(f64::INFINITY, f64::min);
    let min_element_eigenvalue = povm
        .iter()
        .map(|p| is_psd(p, 0.0).min_eigenvalue)
        .fold(f64::INFINITY, f64::min);
    let diagnostics = PovmDiagnostics {
        completeness_deviation: max_abs_diff(&(&total + &expected_inconclusive), &span),
        min_element_eigenvalue,
        inconclusive_min_eigenvalue: is_psd(&inconclusive, 0.0).min_eigenvalue,
        achieved_error,
        achieved_inconclusive,
        covariance_spread: spread,
    };
    ExclusionSolution {
        mode,
        probabilities,
        gamma,
        seed_omega: omega,
        povm,
        inconclusive,
        phases,
        diagnostics,
        note: None,
    }
}

fn validate(sol: &ExclusionSolution) -> Result<()> {
    let d = &sol.diagnostics;
    let fail = |what: &str, v: f64| Err(Error::Consistency(format!("{what} off by {v:.3e}")));
    if d.completeness_deviation > POVM_TOL {
        return fail("completeness", d.completeness_deviation);
    }
    if d.inconclusive_min_eigenvalue < -POVM_TOL {
        return fail("inconclusive element positivity", -d.inconclusive_min_eigenvalue);
    }
    let (want_err, want_inc) = match sol.mode {
        Mode::MinError if !sol.perfect() => (sol.p_min(), 0.0),
        Mode::Unambiguous if !sol.perfect() => (0.0, sol.q_min()),
        _ => (0.0, 0.0),
    };
    if (d.achieved_error - want_err).abs() > POVM_TOL {
        return fail("achieved error probability", (d.achieved_error - want_err).abs());
    }
    if (d.achieved_inconclusive - want_inc).abs() > POVM_TOL {
        return fail("achieved inconclusive probability", (d.achieved_inconclusive - want_inc).abs());
    }
    Ok(())
}
