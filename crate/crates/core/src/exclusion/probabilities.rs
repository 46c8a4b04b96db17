//! Closed-form failure probabilities from the Gram spectrum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::DEGENERACY_TOL;

/// Slack in `√λ₁ ≤ Σ_{a>1} √λ_a`.
pub const PERFECT_TOL: f64 = 1e-10;
/// Eigenvalues down to `-NEGATIVE_TOL` are clamped to zero.
pub const NEGATIVE_TOL: f64 = 1e-9;
/// Allowed deviation of `Σ λ_a` from `|𝒢|`.
pub const TRACE_TOL: f64 = 1e-6;

pub fn clamp_probability(p: f64) -> f64 {
    p.clamp(0.0, 1.0)
}

/// Sorted descending and clamped, after checking the preconditions.
pub fn prepare_lambdas(lambdas: &[f64], order: usize) -> Result<Vec<f64>> {
    if lambdas.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    if let Some(bad) = lambdas.iter().find(|&&l| l < -NEGATIVE_TOL || !l.is_finite()) {
        return Err(Error::Precondition(format!("eigenvalue {bad:e} is negative")));
    }
    let total: f64 = lambdas.iter().sum();
    if (total - order as f64).abs() > TRACE_TOL {
        return Err(Error::Precondition(format!(
            "eigenvalues sum to {total}, expected the group order {order}"
        )));
    }
    let mut out: Vec<f64> = lambdas.iter().map(|&l| l.max(0.0)).collect();
    out.sort_by(|a, b| b.total_cmp(a));
    Ok(out)
}

/// `√λ₁ − Σ_{a>1} √λ_a` for a descending, clamped multiset.
pub fn closure_gap(sorted: &[f64]) -> f64 {
    match sorted.split_first() {
        None => 0.0,
        Some((first, rest)) => first.sqrt() - rest.iter().map(|l| l.sqrt()).sum::<f64>(),
    }
}

/// `[max(0, √λ₁ − Σ_{a>1}√λ_a) / |𝒢|]²`
pub fn min_error_probability(lambdas: &[f64], order: usize) -> Result<f64> {
    let l = prepare_lambdas(lambdas, order)?;
    let g = closure_gap(&l).max(0.0);
    Ok(clamp_probability((g / order as f64).powi(2)))
}

/// `(Σ_a √λ_a / |𝒢|) · max(0, √λ₁ − Σ_{a>1}√λ_a)`
pub fn unambiguous_failure_probability(lambdas: &[f64], order: usize) -> Result<f64> {
    let l = prepare_lambdas(lambdas, order)?;
    let g = closure_gap(&l).max(0.0);
    let trace_sqrt: f64 = l.iter().map(|x| x.sqrt()).sum();
    Ok(clamp_probability(trace_sqrt / order as f64 * g))
}

/// `√λ₁ ≤ Σ_{a>1}√λ_a`, or `λ₁` degenerate.
pub fn perfect_exclusion_possible(lambdas: &[f64]) -> bool {
    if lambdas.is_empty() {
        return false;
    }
    let mut l: Vec<f64> = lambdas.iter().map(|&x| x.max(0.0)).collect();
    l.sort_by(|a, b| b.total_cmp(a));
    if l.len() > 1 && l[0] - l[1] <= DEGENERACY_TOL {
        return true;
    }
    closure_gap(&l) <= PERFECT_TOL
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Probabilities {
    pub p_min: f64,
    pub q_min: f64,
    pub perfect: bool,
    /// `√λ₁ − Σ_{a>1}√λ_a`, negative inside the perfect region.
    pub gap: f64,
}

impl Probabilities {
    pub fn from_lambdas(lambdas: &[f64], order: usize) -> Result<Self> {
        let sorted = prepare_lambdas(lambdas, order)?;
        Ok(Self {
            p_min: min_error_probability(&sorted, order)?,
            q_min: unambiguous_failure_probability(&sorted, order)?,
            perfect: perfect_exclusion_possible(&sorted),
            gap: closure_gap(&sorted),
        })
    }
}
