//! Independent numerical searches used to cross-check the closed forms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gram::Ensemble;
use crate::numerics::{c64, hermitian_eig, range_projector, CMat, C64};

pub const ORACLE_TOL: f64 = 1e-8;
const MAX_SWEEPS: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSearchReport {
    /// `|Σ_a √λ_a e^{iθ_a}|² / |𝒢|²` at the best phases found.
    pub best_value: f64,
    pub best_phases: Vec<f64>,
    pub restarts: usize,
    pub sweeps: usize,
}

/// Minimises `|Σ_a √λ_a e^{iθ_a}|²/|𝒢|²` by coordinate descent from random
/// starting phases. Each move sets `θ_a` antiparallel to the other terms.
pub fn oracle_phase_search(lambdas: &[f64], order: usize, restarts: usize, seed: u64) -> Result<PhaseSearchReport> {
    if lambdas.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    if restarts == 0 {
        return Err(Error::InvalidParameter("at least one restart is needed".into()));
    }
    let r: Vec<f64> = lambdas.iter().map(|l| l.max(0.0).sqrt()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best_value = f64::INFINITY;
    let mut best_phases = vec![];
    let mut total_sweeps = 0;
    for _ in 0..restarts {
        let mut th: Vec<f64> = (0..r.len())
            .map(|_| rng.random::<f64>() * std::f64::consts::TAU)
            .collect();
        let mut sum: C64 = r.iter().zip(&th).map(|(&x, &t)| C64::from_polar(x, t)).sum();
        let mut last = sum.norm_sqr();
        for _ in 0..MAX_SWEEPS {
            total_sweeps += 1;
            for a in 0..r.len() {
                if r[a] == 0.0 {
                    continue;
                }
                let rest = sum - C64::from_polar(r[a], th[a]);
                if rest.norm() > 0.0 {
                    th[a] = (-rest).arg();
                }
                sum = rest + C64::from_polar(r[a], th[a]);
            }
            // recompute to keep roundoff from accumulating
            sum = r.iter().zip(&th).map(|(&x, &t)| C64::from_polar(x, t)).sum();
            let now = sum.norm_sqr();
            if last - now <= 1e-18 * last.max(1e-300) || now < 1e-30 {
                last = now;
                break;
            }
            last = now;
        }
        let value = last / (order * order) as f64;
        if value < best_value {
            best_value = value;
            best_phases = th;
        }
    }
    Ok(PhaseSearchReport {
        best_value,
        best_phases,
        restarts,
        sweeps: total_sweeps,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerReport {
    pub samples: usize,
    pub p_min: f64,
    pub best_found: f64,
    pub mean_found: f64,
    pub violations: usize,
    /// Largest `p_min − error` over the samples, if positive.
    pub worst_violation: f64,
}

impl SamplerReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

fn random_psd(rng: &mut ChaCha8Rng, n: usize, p: &CMat) -> CMat {
    let k = rng.random_range(1..=n);
    let b = CMat::from_fn(n, k, |_, _| c64(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    p * &b * b.adjoint() * p
}

/// Normalises `{A_g}` into a measurement complete on the span projector `p`.
fn normalise(mut elems: Vec<CMat>, p: &CMat) -> Result<Vec<CMat>> {
    let n = p.nrows();
    let s = elems.iter().fold(CMat::zeros(n, n), |acc, a| acc + a);
    let spec = hermitian_eig(&s)?;
    let cut = 1e-12 * spec.max_eigenvalue().max(f64::MIN_POSITIVE);
    let t = spec.apply(|x| if x > cut { 1.0 / x.sqrt() } else { 0.0 });
    for a in elems.iter_mut() {
        *a = &t * &*a * &t;
    }
    // whatever the sum misses of the span goes to the first element
    let total = elems.iter().fold(CMat::zeros(n, n), |acc, a| acc + a);
    elems[0] += p - total;
    Ok(elems)
}

/// Average error `(1/|𝒢|) Σ_g ⟨ψ_g|Π_g|ψ_g⟩` of random exclusion measurements,
/// none of which may beat `p_min`. Odd samples perturb `optimum` when given.
pub fn oracle_povm_sampler(
    ensemble: &Ensemble,
    p_min: f64,
    optimum: Option<&[CMat]>,
    samples: usize,
    seed: u64,
) -> Result<SamplerReport> {
    let order = ensemble.order();
    let n = ensemble.dim();
    let p = range_projector(&ensemble.state_matrix());
    let states = ensemble.states();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut best, mut sum, mut violations, mut worst) = (f64::INFINITY, 0.0, 0, 0.0f64);
    for s in 0..samples {
        let elems: Vec<CMat> = match optimum {
            Some(opt) if s % 2 == 1 => {
                let delta = 10f64.powf(-1.0 - 3.0 * rng.random::<f64>());
                opt.iter().map(|o| o + random_psd(&mut rng, n, &p) * c64(delta, 0.0)).collect()
            }
            _ => (0..order).map(|_| random_psd(&mut rng, n, &p)).collect(),
        };
        let povm = normalise(elems, &p)?;
        let err = states
            .iter()
            .zip(&povm)
            .map(|(psi, e)| (psi.adjoint() * e * psi)[(0, 0)].re)
            .sum::<f64>()
            / order as f64;
        best = best.min(err);
        sum += err;
        if err < p_min - ORACLE_TOL {
            violations += 1;
            worst = worst.max(p_min - err);
        }
    }
    Ok(SamplerReport {
        samples,
        p_min,
        best_found: best,
        mean_found: if samples > 0 { sum / samples as f64 } else { f64::NAN },
        violations,
        worst_violation: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_search_outside_perfect_region() {
        let l = [2.8, 0.1, 0.1];
        let r = oracle_phase_search(&l, 3, 8, 1).unwrap();
        let want = super::super::probabilities::min_error_probability(&l, 3).unwrap();
        assert!((r.best_value - want).abs() < 1e-10, "{} vs {want}", r.best_value);
    }

    #[test]
    fn phase_search_inside_perfect_region() {
        let r = oracle_phase_search(&[1.8, 0.6, 0.6], 3, 8, 2).unwrap();
        assert!(r.best_value < 1e-12);
    }

    #[test]
    fn phase_search_rejects_empty() {
        assert!(oracle_phase_search(&[], 1, 1, 0).is_err());
    }
}
