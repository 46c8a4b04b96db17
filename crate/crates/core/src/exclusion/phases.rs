//! Closing the polygon `Σ_a √λ_a e^{iθ_a} = 0` inside the perfect region.
//!
//! Irreps of dimension one contribute rigid terms of fixed length. A block
//! with `d_μ ≥ 2` contributes a flexible term whose length can be anything in
//! `[0, d_μ Σ_k √α_k]`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gram::SchmidtData;
use crate::numerics::C64;

use super::probabilities::{closure_gap, perfect_exclusion_possible};
use super::SUPPORT_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermKind {
    Rigid,
    Flexible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseTerm {
    pub block: usize,
    pub label: String,
    pub kind: TermKind,
    /// Length available to the term; fixed for rigid terms.
    pub max_length: f64,
    /// Length actually used.
    pub length: f64,
    pub phase: f64,
}

impl PhaseTerm {
    pub fn value(&self) -> C64 {
        C64::from_polar(self.length, self.phase)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSolution {
    pub terms: Vec<PhaseTerm>,
    /// `|Σ_a √λ_a e^{iθ_a}|`
    pub residual: f64,
}

/// Lengths and phases closing a polygon with the given sides. Flexible sides
/// may be shortened. Fails when a rigid side exceeds all the others combined.
pub fn close_polygon(max_lengths: &[f64], flexible: &[bool]) -> Result<(Vec<f64>, Vec<f64>)> {
    if max_lengths.len() != flexible.len() {
        return Err(Error::InvalidParameter("lengths and kinds differ in count".into()));
    }
    let n = max_lengths.len();
    let mut lengths: Vec<f64> = max_lengths.iter().map(|&l| l.max(0.0)).collect();
    if !flexible.iter().any(|&f| !f) {
        // every flexible term can close on its own
        return Ok((vec![0.0; n], vec![0.0; n]));
    }
    let total: f64 = lengths.iter().sum();
    for i in 0..n {
        let rest = total - lengths[i];
        if flexible[i] && lengths[i] > rest {
            lengths[i] = rest;
        }
    }
    let total: f64 = lengths.iter().sum();
    let scale = total.max(f64::MIN_POSITIVE);
    if let Some(i) = (0..n).find(|&i| !flexible[i] && lengths[i] > total - lengths[i] + 1e-8 * scale) {
        return Err(Error::Precondition(format!(
            "rigid term {} of length {} exceeds the rest combined",
            i, lengths[i]
        )));
    }

    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| lengths[b].total_cmp(&lengths[a]).then(a.cmp(&b)));
    let a = lengths[idx[0]];
    let (mut pile_b, mut pile_c) = (Vec::new(), Vec::new());
    let (mut sum_b, mut sum_c) = (0.0, 0.0);
    for &i in &idx[1..] {
        if sum_b <= sum_c {
            pile_b.push(i);
            sum_b += lengths[i];
        } else {
            pile_c.push(i);
            sum_c += lengths[i];
        }
    }
    let mut phases = vec![0.0; n];
    if a <= 0.0 {
        return Ok((lengths, phases));
    }
    let angle = |x: f64, y: f64, z: f64| -> f64 {
        // angle opposite z in a triangle with sides x, y, z
        if x <= 0.0 || y <= 0.0 {
            return 0.0;
        }
        ((x * x + y * y - z * z) / (2.0 * x * y)).clamp(-1.0, 1.0).acos()
    };
    let theta_b = PI - angle(a, sum_b, sum_c);
    // acos loses half the digits near a flat triangle; pointing pile C
    // against A + B instead leaves only a second-order error
    let theta_c = if sum_c > 0.0 {
        (-(C64::from_polar(a, 0.0) + C64::from_polar(sum_b, theta_b))).arg()
    } else {
        PI + angle(a, sum_c, sum_b)
    };
    for &i in &pile_b {
        phases[i] = theta_b;
    }
    for &i in &pile_c {
        phases[i] = theta_c.rem_euclid(std::f64::consts::TAU);
    }
    Ok((lengths, phases))
}

/// Phases for every block of the seed; requires the perfect region.
pub fn solve_phase_closure(data: &SchmidtData) -> Result<PhaseSolution> {
    if !perfect_exclusion_possible(&data.lambdas) {
        return Err(Error::Precondition(
            "phases cannot close outside the perfect-exclusion region".into(),
        ));
    }
    let mut terms = Vec::new();
    for (b, blk) in data.blocks.iter().enumerate() {
        let sum: f64 = blk.alphas.iter().filter(|&&a| a > SUPPORT_TOL).map(|a| a.sqrt()).sum();
        if sum <= 0.0 {
            continue;
        }
        let kind = if blk.dim >= 2 { TermKind::Flexible } else { TermKind::Rigid };
        terms.push(PhaseTerm {
            block: b,
            label: blk.label.clone(),
            kind,
            max_length: blk.dim as f64 * sum,
            length: 0.0,
            phase: 0.0,
        });
    }
    let maxes: Vec<f64> = terms.iter().map(|t| t.max_length).collect();
    let flex: Vec<bool> = terms.iter().map(|t| t.kind == TermKind::Flexible).collect();
    let (lengths, phases) = close_polygon(&maxes, &flex)?;
    for (t, (l, p)) in terms.iter_mut().zip(lengths.into_iter().zip(phases)) {
        t.length = l;
        t.phase = p;
    }
    let residual = terms.iter().map(PhaseTerm::value).sum::<C64>().norm();
    Ok(PhaseSolution { terms, residual })
}

/// `|Σ_a √λ_a e^{iθ_a}|` for explicit phases.
pub fn closure_residual(lambdas: &[f64], phases: &[f64]) -> f64 {
    lambdas
        .iter()
        .zip(phases)
        .map(|(&l, &t)| C64::from_polar(l.max(0.0).sqrt(), t))
        .sum::<C64>()
        .norm()
}

/// The antipodal assignment `θ_1 = 0`, `θ_a = π` for `a > 1`, on a descending
/// multiset. Outside the perfect region this is optimal.
pub fn antipodal_phases(n: usize) -> Vec<f64> {
    (0..n).map(|a| if a == 0 { 0.0 } else { PI }).collect()
}

/// Residual of the antipodal assignment, equal to the closure gap when it is
/// nonnegative.
pub fn antipodal_residual(lambdas: &[f64]) -> f64 {
    let mut l: Vec<f64> = lambdas.iter().map(|&x| x.max(0.0)).collect();
    l.sort_by(|a, b| b.total_cmp(a));
    closure_residual(&l, &antipodal_phases(l.len()))
}

/// `√λ₁ − Σ_{a>1}√λ_a` for an unsorted multiset.
pub fn gap_of(lambdas: &[f64]) -> f64 {
    let mut l: Vec<f64> = lambdas.iter().map(|&x| x.max(0.0)).collect();
    l.sort_by(|a, b| b.total_cmp(a));
    closure_gap(&l)
}
