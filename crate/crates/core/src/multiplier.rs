//! Projective multipliers (2-cocycles) on a group table.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupTable;
use crate::numerics::{c64, C64};

/// Tolerance for unit modulus and the cocycle identity.
pub const COCYCLE_TOL: f64 = 1e-12;

/// Phase table `ω(g, h)` attached to a group.
#[derive(Clone, Debug)]
pub struct Multiplier {
    group: GroupTable,
    phases: Arc<Vec<C64>>,
    trivial: bool,
}

impl PartialEq for Multiplier {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.phases == other.phases
    }
}

impl Multiplier {
    pub fn trivial(group: &GroupTable) -> Self {
        let n = group.order();
        Self {
            group: group.clone(),
            phases: Arc::new(vec![c64(1.0, 0.0); n * n]),
            trivial: true,
        }
    }

    /// Validates unit modulus, normalization and the cocycle condition.
    pub fn from_phases(group: &GroupTable, rows: Vec<Vec<C64>>) -> Result<Self> {
        let n = group.order();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidMultiplier(format!("phase table must be {n}x{n}")));
        }
        let phases: Vec<C64> = rows.into_iter().flatten().collect();
        let m = Self::from_flat_unchecked(group, phases);
        let report = m.check();
        if let Some(problem) = report.first_problem() {
            return Err(Error::InvalidMultiplier(problem));
        }
        Ok(m)
    }

    fn from_flat_unchecked(group: &GroupTable, mut phases: Vec<C64>) -> Self {
        let n = group.order();
        // snap entries that are 1 to roundoff so `is_trivial` is meaningful
        for z in phases.iter_mut() {
            if (*z - c64(1.0, 0.0)).norm() <= COCYCLE_TOL {
                *z = c64(1.0, 0.0);
            }
        }
        let trivial = phases.iter().all(|z| *z == c64(1.0, 0.0));
        debug_assert_eq!(phases.len(), n * n);
        Self {
            group: group.clone(),
            phases: Arc::new(phases),
            trivial,
        }
    }

    /// The normalized Pauli multiplier on the Klein four-group
    /// `{e, x, y, z}`, i.e. the one realized by `{𝟙, σx, σy, σz}`.
    pub fn pauli(group: &GroupTable) -> Result<Self> {
        if group.order() != 4 || group.mul(1, 2) != 3 || group.mul(2, 3) != 1 || group.mul(3, 1) != 2 {
            return Err(Error::InvalidMultiplier(
                "the Pauli multiplier needs the Klein four-group with x·y = z".into(),
            ));
        }
        let i = c64(0.0, 1.0);
        let mut rows = vec![vec![c64(1.0, 0.0); 4]; 4];
        // σxσy = iσz, σyσz = iσx, σzσx = iσy
        rows[1][2] = i;
        rows[2][3] = i;
        rows[3][1] = i;
        rows[2][1] = -i;
        rows[3][2] = -i;
        rows[1][3] = -i;
        Self::from_phases(group, rows)
    }

    /// Multiplier of the unnormalized spin-½ rotation set `{𝟙, -iσx, -iσy, -iσz}`.
    pub fn pauli_rotations(group: &GroupTable) -> Result<Self> {
        let p = Self::pauli(group)?;
        // (-iσ_a)(-iσ_b) = -σ_aσ_b, and -iσ_{ab} carries one factor of -i
        let rows = (0..4)
            .map(|a| {
                (0..4)
                    .map(|b| {
                        if a == 0 || b == 0 {
                            c64(1.0, 0.0)
                        } else {
                            let w = p.omega(a, b);
                            if a == b {
                                c64(-1.0, 0.0)
                            } else {
                                // -w σ_{ab} = -w · i · (-iσ_{ab})
                                -w * c64(0.0, 1.0)
                            }
                        }
                    })
                    .collect()
            })
            .collect();
        Self::from_phases(group, rows)
    }

    #[inline]
    pub fn omega(&self, g: usize, h: usize) -> C64 {
        self.phases[g * self.group.order() + h]
    }

    pub fn group(&self) -> &GroupTable {
        &self.group
    }

    pub fn is_trivial(&self) -> bool {
        self.trivial
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        self.phases
            .chunks(self.group.order())
            .map(|r| r.to_vec())
            .collect()
    }

    /// `ω(g, g⁻¹) = 1` for every `g`, within [`COCYCLE_TOL`].
    pub fn is_normalized(&self) -> bool {
        self.group
            .elements()
            .all(|g| (self.omega(g, self.group.inv(g)) - 1.0).norm() <= COCYCLE_TOL)
    }

    pub fn check(&self) -> MultiplierCheck {
        let g = &self.group;
        let n = g.order();
        let one = c64(1.0, 0.0);
        let mut report = MultiplierCheck::default();
        for a in 0..n {
            for b in 0..n {
                let dev = (self.omega(a, b).norm() - 1.0).abs();
                report.max_modulus_deviation = report.max_modulus_deviation.max(dev);
            }
            if self.omega(a, 0) != one || self.omega(0, a) != one {
                report.normalization_witness.get_or_insert(a);
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = g.mul(a, b);
                for c in 0..n {
                    let lhs = self.omega(a, b) * self.omega(ab, c);
                    let rhs = self.omega(a, g.mul(b, c)) * self.omega(b, c);
                    let dev = (lhs - rhs).norm();
                    if dev > report.max_cocycle_deviation {
                        report.max_cocycle_deviation = dev;
                        if dev > COCYCLE_TOL {
                            report.cocycle_witness = Some([a, b, c]);
                        }
                    }
                }
            }
        }
        report
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MultiplierCheck {
    pub max_modulus_deviation: f64,
    pub max_cocycle_deviation: f64,
    pub cocycle_witness: Option<[usize; 3]>,
    pub normalization_witness: Option<usize>,
}

impl MultiplierCheck {
    pub fn passed(&self) -> bool {
        self.first_problem().is_none()
    }

    pub fn first_problem(&self) -> Option<String> {
        if self.max_modulus_deviation > COCYCLE_TOL {
            return Some(format!(
                "phase modulus deviates from 1 by {:.3e}",
                self.max_modulus_deviation
            ));
        }
        if let Some(g) = self.normalization_witness {
            return Some(format!("ω({g}, e) or ω(e, {g}) is not exactly 1"));
        }
        if let Some([a, b, c]) = self.cocycle_witness {
            return Some(format!(
                "cocycle condition fails at ({a}, {b}, {c}) by {:.3e}",
                self.max_cocycle_deviation
            ));
        }
        None
    }
}

/// `√z` with the argument taken in `[-π, π)`, so that `√-1 = -i`.
fn sqrt_branch(z: C64) -> C64 {
    let mut arg = z.arg();
    if arg >= PI {
        arg -= 2.0 * PI;
    }
    C64::from_polar(z.norm().sqrt(), arg / 2.0)
}

/// The rescaling `μ(g) = 1/√ω(g, g⁻¹)` that makes a multiplier normalized.
///
/// `μ(g⁻¹)` is set equal to `μ(g)` so that `ω′(g, g⁻¹)` and `ω′(g⁻¹, g)` are
/// both 1 regardless of roundoff in the table.
pub fn normalizing_gauge(m: &Multiplier) -> Vec<C64> {
    let g = m.group();
    let n = g.order();
    let mut mu = vec![c64(1.0, 0.0); n];
    for a in 0..n {
        let ai = g.inv(a);
        if ai < a {
            mu[a] = mu[ai];
            continue;
        }
        let w = m.omega(a, ai);
        mu[a] = if (w - 1.0).norm() <= COCYCLE_TOL {
            c64(1.0, 0.0)
        } else {
            sqrt_branch(w).inv()
        };
    }
    mu
}

/// Equivalent multiplier with `ω′(g, g⁻¹) = 1`.
///
/// The representation `U′_g = μ(g) U_g` carries
/// `ω′(g, h) = ω(g, h) μ(g) μ(h) / μ(gh)`.
pub fn normalize_multiplier(m: &Multiplier) -> Multiplier {
    let mu = normalizing_gauge(m);
    let g = m.group();
    let n = g.order();
    let mut phases = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let w = m.omega(a, b) * mu[a] * mu[b] / mu[g.mul(a, b)];
            phases.push(w.unscale(w.norm()));
        }
    }
    Multiplier::from_flat_unchecked(g, phases)
}
