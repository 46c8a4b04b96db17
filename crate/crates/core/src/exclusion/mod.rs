//! Optimal exclusion: closed-form probabilities, covariant measurements that
//! attain them, dual certificates and numerical oracles.

pub mod certificate;
pub mod oracle;
pub mod phases;
pub mod povm;
pub mod probabilities;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gram::{associated_ensemble, ensemble_operator, gram_from_states, nonzero_spectra_agree, Ensemble, GramMatrix, SchmidtData};
use crate::rep::{decompose, decompose_regular, IrrepCatalog};

pub use certificate::{certify, certify_min_error, certify_unambiguous, DualCertificate};
pub use oracle::{oracle_phase_search, oracle_povm_sampler};
pub use phases::{solve_phase_closure, PhaseSolution};
pub use povm::{build_min_error_povm, build_unambiguous_povm, ExclusionSolution};
pub use probabilities::{
    min_error_probability, perfect_exclusion_possible, unambiguous_failure_probability, Probabilities,
};

/// Schmidt coefficients at or below this count as zero.
pub const SUPPORT_TOL: f64 = 1e-10;
/// Agreement required between the Gram spectrum and the Schmidt multiset.
pub const SPECTRUM_AGREEMENT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    MinError,
    Unambiguous,
}

/// Everything derived from one ensemble. `schmidt` is absent when no irrep
/// catalog was available; the probabilities still follow from the Gram
/// spectrum.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub gram: GramMatrix,
    pub schmidt: Option<SchmidtData>,
    pub probabilities: Probabilities,
}

impl Analysis {
    pub fn lambdas(&self) -> &[f64] {
        self.gram.eigenvalues()
    }

    pub fn schmidt(&self) -> Result<&SchmidtData> {
        self.schmidt.as_ref().ok_or_else(|| {
            Error::Unsupported("no irrep catalog for this group and multiplier; supply one".into())
        })
    }
}

fn finish(gram: GramMatrix, schmidt: Option<SchmidtData>) -> Result<Analysis> {
    let probabilities = Probabilities::from_lambdas(gram.eigenvalues(), gram.order())?;
    if let Some(s) = &schmidt {
        if !nonzero_spectra_agree(gram.eigenvalues(), &s.lambdas, SPECTRUM_AGREEMENT_TOL) {
            return Err(Error::Consistency(format!(
                "Gram spectrum {:?} and Schmidt multiset {:?} disagree",
                gram.eigenvalues(),
                s.lambdas
            )));
        }
    }
    Ok(Analysis {
        gram,
        schmidt,
        probabilities,
    })
}

pub fn analyze_ensemble(e: &Ensemble, catalog: Option<&IrrepCatalog>) -> Result<Analysis> {
    let gram = gram_from_states(e);
    let schmidt = match catalog {
        Some(c) => Some(ensemble_operator(e, &decompose(e.rep(), c)?)?),
        None => None,
    };
    finish(gram, schmidt)
}

/// Works through the associated ensemble on the left regular representation.
pub fn analyze_gram(gram: &GramMatrix, catalog: Option<&IrrepCatalog>) -> Result<Analysis> {
    let schmidt = match (catalog, gram.multiplier()) {
        (Some(c), Some(m)) => {
            let e = associated_ensemble(gram)?;
            Some(ensemble_operator(&e, &decompose_regular(m, c)?)?)
        }
        _ => None,
    };
    finish(gram.clone(), schmidt)
}

/// The optimal measurement for `mode`.
pub fn solve(analysis: &Analysis, mode: Mode) -> Result<ExclusionSolution> {
    povm::build(analysis.schmidt()?, mode)
}
