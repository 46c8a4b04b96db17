//! The JSON report written by every command.

use serde::{Deserialize, Serialize};

use crate::exclusion::certificate::DualCertificate;
use crate::exclusion::oracle::{PhaseSearchReport, SamplerReport};
use crate::exclusion::phases::PhaseSolution;
use crate::exclusion::povm::{ExclusionSolution, PovmDiagnostics};
use crate::exclusion::Mode;
use crate::group::{GroupKind, GroupTable};
use crate::numerics::C64;
use crate::serial::{matrix_to_rows, vector_to_vec, Rows};

use super::spec::JobSpec;

pub const REPORT_SCHEMA: &str = "qse-report/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub tool_version: String,
    pub command: String,
    pub job: JobSpec,
    pub group: GroupSummary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analysis: Option<AnalysisPayload>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub povm: Option<PovmPayload>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub certificates: Vec<DualCertificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OraclePayload>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub canonical: Option<CanonicalPayload>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    /// Only present with `--timing`, so default output is reproducible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub order: usize,
    pub kind: GroupKind,
    pub names: Vec<String>,
    pub abelian: bool,
}

impl GroupSummary {
    pub fn of(g: &GroupTable) -> Self {
        Self {
            order: g.order(),
            kind: g.kind(),
            names: g.names().to_vec(),
            abelian: g.is_abelian(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisPayload {
    /// Eigenvalues of the Gram matrix, descending.
    pub gram_spectrum: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram_coefficients: Option<Vec<C64>>,
    /// The same multiset from the per-irrep Schmidt data, when available.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schmidt_spectrum: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub blocks: Vec<BlockSummary>,
    pub p_min: f64,
    pub q_min: f64,
    pub perfect: bool,
    /// `√λ₁ − Σ_{a>1}√λ_a`
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSummary {
    pub label: String,
    pub dim: usize,
    pub multiplicity: usize,
    pub alphas: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorSpace {
    /// The space of the given seed and representation.
    Seed,
    /// The columns-of-√G ensemble built from Gram coefficients.
    AssociatedEnsemble,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PovmPayload {
    pub mode: Mode,
    pub space: OperatorSpace,
    pub gamma: f64,
    pub seed_omega: Vec<C64>,
    pub elements: Vec<Rows>,
    /// `Π_?`; omitted when it vanishes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inconclusive: Option<Rows>,
    /// Projector onto the span of the states.
    pub support: Rows,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phases: Option<PhaseSolution>,
    pub diagnostics: PovmDiagnostics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl PovmPayload {
    pub fn new(sol: &ExclusionSolution, space: OperatorSpace, support: &crate::numerics::CMat) -> Self {
        let inconclusive = if crate::numerics::max_abs(&sol.inconclusive) > 1e-12 {
            Some(matrix_to_rows(&sol.inconclusive))
        } else {
            None
        };
        Self {
            mode: sol.mode,
            space,
            gamma: sol.gamma,
            seed_omega: vector_to_vec(&sol.seed_omega),
            elements: sol.povm.iter().map(matrix_to_rows).collect(),
            inconclusive,
            support: matrix_to_rows(support),
            phases: sol.phases.clone(),
            diagnostics: sol.diagnostics,
            note: sol.note.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OraclePayload {
    pub seed: u64,
    pub tolerance: f64,
    pub phase_search: PhaseSearchReport,
    /// `|oracle − P|`
    pub phase_search_delta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampler: Option<SamplerReport>,
    /// Error attained by the constructed measurement.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constructed_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constructed_delta: Option<f64>,
    pub agreement: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalPayload {
    /// Entries as `±[i]c_label` strings.
    pub rows: Vec<Vec<String>>,
    pub constraints: Vec<String>,
    pub text: String,
}
