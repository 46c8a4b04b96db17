//! The JSON job specification and its translation into library objects.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gram::{gram_from_coefficients, Ensemble, GramMatrix};
use crate::group::{build_cyclic, build_dihedral, build_klein_four, GroupTable};
use crate::multiplier::Multiplier;
use crate::numerics::C64;
use crate::rep::{builtin_irreps, left_regular, right_regular, IrrepCatalog, UnitaryRep};
use crate::serial::{rows_to_matrix, vec_to_vector, Rows};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    #[serde(default = "default_version")]
    pub schema_version: u32,
    pub group: GroupSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplier: Option<MultiplierSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<Vec<C64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rep: Option<RepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram_coefficients: Option<Vec<C64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalog: Option<CatalogSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<SpecMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

fn default_version() -> u32 {
    SCHEMA_VERSION
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinGroup {
    Cyclic,
    Dihedral,
    KleinFour,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum GroupSpec {
    Builtin {
        builtin: BuiltinGroup,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
    },
    Table {
        table: Vec<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        names: Option<Vec<String>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinMultiplier {
    Trivial,
    Pauli,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum MultiplierSpec {
    Builtin { builtin: BuiltinMultiplier },
    Phases { phases: Rows },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedRep {
    LeftRegular,
    RightRegular,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum RepSpec {
    Named(NamedRep),
    Irrep { irrep: String },
    Matrices { matrices: Vec<Rows> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IrrepSpec {
    pub label: String,
    pub matrices: Vec<Rows>,
}

/// Inline irreps, or a path to a JSON file holding the same array, relative
/// to the job file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CatalogSpec {
    File(String),
    Inline(Vec<IrrepSpec>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecMode {
    MinError,
    Unambiguous,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Allowed disagreement between oracles and closed forms.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<f64>,
    /// `ε` for the unambiguous certificate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

/// What a job is run on.
#[derive(Debug, Clone)]
pub enum Source {
    Ensemble(Ensemble),
    Gram(GramMatrix),
}

/// A parsed spec plus everything built from it.
#[derive(Debug, Clone)]
pub struct Job {
    pub spec: JobSpec,
    pub group: GroupTable,
    pub multiplier: Multiplier,
    pub catalog: Option<IrrepCatalog>,
    pub source: Option<Source>,
    pub notes: Vec<String>,
}

impl JobSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: JobSpec =
            serde_json::from_str(text).map_err(|e| Error::InvalidParameter(format!("job spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Structural checks that serde cannot express.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidParameter(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.seed.is_some() && self.gram_coefficients.is_some() {
            return Err(Error::InvalidParameter(
                "give either seed (with rep) or gram_coefficients, not both".into(),
            ));
        }
        if self.rep.is_some() && self.seed.is_none() {
            return Err(Error::InvalidParameter("rep is only meaningful with a seed".into()));
        }
        if let Some(t) = &self.tolerances {
            for (name, v) in [("oracle", t.oracle), ("epsilon", t.epsilon)] {
                if let Some(v) = v {
                    if !(v > 0.0 && v.is_finite()) {
                        return Err(Error::InvalidParameter(format!("tolerance {name} must be positive")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn has_ensemble(&self) -> bool {
        self.seed.is_some() || self.gram_coefficients.is_some()
    }
}

pub fn build_group(spec: &GroupSpec) -> Result<GroupTable> {
    match spec {
        GroupSpec::Builtin { builtin, n } => {
            let need_n = || n.ok_or_else(|| Error::InvalidParameter("builtin group needs n".into()));
            match builtin {
                BuiltinGroup::Cyclic => build_cyclic(need_n()?),
                BuiltinGroup::Dihedral => build_dihedral(need_n()?),
                BuiltinGroup::KleinFour => {
                    if n.is_some_and(|n| n != 4) {
                        return Err(Error::InvalidParameter("klein_four has order 4".into()));
                    }
                    Ok(build_klein_four())
                }
            }
        }
        GroupSpec::Table { table, names } => GroupTable::from_table(table.clone(), names.clone()),
    }
}

pub fn build_multiplier(spec: Option<&MultiplierSpec>, group: &GroupTable) -> Result<Multiplier> {
    match spec {
        None | Some(MultiplierSpec::Builtin { builtin: BuiltinMultiplier::Trivial }) => Ok(Multiplier::trivial(group)),
        Some(MultiplierSpec::Builtin { builtin: BuiltinMultiplier::Pauli }) => Multiplier::pauli(group),
        Some(MultiplierSpec::Phases { phases }) => Multiplier::from_phases(group, phases.clone()),
    }
}

fn load_catalog(spec: &CatalogSpec, base: &Path, multiplier: &Multiplier) -> Result<IrrepCatalog> {
    let irreps = match spec {
        CatalogSpec::Inline(v) => v.clone(),
        CatalogSpec::File(f) => {
            let path = base.join(f);
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::InvalidParameter(format!("cannot read catalog {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| Error::InvalidParameter(format!("catalog {}: {e}", path.display())))?
        }
    };
    let parsed = irreps
        .into_iter()
        .map(|i| {
            let mats = i.matrices.iter().map(|m| rows_to_matrix(m)).collect::<Result<Vec<_>>>()?;
            Ok((i.label, mats))
        })
        .collect::<Result<Vec<_>>>()?;
    IrrepCatalog::new(multiplier, parsed)
}

fn build_rep(spec: Option<&RepSpec>, multiplier: &Multiplier, catalog: Option<&IrrepCatalog>) -> Result<UnitaryRep> {
    match spec {
        None | Some(RepSpec::Named(NamedRep::LeftRegular)) => left_regular(multiplier),
        Some(RepSpec::Named(NamedRep::RightRegular)) => right_regular(multiplier),
        Some(RepSpec::Irrep { irrep }) => {
            let cat = catalog.ok_or_else(|| Error::Unsupported(format!("irrep {irrep:?} requested without a catalog")))?;
            cat.irreps()
                .iter()
                .find(|i| &i.label == irrep)
                .map(|i| i.rep.clone())
                .ok_or_else(|| Error::InvalidParameter(format!("no irrep labelled {irrep:?} in the catalog")))
        }
        Some(RepSpec::Matrices { matrices }) => {
            let mats = matrices.iter().map(|m| rows_to_matrix(m)).collect::<Result<Vec<_>>>()?;
            UnitaryRep::new(multiplier, mats)
        }
    }
}

impl Job {
    /// `base` resolves relative catalog paths.
    pub fn build(spec: JobSpec, base: &Path) -> Result<Self> {
        let group = build_group(&spec.group)?;
        let multiplier = build_multiplier(spec.multiplier.as_ref(), &group)?;
        let mut notes = Vec::new();
        let catalog = match &spec.catalog {
            Some(c) => Some(load_catalog(c, base, &multiplier)?),
            None => match builtin_irreps(&multiplier) {
                Ok(c) => Some(c),
                Err(Error::Unsupported(why)) => {
                    notes.push(format!("no irrep catalog: {why}; only spectral results are available"));
                    None
                }
                Err(e) => return Err(e),
            },
        };
        let source = if let Some(seed) = &spec.seed {
            let rep = build_rep(spec.rep.as_ref(), &multiplier, catalog.as_ref())?;
            Some(Source::Ensemble(Ensemble::new(rep, vec_to_vector(seed))?))
        } else if let Some(c) = &spec.gram_coefficients {
            Some(Source::Gram(gram_from_coefficients(c, &multiplier)?))
        } else {
            None
        };
        Ok(Self {
            spec,
            group,
            multiplier,
            catalog,
            source,
            notes,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let spec = JobSpec::read(path)?;
        let base: PathBuf = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::build(spec, &base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_specs_parse() {
        let s = JobSpec::from_json(r#"{"group": {"builtin": "cyclic", "n": 2}, "gram_coefficients": [[1,0],[0.5,0]]}"#)
            .unwrap();
        assert_eq!(s.schema_version, 1);
        let job = Job::build(s, Path::new(".")).unwrap();
        assert!(matches!(job.source, Some(Source::Gram(_))));
        let s = JobSpec::from_json(
            r#"{"group": {"builtin": "klein_four"}, "multiplier": {"builtin": "pauli"},
                "seed": [[1,0],[0,0]], "rep": {"irrep": "pauli"}}"#,
        )
        .unwrap();
        let job = Job::build(s, Path::new(".")).unwrap();
        assert!(matches!(job.source, Some(Source::Ensemble(_))));
    }

    #[test]
    fn rejects_bad_specs() {
        for bad in [
            r#"{"group": {"builtin": "cyclic"}, "gram_coefficients": [[1,0]], "seed": [[1,0]]}"#,
            r#"{"group": {"builtin": "cyclic", "n": 2}, "tolerances": {"oracle": -1}}"#,
            r#"{"group": {"builtin": "cyclic", "n": 2}, "unknown": 1}"#,
            r#"{"group": {"builtin": "cyclic", "n": 2}, "schema_version": 7}"#,
            r#"{"group": {"builtin": "cyclic", "n": 2}, "rep": "left_regular"}"#,
            r#"not json"#,
        ] {
            assert!(JobSpec::from_json(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn table_group_without_catalog_notes_it() {
        let s = JobSpec::from_json(r#"{"group": {"table": [[0,1],[1,0]]}, "gram_coefficients": [[1,0],[0.2,0]]}"#)
            .unwrap();
        let job = Job::build(s, Path::new(".")).unwrap();
        assert!(job.catalog.is_none());
        assert_eq!(job.notes.len(), 1);
    }

    #[test]
    fn round_trip() {
        let text = r#"{"group":{"builtin":"dihedral","n":3},"gram_coefficients":[[1.0,0.0],[0.1,0.0],[0.1,0.0],[0.2,0.0],[0.2,0.0],[0.2,0.0]],"mode":"unambiguous"}"#;
        let s = JobSpec::from_json(text).unwrap();
        let back = JobSpec::from_json(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(s, back);
    }
}
