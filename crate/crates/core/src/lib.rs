//! Optimal quantum state exclusion for pure-state ensembles generated by
//! finite groups.
//!
//! The pipeline is: a [`group::GroupTable`] with a [`multiplier::Multiplier`],
//! a [`rep::UnitaryRep`] and seed (or Gram coefficients) forming a
//! [`gram::Ensemble`], then the spectral formulas, optimal POVMs and dual
//! certificates in [`exclusion`].

pub mod cli;
pub mod error;
pub mod exclusion;
pub mod gram;
pub mod group;
pub mod multiplier;
pub mod numerics;
pub mod rep;
pub mod serial;

pub use error::{Error, Result};
