//! Command-line driver: one spec file in, one JSON report out.
//!
//! Exit codes: 0 ok, 1 internal error, 2 bad spec, arguments or output path, 3 invalid Gram
//! matrix, 4 unsupported, 5 certificate failure, 6 oracle disagreement.

pub mod report;
pub mod spec;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{debug, info, warn};

use crate::error::Error;
use crate::exclusion::certificate::{evaluate_min_error, evaluate_unambiguous, DualCertificate, DEFAULT_EPSILON};
use crate::exclusion::oracle::{oracle_phase_search, oracle_povm_sampler};
use crate::exclusion::povm::{build, support_projector};
use crate::exclusion::{analyze_ensemble, analyze_gram, Analysis, Mode};
use crate::gram::{associated_ensemble, canonical_pattern, Ensemble};
use crate::multiplier::normalize_multiplier;

use report::{
    AnalysisPayload, BlockSummary, CanonicalPayload, GroupSummary, OperatorSpace, OraclePayload, PovmPayload, Report,
    REPORT_SCHEMA,
};
use spec::{Job, Source, SpecMode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_SCHEMA: i32 = 2;
pub const EXIT_INVALID_GRAM: i32 = 3;
pub const EXIT_UNSUPPORTED: i32 = 4;
pub const EXIT_CERTIFICATE: i32 = 5;
pub const EXIT_ORACLE: i32 = 6;

pub const DEFAULT_ORACLE_SEED: u64 = 20_240_601;
pub const DEFAULT_ORACLE_TOL: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "qse", version, about = "Optimal state exclusion for group-covariant pure-state ensembles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gram spectrum, optimal probabilities and the perfect-exclusion verdict.
    Analyze(CommonArgs),
    /// The optimal covariant measurement.
    Povm(CommonArgs),
    /// Dual certificates for both optimal values.
    Certify(CommonArgs),
    /// Numerical oracles against the closed forms.
    Oracle(CommonArgs),
    /// The canonical Gram pattern of the group and multiplier.
    Canonical(CommonArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Analyze(_) => "analyze",
            Command::Povm(_) => "povm",
            Command::Certify(_) => "certify",
            Command::Oracle(_) => "oracle",
            Command::Canonical(_) => "canonical",
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            Command::Analyze(a)
            | Command::Povm(a)
            | Command::Certify(a)
            | Command::Oracle(a)
            | Command::Canonical(a) => a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    MinError,
    Unambiguous,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Job specification (JSON).
    pub spec: PathBuf,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// ε for the unambiguous certificate.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Random measurements drawn by the sampler oracle.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Random restarts of the phase-search oracle.
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    /// Seed for all oracle randomness.
    #[arg(long, default_value_t = DEFAULT_ORACLE_SEED)]
    pub seed: u64,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Allowed oracle disagreement.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Record wall-clock time in the report.
    #[arg(long)]
    pub timing: bool,
    /// Adds this amount to the first component of the optimal |ω⟩ before
    /// certifying. For testing the failure path.
    #[arg(long, hide = true)]
    pub corrupt_seed: Option<f64>,
}

/// A failure with its exit code and, when one was produced, the report.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
    pub report: Option<Box<Report>>,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter(_) | Error::InvalidGroup(_) | Error::InvalidMultiplier(_) | Error::Precondition(_) => {
            EXIT_SCHEMA
        }
        Error::InvalidGram(_) | Error::NotPsd { .. } => EXIT_INVALID_GRAM,
        Error::Unsupported(_) => EXIT_UNSUPPORTED,
        Error::CertificationFailed(_) => EXIT_CERTIFICATE,
        Error::NotHermitian { .. } | Error::Consistency(_) | Error::EmptySpectrum => EXIT_INTERNAL,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self {
            code: exit_code(&e),
            message: e.to_string(),
            report: None,
        }
    }
}

fn mode_of(args: &CommonArgs, job: &Job) -> Mode {
    match (args.mode, job.spec.mode) {
        (Some(ModeArg::Unambiguous), _) | (None, Some(SpecMode::Unambiguous)) => Mode::Unambiguous,
        _ => Mode::MinError,
    }
}

fn positive(name: &str, v: Option<f64>) -> Result<Option<f64>, Failure> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => {
            Err(Error::InvalidParameter(format!("--{name} must be positive, got {x}")).into())
        }
        _ => Ok(v),
    }
}

/// The analysis plus the ensemble the measurement acts on.
fn analyse(job: &Job) -> Result<(Analysis, Ensemble, OperatorSpace), Error> {
    match &job.source {
        Some(Source::Ensemble(e)) => Ok((analyze_ensemble(e, job.catalog.as_ref())?, e.clone(), OperatorSpace::Seed)),
        Some(Source::Gram(g)) => {
            let a = analyze_gram(g, job.catalog.as_ref())?;
            let e = match &a.schmidt {
                Some(s) => s.ensemble.clone(),
                None => associated_ensemble(g)?,
            };
            Ok((a, e, OperatorSpace::AssociatedEnsemble))
        }
        None => Err(Error::InvalidParameter(
            "the job spec has no ensemble: give seed (with rep) or gram_coefficients".into(),
        )),
    }
}

fn analysis_payload(a: &Analysis) -> AnalysisPayload {
    AnalysisPayload {
        gram_spectrum: a.lambdas().to_vec(),
        gram_coefficients: a.gram.coefficients().map(<[_]>::to_vec),
        schmidt_spectrum: a.schmidt.as_ref().map(|s| s.lambdas.clone()),
        blocks: a
            .schmidt
            .as_ref()
            .map(|s| {
                s.blocks
                    .iter()
                    .map(|b| BlockSummary {
                        label: b.label.clone(),
                        dim: b.dim,
                        multiplicity: b.multiplicity,
                        alphas: b.alphas.clone(),
                    })
                    .collect()
            })
            .unwrap_or_default(),
        p_min: a.probabilities.p_min,
        q_min: a.probabilities.q_min,
        perfect: a.probabilities.perfect,
        gap: a.probabilities.gap,
    }
}

/// Runs one command and returns the report. Certificate and oracle failures
/// still carry the report.
pub fn execute(command: &Command) -> Result<Report, Failure> {
    let args = command.args();
    let start = Instant::now();
    let tol = positive("tol", args.tol)?;
    let epsilon = positive("epsilon", args.epsilon)?;
    info!("{} {}", command.name(), args.spec.display());
    let job = Job::load(&args.spec)?;
    let tol = tol
        .or(job.spec.tolerances.and_then(|t| t.oracle))
        .unwrap_or(DEFAULT_ORACLE_TOL);
    let epsilon = epsilon
        .or(job.spec.tolerances.and_then(|t| t.epsilon))
        .unwrap_or(DEFAULT_EPSILON);
    let mut report = Report {
        schema: REPORT_SCHEMA.into(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
        command: command.name().into(),
        job: job.spec.clone(),
        group: GroupSummary::of(&job.group),
        analysis: None,
        povm: None,
        certificates: vec![],
        oracle: None,
        canonical: None,
        notes: job.notes.clone(),
        timing_ms: None,
    };
    let mut failure: Option<(i32, String)> = None;

    match command {
        Command::Canonical(_) => {
            let m = if job.multiplier.is_normalized() {
                job.multiplier.clone()
            } else {
                report.notes.push("multiplier normalized before building the pattern".into());
                normalize_multiplier(&job.multiplier)
            };
            let p = canonical_pattern(&m)?;
            report.canonical = Some(CanonicalPayload {
                rows: p.text_rows(),
                constraints: p.constraint_lines(),
                text: p.render(),
            });
            if job.source.is_some() {
                report.analysis = Some(analysis_payload(&analyse(&job)?.0));
            }
        }
        Command::Analyze(_) => {
            let (a, _, _) = analyse(&job)?;
            report.analysis = Some(analysis_payload(&a));
        }
        Command::Povm(_) => {
            let (a, _, space) = analyse(&job)?;
            report.analysis = Some(analysis_payload(&a));
            let data = a.schmidt()?;
            let sol = build(data, mode_of(args, &job))?;
            report.povm = Some(PovmPayload::new(&sol, space, &support_projector(data)));
        }
        Command::Certify(_) => {
            let (a, _, _) = analyse(&job)?;
            report.analysis = Some(analysis_payload(&a));
            let data = a.schmidt()?;
            for mode in [Mode::MinError, Mode::Unambiguous] {
                let mut sol = build(data, mode)?;
                if let Some(delta) = args.corrupt_seed {
                    warn!("corrupting the optimal seed by {delta}");
                    let mut w = sol.seed_omega.clone();
                    if !w.is_empty() {
                        w[0] += crate::numerics::c64(delta, 0.0);
                    }
                    sol = sol.with_seed(data, w);
                }
                let cert = match mode {
                    Mode::MinError => DualCertificate::MinError(evaluate_min_error(&sol, data)),
                    Mode::Unambiguous if sol.perfect() => {
                        report
                            .notes
                            .push("perfect exclusion: Q = 0 is attained and needs no unambiguous certificate".into());
                        continue;
                    }
                    Mode::Unambiguous => DualCertificate::Unambiguous(evaluate_unambiguous(&sol, data, epsilon)?),
                };
                if let DualCertificate::MinError(c) = &cert {
                    if let Some(n) = &c.note {
                        report.notes.push(n.clone());
                    }
                }
                if !cert.passed() && failure.is_none() {
                    failure = Some((EXIT_CERTIFICATE, format!("certificate failed: {}", cert.failures().join("; "))));
                }
                report.certificates.push(cert);
            }
        }
        Command::Oracle(_) => {
            let (a, ensemble, _) = analyse(&job)?;
            report.analysis = Some(analysis_payload(&a));
            let p = a.probabilities.p_min;
            let ps = oracle_phase_search(a.lambdas(), a.gram.order(), args.restarts.max(1), args.seed)?;
            let phase_delta = (ps.best_value - p).abs();
            let sol = match &a.schmidt {
                Some(data) => Some(build(data, Mode::MinError)?),
                None => {
                    report
                        .notes
                        .push("no catalog: the sampler runs without perturbations of the optimum".into());
                    None
                }
            };
            let sampler = if args.samples > 0 {
                Some(oracle_povm_sampler(
                    &ensemble,
                    p,
                    sol.as_ref().map(|s| s.povm.as_slice()),
                    args.samples,
                    args.seed,
                )?)
            } else {
                None
            };
            let constructed = sol.as_ref().map(|s| s.diagnostics.achieved_error);
            let constructed_delta = constructed.map(|c| (c - p).abs());
            let agreement = phase_delta <= tol
                && sampler.as_ref().is_none_or(|s| s.passed())
                && constructed_delta.is_none_or(|d| d <= tol);
            debug!("phase search delta {phase_delta:e}, sampler {sampler:?}");
            if !agreement {
                failure = Some((EXIT_ORACLE, "oracles disagree with the closed forms".into()));
            }
            report.oracle = Some(OraclePayload {
                seed: args.seed,
                tolerance: tol,
                phase_search: ps,
                phase_search_delta: phase_delta,
                sampler,
                constructed_error: constructed,
                constructed_delta,
                agreement,
            });
        }
    }

    if args.timing {
        report.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    match failure {
        None => Ok(report),
        Some((code, message)) => Err(Failure {
            code,
            message,
            report: Some(Box::new(report)),
        }),
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn emit(report: &Report, out: Option<&Path>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(report).map_err(|e| Failure {
        code: EXIT_INTERNAL,
        message: format!("cannot serialize report: {e}"),
        report: None,
    })? + "\n";
    match out {
        Some(p) => write_atomic(p, &text).map_err(|e| Failure {
            code: EXIT_SCHEMA,
            message: format!("cannot write {}: {e}", p.display()),
            report: None,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Parses the process arguments, runs, writes the report and returns the
/// exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter("QSE_LOG")).try_init();
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_SCHEMA } else { EXIT_OK };
        }
    };
    let args = cli.command.args().clone();
    let result = execute(&cli.command);
    let (report, code, message) = match result {
        Ok(r) => (Some(r), EXIT_OK, None),
        Err(f) => (f.report.map(|b| *b), f.code, Some(f.message)),
    };
    let out = args.out.clone().or_else(|| {
        report
            .as_ref()
            .and_then(|r| r.job.output.as_ref())
            .map(|o| args.spec.parent().unwrap_or(Path::new("")).join(o))
    });
    if let Some(r) = &report {
        if let Err(f) = emit(r, out.as_deref()) {
            eprintln!("error: {}", f.message);
            return f.code;
        }
    }
    if let Some(m) = message {
        eprintln!("error: {m}");
    }
    code
}
