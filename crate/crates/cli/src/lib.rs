//! Command-line front end for the `nonlocal` crate.
//!
//! [`run`] executes a parsed [`Cli`] and returns what should be written and
//! the process exit code, so commands can be tested without a subprocess.

mod audit;
mod census;
mod commands;
pub mod report;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::Value;

pub use audit::{bell_anomaly, ghz_audit, hardy_scan};
pub use census::{census_222, census_symmetric};
pub use commands::{analyze, check_ns, chen, classify, collapse, generate, load_model};

/// Exit code for success.
pub const EXIT_OK: i32 = 0;
/// Exit code for parse, validation and argument errors.
pub const EXIT_VALIDATION: i32 = 2;
/// Exit code when a census or audit assertion fails.
pub const EXIT_ASSERTION: i32 = 3;

#[derive(Parser, Debug, Clone)]
#[command(name = "nonlocal", version, about = "Locality and Hardy-paradox analysis of Bell-scenario models")]
pub struct Cli {
    /// Collapse threshold: a probability is possible iff it exceeds this.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub epsilon: f64,
    /// Seed for randomized searches.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Print reports as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Write the output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Write a model file.
    #[command(subcommand)]
    Generate(Generate),
    /// Full report: no-signalling, level, witnesses, certainty.
    Analyze { path: PathBuf },
    /// Hierarchy level with non-extendable entries and witnesses.
    Classify { path: PathBuf },
    /// Write the support of a model as a possibility file.
    Collapse { path: PathBuf },
    /// Possibilistic and probabilistic no-signalling checks.
    CheckNs { path: PathBuf },
    /// Exhaustive census of (2,2,2) supports.
    #[command(name = "census-222")]
    Census222,
    /// Census of (2,2,2) supports with the Bell-state outcome symmetry.
    CensusSymmetric,
    /// Random and adversarial search for Hardy paradoxes in Bell-state models.
    BellAnomaly {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 200)]
        restarts: usize,
    },
    /// GHZ state audit: counting rule, witnesses and certainty.
    GhzAudit {
        #[arg(long)]
        n: usize,
    },
    /// Paradoxical probability across the Hardy family.
    HardyScan {
        #[arg(long, default_value_t = 1000)]
        steps: usize,
    },
    /// Detect a Chen pattern under relabelling.
    Chen { path: PathBuf },
}

#[derive(Subcommand, Debug, Clone)]
pub enum Generate {
    /// The PR box, exact.
    PrBox,
    /// Born model of GHZ(n) with X and Y measurements.
    Ghz {
        #[arg(long)]
        n: usize,
    },
    /// Hardy family member at parameter t (radians).
    HardyFamily {
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
    },
    /// Bell-state model; theta,phi pairs for Alice's measurements then Bob's.
    Bell {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        angles: Vec<f64>,
    },
    /// Chen-pattern support with l outcomes.
    Chen {
        #[arg(long)]
        l: usize,
        /// Star cells as `i:j,...` (zero-based, i < j), or `all`.
        #[arg(long, default_value = "")]
        stars: String,
    },
    /// Any named catalog model.
    Catalog { name: String },
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub body: Body,
    pub exit_code: i32,
    /// Names of failed assertions, reported on stderr.
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    /// A model file, written verbatim.
    Model(String),
    /// A report, rendered as JSON or text.
    Report(Value),
}

impl Output {
    pub fn model(text: String) -> Self {
        Output {
            body: Body::Model(text),
            exit_code: EXIT_OK,
            failures: Vec::new(),
        }
    }

    pub fn report(report: Value) -> Self {
        Output {
            body: Body::Report(report),
            exit_code: EXIT_OK,
            failures: Vec::new(),
        }
    }

    /// A report whose assertions may have failed.
    pub fn checked(report: Value, failures: Vec<String>) -> Self {
        Output {
            body: Body::Report(report),
            exit_code: if failures.is_empty() { EXIT_OK } else { EXIT_ASSERTION },
            failures,
        }
    }

    pub fn render(&self, json: bool) -> String {
        match &self.body {
            Body::Model(text) => text.clone(),
            Body::Report(r) if json => {
                let mut s = serde_json::to_string_pretty(r).expect("serialisable");
                s.push('\n');
                s
            }
            Body::Report(r) => report::render_text(r),
        }
    }
}

/// Resolves `path`, trying a `.json` suffix when the bare path is missing.
pub fn resolve(path: &Path) -> PathBuf {
    if !path.exists() {
        let with_ext = path.with_extension("json");
        if with_ext.exists() {
            return with_ext;
        }
    }
    path.to_path_buf()
}

pub fn run(cli: &Cli) -> nonlocal::Result<Output> {
    let eps = cli.epsilon;
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(validation("epsilon", "must be finite and non-negative"));
    }
    match &cli.command {
        Command::Generate(g) => generate(g).map(Output::model),
        Command::Analyze { path } => analyze(&load_model(path)?, eps).map(Output::report),
        Command::Classify { path } => classify(&load_model(path)?, eps).map(Output::report),
        Command::Collapse { path } => Ok(Output::model(collapse(&load_model(path)?, eps))),
        Command::CheckNs { path } => Ok(Output::report(check_ns(&load_model(path)?, eps))),
        Command::Census222 => Ok(census_222()),
        Command::CensusSymmetric => Ok(census_symmetric()),
        Command::BellAnomaly { samples, restarts } => bell_anomaly(*samples, *restarts, cli.seed, eps),
        Command::GhzAudit { n } => ghz_audit(*n, eps),
        Command::HardyScan { steps } => hardy_scan(*steps),
        Command::Chen { path } => chen(&load_model(path)?, eps).map(Output::report),
    }
}

pub(crate) fn validation(field: &str, message: impl Into<String>) -> nonlocal::Error {
    nonlocal::Error::Validation {
        field: field.to_string(),
        message: message.into(),
    }
}
