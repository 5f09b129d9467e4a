//! The `spectralfield` command line.
//!
//! Every command prints one JSON report. Exit codes: 0 success, 1 input
//! error, 2 crossing or violated hypothesis, 3 inconclusive.

mod commands;
pub mod json;
pub mod spec;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

/// Comma-separated decimals.
#[derive(Debug, Clone, PartialEq)]
pub struct Csv(pub Vec<f64>);

fn parse_csv(s: &str) -> Result<Csv, String> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            let v: f64 = t.parse().map_err(|_| format!("not a number: {t:?}"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("not finite: {t:?}"))
            }
        })
        .collect::<Result<_, _>>()
        .map(Csv)
}

/// Comma-separated non-negative integers.
#[derive(Debug, Clone, PartialEq)]
pub struct Counts(pub Vec<usize>);

fn parse_counts(s: &str) -> Result<Counts, String> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse().map_err(|_| format!("not a count: {t:?}"))
        })
        .collect::<Result<_, _>>()
        .map(Counts)
}

#[derive(Debug, Parser)]
#[command(
    name = "spectralfield",
    version,
    about = "Derivatives of eigenvalues and eigenprojections of polynomial symmetric matrix fields"
)]
pub struct Cli {
    /// Relative gap below which eigenvalues are treated as equal.
    #[arg(long, global = true, env = "SPECTRALFIELD_GAP_TOL")]
    pub gap_tol: Option<f64>,

    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct FieldArgs {
    /// Built-in field: cubic or quartic.
    #[arg(long, conflicts_with = "spec")]
    pub builtin: Option<String>,

    /// JSON field specification file.
    #[arg(long)]
    pub spec: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Value, spectral decomposition and index functions at a point.
    Eval {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, value_parser = parse_csv, allow_hyphen_values = true)]
        point: Csv,
    },
    /// Derivatives of the j-th eigenvalue and its eigenprojection.
    Derive {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, value_parser = parse_csv, allow_hyphen_values = true)]
        point: Csv,
        /// Repeated eigenvalue index, 1-based.
        #[arg(long)]
        j: usize,
        #[arg(long)]
        grad: bool,
        #[arg(long)]
        hess: bool,
        /// Projection derivative along --e, or Jacobian derivative against --q.
        #[arg(long)]
        dproj: bool,
        /// Second directional derivative along --a then --b.
        #[arg(long)]
        second: bool,
        #[arg(long, value_parser = parse_csv, allow_hyphen_values = true)]
        e: Option<Csv>,
        #[arg(long, value_parser = parse_csv, allow_hyphen_values = true)]
        q: Option<Csv>,
        #[arg(long, value_parser = parse_csv, allow_hyphen_values = true)]
        a: Option<Csv>,
        #[arg(long, value_parser = parse_csv, allow_hyphen_values = true)]
        b: Option<Csv>,
        /// Compare against finite differences.
        #[arg(long)]
        validate: bool,
        /// Report both gradient and Hessian forms even when they disagree.
        #[arg(long)]
        force: bool,
    },
    /// Second-order expansion of the j-th eigenvalue.
    Expand {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, value_parser = parse_csv, allow_hyphen_values = true)]
        point: Csv,
        #[arg(long)]
        j: usize,
        /// Displacement, or direction when --steps is given.
        #[arg(long, value_parser = parse_csv, allow_hyphen_values = true)]
        e: Option<Csv>,
        /// Decreasing step sizes for the residual order fit.
        #[arg(long, value_parser = parse_csv)]
        steps: Option<Csv>,
    },
    /// Constant-dimension and continuity evidence on a grid over a box.
    Scan {
        #[command(flatten)]
        field: FieldArgs,
        /// lo1,hi1,lo2,hi2,...
        #[arg(long = "box", value_parser = parse_csv, allow_hyphen_values = true)]
        region: Csv,
        /// Samples per axis; one value applies to every axis.
        #[arg(long, value_parser = parse_counts, default_value = "21")]
        grid: Counts,
        #[arg(long, default_value_t = 1)]
        j: usize,
    },
    /// Sum of the k smallest eigenvalues and its minimizing projection.
    Kyfan {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, value_parser = parse_csv, allow_hyphen_values = true)]
        point: Option<Csv>,
        /// Row-major symmetric matrix instead of a field.
        #[arg(long, value_parser = parse_csv, allow_hyphen_values = true)]
        matrix: Option<Csv>,
        #[arg(long)]
        k: usize,
        /// Random projections for the brute-force comparison.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Eval { .. } => "eval",
            Command::Derive { .. } => "derive",
            Command::Expand { .. } => "expand",
            Command::Scan { .. } => "scan",
            Command::Kyfan { .. } => "kyfan",
        }
    }
}

/// A finished command: report body and exit code.
pub struct Outcome {
    pub inputs: Value,
    pub outputs: Value,
    pub hypotheses_unverified: bool,
    pub exit: i32,
}

pub enum CliError {
    /// Bad input; message only, no report.
    Input(String),
    /// The computation refused on mathematical grounds; reported with a witness.
    Refused {
        error: Error,
        witness: Option<Vec<f64>>,
        inputs: Value,
    },
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Input(e.to_string())
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::DimensionMismatch { .. } => "dimension_mismatch",
        Error::AxisOutOfRange { .. } => "axis_out_of_range",
        Error::IndexOutOfRange { .. } => "index_out_of_range",
        Error::CountOutOfRange { .. } => "count_out_of_range",
        Error::NonFinite(_) => "non_finite",
        Error::AsymmetricField { .. } => "asymmetric_field",
        Error::AsymmetricMatrix { .. } => "asymmetric_matrix",
        Error::DegenerateGap { .. } => "degenerate_gap",
        Error::InconsistentDerivative { .. } => "inconsistent_derivative",
        Error::UnstableTracking { .. } => "unstable_tracking",
        Error::InvalidRegion(_) => "invalid_region",
        Error::InvalidArgument(_) => "invalid_argument",
    }
}

/// Exit code for a core error: crossings are violations, tracking failures
/// are inconclusive, everything else is bad input.
pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::InconsistentDerivative { .. } | Error::DegenerateGap { .. } => EXIT_VIOLATION,
        Error::UnstableTracking { .. } => EXIT_INCONCLUSIVE,
        _ => EXIT_INPUT,
    }
}

/// Parses `args` (program name first), runs the command and writes the
/// report. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INPUT,
            };
        }
    };
    let echo: Vec<String> = argv
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();

    let (report, exit) = match commands::execute(&cli) {
        Ok(o) => (
            json!({
                "command": cli.command.name(),
                "argv": echo,
                "inputs": o.inputs,
                "outputs": o.outputs,
                "error": null,
                "hypotheses_unverified": o.hypotheses_unverified,
                "exit_code": o.exit,
            }),
            o.exit,
        ),
        Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            return EXIT_INPUT;
        }
        Err(CliError::Refused {
            error,
            witness,
            inputs,
        }) => {
            let code = exit_code_for(&error);
            if code == EXIT_INPUT {
                eprintln!("error: {error}");
                return EXIT_INPUT;
            }
            eprintln!("{}: {error}", cli.command.name());
            (
                json!({
                    "command": cli.command.name(),
                    "argv": echo,
                    "inputs": inputs,
                    "outputs": null,
                    "error": {
                        "kind": error_kind(&error),
                        "message": error.to_string(),
                        "witness": witness,
                    },
                    "hypotheses_unverified": true,
                    "exit_code": code,
                }),
                code,
            )
        }
    };

    let text = json::to_string(&report);
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_INPUT;
            }
        }
        None => print!("{text}"),
    }
    exit
}
