//! Command-line front end for `minreg`.
//!
//! Every subcommand reads a JSON config with the two minimizers, their
//! strong-convexity constants and the gradient bound, and prints JSON to
//! stdout. `trace` additionally writes CSV (and optionally SVG) files.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use minreg::region::DEFAULT_TOL;
use minreg::{ProblemInstance, SegmentTag};
use serde::{Deserialize, Serialize};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

const DEFAULT_SAMPLES: usize = 256;
const DEFAULT_TRIALS: usize = 1000;

/// Instance description read from `-c cfg.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub x1_star: Vec<f64>,
    pub x2_star: Vec<f64>,
    pub sigma1: f64,
    pub sigma2: f64,
    #[serde(rename = "L")]
    pub grad_bound: f64,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub trials: Option<usize>,
    #[serde(default)]
    pub samples: Option<usize>,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::Input(format!("config field `{path}`: {}", e.into_inner()))
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn instance(&self) -> Result<ProblemInstance, CliError> {
        if self.x1_star.len() != self.x2_star.len() {
            return Err(CliError::Input(format!(
                "config field `x2_star`: length {} differs from x1_star length {}",
                self.x2_star.len(),
                self.x1_star.len()
            )));
        }
        ProblemInstance::new(
            self.x1_star.clone(),
            self.x2_star.clone(),
            self.sigma1,
            self.sigma2,
            self.grad_bound,
        )
        .map_err(input)
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or point: exit 2.
    Input(String),
    /// Verification found counterexamples: exit 1. Carries the report.
    Violation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Violation(_) => EXIT_VIOLATION,
        }
    }
}

fn input(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "minreg",
    version,
    about = "Region of possible minimizers of a sum of two strongly convex functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Regime and its constants.
    Regime {
        #[arg(short, long)]
        config: PathBuf,
    },
    /// Interior / boundary / exterior classification of a point.
    Classify {
        #[arg(short, long)]
        config: PathBuf,
        /// Comma-separated coordinates.
        #[arg(short, long, allow_hyphen_values = true)]
        point: String,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Trace the boundary of a planar instance to CSV (and SVG).
    Trace {
        #[arg(short, long)]
        config: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Quadratic pair whose sum is minimized at the point.
    Witness {
        #[arg(short, long)]
        config: PathBuf,
        #[arg(short, long, allow_hyphen_values = true)]
        point: String,
        /// Number of distinct pairs.
        #[arg(short)]
        k: Option<usize>,
    },
    /// Weighted aggregate of the minimizers and the smallest workable bound.
    Fedpoint {
        #[arg(short, long)]
        config: PathBuf,
    },
    /// Monte-Carlo check of the region.
    Verify {
        #[arg(short, long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Eigenvalue spread of sampled quadratics (soundness only).
        #[arg(long, default_value_t = 1.0)]
        spread: f64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Sound,
    Complete,
}

pub fn parse_point(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| CliError::Input(format!("point `{s}`: `{}`: {e}", t.trim())))
        })
        .collect()
}

#[derive(Serialize)]
struct TraceSummary<'a> {
    csv: &'a Path,
    svg: Option<&'a Path>,
    samples: usize,
    segments: Vec<SegmentSummary>,
}

#[derive(Serialize)]
struct SegmentSummary {
    tag: SegmentTag,
    closed: bool,
    points: usize,
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable output")
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<(), CliError> {
    let text = match cmd {
        Command::Regime { config } => {
            let inst = Config::load(&config)?.instance()?;
            to_json(&minreg::regime(&inst))
        }
        Command::Classify { config, point, tol } => {
            let cfg = Config::load(&config)?;
            let inst = cfg.instance()?;
            let x = parse_point(&point)?;
            let tol = tol.or(cfg.tol).unwrap_or(DEFAULT_TOL);
            to_json(&minreg::classify(&inst, &x, tol).map_err(input)?)
        }
        Command::Trace {
            config,
            output,
            svg,
            samples,
        } => {
            let cfg = Config::load(&config)?;
            let inst = cfg.instance()?;
            let samples = samples.or(cfg.samples).unwrap_or(DEFAULT_SAMPLES);
            let tr = minreg::trace_boundary(&inst, samples).map_err(input)?;
            let file = fs::File::create(&output).map_err(|e| CliError::Input(format!("{}: {e}", output.display())))?;
            tr.write_csv(file).map_err(input)?;
            if let Some(path) = &svg {
                fs::write(path, tr.to_svg()).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            }
            to_json(&TraceSummary {
                csv: &output,
                svg: svg.as_deref(),
                samples,
                segments: tr
                    .segments
                    .iter()
                    .map(|s| SegmentSummary {
                        tag: s.tag,
                        closed: s.closed,
                        points: s.points().count(),
                    })
                    .collect(),
            })
        }
        Command::Witness { config, point, k } => {
            let inst = Config::load(&config)?.instance()?;
            let x = parse_point(&point)?;
            match k {
                None => to_json(&minreg::witness_pair(&inst, &x).map_err(input)?),
                Some(k) => to_json(&minreg::witness_family(&inst, &x, k).map_err(input)?),
            }
        }
        Command::Fedpoint { config } => {
            let inst = Config::load(&config)?.instance()?;
            to_json(&minreg::fed_point(&inst))
        }
        Command::Verify {
            config,
            mode,
            trials,
            seed,
            spread,
        } => {
            let cfg = Config::load(&config)?;
            let inst = cfg.instance()?;
            let trials = trials.or(cfg.trials).unwrap_or(DEFAULT_TRIALS);
            let seed = seed.or(cfg.seed).unwrap_or(0);
            let report = match mode {
                Mode::Sound => minreg::mc_soundness(&inst, trials, spread, seed),
                Mode::Complete => minreg::mc_completeness(&inst, trials, seed),
            }
            .map_err(input)?;
            let text = to_json(&report);
            if report.violations > 0 {
                return Err(CliError::Violation(text));
            }
            text
        }
    };
    writeln!(out, "{text}").map_err(input)
}

/// Parse `argv` (program name first) and run; returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(CliError::Violation(report)) => {
            let _ = writeln!(out, "{report}");
            let _ = writeln!(err, "error: verification found violations");
            EXIT_VIOLATION
        }
        Err(CliError::Input(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT
        }
    }
}
