//! `shiftlab` command-line front end.

mod commands;
mod files;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use shiftlab::experiments::DEFAULT_SEED;
use shiftlab::families::FamilyId;
use shiftlab::norms::NormVariant;
use shiftlab::Exponent;

/// Exit code for a failed mathematical verification.
pub const EXIT_VERIFY: u8 = 2;
/// Exit code for usage and domain errors.
pub const EXIT_DOMAIN: u8 = 1;

#[derive(Debug, Parser, Serialize)]
#[command(name = "shiftlab", version, about = "Shifted maximal functions and growth experiments on a periodic grid")]
pub struct Cli {
    /// Directory for outputs whose path is not given explicitly.
    #[arg(long, global = true, env = "SHIFTLAB_OUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,
    /// Seed for the stochastic checks.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Build an extremal family and write it as SHL1 records with a JSON sidecar.
    Gen(GenArgs),
    /// Apply an operator to every record of a file.
    Apply(ApplyArgs),
    /// Evaluate a mixed norm of the records of a file.
    Norm(NormArgs),
    /// Run a y-sweep from a JSON config.
    Sweep(SweepArgs),
    /// Calderón-Zygmund decomposition of a double family.
    Cz(CzArgs),
    /// Estimate the kernel smoothness constant for a list of shifts.
    Ay(AyArgs),
    /// Run the invariant and oracle suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum FamilyArg {
    A,
    B,
    Psi,
    SparseModulated,
    SparseShifted,
}

impl From<FamilyArg> for FamilyId {
    fn from(f: FamilyArg) -> FamilyId {
        match f {
            FamilyArg::A => FamilyId::A,
            FamilyArg::B => FamilyId::B,
            FamilyArg::Psi => FamilyId::PsiSingle,
            FamilyArg::SparseModulated => FamilyId::SparseModulated,
            FamilyArg::SparseShifted => FamilyId::SparseShifted,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct GenArgs {
    #[arg(long, value_enum, ignore_case = true)]
    pub family: FamilyArg,
    /// Shift exponent: `y = e^K`.
    #[arg(long = "K", conflicts_with = "y")]
    pub k: Option<f64>,
    /// Shift `y` given directly.
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<f64>,
    #[arg(long, default_value_t = 1.0 / 16.0)]
    pub halfwidth: f64,
    #[arg(long, default_value_t = 0.25)]
    pub radius: f64,
    #[arg(long, default_value_t = shiftlab::families::DEFAULT_SPACING)]
    pub spacing: u32,
    /// Torus length; requires `--samples`.
    #[arg(long, requires = "samples")]
    pub length: Option<f64>,
    #[arg(long, requires = "length")]
    pub samples: Option<u64>,
    #[arg(long, default_value_t = shiftlab::families::DEFAULT_MAX_LOG_SAMPLES)]
    pub max_log_samples: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Operator {
    Identity,
    Peetre,
    DyadicAverage,
    DyadicMaximal,
    WindowedMaximal,
    SharpMaximal,
    LowPass,
    Annulus,
    AnnulusTilde,
    Translate,
    Modulate,
}

#[derive(Debug, Args, Serialize)]
pub struct ApplyArgs {
    #[arg(long)]
    pub op: Operator,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    pub sigma: f64,
    #[arg(long, default_value = "1")]
    pub t: Exponent,
    /// Level for every record; defaults to the sidecar levels.
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<i32>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub y: f64,
    /// Translation distance or modulation frequency.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub amount: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantArg {
    Strong,
    WeakL1,
    Carleson,
}

impl From<VariantArg> for NormVariant {
    fn from(v: VariantArg) -> NormVariant {
        match v {
            VariantArg::Strong => NormVariant::Strong,
            VariantArg::WeakL1 => NormVariant::WeakL1,
            VariantArg::Carleson => NormVariant::Carleson,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct NormArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub p: Exponent,
    #[arg(long)]
    pub q: Exponent,
    #[arg(long, value_enum, default_value = "strong")]
    pub variant: VariantArg,
    /// Level of the first record; defaults to the sidecar.
    #[arg(long, allow_hyphen_values = true)]
    pub k_min: Option<i32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Sweep points evaluated concurrently.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct CzArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    pub q: f64,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    /// Members per row: records are read with `j` varying fastest.
    #[arg(long, default_value_t = 1)]
    pub j_count: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct AyArgs {
    #[arg(long, default_value_t = 2.0)]
    pub sigma: f64,
    /// Shift exponents, `y = e^K`.
    #[arg(long = "K", value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub k_list: Vec<f64>,
    /// Number of `|w|` magnitudes (each used with both signs).
    #[arg(long, default_value_t = 64)]
    pub w_count: usize,
    /// Extra levels on each side of the middle regime.
    #[arg(long, default_value_t = 8)]
    pub margin: i32,
    /// Grid whose spacing and length bound the `w` samples.
    #[arg(long, default_value_t = 8.0)]
    pub length: f64,
    #[arg(long, default_value_t = 256)]
    pub samples: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    /// `exact-identities`, `oracles`, `fit`, `families`, `cz` or `all`.
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Outcome of a subcommand that ran to completion.
pub enum Finished {
    Ok,
    VerificationFailed(String),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_DOMAIN } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::dispatch(&cli) {
        Ok(Finished::Ok) => ExitCode::SUCCESS,
        Ok(Finished::VerificationFailed(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(EXIT_VERIFY)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_DOMAIN)
        }
    }
}
