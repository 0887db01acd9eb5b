//! Growth sweeps, exponent fits and the verification suite.

pub mod fit;
pub mod functionals;
pub mod sweep;
pub mod verify;

pub use fit::{fit_exponent, fit_power_law, FitResult};
pub use functionals::{evaluate_levels, evaluate_single, hardy_levels, lp_levels, Exponents, Functional, LevelSource};
pub use sweep::{
    csv_string, growth_sweep, growth_sweep_with_jobs, overlap_bound, sweep_point, write_csv, GridMeta, Outcome,
    SweepRecord, SweepSpec, CSV_HEADER,
};
pub use verify::{corpus, run_verify_suite, CheckResult, Suite, VerifyReport, DEFAULT_SEED};
