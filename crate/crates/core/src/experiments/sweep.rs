//! y-sweeps: build a family per `K`, evaluate two functionals, record the ratio.

use std::io::Write;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::functionals::{evaluate_levels, evaluate_single, Exponents, Functional};
use crate::error::{Error, Result};
use crate::eta::EtaParams;
use crate::exponent::Exponent;
use crate::families::{FamilyBuilder, FamilyId, FamilySpec, GridPolicy, DEFAULT_SPACING};

fn default_spacing() -> u32 {
    DEFAULT_SPACING
}

/// Configuration of one sweep; the JSON config mirrors it field for field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub family: FamilyId,
    pub p: Exponent,
    pub q: Exponent,
    pub t: Exponent,
    pub sigma: f64,
    /// Sweep points; `y = e^K`.
    pub k_list: Vec<i32>,
    pub lhs: Functional,
    pub rhs: Functional,
    #[serde(default)]
    pub eta: EtaParams,
    #[serde(default = "default_spacing")]
    pub spacing: u32,
    #[serde(default)]
    pub grid: GridPolicy,
    /// Record wall times in the `seconds` column. Off by default so that
    /// reruns produce identical CSV bytes.
    #[serde(default)]
    pub timings: bool,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl SweepSpec {
    pub fn exponents(&self) -> Exponents {
        Exponents { p: self.p.value(), q: self.q.value(), t: self.t.value(), sigma: self.sigma }
    }

    pub fn family_spec(&self, k: i32) -> FamilySpec {
        FamilySpec {
            family: self.family,
            y: (k as f64).exp(),
            eta: self.eta,
            spacing: self.spacing,
            grid: self.grid,
        }
    }

    /// Rejects the spec before any work is done.
    pub fn validate(&self) -> Result<()> {
        if self.k_list.is_empty() {
            return Err(Error::Empty("k_list"));
        }
        if !self.sigma.is_finite() || self.sigma <= 0.0 {
            return Err(Error::Parameter(format!("sigma must be positive and finite, got {}", self.sigma)));
        }
        let levels = self.family.is_level_family();
        for f in [self.lhs, self.rhs] {
            if f.acts_on_levels() != levels {
                return Err(Error::Parameter(format!("functional {f:?} does not apply to family {:?}", self.family)));
            }
            self.exponents().check_for(f)?;
        }
        for &k in &self.k_list {
            self.family_spec(k).validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub length: f64,
    pub samples: u64,
    pub spacing: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Outcome {
    Done { lhs: f64, rhs: f64, ratio: f64, grid: GridMeta },
    Skipped { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub y: f64,
    pub k: i32,
    pub outcome: Outcome,
    /// Wall time, or 0 when timings are off.
    pub seconds: f64,
    /// `max_x sum_k |f_k(x)|` for level families.
    pub overlap: Option<f64>,
    /// `|y| < 10e`.
    pub small_shift: bool,
}

impl SweepRecord {
    pub fn ratio(&self) -> Option<f64> {
        match self.outcome {
            Outcome::Done { ratio, .. } => Some(ratio),
            Outcome::Skipped { .. } => None,
        }
    }

    pub fn csv_row(&self) -> String {
        match &self.outcome {
            Outcome::Done { lhs, rhs, ratio, .. } => {
                format!("{:e},{},{:e},{:e},{:e},{}", self.y, self.k, lhs, rhs, ratio, self.seconds)
            }
            Outcome::Skipped { .. } => format!("{:e},{},nan,nan,nan,{}", self.y, self.k, self.seconds),
        }
    }
}

/// Evaluates one sweep point.
pub fn sweep_point(spec: &SweepSpec, k: i32) -> Result<SweepRecord> {
    let start = Instant::now();
    let fspec = spec.family_spec(k);
    let y = fspec.y;
    let builder = match FamilyBuilder::new(fspec) {
        Ok(b) => b,
        Err(e @ Error::GridTooLarge { .. }) => {
            return Ok(SweepRecord { y, k, outcome: Outcome::Skipped { reason: e.to_string() }, seconds: 0.0, overlap: None, small_shift: !fspec.in_standard_regime() })
        }
        Err(e) => return Err(e),
    };
    let grid = *builder.grid();
    let e = spec.exponents();
    let (lhs, rhs, overlap) = if spec.family.is_level_family() {
        let lhs = evaluate_levels(&builder, spec.lhs, &e, y)?;
        let rhs = evaluate_levels(&builder, spec.rhs, &e, y)?;
        (lhs, rhs, Some(overlap_bound(&builder)?))
    } else {
        let f = builder.single()?;
        let top = fspec.top_level();
        let count = fspec.level_count();
        let lhs = evaluate_single(&f, spec.lhs, &e, y, top, count)?;
        let rhs = evaluate_single(&f, spec.rhs, &e, y, top, count)?;
        (lhs, rhs, None)
    };
    if !(rhs > 0.0) || !lhs.is_finite() {
        return Err(Error::Parameter(format!("degenerate sweep point K = {k}: lhs = {lhs}, rhs = {rhs}")));
    }
    let seconds = if spec.timings { start.elapsed().as_secs_f64() } else { 0.0 };
    Ok(SweepRecord {
        y,
        k,
        outcome: Outcome::Done {
            lhs,
            rhs,
            ratio: lhs / rhs,
            grid: GridMeta { length: grid.length(), samples: grid.samples() as u64, spacing: grid.spacing() },
        },
        seconds,
        overlap,
        small_shift: !fspec.in_standard_regime(),
    })
}

/// `max_x sum_k |f_k(x)|`.
pub fn overlap_bound(builder: &FamilyBuilder) -> Result<f64> {
    let mut total = vec![0.0f64; builder.grid().samples()];
    for k in builder.levels() {
        let f = builder.level(k)?;
        total.iter_mut().zip(f.values()).for_each(|(t, v)| *t += v.norm());
    }
    Ok(total.into_iter().fold(0.0, f64::max))
}

/// Runs every sweep point with at most `jobs` workers; records come back in
/// the order of `k_list`.
pub fn growth_sweep_with_jobs(spec: &SweepSpec, jobs: usize) -> Result<Vec<SweepRecord>> {
    spec.validate()?;
    let count = spec.k_list.len();
    let jobs = jobs.clamp(1, count);
    if jobs == 1 {
        return spec.k_list.iter().map(|&k| sweep_point(spec, k)).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<SweepRecord>>>> = Mutex::new(vec![None; count]);
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= count {
                    break;
                }
                let record = sweep_point(spec, spec.k_list[i]);
                slots.lock().expect("no worker panics while holding the lock")[i] = Some(record);
            });
        }
    });
    slots
        .into_inner()
        .expect("workers finished")
        .into_iter()
        .map(|r| r.expect("every slot filled"))
        .collect()
}

pub fn growth_sweep(spec: &SweepSpec) -> Result<Vec<SweepRecord>> {
    growth_sweep_with_jobs(spec, 1)
}

pub const CSV_HEADER: &str = "y,K,lhs,rhs,ratio,seconds";

pub fn write_csv<W: Write>(mut out: W, records: &[SweepRecord]) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(out, "{}", r.csv_row())?;
    }
    Ok(())
}

pub fn csv_string(records: &[SweepRecord]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, records).expect("writing to memory");
    String::from_utf8(buf).expect("ascii")
}
