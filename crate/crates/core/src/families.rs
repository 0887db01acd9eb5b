//! Extremal families: modulated bumps, translated-and-modulated bumps, a single
//! Littlewood-Paley atom, and sparse lacunary sums.

use std::f64::consts::E;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eta::{make_eta, Eta, EtaParams};
use crate::filters::{filter_spectrum, FilterKind};
use crate::grid::{Band, Grid, GridFunction};
use crate::levels::LevelFamily;
use crate::spectral::{forward_in_place, from_spectrum, inverse_in_place, modulate, translate, apply_shift_phase};

pub const DEFAULT_SPACING: u32 = 10;
pub const DEFAULT_MAX_LOG_SAMPLES: u32 = 26;
/// `10e`.
pub const STANDARD_SHIFT: f64 = 10.0 * E;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyId {
    A,
    B,
    PsiSingle,
    SparseModulated,
    SparseShifted,
}

impl FamilyId {
    pub fn is_level_family(&self) -> bool {
        matches!(self, FamilyId::A | FamilyId::B)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case")]
pub enum GridPolicy {
    /// `h = 2^-(top + 3)` and `L` the smallest power of two above `4 * max shift`.
    Auto {
        #[serde(default = "default_max_log_samples")]
        max_log_samples: u32,
    },
    Fixed { length: f64, samples: u64 },
}

fn default_max_log_samples() -> u32 {
    DEFAULT_MAX_LOG_SAMPLES
}

impl Default for GridPolicy {
    fn default() -> Self {
        GridPolicy::Auto { max_log_samples: DEFAULT_MAX_LOG_SAMPLES }
    }
}

fn default_spacing() -> u32 {
    DEFAULT_SPACING
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family: FamilyId,
    pub y: f64,
    #[serde(default)]
    pub eta: EtaParams,
    /// Gap between consecutive exponents of the sparse families.
    #[serde(default = "default_spacing")]
    pub spacing: u32,
    #[serde(default)]
    pub grid: GridPolicy,
}

/// `ln(e + |y|)`.
pub fn log_factor(y: f64) -> f64 {
    (E + y.abs()).ln()
}

impl FamilySpec {
    pub fn new(family: FamilyId, y: f64) -> Self {
        FamilySpec {
            family,
            y,
            eta: EtaParams::default(),
            spacing: DEFAULT_SPACING,
            grid: GridPolicy::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.y.is_finite() || self.y == 0.0 {
            return Err(Error::Parameter(format!("y must be finite and nonzero, got {}", self.y)));
        }
        if self.spacing < 3 {
            return Err(Error::Parameter(format!(
                "sparse spacing must be at least 3 for disjoint bands, got {}",
                self.spacing
            )));
        }
        Ok(())
    }

    /// Whether `|y| >= 10e`, the regime in which the lower-bound constructions
    /// are usually stated. Smaller shifts are accepted and flagged.
    pub fn in_standard_regime(&self) -> bool {
        self.y.abs() >= STANDARD_SHIFT
    }

    /// `floor(ln(e + |y|))`: the number of levels of A and B and of the
    /// shifted low-pass sweep for the single atom.
    pub fn level_count(&self) -> i32 {
        log_factor(self.y).floor() as i32
    }

    /// Index of the last sparse term, `floor(ln(e + |y|) / spacing)`.
    pub fn last_term(&self) -> i32 {
        (log_factor(self.y) / self.spacing as f64).floor() as i32
    }

    /// Exponents `zeta_k = spacing * k` of the sparse frequencies.
    pub fn sparse_exponents(&self) -> Vec<i32> {
        (0..=self.last_term()).map(|k| k * self.spacing as i32).collect()
    }

    /// Finest level that must be resolved.
    pub fn top_level(&self) -> i32 {
        match self.family {
            FamilyId::A | FamilyId::B | FamilyId::PsiSingle => self.level_count(),
            FamilyId::SparseModulated | FamilyId::SparseShifted => self.last_term() * self.spacing as i32,
        }
    }

    /// Largest translation the operators apply to this family.
    pub fn max_shift(&self) -> f64 {
        match self.family {
            FamilyId::A | FamilyId::B | FamilyId::PsiSingle => self.y.abs() / 2.0,
            FamilyId::SparseModulated | FamilyId::SparseShifted => self.y.abs(),
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        match self.grid {
            GridPolicy::Fixed { length, samples } => Grid::new(length, samples),
            GridPolicy::Auto { max_log_samples } => {
                let halfwidth = (self.family != FamilyId::PsiSingle).then_some(self.eta.halfwidth);
                auto_grid(self.max_shift(), self.top_level(), halfwidth, max_log_samples)
            }
        }
    }
}

/// Grid with `h = 2^-(top + 3)` and `L > 4 * max_shift`; when a bump of
/// half-width `W` is involved also `L >= 32 / W`.
pub fn auto_grid(max_shift: f64, top_level: i32, halfwidth: Option<f64>, max_log_samples: u32) -> Result<Grid> {
    let min_length = halfwidth.map_or(1.0, |w| 32.0 / w);
    let mut log_length = 0u32;
    while 2f64.powi(log_length as i32) <= 4.0 * max_shift || 2f64.powi(log_length as i32) < min_length {
        log_length += 1;
    }
    let fine = (top_level + 3).max(0) as u32;
    let log_samples = log_length + fine;
    if log_samples > max_log_samples {
        return Err(Error::GridTooLarge {
            required: 1u64 << log_samples.min(63),
            limit: 1u64 << max_log_samples,
        });
    }
    Grid::from_exponents(log_length, log_samples)
}

/// Builds family members on demand from one shared bump.
pub struct FamilyBuilder {
    spec: FamilySpec,
    grid: Grid,
    eta: Option<Eta>,
}

impl FamilyBuilder {
    pub fn new(spec: FamilySpec) -> Result<Self> {
        spec.validate()?;
        let grid = spec.grid()?;
        Self::on_grid(spec, grid)
    }

    pub fn on_grid(spec: FamilySpec, grid: Grid) -> Result<Self> {
        spec.validate()?;
        let eta = match spec.family {
            FamilyId::PsiSingle => None,
            _ => Some(make_eta(&grid, spec.eta)?),
        };
        let builder = FamilyBuilder { spec, grid, eta };
        builder.check_nyquist()?;
        if spec.family == FamilyId::A {
            builder.check_disjoint_balls()?;
        }
        Ok(builder)
    }

    pub fn spec(&self) -> &FamilySpec {
        &self.spec
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn eta(&self) -> Option<&Eta> {
        self.eta.as_ref()
    }

    fn bump(&self) -> &GridFunction {
        &self.eta.as_ref().expect("bump families carry eta").function
    }

    fn check_nyquist(&self) -> Result<()> {
        let w = self.spec.eta.halfwidth;
        let edge = match self.spec.family {
            FamilyId::PsiSingle => FilterKind::Phi.support_edge(self.spec.level_count()),
            _ => 2f64.powi(self.spec.top_level()) + w,
        };
        if edge > self.grid.nyquist() {
            return Err(Error::Nyquist {
                kind: "family",
                level: self.spec.top_level(),
                edge,
                nyquist: self.grid.nyquist(),
            });
        }
        Ok(())
    }

    /// The balls `|x - 2^-m y| <= R/4`, `1 <= m <= K`, must not meet on the torus.
    fn check_disjoint_balls(&self) -> Result<()> {
        let length = self.grid.length();
        let radius = self.spec.eta.floor_radius / 4.0;
        let centres: Vec<f64> = (1..=self.spec.level_count())
            .map(|m| (2f64.powi(-m) * self.spec.y).rem_euclid(length))
            .collect();
        for (i, a) in centres.iter().enumerate() {
            for b in &centres[i + 1..] {
                let d = (a - b).abs();
                if d.min(length - d) <= 2.0 * radius {
                    return Err(Error::Hypothesis(format!(
                        "lower-bound balls at {a} and {b} overlap for radius {radius}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn levels(&self) -> std::ops::RangeInclusive<i32> {
        1..=self.spec.level_count()
    }

    /// Level `k` of family A (`eta e^{2 pi i 2^k x}`) or B (`eta(x + 2^-k y) e^{2 pi i 2^k x}`).
    pub fn level(&self, k: i32) -> Result<GridFunction> {
        let frequency = 2f64.powi(k);
        match self.spec.family {
            FamilyId::A => modulate(self.bump(), frequency),
            FamilyId::B => {
                let shifted = translate(self.bump(), -2f64.powi(-k) * self.spec.y);
                modulate(&shifted, frequency)
            }
            other => Err(Error::Parameter(format!("{other:?} is not a level family"))),
        }
    }

    pub fn level_family(&self) -> Result<LevelFamily> {
        let functions = self.levels().map(|k| self.level(k)).collect::<Result<Vec<_>>>()?;
        LevelFamily::new(1, functions)
    }

    /// Bands `[2^zeta - W, 2^zeta + W]` occupied by the sparse terms.
    pub fn sparse_bands(&self) -> Vec<Band> {
        let w = self.spec.eta.halfwidth;
        self.spec
            .sparse_exponents()
            .iter()
            .map(|&z| Band::new(2f64.powi(z) - w, 2f64.powi(z) + w))
            .collect()
    }

    /// The single function of the atom or sparse families.
    pub fn single(&self) -> Result<GridFunction> {
        match self.spec.family {
            FamilyId::PsiSingle => build_psi_single(&self.grid),
            FamilyId::SparseModulated | FamilyId::SparseShifted => Ok(self.sparse_sum()),
            other => Err(Error::Parameter(format!("{other:?} is a level family"))),
        }
    }

    fn sparse_sum(&self) -> GridFunction {
        let shifted = self.spec.family == FamilyId::SparseShifted;
        let mut eta_spectrum = self.bump().values().to_vec();
        forward_in_place(&self.grid, &mut eta_spectrum);
        let mut total = vec![Complex64::new(0.0, 0.0); self.grid.samples()];
        for &z in &self.spec.sparse_exponents() {
            let mut term = eta_spectrum.clone();
            if shifted {
                apply_shift_phase(&self.grid, &mut term, -2f64.powi(-z) * self.spec.y);
            }
            inverse_in_place(&self.grid, &mut term);
            let term = GridFunction::from_parts(self.grid, term, None);
            let term = modulate(&term, 2f64.powi(z)).expect("dyadic frequency lies on the lattice");
            total.iter_mut().zip(term.values()).for_each(|(a, b)| *a += b);
        }
        let w = self.spec.eta.halfwidth;
        let top = 2f64.powi(self.spec.top_level());
        GridFunction::from_parts(self.grid, total, Some(Band::new(1.0 - w, top + w)))
    }
}

pub fn build_family_a(spec: FamilySpec) -> Result<LevelFamily> {
    expect_family(&spec, &[FamilyId::A])?;
    FamilyBuilder::new(spec)?.level_family()
}

pub fn build_family_b(spec: FamilySpec) -> Result<LevelFamily> {
    expect_family(&spec, &[FamilyId::B])?;
    FamilyBuilder::new(spec)?.level_family()
}

pub fn build_sparse(spec: FamilySpec) -> Result<GridFunction> {
    expect_family(&spec, &[FamilyId::SparseModulated, FamilyId::SparseShifted])?;
    FamilyBuilder::new(spec)?.single()
}

/// The level-0 annulus filter `psi` on `grid`.
pub fn build_psi_single(grid: &Grid) -> Result<GridFunction> {
    let spectrum = filter_spectrum(grid, FilterKind::Psi, 0)?;
    Ok(from_spectrum(&spectrum).with_band(Some(FilterKind::Psi.band(0))))
}

fn expect_family(spec: &FamilySpec, allowed: &[FamilyId]) -> Result<()> {
    if allowed.contains(&spec.family) {
        Ok(())
    } else {
        Err(Error::Parameter(format!("expected one of {allowed:?}, got {:?}", spec.family)))
    }
}
