//! Periodic sampling grid and sampled functions on it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent `a` with `x == 2^a`, if `x` is an exact power of two.
pub fn pow2_exponent(x: f64) -> Option<i32> {
    if !x.is_finite() || x <= 0.0 {
        return None;
    }
    let bits = x.to_bits();
    let mantissa = bits & ((1u64 << 52) - 1);
    let biased = ((bits >> 52) & 0x7ff) as i32;
    if biased == 0 || mantissa != 0 {
        return None;
    }
    Some(biased - 1023)
}

/// Torus of length `L = 2^a` sampled at `N = 2^m` equispaced points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GridRepr", into = "GridRepr")]
pub struct Grid {
    log_length: u32,
    log_samples: u32,
}

#[derive(Serialize, Deserialize)]
struct GridRepr {
    length: f64,
    samples: u64,
}

impl TryFrom<GridRepr> for Grid {
    type Error = Error;
    fn try_from(r: GridRepr) -> Result<Grid> {
        Grid::new(r.length, r.samples)
    }
}

impl From<Grid> for GridRepr {
    fn from(g: Grid) -> Self {
        GridRepr {
            length: g.length(),
            samples: g.samples() as u64,
        }
    }
}

impl Grid {
    /// Validates `L` and `N` (both powers of two, `L >= 1`, `N >= max(L, 2)`).
    pub fn new(length: f64, samples: u64) -> Result<Grid> {
        let a = pow2_exponent(length).ok_or(Error::NotPowerOfTwo {
            what: "torus length L",
            value: length,
        })?;
        if !samples.is_power_of_two() {
            return Err(Error::NotPowerOfTwo {
                what: "sample count N",
                value: samples as f64,
            });
        }
        let m = samples.trailing_zeros();
        if a < 0 || samples < 2 || (m as i32) < a {
            return Err(Error::Resolution { length, samples });
        }
        Ok(Grid {
            log_length: a as u32,
            log_samples: m,
        })
    }

    pub fn from_exponents(log_length: u32, log_samples: u32) -> Result<Grid> {
        Grid::new(2f64.powi(log_length as i32), 1u64 << log_samples)
    }

    pub fn length(&self) -> f64 {
        2f64.powi(self.log_length as i32)
    }

    pub fn samples(&self) -> usize {
        1usize << self.log_samples
    }

    pub fn spacing(&self) -> f64 {
        2f64.powi(self.log_length as i32 - self.log_samples as i32)
    }

    pub fn log_length(&self) -> u32 {
        self.log_length
    }

    pub fn log_samples(&self) -> u32 {
        self.log_samples
    }

    /// `log2(1/h)`, the finest dyadic level resolved by the grid.
    pub fn finest_level(&self) -> i32 {
        self.log_samples as i32 - self.log_length as i32
    }

    /// `-log2(L)`, the level of the whole torus.
    pub fn coarsest_level(&self) -> i32 {
        -(self.log_length as i32)
    }

    pub fn point(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    /// Signed representative of sample `i` in `[-L/2, L/2)`.
    pub fn centered_point(&self, i: usize) -> f64 {
        let n = self.samples();
        if i < n / 2 {
            self.point(i)
        } else {
            self.point(i) - self.length()
        }
    }

    /// Highest representable frequency `N / (2L)`.
    pub fn nyquist(&self) -> f64 {
        self.samples() as f64 / (2.0 * self.length())
    }

    /// Frequency `j / L` of the coefficient stored at FFT index `n`.
    pub fn frequency(&self, n: usize) -> f64 {
        self.frequency_index(n) as f64 / self.length()
    }

    /// Integer frequency index in `[-N/2, N/2)` for FFT slot `n`.
    pub fn frequency_index(&self, n: usize) -> i64 {
        let size = self.samples() as i64;
        let n = n as i64;
        if n < size / 2 {
            n
        } else {
            n - size
        }
    }

    pub fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(
                self.length(),
                self.samples() as u64,
                other.length(),
                other.samples() as u64,
            ))
        }
    }
}

/// Closed frequency interval `[lo, hi]` in cycles per unit length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub fn new(lo: f64, hi: f64) -> Band {
        Band { lo, hi }
    }

    pub fn symmetric(radius: f64) -> Band {
        Band::new(-radius, radius)
    }

    pub fn contains(&self, xi: f64) -> bool {
        let slack = 1e-12 * self.lo.abs().max(self.hi.abs()).max(1.0);
        xi >= self.lo - slack && xi <= self.hi + slack
    }

    pub fn shifted(&self, by: f64) -> Band {
        Band::new(self.lo + by, self.hi + by)
    }

    pub fn intersect(&self, other: &Band) -> Band {
        Band::new(self.lo.max(other.lo), self.hi.min(other.hi))
    }
}

/// Complex samples `f(x_i)`, `x_i = i h`, with an optional spectral support contract.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<Complex64>,
    band: Option<Band>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<GridFunction> {
        if values.len() != grid.samples() {
            return Err(Error::LengthMismatch {
                expected: grid.samples(),
                got: values.len(),
            });
        }
        Ok(GridFunction {
            grid,
            values,
            band: None,
        })
    }

    pub(crate) fn from_parts(grid: Grid, values: Vec<Complex64>, band: Option<Band>) -> Self {
        debug_assert_eq!(values.len(), grid.samples());
        GridFunction { grid, values, band }
    }

    pub fn from_real(grid: Grid, values: Vec<f64>) -> Result<GridFunction> {
        GridFunction::new(grid, values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
    }

    /// Samples `f` at the centered points in `[-L/2, L/2)`.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> GridFunction {
        let values = (0..grid.samples()).map(|i| f(grid.centered_point(i))).collect();
        GridFunction::from_parts(grid, values, None)
    }

    pub fn constant(grid: Grid, c: Complex64) -> GridFunction {
        GridFunction::from_parts(grid, vec![c; grid.samples()], None)
    }

    pub fn with_band(mut self, band: Option<Band>) -> GridFunction {
        self.band = band;
        self
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn band(&self) -> Option<Band> {
        self.band
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    pub fn scale(&self, c: Complex64) -> GridFunction {
        let values = self.values.iter().map(|v| v * c).collect();
        GridFunction::from_parts(self.grid, values, self.band)
    }

    /// Largest pointwise distance, relative to the larger sup norm.
    pub fn max_relative_diff(&self, other: &GridFunction) -> f64 {
        let scale = self
            .values
            .iter()
            .chain(other.values.iter())
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        let diff = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if scale == 0.0 {
            diff
        } else {
            diff / scale
        }
    }
}
