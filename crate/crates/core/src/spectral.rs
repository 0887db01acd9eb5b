//! Discrete Fourier transform on the grid, exact modulation and translation,
//! periodic convolution and spectral support checks.
//!
//! Coefficients follow `c_j = h * sum_i f(x_i) e^{-2 pi i x_i j / L}`, so the
//! tone `e^{2 pi i xi0 x}` sits at frequency `xi0`. The inverse is
//! `f(x_i) = (1/L) * sum_j c_j e^{2 pi i x_i j / L}`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use once_cell::sync::Lazy;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Band, Grid, GridFunction};

type PlanCache = HashMap<(usize, bool), Arc<dyn Fft<f64>>>;

static PLANS: Lazy<Mutex<PlanCache>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn plan(len: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    let mut cache = PLANS.lock().unwrap_or_else(|e| e.into_inner());
    cache
        .entry((len, forward))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if forward {
                planner.plan_fft_forward(len)
            } else {
                planner.plan_fft_inverse(len)
            }
        })
        .clone()
}

/// Unnormalized in-place FFT with kernel `e^{-2 pi i n k / N}`.
pub fn fft_forward(buf: &mut [Complex64]) {
    plan(buf.len(), true).process(buf);
}

/// Unnormalized in-place FFT with kernel `e^{+2 pi i n k / N}`.
pub fn fft_inverse(buf: &mut [Complex64]) {
    plan(buf.len(), false).process(buf);
}

/// In-place samples -> coefficients.
pub fn forward_in_place(grid: &Grid, buf: &mut [Complex64]) {
    fft_forward(buf);
    let h = grid.spacing();
    buf.iter_mut().for_each(|c| *c *= h);
}

/// In-place coefficients -> samples.
pub fn inverse_in_place(grid: &Grid, buf: &mut [Complex64]) {
    fft_inverse(buf);
    let inv_len = 1.0 / grid.length();
    buf.iter_mut().for_each(|c| *c *= inv_len);
}

/// Fourier coefficients at `xi_j = j / L`, stored in FFT order
/// (slot `n` holds `j = n` for `n < N/2` and `j = n - N` otherwise).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: Grid,
    coefficients: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(grid: Grid, coefficients: Vec<Complex64>) -> Result<Spectrum> {
        if coefficients.len() != grid.samples() {
            return Err(Error::LengthMismatch {
                expected: grid.samples(),
                got: coefficients.len(),
            });
        }
        Ok(Spectrum { grid, coefficients })
    }

    /// Samples a profile at every discrete frequency.
    pub fn from_profile(grid: Grid, profile: impl Fn(f64) -> Complex64) -> Spectrum {
        let coefficients = (0..grid.samples()).map(|n| profile(grid.frequency(n))).collect();
        Spectrum { grid, coefficients }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn into_coefficients(self) -> Vec<Complex64> {
        self.coefficients
    }

    /// Coefficient at integer frequency index `j in [-N/2, N/2)`.
    pub fn at(&self, j: i64) -> Complex64 {
        let n = self.coefficients.len() as i64;
        self.coefficients[j.rem_euclid(n) as usize]
    }

    /// `(1/L) * sum_j |c_j|^2`; by Parseval this is `h * sum_i |f(x_i)|^2`.
    pub fn energy(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum::<f64>() / self.grid.length()
    }
}

pub fn to_spectrum(f: &GridFunction) -> Spectrum {
    let mut buf = f.values().to_vec();
    forward_in_place(f.grid(), &mut buf);
    Spectrum {
        grid: *f.grid(),
        coefficients: buf,
    }
}

pub fn from_spectrum(s: &Spectrum) -> GridFunction {
    let mut buf = s.coefficients.clone();
    inverse_in_place(&s.grid, &mut buf);
    GridFunction::from_parts(s.grid, buf, None)
}

fn lattice_index(grid: &Grid, xi: f64) -> Result<i64> {
    let scaled = xi * grid.length();
    if !scaled.is_finite() || (scaled - scaled.round()).abs() > 1e-9 * scaled.abs().max(1.0) {
        return Err(Error::OffLattice(xi));
    }
    Ok(scaled.round() as i64)
}

/// Pointwise product with `e^{2 pi i xi0 x}`; `xi0 * L` must be an integer.
pub fn modulate(f: &GridFunction, xi0: f64) -> Result<GridFunction> {
    let grid = *f.grid();
    let shift = lattice_index(&grid, xi0)?;
    let n = grid.samples() as i64;
    let step = shift.rem_euclid(n) as u64;
    let values = f
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let turn = (step * i as u64) % n as u64;
            v * Complex64::from_polar(1.0, 2.0 * PI * turn as f64 / n as f64)
        })
        .collect();
    let band = f.band().map(|b| b.shifted(shift as f64 / grid.length()));
    Ok(GridFunction::from_parts(grid, values, band))
}

/// Multiplies coefficients in place by `e^{-2 pi i a xi}`, i.e. `f -> f(. - a)`.
pub fn apply_shift_phase(grid: &Grid, coefficients: &mut [Complex64], a: f64) {
    let length = grid.length();
    let a = a.rem_euclid(length);
    for (n, c) in coefficients.iter_mut().enumerate() {
        let j = grid.frequency_index(n) as f64;
        // reduce a*j/L mod 1 before scaling by 2 pi
        let turns = (a * j / length).rem_euclid(1.0);
        *c *= Complex64::from_polar(1.0, -2.0 * PI * turns);
    }
}

/// Number of samples `a` spans if it is an exact grid multiple.
pub fn grid_steps(grid: &Grid, a: f64) -> Option<i64> {
    let s = a / grid.spacing();
    (s.is_finite() && s == s.round()).then_some(s as i64)
}

/// Returns `f(. - a)`: a cyclic rotation when `a` is a grid multiple, a spectral
/// phase shift otherwise.
pub fn translate(f: &GridFunction, a: f64) -> GridFunction {
    let grid = *f.grid();
    let n = grid.samples();
    if let Some(steps) = grid_steps(&grid, a) {
        let r = steps.rem_euclid(n as i64) as usize;
        let mut values = f.values().to_vec();
        values.rotate_right(r);
        return GridFunction::from_parts(grid, values, f.band());
    }
    let mut buf = f.values().to_vec();
    forward_in_place(&grid, &mut buf);
    apply_shift_phase(&grid, &mut buf, a);
    inverse_in_place(&grid, &mut buf);
    GridFunction::from_parts(grid, buf, f.band())
}

/// Periodic convolution `h * (f (*) g)`, approximating `int f(x - z) g(z) dz`.
pub fn convolve(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    f.grid().ensure_same(g.grid())?;
    let grid = *f.grid();
    let mut a = f.values().to_vec();
    let mut b = g.values().to_vec();
    forward_in_place(&grid, &mut a);
    forward_in_place(&grid, &mut b);
    a.iter_mut().zip(&b).for_each(|(x, y)| *x *= y);
    inverse_in_place(&grid, &mut a);
    let band = match (f.band(), g.band()) {
        (Some(p), Some(q)) => Some(p.intersect(&q)),
        (p, q) => p.or(q),
    };
    Ok(GridFunction::from_parts(grid, a, band))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandCheck {
    pub pass: bool,
    /// Out-of-band spectral energy over total energy.
    pub leakage: f64,
}

pub const BAND_TOLERANCE: f64 = 1e-10;

pub fn band_support_check(f: &GridFunction, band: Band) -> BandCheck {
    let s = to_spectrum(f);
    spectrum_band_check(&s, band)
}

pub fn spectrum_band_check(s: &Spectrum, band: Band) -> BandCheck {
    let grid = s.grid();
    let mut total = 0.0;
    let mut outside = 0.0;
    for (n, c) in s.coefficients().iter().enumerate() {
        let e = c.norm_sqr();
        total += e;
        if !band.contains(grid.frequency(n)) {
            outside += e;
        }
    }
    let leakage = if total > 0.0 { outside / total } else { 0.0 };
    BandCheck {
        pass: leakage <= BAND_TOLERANCE,
        leakage,
    }
}
