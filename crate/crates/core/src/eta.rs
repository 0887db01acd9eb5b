//! The nonnegative band-limited bump `eta = |g|^2`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Band, Grid, GridFunction};
use crate::spectral::{from_spectrum, Spectrum};

/// Floors below this (relative to `eta(0) = 1`) are treated as vanishing.
pub const MIN_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtaParams {
    /// Half-width `W` of the spectral support of `eta`.
    pub halfwidth: f64,
    /// Radius `R` on which `eta` stays above its reported floor.
    pub floor_radius: f64,
}

impl Default for EtaParams {
    fn default() -> Self {
        EtaParams {
            halfwidth: 1.0 / 16.0,
            floor_radius: 0.25,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Eta {
    pub function: GridFunction,
    pub params: EtaParams,
    /// `min eta` over `|x| <= R`.
    pub floor: f64,
    /// `(1/L) * sum_xi |g^(xi)|^2` after normalization; equals `h * sum eta` by Parseval.
    pub spectral_mass: f64,
}

/// Standard compactly supported bump on `(-1, 1)`.
pub fn bump(s: f64) -> f64 {
    if s.abs() < 1.0 {
        (-1.0 / (1.0 - s * s)).exp()
    } else {
        0.0
    }
}

pub fn make_eta(grid: &Grid, params: EtaParams) -> Result<Eta> {
    let w = params.halfwidth;
    let r = params.floor_radius;
    if !(w >= 2.0 / grid.length()) {
        return Err(Error::Parameter(format!(
            "eta half-width {w} is below 2/L = {}",
            2.0 / grid.length()
        )));
    }
    if !(r >= grid.spacing()) {
        return Err(Error::Parameter(format!(
            "eta floor radius {r} is below the spacing {}",
            grid.spacing()
        )));
    }
    let profile = Spectrum::from_profile(*grid, |xi| Complex64::new(bump(2.0 * xi / w), 0.0));
    let g = from_spectrum(&profile);
    let peak = g.values()[0].norm_sqr();
    let values: Vec<Complex64> = g
        .values()
        .iter()
        .map(|v| Complex64::new(v.norm_sqr() / peak, 0.0))
        .collect();
    let spectral_mass =
        profile.coefficients().iter().map(|c| c.norm_sqr()).sum::<f64>() / grid.length() / peak;

    let floor = floor_within(grid, &values, r);
    if floor < MIN_FLOOR {
        return Err(Error::EtaFloor {
            floor,
            radius: r,
            suggested: usable_radius(grid, &values),
        });
    }
    let function = GridFunction::from_parts(*grid, values, Some(Band::symmetric(w)));
    Ok(Eta {
        function,
        params,
        floor,
        spectral_mass,
    })
}

fn floor_within(grid: &Grid, values: &[Complex64], radius: f64) -> f64 {
    values
        .iter()
        .enumerate()
        .filter(|(i, _)| grid.centered_point(*i).abs() <= radius)
        .map(|(_, v)| v.re)
        .fold(f64::INFINITY, f64::min)
}

fn usable_radius(grid: &Grid, values: &[Complex64]) -> f64 {
    let n = grid.samples();
    let mut best = 0.0;
    for step in 0..n / 2 {
        let right = values[step].re;
        let left = values[(n - step) % n].re;
        if right.min(left) < MIN_FLOOR {
            break;
        }
        best = step as f64 * grid.spacing();
    }
    best
}
