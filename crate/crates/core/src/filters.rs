//! Littlewood-Paley filters built directly in frequency.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Band, Grid, GridFunction};
use crate::spectral::{from_spectrum, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FilterKind {
    /// Low-pass: 1 on `|xi| <= 2^k`, 0 beyond `2^{k+1}`.
    Phi,
    /// Annulus `2^{k-1} <= |xi| <= 2^{k+1}`.
    Psi,
    /// Sum of the three neighbouring annuli, identically 1 on `[2^{k-1}, 2^{k+1}]`.
    PsiTilde,
}

impl FilterKind {
    pub fn name(&self) -> &'static str {
        match self {
            FilterKind::Phi => "phi",
            FilterKind::Psi => "psi",
            FilterKind::PsiTilde => "psi-tilde",
        }
    }

    /// Radius of the closed frequency support at level `k`.
    pub fn support_edge(&self, k: i32) -> f64 {
        match self {
            FilterKind::Phi | FilterKind::Psi => 2f64.powi(k + 1),
            FilterKind::PsiTilde => 2f64.powi(k + 2),
        }
    }

    pub fn band(&self, k: i32) -> Band {
        Band::symmetric(self.support_edge(k))
    }

    /// Frequency response at level `k`.
    pub fn response(&self, k: i32, xi: f64) -> f64 {
        match self {
            FilterKind::Phi => low_pass(xi / 2f64.powi(k)),
            FilterKind::Psi => annulus(k, xi),
            FilterKind::PsiTilde => annulus(k - 1, xi) + annulus(k, xi) + annulus(k + 1, xi),
        }
    }

    pub fn check_nyquist(&self, grid: &Grid, k: i32) -> Result<()> {
        let edge = self.support_edge(k);
        if edge > grid.nyquist() {
            return Err(Error::Nyquist {
                kind: self.name(),
                level: k,
                edge,
                nyquist: grid.nyquist(),
            });
        }
        Ok(())
    }
}

fn transition(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

/// Smooth even cutoff: 1 on `[-1, 1]`, 0 outside `[-2, 2]`.
pub fn low_pass(xi: f64) -> f64 {
    let a = xi.abs();
    if a <= 1.0 {
        return 1.0;
    }
    if a >= 2.0 {
        return 0.0;
    }
    let up = transition(2.0 - a);
    up / (up + transition(a - 1.0))
}

fn annulus(k: i32, xi: f64) -> f64 {
    low_pass(xi / 2f64.powi(k)) - low_pass(xi / 2f64.powi(k - 1))
}

/// Spectrum of the level-`k` filter sampled on the grid.
pub fn filter_spectrum(grid: &Grid, kind: FilterKind, k: i32) -> Result<Spectrum> {
    kind.check_nyquist(grid, k)?;
    Ok(Spectrum::from_profile(*grid, |xi| {
        Complex64::new(kind.response(k, xi), 0.0)
    }))
}

/// The spatial filter `phi_k`, `psi_k` or `psi~_k` (dilations `2^k g(2^k .)`).
pub fn make_filter(grid: &Grid, kind: FilterKind, k: i32) -> Result<GridFunction> {
    let spectrum = filter_spectrum(grid, kind, k)?;
    Ok(from_spectrum(&spectrum).with_band(Some(kind.band(k))))
}
