//! Shifted Littlewood-Paley pieces `(g_k)^y * f` with `g_k(. - 2^-k y)`.

use num_complex::Complex64;

use crate::error::Result;
use crate::filters::FilterKind;
use crate::grid::GridFunction;
use crate::spectral::{apply_shift_phase, forward_in_place, inverse_in_place, Spectrum};

/// Keeps the spectrum of `f` so that many levels can be filtered cheaply.
pub struct FilterBank<'a> {
    source: &'a GridFunction,
    spectrum: Vec<Complex64>,
}

impl<'a> FilterBank<'a> {
    pub fn new(f: &'a GridFunction) -> Self {
        let mut spectrum = f.values().to_vec();
        forward_in_place(f.grid(), &mut spectrum);
        FilterBank { source: f, spectrum }
    }

    pub fn spectrum(&self) -> Spectrum {
        Spectrum::new(*self.source.grid(), self.spectrum.clone()).expect("same grid")
    }

    /// Samples of `(g_k)^y * f`.
    pub fn level_values(&self, kind: FilterKind, k: i32, y: f64) -> Result<Vec<Complex64>> {
        let grid = self.source.grid();
        kind.check_nyquist(grid, k)?;
        let mut buf: Vec<Complex64> = self
            .spectrum
            .iter()
            .enumerate()
            .map(|(n, c)| c * kind.response(k, grid.frequency(n)))
            .collect();
        if y != 0.0 {
            apply_shift_phase(grid, &mut buf, 2f64.powi(-k) * y);
        }
        inverse_in_place(grid, &mut buf);
        Ok(buf)
    }

    pub fn level(&self, kind: FilterKind, k: i32, y: f64) -> Result<GridFunction> {
        let values = self.level_values(kind, k, y)?;
        let band = match self.source.band() {
            Some(b) => b.intersect(&kind.band(k)),
            None => kind.band(k),
        };
        Ok(GridFunction::from_parts(*self.source.grid(), values, Some(band)))
    }
}

/// `(phi_k)^y * f`, `(psi_k)^y * f` or `(psi~_k)^y * f`.
pub fn lp_conv_shifted(f: &GridFunction, kind: FilterKind, k: i32, y: f64) -> Result<GridFunction> {
    kind.check_nyquist(f.grid(), k)?;
    FilterBank::new(f).level(kind, k, y)
}
