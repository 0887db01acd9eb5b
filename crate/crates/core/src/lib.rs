//! Shifted maximal functions, Littlewood-Paley pieces, mixed norms and
//! Calderón-Zygmund tooling on a periodic one-dimensional grid, plus the
//! growth experiments built on them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cz;
pub mod error;
pub mod eta;
pub mod experiments;
pub mod exponent;
pub mod families;
pub mod filters;
pub mod grid;
pub mod io;
pub mod levels;
pub mod norms;
pub mod operators;
pub mod spectral;

pub use error::{Error, Result};
pub use exponent::Exponent;
pub use filters::FilterKind;
pub use grid::{Band, Grid, GridFunction};
pub use levels::LevelFamily;
pub use spectral::{Spectrum, BandCheck};
