use std::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::filters::FilterKind;
use crate::grid::GridFunction;
use crate::norms::lp::lp_of_moduli;
use crate::operators::FilterBank;

/// `|| sup_k |phi_k * f| ||_{L^p}` over the given level range.
pub fn hardy_norm(f: &GridFunction, p: f64, levels: RangeInclusive<i32>) -> Result<f64> {
    if levels.is_empty() {
        return Err(Error::Empty("Hardy level range"));
    }
    let bank = FilterBank::new(f);
    let mut best = vec![0.0f64; f.grid().samples()];
    for k in levels {
        let piece = bank.level_values(FilterKind::Phi, k, 0.0)?;
        for (b, v) in best.iter_mut().zip(&piece) {
            *b = b.max(v.norm());
        }
    }
    lp_of_moduli(f.grid(), &best, p)
}
