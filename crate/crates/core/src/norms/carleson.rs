//! Level-restricted dyadic averages: the Carleson functional and its local
//! versions.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::levels::LevelFamily;
use crate::operators::dyadic::tile_sums;

/// Streams levels into per-cube sums of `|f_k|^q`, where level `k` only
/// reaches cubes `P` with `2^k l(P) >= 1`.
///
/// `sums[s][b]` covers the block of `2^s` samples starting at `b * 2^s`.
#[derive(Debug, Clone)]
pub struct CarlesonAccumulator {
    grid: Grid,
    q: f64,
    sums: Vec<Vec<f64>>,
    scratch: Vec<f64>,
    levels: usize,
}

impl CarlesonAccumulator {
    pub fn new(grid: Grid, q: f64) -> Result<Self> {
        if !(q > 0.0 && q.is_finite()) {
            return Err(Error::Parameter(format!("Carleson functional needs finite q > 0, got {q}")));
        }
        let depth = grid.log_samples() as usize;
        let sums = (0..=depth).map(|s| vec![0.0; grid.samples() >> s]).collect();
        Ok(CarlesonAccumulator { grid, q, sums, scratch: Vec::new(), levels: 0 })
    }

    /// Smallest block exponent `s` that level `k` contributes to.
    fn first_block(&self, k: i32) -> usize {
        (self.grid.finest_level() - k).max(0) as usize
    }

    pub fn add_moduli(&mut self, k: i32, moduli: &[f64]) {
        self.levels += 1;
        let depth = self.grid.log_samples() as usize;
        let first = self.first_block(k);
        if first > depth {
            return;
        }
        let q = self.q;
        let weights: Vec<f64> = if q == 1.0 {
            moduli.to_vec()
        } else {
            moduli.iter().map(|m| m.powf(q)).collect()
        };
        tile_sums(&weights, first as u32, 0, &mut self.scratch);
        drop(weights);
        let mut current = std::mem::take(&mut self.scratch);
        for s in first..=depth {
            if s > first {
                let half = current.len() / 2;
                for i in 0..half {
                    current[i] = current[2 * i] + current[2 * i + 1];
                }
                current.truncate(half);
            }
            for (acc, v) in self.sums[s].iter_mut().zip(&current) {
                *acc += v;
            }
        }
        self.scratch = current;
    }

    pub fn add(&mut self, k: i32, f: &GridFunction) -> Result<()> {
        self.grid.ensure_same(f.grid())?;
        self.add_moduli(k, &f.moduli());
        Ok(())
    }

    /// `sup_P` of the level-restricted average, raised to `1/q`.
    pub fn value(&self) -> f64 {
        let best = self
            .sums
            .iter()
            .enumerate()
            .flat_map(|(s, row)| {
                let inv = 1.0 / (1u64 << s) as f64;
                row.iter().map(move |v| v * inv)
            })
            .fold(0.0, f64::max);
        best.powf(1.0 / self.q)
    }

    /// For each sample, the sup over cubes containing it.
    pub fn pointwise(&self) -> Vec<f64> {
        let depth = self.sums.len() - 1;
        let mut running = vec![self.sums[depth][0] / (1u64 << depth) as f64];
        for s in (0..depth).rev() {
            let inv = 1.0 / (1u64 << s) as f64;
            running = self.sums[s]
                .iter()
                .enumerate()
                .map(|(b, v)| (v * inv).max(running[b / 2]))
                .collect();
        }
        running.iter().map(|v| v.powf(1.0 / self.q)).collect()
    }
}

fn accumulate(family: &LevelFamily, q: f64) -> Result<CarlesonAccumulator> {
    let mut acc = CarlesonAccumulator::new(*family.grid(), q)?;
    for (k, f) in family.iter() {
        acc.add(k, f)?;
    }
    Ok(acc)
}

pub fn carleson_norm(family: &LevelFamily, q: f64) -> Result<f64> {
    Ok(accumulate(family, q)?.value())
}

/// Pointwise sup over dyadic `P` containing `x` of the Carleson-type average.
pub fn sharp_q1(family: &LevelFamily, q: f64) -> Result<GridFunction> {
    let values = accumulate(family, q)?
        .pointwise()
        .into_iter()
        .map(|v| Complex64::new(v, 0.0))
        .collect();
    GridFunction::new(*family.grid(), values)
}
