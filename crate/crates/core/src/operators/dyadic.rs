//! Dyadic averages, shifted dyadic maximal functions and the windowed
//! Hardy-Littlewood baseline.

use std::collections::VecDeque;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};

/// Dyadic interval `[offset * 2^-level, (offset + 1) * 2^-level)` on the torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicCube {
    pub level: i32,
    pub offset: i64,
}

impl DyadicCube {
    pub fn side(&self) -> f64 {
        2f64.powi(-self.level)
    }

    pub fn start(&self) -> f64 {
        self.offset as f64 * self.side()
    }

    /// Number of samples covered on `grid`.
    pub fn sample_count(&self, grid: &Grid) -> usize {
        1usize << (grid.finest_level() - self.level)
    }

    pub fn first_sample(&self, grid: &Grid) -> usize {
        self.offset as usize * self.sample_count(grid)
    }

    pub fn sample_range(&self, grid: &Grid) -> std::ops::Range<usize> {
        let s = self.first_sample(grid);
        s..s + self.sample_count(grid)
    }

    pub fn measure(&self, grid: &Grid) -> f64 {
        self.sample_count(grid) as f64 * grid.spacing()
    }

    pub fn children(&self) -> [DyadicCube; 2] {
        [
            DyadicCube { level: self.level + 1, offset: 2 * self.offset },
            DyadicCube { level: self.level + 1, offset: 2 * self.offset + 1 },
        ]
    }

    /// The whole torus as a cube.
    pub fn root(grid: &Grid) -> DyadicCube {
        DyadicCube { level: grid.coarsest_level(), offset: 0 }
    }
}

pub fn check_level(grid: &Grid, k: i32) -> Result<()> {
    let (min, max) = (grid.coarsest_level(), grid.finest_level());
    if k < min || k > max {
        return Err(Error::LevelRange { level: k, min, max });
    }
    Ok(())
}

/// Shift `2^-k y` snapped to whole samples.
pub fn snapped_shift(grid: &Grid, k: i32, y: f64) -> i64 {
    (2f64.powi(-k) * y / grid.spacing()).round() as i64
}

/// Sums of `values` over the tiles `[b*2^r + shift, (b+1)*2^r + shift)`, added
/// pairwise so that unshifted tiles reproduce the cube-tree sums bit for bit.
pub(crate) fn tile_sums<T>(values: &[T], log_len: u32, shift: i64, scratch: &mut Vec<T>)
where
    T: Copy + std::ops::Add<Output = T>,
{
    let n = values.len();
    let s = shift.rem_euclid(n as i64) as usize;
    scratch.clear();
    scratch.extend_from_slice(&values[s..]);
    scratch.extend_from_slice(&values[..s]);
    let mut width = n;
    for _ in 0..log_len {
        width /= 2;
        for i in 0..width {
            scratch[i] = scratch[2 * i] + scratch[2 * i + 1];
        }
    }
    scratch.truncate(width);
}

/// Mean of `f` over the cube of side `2^-k` containing `x`, shifted by `2^-k y`.
pub fn dyadic_average(f: &GridFunction, k: i32, y: f64) -> Result<GridFunction> {
    let grid = *f.grid();
    check_level(&grid, k)?;
    let log_len = (grid.finest_level() - k) as u32;
    let mut sums = Vec::new();
    tile_sums(f.values(), log_len, snapped_shift(&grid, k, y), &mut sums);
    let inv = 1.0 / (1u64 << log_len) as f64;
    let values = (0..grid.samples())
        .map(|i| sums[i >> log_len] * inv)
        .collect();
    Ok(GridFunction::from_parts(grid, values, None))
}

fn real_function(grid: Grid, values: Vec<f64>) -> GridFunction {
    GridFunction::from_parts(grid, values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(), None)
}

pub(crate) fn powers(f: &GridFunction, t: f64) -> Vec<f64> {
    f.values()
        .iter()
        .map(|v| if t == 1.0 { v.norm() } else { v.norm().powf(t) })
        .collect()
}

fn check_exponent(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Parameter(format!("exponent t must be positive and finite, got {t}")));
    }
    Ok(())
}

/// `sup_Q` of shifted averages of `|f|^t`, all levels from the torus to one sample.
pub fn shifted_dyadic_maximal(f: &GridFunction, y: f64, t: f64) -> Result<GridFunction> {
    check_exponent(t)?;
    let grid = *f.grid();
    let weights = powers(f, t);
    let mut best = vec![0.0f64; grid.samples()];
    let mut sums = Vec::new();
    for k in grid.coarsest_level()..=grid.finest_level() {
        let log_len = (grid.finest_level() - k) as u32;
        tile_sums(&weights, log_len, snapped_shift(&grid, k, y), &mut sums);
        let inv = 1.0 / (1u64 << log_len) as f64;
        for (i, b) in best.iter_mut().enumerate() {
            *b = b.max(sums[i >> log_len] * inv);
        }
    }
    if t != 1.0 {
        best.iter_mut().for_each(|v| *v = v.powf(1.0 / t));
    }
    Ok(real_function(grid, best))
}

/// Unshifted dyadic maximal function by bottom-up merging over the cube tree
/// followed by a top-down running maximum.
pub fn dyadic_maximal_by_tree(f: &GridFunction, t: f64) -> Result<GridFunction> {
    check_exponent(t)?;
    let grid = *f.grid();
    let depth = grid.log_samples() as usize;
    let mut sums: Vec<Vec<f64>> = vec![powers(f, t)];
    for d in 0..depth {
        let below = &sums[d];
        let merged = below.chunks_exact(2).map(|p| p[0] + p[1]).collect();
        sums.push(merged);
    }
    let mut running = vec![sums[depth][0] / (1u64 << depth) as f64];
    for d in (0..depth).rev() {
        let inv = 1.0 / (1u64 << d) as f64;
        running = sums[d]
            .iter()
            .enumerate()
            .map(|(i, s)| (s * inv).max(running[i / 2]))
            .collect();
    }
    if t != 1.0 {
        running.iter_mut().for_each(|v| *v = v.powf(1.0 / t));
    }
    Ok(real_function(grid, running))
}

/// Maximum of averages of `|f|^t` over windows of dyadic length at every
/// offset containing the point; within `2^{1/t}` of the full maximal function.
pub fn hl_maximal(f: &GridFunction, t: f64) -> Result<GridFunction> {
    check_exponent(t)?;
    let grid = *f.grid();
    let n = grid.samples();
    let mut windows = powers(f, t);
    let mut best = windows.clone();
    let mut next = vec![0.0; n];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for r in 1..=grid.log_samples() {
        let half = 1usize << (r - 1);
        for i in 0..n {
            next[i] = windows[i] + windows[(i + half) % n];
        }
        std::mem::swap(&mut windows, &mut next);
        let len = 1usize << r;
        let inv = 1.0 / len as f64;
        if len == n {
            let whole = windows[0] * inv;
            best.iter_mut().for_each(|b| *b = b.max(whole));
            continue;
        }
        // sliding maximum over starts x-len+1..=x
        queue.clear();
        let start = n - (len - 1);
        for step in 0..(n + len - 1) {
            let s = (start + step) % n;
            while let Some(&back) = queue.back() {
                if windows[back % n] <= windows[s] {
                    queue.pop_back();
                } else {
                    break;
                }
            }
            queue.push_back(start + step);
            if step + 1 >= len {
                let oldest = start + step + 1 - len;
                while queue.front().is_some_and(|&q| q < oldest) {
                    queue.pop_front();
                }
                let x = (start + step) % n;
                let v = windows[queue.front().unwrap() % n] * inv;
                best[x] = best[x].max(v);
            }
        }
    }
    if t != 1.0 {
        best.iter_mut().for_each(|v| *v = v.powf(1.0 / t));
    }
    Ok(real_function(grid, best))
}
