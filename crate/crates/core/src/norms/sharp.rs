//! Mean-oscillation functionals over dyadic cubes.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::levels::LevelFamily;

fn real_function(grid: Grid, values: Vec<f64>) -> GridFunction {
    GridFunction::new(grid, values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
        .expect("length matches grid")
}

/// Pushes per-cube values down to samples with a running maximum.
/// `per_level[s][b]` belongs to the block of `2^s` samples at `b * 2^s`.
fn sup_over_containing(per_level: &[Vec<f64>]) -> Vec<f64> {
    let depth = per_level.len() - 1;
    let mut running = per_level[depth].clone();
    for s in (0..depth).rev() {
        running = per_level[s]
            .iter()
            .enumerate()
            .map(|(b, v)| v.max(running[b / 2]))
            .collect();
    }
    running
}

/// `sup_{Q ∋ x} (1/|Q|) int_Q |f - f_Q|`, with `f_Q` the cube mean.
pub fn sharp_maximal(f: &GridFunction) -> GridFunction {
    let grid = *f.grid();
    let values = f.values();
    let depth = grid.log_samples() as usize;
    let per_level: Vec<Vec<f64>> = (0..=depth)
        .map(|s| {
            values
                .chunks_exact(1 << s)
                .map(|block| {
                    let n = block.len() as f64;
                    let mean = block.iter().sum::<Complex64>() / n;
                    block.iter().map(|v| (v - mean).norm()).sum::<f64>() / n
                })
                .collect()
        })
        .collect();
    real_function(grid, sup_over_containing(&per_level))
}

/// `E|a - b|` for `a, b` drawn independently from `sorted` (ascending).
fn mean_abs_difference(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    let weighted: f64 = sorted
        .iter()
        .enumerate()
        .map(|(i, v)| (2.0 * i as f64 + 1.0 - n as f64) * v)
        .sum();
    2.0 * weighted / (n * n) as f64
}

fn merge_pairs(blocks: &[f64], width: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(blocks.len());
    for pair in blocks.chunks_exact(2 * width) {
        let (a, b) = pair.split_at(width);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            if a[i] <= b[j] {
                out.push(a[i]);
                i += 1;
            } else {
                out.push(b[j]);
                j += 1;
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
    }
    out
}

/// `sup_{P ∋ x} ( avg_P avg_P sum_{k: 2^k l(P) < 1} | g_k(z)^q - g_k(u)^q | )^{1/q}`
/// with `g_k = |f_k|`.
pub fn sharp_q2(family: &LevelFamily, q: f64) -> Result<GridFunction> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::Parameter(format!("q must be finite and positive, got {q}")));
    }
    let grid = *family.grid();
    let depth = grid.log_samples() as usize;
    let finest = grid.finest_level();
    let mut per_level: Vec<Vec<f64>> = (0..=depth).map(|s| vec![0.0; grid.samples() >> s]).collect();
    for (k, f) in family.iter() {
        // cube of 2^s samples has 2^k l(P) < 1 iff s < finest - k
        let last = (finest - k).min(depth as i32 + 1);
        if last <= 0 {
            continue;
        }
        let mut blocks: Vec<f64> = f.values().iter().map(|v| v.norm().powf(q)).collect();
        for (s, level) in per_level.iter_mut().enumerate().take(last as usize) {
            if s > 0 {
                blocks = merge_pairs(&blocks, 1 << (s - 1));
            }
            for (acc, block) in level.iter_mut().zip(blocks.chunks_exact(1 << s)) {
                *acc += mean_abs_difference(block);
            }
        }
    }
    let pointwise = sup_over_containing(&per_level)
        .into_iter()
        .map(|v| v.powf(1.0 / q))
        .collect();
    Ok(real_function(grid, pointwise))
}
