//! Lower estimate of the smoothness constant
//! `sup_w int_{|x| > 2|w|} sup_j |L_j(x - w) - L_j(x)| dx`
//! for the kernels `L_j(x) = 2^j / (1 + |2^j x - y|)^sigma`.
//!
//! The integral is evaluated on a non-uniform node set that depends only on
//! `(y, w)`: sinh-clustered points around every kernel centre `2^-j y` and
//! `2^-j y + w` in a generous default level window, plus geometric far-field
//! points. Enlarging `j_range` or refining `w_samples` can therefore only
//! increase the estimate.

use std::f64::consts::E;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;

const CLUSTER_POINTS: usize = 801;
const CLUSTER_REACH: f64 = 12.0;
const FAR_POINTS: usize = 4000;
const WINDOW_MARGIN: i32 = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AyEstimate {
    pub y: f64,
    pub sigma: f64,
    pub value: f64,
    /// Sample `w` at which the maximum was attained.
    pub maximizer: f64,
    pub j_min: i32,
    pub j_max: i32,
    pub w_count: usize,
    pub warning: Option<String>,
}

/// `count` magnitudes `lo * (hi/lo)^{i/count}` (nested under doubling), each with both signs.
pub fn log_spaced_w(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.log2(), hi.log2());
    (0..count)
        .flat_map(|i| {
            let w = (a + (b - a) * (i as f64 / count as f64)).exp2();
            [w, -w]
        })
        .collect()
}

/// Default `w` samples over `[h, L/4]`.
pub fn default_w_samples(grid: &Grid, count: usize) -> Vec<f64> {
    log_spaced_w(grid.spacing(), grid.length() / 4.0, count)
}

fn middle_regime(y: f64, w_abs: f64) -> (f64, f64) {
    // levels where 2^j |w| runs from 1/4 up to 4 (e + |y|)
    (-(w_abs.log2()) - 2.0, (4.0 * (E + y.abs())).log2() - w_abs.log2())
}

/// A level range covering all three regimes for every sample, with margin.
pub fn default_j_range(y: f64, w_samples: &[f64], margin: i32) -> RangeInclusive<i32> {
    let wmax = w_samples.iter().map(|w| w.abs()).fold(0.0, f64::max);
    let wmin = w_samples.iter().map(|w| w.abs()).fold(f64::INFINITY, f64::min);
    let lo = middle_regime(y, wmax).0.floor() as i32 - margin;
    let hi = middle_regime(y, wmin).1.ceil() as i32 + margin;
    lo..=hi
}

/// Widens a level range to twice its width about the same centre.
pub fn doubled(range: &RangeInclusive<i32>) -> RangeInclusive<i32> {
    let width = range.end() - range.start() + 1;
    (range.start() - width / 2)..=(range.end() + width - width / 2)
}

fn kernel(scale: f64, sigma: f64, y: f64, x: f64) -> f64 {
    let base = 1.0 + (scale * x - y).abs();
    let decay = if sigma == 2.0 { 1.0 / (base * base) } else { base.powf(-sigma) };
    scale * decay
}

fn nodes_for(y: f64, w: f64) -> Vec<f64> {
    let wa = w.abs();
    let (lo, hi) = middle_regime(y, wa);
    let mut nodes = Vec::new();
    let far_hi = 1e12 * wa + 1e9;
    let ratio = (far_hi / (2.0 * wa)).ln();
    for i in 0..FAR_POINTS {
        let x = 2.0 * wa * (ratio * i as f64 / (FAR_POINTS - 1) as f64).exp();
        nodes.push(x);
        nodes.push(-x);
    }
    for j in (lo.floor() as i32 - WINDOW_MARGIN)..=(hi.ceil() as i32 + WINDOW_MARGIN) {
        let width = 2f64.powi(-j);
        let centre = width * y;
        for c in [centre, centre + w] {
            for i in 0..CLUSTER_POINTS {
                let s = -CLUSTER_REACH + 2.0 * CLUSTER_REACH * i as f64 / (CLUSTER_POINTS - 1) as f64;
                nodes.push(c + width * s.sinh());
            }
        }
    }
    nodes.retain(|x| x.abs() > 2.0 * wa);
    nodes.push(2.0 * wa);
    nodes.push(-2.0 * wa);
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    nodes
}

/// The integral for one translation `w`.
pub fn ay_integral(y: f64, sigma: f64, w: f64, j_range: &RangeInclusive<i32>) -> f64 {
    let nodes = nodes_for(y, w);
    let scales: Vec<f64> = j_range.clone().map(|j| 2f64.powi(j)).collect();
    let integrand: Vec<f64> = nodes
        .iter()
        .map(|&x| {
            scales
                .iter()
                .map(|&s| (kernel(s, sigma, y, x - w) - kernel(s, sigma, y, x)).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    let edge = 2.0 * w.abs();
    let mut total = 0.0;
    for pair in 0..nodes.len() - 1 {
        let (a, b) = (nodes[pair], nodes[pair + 1]);
        // skip the excluded gap (-2|w|, 2|w|)
        if a >= edge || b <= -edge {
            total += 0.5 * (b - a) * (integrand[pair] + integrand[pair + 1]);
        }
    }
    total
}

pub fn estimate_ay(y: f64, sigma: f64, j_range: RangeInclusive<i32>, w_samples: &[f64]) -> Result<AyEstimate> {
    if !(sigma > 1.0) {
        return Err(Error::Parameter(format!("sigma must exceed 1, got {sigma}")));
    }
    if w_samples.is_empty() {
        return Err(Error::Empty("w samples"));
    }
    if w_samples.iter().any(|w| !(w.abs() > 0.0 && w.is_finite())) {
        return Err(Error::Parameter("w samples must be finite and nonzero".into()));
    }
    if j_range.is_empty() {
        return Err(Error::Empty("level range"));
    }
    let mut value = 0.0;
    let mut maximizer = w_samples[0];
    for &w in w_samples {
        let v = ay_integral(y, sigma, w, &j_range);
        if v > value {
            value = v;
            maximizer = w;
        }
    }
    let wanted = default_j_range(y, w_samples, 0);
    let warning = (j_range.start() > wanted.start() || j_range.end() < wanted.end()).then(|| {
        format!(
            "level range {}..={} does not cover the middle regime {}..={}",
            j_range.start(),
            j_range.end(),
            wanted.start(),
            wanted.end()
        )
    });
    Ok(AyEstimate {
        y,
        sigma,
        value,
        maximizer,
        j_min: *j_range.start(),
        j_max: *j_range.end(),
        w_count: w_samples.len(),
        warning,
    })
}
