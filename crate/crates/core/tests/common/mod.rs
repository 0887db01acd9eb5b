//! Brute-force reference computations shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use shiftlab::cz::CzDecomposition;
use shiftlab::{Grid, GridFunction, LevelFamily};

pub fn random_function(grid: Grid, rng: &mut ChaCha8Rng) -> GridFunction {
    let v = (0..grid.samples()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    GridFunction::new(grid, v).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn sup(a: &[f64]) -> f64 {
    a.iter().cloned().fold(0.0, f64::max)
}

/// `max |a - b| / max(|a|, |b|)`.
pub fn rel_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    let scale = a.iter().chain(b).map(|v| v.norm()).fold(0.0, f64::max);
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

pub fn re(f: &GridFunction) -> Vec<f64> {
    f.values().iter().map(|v| v.re).collect()
}

/// `f(. - steps h)` by index rotation.
pub fn rotate(values: &[Complex64], steps: i64) -> Vec<Complex64> {
    let n = values.len() as i64;
    (0..n).map(|i| values[(i - steps).rem_euclid(n) as usize]).collect()
}

/// Start sample of the cube of `2^r` samples that holds `i`, moved by `shift` samples.
pub fn shifted_start(i: usize, r: u32, shift: i64) -> i64 {
    ((i >> r) << r) as i64 + shift
}

pub fn window_mean(values: &[f64], start: i64, len: usize) -> f64 {
    let n = values.len() as i64;
    (0..len as i64).map(|d| values[(start + d).rem_euclid(n) as usize]).sum::<f64>() / len as f64
}

fn snapped(grid: &Grid, k: i32, y: f64) -> i64 {
    (2f64.powi(-k) * y / grid.spacing()).round() as i64
}

pub fn direct_dyadic_average(f: &GridFunction, k: i32, y: f64) -> Vec<Complex64> {
    let grid = f.grid();
    let n = grid.samples() as i64;
    let r = (grid.finest_level() - k) as u32;
    let shift = snapped(grid, k, y);
    (0..grid.samples())
        .map(|i| {
            let start = shifted_start(i, r, shift);
            (0..1i64 << r).map(|d| f.values()[(start + d).rem_euclid(n) as usize]).sum::<Complex64>()
                / (1u64 << r) as f64
        })
        .collect()
}

pub fn direct_shifted_maximal(f: &GridFunction, y: f64, t: f64) -> Vec<f64> {
    let grid = f.grid();
    let w: Vec<f64> = f.moduli().iter().map(|m| m.powf(t)).collect();
    (0..grid.samples())
        .map(|i| {
            (grid.coarsest_level()..=grid.finest_level())
                .map(|k| {
                    let r = (grid.finest_level() - k) as u32;
                    window_mean(&w, shifted_start(i, r, snapped(grid, k, y)), 1 << r)
                })
                .fold(0.0, f64::max)
                .powf(1.0 / t)
        })
        .collect()
}

/// Largest mean of `|f|` over windows of `2^r` samples containing each sample.
pub fn direct_windowed_maximal(f: &GridFunction) -> Vec<f64> {
    let grid = f.grid();
    let w = f.moduli();
    let n = grid.samples() as i64;
    (0..n)
        .map(|x| {
            let mut best: f64 = 0.0;
            for r in 0..=grid.log_samples() {
                let len = 1i64 << r;
                for start in x - len + 1..=x {
                    best = best.max(window_mean(&w, start, len as usize));
                }
            }
            best
        })
        .collect()
}

/// Carleson functional and the pointwise sharp functional by looping over every dyadic block.
pub fn cube_loops(fam: &LevelFamily, q: f64) -> (f64, Vec<f64>) {
    let grid = fam.grid();
    let n = grid.samples();
    let mut carleson: f64 = 0.0;
    let mut sharp = vec![0.0f64; n];
    for r in 0..=grid.log_samples() {
        let len = 1usize << r;
        let side = len as f64 * grid.spacing();
        for start in (0..n).step_by(len) {
            let (mut upper, mut lower) = (0.0, 0.0);
            for (k, f) in fam.iter() {
                let g: Vec<f64> = f.values()[start..start + len].iter().map(|v| v.norm().powf(q)).collect();
                if 2f64.powi(k) * side >= 1.0 {
                    upper += g.iter().sum::<f64>() / len as f64;
                } else {
                    for a in &g {
                        for b in &g {
                            lower += (a - b).abs() / (len * len) as f64;
                        }
                    }
                }
            }
            carleson = carleson.max(upper);
            sharp[start..start + len].iter_mut().for_each(|s| *s = s.max(lower));
        }
    }
    (carleson.powf(1.0 / q), sharp.iter().map(|v| v.powf(1.0 / q)).collect())
}

/// `sup_a a |{|f| >= a}|` with `a` ranging over the sample moduli.
pub fn threshold_scan(f: &GridFunction) -> f64 {
    let m = f.moduli();
    m.iter()
        .map(|&a| a * m.iter().filter(|&&v| v >= a).count() as f64 * f.grid().spacing())
        .fold(0.0, f64::max)
}

/// Error of `fast` against the double sum `h sum_l f(x_i - x_l) g(x_l)`,
/// relative to `max_i h sum_l |f(x_i - x_l)| |g(x_l)|`.
pub fn convolution_error(f: &GridFunction, g: &GridFunction, fast: &GridFunction) -> f64 {
    let n = f.grid().samples();
    let h = f.grid().spacing();
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..n {
        let mut s = Complex64::new(0.0, 0.0);
        let mut a = 0.0;
        for l in 0..n {
            let (x, y) = (f.values()[(i + n - l) % n], g.values()[l]);
            s += x * y;
            a += x.norm() * y.norm();
        }
        worst = worst.max((fast.values()[i] - s * h).norm());
        scale = scale.max(a * h);
    }
    worst / scale
}

/// `(h sum_z |f(x - z)|^t sum_nu 2^k / (1 + |2^k (z + nu L) - y|)^{sigma t})^{1/t}`.
pub fn peetre_direct(f: &GridFunction, sigma: f64, t: f64, k: i32, y: f64, wraps: i64) -> Vec<f64> {
    let grid = f.grid();
    let (n, h, length) = (grid.samples(), grid.spacing(), grid.length());
    let s = 2f64.powi(k);
    let kernel: Vec<f64> = (0..n)
        .map(|l| {
            (-wraps..=wraps)
                .map(|v| s / (1.0 + (s * (l as f64 * h + v as f64 * length) - y).abs()).powf(sigma * t))
                .sum()
        })
        .collect();
    let m = f.moduli();
    (0..n)
        .map(|i| ((0..n).map(|l| m[(i + n - l) % n].powf(t) * kernel[l]).sum::<f64>() * h).powf(1.0 / t))
        .collect()
}

/// `( sum_k ( sum_j |f_{j,k}| )^q )^{1/q}` with rows of `j_count` members.
pub fn double_norm(members: &[Vec<Complex64>], j_count: usize, q: f64) -> Vec<f64> {
    let n = members[0].len();
    (0..n)
        .map(|i| {
            members
                .chunks(j_count)
                .map(|row| row.iter().map(|m| m[i].norm()).sum::<f64>().powf(q))
                .sum::<f64>()
                .powf(1.0 / q)
        })
        .collect()
}

/// Maximal dyadic blocks whose mean of `norm` exceeds `threshold`, as `(start, len)`.
pub fn expected_cubes(norm: &[f64], threshold: f64) -> Vec<(usize, usize)> {
    let n = norm.len();
    let mut out = Vec::new();
    let mut covered = vec![false; n];
    let mut len = n;
    while len >= 1 {
        for start in (0..n).step_by(len) {
            if covered[start] {
                continue;
            }
            let mean = norm[start..start + len].iter().sum::<f64>() / len as f64;
            if mean > threshold {
                out.push((start, len));
                covered[start..start + len].iter_mut().for_each(|c| *c = true);
            }
        }
        len /= 2;
    }
    out.sort();
    out
}

/// Checks a decomposition of `members` (rows of `j_count`) from first principles.
pub fn cz_oracle(members: &[GridFunction], j_count: usize, q: f64, d: &CzDecomposition) -> Result<(), String> {
    let grid = *members[0].grid();
    let (n, h) = (grid.samples(), grid.spacing());
    let threshold = d.gamma * d.alpha;
    let raw: Vec<Vec<Complex64>> = members.iter().map(|m| m.values().to_vec()).collect();
    let mass = double_norm(&raw, j_count, q).iter().sum::<f64>() * h;
    let input: Vec<Vec<Complex64>> = raw.iter().map(|m| m.iter().map(|v| v / mass).collect()).collect();
    let norm = double_norm(&input, j_count, q);

    let mut cubes: Vec<(usize, usize)> =
        d.cubes.iter().map(|c| (c.first_sample(&grid), c.sample_count(&grid))).collect();
    cubes.sort();
    if cubes != expected_cubes(&norm, threshold) {
        return Err(format!("cube list differs from the stopping-time selection: {cubes:?}"));
    }
    let mut owner = vec![None; n];
    for (l, &(start, len)) in cubes.iter().enumerate() {
        for o in &mut owner[start..start + len] {
            if o.replace(l).is_some() {
                return Err("cubes overlap".into());
            }
        }
    }
    // |Q| = len L / n, so sum |Q| <= 1/(gamma alpha) iff sum len * L * gamma alpha <= n
    let selected: u64 = cubes.iter().map(|c| c.1 as u64).sum();
    if selected as f64 * grid.length() * threshold > n as f64 {
        return Err(format!("selected measure {} exceeds 1/(gamma alpha) = {}", selected as f64 * h, 1.0 / threshold));
    }

    let mut bad = vec![vec![Complex64::new(0.0, 0.0); n]; members.len()];
    for piece in &d.bad {
        let start = piece.cube.first_sample(&grid);
        let len = piece.cube.sample_count(&grid);
        for (m, row) in piece.values.iter().enumerate() {
            if row.len() != len {
                return Err("bad piece is not supported on its cube".into());
            }
            let mass: f64 = input[m][start..start + len].iter().map(|v| v.norm()).sum();
            let total: Complex64 = row.iter().sum();
            if total.norm() > 1e-12 * mass {
                return Err(format!("bad piece has mean {total}"));
            }
            for (i, v) in row.iter().enumerate() {
                bad[m][start + i] += v;
            }
        }
    }
    for (m, f) in input.iter().enumerate() {
        let peak = f.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        for i in 0..n {
            let rebuilt = d.good.members()[m].values()[i] + bad[m][i];
            if (rebuilt - f[i]).norm() > 1e-12 * peak {
                return Err(format!("reconstruction misses by {} at member {m}, sample {i}", (rebuilt - f[i]).norm()));
            }
        }
    }
    if !d.degenerate {
        let good: Vec<Vec<Complex64>> = d.good.members().iter().map(|m| m.values().to_vec()).collect();
        let worst = sup(&double_norm(&good, j_count, q));
        if worst > 2.0 * threshold * (1.0 + 1e-12) {
            return Err(format!("good part reaches {worst}, above 2 gamma alpha = {}", 2.0 * threshold));
        }
    }
    Ok(())
}
