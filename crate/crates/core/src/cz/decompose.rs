//! Vector-valued Calderón-Zygmund decomposition by a dyadic stopping time.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::operators::DyadicCube;

/// Functions `f_{j,k}` for `j` in `j_min..j_min+j_count`, `k` in `k_min..k_min+k_count`.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubleFamily {
    grid: Grid,
    j_min: i32,
    k_min: i32,
    j_count: usize,
    k_count: usize,
    members: Vec<GridFunction>,
}

impl DoubleFamily {
    /// `members` is ordered with `j` varying fastest.
    pub fn new(j_min: i32, j_count: usize, k_min: i32, k_count: usize, members: Vec<GridFunction>) -> Result<Self> {
        if j_count == 0 || k_count == 0 {
            return Err(Error::Empty("double family"));
        }
        if members.len() != j_count * k_count {
            return Err(Error::LengthMismatch { expected: j_count * k_count, got: members.len() });
        }
        let grid = *members[0].grid();
        for m in &members {
            grid.ensure_same(m.grid())?;
        }
        Ok(DoubleFamily { grid, j_min, k_min, j_count, k_count, members })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn members(&self) -> &[GridFunction] {
        &self.members
    }

    pub fn get(&self, j: i32, k: i32) -> Option<&GridFunction> {
        let jj = usize::try_from(j - self.j_min).ok().filter(|&v| v < self.j_count)?;
        let kk = usize::try_from(k - self.k_min).ok().filter(|&v| v < self.k_count)?;
        self.members.get(kk * self.j_count + jj)
    }

    pub fn shape(&self) -> (i32, usize, i32, usize) {
        (self.j_min, self.j_count, self.k_min, self.k_count)
    }

    /// `( sum_k ( sum_j |f_{j,k}(x)| )^q )^{1/q}` at every sample.
    pub fn pointwise_norm(&self, q: f64) -> Vec<f64> {
        pointwise_norm_of(&self.members, self.j_count, self.grid.samples(), q)
    }

    fn scaled(&self, c: f64) -> DoubleFamily {
        let members = self.members.iter().map(|m| m.scale(Complex64::new(c, 0.0))).collect();
        DoubleFamily { members, ..self.clone() }
    }
}

fn pointwise_norm_of(members: &[GridFunction], j_count: usize, n: usize, q: f64) -> Vec<f64> {
    let mut acc = vec![0.0; n];
    let mut inner = vec![0.0; n];
    for row in members.chunks(j_count) {
        inner.iter_mut().for_each(|v| *v = 0.0);
        for m in row {
            for (a, v) in inner.iter_mut().zip(m.values()) {
                *a += v.norm();
            }
        }
        for (a, v) in acc.iter_mut().zip(&inner) {
            *a += v.powf(q);
        }
    }
    acc.iter().map(|v| v.powf(1.0 / q)).collect()
}

/// Restriction of `f - mean_Q f` to one selected cube, one row per member.
#[derive(Debug, Clone, PartialEq)]
pub struct BadPiece {
    pub cube: DyadicCube,
    pub values: Vec<Vec<Complex64>>,
}

#[derive(Debug, Clone)]
pub struct CzDecomposition {
    pub alpha: f64,
    pub gamma: f64,
    pub q: f64,
    /// Factor the input was multiplied by to reach unit mass.
    pub normalization: f64,
    /// The normalized input.
    pub input: DoubleFamily,
    pub cubes: Vec<DyadicCube>,
    pub good: DoubleFamily,
    pub bad: Vec<BadPiece>,
    /// The root torus itself exceeded the threshold.
    pub degenerate: bool,
}

/// Splits `F` (after normalization to unit `l^q(l^1)` mass) at height `gamma * alpha`.
pub fn cz_decompose(family: &DoubleFamily, q: f64, alpha: f64, gamma: f64) -> Result<CzDecomposition> {
    if !(q > 1.0 && q.is_finite()) {
        return Err(Error::Parameter(format!("q must lie in (1, inf), got {q}")));
    }
    if !(alpha > 0.0 && gamma > 0.0) {
        return Err(Error::Parameter(format!("alpha and gamma must be positive (alpha = {alpha}, gamma = {gamma})")));
    }
    let grid = *family.grid();
    let raw_mass = family.pointwise_norm(q).iter().sum::<f64>() * grid.spacing();
    if !(raw_mass > 0.0 && raw_mass.is_finite()) {
        return Err(Error::Parameter("input has zero or non-finite mass".into()));
    }
    let normalization = 1.0 / raw_mass;
    let input = family.scaled(normalization);
    let norm = input.pointwise_norm(q);
    let threshold = gamma * alpha;

    let tree = SumTree::new(&norm);
    let root = DyadicCube::root(&grid);
    let mut cubes = Vec::new();
    let mut stack = vec![root];
    while let Some(cube) = stack.pop() {
        if tree.average(&grid, cube) > threshold {
            cubes.push(cube);
        } else if cube.level < grid.finest_level() {
            let [a, b] = cube.children();
            stack.push(b);
            stack.push(a);
        }
    }
    cubes.sort();
    let degenerate = cubes.first() == Some(&root);

    let mut good_members: Vec<Vec<Complex64>> = input.members.iter().map(|m| m.values().to_vec()).collect();
    let mut bad = Vec::with_capacity(cubes.len());
    for &cube in &cubes {
        let range = cube.sample_range(&grid);
        let count = range.len() as f64;
        let mut rows = Vec::with_capacity(good_members.len());
        for g in good_members.iter_mut() {
            let slice = &mut g[range.clone()];
            let mean = slice.iter().sum::<Complex64>() / count;
            rows.push(slice.iter().map(|v| v - mean).collect());
            slice.iter_mut().for_each(|v| *v = mean);
        }
        bad.push(BadPiece { cube, values: rows });
    }
    let good_members = good_members
        .into_iter()
        .map(|v| GridFunction::new(grid, v))
        .collect::<Result<Vec<_>>>()?;
    let good = DoubleFamily { members: good_members, ..input.clone() };
    Ok(CzDecomposition { alpha, gamma, q, normalization, input, cubes, good, bad, degenerate })
}

/// Block sums of the norm field, built bottom-up once.
struct SumTree {
    rows: Vec<Vec<f64>>,
}

impl SumTree {
    fn new(values: &[f64]) -> Self {
        let mut rows = vec![values.to_vec()];
        while rows.last().unwrap().len() > 1 {
            let next = rows.last().unwrap().chunks_exact(2).map(|p| p[0] + p[1]).collect();
            rows.push(next);
        }
        SumTree { rows }
    }

    fn average(&self, grid: &Grid, cube: DyadicCube) -> f64 {
        let s = (grid.finest_level() - cube.level) as usize;
        self.rows[s][cube.offset as usize] / (1u64 << s) as f64
    }
}

/// Residuals of the decomposition's defining properties, computed directly
/// from the cube list and sample values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CzCheck {
    pub cube_count: usize,
    pub disjoint: bool,
    pub selected_measure: f64,
    pub measure_bound: f64,
    pub max_reconstruction_error: f64,
    pub max_mean_residual: f64,
    pub max_good_norm: f64,
    pub good_bound: f64,
    pub degenerate: bool,
}

impl CzCheck {
    pub fn passes(&self) -> bool {
        self.disjoint
            && self.selected_measure <= self.measure_bound
            && self.max_reconstruction_error <= 1e-12
            && self.max_mean_residual <= 1e-12
            && (self.degenerate || self.max_good_norm <= self.good_bound * (1.0 + 1e-12))
    }
}

pub fn check_decomposition(d: &CzDecomposition) -> CzCheck {
    let grid = *d.input.grid();
    let n = grid.samples();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    let mut disjoint = true;
    let mut selected = 0u64;
    for (l, cube) in d.cubes.iter().enumerate() {
        for i in cube.sample_range(&grid) {
            if owner[i].replace(l).is_some() {
                disjoint = false;
            }
        }
        selected += cube.sample_count(&grid) as u64;
    }

    let mut max_reconstruction_error: f64 = 0.0;
    for (m, (f, g)) in d.input.members.iter().zip(&d.good.members).enumerate() {
        let scale = f.values().iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        for (i, holder) in owner.iter().enumerate() {
            let mut rebuilt = g.values()[i];
            if let Some(l) = *holder {
                let piece = &d.bad[l];
                rebuilt += piece.values[m][i - piece.cube.first_sample(&grid)];
            }
            max_reconstruction_error = max_reconstruction_error.max((rebuilt - f.values()[i]).norm() / scale);
        }
    }

    // mean of each bad row, relative to the mass of the input on the cube
    let mut max_mean_residual: f64 = 0.0;
    for piece in &d.bad {
        let range = piece.cube.sample_range(&grid);
        for (row, f) in piece.values.iter().zip(&d.input.members) {
            let mass: f64 = f.values()[range.clone()].iter().map(|v| v.norm()).sum();
            if mass > 0.0 {
                max_mean_residual = max_mean_residual.max(row.iter().sum::<Complex64>().norm() / mass);
            }
        }
    }

    let max_good_norm = d.good.pointwise_norm(d.q).into_iter().fold(0.0, f64::max);
    CzCheck {
        cube_count: d.cubes.len(),
        disjoint,
        selected_measure: selected as f64 * grid.spacing(),
        measure_bound: 1.0 / (d.gamma * d.alpha),
        max_reconstruction_error,
        max_mean_residual,
        max_good_norm,
        good_bound: 2.0 * d.gamma * d.alpha,
        degenerate: d.degenerate,
    }
}
