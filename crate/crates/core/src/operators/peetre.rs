//! Shifted Peetre-type maximal functions and the decaying kernels behind them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::operators::dyadic::powers;
use crate::spectral::{convolve, forward_in_place, inverse_in_place};

/// Tail accuracy target for periodized kernels, relative to kernel mass.
pub const TAIL_TOLERANCE: f64 = 1e-10;
const MAX_WRAPS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftedOpParams {
    /// Decay exponent.
    pub sigma: f64,
    /// Integrability exponent; `f64::INFINITY` selects the supremum form.
    pub t: f64,
    pub level: i32,
    pub shift: f64,
    /// Explicit periodization wraps; `None` picks the smallest adequate count.
    pub wraps: Option<usize>,
}

impl ShiftedOpParams {
    pub fn new(sigma: f64, t: f64, level: i32, shift: f64) -> Self {
        ShiftedOpParams { sigma, t, level, shift, wraps: None }
    }

    fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) || !(self.t > 0.0) {
            return Err(Error::Parameter(format!(
                "sigma and t must be positive (sigma = {}, t = {})",
                self.sigma, self.t
            )));
        }
        if self.t.is_finite() && self.sigma * self.t <= 1.0 {
            return Err(Error::DivergentKernel { sigma: self.sigma, t: self.t });
        }
        Ok(())
    }
}

/// `2^j / (1 + |2^j x - y|)^decay`, periodized over the torus.
///
/// Copies `|nu| <= wraps` are summed explicitly; the remaining copies are
/// added through the Euler-Maclaurin expansion of the tail sum.
#[derive(Debug, Clone, Copy)]
pub struct PeriodizedKernel {
    pub level: i32,
    pub decay: f64,
    pub shift: f64,
    pub wraps: usize,
}

impl PeriodizedKernel {
    pub fn new(grid: &Grid, level: i32, decay: f64, shift: f64, wraps: Option<usize>) -> Result<Self> {
        if !(decay > 1.0) {
            return Err(Error::Parameter(format!("kernel decay must exceed 1, got {decay}")));
        }
        let wraps = match wraps {
            Some(v) if v >= 1 => v,
            Some(_) => return Err(Error::Parameter("periodization count must be >= 1".into())),
            None => default_wraps(grid, level, decay),
        };
        Ok(PeriodizedKernel { level, decay, shift, wraps })
    }

    /// `int_R 2^j / (1 + |2^j x - y|)^s dx`.
    pub fn mass(&self) -> f64 {
        2.0 / (self.decay - 1.0)
    }

    fn profile(&self, scale: f64, u: f64) -> f64 {
        let base = 1.0 + scale * u.abs();
        scale * pow_neg(base, self.decay)
    }

    /// Kernel value at offset `d` from its centre, `d in [-L/2, L/2)`.
    pub fn at_offset(&self, length: f64, d: f64) -> f64 {
        let scale = 2f64.powi(self.level);
        let mut total = self.profile(scale, d);
        for nu in 1..=self.wraps {
            let nu = nu as f64 * length;
            total += self.profile(scale, d + nu) + self.profile(scale, d - nu);
        }
        total + self.tail(scale, length, d) + self.tail(scale, length, -d)
    }

    /// Euler-Maclaurin estimate of `sum_{nu > wraps} profile(d + nu L)`.
    fn tail(&self, scale: f64, length: f64, d: f64) -> f64 {
        let s = self.decay;
        let first = (self.wraps + 1) as f64;
        let base = 1.0 + scale * (d + first * length);
        let step = scale * length / base;
        let value = scale * pow_neg(base, s);
        let first_derivative = -s * step * value;
        let third_derivative = -s * (s + 1.0) * (s + 2.0) * step.powi(3) * value;
        let integral = pow_neg(base, s - 1.0) / ((s - 1.0) * length);
        integral + 0.5 * value - first_derivative / 12.0 + third_derivative / 720.0
    }

    /// Samples `K(x_i)` with the centre at `2^-j y`.
    pub fn sample(&self, grid: &Grid) -> Vec<f64> {
        let length = grid.length();
        let centre = 2f64.powi(-self.level) * self.shift;
        (0..grid.samples())
            .map(|i| {
                let d = (grid.point(i) - centre + 0.5 * length).rem_euclid(length) - 0.5 * length;
                self.at_offset(length, d)
            })
            .collect()
    }
}

fn pow_neg(base: f64, s: f64) -> f64 {
    if s.fract() == 0.0 && s.abs() < 64.0 {
        base.powi(-(s as i32))
    } else {
        base.powf(-s)
    }
}

/// Smallest wrap count whose Euler-Maclaurin remainder estimate, taken at the
/// worst offset, stays below `TAIL_TOLERANCE` of the kernel mass.
pub fn default_wraps(grid: &Grid, level: i32, decay: f64) -> usize {
    let scale = 2f64.powi(level);
    let length = grid.length();
    let s = decay;
    let mass = 2.0 / (s - 1.0);
    let rising: f64 = (0..5).map(|i| s + i as f64).product();
    for v in 1..MAX_WRAPS {
        let base = 1.0 + scale * (v as f64 + 0.5) * length;
        let fifth = rising * (scale * length / base).powi(5) * scale * pow_neg(base, s);
        if 2.0 * fifth / 30240.0 < TAIL_TOLERANCE * mass {
            return v;
        }
    }
    MAX_WRAPS
}

fn real_function(grid: Grid, values: Vec<f64>) -> GridFunction {
    GridFunction::from_parts(grid, values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(), None)
}

/// `K (*) weights` for a real kernel, computed spectrally, clamped at zero.
pub(crate) fn positive_convolution(grid: &Grid, weights: &[f64], kernel: &[f64]) -> Vec<f64> {
    let mut a: Vec<Complex64> = weights.iter().map(|&w| Complex64::new(w, 0.0)).collect();
    let mut b: Vec<Complex64> = kernel.iter().map(|&k| Complex64::new(k, 0.0)).collect();
    forward_in_place(grid, &mut a);
    forward_in_place(grid, &mut b);
    a.iter_mut().zip(&b).for_each(|(x, y)| *x *= y);
    drop(b);
    inverse_in_place(grid, &mut a);
    a.into_iter().map(|c| c.re.max(0.0)).collect()
}

/// Pointwise values of the shifted Peetre maximal function of `values`.
pub fn peetre_values(grid: &Grid, values: &[Complex64], p: &ShiftedOpParams) -> Result<Vec<f64>> {
    p.validate()?;
    if p.t.is_infinite() {
        return Ok(peetre_sup(grid, values, p));
    }
    let decay = p.sigma * p.t;
    let kernel = PeriodizedKernel::new(grid, p.level, decay, p.shift, p.wraps)?.sample(grid);
    let weights: Vec<f64> = values
        .iter()
        .map(|v| if p.t == 1.0 { v.norm() } else { v.norm().powf(p.t) })
        .collect();
    let mut out = positive_convolution(grid, &weights, &kernel);
    if p.t != 1.0 {
        let inv = 1.0 / p.t;
        out.iter_mut().for_each(|v| *v = v.powf(inv));
    }
    Ok(out)
}

/// Shifted Peetre maximal function at level `k` (the `y = 0` case is unshifted).
pub fn peetre_shifted(f: &GridFunction, p: &ShiftedOpParams) -> Result<GridFunction> {
    Ok(real_function(*f.grid(), peetre_values(f.grid(), f.values(), p)?))
}

/// Supremum form: `sup_z |f(x - z)| / (1 + 2^k |z - 2^-k y|)^sigma` over grid `z`,
/// with torus distance; candidates are visited outward from the centre and the
/// scan stops once the weight cannot beat the current best.
fn peetre_sup(grid: &Grid, values: &[Complex64], p: &ShiftedOpParams) -> Vec<f64> {
    let n = grid.samples();
    let h = grid.spacing();
    let length = grid.length();
    let scale = 2f64.powi(p.level);
    let centre = (2f64.powi(-p.level) * p.shift).rem_euclid(length);
    let moduli: Vec<f64> = values.iter().map(|v| v.norm()).collect();
    let top = moduli.iter().cloned().fold(0.0, f64::max);
    let below = (centre / h).floor() as i64;
    // grid offsets ordered by distance to the centre: below, below+1, below-1, below+2, ...
    let mut order: Vec<(f64, usize)> = Vec::with_capacity(n);
    let (mut lo, mut hi) = (below, below + 1);
    while order.len() < n {
        let dl = centre - lo as f64 * h;
        let dh = hi as f64 * h - centre;
        let (d, idx) = if dl <= dh {
            lo -= 1;
            (dl, lo + 1)
        } else {
            hi += 1;
            (dh, hi - 1)
        };
        let d = d.min(length - d).abs();
        order.push((1.0 / (1.0 + scale * d).powf(p.sigma), idx.rem_euclid(n as i64) as usize));
    }
    (0..n)
        .map(|x| {
            let mut best = 0.0f64;
            for &(w, z) in &order {
                if w * top <= best {
                    break;
                }
                best = best.max(w * moduli[(x + n - z) % n]);
            }
            best
        })
        .collect()
}

/// The periodized kernel `2^j / (1 + |2^j x - y|)^sigma`.
pub fn lambda_kernel(grid: &Grid, j: i32, sigma: f64, y: f64, wraps: Option<usize>) -> Result<GridFunction> {
    if !(sigma > 1.0) {
        return Err(Error::Parameter(format!("kernel exponent sigma must exceed 1, got {sigma}")));
    }
    let kernel = PeriodizedKernel::new(grid, j, sigma, y, wraps)?;
    Ok(real_function(*grid, kernel.sample(grid)))
}

pub fn lambda_convolve(f: &GridFunction, j: i32, sigma: f64, y: f64, wraps: Option<usize>) -> Result<GridFunction> {
    let kernel = lambda_kernel(f.grid(), j, sigma, y, wraps)?;
    convolve(f, &kernel)
}

/// `|f|^t` as a real grid function.
pub fn modulus_power(f: &GridFunction, t: f64) -> GridFunction {
    real_function(*f.grid(), powers(f, t))
}
