//! Norm functionals evaluated on families, streaming one level at a time.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::FilterKind;
use crate::grid::{Grid, GridFunction};
use crate::levels::LevelFamily;
use crate::norms::{lp_of_moduli, CarlesonAccumulator, MixedAccumulator};
use crate::operators::{peetre_values, shifted_dyadic_maximal, FilterBank, ShiftedOpParams};

/// Lowest Littlewood-Paley level used for single functions.
pub const LP_FLOOR: i32 = -2;
/// Lowest low-pass level used for the Hardy norm.
pub const HARDY_FLOOR: i32 = -4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Functional {
    /// `|| {f_k} ||_{L^p(l^q)}`
    RawMixed,
    /// `|| {M^t_{sigma, 2^k, y} f_k} ||_{L^p(l^q)}`
    PeetreMixed,
    /// Carleson functional of `{f_k}`
    RawCarleson,
    /// Carleson functional of `{M^t_{sigma, 2^k, y} f_k}`
    PeetreCarleson,
    /// `|| {M^y_t f_k} ||_{L^p(l^q)}` with the shifted dyadic maximal function
    DyadicMaximalMixed,
    /// `|| sup_{1 <= m <= K} |(phi_m)^y * f| ||_{L^p}`
    ShiftedPhiSup,
    /// `|| sup_k |phi_k * f| ||_{L^p}`
    Hardy,
    /// `|| {psi_j * f} ||_{L^p(l^q)}`
    PsiMixed,
    /// `|| {(psi~_j)^y * f} ||_{L^p(l^q)}`
    ShiftedPsiTildeMixed,
    /// Carleson functional of `{psi_j * f}`
    PsiCarleson,
    /// Carleson functional of `{(psi~_j)^y * f}`
    ShiftedPsiTildeCarleson,
}

impl Functional {
    pub fn acts_on_levels(&self) -> bool {
        matches!(
            self,
            Functional::RawMixed
                | Functional::PeetreMixed
                | Functional::RawCarleson
                | Functional::PeetreCarleson
                | Functional::DyadicMaximalMixed
        )
    }

    pub fn uses_peetre(&self) -> bool {
        matches!(self, Functional::PeetreMixed | Functional::PeetreCarleson)
    }

    pub fn is_carleson(&self) -> bool {
        matches!(
            self,
            Functional::RawCarleson
                | Functional::PeetreCarleson
                | Functional::PsiCarleson
                | Functional::ShiftedPsiTildeCarleson
        )
    }
}

/// Exponents shared by all functionals of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponents {
    pub p: f64,
    pub q: f64,
    pub t: f64,
    pub sigma: f64,
}

impl Exponents {
    /// Refuses tuples outside the hypotheses of the bound being probed.
    pub fn check_for(&self, functional: Functional) -> Result<()> {
        let Exponents { p, q, t, sigma } = *self;
        if !(p > 0.0 && q > 0.0 && t > 0.0) {
            return Err(Error::Hypothesis(format!("p, q, t must be positive (got {p}, {q}, {t})")));
        }
        if functional.is_carleson() && q.is_infinite() {
            return Err(Error::Hypothesis("Carleson functionals need finite q".into()));
        }
        if functional.uses_peetre() {
            if t.is_infinite() {
                return Err(Error::Hypothesis("Peetre sweeps need finite t".into()));
            }
            let floor = if functional.is_carleson() { q.min(t) } else { p.min(q).min(t) };
            if !(sigma > 1.0 / floor) {
                return Err(Error::Hypothesis(format!(
                    "sigma = {sigma} must exceed 1/min(exponents) = {}",
                    1.0 / floor
                )));
            }
        }
        if functional == Functional::DyadicMaximalMixed && !(t < p.min(q)) {
            return Err(Error::Hypothesis(format!("shifted dyadic maximal needs t < min(p, q), got t = {t}")));
        }
        Ok(())
    }
}

/// Anything that can hand out the members of a level family one by one.
pub trait LevelSource {
    fn grid(&self) -> &Grid;
    fn levels(&self) -> RangeInclusive<i32>;
    fn level(&self, k: i32) -> Result<GridFunction>;
}

impl LevelSource for LevelFamily {
    fn grid(&self) -> &Grid {
        LevelFamily::grid(self)
    }

    fn levels(&self) -> RangeInclusive<i32> {
        self.k_min()..=self.k_max()
    }

    fn level(&self, k: i32) -> Result<GridFunction> {
        LevelFamily::level(self, k)
            .cloned()
            .ok_or(Error::LevelRange { level: k, min: self.k_min(), max: self.k_max() })
    }
}

impl LevelSource for crate::families::FamilyBuilder {
    fn grid(&self) -> &Grid {
        crate::families::FamilyBuilder::grid(self)
    }

    fn levels(&self) -> RangeInclusive<i32> {
        crate::families::FamilyBuilder::levels(self)
    }

    fn level(&self, k: i32) -> Result<GridFunction> {
        crate::families::FamilyBuilder::level(self, k)
    }
}

enum Sink {
    Mixed(MixedAccumulator),
    Carleson(CarlesonAccumulator),
}

impl Sink {
    fn new(grid: Grid, functional: Functional, q: f64) -> Result<Sink> {
        Ok(if functional.is_carleson() {
            Sink::Carleson(CarlesonAccumulator::new(grid, q)?)
        } else {
            Sink::Mixed(MixedAccumulator::new(grid, q)?)
        })
    }

    fn push(&mut self, k: i32, moduli: Vec<f64>) {
        match self {
            Sink::Mixed(acc) => acc.add_moduli(moduli),
            Sink::Carleson(acc) => acc.add_moduli(k, &moduli),
        }
    }

    fn finish(&self, p: f64) -> Result<f64> {
        match self {
            Sink::Mixed(acc) => acc.finish(p),
            Sink::Carleson(acc) => Ok(acc.value()),
        }
    }
}

/// Evaluates a level functional on `source` with shift `y`.
pub fn evaluate_levels(source: &dyn LevelSource, functional: Functional, e: &Exponents, y: f64) -> Result<f64> {
    if !functional.acts_on_levels() {
        return Err(Error::Parameter(format!("{functional:?} acts on a single function")));
    }
    e.check_for(functional)?;
    let grid = *source.grid();
    let mut sink = Sink::new(grid, functional, e.q)?;
    for k in source.levels() {
        let f = source.level(k)?;
        let moduli = match functional {
            Functional::RawMixed | Functional::RawCarleson => f.moduli(),
            Functional::PeetreMixed | Functional::PeetreCarleson => {
                let params = ShiftedOpParams::new(e.sigma, e.t, k, y);
                peetre_values(&grid, f.values(), &params)?
            }
            Functional::DyadicMaximalMixed => shifted_dyadic_maximal(&f, y, e.t)?.moduli(),
            _ => unreachable!(),
        };
        drop(f);
        sink.push(k, moduli);
    }
    sink.finish(e.p)
}

/// Levels `j` from `LP_FLOOR` to `top + 2` whose filter fits under Nyquist.
pub fn lp_levels(grid: &Grid, kind: FilterKind, top: i32) -> RangeInclusive<i32> {
    let mut hi = top + 2;
    while hi >= LP_FLOOR && kind.check_nyquist(grid, hi).is_err() {
        hi -= 1;
    }
    LP_FLOOR..=hi
}

/// Levels of the Hardy norm: `HARDY_FLOOR` up to `top + 1`, within Nyquist.
pub fn hardy_levels(grid: &Grid, top: i32) -> RangeInclusive<i32> {
    let mut hi = top + 1;
    while hi >= HARDY_FLOOR && FilterKind::Phi.check_nyquist(grid, hi).is_err() {
        hi -= 1;
    }
    HARDY_FLOOR..=hi
}

/// Evaluates a single-function functional.
///
/// `top` is the highest level carried by `f`; `shifted_levels` is `K` for the
/// shifted low-pass supremum over `1 <= m <= K`.
pub fn evaluate_single(
    f: &GridFunction,
    functional: Functional,
    e: &Exponents,
    y: f64,
    top: i32,
    shifted_levels: i32,
) -> Result<f64> {
    if functional.acts_on_levels() {
        return Err(Error::Parameter(format!("{functional:?} acts on a level family")));
    }
    e.check_for(functional)?;
    let grid = *f.grid();
    let bank = FilterBank::new(f);
    let sup_over = |kind: FilterKind, levels: RangeInclusive<i32>, shift: f64| -> Result<Vec<f64>> {
        let mut best = vec![0.0f64; grid.samples()];
        for k in levels {
            let piece = bank.level_values(kind, k, shift)?;
            for (b, v) in best.iter_mut().zip(&piece) {
                *b = b.max(v.norm());
            }
        }
        Ok(best)
    };
    match functional {
        Functional::ShiftedPhiSup => lp_of_moduli(&grid, &sup_over(FilterKind::Phi, 1..=shifted_levels, y)?, e.p),
        Functional::Hardy => lp_of_moduli(&grid, &sup_over(FilterKind::Phi, hardy_levels(&grid, top), 0.0)?, e.p),
        _ => {
            let (kind, shift) = match functional {
                Functional::PsiMixed | Functional::PsiCarleson => (FilterKind::Psi, 0.0),
                _ => (FilterKind::PsiTilde, y),
            };
            let mut sink = Sink::new(grid, functional, e.q)?;
            for j in lp_levels(&grid, kind, top) {
                let piece = bank.level_values(kind, j, shift)?;
                sink.push(j, piece.iter().map(|v| v.norm()).collect());
            }
            sink.finish(e.p)
        }
    }
}
