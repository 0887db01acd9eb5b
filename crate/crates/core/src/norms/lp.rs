use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::grid::{Grid, GridFunction};
use crate::levels::LevelFamily;

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0) {
        return Err(Error::Parameter(format!("p must be positive, got {p}")));
    }
    Ok(())
}

/// `(h * sum m_i^p)^{1/p}` for nonnegative samples `m_i`; `max` when `p = inf`.
pub fn lp_of_moduli(grid: &Grid, moduli: &[f64], p: f64) -> Result<f64> {
    check_p(p)?;
    if p.is_infinite() {
        return Ok(moduli.iter().cloned().fold(0.0, f64::max));
    }
    let sum: f64 = if p == 1.0 {
        moduli.iter().sum()
    } else {
        moduli.iter().map(|m| m.powf(p)).sum()
    };
    Ok((grid.spacing() * sum).powf(1.0 / p))
}

pub fn lp_norm(f: &GridFunction, p: f64) -> Result<f64> {
    lp_of_moduli(f.grid(), &f.moduli(), p)
}

/// Running pointwise `sum_k |f_k|^q` (or `max_k |f_k|` for `q = inf`).
#[derive(Debug, Clone)]
pub struct MixedAccumulator {
    grid: Grid,
    q: f64,
    acc: Vec<f64>,
    levels: usize,
}

impl MixedAccumulator {
    pub fn new(grid: Grid, q: f64) -> Result<Self> {
        check_p(q)?;
        Ok(MixedAccumulator { grid, q, acc: vec![0.0; grid.samples()], levels: 0 })
    }

    pub fn add_moduli(&mut self, moduli: impl IntoIterator<Item = f64>) {
        let q = self.q;
        for (a, m) in self.acc.iter_mut().zip(moduli) {
            if q.is_infinite() {
                *a = a.max(m);
            } else if q == 1.0 {
                *a += m;
            } else {
                *a += m.powf(q);
            }
        }
        self.levels += 1;
    }

    pub fn add(&mut self, f: &GridFunction) -> Result<()> {
        self.grid.ensure_same(f.grid())?;
        self.add_moduli(f.values().iter().map(|v| v.norm()));
        Ok(())
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    /// Pointwise `l^q` norms.
    pub fn pointwise(&self) -> Vec<f64> {
        if self.q.is_infinite() || self.q == 1.0 {
            self.acc.clone()
        } else {
            self.acc.iter().map(|a| a.powf(1.0 / self.q)).collect()
        }
    }

    pub fn finish(&self, p: f64) -> Result<f64> {
        if self.levels == 0 {
            return Err(Error::Empty("level family"));
        }
        check_p(p)?;
        if p.is_infinite() || self.q.is_infinite() {
            return lp_of_moduli(&self.grid, &self.pointwise(), p);
        }
        let ratio = p / self.q;
        let sum: f64 = if ratio == 1.0 {
            self.acc.iter().sum()
        } else {
            self.acc.iter().map(|a| a.powf(ratio)).sum()
        };
        Ok((self.grid.spacing() * sum).powf(1.0 / p))
    }
}

/// `|| { f_k } ||_{L^p(l^q)}`.
pub fn mixed_norm(family: &LevelFamily, p: f64, q: f64) -> Result<f64> {
    let mut acc = MixedAccumulator::new(*family.grid(), q)?;
    for f in family.functions() {
        acc.add(f)?;
    }
    acc.finish(p)
}

/// `sup_a a * |{ |f| > a }|`, exact via order statistics.
pub fn weak_l1_of_moduli(grid: &Grid, moduli: &[f64]) -> f64 {
    let mut sorted = moduli.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    sorted
        .iter()
        .enumerate()
        .map(|(i, v)| v * (i + 1) as f64 * grid.spacing())
        .fold(0.0, f64::max)
}

pub fn weak_l1_norm(f: &GridFunction) -> f64 {
    weak_l1_of_moduli(f.grid(), &f.moduli())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormVariant {
    Strong,
    WeakL1,
    Carleson,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedNormSpec {
    pub p: Exponent,
    pub q: Exponent,
    pub variant: NormVariant,
}

impl MixedNormSpec {
    pub fn validate(&self) -> Result<()> {
        match self.variant {
            NormVariant::WeakL1 if self.p.value() != 1.0 => Err(Error::Parameter(
                "the weak-L1 variant requires p = 1".into(),
            )),
            NormVariant::Carleson if self.q.is_infinite() => Err(Error::Parameter(
                "the Carleson variant requires finite q".into(),
            )),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormMetadata {
    pub grid: Grid,
    pub k_min: i32,
    pub k_max: i32,
    /// Side length of the largest dyadic cube available (the torus).
    pub truncation_side: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub value: f64,
    pub spec: MixedNormSpec,
    pub metadata: NormMetadata,
}

pub fn evaluate(family: &LevelFamily, spec: MixedNormSpec) -> Result<NormReport> {
    spec.validate()?;
    let value = match spec.variant {
        NormVariant::Strong => mixed_norm(family, spec.p.value(), spec.q.value())?,
        NormVariant::WeakL1 => {
            let mut acc = MixedAccumulator::new(*family.grid(), spec.q.value())?;
            for f in family.functions() {
                acc.add(f)?;
            }
            weak_l1_of_moduli(family.grid(), &acc.pointwise())
        }
        NormVariant::Carleson => super::carleson::carleson_norm(family, spec.q.value())?,
    };
    Ok(NormReport {
        value,
        spec,
        metadata: NormMetadata {
            grid: *family.grid(),
            k_min: family.k_min(),
            k_max: family.k_max(),
            truncation_side: family.grid().length(),
        },
    })
}
