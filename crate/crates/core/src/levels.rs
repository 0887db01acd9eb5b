use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};

/// Finite family `{f_k}` for consecutive levels `k_min..=k_max` on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelFamily {
    grid: Grid,
    k_min: i32,
    functions: Vec<GridFunction>,
}

impl LevelFamily {
    pub fn new(k_min: i32, functions: Vec<GridFunction>) -> Result<LevelFamily> {
        let first = functions.first().ok_or(Error::Empty("level family"))?;
        let grid = *first.grid();
        for f in &functions {
            grid.ensure_same(f.grid())?;
        }
        Ok(LevelFamily {
            grid,
            k_min,
            functions,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn k_min(&self) -> i32 {
        self.k_min
    }

    pub fn k_max(&self) -> i32 {
        self.k_min + self.functions.len() as i32 - 1
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn functions(&self) -> &[GridFunction] {
        &self.functions
    }

    pub fn level(&self, k: i32) -> Option<&GridFunction> {
        usize::try_from(k - self.k_min)
            .ok()
            .and_then(|i| self.functions.get(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, &GridFunction)> {
        self.functions
            .iter()
            .enumerate()
            .map(move |(i, f)| (self.k_min + i as i32, f))
    }

    /// Applies `op` level by level, keeping the level indices.
    pub fn map(&self, mut op: impl FnMut(i32, &GridFunction) -> Result<GridFunction>) -> Result<LevelFamily> {
        let functions = self
            .iter()
            .map(|(k, f)| op(k, f))
            .collect::<Result<Vec<_>>>()?;
        LevelFamily::new(self.k_min, functions)
    }
}
