use serde::{Deserialize, Serialize};

use super::domain::{Domain, Grid};
use crate::error::{Error, Result};

/// Strictly positive function on the domain: a constant, or piecewise-constant
/// over a [`Grid`]. Used for the concentration `c(ω)` and the scale `θ(ω)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DomainFunction {
    Constant(f64),
    Piecewise { grid: Grid, values: Vec<f64> },
}

fn check_positive(v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("function values must be finite and positive, got {v}")))
    }
}

impl DomainFunction {
    pub fn constant(value: f64) -> Result<Self> {
        check_positive(value)?;
        Ok(Self::Constant(value))
    }

    pub fn piecewise(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.cell_count() {
            return Err(Error::Parameter(format!(
                "{} values for a partition with {} cells",
                values.len(),
                grid.cell_count()
            )));
        }
        values.iter().try_for_each(|v| check_positive(*v))?;
        Ok(Self::Piecewise { grid, values })
    }

    /// Piecewise-constant on `values.len()` equal cells of a one-dimensional domain.
    pub fn equal_cells(domain: &Domain, values: Vec<f64>) -> Result<Self> {
        if values.len() == 1 {
            return Self::constant(values[0]);
        }
        let grid = Grid::equal_cells(domain, &[values.len()])?;
        Self::piecewise(grid, values)
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        match self {
            Self::Constant(v) => *v,
            Self::Piecewise { grid, values } => values[grid.locate(point)],
        }
    }

    pub fn grid(&self) -> Option<&Grid> {
        match self {
            Self::Constant(_) => None,
            Self::Piecewise { grid, .. } => Some(grid),
        }
    }

    /// The value, if the function takes a single value everywhere.
    pub fn as_constant(&self) -> Option<f64> {
        match self {
            Self::Constant(v) => Some(*v),
            Self::Piecewise { values, .. } => {
                let first = values[0];
                values.iter().all(|v| *v == first).then_some(first)
            }
        }
    }

    /// Distinct values the function takes.
    pub fn values(&self) -> Vec<f64> {
        let mut vals = match self {
            Self::Constant(v) => vec![*v],
            Self::Piecewise { values, .. } => values.clone(),
        };
        vals.sort_by(f64::total_cmp);
        vals.dedup();
        vals
    }

    /// Pointwise `g ∘ f` on the same partition. `g` must map positive reals to positive reals.
    pub fn map(&self, g: impl Fn(f64) -> f64) -> Self {
        match self {
            Self::Constant(v) => Self::Constant(g(*v)),
            Self::Piecewise { grid, values } => Self::Piecewise {
                grid: grid.clone(),
                values: values.iter().map(|v| g(*v)).collect(),
            },
        }
    }

    pub(crate) fn check_domain(&self, domain: &Domain) -> Result<()> {
        if let Self::Piecewise { grid, .. } = self {
            let trivial = Grid::trivial(domain);
            let fits = grid.dim() == domain.dim()
                && grid
                    .breaks()
                    .iter()
                    .zip(trivial.breaks())
                    .all(|(b, t)| b[0] == t[0] && b[b.len() - 1] == t[1]);
            if !fits {
                return Err(Error::Domain("function partition does not cover the measure's domain".into()));
            }
        }
        Ok(())
    }
}
