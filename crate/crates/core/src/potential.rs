//! Potential energy functions evaluated on the position grid.

use std::path::Path;

use crate::error::{CoreError, Result};
use crate::grid::{build_grids, GridSpec};

/// The potential families used in the experiments, in atomic units.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    /// No potential: a freely moving particle.
    Free,
    /// Harmonic well `c1·x²` (one dimension).
    Harmonic { c1: f64 },
    /// Eckart barrier `c2 / cosh²(c3·x)` (one dimension).
    Eckart { c2: f64, c3: f64 },
    /// Mexican hat `c4·r⁴ − c5·r²` with `r² = x² + y²` (two dimensions).
    MexicanHat { c4: f64, c5: f64 },
    /// Arbitrary values tabulated over the total grid, in index order.
    Tabulated { values: Vec<f64> },
}

impl PotentialSpec {
    /// Loads a tabulated potential from a two-column text file
    /// (grid index, value); blank lines and `#` comments are skipped.
    pub fn tabulated_from_file(path: &Path, total_points: usize) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut values = vec![f64::NAN; total_points];
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split_whitespace();
            let missing = || CoreError::MalformedFile(format!("line {}: missing column", lineno + 1));
            let index: usize = cols.next().ok_or_else(missing)?
                .parse()
                .map_err(|e| CoreError::MalformedFile(format!("line {}: {e}", lineno + 1)))?;
            let value: f64 = cols.next().ok_or_else(missing)?
                .parse()
                .map_err(|e| CoreError::MalformedFile(format!("line {}: {e}", lineno + 1)))?;
            if index >= total_points {
                return Err(CoreError::MalformedFile(format!(
                    "line {}: index {index} out of range for {total_points} grid points",
                    lineno + 1
                )));
            }
            values[index] = value;
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(CoreError::MalformedFile("not every grid point has a value".into()));
        }
        Ok(PotentialSpec::Tabulated { values })
    }

    /// Evaluates the potential at every point of the grid, in total-index
    /// order (dimension 0 in the lowest-order bits).
    pub fn values_on_grid(&self, spec: &GridSpec) -> Result<Vec<f64>> {
        let total = spec.total_points();
        match self {
            PotentialSpec::Free => Ok(vec![0.0; total]),
            PotentialSpec::Harmonic { c1 } => {
                self.require_dims(spec, 1)?;
                let grids = build_grids(spec)?;
                Ok(grids.positions[0].iter().map(|&x| c1 * x * x).collect())
            }
            PotentialSpec::Eckart { c2, c3 } => {
                self.require_dims(spec, 1)?;
                let grids = build_grids(spec)?;
                Ok(grids.positions[0].iter().map(|&x| c2 / (c3 * x).cosh().powi(2)).collect())
            }
            PotentialSpec::MexicanHat { c4, c5 } => {
                self.require_dims(spec, 2)?;
                let grids = build_grids(spec)?;
                Ok((0..total)
                    .map(|idx| {
                        let parts = spec.split_index(idx);
                        let x = grids.positions[0][parts[0]];
                        let y = grids.positions[1][parts[1]];
                        let r2 = x * x + y * y;
                        c4 * r2 * r2 - c5 * r2
                    })
                    .collect())
            }
            PotentialSpec::Tabulated { values } => {
                if values.len() != total {
                    return Err(CoreError::InvalidSpec(format!(
                        "tabulated potential has {} values but the grid has {total} points",
                        values.len()
                    )));
                }
                Ok(values.clone())
            }
        }
    }

    fn require_dims(&self, spec: &GridSpec, dims: usize) -> Result<()> {
        if spec.num_dims != dims {
            return Err(CoreError::InvalidSpec(format!(
                "{self:?} is defined for {dims}-dimensional grids, got {}",
                spec.num_dims
            )));
        }
        Ok(())
    }
}
