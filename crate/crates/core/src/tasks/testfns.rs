use std::f64::consts::{E, PI};

use serde::{Deserialize, Serialize};

use crate::graph::{Grid2d, NodeId};
use crate::{Error, Result};

pub fn ackley(x: f64, y: f64) -> f64 {
    -20.0 * (-0.2 * (0.5 * (x * x + y * y)).sqrt()).exp() - (0.5 * ((2.0 * PI * x).cos() + (2.0 * PI * y).cos())).exp()
        + 20.0
        + E
}

pub fn rosenbrock(x: f64, y: f64) -> f64 {
    100.0 * (y - x * x).powi(2) + (x - 1.0).powi(2)
}

/// Square domain `[lo, hi]²` onto which grid coordinates are mapped.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridBox {
    pub lo: f64,
    pub hi: f64,
}

impl GridBox {
    pub const ACKLEY: GridBox = GridBox { lo: -5.0, hi: 5.0 };
    pub const ROSENBROCK: GridBox = GridBox { lo: -2.0, hi: 2.0 };

    /// Affine map of grid index `i ∈ 0..side` onto the box.
    pub fn map(&self, i: usize, side: usize) -> f64 {
        self.lo + (self.hi - self.lo) * i as f64 / (side - 1) as f64
    }
}

/// Evaluates `f(x, y)` at every grid node, with rows along `x` and columns
/// along `y`.
pub fn grid_function_values(grid: Grid2d, domain: GridBox, f: impl Fn(f64, f64) -> f64) -> Result<Vec<f64>> {
    if grid.side < 2 {
        return Err(Error::Input("grid side must be at least 2".into()));
    }
    if !(domain.lo < domain.hi) {
        return Err(Error::Input("grid box needs lo < hi".into()));
    }
    Ok((0..grid.side * grid.side)
        .map(|v| {
            let (r, c) = grid.coord(NodeId::from(v));
            f(domain.map(r, grid.side), domain.map(c, grid.side))
        })
        .collect())
}
