use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

/// Uniform 1D grid of `n_nodes` equally spaced nodes spanning `[x_min, x_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    x_min: f64,
    x_max: f64,
    n_nodes: usize,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n_nodes: usize) -> Result<Self> {
        ensure_finite("x_min", x_min)?;
        ensure_finite("x_max", x_max)?;
        if x_max <= x_min {
            return Err(Error::InvalidInput(format!(
                "grid requires x_max > x_min, got [{x_min}, {x_max}]"
            )));
        }
        if n_nodes < 3 {
            return Err(Error::InvalidInput(format!(
                "grid requires at least 3 nodes, got {n_nodes}"
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            n_nodes,
        })
    }

    /// Grid with spacing `dx`, which must divide the range into a whole
    /// number of cells to 1e-5 relative; the spacing is then adjusted to fit
    /// exactly.
    pub fn with_spacing(x_min: f64, x_max: f64, dx: f64) -> Result<Self> {
        ensure_finite("dx", dx)?;
        if dx <= 0.0 {
            return Err(Error::InvalidInput(format!("dx must be positive, got {dx}")));
        }
        let span = x_max - x_min;
        let cells = (span / dx).round();
        if cells < 2.0 || ((cells * dx - span) / span).abs() > 1e-5 {
            return Err(Error::InvalidInput(format!(
                "dx={dx} does not divide [{x_min}, {x_max}] into at least two whole cells"
            )));
        }
        Self::new(x_min, x_max, cells as usize + 1)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n_nodes
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_nodes - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.n_nodes - 1 {
            self.x_max
        } else {
            self.x_min + i as f64 * self.dx()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_nodes).map(move |i| self.node(i))
    }

    pub fn contains(&self, x: f64) -> bool {
        (self.x_min..=self.x_max).contains(&x)
    }

    /// Segment index `k` with `x ∈ [x_k, x_{k+1}]` and the offset `x - x_k`.
    pub fn locate(&self, x: f64) -> Result<(usize, f64)> {
        if !self.contains(x) {
            return Err(Error::Range {
                value: x,
                range: format!("[{}, {}]", self.x_min, self.x_max),
            });
        }
        let k = (((x - self.x_min) / self.dx()).floor() as usize).min(self.n_nodes - 2);
        Ok((k, x - self.node(k)))
    }
}

/// Sample times `n·dt` for `n = 0, 1, …` up to `t_max`.
pub fn time_grid(t_max: f64, dt: f64) -> Result<Vec<f64>> {
    ensure_finite("t_max", t_max)?;
    ensure_finite("dt", dt)?;
    if dt <= 0.0 || t_max < 0.0 {
        return Err(Error::InvalidInput(format!(
            "time grid requires dt > 0 and t_max >= 0, got dt={dt}, t_max={t_max}"
        )));
    }
    let steps = (t_max / dt + 1e-9).floor() as usize;
    Ok((0..=steps).map(|n| n as f64 * dt).collect())
}
