//! Trapezoid cumulative probability tables and their inversion.
//!
//! Between nodes the density is taken as linear, so the area to the left of
//! `x_k + s` inside segment `k` is `v_k s + (v_{k+1} - v_k) s² / (2Δx)`.
//! [`Inversion::Quadratic`] solves that area equation exactly;
//! [`Inversion::Linear`] interpolates the node values of the table instead.
//! [`CpfTable::cpf_at`] evaluates the same local model, so the two
//! directions are exact inverses of each other.

use serde::{Deserialize, Serialize};

use crate::density::DensityFrame;
use crate::error::{ensure_finite, Error, Result};
use crate::grid::Grid1D;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Inversion {
    #[default]
    Quadratic,
    Linear,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CpfOptions {
    pub inversion: Inversion,
    /// Scale requested probabilities by the table's total mass.
    pub renormalize: bool,
    /// Segments whose mass is below this are flat; inversion returns their midpoint.
    pub flat_epsilon: f64,
}

impl Default for CpfOptions {
    fn default() -> Self {
        Self {
            inversion: Inversion::Quadratic,
            renormalize: true,
            flat_epsilon: 1e-14,
        }
    }
}

/// Slopes below this fraction of the peak density use the linear solve.
const SLOPE_CUTOFF: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct CpfTable {
    grid: Grid1D,
    t: f64,
    density: Vec<f64>,
    cumulative: Vec<f64>,
    slope_floor: f64,
    options: CpfOptions,
}

impl CpfTable {
    pub fn build(frame: &DensityFrame, options: CpfOptions) -> Self {
        Self::assemble(*frame.grid(), frame.t(), frame.values().to_vec(), options)
    }

    /// Table from raw node densities, without the boundary checks a
    /// [`DensityFrame`] applies.
    pub fn from_values(grid: Grid1D, t: f64, values: Vec<f64>, options: CpfOptions) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some((node, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::InvalidDensity {
                frame: 0,
                node,
                value,
            });
        }
        if values.iter().all(|v| *v == 0.0) {
            return Err(Error::InvalidInput("density is identically zero".into()));
        }
        Ok(Self::assemble(grid, t, values, options))
    }

    fn assemble(grid: Grid1D, t: f64, density: Vec<f64>, options: CpfOptions) -> Self {
        let half_dx = 0.5 * grid.dx();
        let mut cumulative = Vec::with_capacity(density.len());
        let mut acc = 0.0;
        cumulative.push(acc);
        for w in density.windows(2) {
            acc += half_dx * (w[0] + w[1]);
            cumulative.push(acc);
        }
        let peak = density.iter().copied().fold(0.0, f64::max);
        Self {
            grid,
            t,
            density,
            cumulative,
            slope_floor: SLOPE_CUTOFF * peak,
            options,
        }
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn options(&self) -> &CpfOptions {
        &self.options
    }

    /// `C_{n-1}`, the trapezoid mass of the whole frame.
    pub fn total(&self) -> f64 {
        self.cumulative[self.cumulative.len() - 1]
    }

    fn scale(&self) -> f64 {
        if self.options.renormalize {
            self.total()
        } else {
            1.0
        }
    }

    fn is_quadratic(&self, k: usize) -> bool {
        self.options.inversion == Inversion::Quadratic
            && (self.density[k + 1] - self.density[k]).abs() >= self.slope_floor
    }

    /// Position whose left mass is `p`.
    pub fn invert(&self, p: f64) -> Result<f64> {
        ensure_finite("P", p)?;
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Range {
                value: p,
                range: "(0, 1)".into(),
            });
        }
        let target = p * self.scale();
        let total = self.total();
        if target > total {
            return Err(Error::Coverage { p, mass: total });
        }
        let c = &self.cumulative;
        let k = c.partition_point(|&ci| ci < target).clamp(1, c.len() - 1) - 1;
        let dx = self.grid.dx();
        let x_k = self.grid.node(k);
        let rise = c[k + 1] - c[k];
        if rise < self.options.flat_epsilon {
            return Ok(x_k + 0.5 * dx);
        }
        // Targets within rounding of a node value resolve to the node, so a
        // zero-density node at a symmetry point is hit exactly.
        let snap = 4.0 * f64::EPSILON * total;
        if target - c[k] <= snap {
            return Ok(x_k);
        }
        if c[k + 1] - target <= snap {
            return Ok(self.grid.node(k + 1));
        }
        let tau = target - c[k];
        let s = if self.is_quadratic(k) {
            let v0 = self.density[k];
            let slope = self.density[k + 1] - v0;
            let disc = (v0 * v0 + 2.0 * slope * tau / dx).max(0.0);
            2.0 * tau / (v0 + disc.sqrt())
        } else {
            dx * tau / rise
        };
        Ok(x_k + s.clamp(0.0, dx))
    }

    /// Left mass at `x`, normalized when `renormalize` is set.
    pub fn cpf_at(&self, x: f64) -> Result<f64> {
        ensure_finite("x", x)?;
        let (k, s) = self.grid.locate(x)?;
        let c = &self.cumulative;
        let dx = self.grid.dx();
        let local = if self.is_quadratic(k) {
            let v0 = self.density[k];
            let slope = self.density[k + 1] - v0;
            v0 * s + 0.5 * slope * s * s / dx
        } else {
            (c[k + 1] - c[k]) * s / dx
        };
        Ok((c[k] + local).clamp(c[k], c[k + 1]) / self.scale())
    }
}
