//! Density samples on a uniform grid, single frames and uniform time series.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::Grid1D;
use crate::wavefunction::WavefunctionModel;

/// Validation thresholds applied to every frame and series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityTolerances {
    /// Largest allowed boundary value relative to the frame maximum.
    pub boundary: f64,
    /// Largest allowed absolute drift of a frame's mass from frame 0.
    pub mass: f64,
}

impl Default for DensityTolerances {
    fn default() -> Self {
        Self {
            boundary: 1e-8,
            mass: 1e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityFrame {
    grid: Grid1D,
    t: f64,
    values: Vec<f64>,
}

impl DensityFrame {
    pub fn new(grid: Grid1D, t: f64, values: Vec<f64>, tol: &DensityTolerances) -> Result<Self> {
        Self::validated(grid, t, values, tol, 0)
    }

    fn validated(
        grid: Grid1D,
        t: f64,
        values: Vec<f64>,
        tol: &DensityTolerances,
        frame: usize,
    ) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::InvalidInput(format!("frame {frame}: time {t} is not finite")));
        }
        if values.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "frame {frame}: {} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some((node, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::InvalidDensity { frame, node, value });
        }
        let peak = values.iter().copied().fold(0.0, f64::max);
        if peak == 0.0 {
            return Err(Error::InvalidInput(format!(
                "frame {frame}: density is identically zero"
            )));
        }
        for (side, v) in [("lower", values[0]), ("upper", values[values.len() - 1])] {
            let ratio = v / peak;
            if ratio > tol.boundary {
                return Err(Error::BoundaryViolation {
                    side,
                    t,
                    ratio,
                    tolerance: tol.boundary,
                });
            }
        }
        Ok(Self { grid, t, values })
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Trapezoid integral over the grid.
    pub fn mass(&self) -> f64 {
        trapezoid(&self.values, self.grid.dx())
    }

    /// Linear interpolation between nodes.
    pub fn value_at(&self, x: f64) -> Result<f64> {
        let (k, offset) = self.grid.locate(x)?;
        let w = offset / self.grid.dx();
        Ok(self.values[k] * (1.0 - w) + self.values[k + 1] * w)
    }
}

pub(crate) fn trapezoid(values: &[f64], dx: f64) -> f64 {
    let interior: f64 = values[1..values.len() - 1].iter().sum();
    dx * (interior + 0.5 * (values[0] + values[values.len() - 1]))
}

/// Frames on one grid at uniformly spaced times `t_0 + n·dt`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensitySeries {
    grid: Grid1D,
    dt: f64,
    frames: Vec<DensityFrame>,
}

impl DensitySeries {
    /// Checks grid sharing, uniform spacing against `dt` and mass drift.
    /// A single-frame series carries `dt` unchecked.
    pub fn new(frames: Vec<DensityFrame>, dt: f64, tol: &DensityTolerances) -> Result<Self> {
        let first = frames
            .first()
            .ok_or_else(|| Error::InsufficientData("a series needs at least one frame".into()))?;
        let grid = first.grid;
        let t0 = first.t;
        if frames.len() > 1 && !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidInput(format!("dt must be positive, got {dt}")));
        }
        let mass0 = first.mass();
        for (i, f) in frames.iter().enumerate() {
            if f.grid != grid {
                return Err(Error::Configuration(format!(
                    "frame {i} is on a different grid than frame 0"
                )));
            }
            let expected = t0 + i as f64 * dt;
            if (f.t - expected).abs() > 1e-9 * f.t.abs().max(dt) {
                return Err(Error::Format {
                    line: i + 2,
                    message: format!(
                        "frame {i} at t={} breaks uniform spacing dt={dt} (expected {expected})",
                        f.t
                    ),
                });
            }
            let mass = f.mass();
            let drift = (mass - mass0).abs();
            if drift > tol.mass {
                return Err(Error::Conservation {
                    frame: i,
                    mass,
                    drift,
                    tolerance: tol.mass,
                });
            }
        }
        Ok(Self { grid, dt, frames })
    }

    /// Validates raw rows: `(t, values)` per frame.
    pub fn from_rows(
        grid: Grid1D,
        dt: f64,
        rows: Vec<(f64, Vec<f64>)>,
        tol: &DensityTolerances,
    ) -> Result<Self> {
        let frames = rows
            .into_iter()
            .enumerate()
            .map(|(i, (t, values))| DensityFrame::validated(grid, t, values, tol, i))
            .collect::<Result<Vec<_>>>()?;
        Self::new(frames, dt, tol)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn frames(&self) -> &[DensityFrame] {
        &self.frames
    }

    pub fn frame(&self, i: usize) -> Option<&DensityFrame> {
        self.frames.get(i)
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.frames.iter().map(|f| f.t).collect()
    }

    /// Per-node `∂ρ/∂t` at `frame_index`: central differences inside the
    /// series, second-order one-sided differences at its ends.
    pub fn time_derivative(&self, frame_index: usize) -> Result<Vec<f64>> {
        let n = self.frames.len();
        if n < 3 {
            return Err(Error::InsufficientData(format!(
                "time derivative needs at least 3 frames, series has {n}"
            )));
        }
        if frame_index >= n {
            return Err(Error::Range {
                value: frame_index as f64,
                range: format!("frame index 0..{n}"),
            });
        }
        let v = |i: usize| self.frames[i].values();
        let h2 = 2.0 * self.dt;
        let out = match frame_index {
            0 => izip3(v(0), v(1), v(2), |a, b, c| (-3.0 * a + 4.0 * b - c) / h2),
            i if i == n - 1 => izip3(v(i), v(i - 1), v(i - 2), |a, b, c| {
                (3.0 * a - 4.0 * b + c) / h2
            }),
            i => v(i + 1)
                .iter()
                .zip(v(i - 1))
                .map(|(p, m)| (p - m) / h2)
                .collect(),
        };
        Ok(out)
    }
}

fn izip3(a: &[f64], b: &[f64], c: &[f64], f: impl Fn(f64, f64, f64) -> f64) -> Vec<f64> {
    a.iter()
        .zip(b)
        .zip(c)
        .map(|((a, b), c)| f(*a, *b, *c))
        .collect()
}

/// Samples `|ψ|²` of `model` on `grid` at each of `times`.
pub fn sample_model(
    model: &WavefunctionModel,
    grid: Grid1D,
    times: &[f64],
    tol: &DensityTolerances,
    exec: Execution,
) -> Result<DensitySeries> {
    if times.is_empty() {
        return Err(Error::InsufficientData("no sample times given".into()));
    }
    let dt = if times.len() > 1 { times[1] - times[0] } else { 0.0 };
    let frames = exec.try_map_range(times.len(), |i| {
        let t = times[i];
        let values = grid
            .nodes()
            .map(|x| model.density(x, t))
            .collect::<Result<Vec<_>>>()?;
        DensityFrame::validated(grid, t, values, tol, i)
    })?;
    DensitySeries::new(frames, dt, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::time_grid;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn uniform_unit(frames: usize) -> DensitySeries {
        let grid = Grid1D::new(0.0, 1.0, 5).unwrap();
        let tol = DensityTolerances {
            boundary: 1.0,
            ..Default::default()
        };
        let rows = (0..frames).map(|i| (i as f64 * 0.1, vec![1.0; 5])).collect();
        DensitySeries::from_rows(grid, 0.1, rows, &tol).unwrap()
    }

    #[test]
    fn free_gaussian_sample_peaks_at_one() {
        let m = WavefunctionModel::free_gaussian(PI / 2.0).unwrap();
        let grid = Grid1D::new(-5.0, 5.0, 51).unwrap();
        let s = sample_model(&m, grid, &[0.0], &Default::default(), Execution::Serial).unwrap();
        assert_eq!(s.len(), 1);
        assert_relative_eq!(s.frames()[0].values()[25], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn harmonic_defaults_conserve_mass() {
        let m = WavefunctionModel::harmonic(3.0).unwrap();
        let d = m.defaults();
        let grid = Grid1D::with_spacing(d.x_min, d.x_max, d.dx).unwrap();
        let times = time_grid(d.t_max, d.dt).unwrap();
        let s = sample_model(&m, grid, &times, &Default::default(), Execution::default()).unwrap();
        assert_eq!(s.len(), 31);
        for f in s.frames() {
            assert!((f.mass() - 1.0).abs() < 1e-4, "t={} mass={}", f.t(), f.mass());
        }
    }

    #[test]
    fn narrow_grid_is_a_boundary_violation() {
        let m = WavefunctionModel::free_gaussian(PI / 2.0).unwrap();
        let grid = Grid1D::new(-0.5, 0.5, 21).unwrap();
        let err = sample_model(&m, grid, &[0.0], &Default::default(), Execution::Serial).unwrap_err();
        assert!(matches!(err, Error::BoundaryViolation { .. }), "{err}");
    }

    #[test]
    fn uniform_density_has_unit_mass() {
        let s = uniform_unit(5);
        for f in s.frames() {
            assert_relative_eq!(f.mass(), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn negative_values_are_rejected() {
        let grid = Grid1D::new(0.0, 1.0, 5).unwrap();
        let err = DensityFrame::new(grid, 0.0, vec![0.0, 1.0, -1e-9, 1.0, 0.0], &Default::default())
            .unwrap_err();
        assert!(matches!(err, Error::InvalidDensity { node: 2, .. }));
    }

    #[test]
    fn mass_drift_is_rejected() {
        let grid = Grid1D::new(0.0, 1.0, 5).unwrap();
        let rows = vec![
            (0.0, vec![0.0, 1.0, 2.0, 1.0, 0.0]),
            (1.0, vec![0.0, 1.0, 2.1, 1.0, 0.0]),
        ];
        let err = DensitySeries::from_rows(grid, 1.0, rows, &Default::default()).unwrap_err();
        assert!(matches!(err, Error::Conservation { frame: 1, .. }));
    }

    #[test]
    fn non_uniform_times_are_rejected() {
        let grid = Grid1D::new(0.0, 1.0, 5).unwrap();
        let v = vec![0.0, 1.0, 2.0, 1.0, 0.0];
        let rows = vec![(0.0, v.clone()), (1.0, v.clone()), (2.5, v)];
        let err = DensitySeries::from_rows(grid, 1.0, rows, &Default::default()).unwrap_err();
        assert!(matches!(err, Error::Format { .. }));
    }

    #[test]
    fn stationary_derivative_is_zero() {
        let s = uniform_unit(4);
        for i in 0..4 {
            assert!(s.time_derivative(i).unwrap().iter().all(|&d| d == 0.0));
        }
    }

    #[test]
    fn derivative_is_exact_for_linear_growth() {
        let grid = Grid1D::new(0.0, 1.0, 5).unwrap();
        let c = [0.5, 1.5, 2.0, 1.5, 0.5];
        let tol = DensityTolerances {
            boundary: 1.0,
            mass: 10.0,
        };
        let rows = (0..5)
            .map(|i| {
                let t = 1.0 + i as f64 * 0.25;
                (t, c.iter().map(|ci| ci * t).collect())
            })
            .collect();
        let s = DensitySeries::from_rows(grid, 0.25, rows, &tol).unwrap();
        for i in 0..5 {
            for (d, ci) in s.time_derivative(i).unwrap().iter().zip(c) {
                assert_relative_eq!(*d, ci, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn derivative_needs_three_frames() {
        let s = uniform_unit(2);
        assert!(matches!(s.time_derivative(0), Err(Error::InsufficientData(_))));
    }

    /// ∂|ψ|²/∂t for the free Gaussian, differentiated by hand.
    fn free_density_rate(a: f64, x: f64, t: f64) -> f64 {
        let beta = 2.0 * a;
        let s2 = 1.0 + beta * beta * t * t;
        let rho = (2.0 * a / PI).sqrt() / s2.sqrt() * (-2.0 * a * x * x / s2).exp();
        let ds2 = 2.0 * beta * beta * t;
        rho * (-0.5 * ds2 / s2 + 2.0 * a * x * x * ds2 / (s2 * s2))
    }

    fn free_derivative_error(dt: f64) -> f64 {
        let a = PI / 2.0;
        let m = WavefunctionModel::free_gaussian(a).unwrap();
        let grid = Grid1D::with_spacing(-10.0, 10.0, 0.1).unwrap();
        let times = time_grid(1.0, dt).unwrap();
        let s = sample_model(&m, grid, &times, &Default::default(), Execution::Serial).unwrap();
        let mut worst: f64 = 0.0;
        for (i, t) in times.iter().enumerate() {
            let d = s.time_derivative(i).unwrap();
            for (x, di) in grid.nodes().zip(d) {
                worst = worst.max((di - free_density_rate(a, x, *t)).abs());
            }
        }
        worst
    }

    #[test]
    fn derivative_converges_at_second_order() {
        let e1 = free_derivative_error(0.02);
        let e2 = free_derivative_error(0.01);
        let ratio = e1 / e2;
        assert!(e1 < 5e-2, "error {e1}");
        assert!((3.5..4.6).contains(&ratio), "ratio {ratio}");
    }
}
