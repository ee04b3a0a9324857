//! Trajectories that keep the probability to their left constant.
//!
//! A trajectory with left mass `P` sits at the `P`-quantile of every frame,
//! so it is found by inverting each frame's cumulative table rather than by
//! stepping a velocity field. [`density_velocity`] gives the matching
//! velocity, `ẋ = -(1/ρ) ∫_{x_min}^{x} ∂ρ/∂t dx'`, for diagnostics.

use serde::{Deserialize, Serialize};

use crate::cpf::{CpfOptions, CpfTable};
use crate::density::{DensityFrame, DensitySeries};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::trajectory::{Trajectory, TrajectoryLabel};

/// Seed of a quantile trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuantileSpec {
    /// Conserved left mass; the right mass is `1 - P`.
    Probability(f64),
    /// Position at the first frame, converted to `P` there.
    InitialPosition(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    pub cpf: CpfOptions,
    /// Densities at or below this fraction of the frame maximum are nodal.
    pub velocity_floor: f64,
    pub drift_tolerance: f64,
    pub execution: Execution,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            cpf: CpfOptions::default(),
            velocity_floor: 1e-12,
            drift_tolerance: 1e-6,
            execution: Execution::default(),
        }
    }
}

/// Left mass of `x0` in `frame0`.
pub fn p_from_x0(frame0: &DensityFrame, x0: f64, opts: &SolverOptions) -> Result<f64> {
    let local = frame0.value_at(x0)?;
    if local <= opts.velocity_floor * frame0.max_value() {
        return Err(Error::DegenerateStart { x0 });
    }
    let p = CpfTable::build(frame0, opts.cpf).cpf_at(x0)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::DegenerateStart { x0 });
    }
    Ok(p)
}

fn resolve(series: &DensitySeries, spec: QuantileSpec, opts: &SolverOptions) -> Result<f64> {
    match spec {
        QuantileSpec::Probability(p) => {
            if p > 0.0 && p < 1.0 {
                Ok(p)
            } else {
                Err(Error::Range {
                    value: p,
                    range: "(0, 1)".into(),
                })
            }
        }
        QuantileSpec::InitialPosition(x0) => p_from_x0(&series.frames()[0], x0, opts),
    }
}

/// One cumulative table per frame.
pub fn build_tables(series: &DensitySeries, opts: &SolverOptions) -> Vec<CpfTable> {
    opts.execution
        .map(series.frames(), |f| CpfTable::build(f, opts.cpf))
}

fn trace(tables: &[CpfTable], p: f64) -> Result<Trajectory> {
    let mut traj = Trajectory::empty_1d(TrajectoryLabel::Quantile { p });
    for (i, table) in tables.iter().enumerate() {
        let x = table.invert(p).map_err(|e| e.at_frame(i))?;
        traj.push_1d(table.t(), x);
    }
    Ok(traj)
}

pub fn quantile_trajectory(
    series: &DensitySeries,
    spec: QuantileSpec,
    opts: &SolverOptions,
) -> Result<Trajectory> {
    let p = resolve(series, spec, opts)?;
    let frames = series.frames();
    let positions = opts.execution.try_map_range(frames.len(), |i| {
        CpfTable::build(&frames[i], opts.cpf)
            .invert(p)
            .map_err(|e| e.at_frame(i))
    })?;
    Trajectory::new(vec![TrajectoryLabel::Quantile { p }], series.times(), vec![positions])
}

/// Many quantile trajectories over one series, sharing the per-frame tables.
pub fn quantile_ensemble(
    series: &DensitySeries,
    specs: &[QuantileSpec],
    opts: &SolverOptions,
) -> Result<Vec<Trajectory>> {
    let ps = specs
        .iter()
        .map(|s| resolve(series, *s, opts))
        .collect::<Result<Vec<_>>>()?;
    let tables = build_tables(series, opts);
    opts.execution.try_map(&ps, |&p| trace(&tables, p))
}

/// `|C_t(x_P(t)) - P|` at every frame, with `C_t` the frame's normalized table.
pub fn conservation_drift(
    series: &DensitySeries,
    trajectory: &Trajectory,
    p: f64,
    opts: &SolverOptions,
) -> Result<Vec<f64>> {
    if trajectory.len() != series.len() {
        return Err(Error::Configuration(format!(
            "trajectory has {} samples, series has {} frames",
            trajectory.len(),
            series.len()
        )));
    }
    opts.execution.try_map_range(series.len(), |i| {
        let table = CpfTable::build(&series.frames()[i], opts.cpf);
        Ok((table.cpf_at(trajectory.positions()[i])? - p).abs())
    })
}

/// Velocity of the conserved-left-mass flow at `x`, frame `frame_index`.
pub fn density_velocity(
    series: &DensitySeries,
    frame_index: usize,
    x: f64,
    opts: &SolverOptions,
) -> Result<f64> {
    let rate = series.time_derivative(frame_index)?;
    let frame = &series.frames()[frame_index];
    let rho = frame.value_at(x)?;
    let floor = opts.velocity_floor * frame.max_value();
    if rho <= floor {
        return Err(Error::DegenerateDensity {
            x,
            t: frame.t(),
            density: rho,
            floor,
        });
    }
    let grid = frame.grid();
    let dx = grid.dx();
    let (k, s) = grid.locate(x)?;
    let mut flux = 0.0;
    for w in rate[..=k].windows(2) {
        flux += 0.5 * dx * (w[0] + w[1]);
    }
    flux += rate[k] * s + 0.5 * (rate[k + 1] - rate[k]) * s * s / dx;
    Ok(-flux / rho)
}

/// Independent 1D problems, one density series per coordinate.
#[derive(Clone, Debug)]
pub struct SeparableSystem {
    axes: Vec<DensitySeries>,
}

impl SeparableSystem {
    pub fn new(axes: Vec<DensitySeries>) -> Result<Self> {
        let first = axes
            .first()
            .ok_or_else(|| Error::Configuration("a separable system needs at least one axis".into()))?;
        let times = first.times();
        for (i, a) in axes.iter().enumerate().skip(1) {
            if a.times() != times {
                return Err(Error::Configuration(format!(
                    "axis {i} uses a different time grid than axis 0"
                )));
            }
        }
        Ok(Self { axes })
    }

    pub fn axes(&self) -> &[DensitySeries] {
        &self.axes
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }
}

/// Coordinate `i` is the 1D quantile trajectory of axis `i` alone.
pub fn separable_trajectory(
    system: &SeparableSystem,
    specs: &[QuantileSpec],
    opts: &SolverOptions,
) -> Result<Trajectory> {
    if specs.len() != system.dim() {
        return Err(Error::Configuration(format!(
            "{} specs for a {}-axis system",
            specs.len(),
            system.dim()
        )));
    }
    let axes = system
        .axes
        .iter()
        .zip(specs)
        .map(|(series, spec)| quantile_trajectory(series, *spec, opts))
        .collect::<Result<Vec<_>>>()?;
    Trajectory::from_axes(axes)
}

/// [`separable_trajectory`] for many points, sharing tables per axis.
pub fn separable_ensemble(
    system: &SeparableSystem,
    points: &[Vec<QuantileSpec>],
    opts: &SolverOptions,
) -> Result<Vec<Trajectory>> {
    if let Some(bad) = points.iter().find(|p| p.len() != system.dim()) {
        return Err(Error::Configuration(format!(
            "{} specs for a {}-axis system",
            bad.len(),
            system.dim()
        )));
    }
    let per_axis = system
        .axes
        .iter()
        .enumerate()
        .map(|(i, series)| {
            let specs: Vec<_> = points.iter().map(|p| p[i]).collect();
            quantile_ensemble(series, &specs, opts)
        })
        .collect::<Result<Vec<_>>>()?;
    (0..points.len())
        .map(|j| Trajectory::from_axes(per_axis.iter().map(|axis| axis[j].clone()).collect()))
        .collect()
}
