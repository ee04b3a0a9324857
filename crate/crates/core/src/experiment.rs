//! Reference experiments: sample a model, build quantile trajectories,
//! integrate the matching Bohm trajectories, and compare.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bohm::{bohm_ensemble, IntegratorConfig};
use crate::density::{sample_model, DensitySeries, DensityTolerances};
use crate::error::{Error, Result};
use crate::grid::{time_grid, Grid1D};
use crate::quantile::{
    conservation_drift, quantile_ensemble, separable_ensemble, QuantileSpec, SeparableSystem,
    SolverOptions,
};
use crate::report::{compare, ComparisonReport};
use crate::trajectory::{axis_name, Trajectory, TrajectoryLabel};
use crate::wavefunction::{ModelKind, TwoSlitParams, WavefunctionModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    Harmonic,
    Free,
    TwoSlit,
    Well2d,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Harmonic, Preset::Free, Preset::TwoSlit, Preset::Well2d];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Harmonic => "harmonic",
            Preset::Free => "free",
            Preset::TwoSlit => "two-slit",
            Preset::Well2d => "well-2d",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Preset::Harmonic => "oscillator ground + first excited state, omega=3, x in [-5,5], dx=0.2, dt=0.1, t in [0,3]",
            Preset::Free => "free Gaussian a=pi/2, x in [-25,25], dx=0.2, dt=0.1, t in [0,3]",
            Preset::TwoSlit => "two spreading slit Gaussians, t_max=100, dt=2.5, dy=3.24169, y in [-129.668,129.668]",
            Preset::Well2d => "separable 2D infinite well L=1, dx=dy=L/30, dt=0.05, t in [0,1], starts on (0.5,0)-(0,0.5)",
        }
    }

    pub fn config(self) -> RunConfig {
        let quantiles = || Targets::Quantiles((1..10).map(|i| i as f64 / 10.0).collect());
        let (model, dimensions, targets, threshold) = match self {
            Preset::Harmonic => (WavefunctionModel::harmonic(3.0), 1, quantiles(), 5e-2),
            Preset::Free => (WavefunctionModel::free_gaussian(PI / 2.0), 1, quantiles(), 1e-1),
            Preset::TwoSlit => {
                let model = WavefunctionModel::two_slit(TwoSlitParams::default());
                let dy = model.as_ref().map(|m| m.defaults().dx).unwrap_or(1.0);
                let ps = (1..30).map(|k| k as f64 / 30.0).collect();
                (model, 1, Targets::Quantiles(ps), 1.5 * dy)
            }
            Preset::Well2d => {
                let starts = (1..10)
                    .map(|i| {
                        let s = i as f64 * 0.05;
                        vec![s, 0.5 - s]
                    })
                    .collect();
                (WavefunctionModel::square_well(1.0), 2, Targets::Starts(starts), 5e-2)
            }
        };
        RunConfig::from_model(self.name(), model.expect("preset parameters are valid"), dimensions, targets, threshold)
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                Error::Configuration(format!(
                    "unknown preset `{s}` (expected one of: harmonic, free, two-slit, well-2d)"
                ))
            })
    }
}

/// Trajectory seeds: conserved probabilities, or initial points with one
/// coordinate per axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Targets {
    /// In N-D every axis uses the same `P`.
    Quantiles(Vec<f64>),
    Starts(Vec<Vec<f64>>),
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub name: String,
    pub model: WavefunctionModel,
    /// Number of identical separable axes.
    pub dimensions: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub dx: f64,
    pub dt: f64,
    pub t_max: f64,
    pub targets: Targets,
    /// Largest accepted quantile-vs-Bohm deviation.
    pub threshold: f64,
    /// RK4 steps per frame interval for the Bohm reference.
    pub bohm_substeps: usize,
    pub solver: SolverOptions,
    pub tolerances: DensityTolerances,
}

impl RunConfig {
    pub fn from_model(
        name: &str,
        model: WavefunctionModel,
        dimensions: usize,
        targets: Targets,
        threshold: f64,
    ) -> Self {
        let d = model.defaults();
        Self {
            name: name.to_string(),
            model,
            dimensions,
            x_min: d.x_min,
            x_max: d.x_max,
            dx: d.dx,
            dt: d.dt,
            t_max: d.t_max,
            targets,
            threshold,
            bohm_substeps: 50,
            solver: SolverOptions::default(),
            tolerances: DensityTolerances::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let field = |name: &str, msg: String| Err(Error::Configuration(format!("{name}: {msg}")));
        if self.dimensions == 0 {
            return field("dimensions", "must be at least 1".into());
        }
        if !(self.threshold > 0.0 && self.threshold.is_finite()) {
            return field("threshold", format!("must be positive, got {}", self.threshold));
        }
        if self.bohm_substeps == 0 {
            return field("bohm_substeps", "must be at least 1".into());
        }
        Grid1D::with_spacing(self.x_min, self.x_max, self.dx)
            .map_err(|e| Error::Configuration(format!("grid: {e}")))?;
        time_grid(self.t_max, self.dt).map_err(|e| Error::Configuration(format!("time: {e}")))?;
        validate_targets(&self.targets, self.dimensions)
    }

    pub fn grid(&self) -> Result<Grid1D> {
        Grid1D::with_spacing(self.x_min, self.x_max, self.dx)
    }
}

pub fn validate_targets(targets: &Targets, dimensions: usize) -> Result<()> {
    match targets {
        Targets::Quantiles(ps) => {
            if ps.is_empty() {
                return Err(Error::Configuration("quantiles: list is empty".into()));
            }
            if let Some(p) = ps.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
                return Err(Error::Configuration(format!(
                    "quantiles: {p} is outside (0, 1)"
                )));
            }
            if ps.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::Configuration(
                    "quantiles: values must be sorted and distinct".into(),
                ));
            }
        }
        Targets::Starts(points) => {
            if points.is_empty() {
                return Err(Error::Configuration("x0: list is empty".into()));
            }
            if let Some(p) = points.iter().find(|p| p.len() != dimensions) {
                return Err(Error::Configuration(format!(
                    "x0: point {p:?} has {} coordinates, expected {dimensions}",
                    p.len()
                )));
            }
            if points.iter().flatten().any(|x| !x.is_finite()) {
                return Err(Error::Configuration("x0: coordinates must be finite".into()));
            }
        }
    }
    Ok(())
}

fn seeds(targets: &Targets, dimensions: usize) -> Vec<Vec<QuantileSpec>> {
    match targets {
        Targets::Quantiles(ps) => ps
            .iter()
            .map(|&p| vec![QuantileSpec::Probability(p); dimensions])
            .collect(),
        Targets::Starts(points) => points
            .iter()
            .map(|pt| pt.iter().map(|&x| QuantileSpec::InitialPosition(x)).collect())
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunParameters {
    pub experiment: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelKind>,
    pub dimensions: usize,
    pub x_min: f64,
    pub x_max: f64,
    pub dx: f64,
    pub nodes: usize,
    pub dt: f64,
    pub frames: usize,
    /// Conserved `P` per trajectory, one entry per axis.
    pub quantiles: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    pub labels: Vec<TrajectoryLabel>,
    pub times: Vec<f64>,
    pub p_drift: Vec<f64>,
    pub max_p_drift: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub parameters: RunParameters,
    /// Quantile vs Bohm, one per trajectory (analytic models only).
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub comparisons: Vec<ComparisonReport>,
    /// Conservation drift only (ingested densities).
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub drifts: Vec<DriftReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_deviation: Option<f64>,
    pub max_p_drift: f64,
    pub drift_tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub quantile: Vec<Trajectory>,
    pub bohm: Vec<Trajectory>,
    pub report: RunReport,
}

fn quantiles_of(t: &Trajectory) -> Vec<f64> {
    t.labels()
        .iter()
        .map(|l| match l {
            TrajectoryLabel::Quantile { p } => *p,
            TrajectoryLabel::Start { .. } => f64::NAN,
        })
        .collect()
}

/// Largest per-axis drift at every frame.
fn drift_series(
    axes: &[&DensitySeries],
    traj: &Trajectory,
    opts: &SolverOptions,
) -> Result<Vec<f64>> {
    let ps = quantiles_of(traj);
    let mut worst = vec![0.0f64; traj.len()];
    for (i, series) in axes.iter().enumerate() {
        let axis = Trajectory::new(
            vec![traj.labels()[i]],
            traj.times().to_vec(),
            vec![traj.axis(i).to_vec()],
        )?;
        for (w, d) in worst.iter_mut().zip(conservation_drift(series, &axis, ps[i], opts)?) {
            *w = w.max(d);
        }
    }
    Ok(worst)
}

pub fn run_experiment(cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let times = time_grid(cfg.t_max, cfg.dt)?;
    let exec = cfg.solver.execution;
    let series = sample_model(&cfg.model, grid, &times, &cfg.tolerances, exec)?;
    let seeds = seeds(&cfg.targets, cfg.dimensions);

    let quantile = if cfg.dimensions == 1 {
        let specs: Vec<_> = seeds.iter().map(|s| s[0]).collect();
        quantile_ensemble(&series, &specs, &cfg.solver)?
    } else {
        let system = SeparableSystem::new(vec![series.clone(); cfg.dimensions])?;
        separable_ensemble(&system, &seeds, &cfg.solver)?
    };

    let integrator = IntegratorConfig::for_times(&times, cfg.bohm_substeps)?;
    let mut bohm_axes = Vec::with_capacity(cfg.dimensions);
    for axis in 0..cfg.dimensions {
        let starts: Vec<f64> = quantile.iter().map(|q| q.axis(axis)[0]).collect();
        let runs = bohm_ensemble(&cfg.model, &starts, &integrator, exec)
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        bohm_axes.push(runs);
    }
    let bohm = (0..quantile.len())
        .map(|j| Trajectory::from_axes(bohm_axes.iter().map(|a| a[j].clone()).collect()))
        .collect::<Result<Vec<_>>>()?;

    let axes = vec![&series; cfg.dimensions];
    let comparisons = quantile
        .iter()
        .zip(&bohm)
        .map(|(q, b)| {
            let mut c = compare(q, b)?;
            c.p_drift = Some(drift_series(&axes, q, &cfg.solver)?);
            Ok(c)
        })
        .collect::<Result<Vec<_>>>()?;

    let max_deviation = comparisons.iter().map(|c| c.max_deviation).fold(0.0, f64::max);
    let max_p_drift = comparisons
        .iter()
        .flat_map(|c| c.p_drift.iter().flatten())
        .copied()
        .fold(0.0, f64::max);
    let report = RunReport {
        parameters: RunParameters {
            experiment: cfg.name.clone(),
            model: Some(cfg.model.kind),
            dimensions: cfg.dimensions,
            x_min: grid.x_min(),
            x_max: grid.x_max(),
            dx: grid.dx(),
            nodes: grid.len(),
            dt: cfg.dt,
            frames: times.len(),
            quantiles: quantile.iter().map(quantiles_of).collect(),
            threshold: Some(cfg.threshold),
        },
        comparisons,
        drifts: Vec::new(),
        max_deviation: Some(max_deviation),
        max_p_drift,
        drift_tolerance: cfg.solver.drift_tolerance,
        passed: max_deviation <= cfg.threshold && max_p_drift <= cfg.solver.drift_tolerance,
    };
    Ok(RunOutput {
        quantile,
        bohm,
        report,
    })
}

/// Quantile trajectories for a density with no known wavefunction.
pub fn run_ingested(
    name: &str,
    series: &DensitySeries,
    targets: &Targets,
    opts: &SolverOptions,
) -> Result<RunOutput> {
    validate_targets(targets, 1)?;
    let specs: Vec<_> = seeds(targets, 1).into_iter().map(|s| s[0]).collect();
    let quantile = quantile_ensemble(series, &specs, opts)?;
    let drifts = quantile
        .iter()
        .map(|q| {
            let p_drift = drift_series(&[series], q, opts)?;
            Ok(DriftReport {
                labels: q.labels().to_vec(),
                times: q.times().to_vec(),
                max_p_drift: p_drift.iter().copied().fold(0.0, f64::max),
                p_drift,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_p_drift = drifts.iter().map(|d| d.max_p_drift).fold(0.0, f64::max);
    let grid = series.grid();
    let report = RunReport {
        parameters: RunParameters {
            experiment: name.to_string(),
            model: None,
            dimensions: 1,
            x_min: grid.x_min(),
            x_max: grid.x_max(),
            dx: grid.dx(),
            nodes: grid.len(),
            dt: series.dt(),
            frames: series.len(),
            quantiles: quantile.iter().map(quantiles_of).collect(),
            threshold: None,
        },
        comparisons: Vec::new(),
        drifts,
        max_deviation: None,
        max_p_drift,
        drift_tolerance: opts.drift_tolerance,
        passed: max_p_drift <= opts.drift_tolerance,
    };
    Ok(RunOutput {
        quantile,
        bohm: Vec::new(),
        report,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputFormat {
    /// One `trajectories.csv` with `method,index,t,x[,y]` rows.
    #[default]
    Long,
    /// One `t,x[,y]` file per trajectory.
    Split,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "long" => Ok(OutputFormat::Long),
            "split" => Ok(OutputFormat::Split),
            other => Err(Error::Configuration(format!(
                "format: unknown output format `{other}` (expected long or split)"
            ))),
        }
    }
}

pub fn long_csv(output: &RunOutput) -> String {
    let dim = output.quantile.first().map_or(1, Trajectory::dim);
    let mut s = String::from("method,index,t");
    for i in 0..dim {
        write!(s, ",{}", axis_name(i)).unwrap();
    }
    s.push('\n');
    for (method, set) in [("quantile", &output.quantile), ("bohm", &output.bohm)] {
        for (index, traj) in set.iter().enumerate() {
            for j in 0..traj.len() {
                write!(s, "{method},{index},{}", traj.times()[j]).unwrap();
                for i in 0..traj.dim() {
                    write!(s, ",{}", traj.axis(i)[j]).unwrap();
                }
                s.push('\n');
            }
        }
    }
    s
}

/// Writes trajectories and `report.json` into `dir`; returns the paths written.
pub fn write_outputs(
    output: &RunOutput,
    dir: &Path,
    format: OutputFormat,
) -> Result<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut files: Vec<(std::path::PathBuf, String)> = Vec::new();
    match format {
        OutputFormat::Long => files.push((dir.join("trajectories.csv"), long_csv(output))),
        OutputFormat::Split => {
            for (method, set) in [("quantile", &output.quantile), ("bohm", &output.bohm)] {
                for (index, traj) in set.iter().enumerate() {
                    files.push((dir.join(format!("{method}_{index:03}.csv")), traj.to_csv()));
                }
            }
        }
    }
    let mut json = serde_json::to_string_pretty(&output.report)
        .map_err(|e| Error::InvalidInput(format!("report serialization failed: {e}")))?;
    json.push('\n');
    files.push((dir.join("report.json"), json));
    for (path, text) in &files {
        std::fs::write(path, text)?;
    }
    Ok(files.into_iter().map(|(p, _)| p).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_parameters() {
        let h = Preset::Harmonic.config();
        assert_eq!(h.model.kind, ModelKind::HarmonicSuperposition { omega: 3.0 });
        assert_eq!((h.x_min, h.x_max, h.dx, h.dt, h.t_max), (-5.0, 5.0, 0.2, 0.1, 3.0));

        let ts = Preset::TwoSlit.config();
        assert_eq!(ts.dt, 2.5);
        assert!((ts.dx - 3.24169).abs() < 1e-5);
        assert_eq!((ts.x_min, ts.x_max), (-129.668, 129.668));
        assert_eq!(ts.grid().unwrap().len(), 81);
        let Targets::Quantiles(ps) = &ts.targets else { panic!() };
        assert!(ps.len() >= 20);

        let w = Preset::Well2d.config();
        assert_eq!(w.dimensions, 2);
        assert_eq!((w.dt, w.t_max), (0.05, 1.0));
        assert!((w.dx - 1.0 / 30.0).abs() < 1e-15);
        let Targets::Starts(pts) = &w.targets else { panic!() };
        assert!(pts.iter().all(|p| (p[0] + p[1] - 0.5).abs() < 1e-15));

        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
            p.config().validate().unwrap();
        }
        assert!("nope".parse::<Preset>().is_err());
    }

    #[test]
    fn config_validation_names_the_field() {
        let mut c = Preset::Harmonic.config();
        c.targets = Targets::Quantiles(vec![0.5, 0.2]);
        assert!(c.validate().unwrap_err().to_string().contains("quantiles"));
        c.targets = Targets::Quantiles(vec![0.2, 1.0]);
        assert!(c.validate().unwrap_err().to_string().contains("quantiles"));
        c.targets = Targets::Starts(vec![vec![0.1, 0.2]]);
        assert!(c.validate().unwrap_err().to_string().contains("x0"));
        c = Preset::Harmonic.config();
        c.dx = 0.3;
        assert!(c.validate().unwrap_err().to_string().contains("grid"));
        c = Preset::Harmonic.config();
        c.threshold = -1.0;
        assert!(c.validate().unwrap_err().to_string().contains("threshold"));
    }

    #[test]
    fn harmonic_preset_passes() {
        let out = run_experiment(&Preset::Harmonic.config()).unwrap();
        assert_eq!(out.quantile.len(), 9);
        assert!(out.report.passed, "{:?}", out.report.max_deviation);
        let csv = long_csv(&out);
        assert!(csv.starts_with("method,index,t,x\nquantile,0,0,"));
    }
}
