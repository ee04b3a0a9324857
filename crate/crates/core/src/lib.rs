//! Particle trajectories from time-dependent probability densities.
//!
//! A trajectory is labelled by the probability `P` lying to its left, and
//! sits at the `P`-quantile of the density at every time. For quantum
//! densities these quantile trajectories are the Bohmian ones; the
//! [`bohm`] module integrates the guidance law independently so the two can
//! be compared.
//!
//! Data flow: [`wavefunction`] models (or a density file, see
//! [`density_file`]) → [`density::DensitySeries`] → per-frame
//! [`cpf::CpfTable`] → [`quantile`] trajectories → [`report`].

// `!(a > b)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bohm;
pub mod cpf;
pub mod density;
pub mod density_file;
pub mod error;
pub mod exec;
pub mod experiment;
pub mod grid;
pub mod quantile;
pub mod report;
pub mod trajectory;
pub mod wavefunction;

pub use bohm::{bohm_trajectory, bohm_velocity, BohmField, IntegratorConfig};
pub use cpf::{CpfOptions, CpfTable, Inversion};
pub use density::{sample_model, DensityFrame, DensitySeries, DensityTolerances};
pub use density_file::{export_series, ingest_series, read_series_file, series_to_string};
pub use error::{Error, Result};
pub use exec::Execution;
pub use grid::{time_grid, Grid1D};
pub use quantile::{
    density_velocity, p_from_x0, quantile_ensemble, quantile_trajectory, separable_trajectory,
    QuantileSpec, SeparableSystem, SolverOptions,
};
pub use report::{compare, ComparisonReport};
pub use trajectory::{Trajectory, TrajectoryLabel};
pub use wavefunction::{ModelKind, PhysicalConstants, TwoSlitParams, WavefunctionModel};
