//! Bohmian trajectories from the guidance law, integrated as an
//! initial-value problem. This is the independent reference the quantile
//! trajectories are checked against; it uses the analytic wavefunction and
//! never touches the cumulative tables.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};
use crate::exec::Execution;
use crate::trajectory::{Trajectory, TrajectoryLabel};
use crate::wavefunction::WavefunctionModel;

/// Fixed-step RK4 settings. Integration starts at t = 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub step: f64,
    pub t_end: f64,
    pub record_times: Vec<f64>,
}

impl IntegratorConfig {
    pub fn new(step: f64, record_times: Vec<f64>) -> Result<Self> {
        ensure_finite("step", step)?;
        if step <= 0.0 {
            return Err(Error::InvalidInput(format!("step must be positive, got {step}")));
        }
        if record_times.is_empty()
            || record_times[0] < 0.0
            || record_times.iter().any(|t| !t.is_finite())
            || record_times.windows(2).any(|w| !(w[1] > w[0]))
        {
            return Err(Error::InvalidInput(
                "record times must be finite, non-negative and strictly increasing".into(),
            ));
        }
        let t_end = record_times[record_times.len() - 1];
        Ok(Self {
            step,
            t_end,
            record_times,
        })
    }

    /// Records at `times` with a step of `dt / substeps`.
    pub fn for_times(times: &[f64], substeps: usize) -> Result<Self> {
        let dt = if times.len() > 1 { times[1] - times[0] } else { 1.0 };
        Self::new(dt / substeps.max(1) as f64, times.to_vec())
    }
}

/// Guidance velocity `(ħ/m) Im(ψ* ∂ψ/∂x) / |ψ|²` of one model.
#[derive(Clone, Copy, Debug)]
pub struct BohmField {
    model: WavefunctionModel,
    floor: f64,
}

/// Imaginary residue allowed in the velocity quotient, relative to its size.
const REALNESS_TOLERANCE: f64 = 1e-12;

impl BohmField {
    /// Floor at `1e-12` of the model's reference density.
    pub fn new(model: WavefunctionModel) -> Self {
        Self::with_floor(model, 1e-12 * model.reference_density())
    }

    pub fn with_floor(model: WavefunctionModel, floor: f64) -> Self {
        Self { model, floor }
    }

    pub fn model(&self) -> &WavefunctionModel {
        &self.model
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn velocity(&self, x: f64, t: f64) -> Result<f64> {
        let (psi, dpsi) = self.model.eval_psi_and_slope(x, t)?;
        let rho = psi.norm_sqr();
        if !(rho > self.floor) {
            return Err(Error::DegenerateDensity {
                x,
                t,
                density: rho,
                floor: self.floor,
            });
        }
        let c = self.model.constants;
        // (ħ / 2mi)(ψ* ψ' − ψ ψ*') / ρ
        let numerator = psi.conj() * dpsi - psi * dpsi.conj();
        let v = numerator / num_complex::Complex64::new(0.0, 2.0 * c.mass) * (c.hbar / rho);
        if v.im.abs() > REALNESS_TOLERANCE * v.re.abs().max(1.0) {
            return Err(Error::ImaginaryVelocity {
                x,
                t,
                residue: v.im,
            });
        }
        Ok(v.re)
    }
}

pub fn bohm_velocity(model: &WavefunctionModel, x: f64, t: f64) -> Result<f64> {
    BohmField::new(*model).velocity(x, t)
}

/// Integrates `ẋ = v(x, t)` from `x0` at t = 0 with classic RK4.
pub fn bohm_trajectory(model: &WavefunctionModel, x0: f64, cfg: &IntegratorConfig) -> Result<Trajectory> {
    integrate(&BohmField::new(*model), x0, cfg)
}

pub fn integrate(field: &BohmField, x0: f64, cfg: &IntegratorConfig) -> Result<Trajectory> {
    ensure_finite("x0", x0)?;
    let mut traj = Trajectory::empty_1d(TrajectoryLabel::Start { x0 });
    let abort = |t: f64, reason: Error, partial: &Trajectory| Error::AbortedTrajectory {
        x0,
        t,
        reason: Box::new(reason),
        partial: Box::new(partial.clone()),
    };
    if let Err(e) = field.velocity(x0, 0.0) {
        return Err(abort(0.0, e, &traj));
    }
    let mut t = 0.0;
    let mut x = x0;
    for &target in &cfg.record_times {
        let span = target - t;
        if span > 0.0 {
            let n = (span / cfg.step - 1e-9).ceil().max(1.0) as usize;
            let h = span / n as f64;
            for i in 0..n {
                let t_i = t + i as f64 * h;
                x = match rk4_step(field, x, t_i, h) {
                    Ok(x) => x,
                    Err(e) => return Err(abort(t_i, e, &traj)),
                };
            }
            t = target;
        }
        traj.push_1d(target, x);
    }
    Ok(traj)
}

fn rk4_step(field: &BohmField, x: f64, t: f64, h: f64) -> Result<f64> {
    let k1 = field.velocity(x, t)?;
    let k2 = field.velocity(x + 0.5 * h * k1, t + 0.5 * h)?;
    let k3 = field.velocity(x + 0.5 * h * k2, t + 0.5 * h)?;
    let k4 = field.velocity(x + h * k3, t + h)?;
    let x_next = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if x_next.is_finite() {
        Ok(x_next)
    } else {
        Err(Error::InvalidInput(format!("integration diverged at t={t}")))
    }
}

/// Independent trajectories from each of `starts`, in input order.
pub fn bohm_ensemble(
    model: &WavefunctionModel,
    starts: &[f64],
    cfg: &IntegratorConfig,
    exec: Execution,
) -> Vec<Result<Trajectory>> {
    let field = BohmField::new(*model);
    exec.map(starts, |&x0| integrate(&field, x0, cfg))
}
