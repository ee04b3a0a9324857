//! Closed-form wavefunctions for the four reference systems.
//!
//! Every model is an exact solution of the time-dependent Schrödinger
//! equation, so the density `|ψ|²` it produces is a valid input for the
//! quantile solver and its phase gradient drives the Bohm oracle.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub mass: f64,
}

impl PhysicalConstants {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) || !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "hbar and mass must be positive and finite, got hbar={hbar}, mass={mass}"
            )));
        }
        Ok(Self { hbar, mass })
    }

    /// ħ = m = 1.
    pub const NATURAL: Self = Self {
        hbar: 1.0,
        mass: 1.0,
    };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::NATURAL
    }
}

/// Parameters of the symmetric two-slit superposition: two freely spreading
/// Gaussians centred at `±slit_offset` with initial density standard
/// deviation `slit_width`, observed until `t_max`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoSlitParams {
    pub slit_offset: f64,
    pub slit_width: f64,
    pub t_max: f64,
}

impl Default for TwoSlitParams {
    fn default() -> Self {
        Self {
            slit_offset: 30.0,
            slit_width: 6.0,
            t_max: 100.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelKind {
    /// Equal-weight superposition of the oscillator ground and first excited states.
    HarmonicSuperposition { omega: f64 },
    /// A single oscillator eigenstate (`level` 0 or 1); stationary.
    HarmonicEigenstate { omega: f64, level: u8 },
    /// Free Gaussian packet `exp(-a x²)` at t = 0, centred at the origin.
    FreeGaussian { a: f64 },
    TwoSlit(TwoSlitParams),
    /// Infinite well on `[0, length]`: superposition of the two lowest states.
    SquareWellSuperposition { length: f64 },
}

/// Grid and time parameters a model is meant to be run with.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunDefaults {
    pub x_min: f64,
    pub x_max: f64,
    pub dx: f64,
    pub dt: f64,
    pub t_max: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WavefunctionModel {
    pub kind: ModelKind,
    pub constants: PhysicalConstants,
}

/// Half-range of the two-slit screen coordinate (80 cells of 3.24169).
pub const TWO_SLIT_HALF_RANGE: f64 = 129.668;

impl WavefunctionModel {
    pub fn new(kind: ModelKind, constants: PhysicalConstants) -> Result<Self> {
        constants.validate()?;
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!(
                    "{name} must be positive and finite, got {v}"
                )))
            }
        };
        match kind {
            ModelKind::HarmonicSuperposition { omega } => positive("omega", omega)?,
            ModelKind::HarmonicEigenstate { omega, level } => {
                positive("omega", omega)?;
                if level > 1 {
                    return Err(Error::InvalidInput(format!(
                        "only levels 0 and 1 are available, got {level}"
                    )));
                }
            }
            ModelKind::FreeGaussian { a } => positive("a", a)?,
            ModelKind::TwoSlit(p) => {
                positive("slit_offset", p.slit_offset)?;
                positive("slit_width", p.slit_width)?;
                positive("t_max", p.t_max)?;
            }
            ModelKind::SquareWellSuperposition { length } => positive("length", length)?,
        }
        Ok(Self { kind, constants })
    }

    pub fn harmonic(omega: f64) -> Result<Self> {
        Self::new(
            ModelKind::HarmonicSuperposition { omega },
            PhysicalConstants::NATURAL,
        )
    }

    pub fn harmonic_eigenstate(omega: f64, level: u8) -> Result<Self> {
        Self::new(
            ModelKind::HarmonicEigenstate { omega, level },
            PhysicalConstants::NATURAL,
        )
    }

    pub fn free_gaussian(a: f64) -> Result<Self> {
        Self::new(ModelKind::FreeGaussian { a }, PhysicalConstants::NATURAL)
    }

    pub fn two_slit(params: TwoSlitParams) -> Result<Self> {
        Self::new(ModelKind::TwoSlit(params), PhysicalConstants::NATURAL)
    }

    pub fn square_well(length: f64) -> Result<Self> {
        Self::new(
            ModelKind::SquareWellSuperposition { length },
            PhysicalConstants::NATURAL,
        )
    }

    pub fn defaults(&self) -> RunDefaults {
        match self.kind {
            ModelKind::HarmonicSuperposition { .. } | ModelKind::HarmonicEigenstate { .. } => {
                RunDefaults {
                    x_min: -5.0,
                    x_max: 5.0,
                    dx: 0.2,
                    dt: 0.1,
                    t_max: 3.0,
                }
            }
            // The packet reaches σ ≈ 3.8 by t = 3, so ±5 would truncate it.
            ModelKind::FreeGaussian { .. } => RunDefaults {
                x_min: -25.0,
                x_max: 25.0,
                dx: 0.2,
                dt: 0.1,
                t_max: 3.0,
            },
            ModelKind::TwoSlit(p) => RunDefaults {
                x_min: -TWO_SLIT_HALF_RANGE,
                x_max: TWO_SLIT_HALF_RANGE,
                dx: 3.24169,
                dt: p.t_max / 40.0,
                t_max: p.t_max,
            },
            ModelKind::SquareWellSuperposition { length } => RunDefaults {
                x_min: 0.0,
                x_max: length,
                dx: length / 30.0,
                dt: 0.05,
                t_max: 1.0,
            },
        }
    }

    pub fn eval_psi(&self, x: f64, t: f64) -> Result<Complex64> {
        self.check_point(x, t)?;
        Ok(self.psi_and_slope(x, t).0)
    }

    pub fn eval_dpsi_dx(&self, x: f64, t: f64) -> Result<Complex64> {
        self.check_point(x, t)?;
        Ok(self.psi_and_slope(x, t).1)
    }

    /// Returns `(ψ, ∂ψ/∂x)` in one evaluation.
    pub fn eval_psi_and_slope(&self, x: f64, t: f64) -> Result<(Complex64, Complex64)> {
        self.check_point(x, t)?;
        Ok(self.psi_and_slope(x, t))
    }

    pub fn density(&self, x: f64, t: f64) -> Result<f64> {
        self.check_point(x, t)?;
        if let ModelKind::HarmonicEigenstate { omega, level } = self.kind {
            // The unit-modulus phase is dropped so frames are bitwise equal.
            let c = self.constants;
            return Ok(Oscillator::new(omega, c.hbar, c.mass).state(level, x, 0.0).0.norm_sqr());
        }
        Ok(self.psi_and_slope(x, t).0.norm_sqr())
    }

    /// Largest density on the default grid at t = 0.
    pub fn reference_density(&self) -> f64 {
        let d = self.defaults();
        let n = ((d.x_max - d.x_min) / d.dx).round() as usize * 4 + 1;
        (0..n)
            .map(|i| {
                let x = d.x_min + (d.x_max - d.x_min) * i as f64 / (n - 1) as f64;
                self.psi_and_slope(x, 0.0).0.norm_sqr()
            })
            .fold(0.0, f64::max)
    }

    fn check_point(&self, x: f64, t: f64) -> Result<()> {
        ensure_finite("x", x)?;
        ensure_finite("t", t)?;
        if t < 0.0 {
            return Err(Error::InvalidInput(format!("t must be >= 0, got {t}")));
        }
        Ok(())
    }

    fn psi_and_slope(&self, x: f64, t: f64) -> (Complex64, Complex64) {
        let PhysicalConstants { hbar, mass } = self.constants;
        match self.kind {
            ModelKind::HarmonicSuperposition { omega } => {
                let s = Oscillator::new(omega, hbar, mass);
                let (g, dg) = s.state(0, x, t);
                let (e, de) = s.state(1, x, t);
                let w = std::f64::consts::FRAC_1_SQRT_2;
                ((g + e) * w, (dg + de) * w)
            }
            ModelKind::HarmonicEigenstate { omega, level } => {
                Oscillator::new(omega, hbar, mass).state(level, x, t)
            }
            ModelKind::FreeGaussian { a } => gaussian_packet(a, 0.0, x, t, hbar, mass),
            ModelKind::TwoSlit(p) => {
                let a = 1.0 / (4.0 * p.slit_width * p.slit_width);
                let d = p.slit_offset;
                // The overlap of the two packets is conserved by free evolution.
                let overlap = (-d * d / (2.0 * p.slit_width * p.slit_width)).exp();
                let norm = 1.0 / (2.0 * (1.0 + overlap)).sqrt();
                let (u, du) = gaussian_packet(a, d, x, t, hbar, mass);
                let (l, dl) = gaussian_packet(a, -d, x, t, hbar, mass);
                ((u + l) * norm, (du + dl) * norm)
            }
            ModelKind::SquareWellSuperposition { length } => {
                if !(0.0..=length).contains(&x) {
                    return (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
                }
                let e1 = PI * PI * hbar * hbar / (2.0 * mass * length * length);
                let k = PI / length;
                let amp = 1.0 / length.sqrt();
                let p1 = Complex64::from_polar(1.0, -e1 * t / hbar);
                let p2 = Complex64::from_polar(1.0, -4.0 * e1 * t / hbar);
                let psi = (p1 * (k * x).sin() + p2 * (2.0 * k * x).sin()) * amp;
                let dpsi =
                    (p1 * (k * (k * x).cos()) + p2 * (2.0 * k * (2.0 * k * x).cos())) * amp;
                (psi, dpsi)
            }
        }
    }
}

impl PhysicalConstants {
    fn validate(&self) -> Result<()> {
        Self::new(self.hbar, self.mass).map(|_| ())
    }
}

struct Oscillator {
    width: f64,
    omega: f64,
}

impl Oscillator {
    fn new(omega: f64, hbar: f64, mass: f64) -> Self {
        Self {
            width: (hbar / (mass * omega)).sqrt(),
            omega,
        }
    }

    /// Eigenstate `level` with its phase factor `exp(-i E t / ħ)`,
    /// `E = ħω(level + 1/2)`.
    fn state(&self, level: u8, x: f64, t: f64) -> (Complex64, Complex64) {
        let a = self.width;
        let envelope = (-x * x / (2.0 * a * a)).exp();
        let phase = Complex64::from_polar(1.0, -self.omega * (level as f64 + 0.5) * t);
        let (value, slope) = match level {
            0 => {
                let c = (1.0 / (a * PI.sqrt())).sqrt();
                (c * envelope, -x / (a * a) * c * envelope)
            }
            _ => {
                let c = (1.0 / (2.0 * a * PI.sqrt())).sqrt();
                let v = c * envelope * 2.0 * x / a;
                let s = c * envelope * (2.0 / a) * (1.0 - x * x / (a * a));
                (v, s)
            }
        };
        (phase * value, phase * slope)
    }
}

/// Freely spreading Gaussian `(2a/π)^{1/4} exp(-a(x-c)²/(1+iβt)) / √(1+iβt)`
/// with `β = 2ħa/m`, and its x-derivative.
fn gaussian_packet(
    a: f64,
    center: f64,
    x: f64,
    t: f64,
    hbar: f64,
    mass: f64,
) -> (Complex64, Complex64) {
    let spread = Complex64::new(1.0, 2.0 * hbar * a * t / mass);
    let u = x - center;
    let psi = (2.0 * a / PI).powf(0.25) * (-a * u * u / spread).exp() / spread.sqrt();
    let dpsi = psi * (-2.0 * a * u / spread);
    (psi, dpsi)
}
