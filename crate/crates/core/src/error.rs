use thiserror::Error;

use crate::trajectory::Trajectory;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("density not negligible at {side} boundary of t={t}: ratio {ratio:e} exceeds {tolerance:e}")]
    BoundaryViolation {
        side: &'static str,
        t: f64,
        ratio: f64,
        tolerance: f64,
    },

    #[error("invalid density value {value} at frame {frame}, node {node}")]
    InvalidDensity { frame: usize, node: usize, value: f64 },

    #[error("format error on line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("mass of frame {frame} is {mass}, drifting {drift:e} from frame 0 (tolerance {tolerance:e})")]
    Conservation {
        frame: usize,
        mass: f64,
        drift: f64,
        tolerance: f64,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("value {value} outside valid range {range}")]
    Range { value: f64, range: String },

    #[error("probability {p} exceeds the tabulated mass {mass}")]
    Coverage { p: f64, mass: f64 },

    #[error("initial position {x0} lies in a zero-density region")]
    DegenerateStart { x0: f64 },

    #[error("density {density:e} at x={x}, t={t} is at or below the velocity floor {floor:e}")]
    DegenerateDensity {
        x: f64,
        t: f64,
        density: f64,
        floor: f64,
    },

    #[error("velocity has imaginary residue {residue:e} at x={x}, t={t}")]
    ImaginaryVelocity { x: f64, t: f64, residue: f64 },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("trajectory from x0={x0} aborted at t={t}: {reason}")]
    AbortedTrajectory {
        x0: f64,
        t: f64,
        reason: Box<Error>,
        partial: Box<Trajectory>,
    },

    #[error("frame {index}: {source}")]
    Frame {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn at_frame(self, index: usize) -> Self {
        Error::Frame {
            index,
            source: Box::new(self),
        }
    }

    /// True for errors caused by bad user-supplied configuration or data,
    /// as opposed to I/O failures.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Io(_) => false,
            Error::Frame { source, .. } => source.is_validation(),
            _ => true,
        }
    }
}

pub(crate) fn ensure_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{name} must be finite, got {value}")))
    }
}
