use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trajectory::{Trajectory, TrajectoryLabel};

/// Pointwise distance between a quantile trajectory and its reference.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub labels: Vec<TrajectoryLabel>,
    pub times: Vec<f64>,
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p_drift: Option<Vec<f64>>,
}

/// Euclidean distance per sample; both trajectories must share their times.
pub fn compare(quantile: &Trajectory, reference: &Trajectory) -> Result<ComparisonReport> {
    if quantile.dim() != reference.dim() {
        return Err(Error::Configuration(format!(
            "cannot compare a {}-D trajectory with a {}-D one",
            quantile.dim(),
            reference.dim()
        )));
    }
    let same_times = quantile.len() == reference.len()
        && quantile
            .times()
            .iter()
            .zip(reference.times())
            .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(1.0));
    if !same_times {
        return Err(Error::Configuration(
            "trajectories are recorded on different time grids".into(),
        ));
    }
    let deviations: Vec<f64> = (0..quantile.len())
        .map(|j| {
            (0..quantile.dim())
                .map(|i| (quantile.axis(i)[j] - reference.axis(i)[j]).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    if let Some(j) = deviations.iter().position(|d| !d.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "non-finite deviation at t={}",
            quantile.times()[j]
        )));
    }
    let max_deviation = deviations.iter().copied().fold(0.0, f64::max);
    Ok(ComparisonReport {
        labels: quantile.labels().to_vec(),
        times: quantile.times().to_vec(),
        deviations,
        max_deviation,
        p_drift: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(offset: f64) -> Trajectory {
        Trajectory::new(
            vec![TrajectoryLabel::Quantile { p: 0.5 }],
            vec![0.0, 0.5, 1.0],
            vec![vec![offset, 0.3 + offset, -0.2 + offset]],
        )
        .unwrap()
    }

    #[test]
    fn identical_trajectories() {
        let r = compare(&line(0.0), &line(0.0)).unwrap();
        assert_eq!(r.max_deviation, 0.0);
        assert_eq!(r.deviations, vec![0.0; 3]);
    }

    #[test]
    fn constant_offset() {
        let r = compare(&line(0.25), &line(0.0)).unwrap();
        assert!((r.max_deviation - 0.25).abs() < 1e-15);
        assert_eq!(r.max_deviation, r.deviations.iter().copied().fold(0.0, f64::max));
    }

    #[test]
    fn time_grid_mismatch() {
        let other = Trajectory::new(
            vec![TrajectoryLabel::Quantile { p: 0.5 }],
            vec![0.0, 0.6, 1.0],
            vec![vec![0.0; 3]],
        )
        .unwrap();
        assert!(matches!(compare(&line(0.0), &other), Err(Error::Configuration(_))));
    }
}
