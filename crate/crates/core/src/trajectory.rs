use std::fmt::Write as _;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// What a trajectory (or one axis of it) was seeded with.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrajectoryLabel {
    /// Conserved left mass `P`.
    Quantile { p: f64 },
    /// Initial position of an integrated trajectory.
    Start { x0: f64 },
}

/// Time samples with one position list per coordinate axis.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    labels: Vec<TrajectoryLabel>,
    times: Vec<f64>,
    coords: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn new(labels: Vec<TrajectoryLabel>, times: Vec<f64>, coords: Vec<Vec<f64>>) -> Result<Self> {
        if coords.is_empty() || labels.len() != coords.len() {
            return Err(Error::InvalidInput(format!(
                "{} labels for {} axes",
                labels.len(),
                coords.len()
            )));
        }
        if coords.iter().any(|c| c.len() != times.len()) {
            return Err(Error::InvalidInput(
                "every axis needs one position per time".into(),
            ));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("times must be strictly increasing".into()));
        }
        Ok(Self {
            labels,
            times,
            coords,
        })
    }

    pub(crate) fn empty_1d(label: TrajectoryLabel) -> Self {
        Self {
            labels: vec![label],
            times: Vec::new(),
            coords: vec![Vec::new()],
        }
    }

    pub(crate) fn push_1d(&mut self, t: f64, x: f64) {
        self.times.push(t);
        self.coords[0].push(x);
    }

    /// Stacks 1D trajectories sharing a time grid into one N-D trajectory.
    pub fn from_axes(axes: Vec<Trajectory>) -> Result<Self> {
        let first = axes
            .first()
            .ok_or_else(|| Error::Configuration("no axes to combine".into()))?;
        let times = first.times.clone();
        let mut labels = Vec::new();
        let mut coords = Vec::new();
        for (i, axis) in axes.into_iter().enumerate() {
            if axis.times != times {
                return Err(Error::Configuration(format!(
                    "axis {i} is sampled on a different time grid than axis 0"
                )));
            }
            labels.extend(axis.labels);
            coords.extend(axis.coords);
        }
        Self::new(labels, times, coords)
    }

    pub fn labels(&self) -> &[TrajectoryLabel] {
        &self.labels
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn axis(&self, i: usize) -> &[f64] {
        &self.coords[i]
    }

    /// First-axis positions.
    pub fn positions(&self) -> &[f64] {
        &self.coords[0]
    }

    pub fn point(&self, j: usize) -> Vec<f64> {
        self.coords.iter().map(|c| c[j]).collect()
    }

    pub fn csv_header(&self) -> String {
        let mut h = String::from("t");
        for i in 0..self.dim() {
            h.push(',');
            h.push_str(&axis_name(i));
        }
        h
    }

    /// `t,x[,y,…]` with a header row.
    pub fn to_csv(&self) -> String {
        let mut s = self.csv_header();
        s.push('\n');
        for j in 0..self.len() {
            write!(s, "{}", self.times[j]).unwrap();
            for c in &self.coords {
                write!(s, ",{}", c[j]).unwrap();
            }
            s.push('\n');
        }
        s
    }

    /// Reads the `to_csv` layout. Labels are not stored in the file and
    /// come back as `Start` with the first position of each axis.
    pub fn from_csv<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines().enumerate().filter(|(_, l)| {
            l.as_ref().map(|l| !l.trim().is_empty()).unwrap_or(true)
        });
        let (_, header) = lines.next().ok_or_else(|| Error::Format {
            line: 1,
            message: "empty trajectory file".into(),
        })?;
        let header = header?;
        let columns: Vec<&str> = header.split(',').map(str::trim).collect();
        if columns.len() < 2 || columns[0] != "t" {
            return Err(Error::Format {
                line: 1,
                message: "header must be `t,x[,y,...]`".into(),
            });
        }
        let dim = columns.len() - 1;
        let mut times = Vec::new();
        let mut coords = vec![Vec::new(); dim];
        for (i, line) in lines {
            let line = line?;
            let fields = line
                .split(',')
                .map(|f| {
                    f.trim().parse::<f64>().map_err(|_| Error::Format {
                        line: i + 1,
                        message: format!("`{}` is not a number", f.trim()),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            if fields.len() != dim + 1 {
                return Err(Error::Format {
                    line: i + 1,
                    message: format!("expected {} fields, found {}", dim + 1, fields.len()),
                });
            }
            times.push(fields[0]);
            for (c, v) in coords.iter_mut().zip(&fields[1..]) {
                c.push(*v);
            }
        }
        let labels = coords
            .iter()
            .map(|c| TrajectoryLabel::Start {
                x0: c.first().copied().unwrap_or(f64::NAN),
            })
            .collect();
        Self::new(labels, times, coords).map_err(|e| Error::Format {
            line: 1,
            message: e.to_string(),
        })
    }
}

pub fn axis_name(i: usize) -> String {
    match i {
        0 => "x".into(),
        1 => "y".into(),
        2 => "z".into(),
        _ => format!("x{i}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_2d() {
        let t = Trajectory::new(
            vec![
                TrajectoryLabel::Quantile { p: 0.25 },
                TrajectoryLabel::Quantile { p: 0.5 },
            ],
            vec![0.0, 0.05, 0.1],
            vec![vec![0.1, 0.2, 0.30000000000000004], vec![0.4, 0.35, 1.0 / 3.0]],
        )
        .unwrap();
        let text = t.to_csv();
        assert!(text.starts_with("t,x,y\n0,0.1,0.4\n"));
        let back = Trajectory::from_csv(text.as_bytes()).unwrap();
        assert_eq!(back.times(), t.times());
        assert_eq!(back.axis(1), t.axis(1));
    }

    #[test]
    fn rejects_unsorted_times_and_mismatched_axes() {
        let l = vec![TrajectoryLabel::Start { x0: 0.0 }];
        assert!(Trajectory::new(l.clone(), vec![0.0, 0.0], vec![vec![1.0, 2.0]]).is_err());
        assert!(Trajectory::new(l, vec![0.0, 1.0], vec![vec![1.0]]).is_err());
        let a = Trajectory::new(
            vec![TrajectoryLabel::Start { x0: 0.0 }],
            vec![0.0, 1.0],
            vec![vec![0.0, 1.0]],
        )
        .unwrap();
        let b = Trajectory::new(
            vec![TrajectoryLabel::Start { x0: 0.0 }],
            vec![0.0, 2.0],
            vec![vec![0.0, 1.0]],
        )
        .unwrap();
        assert!(matches!(
            Trajectory::from_axes(vec![a, b]),
            Err(Error::Configuration(_))
        ));
    }

    #[test]
    fn bad_csv() {
        assert!(Trajectory::from_csv("".as_bytes()).is_err());
        assert!(Trajectory::from_csv("x,t\n".as_bytes()).is_err());
        assert!(Trajectory::from_csv("t,x\n0,1,2\n".as_bytes()).is_err());
        assert!(Trajectory::from_csv("t,x\n0,a\n".as_bytes()).is_err());
    }
}
