//! Plain-text density series format.
//!
//! ```text
//! # grid x_min=<f> x_max=<f> n=<int> dt=<f>
//! t,v_0,v_1,...,v_{n-1}
//! ```
//!
//! One row per frame. Numbers are written with the shortest representation
//! that round-trips, so `export(ingest(f))` is a canonical form of `f`.

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::density::{DensitySeries, DensityTolerances};
use crate::error::{Error, Result};
use crate::grid::Grid1D;

pub fn ingest_series<R: BufRead>(reader: R, tol: &DensityTolerances) -> Result<DensitySeries> {
    let mut lines = reader.lines().enumerate();
    let (grid, dt) = loop {
        match lines.next() {
            Some((i, line)) => {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                break parse_header(&line, i + 1)?;
            }
            None => {
                return Err(Error::Format {
                    line: 1,
                    message: "missing `# grid` header".into(),
                })
            }
        }
    };

    let mut rows = Vec::new();
    for (i, line) in lines {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let lineno = i + 1;
        let mut fields = line.split(',').map(|f| parse_number(f, lineno));
        let t = fields.next().ok_or_else(|| Error::Format {
            line: lineno,
            message: "empty row".into(),
        })??;
        let values = fields.collect::<Result<Vec<_>>>()?;
        if values.len() != grid.len() {
            return Err(Error::Format {
                line: lineno,
                message: format!("expected {} values, found {}", grid.len(), values.len()),
            });
        }
        rows.push((t, values));
    }
    if rows.is_empty() {
        return Err(Error::Format {
            line: 2,
            message: "no frames".into(),
        });
    }
    DensitySeries::from_rows(grid, dt, rows, tol)
}

pub fn read_series_file(path: impl AsRef<Path>, tol: &DensityTolerances) -> Result<DensitySeries> {
    let file = std::fs::File::open(path)?;
    ingest_series(std::io::BufReader::new(file), tol)
}

pub fn export_series<W: Write>(series: &DensitySeries, mut out: W) -> Result<()> {
    out.write_all(series_to_string(series).as_bytes())?;
    Ok(())
}

pub fn series_to_string(series: &DensitySeries) -> String {
    let g = series.grid();
    let mut s = format!(
        "# grid x_min={} x_max={} n={} dt={}\n",
        g.x_min(),
        g.x_max(),
        g.len(),
        series.dt()
    );
    for f in series.frames() {
        write!(s, "{}", f.t()).unwrap();
        for v in f.values() {
            write!(s, ",{v}").unwrap();
        }
        s.push('\n');
    }
    s
}

fn parse_number(field: &str, line: usize) -> Result<f64> {
    let field = field.trim();
    field.parse::<f64>().map_err(|_| Error::Format {
        line,
        message: format!("`{field}` is not a number"),
    })
}

fn parse_header(line: &str, lineno: usize) -> Result<(Grid1D, f64)> {
    let err = |message: String| Error::Format {
        line: lineno,
        message,
    };
    let rest = line
        .trim()
        .strip_prefix('#')
        .map(str::trim_start)
        .and_then(|r| r.strip_prefix("grid"))
        .ok_or_else(|| err("header must start with `# grid`".into()))?;

    let (mut x_min, mut x_max, mut n, mut dt) = (None, None, None, None);
    for token in rest.split_whitespace() {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| err(format!("malformed header field `{token}`")))?;
        let slot = match key {
            "x_min" => &mut x_min,
            "x_max" => &mut x_max,
            "dt" => &mut dt,
            "n" => {
                n = Some(
                    value
                        .parse::<usize>()
                        .map_err(|_| err(format!("n=`{value}` is not a node count")))?,
                );
                continue;
            }
            other => return Err(err(format!("unknown header field `{other}`"))),
        };
        *slot = Some(parse_number(value, lineno)?);
    }
    let missing = |name: &str| err(format!("header is missing `{name}`"));
    let grid = Grid1D::new(
        x_min.ok_or_else(|| missing("x_min"))?,
        x_max.ok_or_else(|| missing("x_max"))?,
        n.ok_or_else(|| missing("n"))?,
    )
    .map_err(|e| err(e.to_string()))?;
    let dt = dt.ok_or_else(|| missing("dt"))?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(err(format!("dt must be positive, got {dt}")));
    }
    Ok((grid, dt))
}
