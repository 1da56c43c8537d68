//! CSV grid files with a JSON sidecar.

use std::fs::File;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::GridDensity;
use crate::error::{Error, Result};
use crate::format::sig;
use crate::quadrature::PowerTail;

/// Grid geometry stored next to a CSV file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSidecar {
    pub x0: f64,
    pub dx: f64,
    pub n: usize,
    pub tail_exponent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_left: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_right: Option<f64>,
}

impl GridSidecar {
    pub fn of(g: &GridDensity) -> Self {
        GridSidecar {
            x0: g.x0(),
            dx: g.dx(),
            n: g.len(),
            tail_exponent: g.tail_exponent(),
            tail_left: g.tail().map(|t| t.left),
            tail_right: g.tail().map(|t| t.right),
        }
    }
}

/// `grid.csv` → `grid.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// Writes `x,value` rows and the sidecar.
pub fn write_grid(g: &GridDensity, csv_path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(csv_path).map_err(csv_err)?;
    w.write_record(["x", "value"]).map_err(csv_err)?;
    for (x, v) in g.nodes() {
        w.write_record([sig(x), sig(v)]).map_err(csv_err)?;
    }
    w.flush()?;
    let side = serde_json::to_string_pretty(&GridSidecar::of(g)).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(sidecar_path(csv_path), side)?;
    Ok(())
}

/// Reads a grid written by [`write_grid`]; the sidecar is optional.
pub fn read_grid(csv_path: &Path) -> Result<GridDensity> {
    let mut r = csv::Reader::from_reader(File::open(csv_path)?);
    let headers = r.headers().map_err(csv_err)?.clone();
    if headers.iter().collect::<Vec<_>>() != ["x", "value"] {
        return Err(Error::Io(format!("expected header x,value in {}", csv_path.display())));
    }
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let parse = |i: usize| -> Result<f64> {
            rec[i].trim().parse().map_err(|_| Error::Io(format!("bad number {:?}", &rec[i])))
        };
        xs.push(parse(0)?);
        vs.push(parse(1)?);
    }
    if xs.len() < 2 {
        return Err(Error::Io("grid file has fewer than two rows".into()));
    }
    let side = sidecar_path(csv_path);
    let (x0, dx, tail) = if side.exists() {
        let s: GridSidecar =
            serde_json::from_str(&std::fs::read_to_string(&side)?).map_err(|e| Error::Io(e.to_string()))?;
        if s.n != xs.len() {
            return Err(Error::Io(format!("sidecar says {} rows, csv has {}", s.n, xs.len())));
        }
        let tail = s.tail_exponent.map(|g| PowerTail {
            exponent: g,
            left: s.tail_left.unwrap_or(0.0),
            right: s.tail_right.unwrap_or(0.0),
        });
        (s.x0, s.dx, tail)
    } else {
        (xs[0], (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64, None)
    };
    GridDensity::from_values(x0, dx, vs, tail)
}
