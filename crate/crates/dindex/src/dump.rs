//! Trajectory dump: `pub_id,t,n_f,n_b,n_r,d`, one row per observed window,
//! sorted by `(pub_id, t)`. `d` is empty when NULL. A truncated trajectory
//! (windows capped below its horizon) gets one extra row with `t = final`.

use std::fs::File;
use std::path::Path;

use dindex_core::{Corpus, DCell, DComponents, DTrajectory, DValue, EligibilityRule, PublicationId};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fsutil;

pub const FINAL: &str = "final";

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    pub_id: u64,
    t: String,
    n_f: u32,
    n_b: u32,
    n_r: u32,
    d: Option<f64>,
}

impl Row {
    fn new(traj: &DTrajectory, t: String, cell: &DCell) -> Row {
        let c = cell.components;
        Row { pub_id: traj.publication.0, t, n_f: c.n_f, n_b: c.n_b, n_r: c.n_r, d: cell.value.get() }
    }
}

/// `trajs` must be in corpus (ascending id) order.
pub fn write(trajs: &[DTrajectory], path: &Path) -> Result<()> {
    fsutil::write_atomic(path, |w| {
        let mut csv = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        csv.write_record(["pub_id", "t", "n_f", "n_b", "n_r", "d"])?;
        for traj in trajs {
            for (t, cell) in traj.cells.iter().enumerate() {
                csv.serialize(Row::new(traj, t.to_string(), cell))?;
            }
            if !traj.is_complete() {
                csv.serialize(Row::new(traj, FINAL.into(), &traj.final_cell))?;
            }
        }
        csv.flush()
    })
}

/// Reads a dump back into trajectories aligned with `c`, checking every
/// value against `rule`.
pub fn read(c: &Corpus, rule: EligibilityRule, path: &Path) -> Result<Vec<DTrajectory>> {
    let bad = |row: u64, message: String| Error::Format { path: path.to_path_buf(), message: format!("row {row}: {message}") };
    let file = File::open(path).map_err(Error::io(path))?;
    let mut reader = csv::Reader::from_reader(std::io::BufReader::new(file));
    let headers = reader.headers().map_err(|e| bad(1, e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["pub_id", "t", "n_f", "n_b", "n_r", "d"] {
        return Err(bad(1, "unexpected header".into()));
    }

    let mut out: Vec<DTrajectory> = Vec::with_capacity(c.len());
    // trajectory still expecting windows or a final row
    let mut open: Option<DTrajectory> = None;
    for (k, row) in reader.deserialize::<Row>().enumerate() {
        let line = k as u64 + 2;
        let row = row.map_err(|e| bad(line, e.to_string()))?;
        let i = c
            .index_of(PublicationId(row.pub_id))
            .ok_or_else(|| bad(line, format!("unknown publication {}", row.pub_id)))?;
        let components = DComponents { n_f: row.n_f, n_b: row.n_b, n_r: row.n_r };
        let value = DValue::evaluate(components, c.references(i).len(), rule);
        if value.get() != row.d {
            return Err(bad(
                line,
                format!(
                    "d for publication {} does not match eligibility rule ({}, {}); rerun `dindex sweep` with the same settings",
                    row.pub_id, rule.min_refs, rule.min_cites
                ),
            ));
        }
        let cell = DCell { components, value };

        if let Some(traj) = open.as_mut().filter(|t| t.publication.0 == row.pub_id) {
            if row.t == FINAL {
                traj.final_cell = cell;
            } else if row.t.parse::<usize>().ok() == Some(traj.cells.len()) {
                traj.cells.push(cell);
                if !traj.is_complete() {
                    continue;
                }
                traj.final_cell = cell;
            } else {
                return Err(bad(line, format!("unexpected window {:?}", row.t)));
            }
            out.extend(open.take());
            continue;
        }
        if open.is_some() {
            return Err(bad(line, "previous trajectory has neither all windows nor a final row".into()));
        }
        if i as usize != out.len() {
            return Err(bad(line, format!("publication {} out of order or predecessors missing", row.pub_id)));
        }
        if row.t != "0" {
            return Err(bad(line, "trajectory must start at t = 0".into()));
        }
        let traj = DTrajectory {
            publication: c.id(i),
            publication_year: c.year(i),
            horizon: c.horizon(i),
            cells: vec![cell],
            final_cell: cell,
        };
        if traj.is_complete() {
            out.push(traj);
        } else {
            open = Some(traj);
        }
    }
    if open.is_some() {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: "last trajectory has neither all windows nor a final row".into(),
        });
    }
    if out.len() != c.len() {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: format!("dump covers {} of {} publications", out.len(), c.len()),
        });
    }
    Ok(out)
}
