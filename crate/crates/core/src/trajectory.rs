//! Time-stamped snapshots plus named scalar diagnostic series.

use std::collections::BTreeMap;
use std::io::Write;

use crate::error::{Error, Result};
use crate::grid::{GridFn, ScalarSeries};

/// Series written by the strong solver, in CSV column order.
pub const STRONG_SERIES: [&str; 7] = ["mass", "l2", "linf", "m1", "m2", "xi1", "xi2"];

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub u: GridFn,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    snapshots: Vec<Snapshot>,
    series: BTreeMap<String, ScalarSeries>,
    /// Column order for CSV output.
    columns: Vec<String>,
}

impl Trajectory {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a trajectory from snapshots alone.
    pub fn from_snapshots(snapshots: Vec<Snapshot>) -> Result<Self> {
        let mut traj = Self::new();
        for s in snapshots {
            traj.push_snapshot(s.t, s.u)?;
        }
        Ok(traj)
    }

    pub fn push_snapshot(&mut self, t: f64, u: GridFn) -> Result<()> {
        if let Some(last) = self.snapshots.last() {
            if t <= last.t {
                return Err(Error::InvalidTrajectory(format!("snapshot time {t} does not follow {}", last.t)));
            }
            last.u.check_compatible(&u)?;
        }
        self.snapshots.push(Snapshot { t, u });
        Ok(())
    }

    /// Appends one row of named diagnostics at time `t`.
    pub fn record(&mut self, t: f64, values: &[(&str, f64)]) -> Result<()> {
        for (name, v) in values {
            if !self.series.contains_key(*name) {
                self.columns.push(name.to_string());
            }
            self.series.entry(name.to_string()).or_default().push(t, *v)?;
        }
        Ok(())
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    pub fn into_snapshots(self) -> Vec<Snapshot> {
        self.snapshots
    }

    pub fn first(&self) -> Option<&Snapshot> {
        self.snapshots.first()
    }

    pub fn last(&self) -> Option<&Snapshot> {
        self.snapshots.last()
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }

    pub fn series(&self, name: &str) -> Option<&ScalarSeries> {
        self.series.get(name)
    }

    pub fn series_names(&self) -> &[String] {
        &self.columns
    }

    /// Snapshot nearest to time `t`.
    pub fn at(&self, t: f64) -> Option<&Snapshot> {
        self.snapshots.iter().min_by(|a, b| (a.t - t).abs().total_cmp(&(b.t - t).abs()))
    }

    /// Applies `f` to every snapshot, dropping the series.
    pub fn map_snapshots<F: Fn(&GridFn) -> GridFn>(&self, f: F) -> Trajectory {
        Trajectory {
            snapshots: self.snapshots.iter().map(|s| Snapshot { t: s.t, u: f(&s.u) }).collect(),
            series: BTreeMap::new(),
            columns: Vec::new(),
        }
    }

    /// Series CSV: `t` followed by every recorded series in insertion order.
    pub fn write_series_csv<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "t")?;
        for c in &self.columns {
            write!(w, ",{c}")?;
        }
        writeln!(w)?;
        let Some(first) = self.columns.first() else {
            return Ok(());
        };
        let times = self.series[first].times();
        for (row, t) in times.iter().enumerate() {
            write!(w, "{t:.16e}")?;
            for c in &self.columns {
                let s = &self.series[c];
                if s.times().get(row) != Some(t) {
                    return Err(Error::InvalidTrajectory(format!("series {c} is not aligned with {first}")));
                }
                write!(w, ",{:.16e}", s.values()[row])?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}
