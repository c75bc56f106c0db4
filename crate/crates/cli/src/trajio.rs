//! Snapshot directories: `meta.json` plus one `x,u` CSV per snapshot.

use std::fs;
use std::path::Path;

use fwlab::{Domain, GridFn, Snapshot, Trajectory};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::report::OutDir;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotEntry {
    pub t: f64,
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub domain: Domain,
    pub n: usize,
    pub snapshots: Vec<SnapshotEntry>,
}

/// Writes every snapshot under `dir/` of the output directory.
pub fn write_snapshots(out: &OutDir, dir: &str, traj: &Trajectory) -> Result<(), CliError> {
    let first = traj.first().ok_or_else(|| CliError::Failed("no snapshots to write".into()))?;
    let mut entries = Vec::new();
    for (k, s) in traj.snapshots().iter().enumerate() {
        let file = format!("u_{k:05}.csv");
        out.write_csv(&format!("{dir}/{file}"), |w| s.u.write_csv(w))?;
        entries.push(SnapshotEntry { t: s.t, file });
    }
    let meta = Meta { domain: first.u.domain(), n: first.u.n(), snapshots: entries };
    out.write_json(&format!("{dir}/meta.json"), &meta)?;
    Ok(())
}

/// Reads a directory written by [`write_snapshots`].
pub fn read_snapshots(dir: &Path) -> Result<Trajectory, CliError> {
    let usage = |msg: String| CliError::Usage(msg);
    let meta_path = dir.join("meta.json");
    let text =
        fs::read_to_string(&meta_path).map_err(|e| usage(format!("cannot read {}: {e}", meta_path.display())))?;
    let meta: Meta = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", meta_path.display())))?;
    let mut snaps = Vec::with_capacity(meta.snapshots.len());
    for entry in &meta.snapshots {
        let path = dir.join(&entry.file);
        let text = fs::read_to_string(&path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        let mut values = Vec::with_capacity(meta.n);
        for (lineno, line) in text.lines().enumerate().skip(1) {
            let field = line
                .split(',')
                .nth(1)
                .ok_or_else(|| usage(format!("{}:{}: expected two columns", path.display(), lineno + 1)))?;
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| usage(format!("{}:{}: bad number `{field}`", path.display(), lineno + 1)))?;
            values.push(v);
        }
        if values.len() != meta.n {
            return Err(usage(format!("{} has {} rows, expected {}", path.display(), values.len(), meta.n)));
        }
        snaps.push(Snapshot { t: entry.t, u: GridFn::new(meta.domain, values)? });
    }
    if snaps.is_empty() {
        return Err(usage(format!("{} lists no snapshots", meta_path.display())));
    }
    Ok(Trajectory::from_snapshots(snaps)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let dom = Domain::line(-1.0, 1.0).unwrap();
        let a = GridFn::from_fn(dom, 16, |x| (3.0 * x).sin() / 7.0).unwrap();
        let b = a.scale(1.0 / 3.0);
        let traj = Trajectory::from_snapshots(vec![Snapshot { t: 0.0, u: a }, Snapshot { t: 0.1, u: b }]).unwrap();
        let root = std::env::temp_dir().join(format!("fwlab-trajio-{}", std::process::id()));
        let out = OutDir::create(&root).unwrap();
        write_snapshots(&out, "snaps", &traj).unwrap();
        let back = read_snapshots(&root.join("snaps")).unwrap();
        assert_eq!(back, traj);
        fs::remove_dir_all(&root).unwrap();
    }
}
