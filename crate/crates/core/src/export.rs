//! Text and binary output formats.
//!
//! - `trace.csv`: `t,Z,w1,w2` per output sample, plus `g,h,Q` for free
//!   boundaries.
//! - `events.log`: one JSON object per line, `{"t", "type", "payload"}`,
//!   with `type` one of `drop`, `merge`, `boundary-exit`, `moment-label`,
//!   sorted by time.
//! - profiles CSV: long format `t,x,u`.
//! - binary dump: the 8-byte magic `ZLABSNP1`, then `M` and the snapshot
//!   count as little-endian `u64`, then one row of `2M + 1` little-endian
//!   `f64` per snapshot: `t`, the `M` nodes, the `M` values.

use std::fmt::Write as _;
use std::io::{Read, Write};

use serde_json::json;

use crate::error::{LabError, Result};
use crate::model::{Side, Snapshot};
use crate::solver::Trajectory;
use crate::zeros::{MomentClassification, Witness, ZeroTrace};

pub const BINARY_MAGIC: &[u8; 8] = b"ZLABSNP1";

/// `t,Z,w1,w2[,g,h,Q]` per snapshot.
pub fn trace_csv(traj: &Trajectory, zt: &ZeroTrace) -> String {
    let fronts = traj.fronts.as_deref();
    let mut s = String::from(if fronts.is_some() { "t,Z,w1,w2,g,h,Q\n" } else { "t,Z,w1,w2\n" });
    let mut j = 0;
    for (snap, inv) in traj.snapshots.iter().zip(&zt.inventories) {
        let _ = write!(s, "{},{},{},{}", snap.t, inv.count(), snap.left(), snap.right());
        if let Some(f) = fronts {
            while j + 1 < f.len() && f[j + 1].t <= snap.t {
                j += 1;
            }
            let _ = write!(s, ",{},{},{}", f[j].g, f[j].h, f[j].q);
        }
        s.push('\n');
    }
    s
}

/// Drop, merge, boundary-exit and moment-label records as JSON lines.
pub fn events_log(zt: &ZeroTrace, moments: &[MomentClassification; 2]) -> String {
    let mut records: Vec<(f64, serde_json::Value)> = Vec::new();
    for d in &zt.drops {
        records.push((
            d.t_after,
            json!({"t": d.t_after, "type": "drop", "payload": {"t_before": d.t_before, "z_before": d.z_before, "z_after": d.z_after}}),
        ));
        for w in &d.witnesses {
            match w {
                Witness::Merge { location } => {
                    records.push((d.t_after, json!({"t": d.t_after, "type": "merge", "payload": {"location": location}})))
                }
                Witness::BoundaryExit { side, location } => records.push((
                    d.t_after,
                    json!({"t": d.t_after, "type": "boundary-exit", "payload": {"side": side.name(), "location": location}}),
                )),
                Witness::Unattributed { .. } => {}
            }
        }
    }
    for side in Side::BOTH {
        for m in &moments[side.index() - 1].moments {
            records.push((
                m.t_start,
                json!({"t": m.t_start, "type": "moment-label", "payload": {"side": side.name(), "label": m.label.to_string(), "t_end": m.t_end}}),
            ));
        }
    }
    records.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = String::new();
    for (_, r) in records {
        out.push_str(&r.to_string());
        out.push('\n');
    }
    out
}

/// Long-format `t,x,u`.
pub fn profiles_csv(snapshots: &[Snapshot]) -> String {
    let mut s = String::from("t,x,u\n");
    for snap in snapshots {
        for (x, u) in snap.nodes.iter().zip(&snap.values) {
            let _ = writeln!(s, "{},{x},{u}", snap.t);
        }
    }
    s
}

pub fn write_binary(snapshots: &[Snapshot], mut w: impl Write) -> Result<()> {
    let m = snapshots.first().map_or(0, |s| s.len());
    if snapshots.iter().any(|s| s.len() != m) {
        return Err(LabError::Io("binary dump needs a constant node count".into()));
    }
    w.write_all(BINARY_MAGIC)?;
    w.write_all(&(m as u64).to_le_bytes())?;
    w.write_all(&(snapshots.len() as u64).to_le_bytes())?;
    for s in snapshots {
        w.write_all(&s.t.to_le_bytes())?;
        for v in s.nodes.iter().chain(&s.values) {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_binary(mut r: impl Read) -> Result<Vec<Snapshot>> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != BINARY_MAGIC {
        return Err(LabError::Parse("not a snapshot dump".into()));
    }
    let mut word = [0u8; 8];
    let mut next_u64 = |r: &mut dyn Read| -> Result<u64> {
        r.read_exact(&mut word)?;
        Ok(u64::from_le_bytes(word))
    };
    let m = next_u64(&mut r)? as usize;
    let count = next_u64(&mut r)? as usize;
    let mut out = Vec::with_capacity(count);
    let mut row = vec![0u8; 8 * (2 * m + 1)];
    for _ in 0..count {
        r.read_exact(&mut row)?;
        let vals: Vec<f64> = row.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
        out.push(Snapshot::new(vals[0], vals[1..=m].to_vec(), vals[m + 1..].to_vec())?);
    }
    Ok(out)
}
