use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::model::{Snapshot, Tolerances};
use crate::solver::{BoundaryTrace, SolverMeta, Trajectory};
use crate::zeros::{count_zeros, trace_zero_curves, ZeroInventory, ZeroTrace};

/// Difference of two solutions sampled as a trajectory. Samples whose sup
/// norm is below `τ_z` times that of the underlying solution are flagged
/// degenerate and left out of zero counting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Difference {
    pub trajectory: Trajectory,
    pub degenerate: Vec<bool>,
    /// `max |u|` of the underlying solution at each sample.
    pub reference_scales: Vec<f64>,
}

impl Difference {
    pub fn sup_norms(&self) -> Vec<f64> {
        self.trajectory.snapshots.iter().map(|s| s.scale()).collect()
    }

    pub fn all_degenerate(&self) -> bool {
        self.degenerate.iter().all(|&d| d)
    }

    /// Inventories of the non-degenerate samples.
    pub fn inventories(&self, tol: &Tolerances) -> Result<Vec<ZeroInventory>> {
        self.trajectory
            .snapshots
            .iter()
            .zip(&self.degenerate)
            .filter(|(_, &d)| !d)
            .map(|(s, _)| count_zeros(s, tol.zero, tol.degenerate))
            .collect()
    }

    /// Zero trace of the non-degenerate samples; `None` if there are none.
    pub fn trace(&self, tol: &Tolerances) -> Result<Option<ZeroTrace>> {
        let inv = self.inventories(tol)?;
        if inv.is_empty() {
            return Ok(None);
        }
        trace_zero_curves(&inv, None).map(Some)
    }
}

fn assemble(snapshots: Vec<Snapshot>, reference_scales: Vec<f64>, tau_z: f64, dt: f64, scheme: &str) -> Difference {
    let mut boundary = BoundaryTrace::default();
    for s in &snapshots {
        boundary.push(s);
    }
    let degenerate = snapshots.iter().zip(&reference_scales).map(|(s, r)| s.scale() <= tau_z * r).collect();
    let nodes = snapshots[0].len();
    let steps = snapshots.len() - 1;
    Difference {
        trajectory: Trajectory {
            snapshots,
            boundary,
            residuals: Vec::new(),
            meta: SolverMeta { scheme: scheme.into(), dt, nodes, steps, startup_steps: 0 },
            fronts: None,
        },
        degenerate,
        reference_scales,
    }
}

/// `η(x, t) = u(x, t + T) - u(x, t)` for every sample `t ≥ t₀ + s` whose
/// shift still lies inside the trajectory. `T` must be a whole number of
/// output spacings and the grid must be fixed.
pub fn build_shift_difference(traj: &Trajectory, s: f64, period: f64, tau_z: f64) -> Result<Difference> {
    let snaps = &traj.snapshots;
    if snaps.len() < 2 || !(period > 0.0) {
        return Err(LabError::Trace("shift difference needs a positive period and at least two samples".into()));
    }
    if snaps.windows(2).any(|p| p[0].nodes != p[1].nodes) {
        return Err(LabError::Trace("shift difference needs a fixed grid".into()));
    }
    let spacing = snaps[1].t - snaps[0].t;
    let lag = (period / spacing).round() as usize;
    if lag == 0 || (lag as f64 * spacing - period).abs() > 1e-6 * period {
        return Err(LabError::Trace(format!("period {period} is not a multiple of the output spacing {spacing}")));
    }
    let t0 = snaps[0].t + s;
    let first = snaps.partition_point(|p| p.t < t0 - 1e-9 * spacing);
    if first + lag >= snaps.len() {
        return Err(LabError::Trace(format!(
            "horizon too short: need samples up to t={} but the trajectory ends at t={}",
            t0 + period,
            snaps[snaps.len() - 1].t
        )));
    }
    let mut out = Vec::new();
    let mut refs = Vec::new();
    for k in first..snaps.len() - lag {
        let (a, b) = (&snaps[k], &snaps[k + lag]);
        let eta = a.values.iter().zip(&b.values).map(|(u1, u2)| u2 - u1).collect();
        out.push(Snapshot::new(a.t, a.nodes.clone(), eta)?);
        refs.push(a.scale().max(b.scale()));
    }
    Ok(assemble(out, refs, tau_z, spacing, "time-shift difference"))
}

/// `η(x, t) = u(x0 + x, t) - u(x0 - x, t)` on the symmetric common interval
/// `[-d, d]`, `d = min(h - x0, x0 - g)`, resampled by cubic interpolation on
/// an odd number of nodes so that `x = 0` is a node.
pub fn build_reflection_difference(traj: &Trajectory, x0: f64, tau_z: f64) -> Result<Difference> {
    let snaps = &traj.snapshots;
    let first = &snaps[0];
    let (g0, h0) = (first.nodes[0], first.nodes[first.len() - 1]);
    if !(x0 >= g0 && x0 <= h0) {
        return Err(LabError::Trace(format!("reflection center {x0} outside [{g0}, {h0}]")));
    }
    let m = first.len() | 1;
    let mut out = Vec::with_capacity(snaps.len());
    let mut refs = Vec::with_capacity(snaps.len());
    for s in snaps {
        let (g, h) = (s.nodes[0], s.nodes[s.len() - 1]);
        let d = (h - x0).min(x0 - g);
        if !(d > 0.0) {
            return Err(LabError::Trace(format!("common interval empty at t={}", s.t)));
        }
        let nodes = crate::model::uniform_nodes(-d, d, m);
        let eta = nodes
            .iter()
            .enumerate()
            .map(|(k, &x)| if 2 * k + 1 == m { 0.0 } else { s.interpolate_cubic(x0 + x) - s.interpolate_cubic(x0 - x) })
            .collect();
        out.push(Snapshot::new(s.t, nodes, eta)?);
        refs.push(s.scale());
    }
    let spacing = if snaps.len() > 1 { snaps[1].t - snaps[0].t } else { traj.meta.dt };
    Ok(assemble(out, refs, tau_z, spacing, "reflection difference"))
}
