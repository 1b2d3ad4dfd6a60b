//! Zero counting, zero curves and the boundary-moment taxonomy.

mod count;
mod moments;
mod trace;

pub use count::{count_zeros, Zero, ZeroInventory, ZeroKind};
pub use moments::{classify_moments, AInterval, Context, Label, Moment, MomentClassification, MomentParams, ZRun};
pub use trace::{trace_zero_curves, DropEvent, Witness, ZeroCurve, ZeroTrace};

use crate::error::Result;
use crate::model::{Side, Tolerances};
use crate::solver::Trajectory;

/// Inventories of every snapshot of a trajectory.
pub fn inventories(traj: &Trajectory, tol: &Tolerances) -> Result<Vec<ZeroInventory>> {
    traj.snapshots.iter().map(|s| count_zeros(s, tol.zero, tol.degenerate)).collect()
}

/// Zero trace of a trajectory with the default match radius.
pub fn trace_trajectory(traj: &Trajectory, tol: &Tolerances) -> Result<ZeroTrace> {
    trace_zero_curves(&inventories(traj, tol)?, None)
}

/// Moment classification of the boundary trace on `side`, using per-step
/// sup-norms as the scale.
pub fn classify_side(traj: &Trajectory, side: Side, tol: &Tolerances) -> Result<MomentClassification> {
    let b = &traj.boundary;
    classify_moments(&b.times, b.side(side), Some(&b.scales), tol.zero, tol.moment_window, tol.alternations)
}
