use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::model::Snapshot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroKind {
    Simple,
    Multiple,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Zero {
    pub location: f64,
    pub kind: ZeroKind,
    pub at_boundary: bool,
    /// Smallest `|u_x|` estimate at the zero (cluster minimum, or the
    /// secant slope for a sign change between nodes).
    pub slope: f64,
}

/// Zeros of one snapshot on the closed interval spanned by its nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroInventory {
    pub t: f64,
    pub zeros: Vec<Zero>,
    pub dx: f64,
    pub scale: f64,
    pub interval: (f64, f64),
}

impl ZeroInventory {
    /// `Z(t)`
    pub fn count(&self) -> usize {
        self.zeros.len()
    }

    pub fn has_multiple(&self) -> bool {
        self.zeros.iter().any(|z| z.kind == ZeroKind::Multiple)
    }

    pub fn locations(&self) -> Vec<f64> {
        self.zeros.iter().map(|z| z.location).collect()
    }
}

/// Counts zeros: clusters of consecutive nodes with `|u| ≤ τ_z·scale` count
/// once each, and so does every strict sign change between adjacent nodes
/// outside clusters. A cluster is multiple when its smallest slope is at
/// most `τ_d·scale/Δx` or when both flanks carry the same sign.
pub fn count_zeros(s: &Snapshot, tau_z: f64, tau_d: f64) -> Result<ZeroInventory> {
    let n = s.len();
    let scale = s.scale();
    let near: Vec<bool> = s.values.iter().map(|v| v.abs() <= tau_z * scale).collect();
    if scale == 0.0 || near.iter().all(|&b| b) {
        return Err(LabError::ProfileZero { time: s.t });
    }
    let dx = s.dx();
    let slope_floor = tau_d * scale / dx;
    let mut zeros = Vec::new();
    let mut i = 0;
    while i < n {
        if near[i] {
            let p = i;
            while i + 1 < n && near[i + 1] {
                i += 1;
            }
            let q = i;
            let slope = (p..=q).map(|k| s.derivs[k].abs()).fold(f64::INFINITY, f64::min);
            let flanks_agree = p > 0 && q + 1 < n && s.values[p - 1].signum() == s.values[q + 1].signum();
            let kind = if slope <= slope_floor || flanks_agree { ZeroKind::Multiple } else { ZeroKind::Simple };
            let location = if p == q {
                s.nodes[p]
            } else {
                // node of smallest |u| stands for the cluster
                let k = (p..=q).min_by(|&a, &b| s.values[a].abs().total_cmp(&s.values[b].abs())).unwrap();
                s.nodes[k]
            };
            zeros.push(Zero { location, kind, at_boundary: p == 0 || q == n - 1, slope });
        } else if i + 1 < n && !near[i + 1] && s.values[i].signum() != s.values[i + 1].signum() {
            let (u0, u1) = (s.values[i], s.values[i + 1]);
            let (x0, x1) = (s.nodes[i], s.nodes[i + 1]);
            let location = x0 + (x1 - x0) * u0 / (u0 - u1);
            let slope = ((u1 - u0) / (x1 - x0)).abs();
            zeros.push(Zero { location, kind: ZeroKind::Simple, at_boundary: false, slope });
        }
        i += 1;
    }
    Ok(ZeroInventory { t: s.t, zeros, dx, scale, interval: (s.nodes[0], s.nodes[n - 1]) })
}
