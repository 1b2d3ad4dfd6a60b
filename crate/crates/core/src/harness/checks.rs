use serde::{Deserialize, Serialize};

use super::CheckReport;
use crate::error::{LabError, Result};
use crate::model::{BoundaryCondition, BoundaryPair, Side, Snapshot, Tolerances};
use crate::solver::Trajectory;
use crate::zeros::{classify_side, count_zeros, trace_trajectory, Context, MomentClassification, ZeroTrace};

/// First sample at or after `t`, clamped to the last one.
fn index_at(times: &[f64], t: f64) -> usize {
    let span = (times[times.len() - 1] - times[0]).abs().max(1.0);
    times.partition_point(|&s| s < t - 1e-12 * span).min(times.len() - 1)
}

/// `Z(t₂) ≤ Z(t₁)` for all `burn_in ≤ t₁ < t₂`; every increase between
/// consecutive samples is a violation. `burn_in` is measured from the first
/// sample.
pub fn check_monotone(zt: &ZeroTrace, burn_in: f64) -> CheckReport {
    let mut rep = CheckReport::new("monotone", &[("burn_in", burn_in)]);
    let times = zt.times();
    if times.is_empty() {
        rep.note("empty trace");
        return rep;
    }
    let counts = zt.counts();
    let k0 = index_at(&times, times[0] + burn_in);
    for k in k0 + 1..counts.len() {
        if counts[k] > counts[k - 1] {
            rep.violate(times[k], format!("Z ≤ {} (value at t={})", counts[k - 1], times[k - 1]), format!("Z = {}", counts[k]));
        }
    }
    rep
}

/// Strict drops forced by degeneracies:
/// - every episode of consecutive samples carrying a multiple zero is
///   followed by `Z(before) > Z(after)`, with `before` and `after` taken
///   `window` samples outside the episode;
/// - every NZN or ZZN boundary moment is bracketed the same way;
/// - the number of such moments after burn-in is at most `Z` at burn-in.
///
/// Brackets never reach back before burn-in; events inside burn-in and
/// brackets running past the end of the trace are reported as notes.
pub fn check_strict_drop(zt: &ZeroTrace, moments: &[&MomentClassification], window: usize, burn_in: f64) -> CheckReport {
    let mut rep = CheckReport::new("strict-drop", &[("drop_window", window as f64), ("burn_in", burn_in)]);
    let times = zt.times();
    if times.is_empty() {
        rep.note("empty trace");
        return rep;
    }
    let counts = zt.counts();
    let n = counts.len();
    let t_burn = times[0] + burn_in;
    // last sample not after burn-in, so that every later event follows it
    let span = (times[n - 1] - times[0]).abs().max(1.0);
    let k_burn = times.partition_point(|&s| s <= t_burn + 1e-12 * span).max(1) - 1;
    let bracket = |rep: &mut CheckReport, what: &str, t: f64, ka: usize, kb: usize| {
        if t < t_burn {
            rep.note(format!("{what} at t={t}: inside burn-in"));
            return;
        }
        let before = ka.saturating_sub(window).max(k_burn);
        let after = kb + window;
        if after >= n {
            if counts[before] <= counts[n - 1] {
                rep.note(format!("{what} at t={t}: trace ends before the drop window closes"));
            }
            return;
        }
        if counts[before] <= counts[after] {
            rep.violate(
                t,
                format!("{what}: Z(t={}) > Z(t={})", times[before], times[after]),
                format!("{} then {}", counts[before], counts[after]),
            );
        }
    };

    let mut k = 0;
    let mut episodes = 0;
    while k < n {
        if zt.inventories[k].has_multiple() {
            let ka = k;
            while k + 1 < n && zt.inventories[k + 1].has_multiple() {
                k += 1;
            }
            episodes += 1;
            bracket(&mut rep, "multiple zero", times[ka], ka, k);
        }
        k += 1;
    }

    let mut forcing = 0;
    for mc in moments {
        for m in &mc.moments {
            if m.label.1 != Context::N || m.label.0 == Context::X {
                continue;
            }
            let ka = index_at(&times, m.t_start);
            bracket(&mut rep, &format!("{} moment", m.label), m.t_start, ka, ka);
            if m.t_start >= t_burn {
                forcing += 1;
            }
        }
    }
    let z0 = counts[k_burn];
    if forcing > z0 {
        rep.violate(t_burn, format!("NZN + ZZN moments after burn-in ≤ Z = {z0}"), format!("{forcing} moments"));
    }
    rep.params.insert("multiple_episodes".into(), episodes as f64);
    rep.params.insert("forcing_moments".into(), forcing as f64);
    rep
}

/// Relative jump in the finite-difference velocity of an end that still
/// counts as continuous within a Z-run.
pub const H1_TOL: f64 = 0.1;

/// Per-sample grid spacing of a trajectory's boundary trace.
fn spacings(traj: &Trajectory) -> Vec<f64> {
    let b = &traj.boundary;
    let cells = (traj.meta.nodes.max(2) - 1) as f64;
    (0..b.len()).map(|k| (b.positions[1][k] - b.positions[0][k]) / cells).collect()
}

/// Boundary hypotheses on both sides, `i = 1` left and `i = 2` right:
/// - H1: within each Z-run the velocity of `ξ_i` has no jump beyond
///   [`H1_TOL`];
/// - H2: at an NZ* moment `s`, with `σ` the sign of `w_i` just before,
///   `σ·(-1)^i·u_x(ξ_i(s), s) ≥ -τ_d·scale/Δx`;
/// - H3: for `s < t ≤ s + W` samples, `w_i(t)` does not carry the sign
///   opposite to `u` at the interior node next to `ξ_i(s)` (both beyond
///   `τ_z·scale`).
///
/// H2 and H3 skip moments inside burn-in. The alternative
/// `(-1)^i·w_i·u_x(ξ_i) ≤ 0` is evaluated on the same
/// windows and reported in the notes and the `h3_star_failures` parameter
/// without affecting the verdict.
pub fn check_hypotheses(traj: &Trajectory, moments: [&MomentClassification; 2], tol: &Tolerances) -> Result<CheckReport> {
    let b = &traj.boundary;
    let n = b.len();
    if moments.iter().any(|m| m.zero.len() != n) {
        return Err(LabError::Trace("moment classification does not match the boundary trace".into()));
    }
    if b.inner.iter().any(|v| v.len() != n) {
        return Err(LabError::Trace("boundary trace lacks interior neighbour values".into()));
    }
    let window = tol.moment_window;
    let mut rep = CheckReport::new(
        "hypotheses",
        &[("tau_z", tol.zero), ("tau_d", tol.degenerate), ("window", window as f64), ("h1_tol", H1_TOL)],
    );
    let dx = spacings(traj);
    let t_burn = b.times.first().copied().unwrap_or(0.0) + tol.burn_in_steps as f64 * traj.meta.dt;
    let mut star_fail = 0usize;
    let mut star_checked = 0usize;
    for side in Side::BOTH {
        let i = side.index() - 1;
        let sgn = side.sign();
        let mc = moments[i];
        let w = &b.values[i];
        let ux = &b.slopes[i];
        let xi = &b.positions[i];
        let name = side.name();

        for run in mc.runs.iter().filter(|r| !r.virtual_run && r.end >= r.start + 2) {
            let v: Vec<f64> = (run.start..run.end).map(|k| (xi[k + 1] - xi[k]) / (b.times[k + 1] - b.times[k])).collect();
            let vmax = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            for k in 1..v.len() {
                let jump = (v[k] - v[k - 1]).abs();
                if jump > H1_TOL * (1.0 + vmax) {
                    rep.violate(
                        b.times[run.start + k],
                        format!("H1 on the {name}: continuous end velocity in the Z-run"),
                        format!("velocity jump {jump:e}"),
                    );
                    break;
                }
            }
        }

        for m in mc.moments.iter().filter(|m| m.label.0 == Context::N && m.t_start >= t_burn) {
            let run = &mc.runs[m.run];
            let (pre, s) = if run.virtual_run { (run.start, run.end) } else { (run.start - 1, run.start) };
            let sigma = w[pre].signum();
            let slope = if run.virtual_run {
                let th = (m.t_start - b.times[pre]) / (b.times[s] - b.times[pre]);
                ux[pre] + th * (ux[s] - ux[pre])
            } else {
                ux[s]
            };
            let floor = tol.degenerate * b.scales[s] / dx[s];
            if sigma * sgn * slope < -floor {
                rep.violate(
                    m.t_start,
                    format!("H2 on the {name}: σ·(-1)^i·u_x ≥ {:e}", -floor),
                    format!("σ = {sigma}, u_x = {slope:e}"),
                );
            }
        }

        let mut starts: Vec<usize> = (0..n).filter(|&k| mc.zero[k]).collect();
        starts.extend(mc.runs.iter().filter(|r| r.virtual_run).map(|r| r.end));
        starts.sort_unstable();
        for s in starts.into_iter().filter(|&s| b.times[s] >= t_burn) {
            let near = b.inner[i][s];
            let near_ok = near.abs() > tol.zero * b.scales[s];
            let mut star_bad = false;
            let mut any = false;
            for j in s + 1..=(s + window).min(n - 1) {
                if w[j].abs() <= tol.zero * b.scales[j] {
                    continue;
                }
                any = true;
                if near_ok && w[j] * near < 0.0 {
                    rep.violate(
                        b.times[j],
                        format!("H3 on the {name}: w(t)·u(x,s) ≥ 0 after s={}", b.times[s]),
                        format!("w = {:e}, u(x,s) = {near:e}", w[j]),
                    );
                    break;
                }
                if sgn * w[j].signum() * ux[j] > tol.degenerate * b.scales[j] / dx[j] {
                    star_bad = true;
                }
            }
            if any {
                star_checked += 1;
                if star_bad {
                    star_fail += 1;
                }
            }
        }
    }
    rep.params.insert("h3_star_failures".into(), star_fail as f64);
    rep.note(format!("H3* holds at {} of {star_checked} Z-moments with nonzero trace afterwards", star_checked - star_fail));
    Ok(rep)
}

/// Labels allowed for solutions: both flanks N or Z.
pub fn check_taxonomy(moments: [&MomentClassification; 2], isolated: [bool; 2]) -> CheckReport {
    let mut rep = CheckReport::new("taxonomy", &[]);
    for side in Side::BOTH {
        let mc = moments[side.index() - 1];
        for m in &mc.moments {
            if m.label.has_x() {
                rep.violate(m.t_start, format!("label in {{NZN, NZZ, ZZN, ZZZ}} on the {}", side.name()), m.label.to_string());
            }
        }
        if isolated[side.index() - 1] {
            if let Some(r) = mc.runs.iter().find(|r| r.samples() > 1) {
                rep.violate(r.t_start, format!("isolated boundary zeros on the {}", side.name()), format!("Z-run of {} samples", r.samples()));
            }
        }
        let mut labels: Vec<String> = mc.labels().iter().map(|l| l.to_string()).collect();
        labels.sort();
        labels.dedup();
        rep.note(format!("{}: {} runs, labels {{{}}}", side.name(), mc.runs.len(), labels.join(", ")));
    }
    rep
}

/// Node near the middle of the grid with the largest `|u|` within `window`
/// nodes of the midpoint; `None` when `u` is near zero there.
pub fn choose_split(s: &Snapshot, window: usize, tau_z: f64) -> Option<(usize, f64)> {
    let n = s.len();
    let mid = n / 2;
    let lo = mid.saturating_sub(window).max(2);
    let hi = (mid + window).min(n.saturating_sub(3));
    let j = (lo..=hi).max_by(|&a, &b| s.values[a].abs().total_cmp(&s.values[b].abs()))?;
    (s.values[j].abs() > tau_z * s.scale()).then_some((j, s.nodes[j]))
}

fn sub_snapshot(s: &Snapshot, range: std::ops::Range<usize>) -> Result<Snapshot> {
    Snapshot::new(s.t, s.nodes[range.clone()].to_vec(), s.values[range].to_vec())
}

/// Splits a fixed grid at a node `X` with `u(X, t) ≠ 0` and checks that the
/// zero count of each side is non-increasing while `u(X, ·)` keeps its sign.
/// When the sign is lost a new split point is chosen.
pub fn check_split_monotone(traj: &Trajectory, tol: &Tolerances, burn_in: f64) -> Result<CheckReport> {
    let window = (traj.meta.nodes / 10).max(1);
    let mut rep = CheckReport::new("split-monotone", &[("burn_in", burn_in), ("split_window", window as f64)]);
    let snaps = &traj.snapshots;
    if snaps.windows(2).any(|p| p[0].nodes != p[1].nodes) {
        rep.note("skipped: grid moves between snapshots");
        return Ok(rep);
    }
    let times = traj.times();
    let mut k = index_at(&times, times[0] + burn_in);
    while k < snaps.len() {
        let Some((j, x)) = choose_split(&snaps[k], window, tol.zero) else {
            k += 1;
            continue;
        };
        let sign = snaps[k].values[j].signum();
        rep.note(format!("split X={x} from t={}", snaps[k].t));
        let mut prev: Option<[usize; 2]> = None;
        while k < snaps.len() {
            let s = &snaps[k];
            if s.values[j].signum() != sign || s.values[j].abs() <= tol.zero * s.scale() {
                break;
            }
            let left = count_zeros(&sub_snapshot(s, 0..j + 1)?, tol.zero, tol.degenerate)?.count();
            let right = count_zeros(&sub_snapshot(s, j..s.len())?, tol.zero, tol.degenerate)?.count();
            if let Some(p) = prev {
                for (side, (a, b)) in ["left", "right"].iter().zip(p.iter().zip([left, right])) {
                    if b > *a {
                        rep.violate(s.t, format!("Z on the {side} of X={x} ≤ {a}"), format!("{b}"));
                    }
                }
            }
            prev = Some([left, right]);
            k += 1;
        }
    }
    Ok(rep)
}

/// Sides where boundary zeros must be isolated in time: Neumann and Robin.
pub fn isolated_sides(bcs: &BoundaryPair) -> [bool; 2] {
    let iso = |bc: &BoundaryCondition| matches!(bc, BoundaryCondition::Neumann | BoundaryCondition::Robin { .. });
    [iso(&bcs.left), iso(&bcs.right)]
}

/// Zero trace, both moment classifications and the reports of the full
/// checker suite for one trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardChecks {
    pub trace: ZeroTrace,
    pub moments: [MomentClassification; 2],
    pub reports: Vec<CheckReport>,
}

impl StandardChecks {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| r.passed)
    }

    pub fn report(&self, name: &str) -> Option<&CheckReport> {
        self.reports.iter().find(|r| r.name == name)
    }
}

/// Runs monotonicity, strict-drop, hypothesis, taxonomy and split checks.
/// Burn-in is `tol.burn_in_steps` solver steps.
pub fn standard_checks(traj: &Trajectory, tol: &Tolerances, bcs: &BoundaryPair) -> Result<StandardChecks> {
    let trace = trace_trajectory(traj, tol)?;
    let moments = [classify_side(traj, Side::Left, tol)?, classify_side(traj, Side::Right, tol)?];
    let burn_in = tol.burn_in_steps as f64 * traj.meta.dt;
    let refs = [&moments[0], &moments[1]];
    let reports = vec![
        check_monotone(&trace, burn_in),
        check_strict_drop(&trace, &refs, tol.drop_window, burn_in),
        check_hypotheses(traj, refs, tol)?,
        check_taxonomy(refs, isolated_sides(bcs)),
        check_split_monotone(traj, tol, burn_in)?,
    ];
    Ok(StandardChecks { trace, moments, reports })
}
