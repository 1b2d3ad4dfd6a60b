use serde::{Deserialize, Serialize};

use super::count::{ZeroInventory, ZeroKind};
use crate::error::{LabError, Result};
use crate::model::Side;

/// A zero curve `x = γ(t)`, one location per sample it lives on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroCurve {
    pub id: usize,
    /// Index of the first inventory containing the curve.
    pub start: usize,
    pub locations: Vec<f64>,
}

impl ZeroCurve {
    /// Index of the last inventory containing the curve.
    pub fn end(&self) -> usize {
        self.start + self.locations.len() - 1
    }

    pub fn at(&self, k: usize) -> Option<f64> {
        (k >= self.start && k <= self.end()).then(|| self.locations[k - self.start])
    }
}

/// What made a zero disappear.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Two neighbouring curves collided.
    Merge { location: f64 },
    /// A curve left through an end of the interval.
    BoundaryExit { side: Side, location: f64 },
    /// No mechanism identified; last known location.
    Unattributed { location: f64 },
}

impl Witness {
    pub fn location(&self) -> f64 {
        match *self {
            Witness::Merge { location } | Witness::BoundaryExit { location, .. } | Witness::Unattributed { location } => location,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DropEvent {
    /// The drop happened in `(t_before, t_after]`.
    pub t_before: f64,
    pub t_after: f64,
    /// Inventory index of `t_before`.
    pub index: usize,
    pub z_before: usize,
    pub z_after: usize,
    pub witnesses: Vec<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroTrace {
    pub inventories: Vec<ZeroInventory>,
    pub curves: Vec<ZeroCurve>,
    pub drops: Vec<DropEvent>,
    /// Ambiguous matches resolved by order preservation.
    pub notes: Vec<String>,
    pub match_radius: f64,
}

impl ZeroTrace {
    pub fn times(&self) -> Vec<f64> {
        self.inventories.iter().map(|i| i.t).collect()
    }

    pub fn counts(&self) -> Vec<usize> {
        self.inventories.iter().map(|i| i.count()).collect()
    }

    /// Curves alive at inventory `k`, in spatial order.
    pub fn curves_at(&self, k: usize) -> Vec<&ZeroCurve> {
        let mut v: Vec<&ZeroCurve> = self.curves.iter().filter(|c| c.at(k).is_some()).collect();
        v.sort_by(|a, b| a.at(k).unwrap().total_cmp(&b.at(k).unwrap()));
        v
    }

    /// Curves never cross: ids alive at consecutive samples keep their order.
    pub fn order_preserved(&self) -> bool {
        for k in 1..self.inventories.len() {
            let both: Vec<&ZeroCurve> = self.curves.iter().filter(|c| c.at(k - 1).is_some() && c.at(k).is_some()).collect();
            let mut prev: Vec<(f64, usize)> = both.iter().map(|c| (c.at(k - 1).unwrap(), c.id)).collect();
            let mut next: Vec<(f64, usize)> = both.iter().map(|c| (c.at(k).unwrap(), c.id)).collect();
            prev.sort_by(|a, b| a.0.total_cmp(&b.0));
            next.sort_by(|a, b| a.0.total_cmp(&b.0));
            if prev.iter().map(|p| p.1).ne(next.iter().map(|p| p.1)) {
                return false;
            }
        }
        true
    }
}

/// Ambiguity notes kept per trace.
pub const MAX_NOTES: usize = 200;

/// Order-preserving matching maximizing matched pairs within `radius`, ties
/// broken by total displacement. Returns `pairs[i] = Some(j)`.
fn match_sorted(a: &[f64], b: &[f64], radius: f64) -> Vec<Option<usize>> {
    let (na, nb) = (a.len(), b.len());
    // dp[i][j]: best (matches, -distance) using a[..i], b[..j]
    let mut dp = vec![vec![(0usize, 0.0f64); nb + 1]; na + 1];
    let better = |x: (usize, f64), y: (usize, f64)| x.0 > y.0 || (x.0 == y.0 && x.1 > y.1);
    for i in 1..=na {
        for j in 1..=nb {
            let mut best = dp[i - 1][j];
            if better(dp[i][j - 1], best) {
                best = dp[i][j - 1];
            }
            let d = (a[i - 1] - b[j - 1]).abs();
            if d <= radius {
                let cand = (dp[i - 1][j - 1].0 + 1, dp[i - 1][j - 1].1 - d);
                if better(cand, best) {
                    best = cand;
                }
            }
            dp[i][j] = best;
        }
    }
    let mut pairs = vec![None; na];
    let (mut i, mut j) = (na, nb);
    while i > 0 && j > 0 {
        let d = (a[i - 1] - b[j - 1]).abs();
        if d <= radius && dp[i][j] == (dp[i - 1][j - 1].0 + 1, dp[i - 1][j - 1].1 - d) {
            pairs[i - 1] = Some(j - 1);
            i -= 1;
            j -= 1;
        } else if dp[i][j] == dp[i - 1][j] {
            i -= 1;
        } else {
            j -= 1;
        }
    }
    pairs
}

/// Links zeros of consecutive inventories into curves and explains every
/// decrease of `Z`. `radius` defaults to ten grid spacings.
pub fn trace_zero_curves(inventories: &[ZeroInventory], radius: Option<f64>) -> Result<ZeroTrace> {
    if inventories.is_empty() {
        return Err(LabError::Trace("no inventories to trace".into()));
    }
    if !inventories.windows(2).all(|w| w[0].t < w[1].t) {
        return Err(LabError::Trace("inventory times not increasing".into()));
    }
    let dx = inventories[0].dx;
    let r = radius.unwrap_or(10.0 * dx);
    let mut curves: Vec<ZeroCurve> = Vec::new();
    let mut notes = Vec::new();
    let mut active: Vec<usize> = Vec::new();
    for (j, z) in inventories[0].zeros.iter().enumerate() {
        curves.push(ZeroCurve { id: j, start: 0, locations: vec![z.location] });
        active.push(j);
    }
    let mut drops = Vec::new();
    for k in 1..inventories.len() {
        let a = inventories[k - 1].locations();
        let b = inventories[k].locations();
        for &x in &a {
            let cands = b.iter().filter(|&&y| (x - y).abs() <= r).count();
            if cands > 1 && notes.len() < MAX_NOTES {
                notes.push(format!("t={}: zero at {x:.6} has {cands} candidates; order preserved", inventories[k].t));
            }
        }
        let pairs = match_sorted(&a, &b, r);
        let mut next_active = vec![usize::MAX; b.len()];
        let mut ended = Vec::new();
        for (i, p) in pairs.iter().enumerate() {
            match p {
                Some(j) => {
                    curves[active[i]].locations.push(b[*j]);
                    next_active[*j] = active[i];
                }
                None => ended.push(i),
            }
        }
        for (j, slot) in next_active.iter_mut().enumerate() {
            if *slot == usize::MAX {
                let id = curves.len();
                curves.push(ZeroCurve { id, start: k, locations: vec![b[j]] });
                *slot = id;
            }
        }
        let (zb, za) = (a.len(), b.len());
        if za < zb {
            let times: Vec<f64> = inventories[..=k].iter().map(|i| i.t).collect();
            let ctx = Bracket { before: &inventories[k - 1], after: &inventories[k], times: &times, dx };
            let witnesses = ctx.attribute(&curves, &active, &pairs, &ended);
            drops.push(DropEvent {
                t_before: inventories[k - 1].t,
                t_after: inventories[k].t,
                index: k - 1,
                z_before: zb,
                z_after: za,
                witnesses,
            });
        }
        active = next_active;
    }
    Ok(ZeroTrace { inventories: inventories.to_vec(), curves, drops, notes, match_radius: r })
}

/// Two consecutive inventories across which `Z` dropped.
struct Bracket<'a> {
    before: &'a ZeroInventory,
    after: &'a ZeroInventory,
    /// Sample times up to and including `after`.
    times: &'a [f64],
    dx: f64,
}

impl Bracket<'_> {
    /// Explains the curves that ended at the `before` sample.
    fn attribute(&self, curves: &[ZeroCurve], active: &[usize], pairs: &[Option<usize>], ended: &[usize]) -> Vec<Witness> {
        let before = self.before;
        let mut out = Vec::new();
        let mut used = vec![false; ended.len()];
        // neighbouring pairs vanishing together and converging
        for e in 0..ended.len().saturating_sub(1) {
            let (i, j) = (ended[e], ended[e + 1]);
            if used[e] || j != i + 1 || before.zeros[i].at_boundary || before.zeros[j].at_boundary {
                continue;
            }
            if self.converging(&curves[active[i]], &curves[active[j]]) {
                out.push(Witness::Merge { location: 0.5 * (before.zeros[i].location + before.zeros[j].location) });
                used[e] = true;
                used[e + 1] = true;
            }
        }
        let (lo, hi) = before.interval;
        let n = before.zeros.len();
        for (e, &i) in ended.iter().enumerate() {
            if used[e] {
                continue;
            }
            let z = &before.zeros[i];
            // a neighbour surviving as a multiple zero absorbed this one
            let absorbed = [i.checked_sub(1), (i + 1 < n).then_some(i + 1)].into_iter().flatten().find_map(|nb| {
                let surv = &self.after.zeros[pairs[nb]?];
                (surv.kind == ZeroKind::Multiple && !surv.at_boundary).then_some(surv.location)
            });
            // outermost interior zero, possibly next to a zero sitting on the end
            let outermost = |side: Side| match side {
                Side::Left => i == 0 || (i == 1 && before.zeros[0].at_boundary),
                Side::Right => i + 1 == n || (i + 2 == n && before.zeros[n - 1].at_boundary),
            };
            let side = if z.location - lo <= hi - z.location { Side::Left } else { Side::Right };
            let end = if side == Side::Left { lo } else { hi };
            let w = if let Some(location) = absorbed {
                Witness::Merge { location }
            } else if z.at_boundary || (outermost(side) && (z.location - end).abs() <= 0.25 * (hi - lo)) {
                Witness::BoundaryExit { side, location: end }
            } else {
                Witness::Unattributed { location: z.location }
            };
            out.push(w);
        }
        out
    }

    /// Two curves alive at the `before` sample converge if they are already
    /// within `2Δx`, or if the square of their separation, extrapolated
    /// linearly from the last two samples (a fold closes like `√(t* - t)`),
    /// reaches `(2Δx)²` within one sample spacing after the bracket.
    fn converging(&self, a: &ZeroCurve, b: &ZeroCurve) -> bool {
        let k = self.times.len() - 2;
        let sep = |m: usize| -> Option<f64> { Some((b.at(m)? - a.at(m)?).abs()) };
        let Some(s1) = sep(k) else { return false };
        let tol = 2.0 * self.dx;
        if s1 <= tol {
            return true;
        }
        let Some(s0) = k.checked_sub(1).and_then(sep) else { return false };
        if s0 <= s1 {
            return false;
        }
        let (t0, t1, t2) = (self.times[k - 1], self.times[k], self.times[k + 1]);
        let rate = (s0 * s0 - s1 * s1) / (t1 - t0);
        let t_hit = t1 + (s1 * s1 - tol * tol) / rate;
        t_hit <= t2 + (t2 - t1)
    }
}
