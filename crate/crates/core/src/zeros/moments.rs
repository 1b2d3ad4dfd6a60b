use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Character of one flank of a Z-run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Context {
    N,
    Z,
    X,
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Context::N => "N",
            Context::Z => "Z",
            Context::X => "X",
        })
    }
}

/// Three-letter label of a Z-moment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Label(pub Context, pub Context);

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}Z{}", self.0, self.1)
    }
}

impl Label {
    pub fn has_x(&self) -> bool {
        self.0 == Context::X || self.1 == Context::X
    }
}

/// Maximal run of Z samples `[start, end]`, or a sign change between two N
/// samples (`virtual_run`, zero length, time interpolated).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZRun {
    pub start: usize,
    pub end: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub virtual_run: bool,
    /// `None` when the flank runs off the sampled window.
    pub left: Option<Context>,
    pub right: Option<Context>,
}

impl ZRun {
    /// Number of samples in the run (0 for a sign change between samples).
    pub fn samples(&self) -> usize {
        if self.virtual_run {
            0
        } else {
            self.end - self.start + 1
        }
    }
}

/// A labeled Z-moment; interior ZZZ moments of a run are one entry spanning
/// `[t_start, t_end]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Moment {
    pub t_start: f64,
    pub t_end: f64,
    pub label: Label,
    pub run: usize,
}

/// `(r, s) ∪ [s, r1] ∪ (r1, s1)`: N-run, Z-run, N-run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AInterval {
    pub r: f64,
    pub s: f64,
    pub r1: f64,
    pub s1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentParams {
    pub tau_z: f64,
    pub window: usize,
    pub alternations: usize,
}

/// Classification of one boundary trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentClassification {
    pub runs: Vec<ZRun>,
    pub moments: Vec<Moment>,
    pub a_intervals: Vec<AInterval>,
    pub params: MomentParams,
    /// Per-sample Z flags.
    pub zero: Vec<bool>,
}

impl MomentClassification {
    pub fn labels(&self) -> Vec<Label> {
        self.moments.iter().map(|m| m.label).collect()
    }

    pub fn count(&self, label: &str) -> usize {
        self.moments.iter().filter(|m| m.label.to_string() == label).count()
    }

    pub fn has_x(&self) -> bool {
        self.moments.iter().any(|m| m.label.has_x())
    }

    /// Longest Z-run in samples.
    pub fn longest_run(&self) -> usize {
        self.runs.iter().map(|r| r.samples()).max().unwrap_or(0)
    }
}

/// Labels samples `|w| ≤ τ_z·scale` as Z (`scale` per sample, or the trace
/// sup-norm), forms maximal runs and labels their ends by the flank
/// character within `window` samples: X for at least `alternations` sign
/// or N/Z changes, N for a clean flank, otherwise Z.
pub fn classify_moments(
    times: &[f64],
    w: &[f64],
    scales: Option<&[f64]>,
    tau_z: f64,
    window: usize,
    alternations: usize,
) -> Result<MomentClassification> {
    let n = w.len();
    if times.len() != n {
        return Err(LabError::Trace("boundary trace times and values differ in length".into()));
    }
    if window < 3 || alternations < 2 {
        return Err(LabError::Trace("moment window must be ≥ 3 and alternation threshold ≥ 2".into()));
    }
    if n < 2 * window + 1 {
        return Err(LabError::Trace(format!("boundary trace has {n} samples; need at least {}", 2 * window + 1)));
    }
    let sup = w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let zero: Vec<bool> = (0..n)
        .map(|k| {
            let s = scales.map_or(sup, |s| s[k]);
            w[k].abs() <= tau_z * s
        })
        .collect();

    // changes between consecutive samples: N/Z transitions and strict sign
    // changes between N samples
    let change = |k: usize| -> bool { zero[k] != zero[k + 1] || (!zero[k] && !zero[k + 1] && w[k].signum() != w[k + 1].signum()) };
    let flank = |from: usize, to: usize| -> Context {
        // samples [from, to] inclusive, all outside the run
        let changes = (from..to).filter(|&k| change(k)).count();
        if changes >= alternations {
            Context::X
        } else if (from..=to).all(|k| !zero[k]) && changes == 0 {
            Context::N
        } else {
            Context::Z
        }
    };
    let left_ctx = |start: usize| -> Option<Context> {
        (start >= window).then(|| flank(start - window, start - 1))
    };
    let right_ctx = |end: usize| -> Option<Context> {
        (end + window < n).then(|| flank(end + 1, end + window))
    };

    let mut runs = Vec::new();
    let mut k = 0;
    while k < n {
        if zero[k] {
            let start = k;
            while k + 1 < n && zero[k + 1] {
                k += 1;
            }
            runs.push(ZRun {
                start,
                end: k,
                t_start: times[start],
                t_end: times[k],
                virtual_run: false,
                left: left_ctx(start),
                right: right_ctx(k),
            });
        } else if k + 1 < n && !zero[k + 1] && w[k].signum() != w[k + 1].signum() {
            let t = times[k] + (times[k + 1] - times[k]) * w[k] / (w[k] - w[k + 1]);
            // the flanks of a crossing include its own bracketing samples
            let left = (k + 1 >= window).then(|| flank(k + 1 - window, k));
            let right = (k + window < n).then(|| flank(k + 1, k + window));
            runs.push(ZRun { start: k, end: k + 1, t_start: t, t_end: t, virtual_run: true, left, right });
        }
        k += 1;
    }

    let mut moments = Vec::new();
    for (idx, run) in runs.iter().enumerate() {
        let single = run.virtual_run || run.start == run.end;
        if single {
            if let (Some(l), Some(r)) = (run.left, run.right) {
                moments.push(Moment { t_start: run.t_start, t_end: run.t_end, label: Label(l, r), run: idx });
            }
            continue;
        }
        if let Some(l) = run.left {
            moments.push(Moment { t_start: run.t_start, t_end: run.t_start, label: Label(l, Context::Z), run: idx });
        }
        if run.end - run.start >= 2 {
            moments.push(Moment {
                t_start: times[run.start + 1],
                t_end: times[run.end - 1],
                label: Label(Context::Z, Context::Z),
                run: idx,
            });
        }
        if let Some(r) = run.right {
            moments.push(Moment { t_start: run.t_end, t_end: run.t_end, label: Label(Context::Z, r), run: idx });
        }
    }

    // A-type: N-run, Z-run, N-run, with the N-runs extending to the
    // neighbouring Z-runs (or the window ends)
    let mut a_intervals = Vec::new();
    for (idx, run) in runs.iter().enumerate() {
        if run.left != Some(Context::N) || run.right != Some(Context::N) {
            continue;
        }
        let r = if idx == 0 { times[0] } else { runs[idx - 1].t_end };
        let s1 = if idx + 1 == runs.len() { times[n - 1] } else { runs[idx + 1].t_start };
        a_intervals.push(AInterval { r, s: run.t_start, r1: run.t_end, s1 });
    }

    Ok(MomentClassification {
        runs,
        moments,
        a_intervals,
        params: MomentParams { tau_z, window, alternations },
        zero,
    })
}
