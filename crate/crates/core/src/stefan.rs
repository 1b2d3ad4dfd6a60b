//! Free-boundary problem `u_t = u_xx + f(t, u)` on `(g(t), h(t))` with
//! `u = 0` at both fronts and `g' = -μ u_x(g)`, `h' = -μ u_x(h)`.
//!
//! The interval is immobilized by `y = (x - g) / (h - g)`. Each step first
//! predicts the fronts from the current slopes, solves, then corrects the
//! fronts with the averaged slopes and solves again from the old profile.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, LabError, Result};
use crate::model::{left_slope, right_slope, uniform_nodes, BoundaryCondition, CoefficientField, ScenarioConfig, Side, Snapshot};
use crate::solver::{scheme_step, BoundaryTrace, Frame, FrontSample, Operator, SolverMeta, Trajectory};

/// Fronts closer than this end the run.
pub const EXTINCTION_GAP: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeBoundaryState {
    pub g: f64,
    pub h: f64,
    /// Profile on uniform nodes spanning `[g, h]`.
    pub profile: Snapshot,
    pub mu: f64,
}

impl FreeBoundaryState {
    pub fn new(profile: Snapshot, mu: f64) -> Result<Self> {
        if !(mu > 0.0) {
            return invalid("Stefan coefficient μ must be positive");
        }
        let g = profile.nodes[0];
        let h = profile.nodes[profile.len() - 1];
        Ok(FreeBoundaryState { g, h, profile, mu })
    }

    pub fn t(&self) -> f64 {
        self.profile.t
    }

    /// `Q = ∫ u dx + (h - g) / μ`, constant in time when `f ≡ 0`.
    pub fn conserved(&self) -> f64 {
        self.profile.integral() + (self.h - self.g) / self.mu
    }
}

/// Second-order one-sided `u_x` at a front.
pub fn boundary_slope(state: &FreeBoundaryState, side: Side) -> f64 {
    let p = &state.profile;
    match side {
        Side::Left => left_slope(&p.nodes, &p.values),
        Side::Right => right_slope(&p.nodes, &p.values),
    }
}

/// Immobilized frame with fronts moving linearly across one step.
struct FrontFrame<'a> {
    field: &'a CoefficientField,
    t0: f64,
    dt: f64,
    g: [f64; 2],
    h: [f64; 2],
}

impl FrontFrame<'_> {
    fn ends(&self, t: f64) -> (f64, f64) {
        let s = (t - self.t0) / self.dt;
        (self.g[0] + s * (self.g[1] - self.g[0]), self.h[0] + s * (self.h[1] - self.h[0]))
    }
}

impl Frame for FrontFrame<'_> {
    fn field(&self) -> &CoefficientField {
        self.field
    }

    fn position(&self, y: f64, t: f64) -> f64 {
        let (g, h) = self.ends(t);
        g + (h - g) * y
    }

    fn jacobian(&self, t: f64) -> f64 {
        let (g, h) = self.ends(t);
        h - g
    }

    fn operator(&self, ys: &[f64], t: f64) -> Result<Operator> {
        let (g, h) = self.ends(t);
        let len = h - g;
        let vg = (self.g[1] - self.g[0]) / self.dt;
        let vh = (self.h[1] - self.h[0]) / self.dt;
        let mut op = Operator { a: Vec::with_capacity(ys.len()), b: Vec::with_capacity(ys.len()), c: Vec::with_capacity(ys.len()) };
        for &y in ys {
            let x = g + len * y;
            op.a.push(self.field.a(x, t) / (len * len));
            op.b.push(((1.0 - y) * vg + y * vh + self.field.b(x, t)) / len);
            op.c.push(self.field.c(x, t));
        }
        Ok(op)
    }
}

fn slopes(values: &[f64], len: f64) -> (f64, f64) {
    let ys = uniform_nodes(0.0, 1.0, values.len());
    (left_slope(&ys, values) / len, right_slope(&ys, values) / len)
}

/// One predictor–corrector step.
pub fn step_free_boundary(state: &FreeBoundaryState, field: &CoefficientField, dt: f64) -> Result<FreeBoundaryState> {
    step_with(state, field, dt, false)
}

pub(crate) fn step_with(state: &FreeBoundaryState, field: &CoefficientField, dt: f64, damped: bool) -> Result<FreeBoundaryState> {
    if !(dt > 0.0) {
        return invalid("time step must be positive");
    }
    let t = state.t();
    let w0 = &state.profile.values;
    let n = w0.len();
    let dy = 1.0 / (n - 1) as f64;
    let bc = BoundaryCondition::FreeStefan { mu: state.mu };
    let bcs = [&bc, &bc];
    let mu = state.mu;
    let len0 = state.h - state.g;
    let (sg0, sh0) = slopes(w0, len0);

    let cfl = |vg: f64, vh: f64, len: f64| -> Result<()> {
        let v = vg.abs().max(vh.abs());
        if dt * v > dy * len {
            return Err(LabError::Solver {
                time: t,
                message: format!("front CFL violated: Δt·|v| = {:e} > Δy·L = {:e}; reduce Δt", dt * v, dy * len),
            });
        }
        Ok(())
    };
    cfl(mu * sg0, mu * sh0, len0)?;

    let solve = |g1: f64, h1: f64| -> Result<Vec<f64>> {
        if h1 - g1 <= EXTINCTION_GAP {
            return Err(LabError::Extinction { time: t + dt, gap: h1 - g1 });
        }
        let frame = FrontFrame { field, t0: t, dt, g: [state.g, g1], h: [state.h, h1] };
        Ok(scheme_step(&frame, bcs, w0, t, dt, damped)?.values)
    };

    let (gp, hp) = (state.g - dt * mu * sg0, state.h - dt * mu * sh0);
    let wp = solve(gp, hp)?;
    let (sgp, shp) = slopes(&wp, hp - gp);
    let g1 = state.g - dt * mu * 0.5 * (sg0 + sgp);
    let h1 = state.h - dt * mu * 0.5 * (sh0 + shp);
    cfl(mu * 0.5 * (sg0 + sgp), mu * 0.5 * (sh0 + shp), len0)?;
    let w1 = solve(g1, h1)?;
    let nodes = uniform_nodes(g1, h1, n);
    Ok(FreeBoundaryState { g: g1, h: h1, profile: Snapshot::new(t + dt, nodes, w1)?, mu })
}

/// Runs a validated free-boundary scenario.
pub fn solve_free_boundary(cfg: &ScenarioConfig) -> Result<Trajectory> {
    let mu = match cfg.boundary.left {
        BoundaryCondition::FreeStefan { mu } => mu,
        _ => return invalid("not a free-boundary scenario"),
    };
    let (nodes, values) = cfg.initial_nodes();
    let mut state = FreeBoundaryState::new(Snapshot::new(cfg.time.start, nodes, values)?, mu)?;
    let field = &cfg.coefficients;
    let dt = cfg.time.dt;
    let steps = cfg.time.steps();
    let mut boundary = BoundaryTrace::default();
    boundary.push(&state.profile);
    let sample = |s: &FreeBoundaryState| FrontSample { t: s.t(), g: s.g, h: s.h, q: s.conserved() };
    let mut fronts = vec![sample(&state)];
    let mut snapshots = vec![state.profile.clone()];
    for k in 0..steps {
        let t1 = cfg.time.start + (k + 1) as f64 * dt;
        let step = t1 - state.t();
        state = step_with(&state, field, step, k < cfg.time.startup_steps)?;
        state.profile.t = t1;
        boundary.push(&state.profile);
        fronts.push(sample(&state));
        if (k + 1) % cfg.time.output_every == 0 || k + 1 == steps {
            snapshots.push(state.profile.clone());
        }
    }
    Ok(Trajectory {
        snapshots,
        residuals: vec![[0.0; 2]; steps],
        boundary,
        meta: SolverMeta {
            scheme: "crank-nicolson/front-predictor-corrector".into(),
            dt,
            nodes: cfg.grid.nodes,
            steps,
            startup_steps: cfg.time.startup_steps.min(steps),
        },
        fronts: Some(fronts),
    })
}

/// Location of the maximum over time.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MaxLocationTrace {
    pub times: Vec<f64>,
    pub gamma: Vec<f64>,
    /// Samples whose maximum is a plateau of ≥ 3 equal nodes.
    pub plateau: Vec<bool>,
}

/// Relative tolerance for two nodal values to count as the same maximum.
pub const PLATEAU_TOL: f64 = 1e-12;

impl MaxLocationTrace {
    /// `sup γ - inf γ` over the trailing `fraction` of the time span,
    /// skipping plateau samples. `None` when no sample qualifies.
    pub fn drift(&self, fraction: f64) -> Option<f64> {
        let (&t0, &t1) = (self.times.first()?, self.times.last()?);
        let from = t1 - fraction * (t1 - t0);
        let vals: Vec<f64> = (0..self.times.len())
            .filter(|&k| self.times[k] >= from - 1e-12 && !self.plateau[k])
            .map(|k| self.gamma[k])
            .collect();
        if vals.is_empty() {
            return None;
        }
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        Some(hi - lo)
    }

    /// Mean of `γ` over the trailing fraction.
    pub fn trailing_mean(&self, fraction: f64) -> Option<f64> {
        let (&t0, &t1) = (self.times.first()?, self.times.last()?);
        let from = t1 - fraction * (t1 - t0);
        let vals: Vec<f64> =
            (0..self.times.len()).filter(|&k| self.times[k] >= from - 1e-12 && !self.plateau[k]).map(|k| self.gamma[k]).collect();
        (!vals.is_empty()).then(|| vals.iter().sum::<f64>() / vals.len() as f64)
    }
}

/// Argmax of each snapshot, refined by the parabola through the three nodes
/// around the discrete maximum.
pub fn track_max_location(snapshots: &[Snapshot]) -> MaxLocationTrace {
    let mut out = MaxLocationTrace::default();
    for s in snapshots {
        let (j, &m) = s
            .values
            .iter()
            .enumerate()
            .fold((0, &f64::NEG_INFINITY), |best, (i, v)| if *v > *best.1 { (i, v) } else { best });
        let ties = s.values.iter().filter(|&&v| (v - m).abs() <= PLATEAU_TOL * m.abs()).count();
        let mut x = s.nodes[j];
        if j > 0 && j + 1 < s.len() {
            let (um, u0, up) = (s.values[j - 1], s.values[j], s.values[j + 1]);
            let curv = um - 2.0 * u0 + up;
            if curv < 0.0 {
                let h = 0.5 * (s.nodes[j + 1] - s.nodes[j - 1]);
                x += h * 0.5 * (um - up) / curv;
            }
        }
        out.times.push(s.t);
        out.gamma.push(x);
        out.plateau.push(ties >= 3);
    }
    out
}

/// CSV with columns `t,g,h,Q`.
pub fn fronts_csv(fronts: &[FrontSample]) -> String {
    let mut s = String::from("t,g,h,Q\n");
    for f in fronts {
        s.push_str(&format!("{},{},{},{}\n", f.t, f.g, f.h, f.q));
    }
    s
}
