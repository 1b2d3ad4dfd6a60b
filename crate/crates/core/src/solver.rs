//! Crank–Nicolson time stepping for `u_t = a u_xx + b u_x + c u + f(x, t, u)`.
//!
//! Every problem is solved on a uniform grid in a computational coordinate
//! `y ∈ [0, 1]`; fixed intervals use the affine map and moving ones the
//! straightening from [`crate::transform`]. Flux conditions are imposed by
//! eliminating a ghost node, so a closure `w_y = σ w + κ` enters the first
//! and last rows. Nonlinear fluxes are linearized inside a damped Newton
//! loop; the reaction gets one Picard correction per step.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, LabError, Result};
use crate::model::{
    left_slope, right_slope, uniform_nodes, BoundaryCondition, BoundaryPair, CoefficientField, ScenarioConfig, Side,
    Snapshot,
};
use crate::transform::{regularize_radial, straighten_both, TransformedProblem};
use crate::tridiag::Tridiagonal;

/// Coefficients of the transformed operator on the grid.
#[derive(Debug, Clone)]
pub(crate) struct Operator {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

/// A map from the computational grid to physical space.
pub(crate) trait Frame {
    fn field(&self) -> &CoefficientField;
    fn position(&self, y: f64, t: f64) -> f64;
    fn jacobian(&self, t: f64) -> f64;
    fn operator(&self, ys: &[f64], t: f64) -> Result<Operator>;
}

impl Frame for TransformedProblem {
    fn field(&self) -> &CoefficientField {
        TransformedProblem::field(self)
    }

    fn position(&self, y: f64, t: f64) -> f64 {
        self.forward(y, t)
    }

    fn jacobian(&self, t: f64) -> f64 {
        TransformedProblem::jacobian(self, t)
    }

    fn operator(&self, ys: &[f64], t: f64) -> Result<Operator> {
        let (vl, vr) = self.frame_velocities(t)?;
        let n = ys.len();
        let mut op = Operator { a: Vec::with_capacity(n), b: Vec::with_capacity(n), c: Vec::with_capacity(n) };
        for &y in ys {
            let (a, b, c) = self.coefficients_with(y, t, vl, vr);
            op.a.push(a);
            op.b.push(b);
            op.c.push(c);
        }
        Ok(op)
    }
}

/// Boundary closure in computational units.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Closure {
    Value(f64),
    /// `w_y = σ w + κ`
    Flux { sigma: f64, kappa: f64 },
}

/// Closure for `bc` at time `t`, linearized about boundary value `w`.
fn closure(bc: &BoundaryCondition, side: Side, t: f64, jac: f64, w: f64) -> Closure {
    let outward = -side.sign();
    match bc {
        BoundaryCondition::DirichletZero | BoundaryCondition::FreeStefan { .. } => Closure::Value(0.0),
        BoundaryCondition::DirichletValue { value } => Closure::Value(value.eval(t)),
        BoundaryCondition::Neumann => Closure::Flux { sigma: 0.0, kappa: 0.0 },
        BoundaryCondition::Robin { beta } => Closure::Flux { sigma: jac * outward * beta.eval(t), kappa: 0.0 },
        BoundaryCondition::NonlinearFlux { law, .. } => {
            let g = law.eval(t, w);
            let dg = law.du(t, w);
            Closure::Flux { sigma: jac * outward * dg, kappa: jac * outward * (g - dg * w) }
        }
    }
}

/// Row `i` of the discrete operator: `(lower, diag, upper, constant)`.
/// Boundary rows under a value closure are returned as zero.
#[inline]
fn row(op: &Operator, i: usize, h: f64, cl: [Closure; 2]) -> (f64, f64, f64, f64) {
    let n = op.a.len();
    let (a, b, c) = (op.a[i], op.b[i], op.c[i]);
    let h2 = h * h;
    if i == 0 {
        return match cl[0] {
            Closure::Value(_) => (0.0, 0.0, 0.0, 0.0),
            // ghost w_{-1} = w_1 - 2h (σ w_0 + κ)
            Closure::Flux { sigma, kappa } => (
                0.0,
                -2.0 * a / h2 - 2.0 * a * sigma / h + b * sigma + c,
                2.0 * a / h2,
                -2.0 * a * kappa / h + b * kappa,
            ),
        };
    }
    if i == n - 1 {
        return match cl[1] {
            Closure::Value(_) => (0.0, 0.0, 0.0, 0.0),
            // ghost w_n = w_{n-2} + 2h (σ w_{n-1} + κ)
            Closure::Flux { sigma, kappa } => (
                2.0 * a / h2,
                -2.0 * a / h2 + 2.0 * a * sigma / h + b * sigma + c,
                0.0,
                2.0 * a * kappa / h + b * kappa,
            ),
        };
    }
    (a / h2 - b / (2.0 * h), -2.0 * a / h2 + c, a / h2 + b / (2.0 * h), 0.0)
}

fn apply_row(op: &Operator, i: usize, h: f64, cl: [Closure; 2], w: &[f64]) -> f64 {
    let (lo, di, up, k) = row(op, i, h, cl);
    let n = w.len();
    let mut v = di * w[i] + k;
    if i > 0 {
        v += lo * w[i - 1];
    }
    if i + 1 < n {
        v += up * w[i + 1];
    }
    v
}

/// Result of one θ-step.
#[derive(Debug, Clone)]
pub(crate) struct StepOutcome {
    pub values: Vec<f64>,
    /// Flux mismatch `|u_x - required|` of the eliminated boundary rows,
    /// in physical units; zero on value sides.
    pub residuals: [f64; 2],
}

const NEWTON_MAX: usize = 60;

struct Implicit<'a> {
    op: &'a Operator,
    h: f64,
    dt: f64,
    theta: f64,
    bcs: [&'a BoundaryCondition; 2],
    t: f64,
    jac: f64,
    base: &'a [f64],
    forcing: &'a [f64],
}

impl Implicit<'_> {
    fn closures(&self, wl: f64, wr: f64) -> [Closure; 2] {
        [
            closure(self.bcs[0], Side::Left, self.t, self.jac, wl),
            closure(self.bcs[1], Side::Right, self.t, self.jac, wr),
        ]
    }

    #[allow(clippy::needless_range_loop)]
    fn solve_linear(&self, cl: [Closure; 2]) -> Result<Vec<f64>> {
        let n = self.base.len();
        let mut m = Tridiagonal::zeros(n);
        let mut rhs = vec![0.0; n];
        let td = self.theta * self.dt;
        for i in 0..n {
            let fixed = match (i, cl) {
                (0, [Closure::Value(v), _]) => Some(v),
                (j, [_, Closure::Value(v)]) if j == n - 1 => Some(v),
                _ => None,
            };
            if let Some(v) = fixed {
                m.diag[i] = 1.0;
                rhs[i] = v;
                continue;
            }
            let (lo, di, up, k) = row(self.op, i, self.h, cl);
            m.lower[i] = -td * lo;
            m.diag[i] = 1.0 - td * di;
            m.upper[i] = -td * up;
            rhs[i] = self.base[i] + td * (self.forcing[i] + k);
        }
        m.solve_in_place(&mut rhs)?;
        Ok(rhs)
    }

    /// Residual of boundary row `i` with the exact flux at the current value.
    fn row_residual(&self, w: &[f64], i: usize) -> f64 {
        let n = w.len();
        let cl = self.closures(w[0], w[n - 1]);
        let td = self.theta * self.dt;
        (w[i] - td * apply_row(self.op, i, self.h, cl, w) - self.base[i] - td * self.forcing[i]).abs()
    }

    /// Converts a row residual into a slope mismatch in physical units.
    fn as_slope(&self, res: f64, i: usize) -> f64 {
        let (a, b) = (self.op.a[i], self.op.b[i]);
        let k = if i == 0 { 2.0 * a / self.h - b } else { 2.0 * a / self.h + b };
        res / (self.theta * self.dt * k.abs()).max(f64::MIN_POSITIVE) / self.jac.abs()
    }

    fn solve(&self, guess: &[f64]) -> Result<StepOutcome> {
        let n = guess.len();
        let nonlinear = self.bcs.map(|bc| matches!(bc, BoundaryCondition::NonlinearFlux { .. }));
        let mut w = self.solve_linear(self.closures(guess[0], guess[n - 1]))?;
        if nonlinear[0] || nonlinear[1] {
            let ends = [0, n - 1];
            let residual = |w: &[f64]| -> f64 {
                (0..2).filter(|&s| nonlinear[s]).map(|s| self.row_residual(w, ends[s])).fold(0.0, f64::max)
            };
            let mut res = residual(&w);
            let mut converged = false;
            for _ in 0..NEWTON_MAX {
                let scale = 1.0 + w.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                if res <= 1e-14 * scale {
                    converged = true;
                    break;
                }
                let cand = self.solve_linear(self.closures(w[0], w[n - 1]))?;
                let mut lambda = 1.0;
                let mut trial = cand.clone();
                let mut tres = residual(&trial);
                while tres > res && lambda > 1.0 / 256.0 {
                    lambda *= 0.5;
                    trial = w.iter().zip(&cand).map(|(o, c)| o + lambda * (c - o)).collect();
                    tres = residual(&trial);
                }
                let moved = ends.iter().map(|&i| (trial[i] - w[i]).abs()).fold(0.0, f64::max);
                w = trial;
                res = tres;
                if moved <= 1e-15 * scale {
                    converged = res <= 1e-10 * scale;
                    break;
                }
            }
            if !converged {
                return Err(LabError::Newton { time: self.t, residual: res });
            }
        }
        let mut residuals = [0.0; 2];
        for (s, &i) in [0, n - 1].iter().enumerate() {
            if self.bcs[s].is_flux() {
                residuals[s] = self.as_slope(self.row_residual(&w, i), i);
            }
        }
        Ok(StepOutcome { values: w, residuals })
    }
}

/// One θ-step from `t` to `t + dt` of the frame's problem.
pub(crate) fn theta_step(
    frame: &dyn Frame,
    bcs: [&BoundaryCondition; 2],
    w0: &[f64],
    t: f64,
    dt: f64,
    theta: f64,
) -> Result<StepOutcome> {
    let n = w0.len();
    let h = 1.0 / (n - 1) as f64;
    let ys = uniform_nodes(0.0, 1.0, n);
    let op = frame.operator(&ys, t + theta * dt)?;
    let field = frame.field();
    let t1 = t + dt;
    let jac0 = frame.jacobian(t);
    let jac1 = frame.jacobian(t1);
    let has_reaction = field.reaction.is_some();

    let cl0 = [
        closure(bcs[0], Side::Left, t, jac0, w0[0]),
        closure(bcs[1], Side::Right, t, jac0, w0[n - 1]),
    ];
    let ex = 1.0 - theta;
    let mut base = vec![0.0; n];
    for i in 0..n {
        let mut v = w0[i];
        if ex > 0.0 {
            let f_old = if has_reaction { field.f(frame.position(ys[i], t), t, w0[i]) } else { 0.0 };
            v += ex * dt * (apply_row(&op, i, h, cl0, w0) + f_old);
        }
        base[i] = v;
    }
    let x1: Vec<f64> = ys.iter().map(|&y| frame.position(y, t1)).collect();
    let run = |forcing: &[f64], guess: &[f64]| {
        Implicit { op: &op, h, dt, theta, bcs, t: t1, jac: jac1, base: &base, forcing }.solve(guess)
    };
    let out = if has_reaction {
        let predictor: Vec<f64> = (0..n).map(|i| field.f(x1[i], t1, w0[i])).collect();
        let first = run(&predictor, w0)?;
        let corrector: Vec<f64> = (0..n).map(|i| field.f(x1[i], t1, first.values[i])).collect();
        run(&corrector, &first.values)?
    } else {
        run(&vec![0.0; n], w0)?
    };
    if out.values.iter().any(|v| !v.is_finite()) {
        return Err(LabError::Solver { time: t1, message: "non-finite values".into() });
    }
    Ok(out)
}

/// A Crank–Nicolson step, or two backward-Euler half steps when `damped`.
pub(crate) fn scheme_step(
    frame: &dyn Frame,
    bcs: [&BoundaryCondition; 2],
    w0: &[f64],
    t: f64,
    dt: f64,
    damped: bool,
) -> Result<StepOutcome> {
    if damped {
        let half = theta_step(frame, bcs, w0, t, 0.5 * dt, 1.0)?;
        theta_step(frame, bcs, &half.values, t + 0.5 * dt, 0.5 * dt, 1.0)
    } else {
        theta_step(frame, bcs, w0, t, dt, 0.5)
    }
}

/// One Crank–Nicolson step on the fixed interval spanned by `state.nodes`,
/// which must be uniform.
pub fn advance(state: &Snapshot, field: &CoefficientField, bcs: &BoundaryPair, dt: f64) -> Result<Snapshot> {
    if !(dt > 0.0) {
        return invalid("time step must be positive");
    }
    let n = state.len();
    let (x0, x1) = (state.nodes[0], state.nodes[n - 1]);
    let h = (x1 - x0) / (n - 1) as f64;
    if state.nodes.iter().enumerate().any(|(i, &x)| (x - (x0 + h * i as f64)).abs() > 1e-9 * (x1 - x0)) {
        return invalid("advance needs a uniform grid");
    }
    let frame = TransformedProblem::fixed(field, x0, x1);
    let out = theta_step(&frame, [&bcs.left, &bcs.right], &state.values, state.t, dt, 0.5)?;
    Snapshot::new(state.t + dt, state.nodes.clone(), out.values)
}

/// Values, slopes and positions at both ends, at every internal step.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundaryTrace {
    pub times: Vec<f64>,
    /// `w_i(t) = u(ξ_i(t), t)`, left then right.
    pub values: [Vec<f64>; 2],
    /// One-sided `u_x(ξ_i(t), t)`.
    pub slopes: [Vec<f64>; 2],
    pub positions: [Vec<f64>; 2],
    /// `u` at the interior node next to each end.
    #[serde(default)]
    pub inner: [Vec<f64>; 2],
    /// `max |u(·, t)|`
    pub scales: Vec<f64>,
}

impl BoundaryTrace {
    pub(crate) fn push(&mut self, s: &Snapshot) {
        self.times.push(s.t);
        self.values[0].push(s.left());
        self.values[1].push(s.right());
        self.slopes[0].push(left_slope(&s.nodes, &s.values));
        self.slopes[1].push(right_slope(&s.nodes, &s.values));
        self.positions[0].push(s.nodes[0]);
        self.positions[1].push(s.nodes[s.len() - 1]);
        self.inner[0].push(s.values[1]);
        self.inner[1].push(s.values[s.len() - 2]);
        self.scales.push(s.scale());
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn side(&self, side: Side) -> &[f64] {
        &self.values[side.index() - 1]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverMeta {
    pub scheme: String,
    pub dt: f64,
    pub nodes: usize,
    pub steps: usize,
    pub startup_steps: usize,
}

/// Front positions and the conserved quantity of a free-boundary run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontSample {
    pub t: f64,
    pub g: f64,
    pub h: f64,
    pub q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
    pub boundary: BoundaryTrace,
    /// Boundary-row flux mismatch per internal step.
    pub residuals: Vec<[f64; 2]>,
    pub meta: SolverMeta,
    /// Present for free-boundary runs, one sample per internal step.
    pub fronts: Option<Vec<FrontSample>>,
}

/// Relative tolerance on the boundary flux residual.
pub const RESIDUAL_TOL: f64 = 1e-6;

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }

    pub fn last(&self) -> &Snapshot {
        self.snapshots.last().expect("trajectory is never empty")
    }

    /// Re-checks ordering, snapshot consistency, boundary residuals and, when
    /// given, the a-priori sup-norm bound.
    pub fn check_invariants(&self, bound: Option<f64>) -> Result<()> {
        if self.snapshots.is_empty() {
            return Err(LabError::Trace("empty trajectory".into()));
        }
        if !self.snapshots.windows(2).all(|p| p[0].t < p[1].t) {
            return Err(LabError::Trace("snapshot times not increasing".into()));
        }
        for s in &self.snapshots {
            s.check()?;
        }
        for (k, r) in self.residuals.iter().enumerate() {
            let scale = self.boundary.scales.get(k + 1).copied().unwrap_or(1.0);
            if r[0].max(r[1]) > RESIDUAL_TOL * scale.max(f64::MIN_POSITIVE) {
                return Err(LabError::Solver {
                    time: self.boundary.times.get(k + 1).copied().unwrap_or(f64::NAN),
                    message: format!("boundary residual {:e} above tolerance", r[0].max(r[1])),
                });
            }
        }
        if let Some(b) = bound {
            for s in &self.snapshots {
                if s.scale() > b * (1.0 + 1e-9) {
                    return Err(LabError::Solver { time: s.t, message: format!("sup-norm {} exceeds bound {b}", s.scale()) });
                }
            }
        }
        Ok(())
    }
}

/// The field actually solved: radial drift is regularized at the origin.
pub(crate) fn prepare_field(cfg: &ScenarioConfig) -> Result<CoefficientField> {
    if cfg.coefficients.radial_dim().is_some() {
        regularize_radial(&cfg.coefficients, &cfg.domain, &cfg.initial, cfg.time.start, 0.0, 1e-4)
    } else {
        Ok(cfg.coefficients.clone())
    }
}

/// Solves a validated scenario. Free-boundary scenarios are delegated to
/// [`crate::stefan`].
pub fn solve_trajectory(cfg: &ScenarioConfig) -> Result<Trajectory> {
    cfg.validate()?;
    if cfg.is_free_boundary() {
        return crate::stefan::solve_free_boundary(cfg);
    }
    let field = prepare_field(cfg)?;
    let (t0, t_end) = (cfg.time.start, cfg.time.end());
    let frame = if cfg.domain.is_fixed() {
        let (l, r) = cfg.domain.interval(t0);
        TransformedProblem::fixed(&field, l, r)
    } else {
        straighten_both(&field, &cfg.domain, (t0, t_end))?
    };
    let n = cfg.grid.nodes;
    let ys = uniform_nodes(0.0, 1.0, n);
    let nodes_at = |t: f64| -> Vec<f64> { ys.iter().map(|&y| frame.forward(y, t)).collect() };
    let mut w: Vec<f64> = nodes_at(t0).iter().map(|&x| cfg.initial.eval(x, t0)).collect();
    let bcs = [&cfg.boundary.left, &cfg.boundary.right];
    let steps = cfg.time.steps();
    let dt = cfg.time.dt;
    let bound = cfg.h4_bound.then(|| 1.0 + w.iter().fold(0.0f64, |m, v| m.max(v.abs())));

    let first = Snapshot::new(t0, nodes_at(t0), w.clone())?;
    let mut boundary = BoundaryTrace::default();
    boundary.push(&first);
    let mut snapshots = vec![first];
    let mut residuals = Vec::with_capacity(steps);
    for k in 0..steps {
        let t = t0 + k as f64 * dt;
        let t1 = t0 + (k + 1) as f64 * dt;
        let out = scheme_step(&frame, bcs, &w, t, t1 - t, k < cfg.time.startup_steps)?;
        w = out.values;
        residuals.push(out.residuals);
        let snap = Snapshot::new(t1, nodes_at(t1), w.clone())?;
        boundary.push(&snap);
        if let Some(b) = bound {
            if snap.scale() > b * (1.0 + 1e-9) {
                return Err(LabError::Solver { time: t1, message: format!("sup-norm exceeds a-priori bound {b}") });
            }
        }
        if (k + 1) % cfg.time.output_every == 0 || k + 1 == steps {
            if cfg.domain.half_line {
                check_truncation(&snap)?;
            }
            snapshots.push(snap);
        }
    }
    Ok(Trajectory {
        snapshots,
        boundary,
        residuals,
        meta: SolverMeta {
            scheme: "crank-nicolson".into(),
            dt,
            nodes: n,
            steps,
            startup_steps: cfg.time.startup_steps.min(steps),
        },
        fronts: None,
    })
}

/// Relative level below which the far field counts as untouched.
pub const TRUNCATION_LEVEL: f64 = 1e-6;

/// The solution must stay negligible on the last 10% before the artificial
/// far-field boundary of a truncated half line.
fn check_truncation(s: &Snapshot) -> Result<()> {
    let (l, r) = (s.nodes[0], s.nodes[s.len() - 1]);
    let edge = r - 0.1 * (r - l);
    let far = s.nodes.iter().zip(&s.values).filter(|(x, _)| **x >= edge).fold(0.0f64, |m, (_, v)| m.max(v.abs()));
    if far > TRUNCATION_LEVEL * s.scale() {
        return Err(LabError::Solver {
            time: s.t,
            message: format!("solution reached the last 10% of the truncated half line (|u| = {far:e}); enlarge L_trunc"),
        });
    }
    Ok(())
}
