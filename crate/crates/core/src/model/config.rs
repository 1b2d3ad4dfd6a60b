//! Scenario configuration: the JSON document describing one run.

use serde::{Deserialize, Serialize};

use super::boundary::{BoundaryCondition, BoundaryPair};
use super::domain::{MovingDomain, Side};
use super::field::CoefficientField;
use super::functions::{Coefficient, Profile};
use super::snapshot::uniform_nodes;
use crate::error::{invalid, LabError, Result};

fn d_zero_tol() -> f64 {
    1e-8
}
fn d_degenerate_tol() -> f64 {
    1e-4
}
fn d_burn_in() -> usize {
    5
}
fn d_drop_window() -> usize {
    10
}
fn d_moment_window() -> usize {
    5
}
fn d_alternations() -> usize {
    2
}
fn d_one() -> usize {
    1
}
fn d_startup() -> usize {
    2
}

/// Zero-detection and checker tolerances. `zero` and `degenerate` are
/// relative to the snapshot sup-norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    #[serde(default = "d_zero_tol")]
    pub zero: f64,
    #[serde(default = "d_degenerate_tol")]
    pub degenerate: f64,
    /// Burn-in, in solver steps.
    #[serde(default = "d_burn_in")]
    pub burn_in_steps: usize,
    /// Drop attribution window, in output steps.
    #[serde(default = "d_drop_window")]
    pub drop_window: usize,
    /// Flank window `W` of the moment classifier, in trace samples.
    #[serde(default = "d_moment_window")]
    pub moment_window: usize,
    /// Alternation threshold `k_x` of the moment classifier.
    #[serde(default = "d_alternations")]
    pub alternations: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            zero: d_zero_tol(),
            degenerate: d_degenerate_tol(),
            burn_in_steps: d_burn_in(),
            drop_window: d_drop_window(),
            moment_window: d_moment_window(),
            alternations: d_alternations(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSettings {
    #[serde(default)]
    pub start: f64,
    pub horizon: f64,
    pub dt: f64,
    /// Record a snapshot every this many steps.
    #[serde(default = "d_one")]
    pub output_every: usize,
    /// Period of time-periodic data, when the scenario is periodic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
    /// Leading steps taken as two implicit half-steps each, to damp the
    /// Crank–Nicolson response to incompatible initial data.
    #[serde(default = "d_startup")]
    pub startup_steps: usize,
}

impl TimeSettings {
    pub fn new(horizon: f64, dt: f64) -> Self {
        TimeSettings { start: 0.0, horizon, dt, output_every: 1, period: None, startup_steps: d_startup() }
    }

    pub fn end(&self) -> f64 {
        self.start + self.horizon
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt - 1e-9).ceil() as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSettings {
    pub nodes: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OutputOptions {
    /// Also write full profiles (CSV long format and binary dump).
    #[serde(default)]
    pub profiles: bool,
}

/// A complete, validated scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub coefficients: CoefficientField,
    pub domain: MovingDomain,
    pub boundary: BoundaryPair,
    pub initial: Profile,
    pub time: TimeSettings,
    pub grid: GridSettings,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputOptions,
    /// Declares the a-priori comparison bound `0 ≤ u ≤ 1 + ‖u0‖∞`.
    #[serde(default)]
    pub h4_bound: bool,
}

/// Parses a JSON scenario and validates every invariant.
pub fn build_scenario(source: &str) -> Result<ScenarioConfig> {
    let cfg: ScenarioConfig = serde_json::from_str(source).map_err(|e| LabError::Parse(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

impl ScenarioConfig {
    /// A minimal scenario; callers adjust fields and then `validate`.
    pub fn new(name: &str, field: CoefficientField, domain: MovingDomain, boundary: BoundaryPair, initial: Profile) -> Self {
        ScenarioConfig {
            name: name.to_string(),
            coefficients: field,
            domain,
            boundary,
            initial,
            time: TimeSettings::new(0.1, 1e-4),
            grid: GridSettings { nodes: 201 },
            tolerances: Tolerances::default(),
            output: OutputOptions::default(),
            h4_bound: false,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn is_free_boundary(&self) -> bool {
        self.boundary.is_free_boundary()
    }

    /// Initial values on the solver grid.
    pub fn initial_nodes(&self) -> (Vec<f64>, Vec<f64>) {
        let (l, r) = self.domain.interval(self.time.start);
        let nodes = uniform_nodes(l, r, self.grid.nodes);
        let values = nodes.iter().map(|&x| self.initial.eval(x, self.time.start)).collect();
        (nodes, values)
    }

    pub fn validate(&self) -> Result<()> {
        let t0 = self.time.start;
        let t1 = self.time.end();
        if self.grid.nodes < 3 {
            return invalid("grid needs M ≥ 3 nodes");
        }
        if !(self.time.dt > 0.0) || !self.time.dt.is_finite() {
            return invalid("time step Δt must be positive");
        }
        if !(self.time.horizon > 0.0) {
            return invalid("horizon must be positive");
        }
        if self.time.output_every == 0 {
            return invalid("output_every must be ≥ 1");
        }
        if let Some(p) = self.time.period {
            if !(p > 0.0) {
                return invalid("period must be positive");
            }
        }
        let tol = &self.tolerances;
        if !(tol.zero > 0.0) || !(tol.degenerate > 0.0) {
            return invalid("zero and degeneracy tolerances must be positive");
        }
        if tol.moment_window < 3 {
            return invalid("moment window W must be ≥ 3 samples");
        }
        if tol.alternations < 2 {
            return invalid("alternation threshold k_x must be ≥ 2");
        }
        self.coefficients.validate_forms()?;
        self.initial.validate()?;
        self.domain.validate(t0, t1, self.time.dt)?;
        self.boundary.left.validate(Side::Left, t0, t1)?;
        self.boundary.right.validate(Side::Right, t0, t1)?;

        let (nodes, u0) = self.initial_nodes();
        let sup = u0.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        if !sup.is_finite() {
            return invalid("initial profile not finite");
        }
        if sup == 0.0 {
            return invalid("initial profile identically zero (u(·,t) ≢ 0 required)");
        }

        self.validate_coefficients(t0, t1)?;

        if self.is_free_boundary() {
            self.validate_free_boundary(&nodes, &u0, sup)?;
        }
        if let Some(dim) = self.coefficients.radial_dim() {
            if dim > 1 {
                let touches_origin = self.domain.left.is_constant() && self.domain.left.eval(t0) == 0.0;
                if self.domain.left.eval(t0) < 0.0 {
                    return invalid("radial domain must lie in r ≥ 0");
                }
                if touches_origin && !matches!(self.boundary.left, BoundaryCondition::Neumann) {
                    return invalid("radial domain containing r = 0 needs the symmetry condition (neumann) on the left");
                }
            }
        }
        Ok(())
    }

    fn validate_coefficients(&self, t0: f64, t1: f64) -> Result<()> {
        let f = &self.coefficients;
        let a_floor = f.bounds.a_min.unwrap_or(0.0);
        let (nx, nt) = (33, 9);
        let radial = f.radial_dim().is_some();
        for k in 0..nt {
            let t = t0 + (t1 - t0) * k as f64 / (nt - 1) as f64;
            let (l, r) = self.domain.interval(t);
            let dx = (r - l) / (self.grid.nodes - 1) as f64;
            for j in 0..nx {
                let x = l + (r - l) * j as f64 / (nx - 1) as f64;
                let a = f.a(x, t);
                if !(a > 0.0) || a < a_floor {
                    return invalid(format!("diffusion a={a} not above a_min at (x={x}, t={t})"));
                }
                if radial {
                    continue;
                }
                let b = f.b(x, t);
                let c = f.c(x, t);
                if !b.is_finite() || !c.is_finite() {
                    return invalid(format!("coefficient not finite at (x={x}, t={t})"));
                }
                let peclet = b.abs() * dx / a;
                if peclet >= 2.0 {
                    return invalid(format!("grid Péclet number {peclet:.3} ≥ 2 at (x={x}, t={t}); refine the grid"));
                }
            }
        }
        Ok(())
    }

    fn validate_free_boundary(&self, nodes: &[f64], u0: &[f64], sup: f64) -> Result<()> {
        let is_stefan = |bc: &BoundaryCondition| matches!(bc, BoundaryCondition::FreeStefan { .. });
        if !(is_stefan(&self.boundary.left) && is_stefan(&self.boundary.right)) {
            return invalid("free boundary scenarios need free_stefan on both sides");
        }
        if !self.domain.is_fixed() {
            return invalid("free boundary scenarios take constant initial fronts g0 < h0");
        }
        let f = &self.coefficients;
        let unit = |c: &Coefficient, v: f64| c.constant_value() == Some(v);
        if !(unit(&f.a, 1.0) && unit(&f.b, 0.0) && unit(&f.c, 0.0)) {
            return invalid("free boundary scenarios solve u_t = u_xx + f(t, u): need a=1, b=0, c=0");
        }
        for k in 0..=20 {
            let t = self.time.start + self.time.horizon * k as f64 / 20.0;
            for &x in nodes.iter().step_by((nodes.len() / 16).max(1)) {
                let v = f.f(x, t, 0.0);
                if v != 0.0 {
                    return invalid(format!("reaction must satisfy f(t, 0) = 0; got {v} at t={t}"));
                }
            }
        }
        if u0.iter().any(|&v| v < -self.tolerances.zero * sup) {
            return invalid("free boundary initial data must be non-negative");
        }
        let ends = u0[0].abs().max(u0[u0.len() - 1].abs());
        if ends > self.tolerances.zero.max(1e-12) * sup {
            return invalid("free boundary initial data must vanish at the fronts");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use crate::model::functions::TimeFunction;

    fn heat_json() -> String {
        r#"{
            "name": "heat",
            "coefficients": {"a": {"constant": 1.0}, "b": {"constant": 0.0}, "c": {"constant": 0.0}},
            "domain": {"left": {"constant": 0.0}, "right": {"constant": 1.0}},
            "boundary": {"left": {"kind": "dirichlet_zero"}, "right": {"kind": "dirichlet_zero"}},
            "initial": {"expr": "sin(pi*x)"},
            "time": {"horizon": 0.1, "dt": 1e-4},
            "grid": {"nodes": 101}
        }"#
        .to_string()
    }

    #[test]
    fn heat_config_is_valid() {
        let cfg = build_scenario(&heat_json()).unwrap();
        assert_eq!(cfg.grid.nodes, 101);
        assert_eq!(cfg.tolerances, Tolerances::default());
        assert!(!cfg.is_free_boundary());
    }

    #[test]
    fn negative_robin_rejected() {
        let src = heat_json().replace(
            r#""left": {"kind": "dirichlet_zero"}"#,
            r#""left": {"kind": "robin", "beta": {"constant": -1.0}}"#,
        );
        match build_scenario(&src) {
            Err(LabError::Validation(m)) => assert!(m.contains("Robin coefficient negative"), "{m}"),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn radial_config_carries_singularity_marker() {
        let src = heat_json()
            .replace(r#""b": {"constant": 0.0}"#, r#""b": {"radial": {"dim": 3}}"#)
            .replace(r#""left": {"kind": "dirichlet_zero"}"#, r#""left": {"kind": "neumann"}"#)
            .replace("sin(pi*x)", "cos(pi*x/2)");
        let cfg = build_scenario(&src).unwrap();
        assert_eq!(cfg.coefficients.radial_dim(), Some(3));
        assert_eq!(cfg.coefficients.singularity(), Some(0.0));
    }

    #[test]
    fn malformed_and_invalid_sources() {
        assert!(matches!(build_scenario("{not json"), Err(LabError::Parse(_))));
        let zero = heat_json().replace("sin(pi*x)", "0*x");
        assert!(matches!(build_scenario(&zero), Err(LabError::Validation(_))));
        let bad_expr = heat_json().replace("sin(pi*x)", "sin(pi*x");
        assert!(matches!(build_scenario(&bad_expr), Err(LabError::Parse(_))));
        let few = heat_json().replace(r#""nodes": 101"#, r#""nodes": 2"#);
        assert!(build_scenario(&few).is_err());
    }

    #[test]
    fn round_trip_is_structural_identity() {
        let mut cfg = build_scenario(&heat_json()).unwrap();
        cfg.boundary.right = BoundaryCondition::Robin {
            beta: TimeFunction::Expr(Expr::parse("1 + 0.5*sin(2*pi*t)").unwrap()),
        };
        cfg.time.period = Some(1.0);
        let back = build_scenario(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
    }
}
