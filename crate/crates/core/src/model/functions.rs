//! Evaluable building blocks: functions of time, coefficient families,
//! reaction terms, boundary flux laws and initial profiles.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::expr::Expr;

/// A scalar function of time, used for moving endpoints, Robin rates and
/// Dirichlet data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeFunction {
    Constant(f64),
    /// `value + rate * t`
    Linear { value: f64, rate: f64 },
    /// `mean + amplitude * sin(2π t / period + phase)`
    Periodic {
        mean: f64,
        amplitude: f64,
        period: f64,
        #[serde(default)]
        phase: f64,
    },
    Expr(Expr),
}

impl TimeFunction {
    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            TimeFunction::Constant(v) => *v,
            TimeFunction::Linear { value, rate } => value + rate * t,
            TimeFunction::Periodic { mean, amplitude, period, phase } => {
                mean + amplitude * (2.0 * PI * t / period + phase).sin()
            }
            TimeFunction::Expr(e) => e.eval(0.0, t, 0.0),
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            TimeFunction::Constant(_) => true,
            TimeFunction::Linear { rate, .. } => *rate == 0.0,
            TimeFunction::Periodic { amplitude, .. } => *amplitude == 0.0,
            TimeFunction::Expr(e) => !e.uses_t(),
        }
    }

    pub(crate) fn validate(&self, what: &str) -> Result<()> {
        match self {
            TimeFunction::Periodic { period, .. } if !(*period > 0.0) => {
                invalid(format!("{what}: period must be positive"))
            }
            TimeFunction::Expr(e) if e.uses_x() || e.uses_u() => {
                invalid(format!("{what}: time function may only depend on t"))
            }
            _ => Ok(()),
        }
    }
}

/// One term `amplitude * cos(π·wave_x·x + 2π·freq_t·t + phase)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub amplitude: f64,
    #[serde(default)]
    pub wave_x: f64,
    #[serde(default)]
    pub freq_t: f64,
    #[serde(default)]
    pub phase: f64,
}

impl TrigTerm {
    #[inline]
    fn eval(&self, x: f64, t: f64) -> f64 {
        self.amplitude * (PI * self.wave_x * x + 2.0 * PI * self.freq_t * t + self.phase).cos()
    }
}

/// Sampled coefficient table on a tensor grid, bilinearly interpolated and
/// clamped outside the sampled rectangle. `values[k][j]` is the value at
/// `(xs[j], ts[k])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub xs: Vec<f64>,
    pub ts: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

fn bracket(grid: &[f64], v: f64) -> (usize, f64) {
    if grid.len() == 1 || v <= grid[0] {
        return (0, 0.0);
    }
    let last = grid.len() - 1;
    if v >= grid[last] {
        return (last - 1, 1.0);
    }
    let j = grid.partition_point(|&g| g <= v) - 1;
    let w = (v - grid[j]) / (grid[j + 1] - grid[j]);
    (j, w)
}

impl Table {
    pub fn eval(&self, x: f64, t: f64) -> f64 {
        let (j, wx) = bracket(&self.xs, x);
        let (k, wt) = bracket(&self.ts, t);
        let row = |k: usize| -> f64 {
            let r = &self.values[k];
            if self.xs.len() == 1 {
                r[0]
            } else {
                r[j] * (1.0 - wx) + r[j + 1] * wx
            }
        };
        if self.ts.len() == 1 {
            row(0)
        } else {
            row(k) * (1.0 - wt) + row(k + 1) * wt
        }
    }

    fn validate(&self) -> Result<()> {
        let increasing = |g: &[f64]| g.windows(2).all(|w| w[0] < w[1]);
        if self.xs.is_empty() || self.ts.is_empty() {
            return invalid("table: empty axis");
        }
        if !increasing(&self.xs) || !increasing(&self.ts) {
            return invalid("table: axes must be strictly increasing");
        }
        if self.values.len() != self.ts.len() || self.values.iter().any(|r| r.len() != self.xs.len()) {
            return invalid("table: values shape does not match axes");
        }
        if self.values.iter().flatten().any(|v| !v.is_finite()) {
            return invalid("table: non-finite entry");
        }
        Ok(())
    }
}

/// A coefficient `a`, `b` or `c` as a function of `(x, t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coefficient {
    Constant(f64),
    /// `mean + Σ terms`
    Trig { mean: f64, terms: Vec<TrigTerm> },
    /// `mean + amplitude * sin(2π t / period + phase)`, constant in x.
    Periodic {
        mean: f64,
        amplitude: f64,
        period: f64,
        #[serde(default)]
        phase: f64,
    },
    /// Radial drift `(N-1)/r`, singular at `r = 0`.
    Radial { dim: u32 },
    Expr(Expr),
    Table(Table),
}

impl Coefficient {
    #[inline]
    pub fn eval(&self, x: f64, t: f64) -> f64 {
        match self {
            Coefficient::Constant(v) => *v,
            Coefficient::Trig { mean, terms } => mean + terms.iter().map(|k| k.eval(x, t)).sum::<f64>(),
            Coefficient::Periodic { mean, amplitude, period, phase } => {
                mean + amplitude * (2.0 * PI * t / period + phase).sin()
            }
            Coefficient::Radial { dim } => (*dim as f64 - 1.0) / x,
            Coefficient::Expr(e) => e.eval(x, t, 0.0),
            Coefficient::Table(tab) => tab.eval(x, t),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coefficient::Constant(v) => *v == 0.0,
            Coefficient::Trig { mean, terms } => *mean == 0.0 && terms.iter().all(|k| k.amplitude == 0.0),
            Coefficient::Periodic { mean, amplitude, .. } => *mean == 0.0 && *amplitude == 0.0,
            Coefficient::Radial { dim } => *dim == 1,
            _ => false,
        }
    }

    pub fn constant_value(&self) -> Option<f64> {
        match self {
            Coefficient::Constant(v) => Some(*v),
            Coefficient::Trig { mean, terms } if terms.iter().all(|k| k.amplitude == 0.0) => Some(*mean),
            Coefficient::Periodic { mean, amplitude, .. } if *amplitude == 0.0 => Some(*mean),
            Coefficient::Expr(e) if !e.uses_x() && !e.uses_t() => Some(e.eval(0.0, 0.0, 0.0)),
            _ => None,
        }
    }

    pub(crate) fn validate(&self, what: &str) -> Result<()> {
        match self {
            Coefficient::Periodic { period, .. } if !(*period > 0.0) => {
                invalid(format!("{what}: period must be positive"))
            }
            Coefficient::Radial { dim } if *dim == 0 => invalid(format!("{what}: radial dimension must be ≥ 1")),
            Coefficient::Expr(e) if e.uses_u() => invalid(format!("{what}: coefficient may not depend on u")),
            Coefficient::Table(t) => t.validate(),
            _ => Ok(()),
        }
    }
}

/// Semilinear reaction `f(x, t, u)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reaction {
    Expr(Expr),
    /// `u (1 - u) (u - θ(t))`
    Bistable { theta: TimeFunction },
    /// `r(t) u (1 - u)`
    Logistic { rate: TimeFunction },
}

impl Reaction {
    #[inline]
    pub fn eval(&self, x: f64, t: f64, u: f64) -> f64 {
        match self {
            Reaction::Expr(e) => e.eval(x, t, u),
            Reaction::Bistable { theta } => u * (1.0 - u) * (u - theta.eval(t)),
            Reaction::Logistic { rate } => rate.eval(t) * u * (1.0 - u),
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        match self {
            Reaction::Bistable { theta } => theta.validate("bistable threshold"),
            Reaction::Logistic { rate } => rate.validate("logistic rate"),
            Reaction::Expr(_) => Ok(()),
        }
    }
}

/// Boundary flux law `g(t, u)` for conditions of the form `u_x = g(t, u)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FluxLaw {
    /// `β(t) u + cubic · u³`
    Polynomial {
        beta: TimeFunction,
        #[serde(default)]
        cubic: f64,
    },
    Expr(Expr),
}

impl FluxLaw {
    #[inline]
    pub fn eval(&self, t: f64, u: f64) -> f64 {
        match self {
            FluxLaw::Polynomial { beta, cubic } => beta.eval(t) * u + cubic * u * u * u,
            FluxLaw::Expr(e) => e.eval(0.0, t, u),
        }
    }

    /// `∂g/∂u`, exact for the polynomial family and a centered difference
    /// otherwise.
    pub fn du(&self, t: f64, u: f64) -> f64 {
        match self {
            FluxLaw::Polynomial { beta, cubic } => beta.eval(t) + 3.0 * cubic * u * u,
            FluxLaw::Expr(e) => {
                let h = 1e-6 * (1.0 + u.abs());
                (e.eval(0.0, t, u + h) - e.eval(0.0, t, u - h)) / (2.0 * h)
            }
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        match self {
            FluxLaw::Polynomial { beta, .. } => beta.validate("flux β"),
            FluxLaw::Expr(e) if e.uses_x() => invalid("flux law may only depend on t and u"),
            FluxLaw::Expr(_) => Ok(()),
        }
    }
}

/// Initial data, either an expression in `x` (with `t` bound to the start
/// time) or a sampled table with linear interpolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    Expr(Expr),
    Table { x: Vec<f64>, u: Vec<f64> },
}

impl Profile {
    pub fn eval(&self, x: f64, t: f64) -> f64 {
        match self {
            Profile::Expr(e) => e.eval(x, t, 0.0),
            Profile::Table { x: xs, u } => {
                let (j, w) = bracket(xs, x);
                if xs.len() == 1 {
                    u[0]
                } else {
                    u[j] * (1.0 - w) + u[j + 1] * w
                }
            }
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        match self {
            Profile::Expr(e) if e.uses_u() => invalid("initial profile may not depend on u"),
            Profile::Table { x, u } => {
                if x.is_empty() || x.len() != u.len() {
                    return invalid("initial table: x and u must be non-empty and of equal length");
                }
                if !x.windows(2).all(|w| w[0] < w[1]) {
                    return invalid("initial table: x must be strictly increasing");
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_is_bilinear_and_clamped() {
        let tab = Table {
            xs: vec![0.0, 1.0],
            ts: vec![0.0, 2.0],
            values: vec![vec![0.0, 1.0], vec![2.0, 3.0]],
        };
        assert_eq!(tab.eval(0.5, 1.0), 1.5);
        assert_eq!(tab.eval(-1.0, -1.0), 0.0);
        assert_eq!(tab.eval(5.0, 5.0), 3.0);
        // bilinear reproduces a + bx + ct exactly
        assert!((tab.eval(0.25, 0.5) - (0.25 + 0.5)).abs() < 1e-15);
    }

    #[test]
    fn families_evaluate() {
        let p = Coefficient::Periodic { mean: 1.0, amplitude: 0.5, period: 2.0, phase: 0.0 };
        assert!((p.eval(0.3, 0.5) - 1.5).abs() < 1e-15);
        let r = Coefficient::Radial { dim: 3 };
        assert_eq!(r.eval(0.5, 0.0), 4.0);
        let trig = Coefficient::Trig {
            mean: 1.0,
            terms: vec![TrigTerm { amplitude: 0.5, wave_x: 1.0, freq_t: 0.0, phase: 0.0 }],
        };
        assert!((trig.eval(0.0, 0.0) - 1.5).abs() < 1e-15);
        assert!((trig.eval(1.0, 0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn flux_derivative_matches_difference() {
        let law = FluxLaw::Polynomial { beta: TimeFunction::Constant(0.5), cubic: 0.1 };
        let e = FluxLaw::Expr(Expr::parse("0.5*u + 0.1*u^3").unwrap());
        for u in [0.0, 0.3, 1.7] {
            assert!((law.du(0.0, u) - e.du(0.0, u)).abs() < 1e-7);
            assert_eq!(law.eval(0.0, u), e.eval(0.0, u));
        }
    }
}
