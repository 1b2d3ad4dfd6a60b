use serde::{Deserialize, Serialize};

use super::functions::TimeFunction;
use crate::error::{invalid, LabError, Result};

/// Boundary side. `Left` is side 1 (`ξ1`), `Right` is side 2 (`ξ2`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Left, Side::Right];

    pub fn index(self) -> usize {
        match self {
            Side::Left => 1,
            Side::Right => 2,
        }
    }

    /// `(-1)^i`: -1 on the left, +1 on the right.
    pub fn sign(self) -> f64 {
        match self {
            Side::Left => -1.0,
            Side::Right => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

/// Closed time window `[from, to]`.
pub type Window = [f64; 2];

/// The interval `I(t) = [ξ1(t), ξ2(t)]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MovingDomain {
    pub left: TimeFunction,
    pub right: TimeFunction,
    /// Windows on which `ξ1` is declared C¹. `None` means the whole horizon.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left_c1: Option<Vec<Window>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right_c1: Option<Vec<Window>>,
    /// Declared Lipschitz constant used for the sampled continuity check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lipschitz: Option<f64>,
    /// The right end is a truncation of a half line `[ξ1, ∞)`.
    #[serde(default)]
    pub half_line: bool,
}

impl MovingDomain {
    pub fn fixed(x0: f64, x1: f64) -> Self {
        MovingDomain {
            left: TimeFunction::Constant(x0),
            right: TimeFunction::Constant(x1),
            left_c1: None,
            right_c1: None,
            lipschitz: None,
            half_line: false,
        }
    }

    pub fn new(left: TimeFunction, right: TimeFunction) -> Self {
        MovingDomain { left, right, ..Self::fixed(0.0, 1.0) }
    }

    pub fn endpoint(&self, side: Side, t: f64) -> f64 {
        match side {
            Side::Left => self.left.eval(t),
            Side::Right => self.right.eval(t),
        }
    }

    pub fn interval(&self, t: f64) -> (f64, f64) {
        (self.left.eval(t), self.right.eval(t))
    }

    pub fn is_fixed(&self) -> bool {
        self.left.is_constant() && self.right.is_constant()
    }

    fn windows(&self, side: Side) -> Option<&Vec<Window>> {
        match side {
            Side::Left => self.left_c1.as_ref(),
            Side::Right => self.right_c1.as_ref(),
        }
    }

    /// `ξ_i'(t)` by centered differences inside a declared C¹ window, with
    /// second-order one-sided stencils at the window ends.
    pub fn velocity(&self, side: Side, t: f64, step: f64) -> Result<f64> {
        let f = |s: f64| self.endpoint(side, s);
        let (lo, hi) = match self.windows(side) {
            None => (f64::NEG_INFINITY, f64::INFINITY),
            Some(ws) => {
                let tol = 1e-12 * (1.0 + t.abs());
                match ws.iter().find(|w| w[0] - tol <= t && t <= w[1] + tol) {
                    Some(w) => (w[0], w[1]),
                    None => {
                        // offending sub-interval: the gap between declared windows containing t
                        let from = ws.iter().map(|w| w[1]).filter(|&e| e < t).fold(f64::NEG_INFINITY, f64::max);
                        let to = ws.iter().map(|w| w[0]).filter(|&s| s > t).fold(f64::INFINITY, f64::min);
                        return Err(LabError::Transform {
                            message: format!("{} endpoint has no C¹ annotation at t={t}", side.name()),
                            from,
                            to,
                        });
                    }
                }
            }
        };
        let h = step.min((hi - lo) / 4.0).max(f64::MIN_POSITIVE);
        Ok(if t - h < lo {
            (-3.0 * f(t) + 4.0 * f(t + h) - f(t + 2.0 * h)) / (2.0 * h)
        } else if t + h > hi {
            (3.0 * f(t) - 4.0 * f(t - h) + f(t - 2.0 * h)) / (2.0 * h)
        } else {
            (f(t + h) - f(t - h)) / (2.0 * h)
        })
    }

    pub(crate) fn validate(&self, t0: f64, t1: f64, samples_dt: f64) -> Result<()> {
        self.left.validate("left endpoint")?;
        self.right.validate("right endpoint")?;
        for ws in [&self.left_c1, &self.right_c1].into_iter().flatten() {
            if ws.iter().any(|w| !(w[0] < w[1])) {
                return invalid("C¹ window must have from < to");
            }
        }
        let n = (((t1 - t0) / samples_dt).ceil() as usize).clamp(16, 20_000);
        let mut prev: Option<(f64, f64)> = None;
        let dt = (t1 - t0) / n as f64;
        for k in 0..=n {
            let t = t0 + dt * k as f64;
            let (l, r) = self.interval(t);
            if !(l.is_finite() && r.is_finite()) {
                return invalid(format!("domain endpoint not finite at t={t}"));
            }
            if !(l < r) {
                return invalid(format!("domain degenerate at t={t}: ξ1={l} ≥ ξ2={r}"));
            }
            if let (Some(lip), Some((pl, pr))) = (self.lipschitz, prev) {
                let jump = (l - pl).abs().max((r - pr).abs());
                if jump > lip * dt * (1.0 + 1e-9) + 1e-14 {
                    return invalid(format!("endpoint jump {jump:e} exceeds L·Δt at t={t}"));
                }
            }
            prev = Some((l, r));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn velocity_uses_one_sided_stencils_at_window_ends() {
        let mut d = MovingDomain::new(
            TimeFunction::Expr(crate::expr::Expr::parse("t^2").unwrap()),
            TimeFunction::Constant(2.0),
        );
        d.left_c1 = Some(vec![[0.0, 1.0], [2.0, 3.0]]);
        // exact for quadratics with any stencil
        for t in [0.0, 0.5, 1.0, 2.0, 3.0] {
            let v = d.velocity(Side::Left, t, 1e-3).unwrap();
            assert!((v - 2.0 * t).abs() < 1e-9, "t={t} v={v}");
        }
        match d.velocity(Side::Left, 1.5, 1e-3) {
            Err(LabError::Transform { from, to, .. }) => assert_eq!((from, to), (1.0, 2.0)),
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_domain_rejected() {
        let d = MovingDomain::new(TimeFunction::Linear { value: 0.0, rate: 1.0 }, TimeFunction::Constant(0.5));
        assert!(d.validate(0.0, 1.0, 0.01).is_err());
        assert!(d.validate(0.0, 0.4, 0.01).is_ok());
    }
}
