use serde::{Deserialize, Serialize};

use super::functions::{Coefficient, Reaction};
use crate::error::{invalid, Result};

/// Which smoothness hypothesis set a scenario claims for its coefficients.
/// The claim is recorded, never verified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SmoothnessClaim {
    /// `a, 1/a, a_t, a_x, a_xx, b, b_t, b_x, c` bounded.
    #[default]
    Classical,
    /// `a, 1/a, a_t, a_x, b, c` bounded.
    Weak,
}

/// Declared L∞ bounds. Checkers compare sampled values against these and
/// warn; they are never inferred.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DeclaredBounds {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a_x: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
}

fn zero() -> Coefficient {
    Coefficient::Constant(0.0)
}

/// Coefficients of `u_t = a u_xx + b u_x + c u + f(x, t, u)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientField {
    pub a: Coefficient,
    #[serde(default = "zero")]
    pub b: Coefficient,
    #[serde(default = "zero")]
    pub c: Coefficient,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reaction: Option<Reaction>,
    #[serde(default)]
    pub bounds: DeclaredBounds,
    #[serde(default)]
    pub smoothness: SmoothnessClaim,
    /// Set when the radial drift has been replaced at `r = 0` by its
    /// symmetry limit. Derived during validation, not serialized.
    #[serde(skip)]
    pub(crate) origin_regularized: bool,
}

impl CoefficientField {
    pub fn constant(a: f64, b: f64, c: f64) -> Self {
        CoefficientField {
            a: Coefficient::Constant(a),
            b: Coefficient::Constant(b),
            c: Coefficient::Constant(c),
            reaction: None,
            bounds: DeclaredBounds::default(),
            smoothness: SmoothnessClaim::Classical,
            origin_regularized: false,
        }
    }

    pub fn heat() -> Self {
        Self::constant(1.0, 0.0, 0.0)
    }

    pub fn with_reaction(mut self, f: Reaction) -> Self {
        self.reaction = Some(f);
        self
    }

    /// Dimension `N` when `b` is the radial drift `(N-1)/r`.
    pub fn radial_dim(&self) -> Option<u32> {
        match self.b {
            Coefficient::Radial { dim } => Some(dim),
            _ => None,
        }
    }

    /// Location of the declared singularity of the drift, if any.
    pub fn singularity(&self) -> Option<f64> {
        self.radial_dim().filter(|&n| n > 1).map(|_| 0.0)
    }

    pub fn origin_regularized(&self) -> bool {
        self.origin_regularized
    }

    #[inline]
    pub fn a(&self, x: f64, t: f64) -> f64 {
        self.a.eval(x, t)
    }

    #[inline]
    pub fn b(&self, x: f64, t: f64) -> f64 {
        if self.origin_regularized && x == 0.0 {
            return 0.0;
        }
        self.b.eval(x, t)
    }

    #[inline]
    pub fn c(&self, x: f64, t: f64) -> f64 {
        self.c.eval(x, t)
    }

    #[inline]
    pub fn f(&self, x: f64, t: f64, u: f64) -> f64 {
        self.reaction.as_ref().map_or(0.0, |r| r.eval(x, t, u))
    }

    pub(crate) fn validate_forms(&self) -> Result<()> {
        self.a.validate("a")?;
        self.b.validate("b")?;
        self.c.validate("c")?;
        if matches!(self.a, Coefficient::Radial { .. }) || matches!(self.c, Coefficient::Radial { .. }) {
            return invalid("radial family is only valid as the drift b");
        }
        if let Some(r) = &self.reaction {
            r.validate()?;
        }
        if let Some(m) = self.bounds.a_min {
            if !(m > 0.0) {
                return invalid("declared a_min must be positive");
            }
        }
        let b = &self.bounds;
        for v in [b.a_min, b.a_max, b.a_t, b.a_x, b.b, b.c].into_iter().flatten() {
            if !v.is_finite() {
                return invalid("declared bounds must be finite");
            }
        }
        Ok(())
    }

    /// Samples the field on `[x0, x1] × [t0, t1]` and returns one warning per
    /// declared bound that the samples exceed.
    pub fn bound_warnings(&self, x0: f64, x1: f64, t0: f64, t1: f64) -> Vec<String> {
        let (nx, nt) = (41, 21);
        let mut maxes = [f64::INFINITY, 0.0, 0.0, 0.0, 0.0, 0.0]; // a_min, a_max, a_t, a_x, b, c
        let hx = 1e-6 * (x1 - x0).abs().max(1e-12);
        let ht = 1e-6 * (t1 - t0).abs().max(1e-12);
        for k in 0..nt {
            let t = t0 + (t1 - t0) * k as f64 / (nt - 1) as f64;
            for j in 0..nx {
                let x = x0 + (x1 - x0) * j as f64 / (nx - 1) as f64;
                if self.singularity() == Some(x) {
                    continue;
                }
                let a = self.a(x, t);
                maxes[0] = maxes[0].min(a);
                maxes[1] = f64::max(maxes[1], a);
                maxes[2] = f64::max(maxes[2], ((self.a(x, t + ht) - self.a(x, t - ht)) / (2.0 * ht)).abs());
                maxes[3] = f64::max(maxes[3], ((self.a(x + hx, t) - self.a(x - hx, t)) / (2.0 * hx)).abs());
                maxes[4] = f64::max(maxes[4], self.b(x, t).abs());
                maxes[5] = f64::max(maxes[5], self.c(x, t).abs());
            }
        }
        let b = &self.bounds;
        let mut out = Vec::new();
        if let Some(m) = b.a_min {
            if maxes[0] < m {
                out.push(format!("sampled a = {:.6} below declared a_min = {m}", maxes[0]));
            }
        }
        let uppers = [("a", b.a_max, maxes[1]), ("a_t", b.a_t, maxes[2]), ("a_x", b.a_x, maxes[3]), ("b", b.b, maxes[4]), ("c", b.c, maxes[5])];
        for (name, bound, seen) in uppers {
            if let Some(m) = bound {
                if seen > m * (1.0 + 1e-9) {
                    out.push(format!("sampled |{name}| = {seen:.6} exceeds declared bound {m}"));
                }
            }
        }
        out
    }
}
