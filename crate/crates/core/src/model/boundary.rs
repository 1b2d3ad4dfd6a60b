use serde::{Deserialize, Serialize};

use super::domain::Side;
use super::functions::{FluxLaw, TimeFunction};
use crate::error::{invalid, Result};

fn unit() -> f64 {
    1.0
}

/// Boundary condition on one side. Flux-type conditions are written with the
/// outward convention `u_x + (-1)^i β u = 0`, so on the left `u_x = β u`
/// and on the right `u_x = -β u`; `NonlinearFlux` reads `u_x = g(t, u)` on
/// the left and `u_x = -g(t, u)` on the right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryCondition {
    DirichletZero,
    DirichletValue { value: TimeFunction },
    Neumann,
    Robin { beta: TimeFunction },
    NonlinearFlux {
        law: FluxLaw,
        /// Require `g_u ≥ 0` for `u ≥ 0`.
        #[serde(default)]
        h4: bool,
    },
    /// Stefan front: `u = 0` and front speed `-μ u_x`.
    FreeStefan {
        #[serde(default = "unit")]
        mu: f64,
    },
}

impl BoundaryCondition {
    pub fn robin(beta: f64) -> Self {
        BoundaryCondition::Robin { beta: TimeFunction::Constant(beta) }
    }

    pub fn is_dirichlet(&self) -> bool {
        matches!(self, BoundaryCondition::DirichletZero | BoundaryCondition::DirichletValue { .. })
    }

    pub fn is_flux(&self) -> bool {
        matches!(
            self,
            BoundaryCondition::Neumann | BoundaryCondition::Robin { .. } | BoundaryCondition::NonlinearFlux { .. }
        )
    }

    pub fn label(&self) -> &'static str {
        match self {
            BoundaryCondition::DirichletZero => "dirichlet_zero",
            BoundaryCondition::DirichletValue { .. } => "dirichlet_value",
            BoundaryCondition::Neumann => "neumann",
            BoundaryCondition::Robin { .. } => "robin",
            BoundaryCondition::NonlinearFlux { .. } => "nonlinear_flux",
            BoundaryCondition::FreeStefan { .. } => "free_stefan",
        }
    }

    /// `u_x` demanded at the boundary for boundary value `u`, for flux-type
    /// conditions; `None` otherwise.
    pub fn required_slope(&self, side: Side, t: f64, u: f64) -> Option<f64> {
        let outward = -side.sign();
        match self {
            BoundaryCondition::Neumann => Some(0.0),
            BoundaryCondition::Robin { beta } => Some(outward * beta.eval(t) * u),
            BoundaryCondition::NonlinearFlux { law, .. } => Some(outward * law.eval(t, u)),
            _ => None,
        }
    }

    pub(crate) fn validate(&self, side: Side, t0: f64, t1: f64) -> Result<()> {
        let n = 200;
        let times = (0..=n).map(|k| t0 + (t1 - t0) * k as f64 / n as f64);
        match self {
            BoundaryCondition::DirichletValue { value } => value.validate("Dirichlet value"),
            BoundaryCondition::Robin { beta } => {
                beta.validate("Robin β")?;
                for t in times {
                    if beta.eval(t) < 0.0 {
                        return invalid(format!(
                            "Robin coefficient negative on the {} side at t={t} (β={})",
                            side.name(),
                            beta.eval(t)
                        ));
                    }
                }
                Ok(())
            }
            BoundaryCondition::NonlinearFlux { law, h4 } => {
                law.validate()?;
                if *h4 {
                    for t in times {
                        for k in 0..=40 {
                            let u = 4.0 * k as f64 / 40.0;
                            if law.du(t, u) < -1e-9 {
                                return invalid(format!("flux law violates g_u ≥ 0 at t={t}, u={u}"));
                            }
                        }
                    }
                }
                Ok(())
            }
            BoundaryCondition::FreeStefan { mu } if !(*mu > 0.0) => invalid("Stefan coefficient μ must be positive"),
            _ => Ok(()),
        }
    }
}

/// Boundary conditions on both sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPair {
    pub left: BoundaryCondition,
    pub right: BoundaryCondition,
}

impl BoundaryPair {
    pub fn new(left: BoundaryCondition, right: BoundaryCondition) -> Self {
        BoundaryPair { left, right }
    }

    pub fn both(bc: BoundaryCondition) -> Self {
        BoundaryPair { left: bc.clone(), right: bc }
    }

    pub fn side(&self, side: Side) -> &BoundaryCondition {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn is_free_boundary(&self) -> bool {
        matches!(self.left, BoundaryCondition::FreeStefan { .. })
            || matches!(self.right, BoundaryCondition::FreeStefan { .. })
    }
}
