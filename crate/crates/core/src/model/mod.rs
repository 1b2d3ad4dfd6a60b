//! Domain types shared by every other module: coefficients, domains,
//! boundary conditions, scenario configuration and solution snapshots.
//!
//! All types are plain immutable data once validated and are `Send + Sync`.

mod boundary;
mod config;
mod domain;
mod field;
mod functions;
mod snapshot;

pub use boundary::{BoundaryCondition, BoundaryPair};
pub use config::{build_scenario, GridSettings, OutputOptions, ScenarioConfig, TimeSettings, Tolerances};
pub use domain::{MovingDomain, Side, Window};
pub use field::{CoefficientField, DeclaredBounds, SmoothnessClaim};
pub use functions::{Coefficient, FluxLaw, Profile, Reaction, Table, TimeFunction, TrigTerm};
pub use snapshot::{derivative_estimates, left_slope, right_slope, uniform_nodes, Snapshot};
