//! Bi-objective closed-loop supply chain network design.
//!
//! The library models a four-echelon network (factories, warehouses,
//! customers, disassembly centers) with a reverse flow for collected
//! end-of-life units. Two objectives are minimized: total cost and total
//! CO₂ emission. Two solution routes are provided and can be compared:
//!
//! * an exact ε-constraint sweep backed by a built-in two-phase simplex
//!   and branch-and-bound MILP solver ([`eps`], [`lp`], [`simplex`],
//!   [`branch_bound`]),
//! * an elitist multi-objective genetic algorithm with nondominated
//!   sorting and crowding distance ([`moga`]).
//!
//! Fronts are assembled, filtered, and scored in [`pareto`]; instances and
//! fronts persist through [`io`]; [`oracle`] holds brute-force reference
//! solvers used by tests and the `verify` command.

// Index-style loops mirror the tensor sums of the model throughout.
#![allow(clippy::needless_range_loop)]

pub mod branch_bound;
pub mod error;
pub mod eps;
pub mod formulation;
pub mod io;
pub mod lp;
pub mod model;
pub mod moga;
pub mod oracle;
pub(crate) mod parallel;
pub mod pareto;
pub mod simplex;

pub use error::{Error, Result};
pub use model::{
    check_feasibility, evaluate_cost, evaluate_emissions, reliability_factor, CostBreakdown,
    EmissionBreakdown, FeasibilityReport, FlowSolution, IndicatorMode, NetworkInstance,
};
pub use pareto::{FrontEntry, FrontMetrics, ParetoFront, Provenance};
