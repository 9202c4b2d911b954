//! Graph-based technology pathway screening.
//!
//! Models a system of products, suppliers, consumers, and technologies
//! as a conservation graph, solves the surplus-maximizing management LP
//! and the budget-constrained investment MILP, exposes dual product
//! prices and stakeholder profits, and sweeps externalities (carbon
//! tax, budget) to find which technology pathways activate.

pub mod io;
pub mod lp;
pub mod management;
pub mod model;
pub mod scenarios;
pub mod sweep;

pub mod investment;

pub use lp::{solve_lp, verify_kkt, LinearProgram, LpSolution, LpStatus, Tolerances};
pub use management::{build_management_lp, solve_management, ManagementSolution};
pub use model::{index_sets, validate_scenario, Scenario, ValidationReport};
