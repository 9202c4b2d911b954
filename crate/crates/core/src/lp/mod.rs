//! Bounded-variable simplex solver for maximize-form LPs with equality
//! rows, returning primal values, row duals, and bound multipliers.
//!
//! Dual sign convention: the reported row duals `y` satisfy the
//! stationarity condition `c + A^T y - lambda + mu = 0` with
//! `lambda >= 0` multiplying upper bounds and `mu >= 0` multiplying
//! lower bounds. Under this convention the dual of a product balance
//! row reads directly as that product's price.

mod dense;
mod kkt;
mod scaling;
mod simplex;

pub use kkt::{verify_kkt, KktCheck, KktReport};

use thiserror::Error;

/// One equality row `sum(entries) = rhs` over labeled variables.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseRow {
    /// (column index, coefficient) pairs; zero coefficients are omitted.
    pub entries: Vec<(usize, f64)>,
    pub rhs: f64,
}

/// A maximize-form LP: max c.x subject to A x = b, lower <= x <= upper.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub rows: Vec<SparseRow>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub var_labels: Vec<String>,
    pub row_labels: Vec<String>,
}

#[derive(Debug, Error, PartialEq)]
pub enum LpError {
    #[error("vector {0} has length {1}, expected {2}")]
    BadLength(&'static str, usize, usize),
    #[error("variable {0}: lower bound {1} exceeds upper bound {2}")]
    BoundOrder(usize, f64, f64),
    #[error("row {0} references variable {1} out of range")]
    BadColumn(usize, usize),
    #[error("basis became numerically singular")]
    SingularBasis,
    #[error("simplex iteration limit exceeded")]
    IterationLimit,
}

impl LinearProgram {
    /// LP with no rows and all-zero objective over `num_vars` variables
    /// bounded by [0, upper].
    pub fn with_bounds(upper: Vec<f64>) -> Self {
        let n = upper.len();
        LinearProgram {
            num_vars: n,
            objective: vec![0.0; n],
            rows: Vec::new(),
            lower: vec![0.0; n],
            upper,
            var_labels: (0..n).map(|i| format!("x{i}")).collect(),
            row_labels: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars;
        for (name, len) in [
            ("objective", self.objective.len()),
            ("lower", self.lower.len()),
            ("upper", self.upper.len()),
            ("var_labels", self.var_labels.len()),
        ] {
            if len != n {
                return Err(LpError::BadLength(name, len, n));
            }
        }
        if self.row_labels.len() != self.rows.len() {
            return Err(LpError::BadLength(
                "row_labels",
                self.row_labels.len(),
                self.rows.len(),
            ));
        }
        for j in 0..n {
            if self.lower[j] > self.upper[j] {
                return Err(LpError::BoundOrder(j, self.lower[j], self.upper[j]));
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, _) in &row.entries {
                if j >= n {
                    return Err(LpError::BadColumn(i, j));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Solver output; dual quantities follow the module-level sign convention.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective_value: f64,
    /// One dual per equality row (the price convention, see module docs).
    pub row_duals: Vec<f64>,
    /// Multiplier of each variable's upper bound, >= 0 at optimum.
    pub bound_duals: Vec<f64>,
    /// d_j = c_j + a_j . y; negative part is the lower-bound multiplier.
    pub reduced_costs: Vec<f64>,
    /// True when the final basis is primal- or dual-degenerate; duals
    /// are then one valid choice among possibly many.
    pub degenerate: bool,
}

/// Numerical tolerances, tuned for coefficients spanning roughly
/// 1e-3..1e9. Scenario authors should scale units toward O(1)-O(1e6).
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Primal feasibility (relative to row/bound magnitude).
    pub feas: f64,
    /// Dual feasibility on reduced costs.
    pub dual: f64,
    /// Complementary slackness.
    pub cs: f64,
    /// Ratio-test pivot threshold.
    pub pivot: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            feas: 1e-9,
            dual: 1e-7,
            cs: 1e-7,
            pivot: 1e-10,
        }
    }
}

/// Solve the LP. Panics only on structurally invalid input (see
/// [`LinearProgram::validate`]); numerical failure surfaces as
/// [`LpError::SingularBasis`].
pub fn solve_lp(lp: &LinearProgram, tol: &Tolerances) -> Result<LpSolution, LpError> {
    lp.validate()?;
    // Equilibrate so badly scaled inputs (invest costs ~1e6 next to
    // emission factors ~1e-3) keep the basis factorizable; power-of-two
    // scales make the transformation exact.
    let (scaled, row_scale, col_scale) = scaling::equilibrate(lp);
    let mut sol = simplex::solve(&scaled, tol)?;
    scaling::unscale(&mut sol, &row_scale, &col_scale);
    Ok(sol)
}
