//! Independent KKT certificate checker.
//!
//! Recomputes every optimality condition directly from the problem
//! data; shares no code with the simplex pivoting logic.

use super::{LinearProgram, LpSolution, LpStatus, Tolerances};

/// Outcome of one condition, with the worst violation found.
#[derive(Debug, Clone, PartialEq)]
pub struct KktCheck {
    pub name: &'static str,
    pub passed: bool,
    pub max_violation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KktReport {
    pub checks: Vec<KktCheck>,
}

impl KktReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&KktCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Check primal feasibility, dual feasibility, stationarity, and
/// complementary slackness of a claimed optimal solution.
///
/// Violations are measured relative to the magnitude of the quantities
/// involved, so the checks remain meaningful across problem scales.
/// Panics if `sol.status` is not optimal.
pub fn verify_kkt(lp: &LinearProgram, sol: &LpSolution, tol: &Tolerances) -> KktReport {
    assert_eq!(sol.status, LpStatus::Optimal, "verify_kkt needs an optimal solution");
    let n = lp.num_vars;
    let mut checks = Vec::new();

    // Primal: A x = b.
    let mut worst = 0.0f64;
    for row in &lp.rows {
        let mut lhs = 0.0;
        let mut scale = row.rhs.abs();
        for &(j, coef) in &row.entries {
            lhs += coef * sol.x[j];
            scale = scale.max((coef * sol.x[j]).abs());
        }
        worst = worst.max((lhs - row.rhs).abs() / (1.0 + scale));
    }
    checks.push(KktCheck {
        name: "primal_rows",
        passed: worst <= tol.feas * 1e3,
        max_violation: worst,
    });

    // Primal: bounds.
    let mut worst = 0.0f64;
    for j in 0..n {
        let scale = 1.0 + sol.x[j].abs();
        worst = worst.max((lp.lower[j] - sol.x[j]) / scale);
        worst = worst.max((sol.x[j] - lp.upper[j]) / scale);
    }
    checks.push(KktCheck {
        name: "primal_bounds",
        passed: worst <= tol.feas,
        max_violation: worst.max(0.0),
    });

    // Dual feasibility: lambda >= 0 and mu = lambda - d >= 0.
    let mut worst = 0.0f64;
    for j in 0..n {
        let lambda = sol.bound_duals[j];
        let mu = lambda - sol.reduced_costs[j];
        worst = worst.max(-lambda).max(-mu);
    }
    checks.push(KktCheck {
        name: "dual_feasibility",
        passed: worst <= tol.dual,
        max_violation: worst.max(0.0),
    });

    // Stationarity: c + A^T y must equal the reported reduced costs,
    // and lambda - mu must absorb them exactly.
    let mut d_recomputed = lp.objective.clone();
    for (i, row) in lp.rows.iter().enumerate() {
        for &(j, coef) in &row.entries {
            d_recomputed[j] += coef * sol.row_duals[i];
        }
    }
    let mut worst = 0.0f64;
    for j in 0..n {
        let scale = 1.0 + lp.objective[j].abs() + d_recomputed[j].abs();
        worst = worst.max((d_recomputed[j] - sol.reduced_costs[j]).abs() / scale);
    }
    checks.push(KktCheck {
        name: "stationarity",
        passed: worst <= tol.dual,
        max_violation: worst,
    });

    // Complementary slackness: lambda . (upper - x) and mu . (x - lower).
    let mut worst = 0.0f64;
    for j in 0..n {
        let lambda = sol.bound_duals[j];
        let mu = lambda - d_recomputed[j];
        if lp.upper[j].is_finite() {
            let gap = (lp.upper[j] - sol.x[j]).max(0.0);
            worst = worst.max((lambda * gap).abs() / (1.0 + sol.x[j].abs() + lambda.abs()));
        }
        let gap = (sol.x[j] - lp.lower[j]).max(0.0);
        worst = worst.max((mu * gap).abs() / (1.0 + sol.x[j].abs() + mu.abs()));
    }
    checks.push(KktCheck {
        name: "complementary_slackness",
        passed: worst <= tol.cs * 1e2,
        max_violation: worst,
    });

    KktReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{solve_lp, SparseRow};

    fn balance_lp() -> LinearProgram {
        // max 2d - s  s.t. s - d = 0, 0 <= s <= 5, 0 <= d <= 10
        let mut lp = LinearProgram::with_bounds(vec![5.0, 10.0]);
        lp.objective = vec![-1.0, 2.0];
        lp.rows.push(SparseRow {
            entries: vec![(0, 1.0), (1, -1.0)],
            rhs: 0.0,
        });
        lp.row_labels.push("balance".to_owned());
        lp
    }

    #[test]
    fn solver_output_passes() {
        let lp = balance_lp();
        let tol = Tolerances::default();
        let sol = solve_lp(&lp, &tol).unwrap();
        let report = verify_kkt(&lp, &sol, &tol);
        assert!(report.all_passed(), "{report:?}");
    }

    #[test]
    fn bound_violation_is_caught() {
        let lp = balance_lp();
        let tol = Tolerances::default();
        let mut sol = solve_lp(&lp, &tol).unwrap();
        sol.x[0] += 1.0; // violates s <= 5 by 1.0 and the balance row
        let report = verify_kkt(&lp, &sol, &tol);
        let bounds = report.check("primal_bounds").unwrap();
        assert!(!bounds.passed);
        assert!((bounds.max_violation - 1.0 / (1.0 + 6.0)).abs() < 1e-9);
    }

    #[test]
    fn perturbed_dual_fails_stationarity() {
        let lp = balance_lp();
        let tol = Tolerances::default();
        let mut sol = solve_lp(&lp, &tol).unwrap();
        sol.row_duals[0] += 0.1;
        let report = verify_kkt(&lp, &sol, &tol);
        assert!(!report.check("stationarity").unwrap().passed);
    }
}
