//! Two-phase bounded-variable simplex.
//!
//! Phase I drives one artificial variable per row to zero; phase II
//! optimizes the true objective with the artificials fixed at zero.
//! Entering variables use Dantzig's rule until a run of degenerate
//! pivots, after which Bland's rule takes over to guarantee
//! termination. Basis systems are solved with a dense LU recomputed
//! per pivot, which is plenty at the tens-of-variables scale this
//! solver targets.

use super::dense::Lu;
use super::{LinearProgram, LpError, LpSolution, LpStatus, Tolerances};

const DEGENERATE_PIVOT_LIMIT: usize = 64;
const REFRESH_INTERVAL: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic(usize),
    AtLower,
    AtUpper,
}

enum RunOutcome {
    Optimal,
    Unbounded,
}

struct Workspace {
    /// Structural variable count; artificial j for row i is n + i.
    n: usize,
    m: usize,
    /// Column-wise view of [A | artificial signs].
    cols: Vec<Vec<(usize, f64)>>,
    rhs: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    x: Vec<f64>,
    state: Vec<VarState>,
    basis: Vec<usize>,
    degenerate_final: bool,
}

impl Workspace {
    fn new(lp: &LinearProgram) -> Workspace {
        let n = lp.num_vars;
        let m = lp.rows.len();
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n + m];
        for (i, row) in lp.rows.iter().enumerate() {
            for &(j, coef) in &row.entries {
                if coef != 0.0 {
                    cols[j].push((i, coef));
                }
            }
        }

        let mut lower = lp.lower.clone();
        let mut upper = lp.upper.clone();
        let mut x = lp.lower.clone();
        let mut state = vec![VarState::AtLower; n];
        let mut basis = Vec::with_capacity(m);
        let rhs: Vec<f64> = lp.rows.iter().map(|r| r.rhs).collect();

        // Artificial basis: sign chosen so each starts non-negative.
        for (i, row) in lp.rows.iter().enumerate() {
            let mut residual = row.rhs;
            for &(j, coef) in &row.entries {
                residual -= coef * x[j];
            }
            let sign = if residual >= 0.0 { 1.0 } else { -1.0 };
            cols[n + i].push((i, sign));
            lower.push(0.0);
            upper.push(f64::INFINITY);
            x.push(residual.abs());
            state.push(VarState::Basic(i));
            basis.push(n + i);
        }

        Workspace {
            n,
            m,
            cols,
            rhs,
            lower,
            upper,
            x,
            state,
            basis,
            degenerate_final: false,
        }
    }

    fn factor_basis(&self) -> Result<Lu, LpError> {
        let m = self.m;
        let mut data = vec![0.0; m * m];
        for (pos, &j) in self.basis.iter().enumerate() {
            for &(i, coef) in &self.cols[j] {
                data[i * m + pos] = coef;
            }
        }
        Lu::factor(data, m).ok_or(LpError::SingularBasis)
    }

    /// Recompute basic values from the nonbasic ones.
    fn refresh_basics(&mut self, lu: &Lu) {
        let mut b = self.rhs.clone();
        for j in 0..self.n + self.m {
            if let VarState::Basic(_) = self.state[j] {
                continue;
            }
            let xj = self.x[j];
            if xj != 0.0 {
                for &(i, coef) in &self.cols[j] {
                    b[i] -= coef * xj;
                }
            }
        }
        lu.solve(&mut b);
        for (pos, &j) in self.basis.iter().enumerate() {
            self.x[j] = b[pos];
        }
    }

    /// One simplex phase with the given per-variable costs (maximize).
    fn run(&mut self, costs: &[f64], tol: &Tolerances) -> Result<RunOutcome, LpError> {
        let total = self.n + self.m;
        let mut bland = false;
        let mut degenerate_streak = 0usize;
        let iteration_cap = 2000 + 400 * total;

        for iteration in 0..iteration_cap {
            let lu = self.factor_basis()?;
            if iteration % REFRESH_INTERVAL == 0 {
                self.refresh_basics(&lu);
            }

            // Standard-convention duals: B^T y = c_B.
            let mut y: Vec<f64> = self.basis.iter().map(|&j| costs[j]).collect();
            lu.solve_transpose(&mut y);

            // Entering variable.
            let mut entering: Option<(usize, f64)> = None;
            for j in 0..total {
                match self.state[j] {
                    VarState::Basic(_) => continue,
                    _ => {}
                }
                if self.upper[j] - self.lower[j] <= 0.0 {
                    continue; // fixed
                }
                let mut d = costs[j];
                for &(i, coef) in &self.cols[j] {
                    d -= coef * y[i];
                }
                let improving = match self.state[j] {
                    VarState::AtLower => d > tol.dual,
                    VarState::AtUpper => d < -tol.dual,
                    VarState::Basic(_) => unreachable!(),
                };
                if !improving {
                    continue;
                }
                if bland {
                    entering = Some((j, d));
                    break;
                }
                match entering {
                    Some((_, best)) if d.abs() <= best.abs() => {}
                    _ => entering = Some((j, d)),
                }
            }

            let Some((q, _)) = entering else {
                self.refresh_basics(&self.factor_basis()?);
                return Ok(RunOutcome::Optimal);
            };

            // Direction of motion for the entering variable.
            let dir = match self.state[q] {
                VarState::AtLower => 1.0,
                VarState::AtUpper => -1.0,
                VarState::Basic(_) => unreachable!(),
            };

            let mut w = vec![0.0; self.m];
            for &(i, coef) in &self.cols[q] {
                w[i] = coef;
            }
            lu.solve(&mut w);

            // Ratio test; bound flip allowed up to the entering range.
            let mut theta = self.upper[q] - self.lower[q];
            let mut leaving: Option<(usize, VarState, f64)> = None;
            for pos in 0..self.m {
                let rate = -dir * w[pos];
                let bj = self.basis[pos];
                let (limit, target) = if rate < -tol.pivot {
                    ((self.x[bj] - self.lower[bj]) / -rate, VarState::AtLower)
                } else if rate > tol.pivot {
                    ((self.upper[bj] - self.x[bj]) / rate, VarState::AtUpper)
                } else {
                    continue;
                };
                let limit = limit.max(0.0);
                let replace = match leaving {
                    _ if limit < theta - 1e-12 => true,
                    Some((prev_pos, _, _)) if limit <= theta + 1e-12 => {
                        w[pos].abs() > w[prev_pos].abs()
                    }
                    None if limit <= theta + 1e-12 => true,
                    _ => false,
                };
                if replace {
                    theta = theta.min(limit);
                    leaving = Some((pos, target, limit));
                }
            }

            if theta.is_infinite() {
                return Ok(RunOutcome::Unbounded);
            }

            // Move.
            for pos in 0..self.m {
                let bj = self.basis[pos];
                self.x[bj] += -dir * w[pos] * theta;
            }
            self.x[q] += dir * theta;

            match leaving {
                None => {
                    // Bound flip, no basis change.
                    self.state[q] = match self.state[q] {
                        VarState::AtLower => {
                            self.x[q] = self.upper[q];
                            VarState::AtUpper
                        }
                        VarState::AtUpper => {
                            self.x[q] = self.lower[q];
                            VarState::AtLower
                        }
                        VarState::Basic(_) => unreachable!(),
                    };
                }
                Some((pos, target, _)) => {
                    let out = self.basis[pos];
                    self.x[out] = match target {
                        VarState::AtLower => self.lower[out],
                        VarState::AtUpper => self.upper[out],
                        VarState::Basic(_) => unreachable!(),
                    };
                    self.state[out] = target;
                    self.basis[pos] = q;
                    self.state[q] = VarState::Basic(pos);
                }
            }

            if theta <= tol.pivot {
                degenerate_streak += 1;
                if degenerate_streak > DEGENERATE_PIVOT_LIMIT {
                    bland = true;
                }
            } else {
                degenerate_streak = 0;
                bland = false;
            }
        }
        Err(LpError::IterationLimit)
    }
}

pub(super) fn solve(lp: &LinearProgram, tol: &Tolerances) -> Result<LpSolution, LpError> {
    let n = lp.num_vars;
    let m = lp.rows.len();
    let mut ws = Workspace::new(lp);

    // Phase I: maximize minus the sum of artificials.
    let mut phase1 = vec![0.0; n + m];
    for c in phase1.iter_mut().skip(n) {
        *c = -1.0;
    }
    match ws.run(&phase1, tol)? {
        RunOutcome::Optimal => {}
        RunOutcome::Unbounded => return Err(LpError::SingularBasis),
    }
    let bmax = lp.rows.iter().fold(0.0f64, |acc, r| acc.max(r.rhs.abs()));
    let infeasibility: f64 = ws.x[n..].iter().sum();
    if infeasibility > 1e-7 * (1.0 + bmax) {
        return Ok(infeasible_solution(lp));
    }

    // Phase II: artificials pinned at zero.
    for j in n..n + m {
        ws.lower[j] = 0.0;
        ws.upper[j] = 0.0;
        ws.x[j] = ws.x[j].max(0.0);
    }
    let mut phase2 = lp.objective.clone();
    phase2.resize(n + m, 0.0);
    let outcome = ws.run(&phase2, tol)?;
    if let RunOutcome::Unbounded = outcome {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            x: ws.x[..n].to_vec(),
            objective_value: f64::INFINITY,
            row_duals: vec![0.0; m],
            bound_duals: vec![0.0; n],
            reduced_costs: vec![0.0; n],
            degenerate: false,
        });
    }

    // Final duals in the price convention: y = -y_standard, so that
    // c + A^T y - lambda + mu = 0.
    let lu = ws.factor_basis()?;
    let mut y_std: Vec<f64> = ws.basis.iter().map(|&j| phase2[j]).collect();
    lu.solve_transpose(&mut y_std);
    let row_duals: Vec<f64> = y_std.iter().map(|v| -v).collect();

    let mut reduced_costs = vec![0.0; n];
    let mut bound_duals = vec![0.0; n];
    let mut dual_degenerate = false;
    for j in 0..n {
        let mut d = lp.objective[j];
        for &(i, coef) in &ws.cols[j] {
            d += coef * row_duals[i];
        }
        reduced_costs[j] = d;
        let fixed = lp.upper[j] - lp.lower[j] <= 0.0;
        match ws.state[j] {
            VarState::AtUpper => bound_duals[j] = d.max(0.0),
            VarState::AtLower if fixed => bound_duals[j] = d.max(0.0),
            VarState::Basic(_) => {
                if !fixed {
                    // basic reduced costs are zero up to roundoff
                }
            }
            _ => {}
        }
        if !fixed && !matches!(ws.state[j], VarState::Basic(_)) && d.abs() < tol.dual {
            dual_degenerate = true;
        }
    }

    // Primal degeneracy: a basic variable sitting at one of its bounds.
    let mut primal_degenerate = false;
    for &j in &ws.basis {
        if j >= n {
            primal_degenerate = true; // artificial stuck in the basis
            continue;
        }
        let scale = 1.0 + ws.x[j].abs();
        if (ws.x[j] - ws.lower[j]).abs() < tol.feas * scale
            || (ws.upper[j] - ws.x[j]).abs() < tol.feas * scale
        {
            primal_degenerate = true;
        }
    }

    let x: Vec<f64> = ws.x[..n].to_vec();
    let objective_value: f64 = lp
        .objective
        .iter()
        .zip(&x)
        .map(|(c, v)| c * v)
        .sum();

    Ok(LpSolution {
        status: LpStatus::Optimal,
        x,
        objective_value,
        row_duals,
        bound_duals,
        reduced_costs,
        degenerate: primal_degenerate || dual_degenerate || ws.degenerate_final,
    })
}

fn infeasible_solution(lp: &LinearProgram) -> LpSolution {
    LpSolution {
        status: LpStatus::Infeasible,
        x: vec![0.0; lp.num_vars],
        objective_value: f64::NEG_INFINITY,
        row_duals: vec![0.0; lp.rows.len()],
        bound_duals: vec![0.0; lp.num_vars],
        reduced_costs: vec![0.0; lp.num_vars],
        degenerate: false,
    }
}
