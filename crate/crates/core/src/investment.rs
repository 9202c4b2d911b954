//! Budget-constrained investment model, solved by branch-and-bound on
//! integer technology unit counts with the LP relaxation as bound.
//!
//! The continuous block is the management LP with each technology
//! capacity bound replaced by a linking constraint against its
//! installed units; an exhaustive-enumeration oracle backs the solver
//! in tests.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::lp::{solve_lp, LinearProgram, LpError, LpStatus, SparseRow, Tolerances};
use crate::management::{
    build_lp_unchecked, solve_management_with, ManagementError, ManagementSolution,
};
use crate::model::{validate_scenario, Scenario};

#[derive(Debug, Error)]
pub enum InvestmentError {
    #[error("scenario failed validation: {}", .0.join("; "))]
    InvalidScenario(Vec<String>),
    #[error("budget must be non-negative, got {0}")]
    NegativeBudget(f64),
    #[error("enumeration would need {0} unit vectors, cap is {1}")]
    EnumerationCapExceeded(u128, u128),
    #[error(transparent)]
    Management(#[from] ManagementError),
    #[error(transparent)]
    Lp(#[from] LpError),
}

#[derive(Debug, Clone)]
pub struct InvestmentOptions {
    /// Absolute optimality gap; 0 means exact.
    pub gap_tol: f64,
    /// Node budget; hitting it returns the incumbent flagged non-proven.
    pub node_limit: usize,
    /// Replace the budget row with an investment term in the objective
    /// (costs interpreted as annualized).
    pub invest_in_objective: bool,
}

impl Default for InvestmentOptions {
    fn default() -> Self {
        InvestmentOptions {
            gap_tol: 0.0,
            node_limit: 1_000_000,
            invest_in_objective: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct InvestmentSolution {
    /// Purchased units per technology (existing units not counted).
    pub units: BTreeMap<String, u32>,
    /// Management solve evaluated with the installed capacities.
    pub management: ManagementSolution,
    /// Objective actually optimized: surplus, minus investment when
    /// `invest_in_objective` is set.
    pub objective: f64,
    pub budget_used: f64,
    pub budget_limit: f64,
    pub node_count: usize,
    /// False when the node limit cut the search short.
    pub proven_optimal: bool,
}

/// The investment MILP: LP relaxation plus which columns are integer.
#[derive(Debug, Clone)]
pub struct InvestmentMilp {
    /// Relaxation with unit variables continuous in [0, max_units].
    pub lp: LinearProgram,
    /// Column index of each technology's unit variable.
    pub unit_columns: Vec<usize>,
    pub budget: f64,
}

/// Assemble the MILP. The continuous block matches the management LP
/// except that each technology capacity bound becomes a linking row
/// `t_k <= capacity_per_unit * (existing_units + y_k)`; one budget row
/// caps total investment.
pub fn build_investment_milp(
    scenario: &Scenario,
    budget: f64,
    options: &InvestmentOptions,
) -> Result<InvestmentMilp, InvestmentError> {
    let report = validate_scenario(scenario);
    if !report.is_valid() {
        return Err(InvestmentError::InvalidScenario(report.errors));
    }
    if budget < 0.0 {
        return Err(InvestmentError::NegativeBudget(budget));
    }

    let mut lp = build_lp_unchecked(scenario);
    let tech_offset = scenario.suppliers.len() + scenario.consumers.len();
    let num_techs = scenario.technologies.len();

    // Unit variables, then one slack per linking row, then the budget slack.
    let mut unit_columns = Vec::with_capacity(num_techs);
    for tech in &scenario.technologies {
        unit_columns.push(lp.num_vars);
        lp.objective.push(if options.invest_in_objective {
            -tech.invest_cost
        } else {
            0.0
        });
        lp.lower.push(0.0);
        lp.upper.push(f64::from(tech.max_units));
        lp.var_labels.push(format!("units:{}", tech.id));
        lp.num_vars += 1;
    }

    for (k, tech) in scenario.technologies.iter().enumerate() {
        let t_col = tech_offset + k;
        let installed_max =
            f64::from(tech.existing_units + tech.max_units) * tech.capacity_per_unit;
        // Throughput is limited by the linking row, not its own bound.
        lp.upper[t_col] = installed_max;

        let slack_col = lp.num_vars;
        lp.objective.push(0.0);
        lp.lower.push(0.0);
        lp.upper.push(installed_max);
        lp.var_labels.push(format!("link_slack:{}", tech.id));
        lp.num_vars += 1;

        lp.rows.push(SparseRow {
            entries: vec![
                (t_col, 1.0),
                (unit_columns[k], -tech.capacity_per_unit),
                (slack_col, 1.0),
            ],
            rhs: tech.existing_capacity(),
        });
        lp.row_labels.push(format!("link:{}", tech.id));
    }

    if !options.invest_in_objective {
        let slack_col = lp.num_vars;
        lp.objective.push(0.0);
        lp.lower.push(0.0);
        lp.upper.push(budget);
        lp.var_labels.push("budget_slack".to_owned());
        lp.num_vars += 1;

        let mut entries: Vec<(usize, f64)> = scenario
            .technologies
            .iter()
            .enumerate()
            .filter(|(_, tech)| tech.invest_cost != 0.0)
            .map(|(k, tech)| (unit_columns[k], tech.invest_cost))
            .collect();
        entries.push((slack_col, 1.0));
        lp.rows.push(SparseRow { entries, rhs: budget });
        lp.row_labels.push("budget".to_owned());
    }

    Ok(InvestmentMilp {
        lp,
        unit_columns,
        budget,
    })
}

/// Re-solve the management model with the given purchased units
/// installed on top of the existing ones.
pub fn solve_with_units(
    scenario: &Scenario,
    units: &BTreeMap<String, u32>,
    tol: &Tolerances,
) -> Result<ManagementSolution, ManagementError> {
    let mut installed = scenario.clone();
    for tech in &mut installed.technologies {
        if let Some(&y) = units.get(&tech.id) {
            tech.existing_units += y;
        }
    }
    solve_management_with(&installed, tol)
}

struct Node {
    lower: Vec<u32>,
    upper: Vec<u32>,
}

/// Branch-and-bound over technology unit counts.
///
/// Branches on the most-fractional unit variable (ties broken by
/// technology order), prunes on the LP relaxation bound, and evaluates
/// integral candidates through an exact management re-solve so the
/// reported solution matches the oracle's LP tolerances.
pub fn solve_investment(
    scenario: &Scenario,
    budget: f64,
    options: &InvestmentOptions,
) -> Result<InvestmentSolution, InvestmentError> {
    let tol = Tolerances::default();
    let milp = build_investment_milp(scenario, budget, options)?;
    let num_techs = scenario.technologies.len();

    let mut incumbent: Option<(BTreeMap<String, u32>, ManagementSolution, f64)> = None;
    let mut node_count = 0usize;
    let mut proven = true;

    let mut stack = vec![Node {
        lower: vec![0; num_techs],
        upper: scenario.technologies.iter().map(|t| t.max_units).collect(),
    }];

    while let Some(node) = stack.pop() {
        if node_count >= options.node_limit {
            proven = false;
            break;
        }
        node_count += 1;

        let mut lp = milp.lp.clone();
        for k in 0..num_techs {
            lp.lower[milp.unit_columns[k]] = f64::from(node.lower[k]);
            lp.upper[milp.unit_columns[k]] = f64::from(node.upper[k]);
        }
        let relaxation = solve_lp(&lp, &tol)?;
        if relaxation.status == LpStatus::Infeasible {
            continue; // branched bounds exceed the budget
        }
        debug_assert_eq!(relaxation.status, LpStatus::Optimal);
        let bound = relaxation.objective_value;
        if let Some((_, _, best)) = &incumbent {
            if bound <= *best + options.gap_tol + 1e-9 * (1.0 + best.abs()) {
                continue;
            }
        }

        // Most-fractional unit variable.
        let mut branch: Option<(usize, f64, f64)> = None;
        for k in 0..num_techs {
            let y = relaxation.x[milp.unit_columns[k]];
            let frac = (y - y.round()).abs();
            if frac > 1e-6 {
                let distance = (y.fract() - 0.5).abs();
                match branch {
                    Some((_, _, best_distance)) if distance >= best_distance => {}
                    _ => branch = Some((k, y, distance)),
                }
            }
        }

        match branch {
            None => {
                // Integral relaxation: evaluate exactly.
                let mut units = BTreeMap::new();
                for (k, tech) in scenario.technologies.iter().enumerate() {
                    let y = relaxation.x[milp.unit_columns[k]].round().max(0.0) as u32;
                    units.insert(tech.id.clone(), y.clamp(node.lower[k], node.upper[k]));
                }
                let management = solve_with_units(scenario, &units, &tol)?;
                let invest: f64 = scenario
                    .technologies
                    .iter()
                    .map(|t| t.invest_cost * f64::from(units[&t.id]))
                    .sum();
                let objective = if options.invest_in_objective {
                    management.surplus - invest
                } else {
                    management.surplus
                };
                debug_assert!(
                    bound >= objective - 1e-6 * (1.0 + objective.abs()),
                    "relaxation bound {bound} below integer value {objective}"
                );
                let better = match &incumbent {
                    Some((_, _, best)) => objective > *best + 1e-9,
                    None => true,
                };
                if better {
                    incumbent = Some((units, management, objective));
                }
            }
            Some((k, y, _)) => {
                // Rounding heuristic: surplus is monotone in installed
                // capacity, so if the ceiling of the relaxed units fits
                // the budget it attains the node bound and closes the
                // node without branching.
                let mut ceil_units = BTreeMap::new();
                for (j, tech) in scenario.technologies.iter().enumerate() {
                    let yj = relaxation.x[milp.unit_columns[j]]
                        .ceil()
                        .clamp(f64::from(node.lower[j]), f64::from(node.upper[j]));
                    ceil_units.insert(tech.id.clone(), yj as u32);
                }
                let ceil_invest: f64 = scenario
                    .technologies
                    .iter()
                    .map(|t| t.invest_cost * f64::from(ceil_units[&t.id]))
                    .sum();
                let within_budget =
                    options.invest_in_objective || ceil_invest <= budget * (1.0 + 1e-12) + 1e-9;
                if within_budget {
                    let management = solve_with_units(scenario, &ceil_units, &tol)?;
                    let objective = if options.invest_in_objective {
                        management.surplus - ceil_invest
                    } else {
                        management.surplus
                    };
                    let better = match &incumbent {
                        Some((_, _, best)) => objective > *best + 1e-9,
                        None => true,
                    };
                    if better {
                        incumbent = Some((ceil_units, management, objective));
                    }
                    if objective >= bound - options.gap_tol - 1e-9 * (1.0 + bound.abs()) {
                        continue;
                    }
                }

                let floor = y.floor().clamp(f64::from(node.lower[k]), f64::from(node.upper[k]));
                let floor = floor as u32;
                let mut down = Node {
                    lower: node.lower.clone(),
                    upper: node.upper.clone(),
                };
                down.upper[k] = floor;
                let mut up = Node {
                    lower: node.lower,
                    upper: node.upper,
                };
                up.lower[k] = floor + 1;
                // depth-first, floor branch explored first
                stack.push(up);
                stack.push(down);
            }
        }
    }

    let (units, management, objective) = match incumbent {
        Some(found) => found,
        None => {
            // Zero purchases are always feasible with a non-negative budget.
            let units: BTreeMap<String, u32> = scenario
                .technologies
                .iter()
                .map(|t| (t.id.clone(), 0))
                .collect();
            let management = solve_with_units(scenario, &units, &tol)?;
            let objective = management.surplus;
            (units, management, objective)
        }
    };
    let budget_used = scenario
        .technologies
        .iter()
        .map(|t| t.invest_cost * f64::from(units[&t.id]))
        .sum();

    Ok(InvestmentSolution {
        units,
        management,
        objective,
        budget_used,
        budget_limit: budget,
        node_count,
        proven_optimal: proven,
    })
}

/// Exhaustive oracle: enumerate every unit vector within bounds and
/// budget, solve the induced management LP for each, keep the best.
/// Ties resolve to the lexicographically smallest unit vector.
pub fn brute_force_investment(
    scenario: &Scenario,
    budget: f64,
    enumeration_cap: u128,
) -> Result<InvestmentSolution, InvestmentError> {
    let report = validate_scenario(scenario);
    if !report.is_valid() {
        return Err(InvestmentError::InvalidScenario(report.errors));
    }
    if budget < 0.0 {
        return Err(InvestmentError::NegativeBudget(budget));
    }
    let mut combinations: u128 = 1;
    for tech in &scenario.technologies {
        combinations = combinations.saturating_mul(u128::from(tech.max_units) + 1);
        if combinations > enumeration_cap {
            return Err(InvestmentError::EnumerationCapExceeded(
                combinations,
                enumeration_cap,
            ));
        }
    }

    let tol = Tolerances::default();
    let num_techs = scenario.technologies.len();
    let mut counters = vec![0u32; num_techs];
    let mut best: Option<(BTreeMap<String, u32>, ManagementSolution, f64)> = None;
    let mut evaluated = 0usize;

    loop {
        let invest: f64 = scenario
            .technologies
            .iter()
            .zip(&counters)
            .map(|(t, &y)| t.invest_cost * f64::from(y))
            .sum();
        if invest <= budget + 1e-9 {
            let units: BTreeMap<String, u32> = scenario
                .technologies
                .iter()
                .zip(&counters)
                .map(|(t, &y)| (t.id.clone(), y))
                .collect();
            let management = solve_with_units(scenario, &units, &tol)?;
            evaluated += 1;
            let better = match &best {
                Some((_, _, best_surplus)) => management.surplus > *best_surplus + 1e-9,
                None => true,
            };
            if better {
                let surplus = management.surplus;
                best = Some((units, management, surplus));
            }
        }

        // next unit vector, lexicographic with the last index fastest
        let mut k = num_techs;
        loop {
            if k == 0 {
                let (units, management, objective) =
                    best.expect("zero purchase vector always fits the budget");
                let budget_used = scenario
                    .technologies
                    .iter()
                    .map(|t| t.invest_cost * f64::from(units[&t.id]))
                    .sum();
                return Ok(InvestmentSolution {
                    units,
                    management,
                    objective,
                    budget_used,
                    budget_limit: budget,
                    node_count: evaluated,
                    proven_optimal: true,
                });
            }
            k -= 1;
            if counters[k] < scenario.technologies[k].max_units {
                counters[k] += 1;
                break;
            }
            counters[k] = 0;
        }
    }
}
