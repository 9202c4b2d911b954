//! The management model: allocate supplies, technology throughput, and
//! demands to maximize total surplus subject to per-product
//! conservation, then read prices, profits, and the active pathway
//! subgraph off the solved LP.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::lp::{solve_lp, LinearProgram, LpError, LpStatus, SparseRow, Tolerances};
use crate::model::{validate_scenario, Scenario, Technology};

#[derive(Debug, Error)]
pub enum ManagementError {
    #[error("scenario failed validation: {}", .0.join("; "))]
    InvalidScenario(Vec<String>),
    #[error("unknown element id '{0}'")]
    UnknownElement(String),
    #[error("missing price for product '{0}'")]
    MissingPrice(String),
    #[error(transparent)]
    Lp(#[from] LpError),
}

/// Solved management model: physical allocations plus the economic
/// quantities induced by the duals.
#[derive(Debug, Clone)]
pub struct ManagementSolution {
    /// Allocation per supplier.
    pub s: BTreeMap<String, f64>,
    /// Allocation per consumer.
    pub d: BTreeMap<String, f64>,
    /// Allocation per technology, in reference-product units.
    pub t: BTreeMap<String, f64>,
    /// Product price per product (row duals of the balance constraints).
    pub pi: BTreeMap<String, f64>,
    /// Upper-bound multiplier per element.
    pub lambda: BTreeMap<String, f64>,
    /// Profit per element.
    pub phi: BTreeMap<String, f64>,
    /// Objective value: total surplus.
    pub surplus: f64,
    pub status: LpStatus,
    /// Set when the optimal basis is degenerate; prices are then one
    /// valid vector among possibly many.
    pub degenerate: bool,
}

impl ManagementSolution {
    pub fn allocation(&self, element: &str) -> Option<f64> {
        self.s
            .get(element)
            .or_else(|| self.d.get(element))
            .or_else(|| self.t.get(element))
            .copied()
    }
}

fn require_valid(scenario: &Scenario) -> Result<(), ManagementError> {
    let report = validate_scenario(scenario);
    if report.is_valid() {
        Ok(())
    } else {
        Err(ManagementError::InvalidScenario(report.errors))
    }
}

/// Assemble the management LP: one variable per element, one balance
/// row per product with zero right-hand side.
///
/// Technology capacity in management mode is what is already installed:
/// `existing_units * capacity_per_unit`.
pub fn build_management_lp(scenario: &Scenario) -> Result<LinearProgram, ManagementError> {
    require_valid(scenario)?;
    Ok(build_lp_unchecked(scenario))
}

pub(crate) fn build_lp_unchecked(scenario: &Scenario) -> LinearProgram {
    let row_of: BTreeMap<&str, usize> = scenario
        .products
        .iter()
        .enumerate()
        .map(|(i, p)| (p.id.as_str(), i))
        .collect();

    let num_vars =
        scenario.suppliers.len() + scenario.consumers.len() + scenario.technologies.len();
    let mut objective = Vec::with_capacity(num_vars);
    let mut upper = Vec::with_capacity(num_vars);
    let mut var_labels = Vec::with_capacity(num_vars);
    let mut rows: Vec<SparseRow> = scenario
        .products
        .iter()
        .map(|_| SparseRow {
            entries: Vec::new(),
            rhs: 0.0,
        })
        .collect();

    let mut column = 0usize;
    for supplier in &scenario.suppliers {
        objective.push(-supplier.alpha);
        upper.push(supplier.capacity);
        var_labels.push(supplier.id.clone());
        rows[row_of[supplier.product.as_str()]]
            .entries
            .push((column, 1.0));
        column += 1;
    }
    for consumer in &scenario.consumers {
        objective.push(consumer.alpha);
        upper.push(consumer.capacity);
        var_labels.push(consumer.id.clone());
        rows[row_of[consumer.product.as_str()]]
            .entries
            .push((column, -1.0));
        column += 1;
    }
    for tech in &scenario.technologies {
        objective.push(-tech.alpha);
        upper.push(tech.existing_capacity());
        var_labels.push(tech.id.clone());
        for (product, &factor) in &tech.gamma {
            if factor != 0.0 {
                rows[row_of[product.as_str()]].entries.push((column, factor));
            }
        }
        column += 1;
    }

    LinearProgram {
        num_vars,
        objective,
        rows,
        lower: vec![0.0; num_vars],
        upper,
        var_labels,
        row_labels: scenario.products.iter().map(|p| p.id.clone()).collect(),
    }
}

pub fn solve_management(scenario: &Scenario) -> Result<ManagementSolution, ManagementError> {
    solve_management_with(scenario, &Tolerances::default())
}

pub fn solve_management_with(
    scenario: &Scenario,
    tol: &Tolerances,
) -> Result<ManagementSolution, ManagementError> {
    let lp = build_management_lp(scenario)?;
    let sol = solve_lp(&lp, tol)?;
    // With zero right-hand sides and nonnegative finite bounds the zero
    // allocation is always feasible and the objective is bounded.
    assert_eq!(
        sol.status,
        LpStatus::Optimal,
        "management LP cannot be infeasible or unbounded"
    );

    let ns = scenario.suppliers.len();
    let nd = scenario.consumers.len();
    let mut s = BTreeMap::new();
    let mut d = BTreeMap::new();
    let mut t = BTreeMap::new();
    let mut lambda = BTreeMap::new();
    for (idx, supplier) in scenario.suppliers.iter().enumerate() {
        s.insert(supplier.id.clone(), sol.x[idx]);
        lambda.insert(supplier.id.clone(), sol.bound_duals[idx]);
    }
    for (idx, consumer) in scenario.consumers.iter().enumerate() {
        d.insert(consumer.id.clone(), sol.x[ns + idx]);
        lambda.insert(consumer.id.clone(), sol.bound_duals[ns + idx]);
    }
    for (idx, tech) in scenario.technologies.iter().enumerate() {
        t.insert(tech.id.clone(), sol.x[ns + nd + idx]);
        lambda.insert(tech.id.clone(), sol.bound_duals[ns + nd + idx]);
    }
    let pi: BTreeMap<String, f64> = scenario
        .products
        .iter()
        .enumerate()
        .map(|(i, p)| (p.id.clone(), sol.row_duals[i]))
        .collect();

    let phi = compute_profits(scenario, &s, &d, &t, &pi)?;

    Ok(ManagementSolution {
        s,
        d,
        t,
        pi,
        lambda,
        phi,
        surplus: sol.objective_value,
        status: sol.status,
        degenerate: sol.degenerate,
    })
}

/// Per-unit value created by a technology: the gamma-weighted sum of
/// its product prices. The technology is viable when this clears its
/// operating bid.
pub fn technology_value(
    tech: &Technology,
    pi: &BTreeMap<String, f64>,
) -> Result<f64, ManagementError> {
    let mut value = 0.0;
    for (product, &factor) in &tech.gamma {
        if factor == 0.0 {
            continue;
        }
        let price = pi
            .get(product)
            .ok_or_else(|| ManagementError::MissingPrice(product.clone()))?;
        value += factor * price;
    }
    Ok(value)
}

/// Profit of each element under the given allocation and prices:
/// suppliers earn `(pi - alpha) s`, consumers `(alpha - pi) d`, and
/// technologies `(pi_k - alpha) t` with `pi_k` their per-unit value.
pub fn compute_profits(
    scenario: &Scenario,
    s: &BTreeMap<String, f64>,
    d: &BTreeMap<String, f64>,
    t: &BTreeMap<String, f64>,
    pi: &BTreeMap<String, f64>,
) -> Result<BTreeMap<String, f64>, ManagementError> {
    let mut phi = BTreeMap::new();
    for supplier in &scenario.suppliers {
        let alloc = s.get(&supplier.id).copied().unwrap_or(0.0);
        let price = pi
            .get(&supplier.product)
            .ok_or_else(|| ManagementError::MissingPrice(supplier.product.clone()))?;
        phi.insert(supplier.id.clone(), (price - supplier.alpha) * alloc);
    }
    for consumer in &scenario.consumers {
        let alloc = d.get(&consumer.id).copied().unwrap_or(0.0);
        let price = pi
            .get(&consumer.product)
            .ok_or_else(|| ManagementError::MissingPrice(consumer.product.clone()))?;
        phi.insert(consumer.id.clone(), (consumer.alpha - price) * alloc);
    }
    for tech in &scenario.technologies {
        let alloc = t.get(&tech.id).copied().unwrap_or(0.0);
        let value = technology_value(tech, pi)?;
        phi.insert(tech.id.clone(), (value - tech.alpha) * alloc);
    }
    for id in s.keys() {
        if !scenario.suppliers.iter().any(|e| &e.id == id) {
            return Err(ManagementError::UnknownElement(id.clone()));
        }
    }
    for id in d.keys() {
        if !scenario.consumers.iter().any(|e| &e.id == id) {
            return Err(ManagementError::UnknownElement(id.clone()));
        }
    }
    for id in t.keys() {
        if !scenario.technologies.iter().any(|e| &e.id == id) {
            return Err(ManagementError::UnknownElement(id.clone()));
        }
    }
    Ok(phi)
}

/// Total surplus of an arbitrary allocation (balanced or not): demand
/// value served minus supply and operating costs.
pub fn compute_surplus(
    scenario: &Scenario,
    s: &BTreeMap<String, f64>,
    d: &BTreeMap<String, f64>,
    t: &BTreeMap<String, f64>,
) -> f64 {
    let demand: f64 = scenario
        .consumers
        .iter()
        .map(|c| c.alpha * d.get(&c.id).copied().unwrap_or(0.0))
        .sum();
    let supply: f64 = scenario
        .suppliers
        .iter()
        .map(|sp| sp.alpha * s.get(&sp.id).copied().unwrap_or(0.0))
        .sum();
    let operating: f64 = scenario
        .technologies
        .iter()
        .map(|k| k.alpha * t.get(&k.id).copied().unwrap_or(0.0))
        .sum();
    demand - supply - operating
}

/// Operator-borne cost: operating cost plus supply cost plus disposal
/// cost for waste products. Waste consumers carry negative bids, so the
/// subtraction adds their disposal cost.
pub fn utility_cost(scenario: &Scenario, solution: &ManagementSolution) -> f64 {
    let operating: f64 = scenario
        .technologies
        .iter()
        .map(|k| k.alpha * solution.t.get(&k.id).copied().unwrap_or(0.0))
        .sum();
    let supply: f64 = scenario
        .suppliers
        .iter()
        .map(|sp| sp.alpha * solution.s.get(&sp.id).copied().unwrap_or(0.0))
        .sum();
    let waste_revenue: f64 = scenario
        .consumers
        .iter()
        .filter(|c| {
            scenario
                .product(&c.product)
                .is_some_and(|p| p.is_waste)
        })
        .map(|c| c.alpha * solution.d.get(&c.id).copied().unwrap_or(0.0))
        .sum();
    operating + supply - waste_revenue
}

/// One element-product edge of the active subgraph, with its flow.
/// Technology flows are signed by the transformation factor.
#[derive(Debug, Clone, PartialEq)]
pub struct ActiveEdge {
    pub element: String,
    pub product: String,
    pub flow: f64,
}

/// Elements with allocation above the activity tolerance, plus their
/// per-product flows.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ActiveSubgraph {
    pub elements: Vec<String>,
    pub edges: Vec<ActiveEdge>,
}

impl ActiveSubgraph {
    pub fn contains(&self, element: &str) -> bool {
        self.elements.iter().any(|e| e == element)
    }
}

pub fn active_pathways(
    scenario: &Scenario,
    solution: &ManagementSolution,
    activity_tol: f64,
) -> ActiveSubgraph {
    assert_eq!(solution.status, LpStatus::Optimal);
    let mut graph = ActiveSubgraph::default();
    for supplier in &scenario.suppliers {
        let flow = solution.s.get(&supplier.id).copied().unwrap_or(0.0);
        if flow > activity_tol {
            graph.elements.push(supplier.id.clone());
            graph.edges.push(ActiveEdge {
                element: supplier.id.clone(),
                product: supplier.product.clone(),
                flow,
            });
        }
    }
    for consumer in &scenario.consumers {
        let flow = solution.d.get(&consumer.id).copied().unwrap_or(0.0);
        if flow > activity_tol {
            graph.elements.push(consumer.id.clone());
            graph.edges.push(ActiveEdge {
                element: consumer.id.clone(),
                product: consumer.product.clone(),
                flow,
            });
        }
    }
    for tech in &scenario.technologies {
        let throughput = solution.t.get(&tech.id).copied().unwrap_or(0.0);
        if throughput > activity_tol {
            graph.elements.push(tech.id.clone());
            for (product, &factor) in &tech.gamma {
                if factor != 0.0 {
                    graph.edges.push(ActiveEdge {
                        element: tech.id.clone(),
                        product: product.clone(),
                        flow: factor * throughput,
                    });
                }
            }
        }
    }
    graph
}
