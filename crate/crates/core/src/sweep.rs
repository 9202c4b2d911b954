//! Parametric studies over carbon-tax and budget grids, plus
//! breakpoint detection on the resulting active technology sets.
//!
//! Grid cells are solved independently from the same immutable
//! scenario, so sweeps are deterministic and trivially parallel.

use std::collections::BTreeMap;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::investment::{solve_investment, InvestmentError, InvestmentOptions};
use crate::management::{solve_management, utility_cost, ManagementError, ManagementSolution};
use crate::model::Scenario;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("waste product '{0}' has no consumer to carry the tax")]
    MissingWasteConsumer(String),
    #[error("waste product '{0}' has {1} consumers; exactly one must carry the tax")]
    AmbiguousWasteConsumer(String, usize),
    #[error("sweep table is empty")]
    EmptyTable,
    #[error(transparent)]
    Management(#[from] ManagementError),
    #[error(transparent)]
    Investment(#[from] InvestmentError),
}

/// One solved grid cell.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    /// Tax per waste unit, applied as bid `-tax` on the designated
    /// waste consumer.
    pub tax: f64,
    /// None in management mode (unlimited budget).
    pub budget: Option<f64>,
    /// Total flow into flagged waste consumers.
    pub emissions: f64,
    pub utility_cost: f64,
    pub surplus: f64,
    pub prices: BTreeMap<String, f64>,
    /// Sorted ids of technologies with throughput above the activity
    /// tolerance; the canonical pathway fingerprint.
    pub active_set: Vec<String>,
    /// Purchased unit counts (investment mode only).
    pub units: BTreeMap<String, u32>,
}

#[derive(Debug, Clone)]
pub struct SweepTable {
    /// Content hash of the swept scenario.
    pub fingerprint: String,
    pub taxes: Vec<f64>,
    /// None for a pure tax sweep.
    pub budgets: Option<Vec<f64>>,
    /// Row-major: tax outer, budget inner.
    pub points: Vec<SweepPoint>,
}

/// A maximal run of grid points sharing one active technology set.
#[derive(Debug, Clone, PartialEq)]
pub struct BreakpointInterval {
    /// Inclusive index range into the swept parameter grid.
    pub first_index: usize,
    pub last_index: usize,
    pub start: f64,
    pub end: f64,
    pub active_set: Vec<String>,
}

pub fn scenario_fingerprint(scenario: &Scenario) -> String {
    let canonical = serde_json::to_string(scenario).expect("scenario serializes");
    let digest = Sha256::digest(canonical.as_bytes());
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

/// Flows below 1e-6 of the largest element capacity do not count as
/// activity; flows vary continuously inside an interval and must not
/// register as pathway changes.
pub fn activity_tolerance(scenario: &Scenario) -> f64 {
    let max_capacity = scenario
        .suppliers
        .iter()
        .map(|s| s.capacity)
        .chain(scenario.consumers.iter().map(|c| c.capacity))
        .chain(scenario.technologies.iter().map(|t| {
            f64::from(t.existing_units + t.max_units) * t.capacity_per_unit
        }))
        .fold(0.0f64, f64::max);
    1e-6 * max_capacity.max(1.0)
}

fn taxed_consumer_index(scenario: &Scenario, waste_product_id: &str) -> Result<usize, SweepError> {
    let matches: Vec<usize> = scenario
        .consumers
        .iter()
        .enumerate()
        .filter(|(_, c)| c.product == waste_product_id)
        .map(|(i, _)| i)
        .collect();
    match matches.as_slice() {
        [] => Err(SweepError::MissingWasteConsumer(waste_product_id.to_owned())),
        [single] => Ok(*single),
        many => Err(SweepError::AmbiguousWasteConsumer(
            waste_product_id.to_owned(),
            many.len(),
        )),
    }
}

fn with_tax(scenario: &Scenario, consumer_index: usize, tax: f64) -> Scenario {
    let mut taxed = scenario.clone();
    taxed.consumers[consumer_index].alpha = -tax;
    taxed
}

fn total_emissions(scenario: &Scenario, solution: &ManagementSolution) -> f64 {
    scenario
        .consumers
        .iter()
        .filter(|c| scenario.product(&c.product).is_some_and(|p| p.is_waste))
        .map(|c| solution.d.get(&c.id).copied().unwrap_or(0.0))
        .sum()
}

fn active_technologies(
    scenario: &Scenario,
    solution: &ManagementSolution,
    tol: f64,
) -> Vec<String> {
    let mut active: Vec<String> = scenario
        .technologies
        .iter()
        .filter(|t| solution.t.get(&t.id).copied().unwrap_or(0.0) > tol)
        .map(|t| t.id.clone())
        .collect();
    active.sort();
    active
}

fn point_from_solution(
    scenario: &Scenario,
    solution: &ManagementSolution,
    tax: f64,
    budget: Option<f64>,
    units: BTreeMap<String, u32>,
    activity_tol: f64,
) -> SweepPoint {
    SweepPoint {
        tax,
        budget,
        emissions: total_emissions(scenario, solution),
        utility_cost: utility_cost(scenario, solution),
        surplus: solution.surplus,
        prices: solution.pi.clone(),
        active_set: active_technologies(scenario, solution, activity_tol),
        units,
    }
}

/// Solve the management model at each tax value and tabulate the
/// resulting operating points.
pub fn sweep_tax(
    scenario: &Scenario,
    waste_product_id: &str,
    tax_grid: &[f64],
) -> Result<SweepTable, SweepError> {
    let consumer_index = taxed_consumer_index(scenario, waste_product_id)?;
    let activity_tol = activity_tolerance(scenario);
    let mut points = Vec::with_capacity(tax_grid.len());
    for &tax in tax_grid {
        let taxed = with_tax(scenario, consumer_index, tax);
        let solution = solve_management(&taxed)?;
        points.push(point_from_solution(
            &taxed,
            &solution,
            tax,
            None,
            BTreeMap::new(),
            activity_tol,
        ));
    }
    let table = SweepTable {
        fingerprint: scenario_fingerprint(scenario),
        taxes: tax_grid.to_vec(),
        budgets: None,
        points,
    };
    debug_assert_emissions_monotone(&table, activity_tol);
    Ok(table)
}

/// Solve the investment model at each (tax, budget) cell, row-major
/// with tax outer and budget inner.
pub fn sweep_tax_budget(
    scenario: &Scenario,
    waste_product_id: &str,
    tax_grid: &[f64],
    budget_grid: &[f64],
    options: &InvestmentOptions,
) -> Result<SweepTable, SweepError> {
    let consumer_index = taxed_consumer_index(scenario, waste_product_id)?;
    let activity_tol = activity_tolerance(scenario);
    let mut points = Vec::with_capacity(tax_grid.len() * budget_grid.len());
    for &tax in tax_grid {
        let taxed = with_tax(scenario, consumer_index, tax);
        for &budget in budget_grid {
            let solution = solve_investment(&taxed, budget, options)?;
            points.push(point_from_solution(
                &taxed,
                &solution.management,
                tax,
                Some(budget),
                solution.units,
                activity_tol,
            ));
        }
    }
    let table = SweepTable {
        fingerprint: scenario_fingerprint(scenario),
        taxes: tax_grid.to_vec(),
        budgets: Some(budget_grid.to_vec()),
        points,
    };
    debug_assert_emissions_monotone(&table, activity_tol);
    Ok(table)
}

/// Optimal emissions cannot rise with the tax at a fixed budget: for
/// two taxes, optimality of each solution under its own tax forces the
/// exchange inequality on the waste flows.
fn debug_assert_emissions_monotone(table: &SweepTable, activity_tol: f64) {
    if cfg!(debug_assertions) {
        let width = table.budgets.as_ref().map_or(1, Vec::len);
        for col in 0..width {
            let mut prev: Option<f64> = None;
            for row in 0..table.taxes.len() {
                let e = table.points[row * width + col].emissions;
                if let Some(p) = prev {
                    debug_assert!(
                        e <= p + activity_tol,
                        "emissions rose with tax: {p} -> {e}"
                    );
                }
                prev = Some(e);
            }
        }
    }
}

/// Split a single-parameter sweep into maximal runs of identical
/// active sets. For a tax-budget table this runs over taxes at the
/// last (highest) budget column.
pub fn detect_breakpoints(table: &SweepTable) -> Result<Vec<BreakpointInterval>, SweepError> {
    if table.points.is_empty() {
        return Err(SweepError::EmptyTable);
    }
    let width = table.budgets.as_ref().map_or(1, Vec::len);
    let column = width - 1;
    let mut intervals: Vec<BreakpointInterval> = Vec::new();
    for (row, &tax) in table.taxes.iter().enumerate() {
        let point = &table.points[row * width + column];
        match intervals.last_mut() {
            Some(interval) if interval.active_set == point.active_set => {
                interval.last_index = row;
                interval.end = tax;
            }
            _ => intervals.push(BreakpointInterval {
                first_index: row,
                last_index: row,
                start: tax,
                end: tax,
                active_set: point.active_set.clone(),
            }),
        }
    }
    Ok(intervals)
}

/// Evenly spaced inclusive grid, `lo:hi:n` style.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * (i as f64) / ((n - 1) as f64))
            .collect(),
    }
}
