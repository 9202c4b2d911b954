//! Acceptance gate: one test per release criterion, each printing a
//! PASS/FAIL line (visible with `--nocapture`). Tolerances here are
//! contractual — do not loosen them to make a failure go away.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use techpath::investment::{
    brute_force_investment, solve_investment, InvestmentOptions,
};
use techpath::lp::{solve_lp, verify_kkt, LpStatus, Tolerances};
use techpath::management::{compute_profits, compute_surplus, solve_management};
use techpath::scenarios::{campus, fig1_vehicles};
use techpath::sweep::{detect_breakpoints, linear_grid, sweep_tax, sweep_tax_budget};

fn criterion(number: u32, name: &str, body: impl FnOnce()) {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(()) => println!("criterion {number} ({name}): PASS"),
        Err(cause) => {
            println!("criterion {number} ({name}): FAIL");
            resume_unwind(cause);
        }
    }
}

fn assert_within(elapsed: Duration, limit: Duration, what: &str) {
    assert!(
        elapsed <= limit,
        "{what} took {elapsed:?}, limit {limit:?}"
    );
}

/// Surplus equals the sum of stakeholder profits for any balanced
/// allocation and any price vector.
#[test]
fn criterion_01_duality_identity() {
    criterion(1, "surplus equals total profit", || {
        let start = Instant::now();
        let mut rng = common::rng(101);
        for _ in 0..1000 {
            let scenario = common::random_scenario(&mut rng);
            let (s, d, t) = common::random_balanced_allocation(&scenario, &mut rng);
            let pi: BTreeMap<String, f64> = scenario
                .products
                .iter()
                .map(|p| (p.id.clone(), rand::Rng::gen_range(&mut rng, -5.0..5.0)))
                .collect();
            let surplus = compute_surplus(&scenario, &s, &d, &t);
            let phi = compute_profits(&scenario, &s, &d, &t, &pi).unwrap();
            let total: f64 = phi.values().sum();
            assert!(
                (surplus - total).abs() <= 1e-9 * (1.0 + surplus.abs()),
                "identity violated: surplus {surplus}, profits {total}"
            );
        }
        assert_within(start.elapsed(), Duration::from_secs(10), "criterion 1");
    });
}

/// solve_lp matches exhaustive basic-solution enumeration, and every
/// optimal result passes the independent KKT check.
#[test]
fn criterion_02_lp_oracle() {
    criterion(2, "LP enumeration oracle and KKT", || {
        let start = Instant::now();
        let tol = Tolerances::default();
        let mut rng = common::rng(202);
        let mut optimal = 0;
        for case in 0..500 {
            let lp = common::random_lp(&mut rng);
            let sol = solve_lp(&lp, &tol).unwrap();
            let oracle = common::enumerate_lp_optimum(&lp);
            match (sol.status, oracle) {
                (LpStatus::Optimal, Some(best)) => {
                    assert!(
                        (sol.objective_value - best).abs() <= 1e-8,
                        "case {case}: solver {} vs oracle {best}",
                        sol.objective_value
                    );
                    let report = verify_kkt(&lp, &sol, &tol);
                    assert!(report.all_passed(), "case {case}: KKT failed\n{report:?}");
                    optimal += 1;
                }
                (LpStatus::Infeasible, None) => {}
                (status, oracle) => {
                    panic!("case {case}: solver says {status:?}, oracle says {oracle:?}")
                }
            }
        }
        assert!(optimal >= 100, "too few optimal instances ({optimal}/500)");
        assert_within(start.elapsed(), Duration::from_secs(30), "criterion 2");
    });
}

/// Complementary slackness at the optimum: allocations strictly inside
/// their bounds pin prices to offered values from the right side.
#[test]
fn criterion_03_price_bounds() {
    criterion(3, "complementary-slackness price facts", || {
        let tol = 1e-6;
        let mut rng = common::rng(303);
        for case in 0..500 {
            let scenario = common::random_scenario(&mut rng);
            let sol = solve_management(&scenario).unwrap();
            for sup in &scenario.suppliers {
                let alloc = sol.s[&sup.id];
                let price = sol.pi[&sup.product];
                if alloc > tol {
                    assert!(price >= sup.alpha - tol, "case {case}: supplier {}", sup.id);
                }
                if alloc < sup.capacity - tol {
                    assert!(price <= sup.alpha + tol, "case {case}: supplier {}", sup.id);
                }
            }
            for con in &scenario.consumers {
                let alloc = sol.d[&con.id];
                let price = sol.pi[&con.product];
                if alloc > tol {
                    assert!(price <= con.alpha + tol, "case {case}: consumer {}", con.id);
                }
                if alloc < con.capacity - tol {
                    assert!(price >= con.alpha - tol, "case {case}: consumer {}", con.id);
                }
            }
            for tech in &scenario.technologies {
                let alloc = sol.t[&tech.id];
                let value = techpath::management::technology_value(tech, &sol.pi).unwrap();
                if alloc > tol {
                    assert!(value >= tech.alpha - tol, "case {case}: technology {}", tech.id);
                }
                if alloc < tech.existing_capacity() - tol {
                    assert!(value <= tech.alpha + tol, "case {case}: technology {}", tech.id);
                }
            }
        }
    });
}

/// The zero allocation is always feasible, so the optimum never dips
/// below zero.
#[test]
fn criterion_04_nonnegative_surplus() {
    criterion(4, "optimal surplus is non-negative", || {
        let mut rng = common::rng(404);
        for case in 0..500 {
            let scenario = common::random_scenario(&mut rng);
            let sol = solve_management(&scenario).unwrap();
            assert!(sol.surplus >= -1e-9, "case {case}: surplus {}", sol.surplus);
        }
    });
}

/// Branch and bound agrees with exhaustive enumeration of unit vectors.
#[test]
fn criterion_05_investment_oracle() {
    criterion(5, "investment matches brute force", || {
        let start = Instant::now();
        let mut rng = common::rng(505);
        let options = InvestmentOptions::default();
        for case in 0..200 {
            let mut scenario = common::random_scenario(&mut rng);
            // keep total purchasable units at 12 or fewer
            let mut left = 12u32;
            for tech in &mut scenario.technologies {
                tech.max_units = tech.max_units.min(left);
                left -= tech.max_units;
            }
            let total_cost: f64 = scenario
                .technologies
                .iter()
                .map(|t| t.invest_cost * f64::from(t.max_units))
                .sum();
            let budget = rand::Rng::gen_range(&mut rng, 0.0..=total_cost.max(1.0));
            let bb = solve_investment(&scenario, budget, &options).unwrap();
            let brute = brute_force_investment(&scenario, budget, 1_000_000).unwrap();
            assert!(bb.proven_optimal, "case {case}: node limit hit");
            assert_eq!(
                bb.management.surplus, brute.management.surplus,
                "case {case}: branch-and-bound disagrees with enumeration"
            );
        }
        assert_within(start.elapsed(), Duration::from_secs(120), "criterion 5");
    });
}

/// With a budget covering every purchasable unit, the investment model
/// reduces to the assume-built management model.
#[test]
fn criterion_06_reduction_to_management() {
    criterion(6, "slack budget reduces to management", || {
        let mut rng = common::rng(606);
        let options = InvestmentOptions::default();
        for case in 0..100 {
            let scenario = common::random_scenario(&mut rng);
            let total_cost: f64 = scenario
                .technologies
                .iter()
                .map(|t| t.invest_cost * f64::from(t.max_units))
                .sum();
            let invest = solve_investment(&scenario, total_cost, &options).unwrap();
            let management = solve_management(&scenario.assume_built()).unwrap();
            assert!(
                (invest.management.surplus - management.surplus).abs()
                    <= 1e-8 * (1.0 + management.surplus.abs()),
                "case {case}: invest {} vs assume-built {}",
                invest.management.surplus,
                management.surplus
            );
        }
    });
}

/// The bundled vehicle toy switches from gasoline to solar-charged EVs
/// at exactly the hand-derived tax.
///
/// Oracle: gasoline driving costs (1.0 + 0.5)/10 = 0.15 USD/km and
/// emits 2.3/10 = 0.23 kg/km; the solar-EV route costs
/// (0 + 50 + 850)/5000 = 0.18 USD/km and emits nothing. Cost equality
/// at 0.15 + 0.23 tau = 0.18, i.e. tau* = 3/23 ~ 0.130435 USD/kg.
#[test]
fn criterion_07_vehicle_switchover() {
    criterion(7, "vehicle toy switchover at 3/23", || {
        let scenario = fig1_vehicles();
        let taxes = linear_grid(0.0, 0.3, 31);
        let step = taxes[1] - taxes[0];
        let table = sweep_tax(&scenario, "co2", &taxes).unwrap();
        let intervals = detect_breakpoints(&table).unwrap();
        assert_eq!(intervals.len(), 2, "intervals: {intervals:?}");
        assert_eq!(intervals[0].active_set, vec!["GV".to_owned()]);
        assert_eq!(
            intervals[1].active_set,
            vec!["EV".to_owned(), "SP".to_owned()]
        );
        let crossover = 3.0 / 23.0;
        assert!(
            intervals[0].end <= crossover && crossover <= intervals[1].start,
            "crossover {crossover} outside [{}, {}]",
            intervals[0].end,
            intervals[1].start
        );
        assert!(
            intervals[1].start - intervals[0].end <= step + 1e-12,
            "crossover bracketed wider than one grid step"
        );
    });
}

/// Campus decarbonization is structurally faithful: stepwise emission
/// plateaus ending at exactly zero, a tax-independent zero-budget
/// column, and an unlimited-budget column equal to the management
/// model. Interval counts/thresholds are reported, not asserted.
#[test]
fn criterion_08_campus_structure() {
    criterion(8, "campus structural reproduction", || {
        let scenario = campus();
        let taxes = linear_grid(0.0, 500.0, 51);

        // management sweep over the full technology roster
        let management_table = sweep_tax(&scenario.assume_built(), "co2", &taxes).unwrap();
        let intervals = detect_breakpoints(&management_table).unwrap();
        println!("campus management sweep: {} interval(s)", intervals.len());
        for iv in &intervals {
            println!(
                "  tax {:.1}..{:.1}: {}",
                iv.start,
                iv.end,
                iv.active_set.join(";")
            );
        }
        assert!(intervals.len() >= 2, "expected at least 2 breakpoint intervals");
        for iv in &intervals {
            let reference = management_table.points[iv.first_index].emissions;
            for idx in iv.first_index..=iv.last_index {
                let e = management_table.points[idx].emissions;
                assert!(
                    (e - reference).abs() <= 1e-6 * (1.0 + reference.abs()),
                    "emissions not constant within interval at tax {}",
                    management_table.points[idx].tax
                );
            }
        }
        for pair in management_table.points.windows(2) {
            assert!(
                pair[1].emissions <= pair[0].emissions + 1e-6,
                "emissions increased with tax"
            );
        }
        let top = management_table.points.last().unwrap();
        assert!(
            top.emissions.abs() <= 1e-9,
            "emissions at top of grid: {}",
            top.emissions
        );

        // budget sweep: zero budget up to everything purchasable
        let total_cost: f64 = scenario
            .technologies
            .iter()
            .map(|t| t.invest_cost * f64::from(t.max_units))
            .sum();
        let budgets = linear_grid(0.0, total_cost, 5);
        let options = InvestmentOptions::default();
        let table = sweep_tax_budget(&scenario, "co2", &taxes, &budgets, &options).unwrap();
        let width = budgets.len();

        // (a) lowest budget: emissions do not depend on the tax
        let base = table.points[0].emissions;
        for (idx, point) in table.points.iter().enumerate() {
            if idx % width == 0 {
                assert!(
                    (point.emissions - base).abs() <= 1e-6 * (1.0 + base.abs()),
                    "zero-budget emissions moved with tax {}",
                    point.tax
                );
            }
        }

        // (b) highest budget column equals the management sweep
        for (row, management_point) in management_table.points.iter().enumerate() {
            let budget_point = &table.points[row * width + width - 1];
            assert!(
                (budget_point.emissions - management_point.emissions).abs()
                    <= 1e-6 * (1.0 + management_point.emissions.abs()),
                "emissions differ at tax {}",
                management_point.tax
            );
            assert!(
                (budget_point.surplus - management_point.surplus).abs()
                    <= 1e-6 * (1.0 + management_point.surplus.abs()),
                "surplus differs at tax {}",
                management_point.tax
            );
            assert_eq!(
                budget_point.active_set, management_point.active_set,
                "active set differs at tax {}",
                management_point.tax
            );
        }
    });
}

/// Emissions fall with tax, surplus rises with budget, management
/// surplus is convex in tax, and the full grid finishes in time.
#[test]
fn criterion_09_monotonicity_and_runtime() {
    criterion(9, "monotonicity and full-sweep runtime", || {
        let scenario = campus();
        let start = Instant::now();
        let taxes = linear_grid(0.0, 500.0, 100);
        let total_cost: f64 = scenario
            .technologies
            .iter()
            .map(|t| t.invest_cost * f64::from(t.max_units))
            .sum();
        let budgets = linear_grid(0.0, total_cost, 20);
        let options = InvestmentOptions::default();
        let table = sweep_tax_budget(&scenario, "co2", &taxes, &budgets, &options).unwrap();
        let elapsed = start.elapsed();
        let width = budgets.len();

        for col in 0..width {
            let mut previous = f64::INFINITY;
            for row in 0..taxes.len() {
                let e = table.points[row * width + col].emissions;
                assert!(
                    e <= previous + 1e-6 * (1.0 + previous.abs().min(1e12)),
                    "emissions increased with tax at budget index {col}"
                );
                previous = e;
            }
        }
        for row in 0..taxes.len() {
            let mut previous = f64::NEG_INFINITY;
            for col in 0..width {
                let s = table.points[row * width + col].surplus;
                assert!(
                    s >= previous - 1e-6 * (1.0 + previous.abs().min(1e12)),
                    "surplus decreased with budget at tax index {row}"
                );
                previous = s;
            }
        }

        // convexity of management surplus in tax (uniform grid midpoints)
        let management = sweep_tax(&scenario.assume_built(), "co2", &taxes).unwrap();
        let s: Vec<f64> = management.points.iter().map(|p| p.surplus).collect();
        for i in 0..s.len().saturating_sub(2) {
            assert!(
                s[i + 1] <= (s[i] + s[i + 2]) / 2.0 + 1e-6 * (1.0 + s[i + 1].abs()),
                "surplus not convex at tax index {}",
                i + 1
            );
        }

        assert_within(elapsed, Duration::from_secs(300), "100x20 campus sweep");
    });
}

/// Identical CLI invocations produce byte-identical CSV and DOT files.
#[test]
fn criterion_10_determinism() {
    criterion(10, "byte-identical CLI outputs", || {
        let binary = env!("CARGO_BIN_EXE_techpath");
        let scenario_path = concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/scenarios/fig1_vehicles.toml"
        );
        let dir = std::env::temp_dir().join("techpath-determinism");
        std::fs::create_dir_all(&dir).unwrap();

        let mut outputs: Vec<(Vec<u8>, Vec<u8>, Vec<u8>)> = Vec::new();
        for run in 0..2 {
            let csv = dir.join(format!("solve{run}.csv"));
            let dot = dir.join(format!("solve{run}.dot"));
            let sweep = dir.join(format!("sweep{run}.csv"));
            let status = std::process::Command::new(binary)
                .args(["solve", scenario_path, "--assume-built"])
                .arg("--csv")
                .arg(&csv)
                .arg("--dot")
                .arg(&dot)
                .output()
                .unwrap();
            assert!(status.status.success());
            let status = std::process::Command::new(binary)
                .args(["sweep", scenario_path, "--waste", "co2", "--tax-grid", "0:0.3:31"])
                .arg("--csv")
                .arg(&sweep)
                .output()
                .unwrap();
            assert!(status.status.success());
            outputs.push((
                std::fs::read(&csv).unwrap(),
                std::fs::read(&dot).unwrap(),
                std::fs::read(&sweep).unwrap(),
            ));
        }
        assert_eq!(outputs[0].0, outputs[1].0, "solution CSV differs across runs");
        assert_eq!(outputs[0].1, outputs[1].1, "DOT output differs across runs");
        assert_eq!(outputs[0].2, outputs[1].2, "sweep CSV differs across runs");
    });
}
