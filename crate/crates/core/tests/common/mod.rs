//! Shared generators and oracles for the integration tests: seeded
//! random scenarios, balanced allocations, random bounded LPs, and an
//! exhaustive basic-solution LP oracle.
//!
//! Not every test target uses every helper, so dead-code lints are
//! silenced at the module level.
#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use techpath::lp::{LinearProgram, SparseRow};
use techpath::model::{Consumer, Product, Scenario, Supplier, Technology};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random valid scenario: up to 8 products, up to 12 elements. Every
/// product gets at least one consumer so arbitrary flows can be
/// balanced by adjusting demands.
pub fn random_scenario(rng: &mut ChaCha8Rng) -> Scenario {
    let num_products = rng.gen_range(1..=8usize);
    let mut sc = Scenario::empty();
    for p in 0..num_products {
        sc.products.push(Product {
            id: format!("p{p}"),
            unit: "u".to_owned(),
            is_waste: rng.gen_bool(0.15),
        });
    }
    // one consumer per product, then random extra elements up to 12
    for p in 0..num_products {
        sc.consumers.push(Consumer {
            id: format!("c{p}"),
            product: format!("p{p}"),
            alpha: rng.gen_range(-2.0..5.0),
            capacity: rng.gen_range(0.0..20.0),
        });
    }
    let extras = 12usize.saturating_sub(num_products);
    let mut tech_count = 0usize;
    for e in 0..rng.gen_range(0..=extras) {
        match rng.gen_range(0..3) {
            0 => sc.suppliers.push(Supplier {
                id: format!("s{e}"),
                product: format!("p{}", rng.gen_range(0..num_products)),
                alpha: rng.gen_range(-1.0..3.0),
                capacity: rng.gen_range(0.0..20.0),
            }),
            1 => sc.consumers.push(Consumer {
                id: format!("cx{e}"),
                product: format!("p{}", rng.gen_range(0..num_products)),
                alpha: rng.gen_range(-2.0..5.0),
                capacity: rng.gen_range(0.0..20.0),
            }),
            _ => {
                let ref_p = rng.gen_range(0..num_products);
                let mut gamma = BTreeMap::new();
                gamma.insert(format!("p{ref_p}"), -rng.gen_range(0.2..2.0));
                for _ in 0..rng.gen_range(0..3usize) {
                    let q = rng.gen_range(0..num_products);
                    if q != ref_p {
                        gamma.insert(format!("p{q}"), rng.gen_range(-2.0..2.0));
                    }
                }
                gamma.retain(|_, g| *g != 0.0);
                sc.technologies.push(Technology {
                    id: format!("t{tech_count}"),
                    alpha: rng.gen_range(-1.0..3.0),
                    ref_product: format!("p{ref_p}"),
                    capacity_per_unit: rng.gen_range(0.0..5.0),
                    gamma,
                    invest_cost: rng.gen_range(0.0..10.0),
                    max_units: rng.gen_range(0..=3),
                    existing_units: rng.gen_range(0..=3),
                });
                tech_count += 1;
            }
        }
    }
    sc
}

/// Random allocation satisfying per-product balance exactly: draw
/// supplies and throughputs freely, then charge each product's
/// residual to its first consumer. Bounds are intentionally ignored —
/// the accounting identities hold for any balanced flow.
#[allow(clippy::type_complexity)]
pub fn random_balanced_allocation(
    scenario: &Scenario,
    rng: &mut ChaCha8Rng,
) -> (
    BTreeMap<String, f64>,
    BTreeMap<String, f64>,
    BTreeMap<String, f64>,
) {
    let mut s = BTreeMap::new();
    let mut d = BTreeMap::new();
    let mut t = BTreeMap::new();
    for supplier in &scenario.suppliers {
        s.insert(supplier.id.clone(), rng.gen_range(0.0..10.0));
    }
    for tech in &scenario.technologies {
        t.insert(tech.id.clone(), rng.gen_range(0.0..10.0));
    }
    for consumer in scenario.consumers.iter().skip(scenario.products.len()) {
        d.insert(consumer.id.clone(), rng.gen_range(0.0..10.0));
    }
    // first `num_products` consumers absorb the residuals (possibly
    // negative: still a balanced flow algebraically)
    for (p, product) in scenario.products.iter().enumerate() {
        let mut residual = 0.0;
        for supplier in &scenario.suppliers {
            if supplier.product == product.id {
                residual += s[&supplier.id];
            }
        }
        for tech in &scenario.technologies {
            if let Some(&g) = tech.gamma.get(&product.id) {
                residual += g * t[&tech.id];
            }
        }
        for consumer in scenario.consumers.iter().skip(scenario.products.len()) {
            if consumer.product == product.id {
                residual -= d[&consumer.id];
            }
        }
        d.insert(scenario.consumers[p].id.clone(), residual);
    }
    (s, d, t)
}

/// Random bounded LP: up to 6 variables, up to 4 equality rows, all
/// bounds finite. Roughly half the instances are seeded with a known
/// feasible point so both outcomes occur.
pub fn random_lp(rng: &mut ChaCha8Rng) -> LinearProgram {
    let n = rng.gen_range(1..=6usize);
    let m = rng.gen_range(0..=4usize.min(n));
    let mut lp = LinearProgram::with_bounds((0..n).map(|_| rng.gen_range(0.5..8.0)).collect());
    lp.objective = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
    let anchor: Vec<f64> = (0..n)
        .map(|j| rng.gen_range(0.0..lp.upper[j]))
        .collect();
    let force_feasible = rng.gen_bool(0.5);
    for i in 0..m {
        let mut entries: Vec<(usize, f64)> = Vec::new();
        for j in 0..n {
            if rng.gen_bool(0.7) {
                let a = rng.gen_range(-2.0..2.0);
                if a != 0.0 {
                    entries.push((j, a));
                }
            }
        }
        let rhs = if force_feasible {
            entries.iter().map(|&(j, a)| a * anchor[j]).sum()
        } else {
            rng.gen_range(-5.0..5.0)
        };
        lp.rows.push(SparseRow { entries, rhs });
        lp.row_labels.push(format!("r{i}"));
    }
    lp
}

/// Exhaustive oracle: enumerate every basis (column subset of row
/// count size) against every lower/upper assignment of the nonbasic
/// variables, keep the best feasible point. Returns `None` when no
/// enumerated point is feasible (the LP is infeasible).
pub fn enumerate_lp_optimum(lp: &LinearProgram) -> Option<f64> {
    let n = lp.num_vars;
    let m = lp.rows.len();
    let mut dense = vec![vec![0.0; n + 1]; m];
    for (i, row) in lp.rows.iter().enumerate() {
        for &(j, a) in &row.entries {
            dense[i][j] += a;
        }
        dense[i][n] = row.rhs;
    }
    // Row-reduce to an equivalent full-rank system so redundant rows do
    // not defeat basis enumeration; an all-zero row with nonzero rhs is
    // outright infeasible.
    let mut rank = 0usize;
    for _ in 0..m {
        let pivot = (rank..m)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .max_by(|&(i1, j1), &(i2, j2)| dense[i1][j1].abs().total_cmp(&dense[i2][j2].abs()));
        let Some((pi, pj)) = pivot else { break };
        if dense[pi][pj].abs() < 1e-9 {
            break;
        }
        dense.swap(rank, pi);
        for i in (rank + 1)..m {
            let f = dense[i][pj] / dense[rank][pj];
            for k in 0..=n {
                dense[i][k] -= f * dense[rank][k];
            }
        }
        rank += 1;
    }
    for row in dense.iter().take(m).skip(rank) {
        if row[n].abs() > 1e-7 {
            return None;
        }
    }
    dense.truncate(rank);
    let m = rank;
    let mut best: Option<f64> = None;
    let mut basis = Vec::new();
    enumerate_bases(n, m, 0, &mut basis, &mut |basis| {
        let free: Vec<usize> = (0..n).filter(|j| !basis.contains(j)).collect();
        for mask in 0..(1u32 << free.len()) {
            let mut x = vec![0.0; n];
            for (b, &j) in free.iter().enumerate() {
                x[j] = if mask & (1 << b) != 0 {
                    lp.upper[j]
                } else {
                    lp.lower[j]
                };
            }
            // solve the m x m system for the basic variables
            let mut a = vec![0.0; m * m];
            let mut rhs = vec![0.0; m];
            for i in 0..m {
                for (col, &j) in basis.iter().enumerate() {
                    a[i * m + col] = dense[i][j];
                }
                rhs[i] =
                    dense[i][n] - free.iter().map(|&j| dense[i][j] * x[j]).sum::<f64>();
            }
            if !gaussian_solve(&mut a, &mut rhs, m) {
                continue;
            }
            let mut ok = true;
            for (col, &j) in basis.iter().enumerate() {
                x[j] = rhs[col];
                if x[j] < lp.lower[j] - 1e-7 || x[j] > lp.upper[j] + 1e-7 {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            let value: f64 = (0..n).map(|j| lp.objective[j] * x[j]).sum();
            best = Some(match best {
                Some(b) if b >= value => b,
                _ => value,
            });
        }
    });
    best
}

fn enumerate_bases(
    n: usize,
    remaining: usize,
    start: usize,
    basis: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if remaining == 0 {
        visit(basis);
        return;
    }
    for j in start..n {
        basis.push(j);
        enumerate_bases(n, remaining - 1, j + 1, basis, visit);
        basis.pop();
    }
}

/// In-place Gaussian elimination with partial pivoting; false when
/// singular.
fn gaussian_solve(a: &mut [f64], rhs: &mut [f64], m: usize) -> bool {
    for col in 0..m {
        let pivot = (col..m).max_by(|&r1, &r2| {
            a[r1 * m + col]
                .abs()
                .total_cmp(&a[r2 * m + col].abs())
        });
        let Some(pivot) = pivot else { return m == 0 };
        if a[pivot * m + col].abs() < 1e-10 {
            return false;
        }
        if pivot != col {
            for k in 0..m {
                a.swap(col * m + k, pivot * m + k);
            }
            rhs.swap(col, pivot);
        }
        for row in (col + 1)..m {
            let f = a[row * m + col] / a[col * m + col];
            for k in col..m {
                a[row * m + k] -= f * a[col * m + k];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    for col in (0..m).rev() {
        let mut v = rhs[col];
        for k in (col + 1)..m {
            v -= a[col * m + k] * rhs[k];
        }
        rhs[col] = v / a[col * m + col];
    }
    true
}
