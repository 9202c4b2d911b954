//! CSV writers for solutions and sweep tables.
//!
//! All numbers are written with [`format_sig`] at 12 significant
//! digits so repeated runs produce byte-identical files.

use crate::management::{technology_value, ManagementSolution};
use crate::model::Scenario;
use crate::sweep::SweepTable;

const SIG_DIGITS: usize = 12;

/// Format `x` to `digits` significant digits, trimming trailing
/// zeros. Falls back to scientific notation outside roughly
/// `1e-4..1e(digits)`, like printf `%g`.
pub fn format_sig(x: f64, digits: usize) -> String {
    assert!(digits >= 1);
    if x == 0.0 {
        return "0".to_owned();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("numeric exponent");
    if exp >= -4 && exp < digits as i32 {
        let prec = (digits as i32 - 1 - exp).max(0) as usize;
        let plain = format!("{:.*}", prec, x);
        trim_zeros(&plain).to_owned()
    } else {
        format!("{}e{}", trim_zeros(mantissa), exp)
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn escape(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_owned()
    }
}

/// Long-format solution table: one row per element in scenario order
/// with its allocation, marginal price (product price for suppliers
/// and consumers, unit value for technologies), and profit.
pub fn write_solution_csv(scenario: &Scenario, solution: &ManagementSolution) -> String {
    let mut out = String::from("element_id,kind,allocation,price,profit\n");
    let mut row = |id: &str, kind: &str, alloc: Option<&f64>, price: Option<f64>| {
        let alloc = alloc.copied().unwrap_or(0.0);
        let profit = solution.phi.get(id).copied().unwrap_or(0.0);
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            escape(id),
            kind,
            format_sig(alloc, SIG_DIGITS),
            price.map_or_else(String::new, |p| format_sig(p, SIG_DIGITS)),
            format_sig(profit, SIG_DIGITS),
        ));
    };
    for sup in &scenario.suppliers {
        row(
            &sup.id,
            "supplier",
            solution.s.get(&sup.id),
            solution.pi.get(&sup.product).copied(),
        );
    }
    for con in &scenario.consumers {
        row(
            &con.id,
            "consumer",
            solution.d.get(&con.id),
            solution.pi.get(&con.product).copied(),
        );
    }
    for tech in &scenario.technologies {
        row(
            &tech.id,
            "technology",
            solution.t.get(&tech.id),
            technology_value(tech, &solution.pi).ok(),
        );
    }
    out
}

/// Sweep table in row-major grid order: taxes outer, budgets inner.
/// The budget column reads `unlimited` for pure tax sweeps; prices get
/// one column per product in scenario order.
pub fn write_sweep_csv(scenario: &Scenario, table: &SweepTable) -> String {
    let mut out = String::from("tax,budget,emissions,utility_cost,surplus,active_set");
    for product in &scenario.products {
        out.push_str(",price:");
        out.push_str(&product.id);
    }
    out.push('\n');
    for point in &table.points {
        out.push_str(&format_sig(point.tax, SIG_DIGITS));
        out.push(',');
        match point.budget {
            Some(b) => out.push_str(&format_sig(b, SIG_DIGITS)),
            None => out.push_str("unlimited"),
        }
        for value in [point.emissions, point.utility_cost, point.surplus] {
            out.push(',');
            out.push_str(&format_sig(value, SIG_DIGITS));
        }
        out.push(',');
        out.push_str(&escape(&point.active_set.join(";")));
        for product in &scenario.products {
            out.push(',');
            let price = point.prices.get(&product.id).copied().unwrap_or(0.0);
            out.push_str(&format_sig(price, SIG_DIGITS));
        }
        out.push('\n');
    }
    out
}
