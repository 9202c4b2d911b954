//! Graphviz export of the product–technology graph.
//!
//! Products render as ellipses (with unit and, given a solution, the
//! dual price), elements as boxes. With a solution attached, elements
//! whose allocation falls below the activity tolerance are grayed out
//! so the selected pathways stand forward. Nodes and edges are emitted
//! in sorted order, making the output deterministic.

use std::fmt::Write as _;

use thiserror::Error;

use crate::io::csv::format_sig;
use crate::management::ManagementSolution;
use crate::model::Scenario;

#[derive(Debug, Error)]
pub enum DotError {
    #[error("solution does not match scenario: {0}")]
    MismatchedSolution(String),
}

#[derive(Debug, Clone)]
pub struct DotOptions {
    /// Allocations at or below this are drawn as inactive.
    pub activity_tol: f64,
}

impl Default for DotOptions {
    fn default() -> Self {
        DotOptions { activity_tol: 1e-9 }
    }
}

const NUM_DIGITS: usize = 6;
const INACTIVE: &str = " color=gray fontcolor=gray";
const INACTIVE_EDGE: &str = " color=gray";

fn check_solution(scenario: &Scenario, solution: &ManagementSolution) -> Result<(), DotError> {
    for id in solution
        .s
        .keys()
        .chain(solution.d.keys())
        .chain(solution.t.keys())
    {
        if scenario.suppliers.iter().all(|s| &s.id != id)
            && scenario.consumers.iter().all(|c| &c.id != id)
            && scenario.technologies.iter().all(|t| &t.id != id)
        {
            return Err(DotError::MismatchedSolution(format!(
                "allocation for unknown element '{id}'"
            )));
        }
    }
    for id in solution.pi.keys() {
        if scenario.product(id).is_none() {
            return Err(DotError::MismatchedSolution(format!(
                "price for unknown product '{id}'"
            )));
        }
    }
    for product in &scenario.products {
        if !solution.pi.contains_key(&product.id) {
            return Err(DotError::MismatchedSolution(format!(
                "missing price for product '{}'",
                product.id
            )));
        }
    }
    Ok(())
}

pub fn export_dot(
    scenario: &Scenario,
    solution: Option<&ManagementSolution>,
    opts: &DotOptions,
) -> Result<String, DotError> {
    if let Some(solution) = solution {
        check_solution(scenario, solution)?;
    }
    let active = |id: &str| -> bool {
        match solution {
            Some(sol) => sol.allocation(id).unwrap_or(0.0) > opts.activity_tol,
            None => true,
        }
    };

    let mut out = String::from("digraph pathways {\n");
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [fontname=\"Helvetica\"];\n");
    if solution.is_some_and(|sol| sol.degenerate) {
        out.push_str(
            "  label=\"degenerate optimum: prices are one of several dual solutions\";\n",
        );
        out.push_str("  labelloc=t;\n");
    }

    let mut products: Vec<_> = scenario.products.iter().collect();
    products.sort_by(|a, b| a.id.cmp(&b.id));
    for product in products {
        let mut label = format!("{}\\n[{}]", product.id, product.unit);
        if let Some(sol) = solution {
            let price = sol.pi[&product.id];
            let _ = write!(label, "\\npi = {}", format_sig(price, NUM_DIGITS));
        }
        let _ = writeln!(
            out,
            "  \"p:{}\" [shape=ellipse label=\"{}\"];",
            product.id, label
        );
    }

    // Each node line and each edge line, collected then sorted.
    let mut nodes: Vec<String> = Vec::new();
    let mut edges: Vec<String> = Vec::new();

    for sup in &scenario.suppliers {
        let on = active(&sup.id);
        let style = if on { "" } else { INACTIVE };
        let estyle = if on { "" } else { INACTIVE_EDGE };
        let mut label = format!("{}\\nsupply {}", sup.id, sup.product);
        let mut edge_label = String::new();
        if let Some(sol) = solution {
            let flow = sol.s.get(&sup.id).copied().unwrap_or(0.0);
            let _ = write!(label, "\\ns = {}", format_sig(flow, NUM_DIGITS));
            if on {
                edge_label = format_sig(flow, NUM_DIGITS);
            }
        }
        nodes.push(format!("\"e:{}\" [shape=box label=\"{}\"{}];", sup.id, label, style));
        edges.push(format!(
            "\"e:{}\" -> \"p:{}\" [label=\"{}\"{}];",
            sup.id, sup.product, edge_label, estyle
        ));
    }

    for con in &scenario.consumers {
        let on = active(&con.id);
        let style = if on { "" } else { INACTIVE };
        let estyle = if on { "" } else { INACTIVE_EDGE };
        let mut label = format!("{}\\ndemand {}", con.id, con.product);
        let mut edge_label = String::new();
        if let Some(sol) = solution {
            let flow = sol.d.get(&con.id).copied().unwrap_or(0.0);
            let _ = write!(label, "\\nd = {}", format_sig(flow, NUM_DIGITS));
            if on {
                edge_label = format_sig(flow, NUM_DIGITS);
            }
        }
        nodes.push(format!("\"e:{}\" [shape=box label=\"{}\"{}];", con.id, label, style));
        edges.push(format!(
            "\"p:{}\" -> \"e:{}\" [label=\"{}\"{}];",
            con.product, con.id, edge_label, estyle
        ));
    }

    for tech in &scenario.technologies {
        let on = active(&tech.id);
        let style = if on { "" } else { INACTIVE };
        let estyle = if on { "" } else { INACTIVE_EDGE };
        let mut label = tech.id.clone();
        let mut rate = 0.0;
        if let Some(sol) = solution {
            rate = sol.t.get(&tech.id).copied().unwrap_or(0.0);
            let _ = write!(label, "\\nt = {}", format_sig(rate, NUM_DIGITS));
        }
        nodes.push(format!("\"e:{}\" [shape=box label=\"{}\"{}];", tech.id, label, style));
        for (product, &factor) in &tech.gamma {
            if factor == 0.0 {
                continue;
            }
            let flow = factor.abs() * rate;
            let edge_label = match (solution, on) {
                (Some(_), true) => format_sig(flow, NUM_DIGITS),
                (Some(_), false) => String::new(),
                (None, _) => format_sig(factor, NUM_DIGITS),
            };
            if factor < 0.0 {
                edges.push(format!(
                    "\"p:{}\" -> \"e:{}\" [label=\"{}\"{}];",
                    product, tech.id, edge_label, estyle
                ));
            } else {
                edges.push(format!(
                    "\"e:{}\" -> \"p:{}\" [label=\"{}\"{}];",
                    tech.id, product, edge_label, estyle
                ));
            }
        }
    }

    nodes.sort();
    edges.sort();
    for line in nodes.iter().chain(edges.iter()) {
        out.push_str("  ");
        out.push_str(line);
        out.push('\n');
    }
    out.push_str("}\n");
    Ok(out)
}
