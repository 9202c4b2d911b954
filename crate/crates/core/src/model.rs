//! Domain types for the product-technology graph.
//!
//! A scenario is a bipartite-style graph: products act as conservation
//! nodes, while suppliers, consumers, and technologies attach to them.
//! Technologies couple several products at once through their signed
//! transformation factors.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

/// An abstract exchanged asset: material, energy, distance, land, emissions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Product {
    pub id: String,
    /// Free-text unit label, documentation only (no dimensional checks).
    pub unit: String,
    /// Marks undesired byproducts (e.g. CO2); used for disposal-cost
    /// accounting and emission totals.
    #[serde(default)]
    pub is_waste: bool,
}

/// Offers a single product at bid `alpha` up to `capacity`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Supplier {
    pub id: String,
    pub product: String,
    /// Offered value per product unit; may be negative (paying to dispose).
    pub alpha: f64,
    pub capacity: f64,
}

/// Requests a single product at bid `alpha` up to `capacity`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Consumer {
    pub id: String,
    pub product: String,
    /// Offered value per product unit; negative bids model taxes or
    /// tipping fees on waste products.
    pub alpha: f64,
    pub capacity: f64,
}

/// Transforms products according to its signed transformation factors.
///
/// The allocation `t` of a technology is measured in units of its
/// reference (input) product, which must appear in `gamma` with a
/// negative factor. Capacity comes in identical discrete units so the
/// investment model can buy them incrementally.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Technology {
    pub id: String,
    /// Operating bid per unit of reference product processed.
    pub alpha: f64,
    pub ref_product: String,
    /// Reference-product throughput added by each installed unit.
    pub capacity_per_unit: f64,
    /// product id -> signed ratio of product units per reference unit.
    pub gamma: BTreeMap<String, f64>,
    /// Investment cost per unit.
    #[serde(default)]
    pub invest_cost: f64,
    /// Units available for purchase in the investment model.
    #[serde(default)]
    pub max_units: u32,
    /// Units already installed; these need no budget.
    #[serde(default)]
    pub existing_units: u32,
}

impl Technology {
    /// Installed throughput capacity in management mode.
    pub fn existing_capacity(&self) -> f64 {
        f64::from(self.existing_units) * self.capacity_per_unit
    }
}

/// The full system graph plus its shared time basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub products: Vec<Product>,
    pub suppliers: Vec<Supplier>,
    pub consumers: Vec<Consumer>,
    pub technologies: Vec<Technology>,
    /// Label documenting that all flows and costs share one basis.
    #[serde(default = "default_time_basis")]
    pub time_basis: String,
}

fn default_time_basis() -> String {
    "annual".to_owned()
}

impl Scenario {
    pub fn empty() -> Self {
        Scenario {
            products: Vec::new(),
            suppliers: Vec::new(),
            consumers: Vec::new(),
            technologies: Vec::new(),
            time_basis: default_time_basis(),
        }
    }

    pub fn product(&self, id: &str) -> Option<&Product> {
        self.products.iter().find(|p| p.id == id)
    }

    pub fn technology(&self, id: &str) -> Option<&Technology> {
        self.technologies.iter().find(|t| t.id == id)
    }

    /// Treat every purchasable unit as already installed.
    ///
    /// Used for management studies of prospective technologies: each
    /// technology's existing unit count grows by its purchasable count,
    /// which matches an investment solve with a slack budget.
    pub fn assume_built(&self) -> Scenario {
        let mut s = self.clone();
        for tech in &mut s.technologies {
            tech.existing_units += tech.max_units;
        }
        s
    }
}

/// Findings from [`validate_scenario`]. A scenario is accepted
/// downstream only if `errors` is empty.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }
}

fn check_finite(report: &mut ValidationReport, what: &str, id: &str, value: f64) {
    if !value.is_finite() {
        report
            .errors
            .push(format!("{what} of '{id}' must be finite, got {value}"));
    }
}

/// Check every scenario invariant and collect all violations.
pub fn validate_scenario(scenario: &Scenario) -> ValidationReport {
    let mut report = ValidationReport::default();

    let mut product_ids = BTreeSet::new();
    for product in &scenario.products {
        if !product_ids.insert(product.id.as_str()) {
            report
                .errors
                .push(format!("duplicate product id '{}'", product.id));
        }
        if product.unit.is_empty() {
            report
                .errors
                .push(format!("product '{}' has an empty unit label", product.id));
        }
    }

    // Element ids share one namespace so allocations and profits can be
    // keyed by element id alone.
    let mut element_ids = BTreeSet::new();
    let mut check_element_id = |report: &mut ValidationReport, id: &str| {
        if !element_ids.insert(id.to_owned()) {
            report.errors.push(format!("duplicate element id '{id}'"));
        }
    };

    for supplier in &scenario.suppliers {
        check_element_id(&mut report, &supplier.id);
        check_finite(&mut report, "alpha", &supplier.id, supplier.alpha);
        if !(supplier.capacity >= 0.0 && supplier.capacity.is_finite()) {
            report.errors.push(format!(
                "supplier '{}' capacity must be finite and >= 0, got {}",
                supplier.id, supplier.capacity
            ));
        }
        if !product_ids.contains(supplier.product.as_str()) {
            report.errors.push(format!(
                "supplier '{}' references unknown product '{}'",
                supplier.id, supplier.product
            ));
        }
    }

    for consumer in &scenario.consumers {
        check_element_id(&mut report, &consumer.id);
        check_finite(&mut report, "alpha", &consumer.id, consumer.alpha);
        if !(consumer.capacity >= 0.0 && consumer.capacity.is_finite()) {
            report.errors.push(format!(
                "consumer '{}' capacity must be finite and >= 0, got {}",
                consumer.id, consumer.capacity
            ));
        }
        if !product_ids.contains(consumer.product.as_str()) {
            report.errors.push(format!(
                "consumer '{}' references unknown product '{}'",
                consumer.id, consumer.product
            ));
        }
    }

    for tech in &scenario.technologies {
        check_element_id(&mut report, &tech.id);
        check_finite(&mut report, "alpha", &tech.id, tech.alpha);
        if !(tech.capacity_per_unit >= 0.0 && tech.capacity_per_unit.is_finite()) {
            report.errors.push(format!(
                "technology '{}' capacity_per_unit must be finite and >= 0, got {}",
                tech.id, tech.capacity_per_unit
            ));
        }
        if !(tech.invest_cost >= 0.0 && tech.invest_cost.is_finite()) {
            report.errors.push(format!(
                "technology '{}' invest_cost must be finite and >= 0, got {}",
                tech.id, tech.invest_cost
            ));
        }
        for (product, factor) in &tech.gamma {
            if !product_ids.contains(product.as_str()) {
                report.errors.push(format!(
                    "technology '{}' gamma references unknown product '{}'",
                    tech.id, product
                ));
            }
            if !factor.is_finite() {
                report.errors.push(format!(
                    "technology '{}' gamma[{}] must be finite, got {}",
                    tech.id, product, factor
                ));
            }
        }
        match tech.gamma.get(&tech.ref_product) {
            Some(&factor) if factor < 0.0 => {
                if factor != -1.0 {
                    report.warnings.push(format!(
                        "technology '{}' reference factor is {} (recommend -1 so t reads \
                         directly as reference-product throughput)",
                        tech.id, factor
                    ));
                }
            }
            Some(_) => {
                report.errors.push(format!(
                    "technology '{}': reference product '{}' must be consumed (gamma < 0)",
                    tech.id, tech.ref_product
                ));
            }
            None => {
                report.errors.push(format!(
                    "technology '{}': gamma does not contain reference product '{}'",
                    tech.id, tech.ref_product
                ));
            }
        }
    }

    // A demanded product that nothing can produce is legal (its demand
    // simply goes unserved) but usually a modeling mistake.
    for product in &scenario.products {
        let has_consumer = scenario.consumers.iter().any(|c| c.product == product.id);
        if !has_consumer {
            continue;
        }
        let has_supplier = scenario.suppliers.iter().any(|s| s.product == product.id);
        let has_producer = scenario
            .technologies
            .iter()
            .any(|t| t.gamma.get(&product.id).is_some_and(|&g| g > 0.0));
        if !has_supplier && !has_producer {
            report.warnings.push(format!(
                "product '{}' has a consumer but no supplier and no producing technology",
                product.id
            ));
        }
    }

    report
}

/// Elements touching one product: the index sets S_p, D_p, T_p.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProductIncidence {
    pub suppliers: Vec<String>,
    pub consumers: Vec<String>,
    pub technologies: Vec<String>,
}

/// Group elements by the products they touch.
///
/// A technology lands in a product's set iff its transformation factor
/// for that product is nonzero; suppliers and consumers appear in
/// exactly one set.
pub fn index_sets(scenario: &Scenario) -> BTreeMap<String, ProductIncidence> {
    let mut sets: BTreeMap<String, ProductIncidence> = scenario
        .products
        .iter()
        .map(|p| (p.id.clone(), ProductIncidence::default()))
        .collect();

    for supplier in &scenario.suppliers {
        if let Some(inc) = sets.get_mut(&supplier.product) {
            inc.suppliers.push(supplier.id.clone());
        }
    }
    for consumer in &scenario.consumers {
        if let Some(inc) = sets.get_mut(&consumer.product) {
            inc.consumers.push(consumer.id.clone());
        }
    }
    for tech in &scenario.technologies {
        for (product, &factor) in &tech.gamma {
            if factor != 0.0 {
                if let Some(inc) = sets.get_mut(product) {
                    inc.technologies.push(tech.id.clone());
                }
            }
        }
    }
    sets
}
