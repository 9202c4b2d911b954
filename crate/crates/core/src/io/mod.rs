//! Scenario file format, result serialization, and pathway-diagram
//! export.
//!
//! Scenarios live in a single human-editable TOML document whose field
//! names mirror the domain types; see the bundled files under
//! `scenarios/` for worked examples.

mod csv;
mod dot;

pub use csv::{format_sig, write_solution_csv, write_sweep_csv};
pub use dot::{export_dot, DotError, DotOptions};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{validate_scenario, Consumer, Product, Scenario, Supplier, Technology};

/// Textual mirror of [`Scenario`] plus optional descriptive metadata.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ScenarioDocument {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub currency: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_basis: Option<String>,
    #[serde(default)]
    pub products: Vec<Product>,
    #[serde(default)]
    pub suppliers: Vec<Supplier>,
    #[serde(default)]
    pub consumers: Vec<Consumer>,
    #[serde(default)]
    pub technologies: Vec<Technology>,
}

/// One parse or validation finding, with source position when known.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub message: String,
    pub line: Option<usize>,
    pub column: Option<usize>,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match (self.line, self.column) {
            (Some(line), Some(column)) => write!(f, "{}:{}: {}", line, column, self.message),
            (Some(line), None) => write!(f, "{}: {}", line, self.message),
            _ => write!(f, "{}", self.message),
        }
    }
}

#[derive(Debug, Error)]
#[error("{}", .diagnostics.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"))]
pub struct Diagnostics {
    pub diagnostics: Vec<Diagnostic>,
}

fn position(text: &str, offset: usize) -> (usize, usize) {
    let clamped = offset.min(text.len());
    let mut line = 1;
    let mut column = 1;
    for ch in text[..clamped].chars() {
        if ch == '\n' {
            line += 1;
            column = 1;
        } else {
            column += 1;
        }
    }
    (line, column)
}

pub fn parse_document(text: &str) -> Result<ScenarioDocument, Diagnostics> {
    toml::from_str(text).map_err(|err| {
        let (line, column) = match err.span() {
            Some(span) => {
                let (l, c) = position(text, span.start);
                (Some(l), Some(c))
            }
            None => (None, None),
        };
        Diagnostics {
            diagnostics: vec![Diagnostic {
                message: err.message().to_owned(),
                line,
                column,
            }],
        }
    })
}

impl ScenarioDocument {
    pub fn into_scenario(self) -> Scenario {
        Scenario {
            products: self.products,
            suppliers: self.suppliers,
            consumers: self.consumers,
            technologies: self.technologies,
            time_basis: self.time_basis.unwrap_or_else(|| "annual".to_owned()),
        }
    }

    pub fn from_scenario(scenario: &Scenario) -> ScenarioDocument {
        ScenarioDocument {
            title: None,
            currency: None,
            time_basis: Some(scenario.time_basis.clone()),
            products: scenario.products.clone(),
            suppliers: scenario.suppliers.clone(),
            consumers: scenario.consumers.clone(),
            technologies: scenario.technologies.clone(),
        }
    }
}

/// Parse and validate a scenario document. Collects every validation
/// error, not just the first; warnings do not block.
pub fn parse_scenario(text: &str) -> Result<Scenario, Diagnostics> {
    let scenario = parse_document(text)?.into_scenario();
    let report = validate_scenario(&scenario);
    if report.is_valid() {
        Ok(scenario)
    } else {
        Err(Diagnostics {
            diagnostics: report
                .errors
                .into_iter()
                .map(|message| Diagnostic {
                    message,
                    line: None,
                    column: None,
                })
                .collect(),
        })
    }
}

pub fn serialize_scenario(scenario: &Scenario) -> String {
    toml::to_string_pretty(&ScenarioDocument::from_scenario(scenario))
        .expect("scenario serializes to TOML")
}
