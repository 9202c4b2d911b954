//! Scenarios bundled with the crate, embedded at compile time.

use crate::io::parse_scenario;
use crate::model::Scenario;

/// Gasoline vehicles versus solar-charged EVs: a five-product toy
/// whose carbon-tax switchover sits at exactly 3/23 USD per kg CO2.
pub const FIG1_VEHICLES_TOML: &str = include_str!("../scenarios/fig1_vehicles.toml");

/// University campus utility system with sixteen candidate
/// technologies across fossil, renewable, and hydrogen routes.
pub const CAMPUS_TOML: &str = include_str!("../scenarios/campus.toml");

pub fn fig1_vehicles() -> Scenario {
    parse_scenario(FIG1_VEHICLES_TOML).expect("bundled vehicle scenario is valid")
}

pub fn campus() -> Scenario {
    parse_scenario(CAMPUS_TOML).expect("bundled campus scenario is valid")
}
