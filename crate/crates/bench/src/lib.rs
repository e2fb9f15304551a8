//! Shared fixtures for the benchmarks.

use jointcal::simulation::{generate_surface, SimulationSpec, SyntheticMarket};
use jointcal::BatesParams;

/// The default study market (five maturities, strikes 75 to 125) generated
/// from the baseline parameters.
pub fn baseline_market() -> SyntheticMarket {
    generate_surface(&BatesParams::baseline(), &SimulationSpec::default())
        .expect("baseline market generates")
}
