pub mod calibrate;
pub mod iv;
pub mod price;
pub mod report;
pub mod simulate;
pub mod vix;

use jointcal::{MarketEnv, OptionKind};

use crate::args::{KindArg, MarketArgs};
use crate::error::CliError;

pub(crate) fn market_env(m: &MarketArgs) -> Result<MarketEnv, CliError> {
    Ok(MarketEnv::new(m.spot, m.rate, m.dividend)?)
}

pub(crate) fn resolve_kind(kind: KindArg, strike: f64, spot: f64) -> OptionKind {
    match kind {
        KindArg::Call => OptionKind::Call,
        KindArg::Put => OptionKind::Put,
        KindArg::Otm => OptionKind::otm_for(strike, spot),
    }
}
