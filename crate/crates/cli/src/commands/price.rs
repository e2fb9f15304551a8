use jointcal::pricing::{bs_price, implied_vol, price_european, sjd_price, PricerSettings};
use jointcal::{BatesParams, SjdParams};
use serde::Serialize;

use super::{market_env, resolve_kind};
use crate::args::{GlobalArgs, Model, PriceArgs};
use crate::error::CliError;
use crate::output::{load_config, read_json, Cell, OutputSink, Table};

enum Pricer {
    Bs(f64),
    Bates(BatesParams),
    Sjd(SjdParams),
}

#[derive(Serialize)]
struct Effective<'a> {
    args: &'a PriceArgs,
    pricer: PricerSettings,
}

pub fn run(global: &GlobalArgs, args: &PriceArgs) -> Result<(), CliError> {
    let settings: PricerSettings = load_config(global)?;
    settings.validate()?;
    let env = market_env(&args.market)?;
    let pricer = match args.model {
        Model::Bs => Pricer::Bs(
            args.vol
                .ok_or_else(|| CliError::Validation("--model bs needs --vol".into()))?,
        ),
        Model::Bates => Pricer::Bates(match &args.params {
            Some(p) => read_json(p)?,
            None => BatesParams::baseline(),
        }),
        Model::Sjd => Pricer::Sjd(match (&args.params, args.sigma, args.lambda, args.jump) {
            (Some(p), ..) => read_json(p)?,
            (None, Some(s), Some(l), Some(j)) => SjdParams::new(s, l, j)?,
            _ => {
                return Err(CliError::Validation(
                    "--model sjd needs --params or all of --sigma, --lambda, --jump".into(),
                ))
            }
        }),
    };

    let mut sink = OutputSink::new(
        global,
        "price",
        &Effective {
            args,
            pricer: settings,
        },
        None,
        true,
    )?;
    if let Some(p) = &args.params {
        sink.record_input(p)?;
    }
    let mut table = Table::new(&[
        "model",
        "maturity_yr",
        "strike_ccy",
        "kind",
        "price_ccy",
        "iv_vol_pct",
    ]);
    let model_name = match args.model {
        Model::Bs => "bs",
        Model::Bates => "bates",
        Model::Sjd => "sjd",
    };
    for &tau in &args.maturities {
        for &k in &args.strikes {
            let kind = resolve_kind(args.kind, k, env.spot());
            let price = match &pricer {
                Pricer::Bs(vol) => bs_price(&env, k, tau, *vol, kind)?,
                Pricer::Bates(p) => price_european(p, &env, k, tau, kind, &settings)?,
                Pricer::Sjd(p) => sjd_price(p, &env, k, tau, kind)?,
            };
            let iv = implied_vol(&env, k, tau, kind, price)
                .ok()
                .map(|v| 100.0 * v);
            table.push(vec![
                model_name.into(),
                tau.into(),
                k.into(),
                kind.as_str().into(),
                price.into(),
                Cell::opt(iv),
            ]);
        }
    }
    sink.table("prices", &table)?;
    sink.finish()
}
