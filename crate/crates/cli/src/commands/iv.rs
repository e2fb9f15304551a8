use jointcal::pricing::implied_vol;
use jointcal::OptionKind;

use super::{market_env, resolve_kind};
use crate::args::{GlobalArgs, IvArgs};
use crate::error::CliError;
use crate::output::{Cell, OutputSink, Table};

#[derive(serde::Deserialize)]
struct QuoteRow {
    strike: f64,
    maturity: f64,
    kind: String,
    price: f64,
}

pub fn run(global: &GlobalArgs, args: &IvArgs) -> Result<(), CliError> {
    let env = market_env(&args.market)?;
    let quotes: Vec<(f64, f64, OptionKind, f64)> = match &args.quotes {
        Some(path) => {
            let mut rdr = csv::Reader::from_path(path)
                .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
            rdr.deserialize::<QuoteRow>()
                .map(|r| {
                    let r = r?;
                    Ok((r.strike, r.maturity, r.kind.parse::<OptionKind>()?, r.price))
                })
                .collect::<Result<_, CliError>>()?
        }
        None => match (args.strike, args.maturity, args.price) {
            (Some(k), Some(t), Some(p)) => vec![(k, t, resolve_kind(args.kind, k, env.spot()), p)],
            _ => {
                return Err(CliError::Validation(
                    "give --quotes or all of --strike, --maturity, --price".into(),
                ))
            }
        },
    };

    let mut sink = OutputSink::new(global, "iv", args, None, true)?;
    if let Some(p) = &args.quotes {
        sink.record_input(p)?;
    }
    let mut table = Table::new(&[
        "strike_ccy",
        "maturity_yr",
        "kind",
        "price_ccy",
        "iv_vol_pct",
        "error",
    ]);
    let mut failures = 0;
    for (k, t, kind, p) in quotes {
        let (iv, err) = match implied_vol(&env, k, t, kind, p) {
            Ok(v) => (Some(100.0 * v), String::new()),
            Err(e) => {
                failures += 1;
                (None, e.to_string())
            }
        };
        table.push(vec![
            k.into(),
            t.into(),
            kind.as_str().into(),
            p.into(),
            Cell::opt(iv),
            err.into(),
        ]);
    }
    sink.table("implied_vols", &table)?;
    sink.finish()?;
    if failures > 0 {
        eprintln!("warning: {failures} price(s) could not be inverted");
    }
    Ok(())
}
