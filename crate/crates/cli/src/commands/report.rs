use jointcal::report::{multiplier_spread_series, DatedCalibration};

use crate::args::{GlobalArgs, ReportArgs};
use crate::error::CliError;
use crate::output::{Cell, OutputSink, Table};

pub fn run(global: &GlobalArgs, args: &ReportArgs) -> Result<(), CliError> {
    let entries = std::fs::read_dir(&args.results_dir)
        .map_err(|e| CliError::Validation(format!("{}: {e}", args.results_dir.display())))?;
    let mut paths: Vec<_> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension().is_some_and(|x| x == "json")
                && p.file_name().is_some_and(|n| n != "manifest.json")
        })
        .collect();
    paths.sort();

    let mut sink = OutputSink::new(global, "report", args, None, false)?;
    let mut results = Vec::new();
    let mut bad = Vec::new();
    for p in &paths {
        let parsed = std::fs::read_to_string(p)
            .map_err(|e| e.to_string())
            .and_then(|s| serde_json::from_str::<DatedCalibration>(&s).map_err(|e| e.to_string()));
        match parsed {
            Ok(r) => {
                sink.record_input(p)?;
                results.push(r);
            }
            Err(e) => bad.push(format!("{}: {e}", p.display())),
        }
    }
    for b in &bad {
        eprintln!("warning: skipped {b}");
    }
    if results.is_empty() {
        return Err(CliError::Validation(format!(
            "no calibration results found in {}",
            args.results_dir.display()
        )));
    }

    let rows = multiplier_spread_series(&results, args.window)?;
    let mut t = Table::new(&[
        "trade_date",
        "log_contract_multiplier",
        "vs_vix_spread_vol_pct",
        "log_contract_multiplier_ma",
        "vs_vix_spread_vol_pct_ma",
    ]);
    for r in rows {
        t.push(vec![
            r.trade_date.to_string().into(),
            r.multiplier.into(),
            (100.0 * r.spread_vol).into(),
            Cell::opt(r.multiplier_ma),
            Cell::opt(r.spread_vol_ma.map(|s| 100.0 * s)),
        ]);
    }
    sink.table("multiplier_spread", &t)?;
    sink.finish()
}
