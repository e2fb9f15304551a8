use std::path::Path;

use chrono::NaiveDate;
use jointcal::data_io::{
    build_market_ts, default_horizons, filter_trade_date, load_panel, split_by_trade_date,
    FilterConfig, FilterOutcome, Horizon, SchemaConfig,
};
use jointcal::DAYS_PER_YEAR;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::args::{GlobalArgs, VixArgs};
use crate::error::CliError;
use crate::output::{load_config, Cell, OutputSink, Table};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PanelConfig {
    pub schema: SchemaConfig,
    pub filters: FilterConfig,
    pub horizons: Vec<Horizon>,
}

impl Default for PanelConfig {
    fn default() -> Self {
        Self {
            schema: SchemaConfig::default(),
            filters: FilterConfig::default(),
            horizons: default_horizons(),
        }
    }
}

/// Loads a panel, filters every trade date and records both reject reports.
pub(crate) fn filtered_dates(
    path: &Path,
    cfg: &PanelConfig,
    sink: &mut OutputSink,
) -> Result<Vec<(NaiveDate, FilterOutcome)>, CliError> {
    sink.record_input(path)?;
    let loaded = load_panel(path, &cfg.schema)?;
    if !loaded.rejects.is_empty() {
        eprintln!(
            "warning: {} malformed line(s) in {}",
            loaded.rejects.len(),
            path.display()
        );
        let mut t = Table::new(&["line", "reason"]);
        for r in &loaded.rejects {
            t.push(vec![Cell::Int(r.line as i64), r.reason.clone().into()]);
        }
        sink.aux_table("load_rejects", &t)?;
    }
    let days: Vec<(NaiveDate, Vec<_>)> = split_by_trade_date(loaded.rows).into_iter().collect();
    let outcomes = days
        .par_iter()
        .map(|(d, rows)| Ok((*d, filter_trade_date(rows, &cfg.filters)?)))
        .collect::<Result<Vec<_>, jointcal::Error>>()?;
    let mut t = Table::new(&[
        "trade_date",
        "expiry_date",
        "strike_ccy",
        "kind",
        "bid_ccy",
        "ask_ccy",
        "reason",
    ]);
    for (_, o) in &outcomes {
        for r in &o.rejects {
            t.push(vec![
                r.row.trade_date.to_string().into(),
                r.row.expiry_date.to_string().into(),
                r.row.strike.into(),
                r.row.kind.as_str().into(),
                r.row.bid.into(),
                r.row.ask.into(),
                r.reason.as_str().into(),
            ]);
        }
    }
    let rejected: usize = outcomes.iter().map(|(_, o)| o.rejects.len()).sum();
    if rejected > 0 {
        eprintln!("{rejected} quote(s) removed by the filters");
    }
    sink.aux_table("filter_rejects", &t)?;
    Ok(outcomes)
}

pub fn run(global: &GlobalArgs, args: &VixArgs) -> Result<(), CliError> {
    let cfg: PanelConfig = load_config(global)?;
    let mut sink = OutputSink::new(global, "vix", &(&cfg, args), None, true)?;
    let dates = filtered_dates(&args.panel, &cfg, &mut sink)?;
    if dates.is_empty() {
        return Err(CliError::Validation(format!(
            "{} holds no quotes",
            args.panel.display()
        )));
    }

    let mut table = Table::new(&[
        "trade_date",
        "horizon_days",
        "maturity_days",
        "vix_vol_pct",
        "vix_squared_var_ann",
    ]);
    let mut by_horizon: Vec<Vec<f64>> = vec![Vec::new(); cfg.horizons.len()];
    for (date, outcome) in &dates {
        if outcome.surface.is_empty() {
            eprintln!("warning: {date}: no quotes survived the filters");
            continue;
        }
        let ts = build_market_ts(&outcome.surface, &cfg.horizons)?;
        for w in &ts.warnings {
            eprintln!("warning: {date}: {w}");
        }
        for (i, m) in ts.matches.iter().enumerate() {
            let (Some(tau), Some(v2)) = (m.maturity, m.vix_squared) else {
                continue;
            };
            let vol_pct = 100.0 * v2.max(0.0).sqrt();
            by_horizon[i].push(vol_pct);
            table.push(vec![
                date.to_string().into(),
                m.horizon_days.into(),
                (tau * DAYS_PER_YEAR).round().into(),
                vol_pct.into(),
                v2.into(),
            ]);
        }
    }
    // on stdout only one table fits; --aggregate asks for the summary
    if args.aggregate {
        sink.aux_table("vix_term_structure", &table)?;
    } else {
        sink.table("vix_term_structure", &table)?;
    }

    if args.aggregate {
        let mut agg = Table::new(&[
            "horizon_days",
            "observations",
            "mean_vix_vol_pct",
            "std_vix_vol_pct",
            "se_vix_vol_pct",
        ]);
        for (h, vals) in cfg.horizons.iter().zip(&by_horizon) {
            if vals.is_empty() {
                continue;
            }
            let n = vals.len() as f64;
            let mean = vals.iter().sum::<f64>() / n;
            let std = if vals.len() > 1 {
                (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            } else {
                0.0
            };
            agg.push(vec![
                h.days.into(),
                Cell::Int(vals.len() as i64),
                mean.into(),
                std.into(),
                (std / n.sqrt()).into(),
            ]);
        }
        sink.table("vix_term_structure_summary", &agg)?;
    }
    sink.finish()
}
