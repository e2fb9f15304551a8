//! Option-panel ingestion, quote filters, standardized moneyness and the
//! market VIX term structure.

mod filters;
mod panel;
mod term_structure;

use std::collections::BTreeMap;

use chrono::NaiveDate;

pub use filters::{
    apply_filters, parity_check, prefilter_vix, standardized_moneyness, FilterConfig,
    FilterOutcome, FilterReason, FilterReject, MoneynessBucket, OtmReference,
};
pub use panel::{
    load_panel, load_panel_from_reader, save_panel, save_panel_to_writer, LoadReject, LoadedPanel,
    PanelRow, SchemaConfig,
};
pub use term_structure::{
    build_market_ts, default_horizons, Horizon, HorizonMatch, MarketTermStructure,
};

use crate::error::Result;

/// Groups rows by trade date, keeping input order within each date.
pub fn split_by_trade_date(rows: Vec<PanelRow>) -> BTreeMap<NaiveDate, Vec<PanelRow>> {
    let mut out: BTreeMap<NaiveDate, Vec<PanelRow>> = BTreeMap::new();
    for r in rows {
        out.entry(r.trade_date).or_default().push(r);
    }
    out
}

/// Filters one trade date using VIX levels replicated from its own quotes.
pub fn filter_trade_date(rows: &[PanelRow], config: &FilterConfig) -> Result<FilterOutcome> {
    let vix = prefilter_vix(rows)?;
    apply_filters(rows, &vix, config)
}

/// Writes a filter reject report with a `reason` column.
pub fn write_filter_rejects(writer: impl std::io::Write, rejects: &[FilterReject]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "row_index",
        "trade_date",
        "expiry_date",
        "strike_ccy",
        "kind",
        "bid_ccy",
        "ask_ccy",
        "reason",
    ])?;
    for r in rejects {
        w.write_record([
            r.index.to_string(),
            r.row.trade_date.to_string(),
            r.row.expiry_date.to_string(),
            r.row.strike.to_string(),
            r.row.kind.as_str().to_string(),
            r.row.bid.to_string(),
            r.row.ask.to_string(),
            r.reason.as_str().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the loader's reject report.
pub fn write_load_rejects(writer: impl std::io::Write, rejects: &[LoadReject]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["line", "reason"])?;
    for r in rejects {
        w.write_record([r.line.to_string(), r.reason.clone()])?;
    }
    w.flush()?;
    Ok(())
}
