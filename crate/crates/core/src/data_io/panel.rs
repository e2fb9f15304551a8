use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{years_from_days, MarketEnv, OptionKind};

/// One end-of-day option quote from a panel file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelRow {
    pub trade_date: NaiveDate,
    pub expiry_date: NaiveDate,
    pub strike: f64,
    pub kind: OptionKind,
    pub bid: f64,
    pub ask: f64,
    pub underlying_close: f64,
    pub rate: f64,
    pub dividend_yield: f64,
}

impl PanelRow {
    /// ACT/365 time to expiry.
    pub fn maturity(&self) -> f64 {
        years_from_days((self.expiry_date - self.trade_date).num_days() as f64)
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.bid + self.ask)
    }

    pub fn env(&self) -> Result<MarketEnv> {
        MarketEnv::new(self.underlying_close, self.rate, self.dividend_yield)
    }
}

/// Column names and formats of a panel file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SchemaConfig {
    pub trade_date: String,
    pub expiry_date: String,
    pub strike: String,
    pub kind: String,
    pub bid: String,
    pub ask: String,
    pub underlying_close: String,
    pub rate: String,
    pub dividend_yield: String,
    /// `chrono` format string for both date columns.
    pub date_format: String,
    /// File strikes are divided by this (OptionMetrics stores strike × 1000).
    pub strike_divisor: f64,
}

impl Default for SchemaConfig {
    fn default() -> Self {
        Self {
            trade_date: "trade_date".into(),
            expiry_date: "expiry_date".into(),
            strike: "strike".into(),
            kind: "kind".into(),
            bid: "bid".into(),
            ask: "ask".into(),
            underlying_close: "underlying_close".into(),
            rate: "rate".into(),
            dividend_yield: "dividend_yield".into(),
            date_format: "%Y-%m-%d".into(),
            strike_divisor: 1.0,
        }
    }
}

impl SchemaConfig {
    /// Column layout of an OptionMetrics-style export.
    pub fn option_metrics() -> Self {
        Self {
            trade_date: "date".into(),
            expiry_date: "exdate".into(),
            strike: "strike_price".into(),
            kind: "cp_flag".into(),
            bid: "best_bid".into(),
            ask: "best_offer".into(),
            underlying_close: "close".into(),
            rate: "rate".into(),
            dividend_yield: "dividend_yield".into(),
            date_format: "%Y%m%d".into(),
            strike_divisor: 1000.0,
        }
    }

    fn columns(&self) -> [&str; 9] {
        [
            &self.trade_date,
            &self.expiry_date,
            &self.strike,
            &self.kind,
            &self.bid,
            &self.ask,
            &self.underlying_close,
            &self.rate,
            &self.dividend_yield,
        ]
    }
}

/// A file line that could not be parsed into a [`PanelRow`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadReject {
    /// 1-based line number in the file, header included.
    pub line: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LoadedPanel {
    pub rows: Vec<PanelRow>,
    pub rejects: Vec<LoadReject>,
}

fn parse_row(
    rec: &csv::StringRecord,
    idx: &[usize; 9],
    schema: &SchemaConfig,
) -> std::result::Result<PanelRow, String> {
    let field = |i: usize| rec.get(idx[i]).map(str::trim).unwrap_or("");
    let date = |i: usize| {
        NaiveDate::parse_from_str(field(i), &schema.date_format)
            .map_err(|e| format!("{}: bad date `{}` ({e})", schema.columns()[i], field(i)))
    };
    let num = |i: usize| {
        field(i)
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("{}: bad number `{}`", schema.columns()[i], field(i)))
    };
    let row = PanelRow {
        trade_date: date(0)?,
        expiry_date: date(1)?,
        strike: num(2)? / schema.strike_divisor,
        kind: field(3).parse().map_err(|e: Error| e.to_string())?,
        bid: num(4)?,
        ask: num(5)?,
        underlying_close: num(6)?,
        rate: num(7)?,
        dividend_yield: num(8)?,
    };
    if row.strike <= 0.0 {
        return Err(format!("strike must be > 0, got {}", row.strike));
    }
    if row.underlying_close <= 0.0 {
        return Err(format!(
            "underlying close must be > 0, got {}",
            row.underlying_close
        ));
    }
    if row.expiry_date < row.trade_date {
        return Err("expiry precedes trade date".into());
    }
    Ok(row)
}

/// Reads a panel file. Lines that fail to parse are reported in
/// `rejects` rather than dropped.
pub fn load_panel(path: &Path, schema: &SchemaConfig) -> Result<LoadedPanel> {
    let file =
        std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    load_panel_from_reader(file, schema)
}

/// As [`load_panel`], from any reader.
pub fn load_panel_from_reader(
    reader: impl std::io::Read,
    schema: &SchemaConfig,
) -> Result<LoadedPanel> {
    if !(schema.strike_divisor.is_finite() && schema.strike_divisor > 0.0) {
        return Err(Error::param(
            "strike_divisor",
            schema.strike_divisor,
            "must be > 0",
        ));
    }
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let mut idx = [0usize; 9];
    for (slot, name) in idx.iter_mut().zip(schema.columns()) {
        *slot = headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Parse(format!("missing mandatory column `{name}`")))?;
    }
    let mut out = LoadedPanel::default();
    for (i, rec) in rdr.records().enumerate() {
        let line = rec
            .as_ref()
            .ok()
            .and_then(|r| r.position().map(|p| p.line()))
            .unwrap_or(i as u64 + 2);
        match rec {
            Ok(rec) => match parse_row(&rec, &idx, schema) {
                Ok(row) => out.rows.push(row),
                Err(reason) => out.rejects.push(LoadReject { line, reason }),
            },
            Err(e) => out.rejects.push(LoadReject {
                line,
                reason: e.to_string(),
            }),
        }
    }
    Ok(out)
}

/// Writes rows under the schema's column names.
pub fn save_panel(path: &Path, rows: &[PanelRow], schema: &SchemaConfig) -> Result<()> {
    let file =
        std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    save_panel_to_writer(file, rows, schema)
}

pub fn save_panel_to_writer(
    writer: impl std::io::Write,
    rows: &[PanelRow],
    schema: &SchemaConfig,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(schema.columns())?;
    for r in rows {
        w.write_record([
            r.trade_date.format(&schema.date_format).to_string(),
            r.expiry_date.format(&schema.date_format).to_string(),
            (r.strike * schema.strike_divisor).to_string(),
            r.kind.as_str().to_string(),
            r.bid.to_string(),
            r.ask.to_string(),
            r.underlying_close.to_string(),
            r.rate.to_string(),
            r.dividend_yield.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
