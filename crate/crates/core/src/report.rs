//! Daily log-contract multiplier and variance-swap/VIX spread series from
//! per-date calibration results.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::types::CalibrationResult;
use crate::variance::{bates_variance_swap, bates_vix_squared, log_contract_multiplier};

/// Horizon of the reported multiplier and spread (one month).
pub const REPORT_MATURITY: f64 = 1.0 / 12.0;
/// Trading days in the moving-average window.
pub const MOVING_AVERAGE_WINDOW: usize = 21;

/// A calibration result tagged with its trade date.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatedCalibration {
    pub trade_date: NaiveDate,
    pub result: CalibrationResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub trade_date: NaiveDate,
    pub multiplier: f64,
    /// `√VS - √VIX²` in decimal volatility.
    pub spread_vol: f64,
    /// Trailing means over the window; absent until the window is full.
    pub multiplier_ma: Option<f64>,
    pub spread_vol_ma: Option<f64>,
}

/// Sorts by date and computes the one-month multiplier and spread per date.
pub fn multiplier_spread_series(
    results: &[DatedCalibration],
    window: usize,
) -> Result<Vec<ReportRow>> {
    let mut sorted: Vec<&DatedCalibration> = results.iter().collect();
    sorted.sort_by_key(|d| d.trade_date);
    let mut rows: Vec<ReportRow> = Vec::with_capacity(sorted.len());
    for d in sorted {
        let p = &d.result.params;
        let vs = bates_variance_swap(p, REPORT_MATURITY)?;
        let vix2 = bates_vix_squared(p, REPORT_MATURITY)?;
        rows.push(ReportRow {
            trade_date: d.trade_date,
            multiplier: log_contract_multiplier(p, REPORT_MATURITY)?,
            spread_vol: vs.sqrt() - vix2.sqrt(),
            multiplier_ma: None,
            spread_vol_ma: None,
        });
    }
    let window = window.max(1);
    for i in window - 1..rows.len() {
        let span = &rows[i + 1 - window..=i];
        let n = window as f64;
        let q = span.iter().map(|r| r.multiplier).sum::<f64>() / n;
        let s = span.iter().map(|r| r.spread_vol).sum::<f64>() / n;
        rows[i].multiplier_ma = Some(q);
        rows[i].spread_vol_ma = Some(s);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::BatesParams;
    use chrono::Datelike;

    fn dated(day: u32, params: BatesParams) -> DatedCalibration {
        DatedCalibration {
            trade_date: NaiveDate::from_ymd_opt(2020, 1, day).unwrap(),
            result: CalibrationResult {
                alpha: 0.5,
                params,
                objective_value: 0.0,
                iv_sse: 0.0,
                ts_penalty: 0.0,
                mae_iv_by_maturity: vec![],
                ts_error_by_maturity: vec![],
                converged: true,
                evaluations: 0,
                iv_failures: 0,
            },
        }
    }

    #[test]
    fn no_jumps_gives_two_and_zero() {
        let p = BatesParams::new(0.04, 2.0, 0.04, 0.3, -0.7, 0.0, -0.05, 0.07).unwrap();
        let rows = multiplier_spread_series(&[dated(2, p), dated(1, p)], 2).unwrap();
        assert_eq!(rows[0].trade_date.day0(), 0);
        for r in &rows {
            assert_eq!(r.multiplier, 2.0);
            assert!(r.spread_vol.abs() < 1e-15);
        }
        assert_eq!(rows[0].multiplier_ma, None);
        assert_eq!(rows[1].multiplier_ma, Some(2.0));
    }
}
