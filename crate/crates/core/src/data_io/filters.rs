use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::panel::PanelRow;
use crate::error::{Error, Result};
use crate::pricing::implied_vol;
use crate::types::{MarketEnv, MaturityValue, OptionKind, OptionQuote, VolSurface};
use crate::variance::{replicate_vix_squared, StrikeGrid};

/// `ln(K/S) / (VIX(τ)·√τ)`, with `vix` in decimal volatility units.
pub fn standardized_moneyness(strike: f64, spot: f64, maturity: f64, vix: f64) -> Result<f64> {
    if !(strike.is_finite() && strike > 0.0) {
        return Err(Error::param("strike", strike, "must be finite and > 0"));
    }
    if !(spot.is_finite() && spot > 0.0) {
        return Err(Error::param("spot", spot, "must be finite and > 0"));
    }
    if !(maturity.is_finite() && maturity > 0.0) {
        return Err(Error::param("maturity", maturity, "must be finite and > 0"));
    }
    if !(vix.is_finite() && vix > 0.0) {
        return Err(Error::param("vix", vix, "must be finite and > 0"));
    }
    Ok((strike / spot).ln() / (vix * maturity.sqrt()))
}

/// Bands of `|k|` used for error breakdowns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MoneynessBucket {
    /// `|k| < 1`
    Atm,
    /// `1 ≤ |k| < 2`
    Otm,
    /// `|k| ≥ 2`
    Dotm,
}

impl MoneynessBucket {
    pub const ALL: [MoneynessBucket; 3] = [Self::Atm, Self::Otm, Self::Dotm];

    pub fn of(k: f64) -> Self {
        let a = k.abs();
        if a < 1.0 {
            Self::Atm
        } else if a < 2.0 {
            Self::Otm
        } else {
            Self::Dotm
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Atm => "atm",
            Self::Otm => "otm",
            Self::Dotm => "dotm",
        }
    }
}

/// Whether a call/put pair at one strike and expiry breaks put–call parity
/// on mid quotes by more than `tolerance·S`.
pub fn parity_check(call: &PanelRow, put: &PanelRow, env: &MarketEnv, tolerance: f64) -> bool {
    let tau = call.maturity();
    let rhs = env.spot() * env.dividend_discount(tau) - call.strike * env.discount(tau);
    (call.mid() - put.mid() - rhs).abs() > tolerance * env.spot()
}

/// Level against which a strike is classed as out of the money.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OtmReference {
    /// Calls with `K ≥ S`, puts with `K < S`.
    #[default]
    Spot,
    Forward,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterConfig {
    /// Quotes with `ask <= min_ask` are removed.
    pub min_ask: f64,
    pub max_maturity_years: f64,
    /// Parity tolerance as a fraction of spot.
    pub parity_tolerance: f64,
    pub max_abs_moneyness: f64,
    pub otm_reference: OtmReference,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            min_ask: 0.10,
            max_maturity_years: 1.0,
            parity_tolerance: 0.005,
            max_abs_moneyness: 6.0,
            otm_reference: OtmReference::Spot,
        }
    }
}

/// Why a row was removed. Filters run in declaration order and the first
/// failing one is recorded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterReason {
    BidAboveAsk,
    AskAtOrBelowFloor,
    MaturityOutOfRange,
    ParityViolation,
    NotOutOfTheMoney,
    MissingVix,
    MoneynessBeyondLimit,
    IvUnattainable,
}

impl FilterReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::BidAboveAsk => "bid_above_ask",
            Self::AskAtOrBelowFloor => "ask_at_or_below_floor",
            Self::MaturityOutOfRange => "maturity_out_of_range",
            Self::ParityViolation => "parity_violation",
            Self::NotOutOfTheMoney => "not_out_of_the_money",
            Self::MissingVix => "missing_vix",
            Self::MoneynessBeyondLimit => "moneyness_beyond_limit",
            Self::IvUnattainable => "iv_unattainable",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterReject {
    /// Position of the row in the input slice.
    pub index: usize,
    pub row: PanelRow,
    pub reason: FilterReason,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterOutcome {
    pub retained: Vec<PanelRow>,
    pub surface: VolSurface,
    pub rejects: Vec<FilterReject>,
}

fn vix_at(vix: &[MaturityValue], maturity: f64) -> Option<f64> {
    vix.iter()
        .find(|v| (v.maturity - maturity).abs() < 1e-12)
        .map(|v| v.value)
        .filter(|v| v.is_finite() && *v > 0.0)
}

/// Replicated VIX (decimal) per maturity from the OTM side of every row
/// whose bid does not exceed its ask. Maturities with fewer than two
/// strikes are skipped.
pub fn prefilter_vix(rows: &[PanelRow]) -> Result<Vec<MaturityValue>> {
    let mut by_expiry: BTreeMap<_, Vec<&PanelRow>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.bid <= r.ask && r.maturity() > 0.0) {
        by_expiry.entry(r.expiry_date).or_default().push(r);
    }
    let mut out = Vec::new();
    for group in by_expiry.values() {
        let tau = group[0].maturity();
        let env = group[0].env()?;
        let quotes = group
            .iter()
            .map(|r| OptionQuote::from_mid(r.strike, tau, r.kind, r.mid().max(0.0)))
            .collect::<Result<Vec<_>>>()?;
        let grid = match StrikeGrid::from_quotes(&quotes, env.forward(tau), env.discount(tau)) {
            Ok(g) => g,
            Err(_) => continue,
        };
        let v2 = replicate_vix_squared(&grid, tau)?.vix_squared;
        if v2 > 0.0 {
            out.push(MaturityValue {
                maturity: tau,
                value: v2.sqrt(),
            });
        }
    }
    Ok(out)
}

/// Runs the quote filters over rows from a single trade date. `vix` holds
/// the decimal VIX per maturity used for standardized moneyness.
pub fn apply_filters(
    rows: &[PanelRow],
    vix: &[MaturityValue],
    config: &FilterConfig,
) -> Result<FilterOutcome> {
    let env = match rows.first() {
        Some(r) => r.env()?,
        None => MarketEnv::new(1.0, 0.0, 0.0)?,
    };
    if let Some(first) = rows.first() {
        if rows.iter().any(|r| r.trade_date != first.trade_date) {
            return Err(Error::InvalidInput(
                "apply_filters expects rows from one trade date".into(),
            ));
        }
        if rows
            .iter()
            .any(|r| r.underlying_close != first.underlying_close)
        {
            return Err(Error::InvalidInput(
                "underlying close differs within one trade date".into(),
            ));
        }
    }

    let mut reason: Vec<Option<FilterReason>> = rows
        .iter()
        .map(|r| {
            let tau = r.maturity();
            if r.bid > r.ask {
                Some(FilterReason::BidAboveAsk)
            } else if r.ask <= config.min_ask {
                Some(FilterReason::AskAtOrBelowFloor)
            } else if !(tau > 0.0 && tau <= config.max_maturity_years) {
                Some(FilterReason::MaturityOutOfRange)
            } else {
                None
            }
        })
        .collect();

    let mut pairs: BTreeMap<(chrono::NaiveDate, u64), (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for (i, r) in rows
        .iter()
        .enumerate()
        .filter(|(i, _)| reason[*i].is_none())
    {
        let slot = pairs
            .entry((r.expiry_date, r.strike.to_bits()))
            .or_default();
        match r.kind {
            OptionKind::Call => slot.0.push(i),
            OptionKind::Put => slot.1.push(i),
        }
    }
    let mut violators = Vec::new();
    for (calls, puts) in pairs.values() {
        for &c in calls {
            for &p in puts {
                if parity_check(&rows[c], &rows[p], &rows[c].env()?, config.parity_tolerance) {
                    violators.extend([c, p]);
                }
            }
        }
    }
    for i in violators {
        reason[i] = Some(FilterReason::ParityViolation);
    }

    let mut quotes = Vec::new();
    let mut retained = Vec::new();
    let mut rejects = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let verdict = match reason[i] {
            Some(why) => Err(why),
            None => screen(r, vix, config),
        };
        match verdict {
            Ok(q) => {
                quotes.push(q);
                retained.push(r.clone());
            }
            Err(why) => rejects.push(FilterReject {
                index: i,
                row: r.clone(),
                reason: why,
            }),
        }
    }
    Ok(FilterOutcome {
        retained,
        surface: VolSurface::new(env, quotes)?,
        rejects,
    })
}

fn screen(
    r: &PanelRow,
    vix: &[MaturityValue],
    config: &FilterConfig,
) -> std::result::Result<OptionQuote, FilterReason> {
    let tau = r.maturity();
    let env = r.env().map_err(|_| FilterReason::IvUnattainable)?;
    let reference = match config.otm_reference {
        OtmReference::Spot => env.spot(),
        OtmReference::Forward => env.forward(tau),
    };
    if OptionKind::otm_for(r.strike, reference) != r.kind {
        return Err(FilterReason::NotOutOfTheMoney);
    }
    let v = vix_at(vix, tau).ok_or(FilterReason::MissingVix)?;
    let k = standardized_moneyness(r.strike, env.spot(), tau, v)
        .map_err(|_| FilterReason::MissingVix)?;
    if k.abs() > config.max_abs_moneyness {
        return Err(FilterReason::MoneynessBeyondLimit);
    }
    let iv = implied_vol(&env, r.strike, tau, r.kind, r.mid())
        .map_err(|_| FilterReason::IvUnattainable)?;
    OptionQuote::from_bid_ask(r.strike, tau, r.kind, r.bid, r.ask)
        .map(|q| {
            q.with_implied_vol(iv)
                .with_forward(env.forward(tau))
                .with_std_moneyness(k)
        })
        .map_err(|_| FilterReason::IvUnattainable)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pricing::bs_price;
    use chrono::NaiveDate;

    fn row(days: i64, strike: f64, kind: OptionKind, bid: f64, ask: f64) -> PanelRow {
        let t = NaiveDate::from_ymd_opt(2021, 3, 1).unwrap();
        PanelRow {
            trade_date: t,
            expiry_date: t + chrono::Duration::days(days),
            strike,
            kind,
            bid,
            ask,
            underlying_close: 100.0,
            rate: 0.02,
            dividend_yield: 0.01,
        }
    }

    fn bs_row(days: i64, strike: f64, kind: OptionKind, half_spread: f64) -> PanelRow {
        let env = MarketEnv::new(100.0, 0.02, 0.01).unwrap();
        let p = bs_price(&env, strike, days as f64 / 365.0, 0.2, kind).unwrap();
        row(days, strike, kind, p - half_spread, p + half_spread)
    }

    #[test]
    fn moneyness_arithmetic() {
        assert_eq!(standardized_moneyness(100.0, 100.0, 0.5, 0.2).unwrap(), 0.0);
        let k = standardized_moneyness(100.0 * 0.02f64.exp(), 100.0, 0.25, 0.2).unwrap();
        assert!((k - 0.2).abs() < 1e-12);
        assert!(standardized_moneyness(100.0, 100.0, 0.5, 0.0).is_err());
        assert_eq!(MoneynessBucket::of(0.999), MoneynessBucket::Atm);
        assert_eq!(MoneynessBucket::of(-1.0), MoneynessBucket::Otm);
        assert_eq!(MoneynessBucket::of(2.0), MoneynessBucket::Dotm);
    }

    #[test]
    fn parity_flags() {
        let env = MarketEnv::new(100.0, 0.02, 0.01).unwrap();
        let c = bs_row(60, 95.0, OptionKind::Call, 0.0);
        let p = bs_row(60, 95.0, OptionKind::Put, 0.0);
        assert!(!parity_check(&c, &p, &env, 0.005));
        let mut shifted = c.clone();
        shifted.bid += 5.0;
        shifted.ask += 5.0;
        assert!(parity_check(&shifted, &p, &env, 0.005));
        // a 1%·S wide market centred on parity keeps its mid on parity
        let wide = bs_row(60, 95.0, OptionKind::Call, 0.5);
        assert!(!parity_check(&wide, &p, &env, 0.005));
    }

    #[test]
    fn each_rule_fires_and_rows_partition() {
        let rows = vec![
            row(30, 90.0, OptionKind::Put, 0.5, 0.4),
            row(30, 80.0, OptionKind::Put, 0.0, 0.10),
            row(400, 90.0, OptionKind::Put, 1.0, 1.1),
            bs_row(30, 95.0, OptionKind::Put, 0.01),
            bs_row(30, 105.0, OptionKind::Call, 0.01),
            bs_row(30, 90.0, OptionKind::Call, 0.01),
            row(30, 99.0, OptionKind::Put, 120.0, 120.2),
        ];
        let vix = [MaturityValue {
            maturity: 30.0 / 365.0,
            value: 0.2,
        }];
        let out = apply_filters(&rows, &vix, &FilterConfig::default()).unwrap();
        let reasons: Vec<_> = out.rejects.iter().map(|r| (r.index, r.reason)).collect();
        assert_eq!(
            reasons,
            vec![
                (0, FilterReason::BidAboveAsk),
                (1, FilterReason::AskAtOrBelowFloor),
                (2, FilterReason::MaturityOutOfRange),
                (5, FilterReason::NotOutOfTheMoney),
                (6, FilterReason::IvUnattainable),
            ]
        );
        assert_eq!(out.retained.len() + out.rejects.len(), rows.len());
        assert_eq!(out.surface.len(), 2);
        let again = apply_filters(&out.retained, &vix, &FilterConfig::default()).unwrap();
        assert_eq!(again.retained, out.retained);
        assert!(again.rejects.is_empty());
    }

    #[test]
    fn parity_drops_both_legs() {
        let mut c = bs_row(30, 100.0, OptionKind::Call, 0.01);
        c.bid += 2.0;
        c.ask += 2.0;
        let p = bs_row(30, 100.0, OptionKind::Put, 0.01);
        let vix = [MaturityValue {
            maturity: 30.0 / 365.0,
            value: 0.2,
        }];
        let out = apply_filters(&[c, p], &vix, &FilterConfig::default()).unwrap();
        assert!(out.retained.is_empty());
        assert!(out
            .rejects
            .iter()
            .all(|r| r.reason == FilterReason::ParityViolation));
    }

    #[test]
    fn moneyness_boundary() {
        let tau: f64 = 30.0 / 365.0;
        let vix = 0.2;
        let mk = |k: f64| {
            let strike = 100.0 * (k * vix * tau.sqrt()).exp();
            row(30, strike, OptionKind::Call, 0.5, 0.6)
        };
        let v = [MaturityValue {
            maturity: tau,
            value: vix,
        }];
        let cfg = FilterConfig {
            min_ask: 0.0,
            ..Default::default()
        };
        let out = apply_filters(&[mk(6.01)], &v, &cfg).unwrap();
        assert_eq!(out.rejects[0].reason, FilterReason::MoneynessBeyondLimit);
        let out = apply_filters(&[mk(5.99)], &v, &cfg).unwrap();
        assert!(out
            .rejects
            .iter()
            .all(|r| r.reason != FilterReason::MoneynessBeyondLimit));
    }

    #[test]
    fn prefilter_vix_matches_flat_vol() {
        let mut rows = Vec::new();
        for i in 0..=600 {
            let k = 40.0 + 0.25 * i as f64;
            rows.push(bs_row(30, k, OptionKind::otm_for(k, 100.0), 0.0));
        }
        let v = prefilter_vix(&rows).unwrap();
        assert_eq!(v.len(), 1);
        assert!((v[0].value - 0.2).abs() < 2e-3, "{}", v[0].value);
    }
}
