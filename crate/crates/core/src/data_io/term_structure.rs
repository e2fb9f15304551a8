use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{TsKind, TsPoint, VarianceTermStructure, VolSurface, DAYS_PER_YEAR};
use crate::variance::{replicate_vix_squared, StrikeGrid};

/// A horizon to read off the market term structure, in calendar days.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Horizon {
    pub days: f64,
    /// Inclusive `[lo, hi]` day range a maturity must fall in to be used.
    #[serde(default)]
    pub window: Option<(f64, f64)>,
}

impl Horizon {
    pub fn nearest(days: f64) -> Self {
        Self { days, window: None }
    }
}

/// The 9-day point (restricted to 8..=10 days) followed by monthly
/// horizons from 1 to 12 months.
pub fn default_horizons() -> Vec<Horizon> {
    let mut h = vec![Horizon {
        days: 9.0,
        window: Some((8.0, 10.0)),
    }];
    h.extend((1..=12).map(|m| Horizon::nearest(DAYS_PER_YEAR * m as f64 / 12.0)));
    h
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HorizonMatch {
    pub horizon_days: f64,
    /// Selected maturity in years, absent when nothing qualified.
    pub maturity: Option<f64>,
    /// Replicated VIX² at the selected maturity.
    pub vix_squared: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketTermStructure {
    /// One point per distinct selected maturity.
    pub curve: VarianceTermStructure,
    pub matches: Vec<HorizonMatch>,
    pub warnings: Vec<String>,
}

/// Index of the maturity closest to `h`; the shorter maturity wins ties.
fn select(maturities: &[f64], h: &Horizon) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &tau) in maturities.iter().enumerate() {
        let days = tau * DAYS_PER_YEAR;
        if let Some((lo, hi)) = h.window {
            // small slack so day counts that round-trip through years still match
            if days < lo - 1e-9 || days > hi + 1e-9 {
                continue;
            }
        }
        let d = (days - h.days).abs();
        if best.is_none_or(|(_, bd)| d < bd - 1e-9) {
            best = Some((i, d));
        }
    }
    best.map(|(i, _)| i)
}

/// Replicates VIX² at the maturity nearest each horizon.
pub fn build_market_ts(surface: &VolSurface, horizons: &[Horizon]) -> Result<MarketTermStructure> {
    if surface.is_empty() {
        return Err(Error::InvalidInput(
            "cannot build a term structure from an empty surface".into(),
        ));
    }
    let env = surface.env();
    let maturities = surface.maturities();
    let mut replicated: Vec<Option<Result<f64>>> = vec![None; maturities.len()];
    let mut matches = Vec::with_capacity(horizons.len());
    let mut warnings = Vec::new();
    for h in horizons {
        let Some(i) = select(maturities, h) else {
            warnings.push(format!(
                "no maturity available for the {}-day horizon",
                h.days
            ));
            matches.push(HorizonMatch {
                horizon_days: h.days,
                maturity: None,
                vix_squared: None,
            });
            continue;
        };
        let tau = maturities[i];
        let level = replicated[i]
            .get_or_insert_with(|| {
                let quotes = &surface.quotes()[i];
                let forward = quotes[0].forward.unwrap_or_else(|| env.forward(tau));
                let grid = StrikeGrid::from_quotes(quotes, forward, env.discount(tau))?;
                Ok(replicate_vix_squared(&grid, tau)?.vix_squared)
            })
            .clone();
        match level {
            Ok(v) => matches.push(HorizonMatch {
                horizon_days: h.days,
                maturity: Some(tau),
                vix_squared: Some(v),
            }),
            Err(e) => {
                warnings.push(format!("{}-day horizon: replication failed ({e})", h.days));
                matches.push(HorizonMatch {
                    horizon_days: h.days,
                    maturity: Some(tau),
                    vix_squared: None,
                });
            }
        }
    }
    let mut points: Vec<TsPoint> = matches
        .iter()
        .filter_map(|m| {
            Some(TsPoint {
                maturity: m.maturity?,
                level: m.vix_squared?.max(0.0),
            })
        })
        .collect();
    points.sort_by(|a, b| a.maturity.total_cmp(&b.maturity));
    points.dedup_by(|a, b| a.maturity == b.maturity);
    Ok(MarketTermStructure {
        curve: VarianceTermStructure::new(TsKind::VixSquared, points)?,
        matches,
        warnings,
    })
}
