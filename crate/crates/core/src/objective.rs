//! Implied-volatility fit, term-structure penalties and the α-weighted joint
//! objective.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pricing::{implied_vol_with_guess, BatesSlicePricer, PricerSettings, IV_UPPER};
use crate::types::{
    BatesParams, CalibrationConfig, ContractWeights, MaturityValue, PenaltyKind, TsKind, TsWeights,
    VarianceTermStructure, VolSurface,
};
use crate::variance::{bates_variance_swap, bates_vix_squared};

/// Squared error charged to a contract whose model price cannot be inverted.
pub const IV_FAILURE_PENALTY: f64 = IV_UPPER * IV_UPPER;

/// Components of one objective evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveBreakdown {
    pub alpha: f64,
    pub iv_sse: f64,
    pub ts_penalty: f64,
    /// `α·iv_sse + (1 - α)·ts_penalty`
    pub total: f64,
    pub iv_sse_by_maturity: Vec<MaturityValue>,
    pub ts_penalty_by_maturity: Vec<MaturityValue>,
    pub iv_failures: usize,
}

/// Weighted implied-volatility fit of one parameter vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IvFit {
    pub sse: f64,
    pub by_maturity: Vec<MaturityValue>,
    pub failures: usize,
}

/// Weighted term-structure fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TsFit {
    pub penalty: f64,
    pub by_maturity: Vec<MaturityValue>,
}

/// Model implied vols shaped like `surface.quotes()`; `None` where the model
/// price is outside the invertible band.
pub fn model_implied_vols(
    params: &BatesParams,
    surface: &VolSurface,
    settings: &PricerSettings,
) -> Result<Vec<Vec<Option<f64>>>> {
    settings.validate()?;
    let env = surface.env();
    surface
        .quotes()
        .par_iter()
        .zip(surface.maturities().par_iter())
        .map(|(slice, &tau)| {
            let pricer = BatesSlicePricer::new(params, env, tau, settings)?;
            Ok(slice
                .iter()
                .map(|q| {
                    let price = pricer.price(q.strike, q.kind);
                    implied_vol_with_guess(env, q.strike, tau, q.kind, price, q.implied_vol).ok()
                })
                .collect())
        })
        .collect()
}

fn resolve_contract_weights(
    weights: &ContractWeights,
    surface: &VolSurface,
) -> Result<Vec<Vec<f64>>> {
    match weights {
        ContractWeights::Uniform => Ok(surface
            .quotes()
            .iter()
            .map(|s| vec![1.0; s.len()])
            .collect()),
        ContractWeights::PerContract(w) => {
            let shape_ok = w.len() == surface.quotes().len()
                && w.iter()
                    .zip(surface.quotes())
                    .all(|(a, b)| a.len() == b.len());
            if !shape_ok {
                return Err(Error::InvalidInput(
                    "contract weights do not match the surface shape".into(),
                ));
            }
            if w.iter().flatten().any(|x| !(x.is_finite() && *x >= 0.0)) {
                return Err(Error::InvalidInput(
                    "contract weights must be finite and non-negative".into(),
                ));
            }
            Ok(w.clone())
        }
    }
}

/// Term-structure weights `w^v_j` for each observed point. Quote-count
/// weights require the observed maturities to be surface maturities.
pub fn resolve_ts_weights(
    weights: &TsWeights,
    observed: &VarianceTermStructure,
    surface: &VolSurface,
) -> Result<Vec<f64>> {
    match weights {
        TsWeights::Uniform => Ok(vec![1.0; observed.len()]),
        TsWeights::PerMaturity(w) => {
            if w.len() != observed.len() {
                return Err(Error::InvalidInput(format!(
                    "{} term-structure weights for {} points",
                    w.len(),
                    observed.len()
                )));
            }
            Ok(w.clone())
        }
        TsWeights::QuoteCount => observed
            .points()
            .iter()
            .map(|p| {
                surface
                    .maturities()
                    .iter()
                    .position(|&t| (t - p.maturity).abs() <= 1e-12 * t.max(1.0))
                    .map(|j| surface.quotes()[j].len() as f64)
                    .ok_or_else(|| {
                        Error::InvalidInput(format!(
                            "no quotes at term-structure maturity {}; quote-count weights need matching maturities",
                            p.maturity
                        ))
                    })
            })
            .collect(),
    }
}

fn iv_fit(vols: &[Vec<Option<f64>>], surface: &VolSurface, weights: &[Vec<f64>]) -> IvFit {
    let mut failures = 0;
    let mut by_maturity = Vec::with_capacity(vols.len());
    for (j, (slice, &tau)) in vols.iter().zip(surface.maturities()).enumerate() {
        let mut sse = 0.0;
        for (i, v) in slice.iter().enumerate() {
            let w = weights[j][i];
            let market = surface.quotes()[j][i].implied_vol.unwrap_or(f64::NAN);
            match v {
                Some(model) => sse += w * (model - market).powi(2),
                None => {
                    failures += 1;
                    sse += w * IV_FAILURE_PENALTY;
                }
            }
        }
        by_maturity.push(MaturityValue {
            maturity: tau,
            value: sse,
        });
    }
    IvFit {
        sse: by_maturity.iter().map(|m| m.value).sum(),
        by_maturity,
        failures,
    }
}

/// `Σ_j Σ_i w_{i,j} [σ^mod - σ^mkt]²` over the surface.
pub fn sse_iv(
    params: &BatesParams,
    surface: &VolSurface,
    weights: &ContractWeights,
    settings: &PricerSettings,
) -> Result<IvFit> {
    let w = resolve_contract_weights(weights, surface)?;
    let vols = model_implied_vols(params, surface, settings)?;
    Ok(iv_fit(&vols, surface, &w))
}

fn model_level(params: &BatesParams, kind: TsKind, tau: f64) -> Result<f64> {
    match kind {
        TsKind::VixSquared => bates_vix_squared(params, tau),
        TsKind::VarianceSwap => bates_variance_swap(params, tau),
    }
}

fn ts_fit(
    params: &BatesParams,
    observed: &VarianceTermStructure,
    model_kind: TsKind,
    weights: &[f64],
) -> Result<TsFit> {
    if weights.len() != observed.len() {
        return Err(Error::InvalidInput(format!(
            "{} term-structure weights for {} points",
            weights.len(),
            observed.len()
        )));
    }
    let by_maturity = observed
        .points()
        .iter()
        .zip(weights)
        .map(|(p, &w)| {
            let model = model_level(params, model_kind, p.maturity)?;
            Ok(MaturityValue {
                maturity: p.maturity,
                value: w * (model.sqrt() - p.level.sqrt()).powi(2),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TsFit {
        penalty: by_maturity.iter().map(|m| m.value).sum(),
        by_maturity,
    })
}

/// `Σ_j w^v_j [√V^mod(τ_j) - √V^mkt(τ_j)]²`, with the model curve of the same
/// kind as the observed one.
pub fn ts_penalty(
    params: &BatesParams,
    observed: &VarianceTermStructure,
    weights: &[f64],
) -> Result<TsFit> {
    ts_fit(params, observed, observed.kind(), weights)
}

/// Penalty that compares model VIX² against observed variance-swap rates.
pub fn approx_vs_penalty(
    params: &BatesParams,
    observed_vs: &VarianceTermStructure,
    weights: &[f64],
) -> Result<TsFit> {
    if observed_vs.kind() != TsKind::VarianceSwap {
        return Err(Error::InvalidInput(
            "approximate penalty needs an observed variance-swap curve".into(),
        ));
    }
    ts_fit(params, observed_vs, TsKind::VixSquared, weights)
}

/// The joint objective with its weights resolved once, for repeated
/// evaluation inside an optimizer.
#[derive(Debug, Clone)]
pub struct JointObjective<'a> {
    surface: &'a VolSurface,
    observed: &'a VarianceTermStructure,
    alpha: f64,
    penalty: PenaltyKind,
    contract_weights: Vec<Vec<f64>>,
    ts_weights: Vec<f64>,
    settings: PricerSettings,
}

impl<'a> JointObjective<'a> {
    pub fn new(
        surface: &'a VolSurface,
        observed: &'a VarianceTermStructure,
        config: &CalibrationConfig,
        settings: &PricerSettings,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&config.alpha) {
            return Err(Error::param("alpha", config.alpha, "must lie in [0, 1]"));
        }
        settings.validate()?;
        if surface.is_empty() {
            return Err(Error::InvalidInput("empty volatility surface".into()));
        }
        if observed.kind() != config.ts_kind.observed_kind() {
            return Err(Error::InvalidInput(format!(
                "penalty {:?} needs an observed {:?} curve, got {:?}",
                config.ts_kind,
                config.ts_kind.observed_kind(),
                observed.kind()
            )));
        }
        Ok(Self {
            surface,
            observed,
            alpha: config.alpha,
            penalty: config.ts_kind,
            contract_weights: resolve_contract_weights(&config.contract_weights, surface)?,
            ts_weights: resolve_ts_weights(&config.ts_weights, observed, surface)?,
            settings: *settings,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn surface(&self) -> &VolSurface {
        self.surface
    }

    pub fn settings(&self) -> &PricerSettings {
        &self.settings
    }

    fn model_kind(&self) -> TsKind {
        match self.penalty {
            PenaltyKind::VixSquared | PenaltyKind::ApproxVs => TsKind::VixSquared,
            PenaltyKind::VarianceSwap => TsKind::VarianceSwap,
        }
    }

    pub fn ts_fit(&self, params: &BatesParams) -> Result<TsFit> {
        ts_fit(params, self.observed, self.model_kind(), &self.ts_weights)
    }

    pub fn iv_fit(&self, params: &BatesParams) -> Result<IvFit> {
        let vols = model_implied_vols(params, self.surface, &self.settings)?;
        Ok(iv_fit(&vols, self.surface, &self.contract_weights))
    }

    /// Full breakdown, always computing both components.
    pub fn evaluate(&self, params: &BatesParams) -> Result<ObjectiveBreakdown> {
        let iv = self.iv_fit(params)?;
        let ts = self.ts_fit(params)?;
        Ok(ObjectiveBreakdown {
            alpha: self.alpha,
            iv_sse: iv.sse,
            ts_penalty: ts.penalty,
            total: self.alpha * iv.sse + (1.0 - self.alpha) * ts.penalty,
            iv_sse_by_maturity: iv.by_maturity,
            ts_penalty_by_maturity: ts.by_maturity,
            iv_failures: iv.failures,
        })
    }

    /// Objective value only; a component with zero weight is not computed.
    pub fn total(&self, params: &BatesParams) -> Result<f64> {
        let iv = if self.alpha > 0.0 {
            self.alpha * self.iv_fit(params)?.sse
        } else {
            0.0
        };
        let ts = if self.alpha < 1.0 {
            (1.0 - self.alpha) * self.ts_fit(params)?.penalty
        } else {
            0.0
        };
        Ok(iv + ts)
    }
}

/// `α·sse_iv + (1 - α)·penalty`, with the penalty chosen by `config.ts_kind`.
pub fn joint_objective(
    params: &BatesParams,
    surface: &VolSurface,
    observed_ts: &VarianceTermStructure,
    config: &CalibrationConfig,
    settings: &PricerSettings,
) -> Result<ObjectiveBreakdown> {
    JointObjective::new(surface, observed_ts, config, settings)?.evaluate(params)
}
