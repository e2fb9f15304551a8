//! Bounded derivative-free calibration of the Bates model to the joint
//! objective, and the univariate reductions for the simple jump diffusion.

mod nelder_mead;
mod sjd;
mod transform;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use nelder_mead::{minimize, Minimum, SimplexOptions};
pub use sjd::{
    sjd_calibrate_univariate, sjd_iv_sse, sjd_lambda_from_vix, sjd_lambda_from_vs, JBracket,
    LambdaRule, SjdFit,
};
pub use transform::ParamTransform;

use crate::error::{Error, Result};
use crate::objective::{model_implied_vols, JointObjective};
use crate::pricing::PricerSettings;
use crate::types::{
    BatesParams, CalibrationConfig, CalibrationResult, MaturityValue, VarianceTermStructure,
    VolSurface,
};

/// Spread of the perturbed multistart points in search coordinates.
const RESTART_SPREAD: f64 = 0.5;

/// Fits the Bates parameters by minimizing the joint objective from
/// `config.initial_guess`, plus `config.optimizer.restarts` perturbed starts.
pub fn calibrate(
    surface: &VolSurface,
    observed_ts: &VarianceTermStructure,
    config: &CalibrationConfig,
    settings: &PricerSettings,
) -> Result<CalibrationResult> {
    config.validate()?;
    let objective = JointObjective::new(surface, observed_ts, config, settings)?;
    let transform = ParamTransform::new(&config.bounds)?;
    let opt = &config.optimizer;
    let options = SimplexOptions {
        f_tolerance: opt.tolerance,
        x_tolerance: opt.x_tolerance,
        max_evaluations: opt.max_evaluations,
        initial_step: opt.initial_step,
        ..SimplexOptions::default()
    };

    let x0 = transform.to_search(&config.initial_guess);
    let mut starts = vec![x0];
    let mut rng = ChaCha8Rng::seed_from_u64(opt.seed);
    let noise = Normal::new(0.0, RESTART_SPREAD).expect("positive spread");
    for _ in 0..opt.restarts {
        starts.push(std::array::from_fn(|i| x0[i] + noise.sample(&mut rng)));
    }

    let f = |y: &[f64]| -> f64 {
        let y: [f64; 8] = y.try_into().expect("eight search coordinates");
        transform
            .from_search(&y)
            .and_then(|p| objective.total(&p))
            .unwrap_or(f64::INFINITY)
    };
    let runs: Vec<Minimum<8>> = starts
        .par_iter()
        .map(|&s| minimize(&f, s, &options))
        .collect();
    let evaluations = runs.iter().map(|r| r.evaluations).sum();
    // lowest value wins; ties go to the earliest start
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.value < a.value { b } else { a })
        .expect("at least one start");
    if !best.value.is_finite() {
        return Err(Error::CalibrationFailed(format!(
            "no start produced a finite objective after {evaluations} evaluations"
        )));
    }

    let params = transform.from_search(&best.x)?;
    let breakdown = objective.evaluate(&params)?;
    let vols = model_implied_vols(&params, surface, settings)?;
    let mae_iv_by_maturity = surface
        .slices()
        .zip(&vols)
        .map(|((tau, quotes), model)| {
            let errs: Vec<f64> = quotes
                .iter()
                .zip(model)
                .filter_map(|(q, m)| Some((m.as_ref()? - q.implied_vol?).abs()))
                .collect();
            MaturityValue {
                maturity: tau,
                value: if errs.is_empty() {
                    f64::NAN
                } else {
                    errs.iter().sum::<f64>() / errs.len() as f64
                },
            }
        })
        .collect();
    let ts_error_by_maturity = observed_ts
        .points()
        .iter()
        .map(|p| {
            let model = match config.ts_kind {
                crate::types::PenaltyKind::VarianceSwap => {
                    crate::variance::bates_variance_swap(&params, p.maturity)
                }
                _ => crate::variance::bates_vix_squared(&params, p.maturity),
            }?;
            Ok(MaturityValue {
                maturity: p.maturity,
                value: model.sqrt() - p.level.sqrt(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(CalibrationResult {
        alpha: config.alpha,
        params,
        objective_value: breakdown.total,
        iv_sse: breakdown.iv_sse,
        ts_penalty: breakdown.ts_penalty,
        mae_iv_by_maturity,
        ts_error_by_maturity,
        converged: best.converged,
        evaluations,
        iv_failures: breakdown.iv_failures,
    })
}

/// Thresholds for calling a fitted parameter vector an exact recovery.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RecoveryTolerance {
    /// Componentwise relative error bound.
    pub relative: f64,
    /// Absolute error bound for `rho` and `mu_j`, which may sit near zero.
    pub absolute: f64,
}

impl Default for RecoveryTolerance {
    fn default() -> Self {
        Self {
            relative: 1e-4,
            absolute: 1e-4,
        }
    }
}

/// Largest componentwise error of `fitted` against `truth`: relative for
/// every parameter except `rho` and `mu_j`, which are compared absolutely
/// after scaling by the ratio of the two tolerances.
pub fn recovery_error(fitted: &BatesParams, truth: &BatesParams, tol: &RecoveryTolerance) -> f64 {
    let f = fitted.to_array();
    let t = truth.to_array();
    (0..8)
        .map(|i| {
            let diff = (f[i] - t[i]).abs();
            match BatesParams::NAMES[i] {
                "rho" | "mu_j" => diff * tol.relative / tol.absolute,
                _ if t[i] == 0.0 => {
                    if diff == 0.0 {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                }
                _ => diff / t[i].abs(),
            }
        })
        .fold(0.0, f64::max)
}

pub fn is_recovered(fitted: &BatesParams, truth: &BatesParams, tol: &RecoveryTolerance) -> bool {
    recovery_error(fitted, truth, tol) < tol.relative
}
