use super::black_scholes::black_undiscounted;
use crate::error::{Error, Result};
use crate::types::{MarketEnv, OptionKind, SjdParams};

/// Poisson tail mass below which the jump-count sum stops.
const TAIL_MASS: f64 = 1e-12;
/// Weights below this are dropped; rounding in the cumulative mass of large
/// intensities can otherwise keep the tail test from firing.
const NEGLIGIBLE_WEIGHT: f64 = 1e-20;
const MAX_JUMPS: usize = 100_000;

/// European price under the simple jump diffusion.
///
/// Conditional on `n` jumps the log return is Gaussian, so the price is a
/// Poisson-weighted sum of Black prices on shifted forwards.
pub fn sjd_price(
    params: &SjdParams,
    env: &MarketEnv,
    strike: f64,
    maturity: f64,
    kind: OptionKind,
) -> Result<f64> {
    if !(strike.is_finite() && strike > 0.0) {
        return Err(Error::param("strike", strike, "must be finite and > 0"));
    }
    if !(maturity.is_finite() && maturity > 0.0) {
        return Err(Error::param("maturity", maturity, "must be finite and > 0"));
    }
    let sd = params.sigma() * maturity.sqrt();
    let fwd = env.forward(maturity);
    let df = env.discount(maturity);
    let mean_jumps = params.lambda() * maturity;
    let j = params.jump();
    if mean_jumps == 0.0 || j == 0.0 {
        return Ok(df * black_undiscounted(fwd, strike, sd, kind));
    }
    let compensator = (-mean_jumps * j.exp_m1()).exp();
    let term = |n: usize| {
        let shifted = fwd * compensator * (n as f64 * j).exp();
        black_undiscounted(shifted, strike, sd, kind)
    };

    // Sum outward from the mode so large intensities neither underflow the
    // leading weight nor waste terms on negligible counts.
    let mode = mean_jumps.floor() as usize;
    let ln_mode_weight =
        -mean_jumps + mode as f64 * mean_jumps.ln() - libm::lgamma(mode as f64 + 1.0);
    let mode_weight = ln_mode_weight.exp();
    let mut covered = mode_weight;
    let mut total = mode_weight * term(mode);

    let mut weight = mode_weight;
    for n in (0..mode).rev() {
        weight *= (n + 1) as f64 / mean_jumps;
        if weight < NEGLIGIBLE_WEIGHT {
            break;
        }
        covered += weight;
        total += weight * term(n);
    }
    let mut weight = mode_weight;
    for n in mode + 1..mode + MAX_JUMPS {
        weight *= mean_jumps / n as f64;
        covered += weight;
        total += weight * term(n);
        if 1.0 - covered < TAIL_MASS || weight < NEGLIGIBLE_WEIGHT {
            break;
        }
    }
    Ok(df * total)
}
