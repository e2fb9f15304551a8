//! European option pricing under Black–Scholes, the simple jump diffusion
//! and the Bates model, plus implied-volatility inversion.

mod black_scholes;
mod charfn;
mod cos;
mod implied_vol;
mod sjd;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use black_scholes::{bs_price, bs_vega, norm_cdf, norm_pdf};
pub use charfn::bates_char_fn;
pub use cos::CosDensity;
pub use implied_vol::{implied_vol, implied_vol_with_guess, IV_LOWER, IV_UPPER};
pub use sjd::sjd_price;

use crate::error::{Error, Result};
use crate::types::{BatesParams, MarketEnv, OptionKind};

/// Parity residual (relative to spot) above which a price is flagged.
pub const PARITY_WARNING_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Quadrature {
    /// Fourier-cosine series of the log-return density.
    #[default]
    Cosine,
}

/// Numerical settings of the characteristic-function pricer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PricerSettings {
    /// Minimum number of series terms; a power of two, at least 64. Slices
    /// whose density mixes a narrow diffusive peak with wide jump tails use
    /// more terms, up to [`MAX_SERIES_TERMS`].
    pub fourier_grid_size: usize,
    /// Half-width of the truncation interval in log-return standard deviations.
    pub truncation_width: f64,
    pub quadrature: Quadrature,
}

impl Default for PricerSettings {
    fn default() -> Self {
        Self {
            fourier_grid_size: 256,
            truncation_width: 12.0,
            quadrature: Quadrature::Cosine,
        }
    }
}

impl PricerSettings {
    pub fn validate(&self) -> Result<()> {
        let n = self.fourier_grid_size;
        if n < 64 || !n.is_power_of_two() {
            return Err(Error::InvalidInput(format!(
                "fourier_grid_size must be a power of two >= 64, got {n}"
            )));
        }
        if !(self.truncation_width >= 6.0 && self.truncation_width.is_finite()) {
            return Err(Error::param(
                "truncation_width",
                self.truncation_width,
                "must be >= 6",
            ));
        }
        Ok(())
    }
}

/// Black–Scholes characteristic function of `ln(S_τ/S_0)`.
pub fn bs_char_fn(env: &MarketEnv, maturity: f64, vol: f64, u: Complex64) -> Complex64 {
    let iu = Complex64::new(-u.im, u.re);
    let var = vol * vol * maturity;
    (iu * ((env.rate() - env.dividend_yield()) * maturity - 0.5 * var) - 0.5 * var * u * u).exp()
}

/// Mean, variance and fourth cumulant of the Bates log return, used to
/// place the truncation interval. The fourth cumulant adds the jump tail and
/// the dispersion of integrated variance, which dominate short-dated wings.
fn log_return_cumulants(p: &BatesParams, env: &MarketEnv, tau: f64) -> Cumulants {
    let kt = p.kappa() * tau;
    let avg = if kt < 1e-8 {
        p.v0()
    } else {
        p.theta() + (p.v0() - p.theta()) * (-(-kt).exp_m1()) / kt
    };
    let integrated_var = avg * tau;
    let lt = p.lambda() * tau;
    let mean = (env.rate() - env.dividend_yield() - p.lambda() * p.mu_j()) * tau
        - 0.5 * integrated_var
        + lt * p.jump_log_mean();
    let var = integrated_var + lt * p.jump_second_moment();

    // Var(∫V) ≈ σ_v² v̄ ∫(1 - e^{-κ(τ-s)})²/κ² ds
    let shape = if kt < 1e-3 {
        tau * tau * tau / 3.0
    } else {
        let k = p.kappa();
        (tau + 2.0 * (-kt).exp_m1() / k - (-2.0 * kt).exp_m1() / (2.0 * k)) / (k * k)
    };
    let var_of_var = p.sigma_v() * p.sigma_v() * avg.max(p.theta()) * shape;
    let (m, s2) = (p.jump_log_mean(), p.sigma_j() * p.sigma_j());
    let jump_fourth = m.powi(4) + 6.0 * m * m * s2 + 3.0 * s2 * s2;
    let c4 = 3.0 * var_of_var + lt * jump_fourth;
    Cumulants {
        mean,
        var,
        c4,
        diffusive_var: integrated_var,
    }
}

struct Cumulants {
    mean: f64,
    var: f64,
    c4: f64,
    /// Variance of the no-jump component, the narrowest feature of the density.
    diffusive_var: f64,
}

/// `ln 1e-10`: bound on the omitted series tail, relative to spot.
const SERIES_TAIL_LOG: f64 = -23.0;

/// Times the truncation interval may grow by half when parity fails.
const MAX_WIDENINGS: usize = 4;

/// Largest series length the resolution rule may request.
pub const MAX_SERIES_TERMS: usize = 1 << 14;

/// Series length that resolves a Gaussian feature of standard deviation `sd`
/// on an interval of width `width`: the last frequency must reach `9/sd`,
/// where the Gaussian factor `exp(-u²sd²/2)` is below `e^{-40}`.
fn resolving_terms(width: f64, sd: f64, floor: usize) -> usize {
    let needed = 9.0 * width / (std::f64::consts::PI * sd.max(1e-12));
    if !(needed.is_finite()) || needed >= MAX_SERIES_TERMS as f64 {
        return MAX_SERIES_TERMS.max(floor);
    }
    (needed.ceil() as usize).next_power_of_two().max(floor)
}

/// Prices every strike of one maturity from a single set of series
/// coefficients.
#[derive(Debug, Clone)]
pub struct BatesSlicePricer {
    density: CosDensity,
    maturity: f64,
}

impl BatesSlicePricer {
    pub fn new(
        params: &BatesParams,
        env: &MarketEnv,
        maturity: f64,
        settings: &PricerSettings,
    ) -> Result<Self> {
        settings.validate()?;
        if !(maturity.is_finite() && maturity > 0.0) {
            return Err(Error::param("maturity", maturity, "must be finite and > 0"));
        }
        let c = log_return_cumulants(params, env, maturity);
        let drift = env.rate() - env.dividend_yield();
        let mut half = settings.truncation_width * (c.var + c.c4.sqrt()).sqrt().max(1e-8);
        let build = |half: f64| {
            let width = 2.0 * half;
            let mut terms =
                resolving_terms(width, c.diffusive_var.sqrt(), settings.fourier_grid_size);
            // A variance process pinned near zero makes the density sharper
            // than its diffusive variance suggests. Payoff coefficients of a
            // kinked payoff fall like 1/u², so the omitted tail is bounded by
            // |φ(u_N)|/u_N² relative to spot.
            while terms < MAX_SERIES_TERMS {
                let u = std::f64::consts::PI * terms as f64 / width;
                let log_phi = charfn::log_cf(params, drift, maturity, Complex64::new(u, 0.0)).re;
                if log_phi - 2.0 * u.ln() < SERIES_TAIL_LOG {
                    break;
                }
                terms *= 2;
            }
            CosDensity::new(
                |u| charfn::log_cf(params, drift, maturity, u),
                env,
                maturity,
                c.mean - half,
                c.mean + half,
                terms,
            )
        };
        // Heavy tails leak mass past a cumulant-based interval; the direct
        // call and put then disagree with parity, so widen until they agree.
        let forward = env.forward(maturity);
        let mut density = build(half);
        for _ in 0..MAX_WIDENINGS {
            if density.parity_residual(forward).abs() <= PARITY_WARNING_TOLERANCE * env.spot() {
                break;
            }
            half *= 1.5;
            density = build(half);
        }
        Ok(Self { density, maturity })
    }

    pub fn maturity(&self) -> f64 {
        self.maturity
    }

    /// Price of a European option; negative series noise is floored at zero.
    pub fn price(&self, strike: f64, kind: OptionKind) -> f64 {
        self.density.price(strike, kind).max(0.0)
    }

    pub fn parity_residual(&self, strike: f64) -> f64 {
        self.density.parity_residual(strike)
    }
}

/// Price together with a truncation diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceOutcome {
    pub price: f64,
    /// Parity residual of the directly integrated call and put, divided by spot.
    pub parity_residual: f64,
    /// Residual above [`PARITY_WARNING_TOLERANCE`]: the truncation interval or
    /// series length is probably too small.
    pub truncation_warning: bool,
}

/// European option price under the Bates model.
pub fn price_european(
    params: &BatesParams,
    env: &MarketEnv,
    strike: f64,
    maturity: f64,
    kind: OptionKind,
    settings: &PricerSettings,
) -> Result<f64> {
    Ok(price_european_checked(params, env, strike, maturity, kind, settings)?.price)
}

/// As [`price_european`], also reporting the parity-based truncation check.
pub fn price_european_checked(
    params: &BatesParams,
    env: &MarketEnv,
    strike: f64,
    maturity: f64,
    kind: OptionKind,
    settings: &PricerSettings,
) -> Result<PriceOutcome> {
    if !(strike.is_finite() && strike > 0.0) {
        return Err(Error::param("strike", strike, "must be finite and > 0"));
    }
    let slice = BatesSlicePricer::new(params, env, maturity, settings)?;
    let residual = slice.parity_residual(strike).abs() / env.spot();
    Ok(PriceOutcome {
        price: slice.price(strike, kind),
        parity_residual: residual,
        truncation_warning: residual > PARITY_WARNING_TOLERANCE,
    })
}
