//! Variance-swap rates, squared VIX, log-contract multipliers and
//! model-free replication of the VIX from a discrete strike grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{BatesParams, OptionKind, OptionQuote, SjdParams};

/// Strikes of one maturity with the out-of-the-money price at each: puts
/// below the forward, calls at or above it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrikeGrid {
    strikes: Vec<f64>,
    otm_prices: Vec<f64>,
    forward: f64,
    discount_factor: f64,
}

impl StrikeGrid {
    /// Prices are taken as quoted, i.e. with no undiscounting.
    pub fn new(strikes: Vec<f64>, otm_prices: Vec<f64>, forward: f64) -> Result<Self> {
        if strikes.len() != otm_prices.len() {
            return Err(Error::InvalidInput(format!(
                "{} strikes but {} prices",
                strikes.len(),
                otm_prices.len()
            )));
        }
        if strikes.len() < 2 {
            return Err(Error::InvalidInput(
                "a strike grid needs at least two strikes".into(),
            ));
        }
        if !(forward.is_finite() && forward > 0.0) {
            return Err(Error::param("forward", forward, "must be finite and > 0"));
        }
        for (i, (&k, &p)) in strikes.iter().zip(&otm_prices).enumerate() {
            if !(k.is_finite() && k > 0.0) {
                return Err(Error::param("strike", k, "must be finite and > 0"));
            }
            if !(p.is_finite() && p >= 0.0) {
                return Err(Error::param("otm_price", p, "must be finite and >= 0"));
            }
            if i > 0 && k <= strikes[i - 1] {
                return Err(Error::InvalidInput(format!(
                    "strikes must be strictly increasing (duplicate or unsorted at {k})"
                )));
            }
        }
        Ok(Self {
            strikes,
            otm_prices,
            forward,
            discount_factor: 1.0,
        })
    }

    /// Divide prices by `e^{-rτ}` during replication so the result is the
    /// forward value of the log contract.
    pub fn with_discount_factor(mut self, discount_factor: f64) -> Result<Self> {
        if !(discount_factor.is_finite() && discount_factor > 0.0) {
            return Err(Error::param(
                "discount_factor",
                discount_factor,
                "must be finite and > 0",
            ));
        }
        self.discount_factor = discount_factor;
        Ok(self)
    }

    /// Builds the grid from the quotes of one maturity. Where the quote at a
    /// strike is on the wrong side of the forward it is converted through
    /// put–call parity; if both kinds are present the OTM one is used.
    pub fn from_quotes(quotes: &[OptionQuote], forward: f64, discount_factor: f64) -> Result<Self> {
        let mut sorted: Vec<&OptionQuote> = quotes.iter().collect();
        sorted.sort_by(|a, b| a.strike.total_cmp(&b.strike));
        let mut strikes: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut prices: Vec<f64> = Vec::with_capacity(sorted.len());
        for q in sorted {
            let wanted = if q.strike < forward {
                OptionKind::Put
            } else {
                OptionKind::Call
            };
            let price = if q.kind == wanted {
                q.mid
            } else {
                let parity = discount_factor * (forward - q.strike);
                match q.kind {
                    OptionKind::Call => q.mid - parity,
                    OptionKind::Put => q.mid + parity,
                }
                .max(0.0)
            };
            match strikes.last() {
                Some(&last) if last == q.strike => {
                    if q.kind == wanted {
                        *prices.last_mut().unwrap() = price;
                    }
                }
                _ => {
                    strikes.push(q.strike);
                    prices.push(price);
                }
            }
        }
        StrikeGrid::new(strikes, prices, forward)?.with_discount_factor(discount_factor)
    }

    pub fn strikes(&self) -> &[f64] {
        &self.strikes
    }

    pub fn otm_prices(&self) -> &[f64] {
        &self.otm_prices
    }

    pub fn forward(&self) -> f64 {
        self.forward
    }

    pub fn discount_factor(&self) -> f64 {
        self.discount_factor
    }
}

/// Per-strike widths `Δ(K_j)`: one-sided at the ends, centred inside.
pub fn strike_weights(grid: &StrikeGrid) -> Vec<f64> {
    let k = &grid.strikes;
    let n = k.len();
    (0..n)
        .map(|j| match j {
            0 => k[1] - k[0],
            j if j == n - 1 => k[n - 1] - k[n - 2],
            j => 0.5 * (k[j + 1] - k[j - 1]),
        })
        .collect()
}

/// Replicated squared VIX with a truncation diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VixReplication {
    /// Annualized variance level.
    pub vix_squared: f64,
    pub puts_used: usize,
    pub calls_used: usize,
    /// No strikes on one side of the forward: the value is biased low.
    pub one_sided: bool,
}

/// `(2/τ) Σ_j Δ(K_j) Q(K_j) / K_j²` over the grid, with `Q` the OTM price.
pub fn replicate_vix_squared(grid: &StrikeGrid, maturity: f64) -> Result<VixReplication> {
    if !(maturity.is_finite() && maturity > 0.0) {
        return Err(Error::param("maturity", maturity, "must be finite and > 0"));
    }
    let widths = strike_weights(grid);
    let mut sum = 0.0;
    for ((&k, &p), &dk) in grid.strikes.iter().zip(&grid.otm_prices).zip(&widths) {
        sum += dk * p / (k * k);
    }
    let puts_used = grid.strikes.iter().filter(|&&k| k < grid.forward).count();
    let calls_used = grid.strikes.len() - puts_used;
    Ok(VixReplication {
        vix_squared: 2.0 / maturity * sum / grid.discount_factor,
        puts_used,
        calls_used,
        one_sided: puts_used == 0 || calls_used == 0,
    })
}

/// `σ² + λJ²`.
pub fn sjd_variance_swap(params: &SjdParams) -> f64 {
    let (s, l, j) = (params.sigma(), params.lambda(), params.jump());
    s * s + l * j * j
}

/// `1 + J - e^J` without cancellation for small `J`.
pub(crate) fn one_plus_j_minus_exp(j: f64) -> f64 {
    j - j.exp_m1()
}

/// `σ² - 2λ(1 + J - e^J)`.
pub fn sjd_vix_squared(params: &SjdParams) -> f64 {
    let s = params.sigma();
    s * s - 2.0 * params.lambda() * one_plus_j_minus_exp(params.jump())
}

fn check_maturity(maturity: f64) -> Result<()> {
    if maturity.is_finite() && maturity > 0.0 {
        Ok(())
    } else {
        Err(Error::param("maturity", maturity, "must be finite and > 0"))
    }
}

/// Expected integrated diffusive variance over `[0, τ]`, annualized.
fn bates_diffusive_variance(p: &BatesParams, tau: f64) -> f64 {
    let x = p.kappa() * tau;
    // (1 - e^{-x})/x
    let decay = if x < 1e-10 {
        1.0 - 0.5 * x
    } else {
        -(-x).exp_m1() / x
    };
    p.theta() + (p.v0() - p.theta()) * decay
}

/// Variance-swap rate under Bates: diffusive leg plus `λ E[J²]`.
pub fn bates_variance_swap(params: &BatesParams, maturity: f64) -> Result<f64> {
    check_maturity(maturity)?;
    Ok(bates_diffusive_variance(params, maturity) + params.lambda() * params.jump_second_moment())
}

/// `VS - VIX² = 2λ(ln(1 + μ_J) - μ_J + m²/2)`, with `m` the jump log-mean.
pub fn vs_vix_spread(params: &BatesParams, maturity: f64) -> Result<f64> {
    check_maturity(maturity)?;
    Ok(jump_spread(params))
}

fn jump_spread(p: &BatesParams) -> f64 {
    if p.lambda() == 0.0 {
        return 0.0;
    }
    let m = p.jump_log_mean();
    // ln(1 + μ) - μ, accurate for small μ
    let mu = p.mu_j();
    let log_gap = if mu.abs() < 1e-4 {
        mu * mu * (-0.5 + mu * (1.0 / 3.0 - 0.25 * mu))
    } else {
        mu.ln_1p() - mu
    };
    2.0 * p.lambda() * (log_gap + 0.5 * m * m)
}

/// Squared VIX under Bates. The closed form is nonnegative for valid
/// parameters; a negative value from rounding is reported as non-physical.
pub fn bates_vix_squared(params: &BatesParams, maturity: f64) -> Result<f64> {
    let vs = bates_variance_swap(params, maturity)?;
    let v = vs - jump_spread(params);
    if v < 0.0 {
        return Err(Error::NonPhysicalVix(v));
    }
    Ok(v)
}

/// Multiplier `Q` on the log contract that recovers the variance-swap rate,
/// `Q = 2 VS / VIX²`.
pub fn log_contract_multiplier(params: &BatesParams, maturity: f64) -> Result<f64> {
    let vs = bates_variance_swap(params, maturity)?;
    if params.lambda() == 0.0 {
        return Ok(2.0);
    }
    let vix2 = vs - jump_spread(params);
    if vix2 <= 0.0 {
        return Err(Error::NonPhysicalVix(vix2));
    }
    Ok(2.0 * vs / vix2)
}
