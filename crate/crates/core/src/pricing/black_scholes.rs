use std::f64::consts::SQRT_2;

use crate::error::{Error, Result};
use crate::types::{MarketEnv, OptionKind};

/// Standard normal CDF.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Undiscounted Black price on the forward with total standard deviation
/// `sd = σ√τ`.
#[inline]
pub(crate) fn black_undiscounted(forward: f64, strike: f64, sd: f64, kind: OptionKind) -> f64 {
    if sd <= 0.0 {
        return match kind {
            OptionKind::Call => (forward - strike).max(0.0),
            OptionKind::Put => (strike - forward).max(0.0),
        };
    }
    let d1 = (forward / strike).ln() / sd + 0.5 * sd;
    let d2 = d1 - sd;
    // cancellation leaves denormal negatives far out of the money
    let price = match kind {
        OptionKind::Call => forward * norm_cdf(d1) - strike * norm_cdf(d2),
        OptionKind::Put => strike * norm_cdf(-d2) - forward * norm_cdf(-d1),
    };
    price.max(0.0)
}

/// Undiscounted Black vega with respect to `σ` (not `σ√τ`).
#[inline]
pub(crate) fn black_vega_undiscounted(forward: f64, strike: f64, sd: f64, maturity: f64) -> f64 {
    let d1 = (forward / strike).ln() / sd + 0.5 * sd;
    forward * norm_pdf(d1) * maturity.sqrt()
}

fn check_inputs(env: &MarketEnv, strike: f64, maturity: f64) -> Result<()> {
    if !(strike.is_finite() && strike > 0.0) {
        return Err(Error::param("strike", strike, "must be finite and > 0"));
    }
    if !(maturity.is_finite() && maturity > 0.0) {
        return Err(Error::param("maturity", maturity, "must be finite and > 0"));
    }
    debug_assert!(env.spot() > 0.0);
    Ok(())
}

/// Black–Scholes price with continuous rate and dividend yield.
pub fn bs_price(
    env: &MarketEnv,
    strike: f64,
    maturity: f64,
    vol: f64,
    kind: OptionKind,
) -> Result<f64> {
    check_inputs(env, strike, maturity)?;
    if !(vol.is_finite() && vol > 0.0) {
        return Err(Error::param("vol", vol, "must be finite and > 0"));
    }
    let fwd = env.forward(maturity);
    let sd = vol * maturity.sqrt();
    Ok(env.discount(maturity) * black_undiscounted(fwd, strike, sd, kind))
}

/// Black–Scholes vega `∂C/∂σ`.
pub fn bs_vega(env: &MarketEnv, strike: f64, maturity: f64, vol: f64) -> Result<f64> {
    check_inputs(env, strike, maturity)?;
    if !(vol.is_finite() && vol > 0.0) {
        return Err(Error::param("vol", vol, "must be finite and > 0"));
    }
    let fwd = env.forward(maturity);
    Ok(env.discount(maturity)
        * black_vega_undiscounted(fwd, strike, vol * maturity.sqrt(), maturity))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env() -> MarketEnv {
        MarketEnv::new(100.0, 0.02, 0.03).unwrap()
    }

    #[test]
    fn far_out_of_the_money_prices_are_not_negative() {
        for k in [1.0, 2.0, 5.0, 400.0, 1000.0] {
            let kind = OptionKind::otm_for(k, 100.0);
            let p = bs_price(&env(), k, 0.05, 0.08, kind).unwrap();
            assert!(p >= 0.0, "{k}: {p}");
        }
    }

    // Frozen from adaptive quadrature of the discounted lognormal payoff
    // expectation (scipy.integrate.quad, abs/rel tol 1e-14).
    const QUAD_CALL_ATM_1Y: f64 = 7.2910138157938045;

    #[test]
    fn matches_numerical_quadrature() {
        let c = bs_price(&env(), 100.0, 1.0, 0.2, OptionKind::Call).unwrap();
        assert!((c - QUAD_CALL_ATM_1Y).abs() < 1e-10, "{c}");
    }

    #[test]
    fn zero_vol_limit_is_discounted_intrinsic() {
        let e = MarketEnv::new(100.0, 0.05, 0.0).unwrap();
        let fwd = e.forward(1.0);
        let c = bs_price(&e, 95.0, 1.0, 1e-9, OptionKind::Call).unwrap();
        assert!((c - e.discount(1.0) * (fwd - 95.0)).abs() < 1e-12);
    }

    #[test]
    fn tiny_strike_call_is_dividend_discounted_spot() {
        let c = bs_price(&env(), 1e-12, 1.0, 0.2, OptionKind::Call).unwrap();
        assert!((c - 100.0 * (-0.03f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn put_call_parity_holds() {
        let e = env();
        for &k in &[50.0, 90.0, 100.0, 130.0, 300.0] {
            for &t in &[0.01, 0.5, 3.0] {
                let c = bs_price(&e, k, t, 0.35, OptionKind::Call).unwrap();
                let p = bs_price(&e, k, t, 0.35, OptionKind::Put).unwrap();
                let rhs = e.spot() * e.dividend_discount(t) - k * e.discount(t);
                assert!((c - p - rhs).abs() < 1e-12 * e.spot(), "K={k} t={t}");
            }
        }
    }

    #[test]
    fn monotone_in_vol() {
        let e = env();
        let mut last = 0.0;
        for i in 1..50 {
            let p = bs_price(&e, 110.0, 0.5, 0.02 * i as f64, OptionKind::Call).unwrap();
            assert!(p > last);
            last = p;
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let e = env();
        assert!(bs_price(&e, f64::NAN, 1.0, 0.2, OptionKind::Call).is_err());
        assert!(bs_price(&e, 100.0, 0.0, 0.2, OptionKind::Call).is_err());
        assert!(bs_price(&e, 100.0, 1.0, f64::INFINITY, OptionKind::Call).is_err());
        assert!(bs_price(&e, 100.0, 1.0, -0.1, OptionKind::Put).is_err());
    }

    #[test]
    fn vega_matches_finite_difference() {
        let e = env();
        let h = 1e-6;
        let up = bs_price(&e, 105.0, 0.7, 0.25 + h, OptionKind::Call).unwrap();
        let dn = bs_price(&e, 105.0, 0.7, 0.25 - h, OptionKind::Call).unwrap();
        let v = bs_vega(&e, 105.0, 0.7, 0.25).unwrap();
        assert!(((up - dn) / (2.0 * h) - v).abs() < 1e-6);
    }
}
