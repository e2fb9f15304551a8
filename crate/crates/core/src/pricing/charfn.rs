//! Characteristic function of the Bates log return `ln(S_τ/S_0)`.
//!
//! The Heston part uses the rotation-count-free ("little trap") form. The
//! `1/σ_v²` factors are cancelled analytically so the function stays exact
//! as the vol-of-vol goes to zero.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::types::{BatesParams, MarketEnv};

/// `E[exp(iu ln(S_τ/S_0))]` under the risk-neutral Bates dynamics with
/// drift `r - q`.
pub fn bates_char_fn(
    params: &BatesParams,
    env: &MarketEnv,
    maturity: f64,
    u: Complex64,
) -> Result<Complex64> {
    if !(maturity.is_finite() && maturity > 0.0) {
        return Err(Error::param("maturity", maturity, "must be finite and > 0"));
    }
    if !(u.re.is_finite() && u.im.is_finite()) {
        return Err(Error::InvalidInput(
            "non-finite characteristic argument".into(),
        ));
    }
    Ok(log_cf(params, env.rate() - env.dividend_yield(), maturity, u).exp())
}

/// Logarithm of the characteristic function; `drift` is `r - q`.
#[inline]
pub(crate) fn log_cf(p: &BatesParams, drift: f64, tau: f64, u: Complex64) -> Complex64 {
    let iu = Complex64::new(-u.im, u.re);
    heston_log_cf(p, tau, u, iu) + jump_log_cf(p, tau, u, iu) + iu * (drift * tau)
}

#[inline]
fn heston_log_cf(p: &BatesParams, tau: f64, u: Complex64, iu: Complex64) -> Complex64 {
    let kappa = p.kappa();
    let s = p.sigma_v();
    let s2 = s * s;
    // u^2 + iu; vanishes at u = 0 and u = -i.
    let q = u * u + iu;
    let b = Complex64::new(kappa, 0.0) - iu * (p.rho() * s);
    let d = (b * b + q * s2).sqrt();
    let bpd = b + d;
    // (b - d)/σ² = -q/(b + d)
    let bmd_s2 = -q / bpd;
    let g = bmd_s2 * s2 / bpd;
    let e = (-d * tau).exp();
    let one_m_e = -expm1(-d * tau);
    let dterm = bmd_s2 * one_m_e / (Complex64::new(1.0, 0.0) - g * e);
    // ln((1 - g e)/(1 - g)) = ln(1 + z), z = g (1 - e)/(1 - g)
    let z_s2 = bmd_s2 / bpd * one_m_e / (Complex64::new(1.0, 0.0) - g);
    let z = z_s2 * s2;
    let log_s2 = z_s2 * log1p_over(z);
    let cterm = kappa * p.theta() * (bmd_s2 * tau - 2.0 * log_s2);
    cterm + dterm * p.v0()
}

#[inline]
fn jump_log_cf(p: &BatesParams, tau: f64, u: Complex64, iu: Complex64) -> Complex64 {
    let lambda = p.lambda();
    if lambda == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let m = p.jump_log_mean();
    let sj2 = p.sigma_j() * p.sigma_j();
    let phi_j = (iu * m - 0.5 * sj2 * u * u).exp();
    lambda * tau * (phi_j - 1.0) - iu * (lambda * p.mu_j() * tau)
}

/// `exp(w) - 1` without cancellation for small `|w|`.
#[inline]
fn expm1(w: Complex64) -> Complex64 {
    if w.norm_sqr() < 1e-4 {
        // Taylor series through w^6; remainder below 2e-18 for |w| < 1e-2.
        let mut term = w;
        let mut sum = w;
        for k in 2..=6 {
            term = term * w / k as f64;
            sum += term;
        }
        sum
    } else {
        w.exp() - 1.0
    }
}

/// `ln(1 + z)/z`, continuous at `z = 0`.
#[inline]
fn log1p_over(z: Complex64) -> Complex64 {
    if z.norm_sqr() < 1e-6 {
        // 1 - z/2 + z^2/3 - z^3/4 + z^4/5
        let one = Complex64::new(1.0, 0.0);
        one - z * (0.5 - z * (1.0 / 3.0 - z * (0.25 - z * 0.2)))
    } else {
        (z + 1.0).ln() / z
    }
}
