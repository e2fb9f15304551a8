use super::black_scholes::{black_undiscounted, black_vega_undiscounted};
use crate::error::{Error, Result};
use crate::types::{MarketEnv, OptionKind};

/// Primary search interval for implied volatility.
pub const IV_LOWER: f64 = 1e-4;
pub const IV_UPPER: f64 = 5.0;

// Fallback interval for prices that sit near the edge of the no-arbitrage band.
const IV_LOWER_WIDE: f64 = 1e-8;
const IV_UPPER_WIDE: f64 = 20.0;

const MAX_ITER: usize = 200;

/// Black–Scholes implied volatility of a European option price.
pub fn implied_vol(
    env: &MarketEnv,
    strike: f64,
    maturity: f64,
    kind: OptionKind,
    price: f64,
) -> Result<f64> {
    implied_vol_with_guess(env, strike, maturity, kind, price, None)
}

/// As [`implied_vol`], starting the safeguarded Newton iteration at `guess`.
pub fn implied_vol_with_guess(
    env: &MarketEnv,
    strike: f64,
    maturity: f64,
    kind: OptionKind,
    price: f64,
    guess: Option<f64>,
) -> Result<f64> {
    if !(strike.is_finite() && strike > 0.0) {
        return Err(Error::param("strike", strike, "must be finite and > 0"));
    }
    if !(maturity.is_finite() && maturity > 0.0) {
        return Err(Error::param("maturity", maturity, "must be finite and > 0"));
    }
    if !price.is_finite() {
        return Err(Error::param("price", price, "must be finite"));
    }
    let df = env.discount(maturity);
    let fwd = env.forward(maturity);
    let target = price / df;
    let (lower, upper) = match kind {
        OptionKind::Call => ((fwd - strike).max(0.0), fwd),
        OptionKind::Put => ((strike - fwd).max(0.0), strike),
    };
    if !(target > lower && target < upper) {
        return Err(Error::UnattainablePrice {
            kind: kind.as_str(),
            price,
            lower: lower * df,
            upper: upper * df,
        });
    }
    let solver = Solver {
        fwd,
        strike,
        maturity,
        kind,
        target,
    };
    solver
        .solve(IV_LOWER, IV_UPPER, guess)
        .or_else(|| solver.solve(IV_LOWER_WIDE, IV_UPPER_WIDE, guess))
        .ok_or(Error::IvNoConvergence {
            price,
            iterations: MAX_ITER,
        })
}

struct Solver {
    fwd: f64,
    strike: f64,
    maturity: f64,
    kind: OptionKind,
    target: f64,
}

impl Solver {
    #[inline]
    fn residual(&self, vol: f64) -> f64 {
        black_undiscounted(self.fwd, self.strike, vol * self.maturity.sqrt(), self.kind)
            - self.target
    }

    /// Root of the residual on `[lo, hi]`, or `None` if it is not bracketed.
    fn solve(&self, mut lo: f64, mut hi: f64, guess: Option<f64>) -> Option<f64> {
        if self.residual(lo) > 0.0 || self.residual(hi) < 0.0 {
            return None;
        }
        let tol = 1e-14 * self.target;
        let mut vol = match guess {
            Some(g) if g > lo && g < hi => g,
            _ => self.initial_guess().clamp(lo, hi),
        };
        for _ in 0..MAX_ITER {
            let f = self.residual(vol);
            if f.abs() <= tol {
                return Some(vol);
            }
            if f > 0.0 {
                hi = vol;
            } else {
                lo = vol;
            }
            let vega = black_vega_undiscounted(
                self.fwd,
                self.strike,
                vol * self.maturity.sqrt(),
                self.maturity,
            );
            let newton = vol - f / vega;
            let next = if vega > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if (next - vol).abs() <= 4.0 * f64::EPSILON * vol || hi - lo <= 4.0 * f64::EPSILON * hi
            {
                return Some(next);
            }
            vol = next;
        }
        None
    }

    /// Brenner–Subrahmanyam style start, corrected for moneyness.
    fn initial_guess(&self) -> f64 {
        let x = (self.fwd / self.strike).ln();
        let atm = (2.0 * std::f64::consts::PI / self.maturity).sqrt() * self.target / self.fwd;
        let moneyness = (2.0 * x.abs() / self.maturity).sqrt();
        atm.max(moneyness).max(0.05)
    }
}
