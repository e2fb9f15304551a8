//! Simple jump diffusion reductions: matching an observed variance
//! level pins λ as a function of J, so the two-parameter fit becomes a line
//! search along that locus.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::IV_FAILURE_PENALTY;
use crate::pricing::{implied_vol_with_guess, sjd_price};
use crate::types::{SjdParams, VolSurface};
use crate::variance::one_plus_j_minus_exp;

/// λ as a function of J along the locus that reproduces a target level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "target", rename_all = "snake_case")]
pub enum LambdaRule {
    /// `λ(J) = (VS - σ²)/J²`
    VarianceSwap { level: f64, sigma: f64 },
    /// `λ(J) = (σ² - VIX²)/(2(1 + J - e^J))`
    VixSquared { level: f64, sigma: f64 },
}

/// Locus of `(λ, J)` pairs matching the variance-swap rate `vs_mkt`.
pub fn sjd_lambda_from_vs(vs_mkt: f64, sigma: f64) -> Result<LambdaRule> {
    check_sigma(sigma)?;
    if !vs_mkt.is_finite() {
        return Err(Error::param("vs_mkt", vs_mkt, "must be finite"));
    }
    if vs_mkt <= sigma * sigma {
        return Err(Error::NoJumpVariance {
            level: vs_mkt,
            sigma2: sigma * sigma,
        });
    }
    Ok(LambdaRule::VarianceSwap {
        level: vs_mkt,
        sigma,
    })
}

/// Locus of `(λ, J)` pairs matching the squared VIX `vix2_mkt`. Since
/// `1 + J - e^J < 0` for every `J ≠ 0`, a level below `σ²` would need a
/// negative intensity.
pub fn sjd_lambda_from_vix(vix2_mkt: f64, sigma: f64) -> Result<LambdaRule> {
    check_sigma(sigma)?;
    if !vix2_mkt.is_finite() {
        return Err(Error::param("vix2_mkt", vix2_mkt, "must be finite"));
    }
    let sigma2 = sigma * sigma;
    if vix2_mkt < sigma2 {
        return Err(Error::InconsistentVix {
            level: vix2_mkt,
            sigma2,
        });
    }
    if vix2_mkt == sigma2 {
        return Err(Error::NoJumpVariance {
            level: vix2_mkt,
            sigma2,
        });
    }
    Ok(LambdaRule::VixSquared {
        level: vix2_mkt,
        sigma,
    })
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma.is_finite() && sigma > 0.0 {
        Ok(())
    } else {
        Err(Error::param("sigma", sigma, "must be finite and > 0"))
    }
}

impl LambdaRule {
    pub fn sigma(&self) -> f64 {
        match *self {
            LambdaRule::VarianceSwap { sigma, .. } | LambdaRule::VixSquared { sigma, .. } => sigma,
        }
    }

    pub fn target(&self) -> f64 {
        match *self {
            LambdaRule::VarianceSwap { level, .. } | LambdaRule::VixSquared { level, .. } => level,
        }
    }

    pub fn lambda(&self, jump: f64) -> Result<f64> {
        if jump == 0.0 {
            return Err(Error::SingularJump);
        }
        if !jump.is_finite() {
            return Err(Error::param("jump", jump, "must be finite"));
        }
        let sigma2 = self.sigma() * self.sigma();
        Ok(match *self {
            LambdaRule::VarianceSwap { level, .. } => (level - sigma2) / (jump * jump),
            LambdaRule::VixSquared { level, .. } => {
                (sigma2 - level) / (2.0 * one_plus_j_minus_exp(jump))
            }
        })
    }

    /// SJD parameters on the locus at `jump`.
    pub fn params(&self, jump: f64) -> Result<SjdParams> {
        SjdParams::new(self.sigma(), self.lambda(jump)?, jump)
    }
}

/// Sides of the J search; each side is a closed interval excluding zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JBracket {
    pub negative: Option<(f64, f64)>,
    pub positive: Option<(f64, f64)>,
}

impl Default for JBracket {
    fn default() -> Self {
        Self {
            negative: Some((-0.5, -1e-4)),
            positive: Some((1e-4, 0.5)),
        }
    }
}

impl JBracket {
    fn sides(&self) -> Result<Vec<(f64, f64)>> {
        let mut out = Vec::new();
        if let Some((a, b)) = self.negative {
            if !(a < b && b < 0.0 && a.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "bad negative J side [{a}, {b}]"
                )));
            }
            out.push((a, b));
        }
        if let Some((a, b)) = self.positive {
            if !(0.0 < a && a < b && b.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "bad positive J side [{a}, {b}]"
                )));
            }
            out.push((a, b));
        }
        if out.is_empty() {
            return Err(Error::InvalidInput("empty J bracket".into()));
        }
        Ok(out)
    }
}

/// Result of the locus line search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SjdFit {
    pub lambda: f64,
    pub jump: f64,
    pub sse: f64,
    /// False when the best point sits on a bracket end.
    pub converged: bool,
}

/// Equal-weight implied-vol SSE of SJD parameters against the surface.
pub fn sjd_iv_sse(params: &SjdParams, surface: &VolSurface) -> Result<f64> {
    let env = surface.env();
    let mut sse = 0.0;
    for (tau, quotes) in surface.slices() {
        for q in quotes {
            let market = q
                .implied_vol
                .ok_or_else(|| Error::InvalidInput("quote without implied vol".into()))?;
            let price = sjd_price(params, env, q.strike, tau, q.kind)?;
            sse += match implied_vol_with_guess(env, q.strike, tau, q.kind, price, Some(market)) {
                Ok(v) => (v - market).powi(2),
                Err(_) => IV_FAILURE_PENALTY,
            };
        }
    }
    Ok(sse)
}

const SCAN_POINTS: usize = 64;
const J_TOLERANCE: f64 = 1e-12;

/// Minimizes the implied-vol SSE over J with `λ = rule(J)`: a grid scan on
/// each side of the bracket, refined by Brent's method around the best grid
/// point; the side with the lower objective wins.
pub fn sjd_calibrate_univariate(
    surface: &VolSurface,
    sigma: f64,
    rule: &LambdaRule,
    bracket: &JBracket,
) -> Result<SjdFit> {
    if (rule.sigma() - sigma).abs() > 1e-15 * sigma {
        return Err(Error::InvalidInput(format!(
            "rule built for sigma {} but search uses {sigma}",
            rule.sigma()
        )));
    }
    let objective = |j: f64| -> f64 {
        rule.params(j)
            .and_then(|p| sjd_iv_sse(&p, surface))
            .unwrap_or(f64::INFINITY)
    };
    let mut best: Option<SjdFit> = None;
    for (lo, hi) in bracket.sides()? {
        let grid: Vec<f64> = (0..SCAN_POINTS)
            .map(|i| lo + (hi - lo) * i as f64 / (SCAN_POINTS - 1) as f64)
            .collect();
        let vals: Vec<f64> = grid.iter().map(|&j| objective(j)).collect();
        let i = (0..SCAN_POINTS)
            .min_by(|&a, &b| vals[a].total_cmp(&vals[b]))
            .expect("nonempty grid");
        let a = grid[i.saturating_sub(1)];
        let b = grid[(i + 1).min(SCAN_POINTS - 1)];
        let (j, v) = brent_minimize(&objective, a, b, grid[i], vals[i], J_TOLERANCE);
        let (j, v) = if v <= vals[i] {
            (j, v)
        } else {
            (grid[i], vals[i])
        };
        let at_edge = (j - lo).abs() <= 1e-9 * (hi - lo) || (hi - j).abs() <= 1e-9 * (hi - lo);
        let fit = SjdFit {
            lambda: rule.lambda(j)?,
            jump: j,
            sse: v,
            converged: v.is_finite() && !at_edge,
        };
        if best.is_none_or(|b| fit.sse < b.sse) {
            best = Some(fit);
        }
    }
    let best = best.expect("at least one side");
    if !best.sse.is_finite() {
        return Err(Error::CalibrationFailed(
            "no J in the bracket gives a finite objective".into(),
        ));
    }
    Ok(best)
}

/// Brent's parabolic-interpolation minimizer on `[a, b]`, started at `x`.
fn brent_minimize(
    f: &impl Fn(f64) -> f64,
    mut a: f64,
    mut b: f64,
    x0: f64,
    f0: f64,
    tol: f64,
) -> (f64, f64) {
    const GOLD: f64 = 0.381_966_011_250_105_1;
    let (mut x, mut w, mut v) = (x0, x0, x0);
    let (mut fx, mut fw, mut fv) = (f0, f0, f0);
    let (mut d, mut e): (f64, f64) = (0.0, 0.0);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let tol1 = tol + 1e-10 * x.abs();
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            if p.abs() < (0.5 * q * e).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if x < m { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= m { a - x } else { b - x };
            d = GOLD * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else {
            x + tol1.copysign(d)
        };
        let fu = f(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            (v, fv, w, fw, x, fx) = (w, fw, x, fx, u, fu);
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                (v, fv, w, fw) = (w, fw, u, fu);
            } else if fu <= fv || v == x || v == w {
                (v, fv) = (u, fu);
            }
        }
    }
    (x, fx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn locus_identities() {
        let vs = sjd_lambda_from_vs(0.0281, 0.16).unwrap();
        assert!((vs.lambda(-0.05).unwrap() - 1.0).abs() < 1e-12);
        let vix2 = 0.0256 - 2.0 * (1.0 - 0.05 - (-0.05f64).exp());
        let vx = sjd_lambda_from_vix(vix2, 0.16).unwrap();
        assert!((vx.lambda(-0.05).unwrap() - 1.0).abs() < 1e-12);
        let pos = vx.lambda(0.05).unwrap();
        let expect = (0.0256 - vix2) / (2.0 * (1.05 - 0.05f64.exp()));
        assert!((pos - expect).abs() < 1e-12 * expect);
        for j in [-0.4, -0.01, 0.003, 0.3] {
            let l = vs.lambda(j).unwrap();
            assert!((l * j * j + 0.0256 - 0.0281).abs() < 1e-15);
            let l = vx.lambda(j).unwrap();
            assert!((0.0256 - 2.0 * l * one_plus_j_minus_exp(j) - vix2).abs() < 1e-15);
        }
    }

    #[test]
    fn singular_and_degenerate_levels() {
        let vs = sjd_lambda_from_vs(0.0281, 0.16).unwrap();
        assert_eq!(vs.lambda(0.0), Err(Error::SingularJump));
        assert!(matches!(
            sjd_lambda_from_vs(0.0256, 0.16),
            Err(Error::NoJumpVariance { .. })
        ));
        assert!(matches!(
            sjd_lambda_from_vix(0.02, 0.16),
            Err(Error::InconsistentVix { .. })
        ));
        assert!(sjd_lambda_from_vs(0.03, 0.0).is_err());
    }

    #[test]
    fn brent_on_parabola() {
        let (x, fx) = brent_minimize(
            &|x: f64| (x - 0.3).powi(2) + 1.0,
            0.0,
            1.0,
            0.9,
            1.36,
            1e-12,
        );
        assert!((x - 0.3).abs() < 1e-7 && (fx - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bracket_validation() {
        let b = JBracket {
            negative: Some((-0.5, 0.1)),
            positive: None,
        };
        assert!(b.sides().is_err());
        let none = JBracket {
            negative: None,
            positive: None,
        };
        assert!(none.sides().is_err());
    }
}
