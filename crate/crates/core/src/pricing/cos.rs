//! Fourier-cosine expansion of the log-return density.
//!
//! The density of `r = ln(S_τ/S_0)` on a truncated interval `[a, b]` is
//! expanded in a cosine series whose coefficients come from the
//! characteristic function. Option prices are then closed-form integrals of
//! the series against the payoff, so one set of coefficients prices every
//! strike of a maturity.

use num_complex::Complex64;

use crate::types::{MarketEnv, OptionKind};

/// Cosine-series representation of one maturity's log-return density.
#[derive(Debug, Clone)]
pub struct CosDensity {
    a: f64,
    b: f64,
    spot: f64,
    df: f64,
    div_df: f64,
    /// `u_k = kπ/(b - a)`
    freqs: Vec<f64>,
    /// Density coefficients, first term already halved.
    coeffs: Vec<f64>,
    /// Series integrals over the whole interval: total mass and `E[e^r]`.
    mass: f64,
    exp_moment: f64,
}

impl CosDensity {
    /// `log_cf` is the logarithm of the log-return characteristic function.
    /// `[a, b]` must hold all but a negligible part of the density.
    pub fn new(
        log_cf: impl Fn(Complex64) -> Complex64,
        env: &MarketEnv,
        maturity: f64,
        a: f64,
        b: f64,
        n_terms: usize,
    ) -> Self {
        let width = b - a;
        let mut freqs = Vec::with_capacity(n_terms);
        let mut coeffs = Vec::with_capacity(n_terms);
        for k in 0..n_terms {
            let u = k as f64 * std::f64::consts::PI / width;
            let phi = (log_cf(Complex64::new(u, 0.0)) - Complex64::new(0.0, u * a)).exp();
            let mut c = 2.0 / width * phi.re;
            if k == 0 {
                c *= 0.5;
            }
            freqs.push(u);
            coeffs.push(c);
        }
        let (ea, eb) = (a.exp(), b.exp());
        let mass = coeffs[0] * width;
        let exp_moment = freqs
            .iter()
            .zip(&coeffs)
            .enumerate()
            .map(|(k, (&u, &c))| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                c * (sign * eb - ea) / (1.0 + u * u)
            })
            .sum();
        Self {
            a,
            b,
            mass,
            exp_moment,
            spot: env.spot(),
            df: env.discount(maturity),
            div_df: env.dividend_discount(maturity),
            freqs,
            coeffs,
        }
    }

    /// Series integrals `(Σ c_k ∫_a^c cos(u_k(r-a)) dr, Σ c_k ∫_a^c e^r cos(u_k(r-a)) dr)`.
    fn partial_moments(&self, c: f64) -> (f64, f64) {
        let c = c.clamp(self.a, self.b);
        let span = c - self.a;
        let ec = c.exp();
        let ea = self.a.exp();
        // rotation e^{i u_1 (c - a)} advanced by complex multiplication
        let step = Complex64::from_polar(1.0, self.freqs.get(1).copied().unwrap_or(0.0) * span);
        let mut rot = Complex64::new(1.0, 0.0);
        let mut psi_sum = 0.0;
        let mut chi_sum = 0.0;
        for (k, (&u, &ck)) in self.freqs.iter().zip(&self.coeffs).enumerate() {
            let (cos, sin) = if k == 0 { (1.0, 0.0) } else { (rot.re, rot.im) };
            let psi = if k == 0 { span } else { sin / u };
            let chi = (cos * ec - ea + u * sin * ec) / (1.0 + u * u);
            psi_sum += ck * psi;
            chi_sum += ck * chi;
            rot *= step;
            // renormalize to stop drift in |rot|
            if k % 64 == 63 {
                rot /= rot.norm();
            }
        }
        (psi_sum, chi_sum)
    }

    /// Put price computed directly from the density.
    pub fn put(&self, strike: f64) -> f64 {
        let (psi, chi) = self.partial_moments((strike / self.spot).ln());
        self.df * (strike * psi - self.spot * chi)
    }

    /// Call price computed directly from the density.
    pub fn call(&self, strike: f64) -> f64 {
        let (psi, chi) = self.partial_moments((strike / self.spot).ln());
        self.df * (self.spot * (self.exp_moment - chi) - strike * (self.mass - psi))
    }

    /// Price of the option. The put leg is always integrated directly and the
    /// call follows from put–call parity: the put only weights the density
    /// by `e^r ≤ K/S`, whereas a direct call carries `e^b` factors that
    /// amplify rounding on wide intervals.
    pub fn price(&self, strike: f64, kind: OptionKind) -> f64 {
        let put = self.put(strike);
        match kind {
            OptionKind::Put => put,
            OptionKind::Call => put + self.spot * self.div_df - strike * self.df,
        }
    }

    /// `C - P - (S e^{-qτ} - K e^{-rτ})` with both legs integrated directly.
    /// Large values signal a truncation range or grid that is too small.
    pub fn parity_residual(&self, strike: f64) -> f64 {
        self.call(strike) - self.put(strike) - (self.spot * self.div_df - strike * self.df)
    }
}
