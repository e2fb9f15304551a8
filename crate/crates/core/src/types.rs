//! Domain types shared by pricing, variance, objective, calibration,
//! simulation and I/O.
//!
//! Every validated type rejects invalid values at construction and on
//! deserialization, so a value that exists is a value that satisfies its
//! invariants. Variance levels are annualized variances (decimal squared);
//! maturities are ACT/365 year fractions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Day-count basis for converting calendar days to year fractions.
pub const DAYS_PER_YEAR: f64 = 365.0;

/// ACT/365 year fraction.
pub fn years_from_days(days: f64) -> f64 {
    days / DAYS_PER_YEAR
}

fn finite(name: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::param(name, v, "must be finite"))
    }
}

fn positive(name: &'static str, v: f64) -> Result<f64> {
    if finite(name, v)? > 0.0 {
        Ok(v)
    } else {
        Err(Error::param(name, v, "must be > 0"))
    }
}

fn non_negative(name: &'static str, v: f64) -> Result<f64> {
    if finite(name, v)? >= 0.0 {
        Ok(v)
    } else {
        Err(Error::param(name, v, "must be >= 0"))
    }
}

// ---------------------------------------------------------------------------
// Market environment
// ---------------------------------------------------------------------------

/// Spot and flat continuously-compounded rate and dividend yield.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MarketEnvRaw")]
pub struct MarketEnv {
    spot: f64,
    rate: f64,
    dividend_yield: f64,
}

#[derive(Deserialize)]
struct MarketEnvRaw {
    spot: f64,
    rate: f64,
    dividend_yield: f64,
}

impl TryFrom<MarketEnvRaw> for MarketEnv {
    type Error = Error;
    fn try_from(r: MarketEnvRaw) -> Result<Self> {
        MarketEnv::new(r.spot, r.rate, r.dividend_yield)
    }
}

impl MarketEnv {
    pub fn new(spot: f64, rate: f64, dividend_yield: f64) -> Result<Self> {
        Ok(Self {
            spot: positive("spot", spot)?,
            rate: finite("rate", rate)?,
            dividend_yield: finite("dividend_yield", dividend_yield)?,
        })
    }

    pub fn spot(&self) -> f64 {
        self.spot
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn dividend_yield(&self) -> f64 {
        self.dividend_yield
    }

    /// `S e^{(r-q)τ}`.
    pub fn forward(&self, maturity: f64) -> f64 {
        self.spot * ((self.rate - self.dividend_yield) * maturity).exp()
    }

    /// `e^{-rτ}`.
    pub fn discount(&self, maturity: f64) -> f64 {
        (-self.rate * maturity).exp()
    }

    /// `e^{-qτ}`.
    pub fn dividend_discount(&self, maturity: f64) -> f64 {
        (-self.dividend_yield * maturity).exp()
    }
}

// ---------------------------------------------------------------------------
// Model parameters
// ---------------------------------------------------------------------------

/// Parameters of the Bates stochastic-volatility jump-diffusion.
///
/// Jumps in log price are normal with mean `ln(1+mu_j) - sigma_j^2/2` and
/// standard deviation `sigma_j`, so that `E[e^J - 1] = mu_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BatesParamsRaw")]
pub struct BatesParams {
    v0: f64,
    kappa: f64,
    theta: f64,
    sigma_v: f64,
    rho: f64,
    lambda: f64,
    mu_j: f64,
    sigma_j: f64,
}

#[derive(Deserialize)]
struct BatesParamsRaw {
    v0: f64,
    kappa: f64,
    theta: f64,
    sigma_v: f64,
    rho: f64,
    lambda: f64,
    mu_j: f64,
    sigma_j: f64,
}

impl TryFrom<BatesParamsRaw> for BatesParams {
    type Error = Error;
    fn try_from(r: BatesParamsRaw) -> Result<Self> {
        BatesParams::new(
            r.v0, r.kappa, r.theta, r.sigma_v, r.rho, r.lambda, r.mu_j, r.sigma_j,
        )
    }
}

impl BatesParams {
    /// Parameter names in vector order.
    pub const NAMES: [&'static str; 8] = [
        "v0", "kappa", "theta", "sigma_v", "rho", "lambda", "mu_j", "sigma_j",
    ];

    #[allow(clippy::too_many_arguments)]
    pub fn new(
        v0: f64,
        kappa: f64,
        theta: f64,
        sigma_v: f64,
        rho: f64,
        lambda: f64,
        mu_j: f64,
        sigma_j: f64,
    ) -> Result<Self> {
        let rho = finite("rho", rho)?;
        if !(-1.0..=1.0).contains(&rho) {
            return Err(Error::param("rho", rho, "must lie in [-1, 1]"));
        }
        let mu_j = finite("mu_j", mu_j)?;
        if mu_j <= -1.0 {
            return Err(Error::param("mu_j", mu_j, "must be > -1"));
        }
        Ok(Self {
            v0: positive("v0", v0)?,
            kappa: positive("kappa", kappa)?,
            theta: positive("theta", theta)?,
            sigma_v: positive("sigma_v", sigma_v)?,
            rho,
            lambda: non_negative("lambda", lambda)?,
            mu_j,
            sigma_j: non_negative("sigma_j", sigma_j)?,
        })
    }

    /// Builds from `[v0, kappa, theta, sigma_v, rho, lambda, mu_j, sigma_j]`.
    pub fn from_array(a: [f64; 8]) -> Result<Self> {
        Self::new(a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7])
    }

    pub fn to_array(&self) -> [f64; 8] {
        [
            self.v0,
            self.kappa,
            self.theta,
            self.sigma_v,
            self.rho,
            self.lambda,
            self.mu_j,
            self.sigma_j,
        ]
    }

    /// Equity-index parameter set used as the default starting point and as
    /// the centre of the simulation study.
    pub fn baseline() -> Self {
        Self {
            v0: 0.0576,
            kappa: 2.03,
            theta: 0.04,
            sigma_v: 0.38,
            rho: -0.7,
            lambda: 0.59,
            mu_j: -0.05,
            sigma_j: 0.07,
        }
    }

    pub fn v0(&self) -> f64 {
        self.v0
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn sigma_v(&self) -> f64 {
        self.sigma_v
    }
    pub fn rho(&self) -> f64 {
        self.rho
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn mu_j(&self) -> f64 {
        self.mu_j
    }
    pub fn sigma_j(&self) -> f64 {
        self.sigma_j
    }

    /// Mean of the log jump size, `ln(1+mu_j) - sigma_j^2/2`.
    pub fn jump_log_mean(&self) -> f64 {
        self.mu_j.ln_1p() - 0.5 * self.sigma_j * self.sigma_j
    }

    /// `E[J^2]` of the log jump size.
    pub fn jump_second_moment(&self) -> f64 {
        let m = self.jump_log_mean();
        m * m + self.sigma_j * self.sigma_j
    }
}

/// Simple jump diffusion: constant volatility plus fixed-size Poisson jumps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SjdParamsRaw")]
pub struct SjdParams {
    sigma: f64,
    lambda: f64,
    jump: f64,
}

#[derive(Deserialize)]
struct SjdParamsRaw {
    sigma: f64,
    lambda: f64,
    jump: f64,
}

impl TryFrom<SjdParamsRaw> for SjdParams {
    type Error = Error;
    fn try_from(r: SjdParamsRaw) -> Result<Self> {
        SjdParams::new(r.sigma, r.lambda, r.jump)
    }
}

impl SjdParams {
    pub fn new(sigma: f64, lambda: f64, jump: f64) -> Result<Self> {
        Ok(Self {
            sigma: positive("sigma", sigma)?,
            lambda: non_negative("lambda", lambda)?,
            jump: finite("jump", jump)?,
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn jump(&self) -> f64 {
        self.jump
    }
}

// ---------------------------------------------------------------------------
// Quotes and surfaces
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptionKind {
    Call,
    Put,
}

impl OptionKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            OptionKind::Call => "call",
            OptionKind::Put => "put",
        }
    }

    /// Out-of-the-money side for a strike relative to a reference level
    /// (calls at or above it, puts below).
    pub fn otm_for(strike: f64, reference: f64) -> Self {
        if strike >= reference {
            OptionKind::Call
        } else {
            OptionKind::Put
        }
    }
}

impl std::fmt::Display for OptionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for OptionKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "call" | "c" => Ok(OptionKind::Call),
            "put" | "p" => Ok(OptionKind::Put),
            other => Err(Error::Parse(format!("unknown option kind `{other}`"))),
        }
    }
}

/// A single European option quote.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OptionQuoteRaw")]
pub struct OptionQuote {
    pub strike: f64,
    pub maturity: f64,
    pub kind: OptionKind,
    pub bid: Option<f64>,
    pub ask: Option<f64>,
    pub mid: f64,
    pub forward: Option<f64>,
    pub std_moneyness: Option<f64>,
    pub implied_vol: Option<f64>,
}

#[derive(Deserialize)]
struct OptionQuoteRaw {
    strike: f64,
    maturity: f64,
    kind: OptionKind,
    #[serde(default)]
    bid: Option<f64>,
    #[serde(default)]
    ask: Option<f64>,
    mid: f64,
    #[serde(default)]
    forward: Option<f64>,
    #[serde(default)]
    std_moneyness: Option<f64>,
    #[serde(default)]
    implied_vol: Option<f64>,
}

impl TryFrom<OptionQuoteRaw> for OptionQuote {
    type Error = Error;
    fn try_from(r: OptionQuoteRaw) -> Result<Self> {
        let q = OptionQuote {
            strike: r.strike,
            maturity: r.maturity,
            kind: r.kind,
            bid: r.bid,
            ask: r.ask,
            mid: r.mid,
            forward: r.forward,
            std_moneyness: r.std_moneyness,
            implied_vol: r.implied_vol,
        };
        q.validate()?;
        Ok(q)
    }
}

impl OptionQuote {
    /// Quote known only by its price.
    pub fn from_mid(strike: f64, maturity: f64, kind: OptionKind, mid: f64) -> Result<Self> {
        let q = OptionQuote {
            strike,
            maturity,
            kind,
            bid: None,
            ask: None,
            mid,
            forward: None,
            std_moneyness: None,
            implied_vol: None,
        };
        q.validate()?;
        Ok(q)
    }

    /// Quote from a two-sided market; the mid is the average of bid and ask.
    pub fn from_bid_ask(
        strike: f64,
        maturity: f64,
        kind: OptionKind,
        bid: f64,
        ask: f64,
    ) -> Result<Self> {
        let q = OptionQuote {
            strike,
            maturity,
            kind,
            bid: Some(bid),
            ask: Some(ask),
            mid: 0.5 * (bid + ask),
            forward: None,
            std_moneyness: None,
            implied_vol: None,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn with_implied_vol(mut self, vol: f64) -> Self {
        self.implied_vol = Some(vol);
        self
    }

    pub fn with_forward(mut self, forward: f64) -> Self {
        self.forward = Some(forward);
        self
    }

    pub fn with_std_moneyness(mut self, k: f64) -> Self {
        self.std_moneyness = Some(k);
        self
    }

    pub fn validate(&self) -> Result<()> {
        positive("strike", self.strike)?;
        positive("maturity", self.maturity)?;
        finite("mid", self.mid)?;
        if let (Some(b), Some(a)) = (self.bid, self.ask) {
            finite("bid", b)?;
            finite("ask", a)?;
            if b > a {
                return Err(Error::InvalidInput(format!(
                    "bid {b} exceeds ask {a} for strike {}",
                    self.strike
                )));
            }
            let expected = 0.5 * (b + a);
            if (self.mid - expected).abs() > 1e-12 * expected.abs().max(1.0) {
                return Err(Error::InvalidInput(format!(
                    "mid {} is not the bid/ask average {expected}",
                    self.mid
                )));
            }
        }
        if let Some(v) = self.implied_vol {
            positive("implied_vol", v)?;
        }
        Ok(())
    }
}

/// Option quotes grouped by maturity, each carrying its implied volatility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VolSurfaceRaw")]
pub struct VolSurface {
    env: MarketEnv,
    maturities: Vec<f64>,
    quotes: Vec<Vec<OptionQuote>>,
}

#[derive(Deserialize)]
struct VolSurfaceRaw {
    env: MarketEnv,
    #[allow(dead_code)]
    #[serde(default)]
    maturities: Vec<f64>,
    quotes: Vec<Vec<OptionQuote>>,
}

impl TryFrom<VolSurfaceRaw> for VolSurface {
    type Error = Error;
    fn try_from(r: VolSurfaceRaw) -> Result<Self> {
        VolSurface::new(r.env, r.quotes.into_iter().flatten().collect())
    }
}

impl VolSurface {
    /// Groups quotes by maturity. Maturities are sorted ascending and quotes
    /// inside a maturity by `(strike, kind)`, so construction is canonical.
    pub fn new(env: MarketEnv, mut quotes: Vec<OptionQuote>) -> Result<Self> {
        for q in &quotes {
            q.validate()?;
            if q.implied_vol.is_none() {
                return Err(Error::InvalidInput(format!(
                    "quote K={} tau={} has no implied volatility",
                    q.strike, q.maturity
                )));
            }
        }
        quotes.sort_by(|a, b| {
            a.maturity
                .total_cmp(&b.maturity)
                .then(a.strike.total_cmp(&b.strike))
                .then(a.kind.cmp(&b.kind))
        });
        let mut maturities: Vec<f64> = Vec::new();
        let mut grouped: Vec<Vec<OptionQuote>> = Vec::new();
        for q in quotes {
            match maturities.last() {
                Some(&m) if m == q.maturity => grouped.last_mut().unwrap().push(q),
                _ => {
                    maturities.push(q.maturity);
                    grouped.push(vec![q]);
                }
            }
        }
        Ok(Self {
            env,
            maturities,
            quotes: grouped,
        })
    }

    pub fn env(&self) -> &MarketEnv {
        &self.env
    }

    pub fn maturities(&self) -> &[f64] {
        &self.maturities
    }

    pub fn quotes(&self) -> &[Vec<OptionQuote>] {
        &self.quotes
    }

    /// `(maturity, quotes)` pairs in ascending maturity.
    pub fn slices(&self) -> impl Iterator<Item = (f64, &[OptionQuote])> {
        self.maturities
            .iter()
            .copied()
            .zip(self.quotes.iter().map(|v| v.as_slice()))
    }

    /// Number of quotes per maturity, `N(τ_j)`.
    pub fn counts(&self) -> Vec<usize> {
        self.quotes.iter().map(Vec::len).collect()
    }

    pub fn len(&self) -> usize {
        self.quotes.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

// ---------------------------------------------------------------------------
// Variance term structures
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TsKind {
    VixSquared,
    VarianceSwap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TsPoint {
    pub maturity: f64,
    pub level: f64,
}

/// Annualized variance levels by maturity, all of one kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VarianceTermStructureRaw")]
pub struct VarianceTermStructure {
    kind: TsKind,
    points: Vec<TsPoint>,
}

#[derive(Deserialize)]
struct VarianceTermStructureRaw {
    kind: TsKind,
    points: Vec<TsPoint>,
}

impl TryFrom<VarianceTermStructureRaw> for VarianceTermStructure {
    type Error = Error;
    fn try_from(r: VarianceTermStructureRaw) -> Result<Self> {
        VarianceTermStructure::new(r.kind, r.points)
    }
}

impl VarianceTermStructure {
    pub fn new(kind: TsKind, points: Vec<TsPoint>) -> Result<Self> {
        for (i, p) in points.iter().enumerate() {
            positive("maturity", p.maturity)?;
            non_negative("level", p.level)?;
            if i > 0 && p.maturity <= points[i - 1].maturity {
                return Err(Error::InvalidInput(
                    "term-structure maturities must be strictly increasing".into(),
                ));
            }
        }
        Ok(Self { kind, points })
    }

    pub fn kind(&self) -> TsKind {
        self.kind
    }

    pub fn points(&self) -> &[TsPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Level at an exact maturity, if present.
    pub fn level_at(&self, maturity: f64) -> Option<f64> {
        self.points
            .iter()
            .find(|p| p.maturity == maturity)
            .map(|p| p.level)
    }
}

// ---------------------------------------------------------------------------
// Calibration configuration and results
// ---------------------------------------------------------------------------

/// Contract weights `w_{i,j}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "rule", content = "values", rename_all = "snake_case")]
pub enum ContractWeights {
    #[default]
    Uniform,
    /// One weight per quote, shaped like `VolSurface::quotes`.
    PerContract(Vec<Vec<f64>>),
}

/// Term-structure weights `w^v_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "rule", content = "values", rename_all = "snake_case")]
pub enum TsWeights {
    /// `N(τ_j)`, the number of quotes at the maturity.
    #[default]
    QuoteCount,
    Uniform,
    PerMaturity(Vec<f64>),
}

/// Which term-structure comparison the penalty uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyKind {
    /// Model VIX² against an observed VIX² curve.
    #[default]
    VixSquared,
    /// Model variance-swap rates against observed variance-swap rates.
    VarianceSwap,
    /// Model VIX² used as a stand-in for observed variance-swap rates.
    ApproxVs,
}

impl PenaltyKind {
    /// Kind of observed curve this penalty consumes.
    pub fn observed_kind(&self) -> TsKind {
        match self {
            PenaltyKind::VixSquared => TsKind::VixSquared,
            PenaltyKind::VarianceSwap | PenaltyKind::ApproxVs => TsKind::VarianceSwap,
        }
    }
}

/// Box constraints on the Bates parameter vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamBounds {
    pub lower: BatesParams,
    pub upper: BatesParams,
}

impl Default for ParamBounds {
    fn default() -> Self {
        Self {
            lower: BatesParams::new(1e-4, 1e-2, 1e-4, 1e-2, -1.0, 0.0, -0.5, 0.0).unwrap(),
            upper: BatesParams::new(1.0, 20.0, 1.0, 3.0, 1.0, 10.0, 0.5, 0.5).unwrap(),
        }
    }
}

impl ParamBounds {
    pub fn validate(&self) -> Result<()> {
        let lo = self.lower.to_array();
        let hi = self.upper.to_array();
        for i in 0..8 {
            if lo[i] >= hi[i] {
                return Err(Error::param(
                    BatesParams::NAMES[i],
                    lo[i],
                    "lower bound must be strictly below upper bound",
                ));
            }
        }
        Ok(())
    }

    pub fn contains(&self, p: &BatesParams) -> bool {
        let lo = self.lower.to_array();
        let hi = self.upper.to_array();
        p.to_array()
            .iter()
            .enumerate()
            .all(|(i, &x)| x >= lo[i] && x <= hi[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerSettings {
    /// Relative spread of simplex objective values treated as converged.
    pub tolerance: f64,
    /// Simplex diameter (search coordinates) treated as converged.
    pub x_tolerance: f64,
    /// Objective evaluations per start.
    pub max_evaluations: usize,
    /// Extra starts from perturbed initial guesses.
    pub restarts: usize,
    /// Seed for the perturbed starts.
    pub seed: u64,
    /// Initial simplex edge in search coordinates.
    pub initial_step: f64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            x_tolerance: 1e-8,
            max_evaluations: 6000,
            restarts: 0,
            seed: 0,
            initial_step: 0.25,
        }
    }
}

fn default_initial_guess() -> BatesParams {
    BatesParams::baseline()
}

/// Inputs to one calibration run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationConfig {
    pub alpha: f64,
    #[serde(default)]
    pub contract_weights: ContractWeights,
    #[serde(default)]
    pub ts_weights: TsWeights,
    #[serde(default)]
    pub bounds: ParamBounds,
    #[serde(default = "default_initial_guess")]
    pub initial_guess: BatesParams,
    #[serde(default)]
    pub optimizer: OptimizerSettings,
    #[serde(default)]
    pub ts_kind: PenaltyKind,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            contract_weights: ContractWeights::default(),
            ts_weights: TsWeights::default(),
            bounds: ParamBounds::default(),
            initial_guess: BatesParams::baseline(),
            optimizer: OptimizerSettings::default(),
            ts_kind: PenaltyKind::default(),
        }
    }
}

impl CalibrationConfig {
    pub fn with_alpha(alpha: f64) -> Self {
        Self {
            alpha,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::param("alpha", self.alpha, "must lie in [0, 1]"));
        }
        self.bounds.validate()?;
        if !self.bounds.contains(&self.initial_guess) {
            return Err(Error::InvalidInput(
                "initial guess lies outside the parameter bounds".into(),
            ));
        }
        if let ContractWeights::PerContract(w) = &self.contract_weights {
            if w.iter().flatten().any(|x| !(x.is_finite() && *x >= 0.0)) {
                return Err(Error::InvalidInput(
                    "contract weights must be finite and non-negative".into(),
                ));
            }
        }
        if let TsWeights::PerMaturity(w) = &self.ts_weights {
            if w.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                return Err(Error::InvalidInput(
                    "term-structure weights must be finite and non-negative".into(),
                ));
            }
        }
        let o = &self.optimizer;
        if o.max_evaluations == 0
            || o.tolerance.is_nan()
            || o.tolerance < 0.0
            || o.x_tolerance.is_nan()
            || o.x_tolerance < 0.0
        {
            return Err(Error::InvalidInput("invalid optimizer settings".into()));
        }
        if !(o.initial_step > 0.0 && o.initial_step.is_finite()) {
            return Err(Error::param(
                "initial_step",
                o.initial_step,
                "must be positive",
            ));
        }
        Ok(())
    }
}

/// A value attached to one maturity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaturityValue {
    pub maturity: f64,
    pub value: f64,
}

/// Fitted parameters and fit diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub alpha: f64,
    pub params: BatesParams,
    pub objective_value: f64,
    pub iv_sse: f64,
    pub ts_penalty: f64,
    /// Mean absolute implied-vol error per maturity (decimal vol).
    pub mae_iv_by_maturity: Vec<MaturityValue>,
    /// Model minus market volatility-unit term-structure error per maturity.
    pub ts_error_by_maturity: Vec<MaturityValue>,
    pub converged: bool,
    pub evaluations: usize,
    /// Contracts whose model price could not be inverted to a volatility.
    pub iv_failures: usize,
}
