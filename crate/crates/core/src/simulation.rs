//! Synthetic parameter-recovery study: random Bates parameter draws,
//! model-generated surfaces and term structures, α-sweep calibrations and
//! error summaries.

use chrono::NaiveDate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calibration::{calibrate, recovery_error, RecoveryTolerance};
use crate::data_io::{standardized_moneyness, MoneynessBucket, PanelRow};
use crate::error::{Error, Result};
use crate::objective::model_implied_vols;
use crate::pricing::{implied_vol, BatesSlicePricer, PricerSettings};
use crate::types::{
    years_from_days, BatesParams, CalibrationConfig, MarketEnv, OptimizerSettings, OptionKind,
    OptionQuote, ParamBounds, PenaltyKind, TsKind, TsPoint, TsWeights, VarianceTermStructure,
    VolSurface,
};
use crate::variance::{bates_variance_swap, bates_vix_squared};

/// Closed uniform draw interval per parameter, in `BatesParams::NAMES` order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrawRanges {
    pub lower: [f64; 8],
    pub upper: [f64; 8],
}

impl Default for DrawRanges {
    fn default() -> Self {
        Self {
            lower: [0.01, 1.0, 0.01, 0.1, -1.0, 0.0, -0.1, 0.0],
            upper: [0.1, 5.0, 0.1, 0.5, 1.0, 5.0, 0.1, 0.1],
        }
    }
}

impl DrawRanges {
    /// Every draw returns `p`.
    pub fn degenerate(p: &BatesParams) -> Self {
        let a = p.to_array();
        Self { lower: a, upper: a }
    }
}

/// How the term-structure penalty is fed in the study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyMode {
    /// Model VIX² against the generator's exact VIX² curve.
    ExactVix,
    /// Model VIX² against the generator's variance-swap curve.
    ApproxVs,
}

impl StudyMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            StudyMode::ExactVix => "exact_vix",
            StudyMode::ApproxVs => "approx_vs",
        }
    }

    fn penalty(&self) -> PenaltyKind {
        match self {
            StudyMode::ExactVix => PenaltyKind::VixSquared,
            StudyMode::ApproxVs => PenaltyKind::ApproxVs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulationSpec {
    pub n_draws: usize,
    pub seed: u64,
    /// Initial guess for every calibration.
    pub base_params: BatesParams,
    pub draw_ranges: DrawRanges,
    /// Rejected draws allowed per draw index before giving up.
    pub max_redraws: usize,
    pub alpha_grid: Vec<f64>,
    pub modes: Vec<StudyMode>,
    pub maturity_days: Vec<f64>,
    pub strikes: Vec<f64>,
    pub spot: f64,
    pub rate: f64,
    pub dividend_yield: f64,
    /// Generated quotes priced below this are dropped.
    pub min_price: f64,
    pub bounds: ParamBounds,
    pub pricer: PricerSettings,
    pub optimizer: OptimizerSettings,
    pub recovery: RecoveryTolerance,
}

impl Default for SimulationSpec {
    fn default() -> Self {
        Self {
            n_draws: 50,
            seed: 20_240_601,
            base_params: BatesParams::baseline(),
            draw_ranges: DrawRanges::default(),
            max_redraws: 1000,
            alpha_grid: vec![0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0],
            modes: vec![StudyMode::ExactVix, StudyMode::ApproxVs],
            maturity_days: vec![7.0, 30.0, 91.0, 182.0, 365.0],
            strikes: (75..=125).map(f64::from).collect(),
            spot: 100.0,
            rate: 0.02,
            dividend_yield: 0.03,
            min_price: 0.10,
            bounds: ParamBounds::default(),
            pricer: PricerSettings::default(),
            optimizer: OptimizerSettings::default(),
            recovery: RecoveryTolerance::default(),
        }
    }
}

fn strictly_increasing_positive(name: &str, v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::InvalidInput(format!("{name} must not be empty")));
    }
    if v.iter().any(|x| !(x.is_finite() && *x > 0.0)) || v.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(format!(
            "{name} must be positive and strictly increasing"
        )));
    }
    Ok(())
}

impl SimulationSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_draws == 0 {
            return Err(Error::InvalidInput("n_draws must be at least 1".into()));
        }
        for i in 0..8 {
            let (lo, hi) = (self.draw_ranges.lower[i], self.draw_ranges.upper[i]);
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::InvalidInput(format!(
                    "draw range for {} is invalid: [{lo}, {hi}]",
                    BatesParams::NAMES[i]
                )));
            }
        }
        if self.alpha_grid.is_empty() || self.alpha_grid.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return Err(Error::InvalidInput(
                "alpha grid must be non-empty and lie in [0, 1]".into(),
            ));
        }
        if self.modes.is_empty() {
            return Err(Error::InvalidInput(
                "at least one study mode is required".into(),
            ));
        }
        strictly_increasing_positive("maturity_days", &self.maturity_days)?;
        strictly_increasing_positive("strikes", &self.strikes)?;
        if !(self.min_price.is_finite() && self.min_price >= 0.0) {
            return Err(Error::param("min_price", self.min_price, "must be >= 0"));
        }
        self.env()?;
        self.bounds.validate()?;
        self.pricer.validate()?;
        if !self.bounds.contains(&self.base_params) {
            return Err(Error::InvalidInput(
                "base parameters lie outside the bounds".into(),
            ));
        }
        Ok(())
    }

    pub fn env(&self) -> Result<MarketEnv> {
        MarketEnv::new(self.spot, self.rate, self.dividend_yield)
    }
}

/// Parameter vector for `draw_index`, reproducible from `(seed, draw_index)`
/// alone. Draws that violate the parameter invariants are redrawn.
pub fn draw_params(spec: &SimulationSpec, draw_index: usize) -> Result<BatesParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(draw_index as u64);
    let r = &spec.draw_ranges;
    for _ in 0..=spec.max_redraws {
        let a: [f64; 8] = std::array::from_fn(|i| {
            if r.lower[i] == r.upper[i] {
                r.lower[i]
            } else {
                rng.random_range(r.lower[i]..=r.upper[i])
            }
        });
        if let Ok(p) = BatesParams::from_array(a) {
            return Ok(p);
        }
    }
    Err(Error::InvalidInput(format!(
        "draw {draw_index}: no valid parameter vector after {} attempts",
        spec.max_redraws + 1
    )))
}

/// Model-generated market for one parameter vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticMarket {
    pub surface: VolSurface,
    pub vix_ts: VarianceTermStructure,
    pub vs_ts: VarianceTermStructure,
    /// Maturities (years) where no quote cleared the price floor.
    pub dropped_maturities: Vec<f64>,
    pub warnings: Vec<String>,
}

/// OTM quotes (relative to spot) priced at or above the floor, with the
/// closed-form VIX² and variance-swap curves at the retained maturities.
pub fn generate_surface(params: &BatesParams, spec: &SimulationSpec) -> Result<SyntheticMarket> {
    let env = spec.env()?;
    let mut quotes = Vec::new();
    let mut vix_points = Vec::new();
    let mut vs_points = Vec::new();
    let mut dropped = Vec::new();
    let mut warnings = Vec::new();
    for &days in &spec.maturity_days {
        let tau = years_from_days(days);
        let pricer = BatesSlicePricer::new(params, &env, tau, &spec.pricer)?;
        let vix2 = bates_vix_squared(params, tau)?;
        let forward = env.forward(tau);
        let before = quotes.len();
        for &k in &spec.strikes {
            let kind = OptionKind::otm_for(k, env.spot());
            let price = pricer.price(k, kind);
            if price < spec.min_price {
                continue;
            }
            let iv = match implied_vol(&env, k, tau, kind, price) {
                Ok(v) => v,
                Err(e) => {
                    warnings.push(format!("{days}-day strike {k}: {e}"));
                    continue;
                }
            };
            let mny = standardized_moneyness(k, env.spot(), tau, vix2.sqrt())?;
            quotes.push(
                OptionQuote::from_mid(k, tau, kind, price)?
                    .with_implied_vol(iv)
                    .with_forward(forward)
                    .with_std_moneyness(mny),
            );
        }
        if quotes.len() == before {
            warnings.push(format!(
                "{days}-day maturity has no quote above the price floor"
            ));
            dropped.push(tau);
            continue;
        }
        vix_points.push(TsPoint {
            maturity: tau,
            level: vix2,
        });
        vs_points.push(TsPoint {
            maturity: tau,
            level: bates_variance_swap(params, tau)?,
        });
    }
    Ok(SyntheticMarket {
        surface: VolSurface::new(env, quotes)?,
        vix_ts: VarianceTermStructure::new(TsKind::VixSquared, vix_points)?,
        vs_ts: VarianceTermStructure::new(TsKind::VarianceSwap, vs_points)?,
        dropped_maturities: dropped,
        warnings,
    })
}

/// Absolute implied-vol errors pooled by standardized-moneyness bucket.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BucketErrors {
    /// Sum of absolute errors in decimal vol, indexed like `MoneynessBucket::ALL`.
    pub sum: [f64; 3],
    pub count: [usize; 3],
}

impl BucketErrors {
    pub fn add(&mut self, k: f64, abs_error: f64) {
        let b = MoneynessBucket::of(k) as usize;
        self.sum[b] += abs_error;
        self.count[b] += 1;
    }

    pub fn merge(&mut self, other: &BucketErrors) {
        for b in 0..3 {
            self.sum[b] += other.sum[b];
            self.count[b] += other.count[b];
        }
    }

    /// Mean absolute error in vol percentage points; `None` for an empty bucket.
    pub fn mae_pct(&self, bucket: MoneynessBucket) -> Option<f64> {
        let b = bucket as usize;
        (self.count[b] > 0).then(|| 100.0 * self.sum[b] / self.count[b] as f64)
    }
}

/// Pools `|model - market|` implied-vol errors by bucket. Quotes without a
/// standardized moneyness or a model vol are skipped.
pub fn bucket_errors(surface: &VolSurface, model_vols: &[Vec<Option<f64>>]) -> BucketErrors {
    let mut out = BucketErrors::default();
    for (quotes, vols) in surface.quotes().iter().zip(model_vols) {
        for (q, m) in quotes.iter().zip(vols) {
            if let (Some(k), Some(mv), Some(iv)) = (q.std_moneyness, m, q.implied_vol) {
                out.add(k, (mv - iv).abs());
            }
        }
    }
    out
}

/// Outcome of one calibration in the study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrawRecord {
    pub draw: usize,
    pub mode: StudyMode,
    pub alpha: f64,
    pub truth: BatesParams,
    pub fitted: Option<BatesParams>,
    pub recovered: bool,
    pub recovery_error: f64,
    pub objective_value: f64,
    pub evaluations: usize,
    pub buckets: BucketErrors,
    /// `|√VIX²(fitted) - √VIX²(truth)|` per retained maturity, in vol points.
    pub vix_error_pct: Vec<(f64, f64)>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketRow {
    pub mode: StudyMode,
    pub alpha: f64,
    pub bucket: MoneynessBucket,
    pub mae_iv_pct: Option<f64>,
    pub contracts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryRate {
    pub mode: StudyMode,
    pub alpha: f64,
    pub recovered: usize,
    /// Calibrations that completed.
    pub completed: usize,
    /// Calibrations excluded because the draw or the fit failed.
    pub failures: usize,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VixErrorRow {
    pub mode: StudyMode,
    pub alpha: f64,
    pub maturity_days: f64,
    pub mean_abs_error_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoverySummary {
    pub buckets: Vec<BucketRow>,
    pub rates: Vec<RecoveryRate>,
    pub vix_errors: Vec<VixErrorRow>,
}

impl RecoverySummary {
    pub fn mae_pct(&self, mode: StudyMode, alpha: f64, bucket: MoneynessBucket) -> Option<f64> {
        self.buckets
            .iter()
            .find(|r| r.mode == mode && r.alpha == alpha && r.bucket == bucket)
            .and_then(|r| r.mae_iv_pct)
    }

    pub fn rate(&self, mode: StudyMode, alpha: f64) -> Option<&RecoveryRate> {
        self.rates
            .iter()
            .find(|r| r.mode == mode && r.alpha == alpha)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryStudy {
    pub summary: RecoverySummary,
    pub records: Vec<DrawRecord>,
}

fn failed_record(
    draw: usize,
    mode: StudyMode,
    alpha: f64,
    truth: BatesParams,
    e: &Error,
) -> DrawRecord {
    DrawRecord {
        draw,
        mode,
        alpha,
        truth,
        fitted: None,
        recovered: false,
        recovery_error: f64::INFINITY,
        objective_value: f64::NAN,
        evaluations: 0,
        buckets: BucketErrors::default(),
        vix_error_pct: Vec::new(),
        error: Some(e.to_string()),
    }
}

fn run_one(
    spec: &SimulationSpec,
    draw: usize,
    truth: &BatesParams,
    market: &SyntheticMarket,
    mode: StudyMode,
    alpha: f64,
) -> Result<DrawRecord> {
    let config = CalibrationConfig {
        alpha,
        ts_weights: TsWeights::QuoteCount,
        bounds: spec.bounds,
        initial_guess: spec.base_params,
        optimizer: spec.optimizer,
        ts_kind: mode.penalty(),
        ..CalibrationConfig::default()
    };
    let observed = match mode {
        StudyMode::ExactVix => &market.vix_ts,
        StudyMode::ApproxVs => &market.vs_ts,
    };
    let fit = calibrate(&market.surface, observed, &config, &spec.pricer)?;
    let vols = model_implied_vols(&fit.params, &market.surface, &spec.pricer)?;
    let vix_error_pct = market
        .vix_ts
        .points()
        .iter()
        .map(|p| {
            let model = bates_vix_squared(&fit.params, p.maturity)?;
            Ok((
                p.maturity * 365.0,
                100.0 * (model.sqrt() - p.level.sqrt()).abs(),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let err = recovery_error(&fit.params, truth, &spec.recovery);
    Ok(DrawRecord {
        draw,
        mode,
        alpha,
        truth: *truth,
        fitted: Some(fit.params),
        recovered: err < spec.recovery.relative,
        recovery_error: err,
        objective_value: fit.objective_value,
        evaluations: fit.evaluations,
        buckets: bucket_errors(&market.surface, &vols),
        vix_error_pct,
        error: None,
    })
}

/// Calibrates every draw for every mode and α from `spec.base_params`.
/// Records come back ordered by draw, then mode, then α.
pub fn run_recovery_study(spec: &SimulationSpec) -> Result<RecoveryStudy> {
    spec.validate()?;
    let jobs: Vec<(StudyMode, f64)> = spec
        .modes
        .iter()
        .flat_map(|&m| spec.alpha_grid.iter().map(move |&a| (m, a)))
        .collect();
    let per_draw: Vec<Vec<DrawRecord>> = (0..spec.n_draws)
        .into_par_iter()
        .map(|draw| {
            let prepared =
                draw_params(spec, draw).and_then(|p| Ok((p, generate_surface(&p, spec)?)));
            match prepared {
                Ok((truth, market)) => jobs
                    .par_iter()
                    .map(|&(mode, alpha)| {
                        run_one(spec, draw, &truth, &market, mode, alpha)
                            .unwrap_or_else(|e| failed_record(draw, mode, alpha, truth, &e))
                    })
                    .collect(),
                Err(e) => jobs
                    .iter()
                    .map(|&(mode, alpha)| failed_record(draw, mode, alpha, spec.base_params, &e))
                    .collect(),
            }
        })
        .collect();
    let records: Vec<DrawRecord> = per_draw.into_iter().flatten().collect();
    Ok(RecoveryStudy {
        summary: summarize(&jobs, &records),
        records,
    })
}

/// Aggregates records in their given order, so equal inputs give equal sums.
pub fn summarize(jobs: &[(StudyMode, f64)], records: &[DrawRecord]) -> RecoverySummary {
    let mut buckets = Vec::new();
    let mut rates = Vec::new();
    let mut vix_errors = Vec::new();
    for &(mode, alpha) in jobs {
        let mine: Vec<&DrawRecord> = records
            .iter()
            .filter(|r| r.mode == mode && r.alpha == alpha)
            .collect();
        let done: Vec<&&DrawRecord> = mine.iter().filter(|r| r.error.is_none()).collect();
        let mut pooled = BucketErrors::default();
        for r in &done {
            pooled.merge(&r.buckets);
        }
        for bucket in MoneynessBucket::ALL {
            buckets.push(BucketRow {
                mode,
                alpha,
                bucket,
                mae_iv_pct: pooled.mae_pct(bucket),
                contracts: pooled.count[bucket as usize],
            });
        }
        let recovered = done.iter().filter(|r| r.recovered).count();
        rates.push(RecoveryRate {
            mode,
            alpha,
            recovered,
            completed: done.len(),
            failures: mine.len() - done.len(),
            rate: if done.is_empty() {
                0.0
            } else {
                recovered as f64 / done.len() as f64
            },
        });
        let mut days: Vec<f64> = done
            .iter()
            .flat_map(|r| r.vix_error_pct.iter().map(|e| e.0))
            .collect();
        days.sort_by(f64::total_cmp);
        days.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        for d in days {
            let errs: Vec<f64> = done
                .iter()
                .flat_map(|r| r.vix_error_pct.iter())
                .filter(|e| (e.0 - d).abs() < 1e-9)
                .map(|e| e.1)
                .collect();
            vix_errors.push(VixErrorRow {
                mode,
                alpha,
                maturity_days: d,
                mean_abs_error_pct: errs.iter().sum::<f64>() / errs.len() as f64,
            });
        }
    }
    RecoverySummary {
        buckets,
        rates,
        vix_errors,
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One row per mode × α × bucket, with the recovery rate repeated per row.
pub fn write_summary_csv(writer: impl std::io::Write, summary: &RecoverySummary) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "mode",
        "alpha",
        "bucket",
        "mae_iv_pct",
        "contracts",
        "recovery_rate_frac",
        "recovered",
        "completed",
        "failures",
    ])?;
    for b in &summary.buckets {
        let rate = summary.rate(b.mode, b.alpha);
        w.write_record([
            b.mode.as_str().to_string(),
            b.alpha.to_string(),
            b.bucket.as_str().to_string(),
            fmt_opt(b.mae_iv_pct),
            b.contracts.to_string(),
            fmt_opt(rate.map(|r| r.rate)),
            rate.map(|r| r.recovered.to_string()).unwrap_or_default(),
            rate.map(|r| r.completed.to_string()).unwrap_or_default(),
            rate.map(|r| r.failures.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_vix_errors_csv(writer: impl std::io::Write, summary: &RecoverySummary) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "mode",
        "alpha",
        "maturity_days",
        "mean_abs_vix_error_vol_pct",
    ])?;
    for r in &summary.vix_errors {
        w.write_record([
            r.mode.as_str().to_string(),
            r.alpha.to_string(),
            r.maturity_days.to_string(),
            r.mean_abs_error_pct.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Per-draw outcomes, for paired comparisons between modes.
pub fn write_records_csv(writer: impl std::io::Write, records: &[DrawRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "draw",
        "mode",
        "alpha",
        "recovered",
        "recovery_error_rel",
        "objective_value",
        "evaluations",
        "error",
    ])?;
    for r in records {
        w.write_record([
            r.draw.to_string(),
            r.mode.as_str().to_string(),
            r.alpha.to_string(),
            r.recovered.to_string(),
            r.recovery_error.to_string(),
            r.objective_value.to_string(),
            r.evaluations.to_string(),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Layout of a synthetic quote panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PanelSpec {
    pub start_date: NaiveDate,
    pub n_dates: usize,
    pub seed: u64,
    pub spot: f64,
    /// Daily log-return volatility of the spot path.
    pub daily_vol: f64,
    pub rate: f64,
    pub dividend_yield: f64,
    pub maturity_days: Vec<i64>,
    /// Strikes as fractions of the day's spot.
    pub strike_fractions: Vec<f64>,
    /// Half bid/ask spread in currency units.
    pub half_spread: f64,
    pub pricer: PricerSettings,
}

impl Default for PanelSpec {
    fn default() -> Self {
        Self {
            start_date: NaiveDate::from_ymd_opt(2020, 1, 2).expect("valid date"),
            n_dates: 1,
            seed: 7,
            spot: 100.0,
            daily_vol: 0.01,
            rate: 0.02,
            dividend_yield: 0.03,
            maturity_days: vec![9, 30, 61, 91, 182, 273, 365],
            strike_fractions: (0..=60).map(|i| 0.7 + 0.01 * i as f64).collect(),
            half_spread: 0.05,
            pricer: PricerSettings::default(),
        }
    }
}

/// Calls and puts at every strike and maturity, priced under `params`, with
/// a symmetric spread around the model price (bid floored at zero).
pub fn synthetic_panel(params: &BatesParams, spec: &PanelSpec) -> Result<Vec<PanelRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let shock = Normal::new(0.0, spec.daily_vol.max(0.0))
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    let mut spot = spec.spot;
    let mut rows = Vec::new();
    for d in 0..spec.n_dates {
        if d > 0 {
            spot *= shock.sample(&mut rng).exp();
        }
        let trade_date = spec.start_date + chrono::Duration::days(d as i64);
        let env = MarketEnv::new(spot, spec.rate, spec.dividend_yield)?;
        for &days in &spec.maturity_days {
            let tau = years_from_days(days as f64);
            let pricer = BatesSlicePricer::new(params, &env, tau, &spec.pricer)?;
            for &f in &spec.strike_fractions {
                let strike = (spot * f * 100.0).round() / 100.0;
                for kind in [OptionKind::Call, OptionKind::Put] {
                    let p = pricer.price(strike, kind);
                    rows.push(PanelRow {
                        trade_date,
                        expiry_date: trade_date + chrono::Duration::days(days),
                        strike,
                        kind,
                        bid: (p - spec.half_spread).max(0.0),
                        ask: p + spec.half_spread,
                        underlying_close: spot,
                        rate: spec.rate,
                        dividend_yield: spec.dividend_yield,
                    });
                }
            }
        }
    }
    Ok(rows)
}
