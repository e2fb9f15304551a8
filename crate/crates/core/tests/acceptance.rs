//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson, StandardNormal};
use rayon::prelude::*;

use jointcal::calibration::{sjd_calibrate_univariate, sjd_iv_sse, JBracket, LambdaRule};
use jointcal::data_io::MoneynessBucket;
use jointcal::data_io::{
    apply_filters, filter_trade_date, split_by_trade_date, FilterConfig, FilterReason, PanelRow,
};
use jointcal::objective::joint_objective;
use jointcal::pricing::{
    bates_char_fn, bs_price, implied_vol, price_european, sjd_price, BatesSlicePricer,
    PricerSettings,
};
use jointcal::report::{multiplier_spread_series, DatedCalibration, MOVING_AVERAGE_WINDOW};
use jointcal::simulation::{
    draw_params, generate_surface, run_recovery_study, synthetic_panel, PanelSpec, SimulationSpec,
    StudyMode,
};
use jointcal::variance::{
    bates_variance_swap, bates_vix_squared, log_contract_multiplier, replicate_vix_squared,
    sjd_variance_swap, sjd_vix_squared, vs_vix_spread, StrikeGrid,
};
use jointcal::{
    BatesParams, CalibrationConfig, CalibrationResult, MarketEnv, OptionKind, OptionQuote,
    PenaltyKind, SjdParams, VolSurface,
};

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---------------------------------------------------------------------------
// 1. Zero objective at the generating parameters
// ---------------------------------------------------------------------------

fn zero_objective_at_truth() -> Check {
    let spec = SimulationSpec {
        seed: 101,
        ..SimulationSpec::default()
    };
    let settings = PricerSettings::default();
    let alphas = [0.0, 0.25, 0.5, 0.75, 1.0];
    let worst = (0..100)
        .into_par_iter()
        .map(|i| -> std::result::Result<f64, String> {
            let truth = draw_params(&spec, i).map_err(|e| e.to_string())?;
            let m = generate_surface(&truth, &spec).map_err(|e| e.to_string())?;
            let mut worst: f64 = 0.0;
            for (kind, observed) in [
                (PenaltyKind::VixSquared, &m.vix_ts),
                (PenaltyKind::VarianceSwap, &m.vs_ts),
            ] {
                for &alpha in &alphas {
                    let cfg = CalibrationConfig {
                        alpha,
                        ts_kind: kind,
                        ..CalibrationConfig::default()
                    };
                    let b = joint_objective(&truth, &m.surface, observed, &cfg, &settings)
                        .map_err(|e| format!("draw {i}: {e}"))?;
                    worst = worst.max(b.total);
                }
            }
            Ok(worst)
        })
        .collect::<std::result::Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    ensure(worst < 1e-8, || format!("max objective at truth {worst:e}"))?;
    Ok(format!(
        "100 draws x 5 alphas x 2 penalties, max objective {worst:.1e} < 1e-8"
    ))
}

// ---------------------------------------------------------------------------
// 2. Simple jump diffusion: univariate reductions and grid oracle
// ---------------------------------------------------------------------------

fn sjd_surface(truth: &SjdParams, env: &MarketEnv, tau: f64) -> VolSurface {
    let quotes = (90..=110)
        .map(|k| {
            let k = k as f64;
            let kind = OptionKind::otm_for(k, env.spot());
            let p = sjd_price(truth, env, k, tau, kind).unwrap();
            let iv = implied_vol(env, k, tau, kind, p).unwrap();
            OptionQuote::from_mid(k, tau, kind, p)
                .unwrap()
                .with_implied_vol(iv)
        })
        .collect();
    VolSurface::new(*env, quotes).unwrap()
}

fn sjd_reduction() -> Check {
    let env = MarketEnv::new(100.0, 0.0, 0.0).unwrap();
    let tau = 1.0 / 12.0;
    let (sigma, lambda, jump) = (0.16, 1.0, -0.05);
    let truth = SjdParams::new(sigma, lambda, jump).unwrap();
    let surface = sjd_surface(&truth, &env, tau);

    let rules = [
        (
            "vs",
            LambdaRule::VarianceSwap {
                level: sjd_variance_swap(&truth),
                sigma,
            },
        ),
        (
            "vix",
            LambdaRule::VixSquared {
                level: sjd_vix_squared(&truth),
                sigma,
            },
        ),
    ];
    let mut notes = Vec::new();
    for (name, rule) in rules {
        let fit = sjd_calibrate_univariate(&surface, sigma, &rule, &JBracket::default())
            .map_err(|e| e.to_string())?;
        ensure(
            (fit.lambda - lambda).abs() < 1e-3 && (fit.jump - jump).abs() < 1e-3,
            || format!("{name} rule fit ({}, {})", fit.lambda, fit.jump),
        )?;
        notes.push(format!(
            "{name}: lambda {:.6} J {:.6}",
            fit.lambda, fit.jump
        ));
    }

    // 101 x 101 brute-force grid over (lambda, J)
    let lambdas: Vec<f64> = (0..=100).map(|i| 0.02 * i as f64).collect();
    let jumps: Vec<f64> = (0..=100).map(|i| -0.1 + 0.001 * i as f64).collect();
    let best = lambdas
        .par_iter()
        .flat_map_iter(|&l| jumps.iter().map(move |&j| (l, j)))
        .map(|(l, j)| {
            let sse = SjdParams::new(sigma, l, j)
                .and_then(|p| sjd_iv_sse(&p, &surface))
                .unwrap_or(f64::INFINITY);
            (sse, l, j)
        })
        .reduce(
            || (f64::INFINITY, 0.0, 0.0),
            |a, b| if b.0 < a.0 { b } else { a },
        );
    ensure(
        (best.1 - lambda).abs() < 0.02 + 1e-9 && (best.2 - jump).abs() < 0.001 + 1e-9,
        || format!("grid minimum at ({}, {})", best.1, best.2),
    )?;
    notes.push(format!("grid: ({:.2}, {:.3})", best.1, best.2));
    Ok(notes.join("; "))
}

// ---------------------------------------------------------------------------
// 3. Scaled simulation study
// ---------------------------------------------------------------------------

fn scaled_study() -> Check {
    let exact = SimulationSpec {
        n_draws: 50,
        alpha_grid: vec![0.0, 0.1, 0.5, 1.0],
        modes: vec![StudyMode::ExactVix],
        ..SimulationSpec::default()
    };
    let approx = SimulationSpec {
        alpha_grid: vec![0.1],
        modes: vec![StudyMode::ApproxVs],
        ..exact.clone()
    };
    let e = run_recovery_study(&exact).map_err(|e| e.to_string())?;
    let a = run_recovery_study(&approx).map_err(|e| e.to_string())?;
    let s = &e.summary;
    let atm = |alpha: f64| {
        s.mae_pct(StudyMode::ExactVix, alpha, MoneynessBucket::Atm)
            .unwrap_or(f64::NAN)
    };
    for alpha in [0.1, 0.5, 1.0] {
        ensure(atm(alpha) < 0.5, || {
            format!("ATM MAE {:.3}% at alpha {alpha}", atm(alpha))
        })?;
    }
    ensure(atm(0.0) > 1.0, || {
        format!("ATM MAE {:.3}% at alpha 0", atm(0.0))
    })?;
    let rate0 = s.rate(StudyMode::ExactVix, 0.0).unwrap();
    ensure(rate0.recovered == 0, || {
        format!("{} recoveries at alpha 0", rate0.recovered)
    })?;

    // paired comparison on draws that completed in both modes
    let pairs: Vec<(bool, bool)> = e
        .records
        .iter()
        .filter(|r| r.alpha == 0.1 && r.error.is_none())
        .filter_map(|r| {
            a.records
                .iter()
                .find(|q| q.draw == r.draw && q.error.is_none())
                .map(|q| (r.recovered, q.recovered))
        })
        .collect();
    let n = pairs.len() as f64;
    let exact_rate = pairs.iter().filter(|p| p.0).count() as f64 / n;
    let approx_rate = pairs.iter().filter(|p| p.1).count() as f64 / n;
    ensure(exact_rate - approx_rate >= 0.10, || {
        format!("alpha 0.1 recovery exact {exact_rate:.3} vs approx {approx_rate:.3}")
    })?;
    Ok(format!(
        "ATM MAE % (a=0/0.1/0.5/1): {:.3}/{:.3}/{:.3}/{:.3}; recovery a=0 {:.0}%; a=0.1 exact {:.1}% vs approx {:.1}% over {} paired draws",
        atm(0.0),
        atm(0.1),
        atm(0.5),
        atm(1.0),
        100.0 * rate0.rate,
        100.0 * exact_rate,
        100.0 * approx_rate,
        pairs.len()
    ))
}

// ---------------------------------------------------------------------------
// 4. Closed-form identities
// ---------------------------------------------------------------------------

fn closed_form_identities() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_q: f64 = 0.0;
    let mut worst_spread: f64 = 0.0;
    for _ in 0..10_000 {
        let p = BatesParams::new(
            rng.random_range(0.005..0.5),
            rng.random_range(0.1..10.0),
            rng.random_range(0.005..0.5),
            rng.random_range(0.05..1.5),
            rng.random_range(-1.0..1.0),
            rng.random_range(0.0..5.0),
            rng.random_range(-0.5..0.5),
            rng.random_range(0.0..0.3),
        )
        .unwrap();
        let tau = rng.random_range(1.0 / 365.0..2.0);
        let vs = bates_variance_swap(&p, tau).unwrap();
        let vix2 = bates_vix_squared(&p, tau).unwrap();
        let q = log_contract_multiplier(&p, tau).unwrap();
        worst_q = worst_q.max((q * vix2 / 2.0 - vs).abs());
        worst_spread = worst_spread.max((vs_vix_spread(&p, tau).unwrap() - (vs - vix2)).abs());
    }
    ensure(worst_q < 1e-12, || format!("Q VIX^2/2 - VS = {worst_q:e}"))?;
    ensure(worst_spread < 1e-14, || {
        format!("spread identity error {worst_spread:e}")
    })?;

    let mut no_jump = BatesParams::baseline().to_array();
    no_jump[5] = 0.0;
    for tau in [7.0 / 365.0, 1.0 / 12.0, 1.0] {
        let q = log_contract_multiplier(&BatesParams::from_array(no_jump).unwrap(), tau).unwrap();
        ensure(q == 2.0, || format!("Q = {q} without jumps"))?;
    }

    // negative mean jumps always raise Q above 2; positive jumps of fixed size lower it
    let mut sweeps = 0;
    for i in 1..=50 {
        let mu = -0.5 * i as f64 / 50.0;
        for s in [0.0, 0.05, 0.1, 0.3] {
            for l in [0.1, 1.0, 5.0] {
                let mut a = BatesParams::baseline().to_array();
                (a[5], a[6], a[7]) = (l, mu, s);
                let q = log_contract_multiplier(&BatesParams::from_array(a).unwrap(), 1.0 / 12.0)
                    .unwrap();
                ensure(q > 2.0, || format!("Q = {q} at mu_j {mu}, sigma_j {s}"))?;
                a[6] = -mu;
                a[7] = 0.0;
                let q = log_contract_multiplier(&BatesParams::from_array(a).unwrap(), 1.0 / 12.0)
                    .unwrap();
                ensure(q < 2.0, || format!("Q = {q} at mu_j {}", -mu))?;
                sweeps += 2;
            }
        }
    }
    Ok(format!(
        "10^4 pairs: |Q VIX^2/2 - VS| <= {worst_q:.1e}, spread error <= {worst_spread:.1e}; Q = 2 at lambda = 0; {sweeps} directed sign checks"
    ))
}

// ---------------------------------------------------------------------------
// 5. Replication accuracy
// ---------------------------------------------------------------------------

fn otm_grid<F: Fn(f64, OptionKind) -> f64>(
    env: &MarketEnv,
    tau: f64,
    lo: f64,
    hi: f64,
    step: f64,
    price: F,
) -> StrikeGrid {
    let n = ((hi - lo) / step).round() as usize;
    let fwd = env.forward(tau);
    let quotes: Vec<OptionQuote> = (0..=n)
        .map(|i| {
            let k = lo + step * i as f64;
            let kind = OptionKind::otm_for(k, fwd);
            OptionQuote::from_mid(k, tau, kind, price(k, kind).max(0.0)).unwrap()
        })
        .collect();
    StrikeGrid::from_quotes(&quotes, fwd, env.discount(tau)).unwrap()
}

fn replication_accuracy() -> Check {
    let env = MarketEnv::new(100.0, 0.02, 0.01).unwrap();
    let tau = 30.0 / 365.0;
    let grid = otm_grid(&env, tau, 50.0, 200.0, 0.5, |k, kind| {
        bs_price(&env, k, tau, 0.2, kind).unwrap()
    });
    let bs = replicate_vix_squared(&grid, tau).unwrap().vix_squared;
    let bs_rel = (bs / 0.04 - 1.0).abs();
    ensure(bs_rel < 5e-3, || {
        format!("Black-Scholes replication {bs} vs 0.04")
    })?;

    let p = BatesParams::baseline();
    let oracle = bates_vix_squared(&p, tau).unwrap();
    let pricer = BatesSlicePricer::new(&p, &env, tau, &PricerSettings::default()).unwrap();
    let errs: Vec<f64> = [2.0, 1.0, 0.5]
        .iter()
        .map(|&dk| {
            let g = otm_grid(&env, tau, 20.0, 300.0, dk, |k, kind| pricer.price(k, kind));
            (replicate_vix_squared(&g, tau).unwrap().vix_squared - oracle).abs()
        })
        .collect();
    for w in errs.windows(2) {
        ensure(w[0] >= 2.0 * w[1], || {
            format!("halving spacing: error {:e} -> {:e}", w[0], w[1])
        })?;
    }
    Ok(format!(
        "BS grid rel. error {bs_rel:.2e}; Bates error at dK = 2/1/0.5: {:.1e}/{:.1e}/{:.1e}",
        errs[0], errs[1], errs[2]
    ))
}

// ---------------------------------------------------------------------------
// 6. Pricer validation against Monte Carlo
// ---------------------------------------------------------------------------

/// Bates paths with exact (non-central chi-square) variance transitions and
/// the log price rebuilt from the variance path. Returns `ln(S_T/S_0)`.
fn simulate_log_returns(
    p: &BatesParams,
    env: &MarketEnv,
    tau: f64,
    paths: usize,
    steps: usize,
    seed: u64,
) -> Vec<f64> {
    let dt = tau / steps as f64;
    let (kappa, theta, sv, rho) = (p.kappa(), p.theta(), p.sigma_v(), p.rho());
    let ekt = (-kappa * dt).exp();
    let c = sv * sv * (1.0 - ekt) / (4.0 * kappa);
    let dof = 4.0 * kappa * theta / (sv * sv);
    let drift = env.rate() - env.dividend_yield() - p.lambda() * p.mu_j();
    let m = p.jump_log_mean();
    let chunks = 64;
    let per = paths / chunks;
    (0..chunks)
        .into_par_iter()
        .flat_map_iter(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64);
            let mut out = Vec::with_capacity(per);
            for _ in 0..per {
                let mut v = p.v0();
                let mut integral = 0.0;
                for _ in 0..steps {
                    let nc = v * ekt / c;
                    let extra = if nc > 0.0 {
                        Poisson::new(0.5 * nc).unwrap().sample(&mut rng)
                    } else {
                        0.0
                    };
                    let next =
                        2.0 * c * Gamma::new(0.5 * dof + extra, 1.0).unwrap().sample(&mut rng);
                    integral += 0.5 * (v + next) * dt;
                    v = next;
                }
                let z: f64 = StandardNormal.sample(&mut rng);
                let vol_part = (v - p.v0() - kappa * theta * tau + kappa * integral) / sv;
                let mut x = drift * tau - 0.5 * integral
                    + rho * vol_part
                    + ((1.0 - rho * rho) * integral).sqrt() * z;
                if p.lambda() > 0.0 {
                    let n = Poisson::new(p.lambda() * tau).unwrap().sample(&mut rng);
                    if n > 0.0 {
                        let zj: f64 = StandardNormal.sample(&mut rng);
                        x += n * m + (n.sqrt() * p.sigma_j()) * zj;
                    }
                }
                out.push(x);
            }
            out
        })
        .collect()
}

fn mean_and_se(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.clone().count() as f64;
    let mean = xs.clone().sum::<f64>() / n;
    let var = xs.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn pricer_validation() -> Check {
    let env = MarketEnv::new(100.0, 0.02, 0.03).unwrap();
    let p = BatesParams::baseline();
    let settings = PricerSettings::default();
    let paths = 1_000_000;
    let mut worst_z: f64 = 0.0;

    // characteristic function at u = 1, one month
    let tau = 1.0 / 12.0;
    let xs = simulate_log_returns(&p, &env, tau, paths, 64, 61);
    let cf = bates_char_fn(&p, &env, tau, Complex64::new(1.0, 0.0)).unwrap();
    let (re, re_se) = mean_and_se(xs.iter().map(|x| x.cos()));
    let (im, im_se) = mean_and_se(xs.iter().map(|x| x.sin()));
    for (mc, se, exact) in [(re, re_se, cf.re), (im, im_se, cf.im)] {
        let z = (mc - exact).abs() / se;
        ensure(z < 3.0, || {
            format!("characteristic function {mc} vs {exact} ({z:.2} SE)")
        })?;
        worst_z = worst_z.max(z);
    }

    for (months, steps) in [(1u64, 64), (6, 96), (12, 128)] {
        let tau = months as f64 / 12.0;
        let xs = if months == 1 {
            xs.clone()
        } else {
            simulate_log_returns(&p, &env, tau, paths, steps, 62 + months)
        };
        let df = env.discount(tau);
        for k in [90.0, 100.0, 110.0] {
            let kind = OptionKind::otm_for(k, env.spot());
            let payoff = |x: &f64| {
                let s = env.spot() * x.exp();
                df * match kind {
                    OptionKind::Call => (s - k).max(0.0),
                    OptionKind::Put => (k - s).max(0.0),
                }
            };
            let (mc, se) = mean_and_se(xs.iter().map(payoff));
            let model =
                price_european(&p, &env, k, tau, kind, &settings).map_err(|e| e.to_string())?;
            let z = (mc - model).abs() / se;
            ensure(z < 3.0, || {
                format!("{months}m K={k}: model {model} vs MC {mc} +- {se} ({z:.2} SE)")
            })?;
            worst_z = worst_z.max(z);
        }
    }

    // parity over a parameter and strike sweep
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_parity: f64 = 0.0;
    for _ in 0..50 {
        let q = BatesParams::new(
            rng.random_range(0.01..0.2),
            rng.random_range(0.5..8.0),
            rng.random_range(0.01..0.2),
            rng.random_range(0.1..1.0),
            rng.random_range(-0.95..0.5),
            rng.random_range(0.0..3.0),
            rng.random_range(-0.2..0.1),
            rng.random_range(0.0..0.2),
        )
        .unwrap();
        for tau in [7.0 / 365.0, 0.25, 1.0] {
            let pricer = BatesSlicePricer::new(&q, &env, tau, &settings).unwrap();
            for i in 0..=30 {
                let k = 50.0 + 5.0 * i as f64;
                let c = pricer.price(k, OptionKind::Call);
                let pu = pricer.price(k, OptionKind::Put);
                let rhs = env.spot() * env.dividend_discount(tau) - k * env.discount(tau);
                if c > 0.0 && pu > 0.0 {
                    worst_parity = worst_parity.max((c - pu - rhs).abs());
                }
            }
        }
    }
    ensure(worst_parity < 1e-8 * env.spot(), || {
        format!("parity residual {worst_parity:e}")
    })?;

    let mut worst_iv: f64 = 0.0;
    for _ in 0..100 {
        // OTM strikes within three standard deviations of the forward
        let tau = rng.random_range(0.02..2.0);
        let vol = rng.random_range(0.05..0.8);
        let k = env.forward(tau) * (rng.random_range(-3.0..3.0) * vol * tau.sqrt()).exp();
        let kind = OptionKind::otm_for(k, env.forward(tau));
        let price = bs_price(&env, k, tau, vol, kind).unwrap();
        let back = implied_vol(&env, k, tau, kind, price).map_err(|e| e.to_string())?;
        worst_iv = worst_iv.max((back - vol).abs());
    }
    ensure(worst_iv < 1e-8, || {
        format!("implied vol round trip {worst_iv:e}")
    })?;
    Ok(format!(
        "9 prices + CF within {worst_z:.2} SE of 10^6-path MC; parity residual {worst_parity:.1e}; IV round trip {worst_iv:.1e}"
    ))
}

// ---------------------------------------------------------------------------
// 7. Data filters on synthetic panels and report signs
// ---------------------------------------------------------------------------

fn data_filters_and_report() -> Check {
    let spec = PanelSpec {
        n_dates: 5,
        ..PanelSpec::default()
    };
    let rows = synthetic_panel(&BatesParams::baseline(), &spec).map_err(|e| e.to_string())?;
    let cfg = FilterConfig::default();
    let mut retained_total = 0;
    for (date, day) in split_by_trade_date(rows.clone()) {
        let out = filter_trade_date(&day, &cfg).map_err(|e| e.to_string())?;
        ensure(out.retained.len() + out.rejects.len() == day.len(), || {
            format!("{date}: rows not partitioned")
        })?;
        let mut seen: Vec<usize> = out.rejects.iter().map(|r| r.index).collect();
        seen.sort_unstable();
        seen.dedup();
        ensure(seen.len() == out.rejects.len(), || {
            format!("{date}: row rejected twice")
        })?;
        ensure(
            out.rejects
                .iter()
                .all(|r| r.reason != FilterReason::ParityViolation),
            || format!("{date}: parity rejections on arbitrage-free quotes"),
        )?;
        ensure(out.surface.len() == out.retained.len(), || {
            "surface size mismatch".into()
        })?;
        let vix = jointcal::data_io::prefilter_vix(&day).map_err(|e| e.to_string())?;
        let again = apply_filters(&out.retained, &vix, &cfg).map_err(|e| e.to_string())?;
        ensure(
            again.retained == out.retained && again.rejects.is_empty(),
            || format!("{date}: filters not idempotent"),
        )?;
        retained_total += out.retained.len();
    }

    // boundaries
    let base = rows[0].clone();
    let tau = base.maturity();
    let vix = [jointcal::MaturityValue {
        maturity: tau,
        value: 0.2,
    }];
    let call_at = |k_std: f64, bid: f64, ask: f64| PanelRow {
        strike: base.underlying_close * (k_std * 0.2 * tau.sqrt()).exp(),
        kind: OptionKind::Call,
        bid,
        ask,
        ..base.clone()
    };
    let reason = |r: PanelRow| {
        apply_filters(&[r], &vix, &cfg)
            .unwrap()
            .rejects
            .first()
            .map(|x| x.reason)
    };
    ensure(
        reason(call_at(0.5, 0.05, 0.10)) == Some(FilterReason::AskAtOrBelowFloor),
        || "ask = 0.10 kept".into(),
    )?;
    ensure(
        reason(call_at(0.5, 0.05, 0.11)) != Some(FilterReason::AskAtOrBelowFloor),
        || "ask = 0.11 dropped".into(),
    )?;
    ensure(
        reason(call_at(6.01, 0.2, 0.3)) == Some(FilterReason::MoneynessBeyondLimit),
        || "|k| = 6.01 kept".into(),
    )?;
    ensure(
        reason(call_at(5.99, 0.2, 0.3)) != Some(FilterReason::MoneynessBeyondLimit),
        || "|k| = 5.99 dropped".into(),
    )?;

    // report signs on fitted results with negative mean jumps
    let spec = SimulationSpec::default();
    let start = chrono::NaiveDate::from_ymd_opt(2021, 1, 4).unwrap();
    let mut results = Vec::new();
    let mut i = 0;
    while results.len() < 60 {
        let p = draw_params(&spec, i).map_err(|e| e.to_string())?;
        i += 1;
        if p.mu_j() >= 0.0 || p.lambda() == 0.0 {
            continue;
        }
        results.push(DatedCalibration {
            trade_date: start + chrono::Duration::days(results.len() as i64),
            result: CalibrationResult {
                alpha: 0.5,
                params: p,
                objective_value: 0.0,
                iv_sse: 0.0,
                ts_penalty: 0.0,
                mae_iv_by_maturity: vec![],
                ts_error_by_maturity: vec![],
                converged: true,
                evaluations: 0,
                iv_failures: 0,
            },
        });
    }
    let series =
        multiplier_spread_series(&results, MOVING_AVERAGE_WINDOW).map_err(|e| e.to_string())?;
    for r in &series {
        ensure(r.multiplier > 2.0 && r.spread_vol > 0.0, || {
            format!(
                "{}: Q {} spread {}",
                r.trade_date, r.multiplier, r.spread_vol
            )
        })?;
        if let (Some(q), Some(s)) = (r.multiplier_ma, r.spread_vol_ma) {
            ensure(q > 2.0 && s > 0.0, || {
                format!("{}: moving averages {q} {s}", r.trade_date)
            })?;
        }
    }
    Ok(format!(
        "{} rows over 5 dates partitioned, idempotent, no parity rejections ({retained_total} retained); ask/|k| boundaries; {} report rows with Q > 2 and spread > 0",
        rows.len(),
        series.len()
    ))
}

fn main() {
    type Criterion = (&'static str, fn() -> Check);
    let criteria: [Criterion; 7] = [
        (
            "zero objective at the generating parameters",
            zero_objective_at_truth,
        ),
        ("simple jump diffusion reductions", sjd_reduction),
        ("scaled simulation study", scaled_study),
        ("closed-form identities", closed_form_identities),
        ("variance replication accuracy", replication_accuracy),
        (
            "pricer against Monte Carlo, parity, implied vol",
            pricer_validation,
        ),
        ("data filters and report signs", data_filters_and_report),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let n = i + 1;
        if only.is_some_and(|o| o != n) {
            continue;
        }
        let t0 = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = t0.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {n} PASS ({name}, {secs:.1}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n} FAIL ({name}, {secs:.1}s): {detail}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
