use jointcal::calibration::ParamTransform;
use jointcal::pricing::{bs_price, implied_vol, BatesSlicePricer, PricerSettings};
use jointcal::variance::{
    bates_variance_swap, bates_vix_squared, log_contract_multiplier, replicate_vix_squared,
    StrikeGrid,
};
use jointcal::{BatesParams, MarketEnv, OptionKind, ParamBounds};
use proptest::prelude::*;

fn env_strategy() -> impl Strategy<Value = MarketEnv> {
    (50.0..200.0f64, -0.01..0.08f64, 0.0..0.05f64)
        .prop_map(|(s, r, q)| MarketEnv::new(s, r, q).unwrap())
}

fn bates_strategy() -> impl Strategy<Value = BatesParams> {
    (
        (0.005..0.2f64, 0.2..6.0f64, 0.005..0.2f64, 0.1..1.0f64),
        (-0.95..0.3f64, 0.0..2.0f64, -0.3..0.1f64, 0.0..0.3f64),
    )
        .prop_map(|((v0, k, th, sv), (rho, l, mu, sj))| {
            BatesParams::new(v0, k, th, sv, rho, l, mu, sj).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn black_scholes_satisfies_put_call_parity(
        env in env_strategy(),
        moneyness in 0.6..1.6f64,
        tau in 0.02..3.0f64,
        vol in 0.05..1.2f64,
    ) {
        let k = moneyness * env.spot();
        let c = bs_price(&env, k, tau, vol, OptionKind::Call).unwrap();
        let p = bs_price(&env, k, tau, vol, OptionKind::Put).unwrap();
        let parity = env.spot() * env.dividend_discount(tau) - k * env.discount(tau);
        prop_assert!((c - p - parity).abs() < 1e-10 * env.spot());
    }

    #[test]
    fn implied_vol_inverts_otm_prices(
        env in env_strategy(),
        z in -2.0..2.0f64,
        tau in 0.05..2.0f64,
        vol in 0.05..0.9f64,
    ) {
        let k = env.forward(tau) * (z * vol * tau.sqrt()).exp();
        let kind = OptionKind::otm_for(k, env.forward(tau));
        let price = bs_price(&env, k, tau, vol, kind).unwrap();
        prop_assume!(price > 1e-8 * env.spot());
        let iv = implied_vol(&env, k, tau, kind, price).unwrap();
        prop_assert!((iv - vol).abs() < 1e-7, "{} vs {}", iv, vol);
    }

    #[test]
    fn negative_mean_jumps_raise_the_multiplier_above_two(
        p in bates_strategy(),
        tau in 0.01..2.0f64,
    ) {
        prop_assume!(p.lambda() > 1e-3 && p.mu_j() < -1e-3);
        let q = log_contract_multiplier(&p, tau).unwrap();
        prop_assert!(q > 2.0, "q = {}", q);
        let vs = bates_variance_swap(&p, tau).unwrap();
        let vix2 = bates_vix_squared(&p, tau).unwrap();
        prop_assert!(vs > vix2);
    }

    #[test]
    fn multiplier_is_two_without_jumps(p in bates_strategy(), tau in 0.01..2.0f64) {
        let a = p.to_array();
        let no_jumps = BatesParams::new(a[0], a[1], a[2], a[3], a[4], 0.0, a[6], a[7]).unwrap();
        prop_assert_eq!(log_contract_multiplier(&no_jumps, tau).unwrap(), 2.0);
    }

    #[test]
    fn search_transform_round_trips_inside_the_bounds(p in bates_strategy()) {
        let t = ParamTransform::new(&ParamBounds::default()).unwrap();
        let back = t.from_search(&t.to_search(&p)).unwrap();
        for (x, y) in p.to_array().iter().zip(back.to_array()) {
            prop_assert!((x - y).abs() <= 1e-12 * (1.0 + x.abs()), "{} vs {}", x, y);
        }
    }

    #[test]
    fn bates_call_prices_decrease_in_strike(p in bates_strategy(), tau in 0.02..1.0f64) {
        let env = MarketEnv::new(100.0, 0.02, 0.01).unwrap();
        let pricer = BatesSlicePricer::new(&p, &env, tau, &PricerSettings::default()).unwrap();
        let mut last = f64::INFINITY;
        for k in (60..=140).step_by(5) {
            let c = pricer.price(f64::from(k), OptionKind::Call);
            prop_assert!(c <= last + 1e-9, "strike {}: {} after {}", k, c, last);
            last = c;
            prop_assert!(pricer.parity_residual(f64::from(k)).abs() / env.spot() < 1e-8);
        }
    }

    #[test]
    fn replication_recovers_black_scholes_variance(vol in 0.08..0.6f64, tau in 0.05..1.0f64) {
        let env = MarketEnv::new(100.0, 0.0, 0.0).unwrap();
        let forward = env.forward(tau);
        let strikes: Vec<f64> = (20..=20000).map(|i| f64::from(i) * 0.05).collect();
        let prices = strikes
            .iter()
            .map(|&k| bs_price(&env, k, tau, vol, OptionKind::otm_for(k, forward)).unwrap())
            .collect();
        let grid = StrikeGrid::new(strikes, prices, forward).unwrap();
        let v2 = replicate_vix_squared(&grid, tau).unwrap().vix_squared;
        prop_assert!((v2 / (vol * vol) - 1.0).abs() < 2e-3, "{} vs {}", v2, vol * vol);
    }
}
