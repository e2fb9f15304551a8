use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use jointcal::pricing::{bs_price, implied_vol, BatesSlicePricer, PricerSettings};
use jointcal::{BatesParams, MarketEnv, OptionKind};
use std::hint::black_box;

fn pricing(c: &mut Criterion) {
    let env = MarketEnv::new(100.0, 0.02, 0.03).unwrap();
    let params = BatesParams::baseline();
    let settings = PricerSettings::default();
    let strikes: Vec<f64> = (75..=125).map(f64::from).collect();

    c.bench_function("bs_price", |b| {
        b.iter(|| bs_price(&env, black_box(105.0), 0.5, 0.2, OptionKind::Call))
    });

    let price = bs_price(&env, 95.0, 0.5, 0.23, OptionKind::Put).unwrap();
    c.bench_function("implied_vol", |b| {
        b.iter(|| implied_vol(&env, 95.0, 0.5, OptionKind::Put, black_box(price)))
    });

    let mut group = c.benchmark_group("bates_slice");
    for days in [7.0, 30.0, 365.0] {
        let tau = days / 365.0;
        group.bench_with_input(BenchmarkId::from_parameter(days), &tau, |b, &tau| {
            b.iter(|| {
                let pricer = BatesSlicePricer::new(&params, &env, tau, &settings).unwrap();
                strikes
                    .iter()
                    .map(|&k| pricer.price(k, OptionKind::otm_for(k, 100.0)))
                    .sum::<f64>()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, pricing);
criterion_main!(benches);
