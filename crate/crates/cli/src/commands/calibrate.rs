use chrono::NaiveDate;
use jointcal::calibration::calibrate;
use jointcal::data_io::{build_market_ts, MoneynessBucket};
use jointcal::objective::model_implied_vols;
use jointcal::pricing::PricerSettings;
use jointcal::report::DatedCalibration;
use jointcal::simulation::{bucket_errors, generate_surface, SimulationSpec};
use jointcal::{
    BatesParams, CalibrationConfig, CalibrationResult, TsKind, VarianceTermStructure, VolSurface,
};
use serde::{Deserialize, Serialize};

use super::vix::{filtered_dates, PanelConfig};
use crate::args::{CalibrateArgs, GlobalArgs};
use crate::error::CliError;
use crate::output::{load_config, read_json, Cell, OutputSink, Table};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct CalibrateConfig {
    pub calibration: CalibrationConfig,
    pub pricer: PricerSettings,
    /// Loading, filtering and horizon settings for `--panel`.
    pub panel: PanelConfig,
    /// Market layout for `--synthetic`.
    pub synthetic: SimulationSpec,
}

/// One market to fit: a surface and the observed term structure.
struct Market {
    trade_date: Option<NaiveDate>,
    surface: VolSurface,
    ts: VarianceTermStructure,
}

impl Market {
    fn label(&self) -> String {
        self.trade_date
            .map_or_else(|| "market".to_string(), |d| d.to_string())
    }
}

fn load_markets(
    args: &CalibrateArgs,
    cfg: &CalibrateConfig,
    sink: &mut OutputSink,
) -> Result<Vec<Market>, CliError> {
    let wanted = cfg.calibration.ts_kind.observed_kind();
    if let Some(panel) = &args.panel {
        if wanted != TsKind::VixSquared {
            return Err(CliError::Validation(
                "a quote panel only yields a VIX² curve; set calibration.ts_kind to vix_squared"
                    .into(),
            ));
        }
        let mut out = Vec::new();
        for (date, outcome) in filtered_dates(panel, &cfg.panel, sink)? {
            if outcome.surface.is_empty() {
                eprintln!("warning: {date}: no quotes survived the filters, skipped");
                continue;
            }
            let ts = build_market_ts(&outcome.surface, &cfg.panel.horizons)?;
            for w in &ts.warnings {
                eprintln!("warning: {date}: {w}");
            }
            out.push(Market {
                trade_date: Some(date),
                surface: outcome.surface,
                ts: ts.curve,
            });
        }
        return Ok(out);
    }
    if let (Some(surface), Some(ts)) = (&args.surface, &args.term_structure) {
        sink.record_input(surface)?;
        sink.record_input(ts)?;
        let ts: VarianceTermStructure = read_json(ts)?;
        if ts.kind() != wanted {
            return Err(CliError::Validation(format!(
                "term structure is {:?} but the configured penalty needs {wanted:?}",
                ts.kind()
            )));
        }
        return Ok(vec![Market {
            trade_date: None,
            surface: read_json(surface)?,
            ts,
        }]);
    }
    if let Some(path) = &args.synthetic {
        sink.record_input(path)?;
        let params: BatesParams = read_json(path)?;
        let m = generate_surface(&params, &cfg.synthetic)?;
        for w in &m.warnings {
            eprintln!("warning: {w}");
        }
        let ts = match wanted {
            TsKind::VixSquared => m.vix_ts,
            TsKind::VarianceSwap => m.vs_ts,
        };
        return Ok(vec![Market {
            trade_date: None,
            surface: m.surface,
            ts,
        }]);
    }
    Err(CliError::Validation(
        "one of --panel, --surface with --term-structure, or --synthetic is required".into(),
    ))
}

fn alpha_tag(alpha: f64) -> String {
    format!("{alpha}").replace('.', "p")
}

pub fn run(global: &GlobalArgs, args: &CalibrateArgs) -> Result<(), CliError> {
    let mut cfg: CalibrateConfig = load_config(global)?;
    if let Some(seed) = global.seed {
        cfg.calibration.optimizer.seed = seed;
    }
    let alphas = match (&args.alpha_sweep, args.alpha) {
        (Some(sweep), _) => sweep.clone(),
        (None, Some(a)) => vec![a],
        (None, None) => vec![cfg.calibration.alpha],
    };
    if alphas.is_empty() {
        return Err(CliError::Validation(
            "--alpha-sweep needs at least one value".into(),
        ));
    }
    for &a in &alphas {
        CalibrationConfig {
            alpha: a,
            ..cfg.calibration.clone()
        }
        .validate()?;
    }
    cfg.pricer.validate()?;

    let seed = Some(cfg.calibration.optimizer.seed);
    let mut sink = OutputSink::new(global, "calibrate", &(&cfg, &alphas), seed, false)?;
    if let Some(p) = &global.config {
        sink.record_input(p)?;
    }
    let markets = load_markets(args, &cfg, &mut sink)?;
    if markets.is_empty() {
        return Err(CliError::Validation(
            "no market survived loading and filtering".into(),
        ));
    }

    let mut mae = Table::new(&["market", "alpha", "bucket", "mae_iv_vol_pct", "contracts"]);
    let mut failures = 0usize;
    for market in &markets {
        let label = market.label();
        for &alpha in &alphas {
            let config = CalibrationConfig {
                alpha,
                ..cfg.calibration.clone()
            };
            let result = match calibrate(&market.surface, &market.ts, &config, &cfg.pricer) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("warning: {label} alpha {alpha}: {e}");
                    failures += 1;
                    continue;
                }
            };
            if !result.converged {
                eprintln!("warning: {label} alpha {alpha}: optimizer stopped before converging");
            }
            let stem = format!("{label}_a{}", alpha_tag(alpha));
            match market.trade_date {
                Some(trade_date) => sink.json(
                    &format!("calibration_{stem}.json"),
                    &DatedCalibration {
                        trade_date,
                        result: result.clone(),
                    },
                )?,
                None => sink.json(&format!("calibration_{stem}.json"), &result)?,
            }

            let vols = model_implied_vols(&result.params, &market.surface, &cfg.pricer)?;
            sink.table(
                &format!("smile_{stem}"),
                &smile_table(&market.surface, &vols),
            )?;
            sink.table(
                &format!("term_structure_{stem}"),
                &ts_table(&market.ts, &result),
            )?;
            let errs = bucket_errors(&market.surface, &vols);
            for b in MoneynessBucket::ALL {
                mae.push(vec![
                    label.clone().into(),
                    alpha.into(),
                    b.as_str().into(),
                    Cell::opt(errs.mae_pct(b)),
                    Cell::Int(errs.count[b as usize] as i64),
                ]);
            }
        }
    }
    sink.table("mae_by_bucket", &mae)?;
    sink.finish()?;
    if failures == markets.len() * alphas.len() {
        return Err(CliError::Numerical("every calibration failed".into()));
    }
    Ok(())
}

fn smile_table(surface: &VolSurface, vols: &[Vec<Option<f64>>]) -> Table {
    let mut t = Table::new(&[
        "maturity_yr",
        "strike_ccy",
        "kind",
        "std_moneyness",
        "market_iv_vol_pct",
        "model_iv_vol_pct",
    ]);
    for (quotes, model) in surface.quotes().iter().zip(vols) {
        for (q, m) in quotes.iter().zip(model) {
            t.push(vec![
                q.maturity.into(),
                q.strike.into(),
                q.kind.as_str().into(),
                Cell::opt(q.std_moneyness),
                Cell::opt(q.implied_vol.map(|v| 100.0 * v)),
                Cell::opt(m.map(|v| 100.0 * v)),
            ]);
        }
    }
    t
}

fn ts_table(observed: &VarianceTermStructure, result: &CalibrationResult) -> Table {
    let kind = match observed.kind() {
        TsKind::VixSquared => "vix_squared",
        TsKind::VarianceSwap => "variance_swap",
    };
    let mut t = Table::new(&[
        "maturity_yr",
        "kind",
        "market_vol_pct",
        "model_vol_pct",
        "error_vol_pct",
    ]);
    for (p, e) in observed.points().iter().zip(&result.ts_error_by_maturity) {
        let market = p.level.sqrt();
        t.push(vec![
            p.maturity.into(),
            kind.into(),
            (100.0 * market).into(),
            (100.0 * (market + e.value)).into(),
            (100.0 * e.value).into(),
        ]);
    }
    t
}
