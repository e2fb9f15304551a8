use jointcal::simulation::{run_recovery_study, RecoveryStudy, SimulationSpec};

use crate::args::{GlobalArgs, SimulateArgs};
use crate::error::CliError;
use crate::output::{load_config, read_json, Cell, OutputSink, Table};

pub fn run(global: &GlobalArgs, args: &SimulateArgs) -> Result<(), CliError> {
    let mut spec: SimulationSpec = match &args.spec {
        Some(p) => read_json(p)?,
        None => load_config(global)?,
    };
    if let Some(seed) = global.seed {
        spec.seed = seed;
    }
    if let Some(n) = args.n_draws {
        spec.n_draws = n;
    }
    spec.validate()?;

    let mut sink = OutputSink::new(global, "simulate", &spec, Some(spec.seed), false)?;
    for p in args.spec.iter().chain(&global.config) {
        sink.record_input(p)?;
    }
    let study = run_recovery_study(&spec)?;
    write_study(&mut sink, &study)?;
    sink.finish()
}

fn write_study(sink: &mut OutputSink, study: &RecoveryStudy) -> Result<(), CliError> {
    let s = &study.summary;
    let mut t = Table::new(&[
        "mode",
        "alpha",
        "bucket",
        "mae_iv_vol_pct",
        "contracts",
        "recovery_rate_frac",
        "recovered",
        "completed",
        "failures",
    ]);
    for b in &s.buckets {
        let r = s.rate(b.mode, b.alpha);
        t.push(vec![
            b.mode.as_str().into(),
            b.alpha.into(),
            b.bucket.as_str().into(),
            Cell::opt(b.mae_iv_pct),
            Cell::Int(b.contracts as i64),
            Cell::opt(r.map(|r| r.rate)),
            r.map_or(Cell::Empty, |r| Cell::Int(r.recovered as i64)),
            r.map_or(Cell::Empty, |r| Cell::Int(r.completed as i64)),
            r.map_or(Cell::Empty, |r| Cell::Int(r.failures as i64)),
        ]);
    }
    sink.table("recovery_summary", &t)?;

    let mut v = Table::new(&[
        "mode",
        "alpha",
        "maturity_days",
        "mean_abs_vix_error_vol_pct",
    ]);
    for r in &s.vix_errors {
        v.push(vec![
            r.mode.as_str().into(),
            r.alpha.into(),
            r.maturity_days.into(),
            r.mean_abs_error_pct.into(),
        ]);
    }
    sink.table("vix_fit_errors", &v)?;

    let mut d = Table::new(&[
        "draw",
        "mode",
        "alpha",
        "recovered",
        "recovery_error_rel",
        "objective_value",
        "evaluations",
        "error",
    ]);
    for r in &study.records {
        d.push(vec![
            Cell::Int(r.draw as i64),
            r.mode.as_str().into(),
            r.alpha.into(),
            r.recovered.to_string().into(),
            r.recovery_error.into(),
            r.objective_value.into(),
            Cell::Int(r.evaluations as i64),
            r.error.clone().unwrap_or_default().into(),
        ]);
    }
    sink.table("draws", &d)?;
    sink.json("recovery_summary.json", s)?;
    let failures: usize = s.rates.iter().map(|r| r.failures).sum();
    if failures > 0 {
        eprintln!("warning: {failures} calibration(s) failed and were excluded");
    }
    Ok(())
}
