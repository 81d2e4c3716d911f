use std::fs;
use std::io::Write;
use std::path::Path;

use hybrid_chsh_core::{BellEvaluator, GainMode, LossParams, Scenario, Thresholds};
use rayon::prelude::*;

use crate::config::{check_t_grid, linear_grid, GainModeArg, Resolved};
use crate::error::CliError;
use crate::records::{render, render_json, sig9, BoundaryRow, PointRecord, SweepRow, TableRow};
use crate::{BoundaryArgs, PointArgs, SweepArgs, Table1Args};

fn pool(threads: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))
}

fn evaluator(cfg: &Resolved) -> Result<BellEvaluator, CliError> {
    Ok(BellEvaluator::with_default_policy(cfg.cutoff)?)
}

/// Writes the whole output at once through a sibling temp file, so a failed
/// run never leaves a truncated result behind.
pub fn emit(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    let Some(path) = out else {
        let mut stdout = std::io::stdout().lock();
        return stdout.write_all(content.as_bytes()).map_err(|e| CliError::Runtime(format!("stdout: {e}")));
    };
    let fail = |e: std::io::Error| CliError::Runtime(format!("cannot write {}: {e}", path.display()));
    let name = path.file_name().ok_or_else(|| CliError::Runtime(format!("not a file path: {}", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(".partial");
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, content).map_err(fail)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        fail(e)
    })
}

pub fn sweep(args: &SweepArgs) -> Result<(), CliError> {
    let cfg = Resolved::new(&args.common)?;
    let grid = cfg.zeta_grid(args.zeta_lo, args.zeta_hi, args.zeta_step)?;
    let loss = cfg.loss(&args.loss)?;
    let format = cfg.format(args.format);
    let ev = evaluator(&cfg)?;
    let points = pool(cfg.threads)?.install(|| {
        grid.par_iter().map(|&z| ev.sweep_point(z, loss)).collect::<Result<Vec<_>, _>>()
    })?;
    let rows: Vec<SweepRow> = points.iter().map(SweepRow::from).collect();
    emit(cfg.out.as_deref(), &render(&rows, format)?)
}

pub fn boundary(args: &BoundaryArgs) -> Result<(), CliError> {
    let cfg = Resolved::new(&args.common)?;
    let t_grid = args.t_grid.clone().or_else(|| cfg.file.t_grid.clone()).unwrap_or_else(|| {
        linear_grid(0.8, 1.0, 0.05).expect("default grid is valid")
    });
    check_t_grid(&t_grid)?;
    let eta_xs = match &args.eta_x {
        Some(v) => v.clone(),
        None => vec![cfg.file.loss.eta_x.unwrap_or(1.0)],
    };
    if let Some(e) = eta_xs.iter().find(|e| !(0.0..=1.0).contains(*e)) {
        return Err(CliError::Usage(format!("--eta-x values must lie in [0, 1], got {e}")));
    }
    let modes = cfg.gain_mode(args.gain_mode, GainModeArg::Optimized).modes();
    let format = cfg.format(args.format);
    let ev = evaluator(&cfg)?;

    let mut jobs: Vec<(GainMode, f64, f64)> = Vec::new();
    for &mode in &modes {
        for &eta_x in &eta_xs {
            jobs.extend(t_grid.iter().map(|&t| (mode, eta_x, t)));
        }
    }
    let rows = pool(cfg.threads)?.install(|| {
        jobs.par_iter()
            .map(|&(mode, eta_x, t)| Ok(BoundaryRow::new(mode, eta_x, &ev.boundary_point(t, eta_x, mode)?)))
            .collect::<Result<Vec<_>, CliError>>()
    })?;
    emit(cfg.out.as_deref(), &render(&rows, format)?)
}

/// Quantities computed for the loss table, in output order.
#[derive(Clone, Copy)]
enum TableJob {
    DetectorEfficiency(GainMode),
    Transmittance(Scenario, GainMode),
}

pub fn table1(args: &Table1Args) -> Result<(), CliError> {
    use GainMode::*;
    use Scenario::*;
    use TableJob::*;
    let cfg = Resolved::new(&args.common)?;
    let format = cfg.format(args.format);
    let ev = evaluator(&cfg)?;
    let jobs = [
        DetectorEfficiency(Optimized),
        Transmittance(AmplifyAtSource, Optimized),
        DetectorEfficiency(FixedZero),
        Transmittance(AmplifyAtSource, FixedZero),
        Transmittance(AmplifyAtReceivers, Optimized),
    ];
    let v = pool(cfg.threads)?.install(|| {
        jobs.par_iter()
            .map(|job| match *job {
                DetectorEfficiency(mode) => ev.min_detector_efficiency(AmplifyAtSource, mode, 1.0, 1.0),
                Transmittance(scenario, mode) => ev.min_transmittance(scenario, mode, 1.0, 1.0),
            })
            .map(|r| r.map(sig9))
            .collect::<Result<Vec<_>, _>>()
    })?;
    let rows = [
        TableRow { state: "|Ψ2⟩", source: "computed", eta_n_min: Some(v[0]), t_min: Some(v[1]) },
        TableRow { state: "|ψ2⟩", source: "computed", eta_n_min: Some(v[2]), t_min: Some(v[3]) },
        TableRow {
            state: "|Ψ2⟩ amplified after transmission",
            source: "computed",
            eta_n_min: None,
            t_min: Some(v[4]),
        },
        TableRow { state: "|ψ_E(λ)⟩", source: "not computed", eta_n_min: Some(0.648), t_min: Some(0.805) },
        TableRow { state: "|P_H⟩", source: "not computed", eta_n_min: None, t_min: Some(0.92) },
    ];
    emit(cfg.out.as_deref(), &render(&rows, format)?)
}

pub fn point(args: &PointArgs) -> Result<(), CliError> {
    let cfg = Resolved::new(&args.common)?;
    let loss: LossParams = cfg.loss(&args.loss)?;
    let gain = hybrid_chsh_core::Gain::new(args.zeta).map_err(|e| CliError::Usage(format!("--zeta: {e}")))?;
    let th = Thresholds::new(args.n0, args.x0).map_err(|e| CliError::Usage(format!("thresholds: {e}")))?;
    let ev = evaluator(&cfg)?;
    let r = ev.bell_value(Scenario::AmplifyAtSource, gain, th, loss)?;
    emit(cfg.out.as_deref(), &render_json(&PointRecord::from(&r))?)
}
