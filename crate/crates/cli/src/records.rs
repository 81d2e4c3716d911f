//! Output records and their CSV/JSON rendering.

use hybrid_chsh_core::chsh::{BoundaryPoint, SweepPoint};
use hybrid_chsh_core::{BellResult, GainMode};
use serde::Serialize;

use crate::config::Format;
use crate::error::CliError;

/// Rounds to 9 significant digits so output diffs stay stable.
pub fn sig9(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.8e}").parse().expect("formatted float parses")
}

pub fn gain_mode_name(mode: GainMode) -> &'static str {
    match mode {
        GainMode::Optimized => "optimized",
        GainMode::FixedZero => "fixed_zero",
    }
}

#[derive(Debug, Serialize)]
pub struct SweepRow {
    pub zeta: f64,
    pub n_tot_mean: f64,
    pub b_opt: f64,
    pub n0_opt: usize,
    pub x0_opt: f64,
    pub e_xx: f64,
    pub e_xn: f64,
    pub e_nn: f64,
}

impl From<&SweepPoint> for SweepRow {
    fn from(p: &SweepPoint) -> Self {
        SweepRow {
            zeta: sig9(p.zeta),
            n_tot_mean: sig9(p.n_tot_mean),
            b_opt: sig9(p.b_opt()),
            n0_opt: p.n0_opt(),
            x0_opt: sig9(p.x0_opt()),
            e_xx: sig9(p.best.e_xx),
            e_xn: sig9(p.best.e_xn),
            e_nn: sig9(p.best.e_nn),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct BoundaryRow {
    pub gain_mode: &'static str,
    pub eta_x: f64,
    pub t: f64,
    /// Empty when no `η_N ≤ 1` violates the bound at this `t`.
    pub eta_n_min: Option<f64>,
    pub violation: bool,
}

impl BoundaryRow {
    pub fn new(mode: GainMode, eta_x: f64, p: &BoundaryPoint) -> Self {
        BoundaryRow {
            gain_mode: gain_mode_name(mode),
            eta_x: sig9(eta_x),
            t: sig9(p.t),
            eta_n_min: p.eta_n_min.map(sig9),
            violation: p.eta_n_min.is_some(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct TableRow {
    pub state: &'static str,
    pub source: &'static str,
    pub eta_n_min: Option<f64>,
    pub t_min: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct PointRecord {
    pub b_value: f64,
    pub e_xx: f64,
    pub e_xn: f64,
    pub e_nx: f64,
    pub e_nn: f64,
    pub violates: bool,
    pub zeta: f64,
    pub n0: usize,
    pub x0: f64,
    pub t: f64,
    pub eta_n: f64,
    pub eta_x: f64,
}

impl From<&BellResult> for PointRecord {
    fn from(r: &BellResult) -> Self {
        let s = &r.settings;
        PointRecord {
            b_value: sig9(r.b_value),
            e_xx: sig9(r.e_xx),
            e_xn: sig9(r.e_xn),
            e_nx: sig9(r.e_nx),
            e_nn: sig9(r.e_nn),
            violates: r.violates(),
            zeta: sig9(s.zeta),
            n0: s.n0,
            x0: sig9(s.x0),
            t: sig9(s.loss.t),
            eta_n: sig9(s.loss.eta_n),
            eta_x: sig9(s.loss.eta_x),
        }
    }
}

pub fn render<T: Serialize>(rows: &[T], format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => render_json(rows),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in rows {
                w.serialize(row).map_err(|e| CliError::Runtime(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| CliError::Runtime(e.to_string()))
        }
    }
}

pub fn render_json<T: Serialize + ?Sized>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
    s.push('\n');
    Ok(s)
}
