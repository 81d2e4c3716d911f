//! Run configuration: command-line flags layered over an optional JSON file.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use hybrid_chsh_core::{FockCutoff, GainMode, LossParams};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GainModeArg {
    /// Gain optimized per point.
    Optimized,
    /// Bare N00N state (ζ = 0).
    #[value(name = "fixed_zero")]
    FixedZero,
    /// Both of the above.
    Both,
}

impl GainModeArg {
    pub fn modes(self) -> Vec<GainMode> {
        match self {
            GainModeArg::Optimized => vec![GainMode::Optimized],
            GainModeArg::FixedZero => vec![GainMode::FixedZero],
            GainModeArg::Both => vec![GainMode::Optimized, GainMode::FixedZero],
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
    pub step: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossSpec {
    pub t: Option<f64>,
    pub eta_n: Option<f64>,
    pub eta_x: Option<f64>,
}

/// Contents of a `--config` file. Every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub cutoff: Option<usize>,
    #[serde(default)]
    pub zeta_grid: GridSpec,
    #[serde(default)]
    pub loss: LossSpec,
    pub gain_mode: Option<GainModeArg>,
    pub output_path: Option<PathBuf>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
    pub t_grid: Option<Vec<f64>>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON config file; flags override its values.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Fock cutoff nmax per mode.
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Output file; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Worker threads; 0 uses the available parallelism.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct LossArgs {
    /// Transmittance of each channel.
    #[arg(long)]
    pub t: Option<f64>,
    /// Photon-counting detector efficiency.
    #[arg(long)]
    pub eta_n: Option<f64>,
    /// Homodyne detector efficiency.
    #[arg(long)]
    pub eta_x: Option<f64>,
}

/// Settings shared by every subcommand after merging flags and file.
#[derive(Debug)]
pub struct Resolved {
    pub cutoff: FockCutoff,
    pub out: Option<PathBuf>,
    pub threads: usize,
    pub file: FileConfig,
}

impl Resolved {
    pub fn new(common: &CommonArgs) -> Result<Self, CliError> {
        let file = FileConfig::load(common.config.as_deref())?;
        let nmax = common.cutoff.or(file.cutoff).unwrap_or(hybrid_chsh_core::DEFAULT_NMAX);
        let cutoff = FockCutoff::new(nmax).map_err(|e| CliError::Usage(format!("--cutoff: {e}")))?;
        Ok(Self {
            cutoff,
            out: common.out.clone().or_else(|| file.output_path.clone()),
            threads: common.threads.or(file.threads).unwrap_or(0),
            file,
        })
    }

    pub fn format(&self, flag: Option<Format>) -> Format {
        flag.or(self.file.format).unwrap_or(Format::Csv)
    }

    pub fn gain_mode(&self, flag: Option<GainModeArg>, default: GainModeArg) -> GainModeArg {
        flag.or(self.file.gain_mode).unwrap_or(default)
    }

    pub fn loss(&self, flags: &LossArgs) -> Result<LossParams, CliError> {
        let f = &self.file.loss;
        LossParams::new(
            flags.t.or(f.t).unwrap_or(1.0),
            flags.eta_n.or(f.eta_n).unwrap_or(1.0),
            flags.eta_x.or(f.eta_x).unwrap_or(1.0),
        )
        .map_err(|e| CliError::Usage(format!("loss parameters: {e}")))
    }

    pub fn zeta_grid(&self, lo: Option<f64>, hi: Option<f64>, step: Option<f64>) -> Result<Vec<f64>, CliError> {
        let g = &self.file.zeta_grid;
        let lo = lo.or(g.lo).unwrap_or(0.0);
        let hi = hi.or(g.hi).unwrap_or(0.6);
        let step = step.or(g.step).unwrap_or(0.01);
        linear_grid(lo, hi, step)
    }
}

/// `lo, lo + step, …` up to `hi` inclusive, with values rounded to 12 decimals.
pub fn linear_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(CliError::Usage(format!("grid step must be positive, got {step}")));
    }
    if !(lo >= 0.0 && lo <= hi && hi.is_finite()) {
        return Err(CliError::Usage(format!("grid needs 0 <= lo <= hi, got lo={lo} hi={hi}")));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| ((lo + i as f64 * step) * 1e12).round() / 1e12).collect())
}

pub fn check_t_grid(grid: &[f64]) -> Result<(), CliError> {
    if grid.is_empty() {
        return Err(CliError::Usage("t grid is empty".into()));
    }
    if let Some(t) = grid.iter().find(|t| !(**t > 0.0 && **t <= 1.0)) {
        return Err(CliError::Usage(format!("t grid values must lie in (0, 1], got {t}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_includes_both_ends() {
        assert_eq!(linear_grid(0.18, 0.20, 0.01).unwrap(), vec![0.18, 0.19, 0.2]);
        assert_eq!(linear_grid(0.0, 0.0, 1.0).unwrap(), vec![0.0]);
        assert_eq!(linear_grid(0.0, 0.6, 0.01).unwrap().len(), 61);
    }

    #[test]
    fn bad_grids_are_usage_errors() {
        assert!(matches!(linear_grid(0.0, 1.0, 0.0), Err(CliError::Usage(_))));
        assert!(matches!(linear_grid(0.5, 0.1, 0.1), Err(CliError::Usage(_))));
        assert!(check_t_grid(&[0.0]).is_err());
        assert!(check_t_grid(&[1.2]).is_err());
    }

    #[test]
    fn file_config_rejects_unknown_keys() {
        assert!(serde_json::from_str::<FileConfig>(r#"{"cutof": 3}"#).is_err());
        let c: FileConfig = serde_json::from_str(r#"{"loss": {"t": 0.9}, "gain_mode": "fixed_zero"}"#).unwrap();
        assert_eq!(c.loss.t, Some(0.9));
        assert_eq!(c.gain_mode, Some(GainModeArg::FixedZero));
    }
}
