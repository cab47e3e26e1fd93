//! θ sweeps over the two-signal family, written as CSV.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use qmeas::collective::strategy_reports;
use qmeas::infogain::GainReport;
use qmeas::signals::two_signal_set;
use rayon::prelude::*;

use crate::format::fmt_g12;
use crate::CliError;

pub const CSV_HEADER: &str = "theta_rad,k,strategy,i_av_bits,i_av_per_signal_bits,p_inc";
pub const DIFF_HEADER: &str = "theta_rad,k,vn_minus_usd_per_signal_bits";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrategyKind {
    Vn,
    Usd,
}

impl StrategyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StrategyKind::Vn => "vn",
            StrategyKind::Usd => "usd",
        }
    }

    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s.trim() {
            "vn" => Ok(StrategyKind::Vn),
            "usd" => Ok(StrategyKind::Usd),
            other => Err(CliError::Validation(format!("unknown strategy '{other}'"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub theta_min: f64,
    pub theta_max: f64,
    pub points: usize,
    pub k_values: Vec<usize>,
    pub strategies: Vec<StrategyKind>,
    pub output_path: PathBuf,
    pub seed: u64,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Validation(m));
        if !(self.theta_min > 0.0
            && self.theta_min <= self.theta_max
            && self.theta_max <= FRAC_PI_2)
        {
            return bad(format!(
                "theta range [{}, {}] must satisfy 0 < min <= max <= pi/2",
                self.theta_min, self.theta_max
            ));
        }
        if self.points < 2 {
            return bad(format!("points must be at least 2, got {}", self.points));
        }
        if self.k_values.is_empty() || self.k_values.contains(&0) {
            return bad("k values must be a non-empty list of positive integers".into());
        }
        if self.strategies.is_empty() {
            return bad("at least one strategy is required".into());
        }
        Ok(())
    }

    /// Uniform grid with both endpoints included exactly.
    pub fn thetas(&self) -> Vec<f64> {
        let step = (self.theta_max - self.theta_min) / (self.points - 1) as f64;
        (0..self.points)
            .map(|j| {
                if j + 1 == self.points {
                    self.theta_max
                } else {
                    self.theta_min + step * j as f64
                }
            })
            .collect()
    }

    /// `out.csv` → `out_diff.csv`.
    pub fn diff_path(&self) -> PathBuf {
        diff_path_for(&self.output_path)
    }
}

pub fn diff_path_for(path: &Path) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_diff.{}", ext.to_string_lossy()),
        None => format!("{stem}_diff"),
    };
    path.with_file_name(name)
}

#[derive(Clone, Debug)]
pub struct SweepPoint {
    pub theta: f64,
    pub k: usize,
    pub vn: GainReport,
    pub usd: GainReport,
}

/// Evaluates every (θ, K) pair; results come back in grid order.
pub fn evaluate(config: &SweepConfig) -> Result<Vec<SweepPoint>, CliError> {
    config.validate()?;
    let pairs: Vec<(f64, usize)> = config
        .thetas()
        .into_iter()
        .flat_map(|t| config.k_values.iter().map(move |&k| (t, k)))
        .collect();
    pairs
        .par_iter()
        .map(|&(theta, k)| {
            let base = two_signal_set(theta)?;
            let (vn, usd) = strategy_reports(&base, k)?;
            Ok(SweepPoint { theta, k, vn, usd })
        })
        .collect::<Result<Vec<_>, qmeas::QmError>>()
        .map_err(|e| CliError::Validation(e.to_string()))
}

pub fn render_csv(config: &SweepConfig, points: &[SweepPoint]) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for p in points {
        for s in &config.strategies {
            let r = match s {
                StrategyKind::Vn => &p.vn,
                StrategyKind::Usd => &p.usd,
            };
            let p_inc = r.p_inc.map(fmt_g12).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                fmt_g12(p.theta),
                p.k,
                s.as_str(),
                fmt_g12(r.i_av),
                fmt_g12(r.i_av_per_signal),
                p_inc
            );
        }
    }
    out
}

pub fn render_diff_csv(points: &[SweepPoint]) -> String {
    let mut out = String::new();
    out.push_str(DIFF_HEADER);
    out.push('\n');
    for p in points {
        let _ = writeln!(
            out,
            "{},{},{}",
            fmt_g12(p.theta),
            p.k,
            fmt_g12(p.vn.i_av_per_signal - p.usd.i_av_per_signal)
        );
    }
    out
}

/// Writes the main CSV and, when both strategies are requested, the
/// difference CSV. Returns the paths written.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<PathBuf>, CliError> {
    let points = evaluate(config)?;
    let mut written = vec![config.output_path.clone()];
    write_file(&config.output_path, &render_csv(config, &points))?;
    if config.strategies.contains(&StrategyKind::Vn)
        && config.strategies.contains(&StrategyKind::Usd)
    {
        let diff = config.diff_path();
        write_file(&diff, &render_diff_csv(&points))?;
        written.push(diff);
    }
    Ok(written)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
