//! Command-line front end: optimal-measurement reports for signal sets read
//! from JSON, θ sweeps of the two-signal family written as CSV, and a
//! self-check of the library's invariants.
//!
//! Exit codes: 0 success, 1 failed verification, 2 invalid input, 3 strict
//! mode rejected a degenerate spectrum, 4 I/O failure.

pub mod format;
pub mod sweep;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, PI};
use std::fmt::Write as _;

use qmeas::collective::{p2_factorization_error, so2_brute_force, superposition_bound_check};
use qmeas::infogain::{entropy_extrema_probe, info_gain_usd, info_gain_von_neumann, GainReport};
use qmeas::matlin::svd;
use qmeas::signals::{two_signal_set, SignalSet};
use qmeas::usd::usd_povm;
use qmeas::vnopt::{
    is_doubly_stochastic, optimal_von_neumann, probability_matrix, sinkhorn_scale,
    SINKHORN_MAX_ITER, SINKHORN_TOL,
};
use qmeas::QmError;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    /// Carries the report that was produced before the strict check fired.
    StrictDegenerate(String),
    Io(String),
    VerificationFailed,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerificationFailed => 1,
            CliError::Validation(_) => 2,
            CliError::StrictDegenerate(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation error: {m}"),
            CliError::StrictDegenerate(_) => write!(
                f,
                "DegenerateSpectrum: repeated singular values, optimal basis is not unique"
            ),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
            CliError::VerificationFailed => write!(f, "verification failed"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<QmError> for CliError {
    fn from(e: QmError) -> Self {
        CliError::Validation(e.to_string())
    }
}

pub fn load_signal_set(path: &str) -> Result<SignalSet, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
    Ok(SignalSet::from_json_str(&text)?)
}

fn write_report(out: &mut String, r: &GainReport) {
    let _ = writeln!(out, "gain report:");
    let _ = writeln!(out, "  strategy          {:?}", r.strategy);
    let _ = writeln!(out, "  k                 {}", r.k);
    let _ = writeln!(out, "  H_in  (bits)      {:.10}", r.h_in);
    let _ = writeln!(out, "  H_fin (bits)      {:.10}", r.h_fin);
    let _ = writeln!(out, "  I_av  (bits)      {:.10}", r.i_av);
    let _ = writeln!(out, "  I_av / signal     {:.10}", r.i_av_per_signal);
    if let Some(p) = r.p_inc {
        let _ = writeln!(out, "  p_inc             {:.10}", p);
    }
}

/// Text report for the optimal von Neumann measurement, plus whether the
/// signal matrix has a degenerate spectrum.
pub fn optimize_report(s: &SignalSet) -> Result<(String, bool), CliError> {
    let f = svd(s.a())?;
    let basis = optimal_von_neumann(s)?;
    let p = probability_matrix(&basis, s)?;
    let report = info_gain_von_neumann(s, &basis)?;
    let ds = is_doubly_stochastic(p.as_matrix(), 1e-10);

    let mut out = String::new();
    if !s.label().is_empty() {
        let _ = writeln!(out, "signal set: {}", s.label());
    }
    let _ = writeln!(out, "singular values: {:?}", f.sigma);
    if basis.degenerate() {
        let _ = writeln!(
            out,
            "warning: DegenerateSpectrum (optimality not certified unique)"
        );
    }
    let _ = writeln!(out, "optimal basis B = U·Vᴴ:\n{:.10}", basis.b());
    let _ = writeln!(out, "probability matrix P:\n{:.10}", p.as_matrix());
    let _ = writeln!(out, "doubly stochastic: {ds}");
    if !ds {
        let r = sinkhorn_scale(p.as_matrix(), SINKHORN_TOL, SINKHORN_MAX_ITER)?;
        let _ = writeln!(
            out,
            "sinkhorn: converged={} iterations={} residual={:e}",
            r.converged, r.iterations, r.residual
        );
        let _ = writeln!(out, "sinkhorn limit:\n{:.10}", r.t);
    }
    write_report(&mut out, &report);
    Ok((out, basis.degenerate()))
}

pub fn povm_report(s: &SignalSet) -> Result<String, CliError> {
    let povm = usd_povm(s)?;
    let report = info_gain_usd(&povm, s.n()).with_k(s.k());
    let mut out = String::new();
    if !s.label().is_empty() {
        let _ = writeln!(out, "signal set: {}", s.label());
    }
    let _ = writeln!(out, "reciprocal states Ã:\n{:.10}", povm.reciprocal);
    let _ = writeln!(out, "p_inc: {:.12}", povm.p_inc);
    for (i, spec) in povm.spectra()?.iter().enumerate() {
        let _ = writeln!(out, "spectrum of Π_{i}: {spec:?}");
    }
    let _ = writeln!(
        out,
        "completeness residual: {:e}",
        povm.completeness_residual()
    );
    let _ = writeln!(out, "unambiguity error: {:e}", povm.unambiguity_error(s)?);
    write_report(&mut out, &report);
    Ok(out)
}

/// One line of `verify` output.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Kronecker factorization, SO(2) brute force, superposition search and the
/// entropy extrema probe.
pub fn verify_checks(seed: u64) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();

    let grid: Vec<f64> = (1..=100).map(|j| FRAC_PI_2 * j as f64 / 100.0).collect();
    let worst = grid
        .iter()
        .map(|&t| p2_factorization_error(&two_signal_set(t)?))
        .collect::<Result<Vec<f64>, QmError>>()?
        .into_iter()
        .fold(0.0, f64::max);
    checks.push(Check {
        name: "kronecker factorization P2 = P (x) P".into(),
        passed: worst < 1e-10,
        detail: format!("max ‖P2 − P⊗P‖_F = {worst:e}"),
    });

    for j in 1..=6 {
        let theta = PI * j as f64 / 12.0;
        let r = so2_brute_force(theta, 10_000)?;
        checks.push(Check {
            name: format!("so2 brute force theta={theta:.6}"),
            passed: r.excess_over_optimal() <= 1e-9 && r.tan_deviation() <= 1e-3,
            detail: format!(
                "phi*={:.6} reflected={} excess={:e} ||tan|-1|={:e}",
                r.phi_star,
                r.reflected,
                r.excess_over_optimal(),
                r.tan_deviation()
            ),
        });
    }

    for theta in [FRAC_PI_6, FRAC_PI_4, FRAC_PI_3] {
        let r = superposition_bound_check(&two_signal_set(theta)?, 10_000, seed)?;
        checks.push(Check {
            name: format!("superposition bound theta={theta:.6}"),
            passed: r.passed(),
            detail: format!(
                "reference={:.10} best random={:.10} bell={:.10} gap={:e}",
                r.reference_gain,
                r.max_random_gain,
                r.bell_gain,
                r.max_gap()
            ),
        });
    }

    for n in [2, 3, 4] {
        let p = entropy_extrema_probe(n, 100_000, seed)?;
        checks.push(Check {
            name: format!("entropy extrema n={n}"),
            passed: p.passed(),
            detail: format!(
                "bound={:.6} uniform={:.6} best sample={:.6} vertex={}",
                p.bound, p.uniform_entropy, p.max_sample_entropy, p.vertex_entropy
            ),
        });
    }
    Ok(checks)
}
