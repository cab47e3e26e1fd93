//! Average information gain of a measurement: initial source entropy minus
//! the outcome-averaged entropy of the posterior over input states. All
//! entropies are in bits.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{QmError, Result};
use crate::matlin::RealMatrix;
use crate::signals::{SignalSet, PRIOR_SUM_TOL};
use crate::usd::UsdPovm;
use crate::vnopt::{probability_matrix, MeasurementBasis, ProbabilityMatrix, Provenance};

/// Probabilities below this are treated as exactly zero inside logarithms.
const LOG_FLOOR: f64 = 1e-300;

/// `−Σ p log₂ p` with `0·log 0 = 0`.
pub fn shannon_entropy(p: &[f64]) -> f64 {
    0.0 - p
        .iter()
        .filter(|&&x| x > LOG_FLOOR)
        .map(|&x| x * x.log2())
        .sum::<f64>()
}

pub fn initial_entropy(priors: &[f64]) -> Result<f64> {
    if priors.is_empty() || priors.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(QmError::BadPriors(format!(
            "invalid prior vector {priors:?}"
        )));
    }
    let total: f64 = priors.iter().sum();
    if (total - 1.0).abs() > PRIOR_SUM_TOL {
        return Err(QmError::BadPriors(format!("priors sum to {total}")));
    }
    Ok(shannon_entropy(priors))
}

fn check_priors(p: &ProbabilityMatrix, priors: &[f64]) -> Result<()> {
    if priors.len() != p.inputs() {
        return Err(QmError::DimensionMismatch(format!(
            "{} priors for {} input states",
            priors.len(),
            p.inputs()
        )));
    }
    Ok(())
}

/// `q_μ = Σ_j P[μ, j]·r_j`.
pub fn outcome_probabilities(p: &ProbabilityMatrix, priors: &[f64]) -> Result<Vec<f64>> {
    check_priors(p, priors)?;
    let m = p.as_matrix();
    Ok((0..m.rows())
        .map(|mu| m.row(mu).iter().zip(priors).map(|(a, r)| a * r).sum())
        .collect())
}

/// Bayesian posteriors `Q[i, μ] = P[μ, i]·r_i / q_μ`.
#[derive(Clone, Debug)]
pub struct Posterior {
    /// Inputs × outcomes; column `μ` is the posterior after outcome `μ`.
    pub q: RealMatrix,
    /// Outcomes that never occur (`q_μ = 0`); their columns are zero.
    pub null_outcomes: Vec<usize>,
}

pub fn posterior_matrix(p: &ProbabilityMatrix, priors: &[f64]) -> Result<Posterior> {
    let q = outcome_probabilities(p, priors)?;
    let m = p.as_matrix();
    let null_outcomes: Vec<usize> = (0..q.len()).filter(|&mu| q[mu] <= LOG_FLOOR).collect();
    let post = RealMatrix::from_fn(m.cols(), m.rows(), |i, mu| {
        if q[mu] <= LOG_FLOOR {
            0.0
        } else {
            m[(mu, i)] * priors[i] / q[mu]
        }
    });
    Ok(Posterior {
        q: post,
        null_outcomes,
    })
}

/// `Σ_μ q_μ·H(Q[·, μ])`.
pub fn average_final_entropy(q: &[f64], posterior: &RealMatrix) -> Result<f64> {
    if q.len() != posterior.cols() {
        return Err(QmError::DimensionMismatch(format!(
            "{} outcome probabilities for {} posterior columns",
            q.len(),
            posterior.cols()
        )));
    }
    Ok(q.iter()
        .enumerate()
        .filter(|(_, &qm)| qm > LOG_FLOOR)
        .map(|(mu, &qm)| qm * shannon_entropy(&posterior.column(mu)))
        .sum())
}

/// `(H_in, H_fin)` for a probability matrix and priors.
pub fn entropies(p: &ProbabilityMatrix, priors: &[f64]) -> Result<(f64, f64)> {
    let h_in = initial_entropy(priors)?;
    let q = outcome_probabilities(p, priors)?;
    let post = posterior_matrix(p, priors)?;
    Ok((h_in, average_final_entropy(&q, &post.q)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    VonNeumannOptimal,
    VonNeumannUser,
    Usd,
}

impl Strategy {
    pub fn short_name(self) -> &'static str {
        match self {
            Strategy::VonNeumannOptimal | Strategy::VonNeumannUser => "vn",
            Strategy::Usd => "usd",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GainReport {
    pub strategy: Strategy,
    /// Elementary signals per joint measurement.
    pub k: usize,
    pub i_av: f64,
    pub i_av_per_signal: f64,
    pub p_inc: Option<f64>,
    pub h_in: f64,
    pub h_fin: f64,
}

impl GainReport {
    fn from_entropies(
        strategy: Strategy,
        k: usize,
        h_in: f64,
        h_fin: f64,
        p_inc: Option<f64>,
    ) -> Self {
        let i_av = h_in - h_fin;
        Self {
            strategy,
            k,
            i_av,
            i_av_per_signal: i_av / k as f64,
            p_inc,
            h_in,
            h_fin,
        }
    }

    /// Re-labels the report for `k` signals per measurement.
    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k.max(1);
        self.i_av_per_signal = self.i_av / self.k as f64;
        self
    }
}

/// Runs the full entropy pipeline for a projective measurement.
pub fn info_gain_von_neumann(s: &SignalSet, basis: &MeasurementBasis) -> Result<GainReport> {
    let p = probability_matrix(basis, s)?;
    let (h_in, h_fin) = entropies(&p, s.priors())?;
    let strategy = match basis.provenance() {
        Provenance::Optimal => Strategy::VonNeumannOptimal,
        _ => Strategy::VonNeumannUser,
    };
    Ok(GainReport::from_entropies(
        strategy,
        s.k(),
        h_in,
        h_fin,
        None,
    ))
}

/// Every conclusive outcome identifies the state, so only the inconclusive
/// branch leaves entropy behind: `H_fin = p_inc·log₂ n`.
pub fn info_gain_usd(povm: &UsdPovm, n: usize) -> GainReport {
    let h_in = (n as f64).log2();
    GainReport::from_entropies(Strategy::Usd, 1, h_in, povm.p_inc * h_in, Some(povm.p_inc))
}

#[derive(Clone, Debug)]
pub struct EntropyProbe {
    pub n: usize,
    pub trials: usize,
    /// `log₂ n`.
    pub bound: f64,
    pub uniform_entropy: f64,
    /// Largest entropy found at any simplex vertex.
    pub vertex_entropy: f64,
    pub max_sample_entropy: f64,
    /// Euclidean distance from the uniform point of the best random sample.
    pub argmax_distance: f64,
    /// Random samples whose entropy exceeded the bound by more than 1e-9.
    pub violations: usize,
}

impl EntropyProbe {
    pub fn max_entropy(&self) -> f64 {
        self.uniform_entropy
            .max(self.max_sample_entropy)
            .max(self.vertex_entropy)
    }

    /// Bound respected, attained at the uniform point, zero at vertices.
    pub fn passed(&self) -> bool {
        self.violations == 0
            && (self.uniform_entropy - self.bound).abs() <= 1e-9
            && self.max_entropy() <= self.bound + 1e-9
            && self.vertex_entropy == 0.0
    }
}

/// Samples posterior distributions uniformly on the `n`-simplex and checks the
/// entropy against its extrema: `log₂ n` at the centre, zero at the vertices.
pub fn entropy_extrema_probe(n: usize, trials: usize, seed: u64) -> Result<EntropyProbe> {
    if n < 2 {
        return Err(QmError::InvalidArgument(format!(
            "probe needs n >= 2, got {n}"
        )));
    }
    let bound = (n as f64).log2();
    let uniform = vec![1.0 / n as f64; n];
    let uniform_entropy = shannon_entropy(&uniform);
    let vertex_entropy = (0..n)
        .map(|k| {
            let mut v = vec![0.0; n];
            v[k] = 1.0;
            shannon_entropy(&v)
        })
        .fold(0.0, f64::max);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::NEG_INFINITY;
    let mut best_dist = f64::NAN;
    let mut violations = 0;
    let mut sample = vec![0.0; n];
    for _ in 0..trials {
        // Normalized exponentials are uniform on the simplex.
        for x in sample.iter_mut() {
            *x = Exp1.sample(&mut rng);
        }
        let total: f64 = sample.iter().sum();
        sample.iter_mut().for_each(|x| *x /= total);
        let h = shannon_entropy(&sample);
        if h > bound + 1e-9 {
            violations += 1;
        }
        if h > best {
            best = h;
            best_dist = sample
                .iter()
                .zip(&uniform)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
        }
    }
    Ok(EntropyProbe {
        n,
        trials,
        bound,
        uniform_entropy,
        vertex_entropy,
        max_sample_entropy: if trials == 0 { 0.0 } else { best },
        argmax_distance: if trials == 0 { 0.0 } else { best_dist },
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signals::two_signal_set;
    use crate::usd::usd_povm;
    use crate::vnopt::optimal_von_neumann;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

    fn pm(rows: &[Vec<f64>]) -> ProbabilityMatrix {
        ProbabilityMatrix::new(RealMatrix::from_rows(rows).unwrap()).unwrap()
    }

    fn binary_entropy(p: f64) -> f64 {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }

    #[test]
    fn initial_entropies() {
        assert_eq!(initial_entropy(&[0.5, 0.5]).unwrap(), 1.0);
        assert_eq!(initial_entropy(&[1.0, 0.0]).unwrap(), 0.0);
        assert_eq!(initial_entropy(&[0.25; 4]).unwrap(), 2.0);
        assert!(initial_entropy(&[0.5, 0.6]).is_err());
        assert!(initial_entropy(&[-0.5, 1.5]).is_err());
    }

    #[test]
    fn outcome_probabilities_cases() {
        let id = pm(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(
            outcome_probabilities(&id, &[0.5, 0.5]).unwrap(),
            vec![0.5, 0.5]
        );

        let ds = pm(&[
            vec![0.2, 0.3, 0.5],
            vec![0.5, 0.2, 0.3],
            vec![0.3, 0.5, 0.2],
        ]);
        for q in outcome_probabilities(&ds, &[1.0 / 3.0; 3]).unwrap() {
            assert!((q - 1.0 / 3.0).abs() < 1e-12);
        }

        let hi = (1.0 + FRAC_PI_3.sin()) / 2.0;
        let p = pm(&[vec![hi, 1.0 - hi], vec![1.0 - hi, hi]]);
        let q = outcome_probabilities(&p, &[0.7, 0.3]).unwrap();
        assert!((q[0] - 0.6732).abs() < 5e-5 && (q[1] - 0.3268).abs() < 5e-5);
        assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-12);

        assert!(matches!(
            outcome_probabilities(&p, &[1.0]),
            Err(QmError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn posteriors() {
        let id = pm(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        let post = posterior_matrix(&id, &[0.5, 0.5]).unwrap();
        assert_eq!(post.q, RealMatrix::identity(2));
        assert!(post.null_outcomes.is_empty());

        // Equiprobable reduction: Q[i, μ] = P[μ, i] / Σ_j P[μ, j].
        let p = pm(&[vec![0.6, 0.1], vec![0.4, 0.9]]);
        let post = posterior_matrix(&p, &[0.5, 0.5]).unwrap();
        let m = p.as_matrix();
        for mu in 0..2 {
            let row: f64 = m.row(mu).iter().sum();
            for i in 0..2 {
                assert!((post.q[(i, mu)] - m[(mu, i)] / row).abs() < 1e-12);
            }
            assert!((post.q.column(mu).iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }

        let hi = (1.0 + FRAC_PI_3.sin()) / 2.0;
        let p = pm(&[vec![hi, 1.0 - hi], vec![1.0 - hi, hi]]);
        let post = posterior_matrix(&p, &[0.5, 0.5]).unwrap();
        assert!(post.q.max_abs_diff(&p.as_matrix().transpose()) < 1e-12);

        // An outcome that never fires is flagged and contributes nothing.
        let p = pm(&[vec![1.0, 1.0], vec![0.0, 0.0]]);
        let post = posterior_matrix(&p, &[0.5, 0.5]).unwrap();
        assert_eq!(post.null_outcomes, vec![1]);
        let q = outcome_probabilities(&p, &[0.5, 0.5]).unwrap();
        assert_eq!(average_final_entropy(&q, &post.q).unwrap(), 1.0);
    }

    #[test]
    fn final_entropies() {
        assert_eq!(
            average_final_entropy(&[0.5, 0.5], &RealMatrix::identity(2)).unwrap(),
            0.0
        );
        let flat = RealMatrix::from_fn(4, 4, |_, _| 0.25);
        assert!((average_final_entropy(&[0.25; 4], &flat).unwrap() - 2.0).abs() < 1e-15);

        let hi = (1.0 + FRAC_PI_3.sin()) / 2.0;
        let q = RealMatrix::from_rows(&[vec![hi, 1.0 - hi], vec![1.0 - hi, hi]]).unwrap();
        let h = average_final_entropy(&[0.5, 0.5], &q).unwrap();
        assert!((h - binary_entropy(hi)).abs() < 1e-12);
        assert!((h - 0.3546).abs() < 5e-5);
        assert!(average_final_entropy(&[1.0], &q).is_err());
    }

    #[test]
    fn von_neumann_gains() {
        let s = two_signal_set(FRAC_PI_2).unwrap();
        let r = info_gain_von_neumann(&s, &optimal_von_neumann(&s).unwrap()).unwrap();
        assert!((r.i_av - 1.0).abs() < 1e-12);
        assert_eq!(r.strategy, Strategy::VonNeumannOptimal);
        assert_eq!(r.k, 1);

        let s = two_signal_set(FRAC_PI_3).unwrap();
        let r = info_gain_von_neumann(&s, &optimal_von_neumann(&s).unwrap()).unwrap();
        let expected = 1.0 - binary_entropy((1.0 + FRAC_PI_3.sin()) / 2.0);
        assert!((r.i_av - expected).abs() < 1e-12);
        assert!((r.i_av - 0.6454).abs() < 5e-5);
        assert!((r.i_av - (r.h_in - r.h_fin)).abs() < 1e-12);

        let user = MeasurementBasis::so2(0.2, false);
        let r = info_gain_von_neumann(&s, &user).unwrap();
        assert_eq!(r.strategy, Strategy::VonNeumannUser);
        assert!(r.i_av < expected);
    }

    #[test]
    fn usd_gain_matches_general_pipeline() {
        for theta in [0.3, FRAC_PI_3, FRAC_PI_2] {
            let s = two_signal_set(theta).unwrap();
            let povm = usd_povm(&s).unwrap();
            let r = info_gain_usd(&povm, 2);
            let sn = (theta / 2.0).sin();
            assert!((r.i_av - 2.0 * sn * sn).abs() < 1e-12);
            assert_eq!(r.p_inc, Some(povm.p_inc));

            let p = povm.probability_matrix(&s).unwrap();
            let (h_in, h_fin) = entropies(&p, s.priors()).unwrap();
            assert!((h_in - h_fin - r.i_av).abs() < 1e-10);
        }
    }

    #[test]
    fn with_k_rescales() {
        let s = two_signal_set(FRAC_PI_3).unwrap();
        let r = info_gain_usd(&usd_povm(&s).unwrap(), 4).with_k(2);
        assert_eq!(r.k, 2);
        assert!((r.i_av_per_signal - r.i_av / 2.0).abs() < 1e-15);
    }

    #[test]
    fn probe_extrema() {
        let p = entropy_extrema_probe(2, 1000, 1).unwrap();
        assert_eq!(p.uniform_entropy, 1.0);
        assert_eq!(p.vertex_entropy, 0.0);
        assert!(p.passed());
        assert!(entropy_extrema_probe(1, 10, 1).is_err());
    }
}
