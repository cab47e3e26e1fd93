//! Individual versus collective measurements on the two-signal family.
//!
//! With the optimal projective bases the joint transition matrix factorizes,
//! `P₂ = P ⊗ P`, so the per-signal information gain is the same for K = 1 and
//! K = 2. For the unambiguous-discrimination POVM the smallest singular value
//! squares under the lift and the per-signal gain drops from `2s²` to `4s⁴`
//! (`s = sin θ/2`). The searches here probe the von Neumann claim beyond
//! product bases: random unitaries and entangled (Bell-type) bases on the
//! joint space are scored through the same entropy pipeline.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{QmError, Result};
use crate::infogain::{info_gain_usd, info_gain_von_neumann, GainReport, Strategy};
use crate::matlin::{kron, orthonormalize_columns, ComplexMatrix};
use crate::signals::{collective_lift, two_signal_set, SignalSet};
use crate::usd::usd_povm;
use crate::vnopt::{optimal_von_neumann, probability_matrix, MeasurementBasis};

/// Slack allowed when asserting that no basis beats the optimum.
pub const GAIN_SLACK: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct StrategyComparison {
    pub theta: f64,
    /// Von Neumann reports for K = 1..=k_max, then USD reports in the same
    /// order.
    pub rows: Vec<GainReport>,
    /// `‖P₂ − P ⊗ P‖_F` for the optimal bases (zero when `k_max = 1`).
    pub p2_factorization_error: f64,
}

impl StrategyComparison {
    pub fn report(&self, strategy: Strategy, k: usize) -> Option<&GainReport> {
        self.rows
            .iter()
            .find(|r| r.k == k && r.strategy.short_name() == strategy.short_name())
    }

    pub fn vn(&self, k: usize) -> Option<&GainReport> {
        self.report(Strategy::VonNeumannOptimal, k)
    }

    pub fn usd(&self, k: usize) -> Option<&GainReport> {
        self.report(Strategy::Usd, k)
    }

    /// Per-signal von Neumann gain minus per-signal USD gain at `k`.
    pub fn vn_minus_usd(&self, k: usize) -> Option<f64> {
        Some(self.vn(k)?.i_av_per_signal - self.usd(k)?.i_av_per_signal)
    }
}

/// Von Neumann and USD reports for one two-signal set lifted to `k`.
pub fn strategy_reports(base: &SignalSet, k: usize) -> Result<(GainReport, GainReport)> {
    let lifted = collective_lift(base, k)?;
    let vn = info_gain_von_neumann(&lifted, &optimal_von_neumann(&lifted)?)?;
    let usd = info_gain_usd(&usd_povm(&lifted)?, lifted.n()).with_k(lifted.k());
    Ok((vn, usd))
}

pub fn compare_strategies(theta: f64, k_max: usize) -> Result<StrategyComparison> {
    if k_max == 0 {
        return Err(QmError::InvalidArgument("k_max must be at least 1".into()));
    }
    let base = two_signal_set(theta)?;
    let mut vn_rows = Vec::with_capacity(k_max);
    let mut usd_rows = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let (vn, usd) = strategy_reports(&base, k)?;
        vn_rows.push(vn);
        usd_rows.push(usd);
    }
    let p2_factorization_error = if k_max >= 2 {
        p2_factorization_error(&base)?
    } else {
        0.0
    };
    vn_rows.extend(usd_rows);
    Ok(StrategyComparison {
        theta,
        rows: vn_rows,
        p2_factorization_error,
    })
}

/// `‖P₂ − P ⊗ P‖_F` where both sides use their own optimal bases.
pub fn p2_factorization_error(base: &SignalSet) -> Result<f64> {
    let p = probability_matrix(&optimal_von_neumann(base)?, base)?;
    let lifted = collective_lift(base, 2)?;
    let p2 = probability_matrix(&optimal_von_neumann(&lifted)?, &lifted)?;
    Ok(p2
        .as_matrix()
        .distance(&kron(p.as_matrix(), p.as_matrix())?))
}

#[derive(Clone, Debug)]
pub struct SuperpositionReport {
    /// Gain of the product basis `B ⊗ B` on the lifted set.
    pub reference_gain: f64,
    /// Gain of `B ⊗ B` evaluated as a candidate, minus the reference.
    pub self_gap: f64,
    /// Bell basis expressed in the frame of `B ⊗ B`.
    pub bell_gain: f64,
    pub max_structured_gain: f64,
    pub max_random_gain: f64,
    pub samples: usize,
    /// Candidates exceeding the reference by more than [`GAIN_SLACK`].
    pub violations: usize,
}

impl SuperpositionReport {
    /// Best candidate gain minus the reference (negative when every candidate
    /// is strictly worse).
    pub fn max_gap(&self) -> f64 {
        self.max_structured_gain.max(self.max_random_gain) - self.reference_gain
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Columns `(|00⟩ ± |11⟩)/√2`, `(|01⟩ ± |10⟩)/√2`.
pub fn bell_basis() -> ComplexMatrix {
    let h = FRAC_1_SQRT_2;
    ComplexMatrix::from_real_rows(&[
        vec![h, h, 0.0, 0.0],
        vec![0.0, 0.0, h, h],
        vec![0.0, 0.0, h, -h],
        vec![h, -h, 0.0, 0.0],
    ])
    .expect("4x4")
}

/// Bell-type basis with Schmidt angle `alpha`: `cos α|00⟩ + sin α|11⟩`,
/// `sin α|00⟩ − cos α|11⟩` and the same pair on `|01⟩, |10⟩`.
pub fn partially_entangled_basis(alpha: f64) -> ComplexMatrix {
    let (s, c) = alpha.sin_cos();
    ComplexMatrix::from_real_rows(&[
        vec![c, s, 0.0, 0.0],
        vec![0.0, 0.0, c, s],
        vec![0.0, 0.0, s, -c],
        vec![s, -c, 0.0, 0.0],
    ])
    .expect("4x4")
}

/// Haar-distributed unitary: Gram-Schmidt on a complex Gaussian matrix.
pub fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    loop {
        let g = ComplexMatrix::from_fn(n, n, |_, _| {
            C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
        });
        if let Ok(q) = orthonormalize_columns(&g) {
            return q;
        }
    }
}

/// Scores random and entangled bases on the two-fold lift of a two-state set
/// against the product of optimal bases. This is a search, not a proof: it
/// can only find counterexamples.
pub fn superposition_bound_check(
    s: &SignalSet,
    samples: usize,
    seed: u64,
) -> Result<SuperpositionReport> {
    if s.n() != 2 {
        return Err(QmError::InvalidArgument(format!(
            "superposition check expects a two-state base set, got {}",
            s.n()
        )));
    }
    if samples == 0 {
        return Err(QmError::InvalidArgument(
            "samples must be at least 1".into(),
        ));
    }
    let lifted = collective_lift(s, 2)?;
    let b = optimal_von_neumann(s)?;
    let bb = kron(b.b(), b.b())?;
    let gain = |m: &ComplexMatrix| -> Result<f64> {
        Ok(info_gain_von_neumann(&lifted, &MeasurementBasis::user_supplied(m.clone())?)?.i_av)
    };
    let reference_gain = gain(&bb)?;
    let self_gap = gain(&bb)? - reference_gain;

    let bell = bell_basis();
    let mut structured = vec![&bb * &bell, bell.clone()];
    for step in 1..16 {
        let alpha = step as f64 * PI / 32.0;
        let e = partially_entangled_basis(alpha);
        structured.push(&bb * &e);
        structured.push(e);
    }
    let structured_gains = structured
        .par_iter()
        .map(gain)
        .collect::<Result<Vec<f64>>>()?;
    let bell_gain = structured_gains[0];

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let randoms: Vec<ComplexMatrix> = (0..samples).map(|_| random_unitary(4, &mut rng)).collect();
    let random_gains = randoms.par_iter().map(gain).collect::<Result<Vec<f64>>>()?;

    let violations = structured_gains
        .iter()
        .chain(&random_gains)
        .filter(|&&g| g > reference_gain + GAIN_SLACK)
        .count();
    let fmax = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(SuperpositionReport {
        reference_gain,
        self_gap,
        bell_gain,
        max_structured_gain: fmax(&structured_gains),
        max_random_gain: fmax(&random_gains),
        samples,
        violations,
    })
}

#[derive(Clone, Debug)]
pub struct So2Search {
    pub phi_star: f64,
    /// Whether the argmax is a rotation followed by a reflection.
    pub reflected: bool,
    pub gain_star: f64,
    /// Gain of `U·Vᴴ` for the same signal set.
    pub optimal_gain: f64,
    pub grid_points: usize,
}

impl So2Search {
    /// `||tan φ⋆| − 1|`, zero when `sin φ⋆ = ±cos φ⋆`.
    pub fn tan_deviation(&self) -> f64 {
        (self.phi_star.tan().abs() - 1.0).abs()
    }

    pub fn excess_over_optimal(&self) -> f64 {
        self.gain_star - self.optimal_gain
    }
}

/// Grid search over rotations `B(φ)` and reflected rotations, `φ_j = 2πj/N`
/// for `j = 1..=N`. Ties resolve to the first grid point (rotations before
/// reflections).
pub fn so2_brute_force(theta: f64, grid_points: usize) -> Result<So2Search> {
    if grid_points < 8 {
        return Err(QmError::InvalidArgument(format!(
            "grid needs at least 8 points, got {grid_points}"
        )));
    }
    let s = two_signal_set(theta)?;
    let optimal_gain = info_gain_von_neumann(&s, &optimal_von_neumann(&s)?)?.i_av;
    let candidates: Vec<(f64, bool)> = [false, true]
        .into_iter()
        .flat_map(|refl| {
            (1..=grid_points).map(move |j| (2.0 * PI * j as f64 / grid_points as f64, refl))
        })
        .collect();
    let gains = candidates
        .par_iter()
        .map(|&(phi, refl)| Ok(info_gain_von_neumann(&s, &MeasurementBasis::so2(phi, refl))?.i_av))
        .collect::<Result<Vec<f64>>>()?;
    let best = gains.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let idx = gains
        .iter()
        .position(|&g| g >= best - 1e-12)
        .expect("non-empty grid");
    let (phi_star, reflected) = candidates[idx];
    Ok(So2Search {
        phi_star,
        reflected,
        gain_star: gains[idx],
        optimal_gain,
        grid_points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};

    #[test]
    fn orthogonal_limit_all_one_bit() {
        let c = compare_strategies(FRAC_PI_2, 2).unwrap();
        assert_eq!(c.rows.len(), 4);
        for r in &c.rows {
            assert!((r.i_av_per_signal - 1.0).abs() < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn pi_over_three_values() {
        let c = compare_strategies(FRAC_PI_3, 2).unwrap();
        assert!((c.vn(1).unwrap().i_av_per_signal - 0.6454).abs() < 5e-5);
        assert!(
            (c.vn(2).unwrap().i_av_per_signal - c.vn(1).unwrap().i_av_per_signal).abs() < 1e-10
        );
        assert!((c.usd(1).unwrap().i_av_per_signal - 0.5).abs() < 1e-12);
        assert!((c.usd(2).unwrap().i_av_per_signal - 0.25).abs() < 1e-12);
        assert!((c.vn(2).unwrap().i_av - 1.2908).abs() < 5e-5);
        assert!(c.p2_factorization_error < 1e-10);
        assert!((c.vn_minus_usd(1).unwrap() - 0.1454).abs() < 5e-5);
        assert!((c.vn_minus_usd(2).unwrap() - 0.3954).abs() < 5e-5);
    }

    #[test]
    fn bell_basis_is_worse_than_product() {
        let s = two_signal_set(FRAC_PI_3).unwrap();
        let r = superposition_bound_check(&s, 50, 1).unwrap();
        assert_eq!(r.self_gap, 0.0);
        assert!(r.bell_gain < r.reference_gain - 1e-6);
        assert!(r.passed());
    }

    #[test]
    fn structured_bases_are_unitary() {
        for m in [bell_basis(), partially_entangled_basis(0.3)] {
            assert!(MeasurementBasis::user_supplied(m).is_ok());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        assert!(MeasurementBasis::user_supplied(random_unitary(4, &mut rng)).is_ok());
    }

    #[test]
    fn so2_grid_hits_the_diagonal() {
        let r = so2_brute_force(FRAC_PI_6, 8).unwrap();
        assert!((r.phi_star - FRAC_PI_4).abs() < 1e-15);
        assert!(!r.reflected);
        assert!(r.excess_over_optimal().abs() < 1e-12);

        let r = so2_brute_force(FRAC_PI_2, 10_000).unwrap();
        assert!((r.gain_star - 1.0).abs() < 1e-12);
        let quarter = [1.0, 3.0, 5.0, 7.0].map(|k| k * FRAC_PI_4);
        assert!(quarter.iter().any(|q| (r.phi_star - q).abs() < PI * 1e-4));
    }

    #[test]
    fn argument_checks() {
        assert!(so2_brute_force(FRAC_PI_3, 4).is_err());
        assert!(matches!(
            so2_brute_force(2.0, 16),
            Err(QmError::ThetaOutOfRange(_))
        ));
        assert!(compare_strategies(FRAC_PI_3, 0).is_err());
        let s2 = collective_lift(&two_signal_set(FRAC_PI_3).unwrap(), 2).unwrap();
        assert!(superposition_bound_check(&s2, 1, 0).is_err());
    }
}
