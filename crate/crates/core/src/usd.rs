//! Optimal unambiguous state discrimination for equiprobable signals.
//!
//! The conclusive elements are `Π_i = (1 − p_inc)·|Ψ̃_i⟩⟨Ψ̃_i|` built from the
//! reciprocal states `Ãᴴ·A = 𝟙`. Since `Σ_i |Ψ̃_i⟩⟨Ψ̃_i| = Ã·Ãᴴ = U·Σ⁻²·Uᴴ`,
//! the inconclusive element `Π₀ = 𝟙 − Σ_i Π_i` stays positive exactly while
//! `1 − p_inc ≤ σ_min²`, so the optimum is `p_inc = 1 − σ_min²`.

use num_complex::Complex64 as C64;

use crate::error::{QmError, Result};
use crate::matlin::{eigh, inner, pseudo_inverse_from, svd, ComplexMatrix, RealMatrix};
use crate::signals::SignalSet;
use crate::vnopt::ProbabilityMatrix;

/// Eigenvalue floor below which an operator is not positive semidefinite.
pub const PSD_FLOOR: f64 = -1e-10;

#[derive(Clone, Debug)]
pub struct UsdPovm {
    /// Column `i` is the reciprocal state `|Ψ̃_i⟩`.
    pub reciprocal: ComplexMatrix,
    /// Conclusive elements `Π_1 … Π_N`.
    pub elements: Vec<ComplexMatrix>,
    /// Inconclusive element `Π₀`.
    pub inconclusive: ComplexMatrix,
    pub p_inc: f64,
}

/// `Ã` with `Ãᴴ·A = 𝟙`, i.e. the adjoint of the pseudo-inverse, `U·Σ⁻¹·Vᴴ`.
pub fn reciprocal_states(s: &SignalSet) -> Result<ComplexMatrix> {
    Ok(pseudo_inverse_from(&svd(s.a())?)?.adjoint())
}

/// Optimal USD POVM under the shared-failure-probability ansatz.
pub fn usd_povm(s: &SignalSet) -> Result<UsdPovm> {
    if !s.has_uniform_priors() {
        return Err(QmError::NonUniformPriors);
    }
    let f = svd(s.a())?;
    let reciprocal = pseudo_inverse_from(&f)?.adjoint();
    let sigma_min = f.sigma_min();
    Ok(UsdPovm::from_reciprocal(reciprocal, sigma_min * sigma_min))
}

impl UsdPovm {
    /// Elements for an arbitrary common success probability. Only
    /// `success ≤ σ_min²` yields a valid (positive) inconclusive element.
    pub fn with_success_probability(s: &SignalSet, success: f64) -> Result<Self> {
        Ok(Self::from_reciprocal(reciprocal_states(s)?, success))
    }

    fn from_reciprocal(reciprocal: ComplexMatrix, success: f64) -> Self {
        let n = reciprocal.rows();
        let elements: Vec<ComplexMatrix> = reciprocal
            .columns()
            .iter()
            .map(|psi| ComplexMatrix::from_fn(n, n, |r, c| psi[r] * psi[c].conj() * success))
            .collect();
        let total = elements
            .iter()
            .fold(ComplexMatrix::zeros(n, n), |acc, e| &acc + e);
        let inconclusive = &ComplexMatrix::identity(n) - &total;
        Self {
            reciprocal,
            elements,
            inconclusive,
            p_inc: 1.0 - success,
        }
    }

    pub fn success_probability(&self) -> f64 {
        1.0 - self.p_inc
    }

    /// `‖Π₀ + Σ Π_i − 𝟙‖_F`.
    pub fn completeness_residual(&self) -> f64 {
        let n = self.inconclusive.rows();
        let sum = self
            .elements
            .iter()
            .fold(self.inconclusive.clone(), |acc, e| &acc + e);
        sum.distance(&ComplexMatrix::identity(n))
    }

    /// Smallest eigenvalue of each element, inconclusive first.
    pub fn min_eigenvalues(&self) -> Result<Vec<f64>> {
        std::iter::once(&self.inconclusive)
            .chain(&self.elements)
            .map(|e| eigh(e).map(|x| x.min()))
            .collect()
    }

    /// Full spectra, inconclusive element first.
    pub fn spectra(&self) -> Result<Vec<Vec<f64>>> {
        std::iter::once(&self.inconclusive)
            .chain(&self.elements)
            .map(|e| eigh(e).map(|x| x.values))
            .collect()
    }

    /// Every element Hermitian with eigenvalues above [`PSD_FLOOR`].
    pub fn is_positive(&self) -> Result<bool> {
        let hermitian = std::iter::once(&self.inconclusive)
            .chain(&self.elements)
            .all(|e| e.hermiticity_error() < 1e-10);
        Ok(hermitian && self.min_eigenvalues()?.iter().all(|&x| x >= PSD_FLOOR))
    }

    /// `⟨Ψ_i|Π_μ|Ψ_i⟩` arranged with the inconclusive outcome as row 0 and
    /// conclusive outcome `μ` as row `μ + 1`.
    pub fn outcome_matrix(&self, s: &SignalSet) -> Result<RealMatrix> {
        let n = s.n();
        if self.elements.len() != n || self.inconclusive.rows() != s.a().rows() {
            return Err(QmError::DimensionMismatch(
                "POVM and signal set disagree in dimension".into(),
            ));
        }
        let states = s.a().columns();
        let expect = |op: &ComplexMatrix, psi: &[C64]| -> f64 {
            let applied: Vec<C64> = (0..psi.len())
                .map(|r| (0..psi.len()).map(|c| op[(r, c)] * psi[c]).sum())
                .collect();
            inner(psi, &applied).re
        };
        Ok(RealMatrix::from_fn(n + 1, n, |mu, i| {
            let op = if mu == 0 {
                &self.inconclusive
            } else {
                &self.elements[mu - 1]
            };
            expect(op, &states[i])
        }))
    }

    /// The outcome matrix as a column-stochastic probability matrix.
    pub fn probability_matrix(&self, s: &SignalSet) -> Result<ProbabilityMatrix> {
        ProbabilityMatrix::new(self.outcome_matrix(s)?.map(|x| x.clamp(0.0, 1.0)))
    }

    /// Largest `⟨Ψ_i|Π_j|Ψ_i⟩` over conclusive `j ≠ i`; zero for a perfectly
    /// unambiguous measurement.
    pub fn unambiguity_error(&self, s: &SignalSet) -> Result<f64> {
        let m = self.outcome_matrix(s)?;
        let mut worst: f64 = 0.0;
        for j in 0..s.n() {
            for i in 0..s.n() {
                if i != j {
                    worst = worst.max(m[(j + 1, i)].abs());
                }
            }
        }
        Ok(worst)
    }
}
