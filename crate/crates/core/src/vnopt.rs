//! Optimal von Neumann measurements.
//!
//! For a full-rank signal matrix `A = U·Σ·Vᴴ` the projective measurement
//! maximizing the average information gain is `B = U·Vᴴ`, the unitary
//! closest to `A` in Frobenius norm. Then `Bᴴ·A = V·Σ·Vᴴ` is Hermitian and the
//! transition probabilities `P = (Bᴴ·A) ∘ (Bᴴ·A)*` form a doubly stochastic
//! matrix. The same `B` arises as the pretty good (square-root) measurement
//! `A·(AᴴA)^{−1/2}`.

use crate::error::{QmError, Result};
use crate::matlin::{
    eigh, permute_columns, svd, ComplexMatrix, Permutation, RealMatrix, DEGENERACY_GAP, RANK_TOL,
};
use crate::signals::SignalSet;

pub const ORTHONORMAL_TOL: f64 = 1e-10;
pub const COLUMN_SUM_TOL: f64 = 1e-10;
pub const SINKHORN_TOL: f64 = 1e-8;
pub const SINKHORN_MAX_ITER: usize = 10_000;

/// Where a measurement basis came from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Provenance {
    Optimal,
    PrettyGood,
    UserSupplied,
    /// Rotation by `phi`, optionally followed by the reflection `diag(1, −1)`.
    So2 {
        phi: f64,
        reflected: bool,
    },
}

/// Orthonormal projector basis; column `μ` is `|Φ_μ⟩`.
#[derive(Clone, Debug)]
pub struct MeasurementBasis {
    b: ComplexMatrix,
    provenance: Provenance,
    degenerate: bool,
}

impl MeasurementBasis {
    pub fn new(b: ComplexMatrix, provenance: Provenance) -> Result<Self> {
        if !b.is_square() {
            return Err(QmError::NonSquare {
                rows: b.rows(),
                cols: b.cols(),
            });
        }
        let err = (&b.adjoint() * &b).distance(&ComplexMatrix::identity(b.cols()));
        if err > ORTHONORMAL_TOL {
            return Err(QmError::InvalidMatrix(format!(
                "basis columns are not orthonormal (‖BᴴB − 1‖ = {err:e})"
            )));
        }
        Ok(Self {
            b,
            provenance,
            degenerate: false,
        })
    }

    pub fn user_supplied(b: ComplexMatrix) -> Result<Self> {
        Self::new(b, Provenance::UserSupplied)
    }

    /// `[[cos φ, −sin φ], [sin φ, cos φ]]`, or that rotation followed by
    /// `diag(1, −1)` when `reflected`.
    pub fn so2(phi: f64, reflected: bool) -> Self {
        let (s, c) = phi.sin_cos();
        let r = if reflected { -1.0 } else { 1.0 };
        let b = ComplexMatrix::from_real(
            &RealMatrix::from_rows(&[vec![c, -s * r], vec![s, c * r]]).expect("2x2"),
        );
        Self {
            b,
            provenance: Provenance::So2 { phi, reflected },
            degenerate: false,
        }
    }

    pub fn b(&self) -> &ComplexMatrix {
        &self.b
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// True when the signal matrix had repeated singular values, in which case
    /// optimality is not certified unique.
    pub fn degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn dim(&self) -> usize {
        self.b.cols()
    }

    /// Same projectors with the outcome labels reordered.
    pub fn permuted(&self, perm: &Permutation) -> Result<Self> {
        Ok(Self {
            b: permute_columns(&self.b, perm)?,
            provenance: Provenance::UserSupplied,
            degenerate: self.degenerate,
        })
    }
}

/// Column-stochastic matrix of transition probabilities `P[μ, i]`: row `μ`
/// is the outcome, column `i` the input state.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityMatrix(RealMatrix);

impl ProbabilityMatrix {
    pub fn new(p: RealMatrix) -> Result<Self> {
        if let Some(x) = p
            .as_slice()
            .iter()
            .find(|x| !(-1e-12..=1.0 + 1e-12).contains(*x))
        {
            return Err(QmError::InvalidMatrix(format!(
                "probability {x} outside [0, 1]"
            )));
        }
        for (j, s) in p.col_sums().into_iter().enumerate() {
            if (s - 1.0).abs() > COLUMN_SUM_TOL {
                return Err(QmError::InvalidMatrix(format!(
                    "column {j} of the probability matrix sums to {s}"
                )));
            }
        }
        Ok(Self(p))
    }

    pub fn as_matrix(&self) -> &RealMatrix {
        &self.0
    }

    pub fn into_inner(self) -> RealMatrix {
        self.0
    }

    pub fn outcomes(&self) -> usize {
        self.0.rows()
    }

    pub fn inputs(&self) -> usize {
        self.0.cols()
    }
}

/// `B = U·Vᴴ` from the SVD of the signal matrix.
pub fn optimal_von_neumann(s: &SignalSet) -> Result<MeasurementBasis> {
    let f = svd(s.a())?;
    let b = &f.u * &f.v.adjoint();
    Ok(MeasurementBasis {
        b,
        provenance: Provenance::Optimal,
        degenerate: f.degenerate,
    })
}

/// `P[μ, i] = |⟨Φ_μ|Ψ_i⟩|²`.
pub fn probability_matrix(basis: &MeasurementBasis, s: &SignalSet) -> Result<ProbabilityMatrix> {
    if basis.b.rows() != s.a().rows() {
        return Err(QmError::DimensionMismatch(format!(
            "basis acts on dimension {} but states have dimension {}",
            basis.b.rows(),
            s.a().rows()
        )));
    }
    let overlaps = &basis.b.adjoint() * s.a();
    ProbabilityMatrix::new(overlaps.map(|z| z.norm_sqr()))
}

/// Every row and column sum within `tol` of one.
pub fn is_doubly_stochastic(p: &RealMatrix, tol: f64) -> bool {
    p.row_sums()
        .into_iter()
        .chain(p.col_sums())
        .all(|s| (s - 1.0).abs() <= tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SinkhornOrder {
    RowsFirst,
    ColumnsFirst,
}

#[derive(Clone, Copy, Debug)]
pub struct SinkhornOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub order: SinkhornOrder,
}

impl Default for SinkhornOptions {
    fn default() -> Self {
        Self {
            tol: SINKHORN_TOL,
            max_iter: SINKHORN_MAX_ITER,
            order: SinkhornOrder::RowsFirst,
        }
    }
}

/// Outcome of alternating row/column normalization: `t ≈ diag(d1)·x·diag(d2)`.
#[derive(Clone, Debug)]
pub struct SinkhornResult {
    pub t: RealMatrix,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Largest deviation of a row or column sum from one at exit.
    pub residual: f64,
}

impl SinkhornResult {
    /// Single diagonal `d` with `t = diag(d)·x·diag(d)`, valid for symmetric
    /// input where `d1` and `d2` agree up to a scalar.
    pub fn symmetric_scaling(&self) -> Vec<f64> {
        self.d1
            .iter()
            .zip(&self.d2)
            .map(|(a, b)| (a * b).sqrt())
            .collect()
    }
}

pub fn sinkhorn_scale(x: &RealMatrix, tol: f64, max_iter: usize) -> Result<SinkhornResult> {
    sinkhorn_scale_with(
        x,
        &SinkhornOptions {
            tol,
            max_iter,
            ..Default::default()
        },
    )
}

/// RAS iteration. Non-convergence within `max_iter` is reported through
/// `converged = false`, which is how a matrix without total support shows up.
pub fn sinkhorn_scale_with(x: &RealMatrix, opts: &SinkhornOptions) -> Result<SinkhornResult> {
    if !x.is_square() {
        return Err(QmError::NonSquare {
            rows: x.rows(),
            cols: x.cols(),
        });
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(QmError::InvalidArgument(
            "tolerance must be positive".into(),
        ));
    }
    if let Some(v) = x.as_slice().iter().find(|v| **v < 0.0) {
        return Err(QmError::InvalidMatrix(format!("negative entry {v}")));
    }
    if x.row_sums()
        .iter()
        .chain(x.col_sums().iter())
        .any(|s| *s == 0.0)
    {
        return Err(QmError::InvalidMatrix(
            "matrix has an all-zero row or column".into(),
        ));
    }

    let n = x.rows();
    let mut d1 = vec![1.0; n];
    let mut d2 = vec![1.0; n];
    let scaled =
        |d1: &[f64], d2: &[f64]| RealMatrix::from_fn(n, n, |i, j| d1[i] * x[(i, j)] * d2[j]);
    let residual = |t: &RealMatrix| {
        t.row_sums()
            .into_iter()
            .chain(t.col_sums())
            .map(|s| (s - 1.0).abs())
            .fold(0.0, f64::max)
    };

    let mut t = x.clone();
    let mut res = residual(&t);
    let mut iterations = 0;
    while res >= opts.tol && iterations < opts.max_iter {
        iterations += 1;
        let steps = match opts.order {
            SinkhornOrder::RowsFirst => [true, false],
            SinkhornOrder::ColumnsFirst => [false, true],
        };
        for rows in steps {
            if rows {
                for (d, s) in d1.iter_mut().zip(t.row_sums()) {
                    *d /= s;
                }
            } else {
                for (d, s) in d2.iter_mut().zip(t.col_sums()) {
                    *d /= s;
                }
            }
            t = scaled(&d1, &d2);
        }
        res = residual(&t);
    }
    Ok(SinkhornResult {
        t,
        d1,
        d2,
        iterations,
        converged: res < opts.tol,
        residual: res,
    })
}

/// `M = A·(AᴴA)^{−1/2}`, evaluated through the eigendecomposition of the Gram
/// matrix.
pub fn pretty_good_measurement(s: &SignalSet) -> Result<MeasurementBasis> {
    let gram = s.gram();
    let e = eigh(&gram)?;
    let sigma_min = e.min().max(0.0).sqrt();
    if sigma_min <= RANK_TOL {
        return Err(QmError::RankDeficient {
            sigma_min,
            tol: RANK_TOL,
        });
    }
    let inv_sqrt = e.apply_fn(|x| 1.0 / x.sqrt());
    let sigmas: Vec<f64> = e.values.iter().map(|x| x.sqrt()).collect();
    Ok(MeasurementBasis {
        b: s.a() * &inv_sqrt,
        provenance: Provenance::PrettyGood,
        degenerate: sigmas.windows(2).any(|w| w[1] - w[0] < DEGENERACY_GAP),
    })
}
