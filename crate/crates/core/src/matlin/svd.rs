//! Singular value decomposition of square complex matrices by one-sided
//! (Hestenes) Jacobi rotations.
//!
//! The working copy `W = A·V` has its columns pairwise orthogonalized by
//! unitary plane rotations accumulated into `V`. At convergence the column
//! norms of `W` are the singular values and the normalized columns form `U`.
//! One-sided Jacobi gives small singular values to high relative accuracy,
//! which matters here: the smallest singular value sets the inconclusive
//! probability of the unambiguous-discrimination measurement.

use num_complex::Complex64 as C64;

use super::matrix::{inner, norm, ComplexMatrix};
use crate::error::{QmError, Result};

/// Singular values closer than this are reported as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-8;

const MAX_SWEEPS: usize = 100;

/// `m = u · diag(sigma) · vᴴ` with `sigma` descending.
#[derive(Clone, Debug)]
pub struct SvdFactors {
    pub u: ComplexMatrix,
    pub sigma: Vec<f64>,
    pub v: ComplexMatrix,
    /// Set when two singular values are within [`DEGENERACY_GAP`]; the
    /// singular vectors spanning that subspace are then not unique.
    pub degenerate: bool,
}

impl SvdFactors {
    pub fn sigma_min(&self) -> f64 {
        *self.sigma.last().expect("non-empty spectrum")
    }

    pub fn sigma_max(&self) -> f64 {
        self.sigma[0]
    }

    /// `u · diag(sigma) · vᴴ`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.sigma.len();
        let us = ComplexMatrix::from_fn(n, n, |i, j| self.u[(i, j)] * self.sigma[j]);
        &us * &self.v.adjoint()
    }
}

/// Factorizes a square matrix.
///
/// Each column of `u` is rotated by a global phase so that its first entry of
/// largest modulus is real and non-negative; the matching column of `v`
/// absorbs the same phase.
pub fn svd(m: &ComplexMatrix) -> Result<SvdFactors> {
    if !m.is_square() {
        return Err(QmError::NonSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let mut w = m.columns();
    let mut v = ComplexMatrix::identity(n).columns();

    let scale = m.frobenius_norm();
    let mut converged = scale == 0.0;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = w[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = w[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma = inner(&w[p], &w[q]);
                let g = gamma.norm();
                if g <= f64::EPSILON * (alpha * beta).sqrt() || g < f64::MIN_POSITIVE {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, p, q, c, s, phase);
                rotate(&mut v, p, q, c, s, phase);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(QmError::NumericalFailure(format!(
            "Jacobi SVD did not converge in {MAX_SWEEPS} sweeps"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = w.iter().map(|c| norm(c)).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));

    let null_floor = scale * n as f64 * f64::EPSILON;
    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let mut u_cols: Vec<Option<Vec<C64>>> = order
        .iter()
        .map(|&j| {
            let nj = norms[j];
            (nj > null_floor).then(|| w[j].iter().map(|z| z / nj).collect())
        })
        .collect();
    let mut v_cols: Vec<Vec<C64>> = order.iter().map(|&j| v[j].clone()).collect();

    // Null directions have no left singular vector from W; complete U to a
    // unitary basis instead.
    complete_basis(&mut u_cols);
    let mut u_cols: Vec<Vec<C64>> = u_cols.into_iter().map(Option::unwrap).collect();

    for (uc, vc) in u_cols.iter_mut().zip(v_cols.iter_mut()) {
        let pivot = phase_pivot(uc);
        let z = uc[pivot];
        if z.norm() > 0.0 {
            let rot = z.conj() / z.norm();
            uc.iter_mut().for_each(|x| *x *= rot);
            vc.iter_mut().for_each(|x| *x *= rot);
        }
    }

    let degenerate = sigma.windows(2).any(|p| p[0] - p[1] < DEGENERACY_GAP);
    Ok(SvdFactors {
        u: ComplexMatrix::from_columns(&u_cols)?,
        sigma,
        v: ComplexMatrix::from_columns(&v_cols)?,
        degenerate,
    })
}

/// Applies the plane rotation that zeroes `⟨col_p|col_q⟩` to both columns.
fn rotate(cols: &mut [Vec<C64>], p: usize, q: usize, c: f64, s: f64, phase: C64) {
    let (head, tail) = cols.split_at_mut(q);
    let cp = &mut head[p];
    let cq = &mut tail[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let xp = *x;
        let yq = *y;
        *x = xp * c - yq * phase.conj() * s;
        *y = xp * phase * s + yq * c;
    }
}

/// Index of the first entry whose modulus is within rounding of the maximum.
fn phase_pivot(col: &[C64]) -> usize {
    let max = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
    col.iter()
        .position(|z| z.norm() >= max - 1e-12 * max.max(1.0))
        .unwrap_or(0)
}

/// Fills `None` entries with unit vectors orthogonal to every other column.
fn complete_basis(cols: &mut [Option<Vec<C64>>]) {
    let n = cols.len();
    let mut candidate = 0;
    for j in 0..n {
        if cols[j].is_some() {
            continue;
        }
        while candidate < n {
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[candidate] = C64::new(1.0, 0.0);
            candidate += 1;
            // Two passes of Gram-Schmidt against the filled columns.
            for _ in 0..2 {
                for other in cols.iter().flatten() {
                    let proj = inner(other, &e);
                    for (x, o) in e.iter_mut().zip(other) {
                        *x -= proj * o;
                    }
                }
            }
            let ne = norm(&e);
            if ne > 1e-6 {
                cols[j] = Some(e.into_iter().map(|x| x / ne).collect());
                break;
            }
        }
    }
}
