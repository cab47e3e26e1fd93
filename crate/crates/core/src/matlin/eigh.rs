//! Cyclic Jacobi eigensolver for Hermitian matrices.

use num_complex::Complex64 as C64;

use super::matrix::ComplexMatrix;
use crate::error::{QmError, Result};

const MAX_SWEEPS: usize = 100;

/// `h = vectors · diag(values) · vectorsᴴ`, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `vectors · diag(f(values)) · vectorsᴴ`.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let scaled = ComplexMatrix::from_fn(n, n, |i, j| self.vectors[(i, j)] * f(self.values[j]));
        &scaled * &self.vectors.adjoint()
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }
}

/// Diagonalizes `(h + hᴴ)/2`.
pub fn eigh(h: &ComplexMatrix) -> Result<HermitianEigen> {
    if !h.is_square() {
        return Err(QmError::NonSquare {
            rows: h.rows(),
            cols: h.cols(),
        });
    }
    let n = h.rows();
    let mut a = ComplexMatrix::from_fn(n, n, |i, j| (h[(i, j)] + h[(j, i)].conj()) * 0.5);
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();

    let off = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off(&a) > f64::EPSILON * scale * 1e-2 && scale > 0.0 {
        if sweeps == MAX_SWEEPS {
            return Err(QmError::NumericalFailure(format!(
                "Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps"
            )));
        }
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let hpq = a[(p, q)];
                let g = hpq.norm();
                if g <= f64::EPSILON * 1e-3 * scale {
                    continue;
                }
                rotated = true;
                // J = diag(1, e^{-iφ}) · R with R the real Jacobi rotation of
                // the phase-stripped 2x2 block.
                let e = (hpq / g).conj();
                let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * g);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let jpp = C64::new(c, 0.0);
                let jpq = C64::new(s, 0.0);
                let jqp = -e * s;
                let jqq = e * c;
                // a ← a·J
                for i in 0..n {
                    let (x, y) = (a[(i, p)], a[(i, q)]);
                    a[(i, p)] = x * jpp + y * jqp;
                    a[(i, q)] = x * jpq + y * jqq;
                }
                // a ← Jᴴ·a
                for j in 0..n {
                    let (x, y) = (a[(p, j)], a[(q, j)]);
                    a[(p, j)] = jpp.conj() * x + jqp.conj() * y;
                    a[(q, j)] = jpq.conj() * x + jqq.conj() * y;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                for i in 0..n {
                    let (x, y) = (v[(i, p)], v[(i, q)]);
                    v[(i, p)] = x * jpp + y * jqp;
                    v[(i, q)] = x * jpq + y * jqq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].re.total_cmp(&a[(y, y)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}
