//! Dense complex linear algebra: matrices, SVD, Hermitian eigensolver,
//! Kronecker and Hadamard products, pseudo-inverse and column permutations.

mod eigh;
mod matrix;
mod svd;

pub use eigh::{eigh, HermitianEigen};
pub use matrix::{inner, norm, ComplexMatrix, Matrix, RealMatrix, Scalar};
pub use svd::{svd, SvdFactors, DEGENERACY_GAP};

use num_complex::Complex64 as C64;

use crate::error::{QmError, Result};

/// Largest row or column count any lifted matrix may have.
pub const DEFAULT_DIMENSION_CAP: usize = 4096;

/// Singular values at or below this are treated as zero.
pub const RANK_TOL: f64 = 1e-9;

/// Kronecker product with the default dimension cap.
pub fn kron<T: Scalar>(x: &Matrix<T>, y: &Matrix<T>) -> Result<Matrix<T>> {
    kron_capped(x, y, DEFAULT_DIMENSION_CAP)
}

/// Kronecker product; block `(i, j)` of the result is `x[i, j] · y`.
pub fn kron_capped<T: Scalar>(x: &Matrix<T>, y: &Matrix<T>, cap: usize) -> Result<Matrix<T>> {
    let rows = x.rows().checked_mul(y.rows());
    let cols = x.cols().checked_mul(y.cols());
    match (rows, cols) {
        (Some(r), Some(c)) if r <= cap && c <= cap => {
            let (yr, yc) = y.shape();
            Ok(Matrix::from_fn(r, c, |i, j| {
                x[(i / yr, j / yc)] * y[(i % yr, j % yc)]
            }))
        }
        (r, c) => Err(QmError::Overflow {
            dim: r.unwrap_or(usize::MAX).max(c.unwrap_or(usize::MAX)),
            cap,
        }),
    }
}

/// Entrywise product.
pub fn hadamard<T: Scalar>(x: &Matrix<T>, y: &Matrix<T>) -> Result<Matrix<T>> {
    if x.shape() != y.shape() {
        return Err(QmError::DimensionMismatch(format!(
            "Hadamard product of {:?} and {:?}",
            x.shape(),
            y.shape()
        )));
    }
    Ok(Matrix::from_fn(x.rows(), x.cols(), |i, j| {
        x[(i, j)] * y[(i, j)]
    }))
}

/// Moore-Penrose pseudo-inverse `V · Σ⁻¹ · Uᴴ` of a square full-rank matrix.
pub fn pseudo_inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let f = svd(m)?;
    pseudo_inverse_from(&f)
}

pub fn pseudo_inverse_from(f: &SvdFactors) -> Result<ComplexMatrix> {
    let sigma_min = f.sigma_min();
    if sigma_min <= RANK_TOL {
        return Err(QmError::RankDeficient {
            sigma_min,
            tol: RANK_TOL,
        });
    }
    let n = f.sigma.len();
    let v_scaled = ComplexMatrix::from_fn(n, n, |i, j| f.v[(i, j)] / f.sigma[j]);
    Ok(&v_scaled * &f.u.adjoint())
}

/// A bijection on `0..len`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; image.len()];
        for &k in &image {
            if k >= image.len() || std::mem::replace(&mut seen[k], true) {
                return Err(QmError::InvalidPermutation(format!(
                    "{image:?} is not a bijection on 0..{}",
                    image.len()
                )));
            }
        }
        Ok(Self(image))
    }

    pub fn identity(n: usize) -> Self {
        Self((0..n).collect())
    }

    pub fn swap(n: usize, a: usize, b: usize) -> Result<Self> {
        let mut image: Vec<usize> = (0..n).collect();
        if a >= n || b >= n {
            return Err(QmError::InvalidPermutation(format!(
                "swap ({a}, {b}) out of range for length {n}"
            )));
        }
        image.swap(a, b);
        Ok(Self(image))
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &k) in self.0.iter().enumerate() {
            inv[k] = i;
        }
        Self(inv)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

/// Column `j` of the result is column `perm[j]` of `m`.
pub fn permute_columns<T: Scalar>(m: &Matrix<T>, perm: &Permutation) -> Result<Matrix<T>> {
    if perm.len() != m.cols() {
        return Err(QmError::InvalidPermutation(format!(
            "permutation of length {} applied to {} columns",
            perm.len(),
            m.cols()
        )));
    }
    Ok(Matrix::from_fn(m.rows(), m.cols(), |i, j| {
        m[(i, perm.0[j])]
    }))
}

/// Modified Gram-Schmidt on the columns of a square matrix (the Q factor of
/// a QR decomposition with positive-real `R` diagonal).
pub fn orthonormalize_columns(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let mut cols = m.columns();
    for j in 0..cols.len() {
        let (done, rest) = cols.split_at_mut(j);
        let cj = &mut rest[0];
        for _ in 0..2 {
            for q in done.iter() {
                let proj = inner(q, cj);
                for (x, qi) in cj.iter_mut().zip(q) {
                    *x -= proj * qi;
                }
            }
        }
        let nj = norm(cj);
        if nj <= RANK_TOL {
            return Err(QmError::RankDeficient {
                sigma_min: nj,
                tol: RANK_TOL,
            });
        }
        cj.iter_mut().for_each(|x| *x /= C64::new(nj, 0.0));
    }
    ComplexMatrix::from_columns(&cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(n: usize, m: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, m, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    fn two_signal(theta: f64) -> ComplexMatrix {
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        ComplexMatrix::from_real_rows(&[vec![c, c], vec![s, -s]]).unwrap()
    }

    #[test]
    fn kron_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2).unwrap(), ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_matches_lifted_two_signal_display() {
        let theta = std::f64::consts::FRAC_PI_3;
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let a2 = kron(&two_signal(theta), &two_signal(theta)).unwrap();
        let (cc, cs, ss) = (c * c, c * s, s * s);
        let expected = ComplexMatrix::from_real_rows(&[
            vec![cc, cc, cc, cc],
            vec![cs, -cs, cs, -cs],
            vec![cs, cs, -cs, -cs],
            vec![ss, -ss, -ss, ss],
        ])
        .unwrap();
        assert!(a2.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn kron_mixed_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let (x, y, z, w) = (
                random(2, 2, &mut rng),
                random(2, 2, &mut rng),
                random(2, 2, &mut rng),
                random(2, 2, &mut rng),
            );
            let lhs = &kron(&x, &y).unwrap() * &kron(&z, &w).unwrap();
            let rhs = kron(&(&x * &z), &(&y * &w)).unwrap();
            assert!(lhs.distance(&rhs) < 1e-12);
        }
    }

    #[test]
    fn kron_respects_cap() {
        let m = ComplexMatrix::identity(64);
        assert!(kron(&m, &m).is_ok());
        let big = ComplexMatrix::identity(65);
        assert!(matches!(
            kron(&big, &m),
            Err(QmError::Overflow {
                dim: 4160,
                cap: 4096
            })
        ));
    }

    #[test]
    fn hadamard_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = random(2, 3, &mut rng);
        let ones = ComplexMatrix::from_fn(2, 3, |_, _| C64::new(1.0, 0.0));
        assert_eq!(hadamard(&x, &ones).unwrap(), x);

        let m = ComplexMatrix::new(
            2,
            2,
            vec![
                C64::new(1.0, 1.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(2.0, 0.0),
            ],
        )
        .unwrap();
        let sq = hadamard(&m, &m.conj()).unwrap();
        assert_eq!(
            sq,
            ComplexMatrix::from_real_rows(&[vec![2.0, 0.0], vec![0.0, 4.0]]).unwrap()
        );

        assert!(matches!(
            hadamard(&x, &ComplexMatrix::identity(2)),
            Err(QmError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn hadamard_distributes_over_kron() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [2, 3] {
            let (x, y, z, w) = (
                random(n, n, &mut rng),
                random(n, n, &mut rng),
                random(n, n, &mut rng),
                random(n, n, &mut rng),
            );
            let lhs = hadamard(&kron(&x, &y).unwrap(), &kron(&z, &w).unwrap()).unwrap();
            let rhs = kron(&hadamard(&x, &z).unwrap(), &hadamard(&y, &w).unwrap()).unwrap();
            assert!(lhs.distance(&rhs) < 1e-12);
        }
    }

    #[test]
    fn pseudo_inverse_cases() {
        // Orthonormal input: pinv = adjoint.
        let h = two_signal(std::f64::consts::FRAC_PI_2);
        assert!(pseudo_inverse(&h).unwrap().distance(&h.adjoint()) < 1e-14);

        // Inverse singular values for the two-signal matrix.
        let theta = std::f64::consts::FRAC_PI_3;
        let a = two_signal(theta);
        let pinv = pseudo_inverse(&a).unwrap();
        let f = svd(&pinv).unwrap();
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        assert!((f.sigma[0] - 1.0 / (2f64.sqrt() * s)).abs() < 1e-12);
        assert!((f.sigma[1] - 1.0 / (2f64.sqrt() * c)).abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = &random(3, 3, &mut rng) + &ComplexMatrix::identity(3).scale(C64::new(3.0, 0.0));
        let prod = &pseudo_inverse(&m).unwrap() * &m;
        assert!(prod.distance(&ComplexMatrix::identity(3)) < 1e-10);

        let singular = ComplexMatrix::from_real_rows(&[vec![1.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(
            pseudo_inverse(&singular),
            Err(QmError::RankDeficient { .. })
        ));
    }

    #[test]
    fn permutations() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random(4, 4, &mut rng);
        assert_eq!(permute_columns(&m, &Permutation::identity(4)).unwrap(), m);

        let i2 = RealMatrix::identity(2);
        let swapped = permute_columns(&i2, &Permutation::swap(2, 0, 1).unwrap()).unwrap();
        assert_eq!(
            swapped,
            RealMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
        );

        let p = Permutation::new(vec![2, 0, 3, 1]).unwrap();
        let round = permute_columns(&permute_columns(&m, &p).unwrap(), &p.inverse()).unwrap();
        assert_eq!(round, m);

        assert!(Permutation::new(vec![0, 0, 1]).is_err());
        assert!(Permutation::new(vec![0, 3]).is_err());
        assert!(permute_columns(&m, &Permutation::identity(3)).is_err());
    }

    #[test]
    fn orthonormalize_gives_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let q = orthonormalize_columns(&random(5, 5, &mut rng)).unwrap();
        assert!((&q.adjoint() * &q).distance(&ComplexMatrix::identity(5)) < 1e-13);
    }
}
