//! Signal sets: the sender's state vectors arranged as columns of a square
//! matrix, with prior probabilities.

use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{QmError, Result};
use crate::matlin::{
    kron_capped, norm, svd, ComplexMatrix, RealMatrix, DEFAULT_DIMENSION_CAP, RANK_TOL,
};

pub const NORM_TOL: f64 = 1e-10;
pub const PRIOR_SUM_TOL: f64 = 1e-12;

/// Linearly independent unit-norm states `|Ψ_i⟩` (the columns of `a`) sent
/// with probabilities `priors[i]`.
#[derive(Clone, Debug)]
pub struct SignalSet {
    a: ComplexMatrix,
    priors: Vec<f64>,
    label: String,
    k: usize,
}

impl SignalSet {
    /// Validates a state matrix. Priors default to uniform.
    pub fn new(
        a: ComplexMatrix,
        priors: Option<Vec<f64>>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let (dim, count) = a.shape();
        if dim != count {
            return Err(QmError::NotSquare { count, dim });
        }
        for j in 0..count {
            let nj = norm(&a.column(j));
            if (nj - 1.0).abs() > NORM_TOL {
                return Err(QmError::NotNormalized {
                    column: j,
                    norm: nj,
                });
            }
        }
        let priors = match priors {
            Some(p) => {
                validate_priors(&p)?;
                if p.len() != count {
                    return Err(QmError::BadPriors(format!(
                        "{} priors for {count} states",
                        p.len()
                    )));
                }
                p
            }
            None => vec![1.0 / count as f64; count],
        };
        let sigma_min = svd(&a)?.sigma_min();
        if sigma_min <= RANK_TOL {
            return Err(QmError::LinearlyDependent {
                sigma_min,
                tol: RANK_TOL,
            });
        }
        Ok(Self {
            a,
            priors,
            label: label.into(),
            k: 1,
        })
    }

    /// Builds the set from state vectors, one per column.
    pub fn from_columns(columns: &[Vec<C64>], priors: Option<Vec<f64>>) -> Result<Self> {
        let dim = columns.first().map_or(0, Vec::len);
        if columns.is_empty() || columns.len() != dim {
            return Err(QmError::NotSquare {
                count: columns.len(),
                dim,
            });
        }
        if columns.iter().any(|c| c.len() != dim) {
            return Err(QmError::DimensionMismatch(
                "state vectors have different dimensions".into(),
            ));
        }
        Self::new(ComplexMatrix::from_columns(columns)?, priors, "")
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// State matrix; column `i` is `|Ψ_i⟩`.
    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Number of elementary signals per joint state (1 unless lifted).
    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of states (and Hilbert-space dimension).
    pub fn n(&self) -> usize {
        self.a.cols()
    }

    pub fn has_uniform_priors(&self) -> bool {
        let u = 1.0 / self.n() as f64;
        self.priors.iter().all(|p| (p - u).abs() <= PRIOR_SUM_TOL)
    }

    /// Gram matrix `AᴴA` of pairwise overlaps `⟨Ψ_i|Ψ_j⟩`.
    pub fn gram(&self) -> ComplexMatrix {
        &self.a.adjoint() * &self.a
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: SignalSetDocument =
            serde_json::from_str(text).map_err(|e| QmError::Parse(e.to_string()))?;
        doc.into_signal_set()
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| QmError::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn to_document(&self) -> SignalSetDocument {
        SignalSetDocument {
            label: self.label.clone(),
            columns: self
                .a
                .columns()
                .into_iter()
                .map(|c| c.into_iter().map(|z| [z.re, z.im]).collect())
                .collect(),
            priors: Some(self.priors.clone()),
        }
    }
}

/// On-disk form of a signal set. Each entry of `columns` is one state vector
/// given as `[re, im]` pairs.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SignalSetDocument {
    #[serde(default)]
    pub label: String,
    pub columns: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    pub priors: Option<Vec<f64>>,
}

impl SignalSetDocument {
    pub fn into_signal_set(self) -> Result<SignalSet> {
        let columns: Vec<Vec<C64>> = self
            .columns
            .iter()
            .map(|c| c.iter().map(|&[re, im]| C64::new(re, im)).collect())
            .collect();
        Ok(SignalSet::from_columns(&columns, self.priors)?.with_label(self.label))
    }
}

fn validate_priors(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(QmError::BadPriors("empty prior vector".into()));
    }
    if let Some(x) = p.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(QmError::BadPriors(format!("invalid probability {x}")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > PRIOR_SUM_TOL {
        return Err(QmError::BadPriors(format!("priors sum to {total}")));
    }
    Ok(())
}

/// Two equiprobable real states at angle `theta`:
/// `(cos θ/2, sin θ/2)` and `(cos θ/2, −sin θ/2)`.
pub fn two_signal_set(theta: f64) -> Result<SignalSet> {
    if !(theta > 0.0 && theta <= FRAC_PI_2) {
        return Err(QmError::ThetaOutOfRange(theta));
    }
    let (s, c) = (theta / 2.0).sin_cos();
    let a = ComplexMatrix::from_real(&RealMatrix::from_rows(&[vec![c, c], vec![s, -s]])?);
    SignalSet::new(a, None, format!("two-signal theta={theta}"))
}

/// K-fold joint signal set with the default dimension cap.
pub fn collective_lift(s: &SignalSet, k: usize) -> Result<SignalSet> {
    collective_lift_capped(s, k, DEFAULT_DIMENSION_CAP)
}

/// State matrix `A^{⊗k}` with product priors. Column `(i₁,…,i_k)` sits at
/// lexicographic index `i₁·N^{k−1} + … + i_k`.
pub fn collective_lift_capped(s: &SignalSet, k: usize, cap: usize) -> Result<SignalSet> {
    if k == 0 {
        return Err(QmError::InvalidArgument(
            "lift order must be at least 1".into(),
        ));
    }
    let n = s.n();
    match n.checked_pow(k as u32) {
        Some(d) if d <= cap => {}
        Some(d) => return Err(QmError::Overflow { dim: d, cap }),
        None => {
            return Err(QmError::Overflow {
                dim: usize::MAX,
                cap,
            })
        }
    }
    let mut a = s.a.clone();
    let mut priors = s.priors.clone();
    for _ in 1..k {
        a = kron_capped(&a, &s.a, cap)?;
        priors = priors
            .iter()
            .flat_map(|p| s.priors.iter().map(move |q| p * q))
            .collect();
    }
    // Renormalize the product priors against rounding before validation.
    let total: f64 = priors.iter().sum();
    priors.iter_mut().for_each(|p| *p /= total);
    let label = if k == 1 {
        s.label.clone()
    } else {
        format!("{} (x{k})", s.label)
    };
    let mut lifted = SignalSet::new(a, Some(priors), label)?;
    lifted.k = s.k * k;
    Ok(lifted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_6};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn standard_basis_is_valid() {
        let s =
            SignalSet::from_columns(&[vec![c(1.0), c(0.0)], vec![c(0.0), c(1.0)]], None).unwrap();
        assert_eq!(s.priors(), &[0.5, 0.5]);
        assert!(s.has_uniform_priors());
    }

    #[test]
    fn two_signal_columns_and_overlap() {
        let s = two_signal_set(FRAC_PI_3).unwrap();
        let a = s.a();
        let expected = [[0.8660, 0.8660], [0.5000, -0.5000]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((a[(i, j)].re - expected[i][j]).abs() < 5e-5);
            }
        }
        let overlap = s.gram()[(0, 1)];
        assert!((overlap.re - 0.5).abs() < 1e-12 && overlap.im.abs() < 1e-12);
        let sigma_min = svd(a).unwrap().sigma_min();
        assert!((sigma_min - 2f64.sqrt() * FRAC_PI_6.sin()).abs() < 1e-12);
        assert!((sigma_min - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-4);
    }

    #[test]
    fn orthogonal_limit() {
        let s = two_signal_set(FRAC_PI_2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.a()[(0, 0)].re - h).abs() < 1e-15);
        assert!((s.a()[(1, 1)].re + h).abs() < 1e-15);
        assert!(s.gram()[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn theta_range() {
        for bad in [0.0, -0.1, FRAC_PI_2 + 1e-9, f64::NAN] {
            assert!(matches!(
                two_signal_set(bad),
                Err(QmError::ThetaOutOfRange(_))
            ));
        }
    }

    #[test]
    fn validation_errors() {
        let e1 = vec![c(1.0), c(0.0)];
        assert!(matches!(
            SignalSet::from_columns(&[e1.clone(), e1.clone()], None),
            Err(QmError::LinearlyDependent { .. })
        ));
        assert!(matches!(
            SignalSet::from_columns(&[vec![c(2.0), c(0.0)], e1.clone()], None),
            Err(QmError::NotNormalized { column: 0, .. })
        ));
        assert!(matches!(
            SignalSet::from_columns(std::slice::from_ref(&e1), None),
            Err(QmError::NotSquare { count: 1, dim: 2 })
        ));
        let e2 = vec![c(0.0), c(1.0)];
        assert!(matches!(
            SignalSet::from_columns(&[e1.clone(), e2.clone()], Some(vec![0.6, 0.6])),
            Err(QmError::BadPriors(_))
        ));
        assert!(matches!(
            SignalSet::from_columns(&[e1.clone(), e2.clone()], Some(vec![1.5, -0.5])),
            Err(QmError::BadPriors(_))
        ));
        assert!(SignalSet::from_columns(&[e1, e2], Some(vec![0.7, 0.3])).is_ok());
    }

    #[test]
    fn lift_of_two_signal_set() {
        let s = two_signal_set(FRAC_PI_3).unwrap();
        let one = collective_lift(&s, 1).unwrap();
        assert_eq!(one.a(), s.a());
        assert_eq!(one.k(), 1);

        let two = collective_lift(&s, 2).unwrap();
        assert_eq!(two.k(), 2);
        assert_eq!(two.priors(), &[0.25; 4]);
        let (sn, cs) = (FRAC_PI_6.sin(), FRAC_PI_6.cos());
        let (cc, xs, ss) = (cs * cs, cs * sn, sn * sn);
        let display = ComplexMatrix::from_real_rows(&[
            vec![cc, cc, cc, cc],
            vec![xs, -xs, xs, -xs],
            vec![xs, xs, -xs, -xs],
            vec![ss, -ss, -ss, ss],
        ])
        .unwrap();
        assert!(two.a().max_abs_diff(&display) < 1e-12);

        let sv = svd(two.a()).unwrap().sigma;
        let base = svd(s.a()).unwrap().sigma;
        let mut products: Vec<f64> = base
            .iter()
            .flat_map(|x| base.iter().map(move |y| x * y))
            .collect();
        products.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in sv.iter().zip(&products) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn lift_limits() {
        let s = two_signal_set(FRAC_PI_3).unwrap();
        assert!(collective_lift(&s, 0).is_err());
        assert!(matches!(
            collective_lift_capped(&s, 3, 4),
            Err(QmError::Overflow { dim: 8, cap: 4 })
        ));
    }

    #[test]
    fn json_round_trip() {
        let s = two_signal_set(FRAC_PI_3).unwrap();
        let text = serde_json::to_string(&s.to_document()).unwrap();
        let back = SignalSet::from_json_str(&text).unwrap();
        assert_eq!(back.a(), s.a());
        assert_eq!(back.label(), s.label());

        let doc = r#"{"label":"x","columns":[[[1,0],[0,0]],[[0,0],[0,1]]],"priors":null}"#;
        let t = SignalSet::from_json_str(doc).unwrap();
        assert_eq!(t.a()[(1, 1)], C64::new(0.0, 1.0));
        assert_eq!(t.priors(), &[0.5, 0.5]);
        assert!(matches!(
            SignalSet::from_json_str("{"),
            Err(QmError::Parse(_))
        ));
    }
}
