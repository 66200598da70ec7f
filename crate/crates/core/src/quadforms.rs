//! The coefficient-side forms Q and Q′ and the Hermitian matrix of Q.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::{classify, ExponentSequence, GapClassification};
use crate::linalg::Matrix;
use crate::numeric::NeumaierSum;
use crate::sums::AugmentedExpSum;

/// Pair gaps below this make the 2×2 block numerically singular.
pub const MIN_PAIR_GAP: f64 = 1e-12;

fn check_pairing(cls: &GapClassification, seq: &ExponentSequence) -> Result<()> {
    if cls.len != seq.len() || classify(seq)? != *cls {
        return Err(Error::ClassificationMismatch);
    }
    Ok(())
}

/// Q(x) = Σ_{A1}|x_k|² + Σ_{A2}[|x_k + x_{k+1}|² + (ω_{k+1} − ω_k)²(|x_k|² + |x_{k+1}|²)].
///
/// Both terms of a pair sit inside the A2 sum, as the direct-inequality proof requires.
pub fn q_form(cls: &GapClassification, seq: &ExponentSequence, coeffs: &[Complex64]) -> Result<f64> {
    check_pairing(cls, seq)?;
    if coeffs.len() != seq.len() {
        return Err(Error::DimensionMismatch {
            expected: seq.len(),
            found: coeffs.len(),
        });
    }
    let w = seq.omegas();
    let mut acc = NeumaierSum::new();
    for &k in &cls.a1 {
        acc += coeffs[k].norm_sqr();
    }
    for (&k, &p) in &cls.partners {
        let d = w[p] - w[k];
        acc += (coeffs[k] + coeffs[p]).norm_sqr();
        acc += d * d * (coeffs[k].norm_sqr() + coeffs[p].norm_sqr());
    }
    Ok(acc.value())
}

/// Q′(x) = |x′|² + Q(x) for the base part of an augmented sum.
pub fn q_prime(aug: &AugmentedExpSum, cls: &GapClassification, seq: &ExponentSequence) -> Result<f64> {
    Ok(aug.x_prime().norm_sqr() + q_form(cls, seq, aug.base().coeffs())?)
}

/// One diagonal block of the Q matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QBlock {
    Single { index: usize },
    Pair { lead: usize, partner: usize, gap: f64 },
}

impl QBlock {
    /// Eigenvalues in ascending order: {1} or {d², 2 + d²}.
    pub fn eigenvalues(&self) -> Vec<f64> {
        match *self {
            QBlock::Single { .. } => vec![1.0],
            QBlock::Pair { gap, .. } => {
                let d2 = gap * gap;
                vec![d2, 2.0 + d2]
            }
        }
    }
}

/// Block-diagonal matrix of Q over the full index set, optionally restricted to active indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QMatrix {
    pub len: usize,
    pub blocks: Vec<QBlock>,
    /// Indices kept in the dense form, ascending.
    pub active: Vec<usize>,
}

pub fn q_matrix(cls: &GapClassification, seq: &ExponentSequence) -> Result<QMatrix> {
    check_pairing(cls, seq)?;
    let w = seq.omegas();
    let mut blocks: Vec<QBlock> = cls.a1.iter().map(|&index| QBlock::Single { index }).collect();
    for (&lead, &partner) in &cls.partners {
        let gap = w[partner] - w[lead];
        if gap < MIN_PAIR_GAP {
            return Err(Error::SingularQ { gap });
        }
        blocks.push(QBlock::Pair { lead, partner, gap });
    }
    blocks.sort_by_key(|b| match *b {
        QBlock::Single { index } => index,
        QBlock::Pair { lead, .. } => lead,
    });
    Ok(QMatrix {
        len: seq.len(),
        blocks,
        active: (0..seq.len()).collect(),
    })
}

impl QMatrix {
    pub fn dim(&self) -> usize {
        self.active.len()
    }

    /// Principal submatrix on `active` (indices into the full sequence).
    pub fn restrict(&self, active: &[usize]) -> Result<QMatrix> {
        if let Some(&k) = active.iter().find(|&&k| k >= self.len) {
            return Err(Error::DimensionMismatch {
                expected: self.len,
                found: k + 1,
            });
        }
        let mut active = active.to_vec();
        active.sort_unstable();
        active.dedup();
        Ok(QMatrix {
            len: self.len,
            blocks: self.blocks.clone(),
            active,
        })
    }

    fn full_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.len);
        for b in &self.blocks {
            match *b {
                QBlock::Single { index } => m[(index, index)] = Complex64::new(1.0, 0.0),
                QBlock::Pair { lead, partner, gap } => {
                    let diag = Complex64::new(1.0 + gap * gap, 0.0);
                    m[(lead, lead)] = diag;
                    m[(partner, partner)] = diag;
                    m[(lead, partner)] = Complex64::new(1.0, 0.0);
                    m[(partner, lead)] = Complex64::new(1.0, 0.0);
                }
            }
        }
        m
    }

    /// Dense Hermitian matrix over the active indices.
    pub fn to_dense(&self) -> Matrix {
        self.full_dense().principal(&self.active)
    }

    /// Q ⊕ [1]: the matrix of Q′ with the augmented coefficient last.
    pub fn augmented_dense(&self) -> Matrix {
        let base = self.to_dense();
        let n = base.dim();
        Matrix::from_fn(n + 1, |i, j| {
            if i < n && j < n {
                base[(i, j)]
            } else if i == n && j == n {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_eig;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn integers(n: usize) -> ExponentSequence {
        ExponentSequence::with_gap((0..n).map(|k| k as f64).collect(), 1.0).unwrap()
    }

    #[test]
    fn classical_case_is_sum_of_squares() {
        let s = integers(3);
        let cls = classify(&s).unwrap();
        let q = q_form(&cls, &s, &[c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0)]).unwrap();
        assert_eq!(q, 3.0);
        assert_eq!(q_matrix(&cls, &s).unwrap().to_dense(), Matrix::identity(3));
    }

    #[test]
    fn close_pair() {
        let s = ExponentSequence::new(vec![0.0, 0.1], 1.0, 0.5).unwrap();
        let cls = classify(&s).unwrap();
        let q = q_form(&cls, &s, &[c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        assert!((q - 0.02).abs() < 1e-16);
        let m = q_matrix(&cls, &s).unwrap();
        let dense = m.to_dense();
        assert!((dense[(0, 0)].re - 1.01).abs() < 1e-15);
        assert_eq!(dense[(0, 1)], c(1.0, 0.0));
        let eig = hermitian_eig(&dense).values;
        assert!((eig[0] - 0.01).abs() < 1e-13 && (eig[1] - 2.01).abs() < 1e-13);
        let be = m.blocks[0].eigenvalues();
        assert!((be[0] - 0.01).abs() < 1e-16);
    }

    #[test]
    fn q_prime_adds_augmented_energy() {
        use crate::sums::ExpSum;
        let s = integers(2);
        let cls = classify(&s).unwrap();
        let base = ExpSum::over(&s, vec![c(0.0, 0.0); 2]).unwrap();
        let aug = AugmentedExpSum::new(base, 0.5, c(2.0, 0.0)).unwrap();
        assert_eq!(q_prime(&aug, &cls, &s).unwrap(), 4.0);
    }

    #[test]
    fn mismatched_classification_rejected() {
        let a = integers(3);
        let b = integers(4);
        let cls = classify(&a).unwrap();
        assert_eq!(q_form(&cls, &b, &[c(1.0, 0.0); 4]), Err(Error::ClassificationMismatch));
        assert_eq!(q_matrix(&cls, &b), Err(Error::ClassificationMismatch));
    }

    #[test]
    fn restriction_takes_principal_submatrix() {
        let s = ExponentSequence::new(vec![0.0, 0.1, 2.0, 2.3, 4.0], 1.0, 0.5).unwrap();
        let cls = classify(&s).unwrap();
        let m = q_matrix(&cls, &s).unwrap();
        let r = m.restrict(&[1, 2, 4]).unwrap().to_dense();
        assert_eq!(r.dim(), 3);
        assert!((r[(0, 0)].re - 1.01).abs() < 1e-15);
        assert!((r[(1, 1)].re - 1.09).abs() < 1e-15);
        assert_eq!(r[(0, 1)], c(0.0, 0.0));
        assert_eq!(r[(2, 2)], c(1.0, 0.0));
    }

    #[test]
    fn tiny_pair_gap_is_singular() {
        let s = ExponentSequence::new(vec![0.0, 1e-13], 1.0, 0.5).unwrap();
        let cls = classify(&s).unwrap();
        assert!(matches!(q_matrix(&cls, &s), Err(Error::SingularQ { .. })));
    }
}
