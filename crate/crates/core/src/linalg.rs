//! Dense complex linear algebra for the small Hermitian problems in this crate.
//!
//! Dimensions stay in the tens, so everything is a plain row-major `Vec` with
//! O(n³) algorithms: Cholesky, triangular solves and cyclic Jacobi rotations.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Complex64>(n: usize, mut f: F) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    /// Principal submatrix on the given index list.
    pub fn principal(&self, idx: &[usize]) -> Matrix {
        Matrix::from_fn(idx.len(), |i, j| self[(idx[i], idx[j])])
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// v^H · A · v. Real part only; the imaginary part vanishes for Hermitian A.
    pub fn quad_form(&self, v: &[Complex64]) -> f64 {
        let av = self.mul_vec(v);
        v.iter().zip(&av).map(|(a, b)| (a.conj() * b).re).sum()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let scale = self.frobenius().max(1.0);
        (0..self.n).all(|i| (i..self.n).all(|j| (self[(i, j)] - self[(j, i)].conj()).norm() <= tol * scale))
    }

    /// Dense array-of-rows export, each entry as `[re, im]`.
    pub fn to_rows(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| [self[(i, j)].re, self[(i, j)].im]).collect())
            .collect()
    }

    fn hermitize(&mut self) {
        for i in 0..self.n {
            self[(i, i)] = Complex64::new(self[(i, i)].re, 0.0);
            for j in i + 1..self.n {
                let avg = 0.5 * (self[(i, j)] + self[(j, i)].conj());
                self[(i, j)] = avg;
                self[(j, i)] = avg.conj();
            }
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// Lower-triangular Cholesky factor L with A = L·L^H.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: Matrix,
}

impl Cholesky {
    pub fn factor(a: &Matrix) -> Result<Self> {
        let n = a.dim();
        let mut l = Matrix::zeros(n);
        for j in 0..n {
            let mut d = a[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite);
            }
            let d = d.sqrt();
            l[(j, j)] = Complex64::new(d, 0.0);
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / d;
            }
        }
        Ok(Self { l })
    }

    pub fn factor_l(&self) -> &Matrix {
        &self.l
    }

    /// Solves L·y = b.
    pub fn forward(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.l.dim();
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.l[(i, k)] * y[k];
            }
            y[i] = s / self.l[(i, i)];
        }
        y
    }

    /// Solves L^H·x = y.
    pub fn backward(&self, y: &[Complex64]) -> Vec<Complex64> {
        let n = self.l.dim();
        let mut x = y.to_vec();
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in i + 1..n {
                s -= self.l[(k, i)].conj() * x[k];
            }
            x[i] = s / self.l[(i, i)];
        }
        x
    }

    /// Solves A·x = b.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        self.backward(&self.forward(b))
    }
}

/// Eigen-decomposition with eigenvalues ascending and eigenvectors as matching columns.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

const JACOBI_OFF_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigensolver for a Hermitian matrix.
///
/// Each rotation first removes the phase of the pivot entry with a diagonal unitary and then
/// applies a real Givens rotation. Sweeps stop once the off-diagonal Frobenius norm is below
/// `1e-13·‖A‖_F`.
pub fn hermitian_eig(a: &Matrix) -> Eigen {
    let n = a.dim();
    let mut a = a.clone();
    a.hermitize();
    let mut v = Matrix::identity(n);
    let scale = a.frobenius();
    let threshold = JACOBI_OFF_TOL * scale;

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= threshold || scale == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 || mag < 1e-300 {
                    continue;
                }
                // Phase: column q *= e^{-iφ}, row q *= e^{iφ}, so that a[p][q] becomes |a_pq|.
                let phase = apq / mag;
                let phase_conj = phase.conj();
                for i in 0..n {
                    a[(i, q)] *= phase_conj;
                    v[(i, q)] *= phase_conj;
                }
                for j in 0..n {
                    a[(q, j)] *= phase;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * c - aiq * s;
                    a[(i, q)] = aip * s + aiq * c;
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * c - viq * s;
                    v[(i, q)] = vip * s + viq * c;
                }
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = apj * c - aqj * s;
                    a[(q, j)] = apj * s + aqj * c;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = Matrix::from_fn(n, |i, j| v[(i, order[j])]);
    Eigen { values, vectors }
}

/// Generalized eigenproblem S·v = λ·Q·v for Hermitian S and Hermitian positive definite Q.
///
/// Reduced by congruence with the Cholesky factor of Q to the standard problem
/// L⁻¹·S·L⁻ᴴ, which is then diagonalized by [`hermitian_eig`]. Returned eigenvectors are
/// Q-orthonormal.
pub fn hermitian_pencil_eig(s: &Matrix, q: &Matrix) -> Result<Eigen> {
    let n = s.dim();
    if q.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: q.dim(),
        });
    }
    let chol = Cholesky::factor(q)?;
    // X = L⁻¹ S (column by column), then A = L⁻¹ X^H.
    let mut x = Matrix::zeros(n);
    for j in 0..n {
        let col = chol.forward(&s.column(j));
        for i in 0..n {
            x[(i, j)] = col[i];
        }
    }
    let mut a = Matrix::zeros(n);
    for j in 0..n {
        let xh_col: Vec<Complex64> = (0..n).map(|i| x[(j, i)].conj()).collect();
        let col = chol.forward(&xh_col);
        for i in 0..n {
            a[(i, j)] = col[i];
        }
    }
    let eig = hermitian_eig(&a);
    let mut vectors = Matrix::zeros(n);
    for j in 0..n {
        let v = chol.backward(&eig.vectors.column(j));
        for i in 0..n {
            vectors[(i, j)] = v[i];
        }
    }
    Ok(Eigen {
        values: eig.values,
        vectors,
    })
}

/// Serializable dense form of a Hermitian matrix.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct DenseRows(pub Vec<Vec<[f64; 2]>>);

impl From<&Matrix> for DenseRows {
    fn from(m: &Matrix) -> Self {
        DenseRows(m.to_rows())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = c(rng.gen_range(-2.0..2.0));
            for j in i + 1..n {
                let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    fn random_pd(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
        let b = random_hermitian(rng, n);
        let mut q = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                q[(i, j)] = (0..n).map(|k| b[(i, k)] * b[(j, k)].conj()).sum();
            }
            q[(i, i)] += c(0.5);
        }
        q
    }

    #[test]
    fn scaled_identity() {
        let s = Matrix::from_fn(3, |i, j| if i == j { c(2.0) } else { c(0.0) });
        let e = hermitian_pencil_eig(&s, &Matrix::identity(3)).unwrap();
        for v in e.values {
            assert!((v - 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn decoupled_ratios() {
        let s = Matrix::from_fn(2, |i, j| if i == j { c([1.0, 4.0][i]) } else { c(0.0) });
        let q = Matrix::from_fn(2, |i, j| if i == j { c([1.0, 2.0][i]) } else { c(0.0) });
        let e = hermitian_pencil_eig(&s, &q).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-15);
        assert!((e.values[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let q = Matrix::from_fn(2, |i, j| if i == j { c(1.0) } else { c(2.0) });
        assert_eq!(
            hermitian_pencil_eig(&Matrix::identity(2), &q).unwrap_err(),
            Error::NotPositiveDefinite
        );
    }

    #[test]
    fn jacobi_reconstructs_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 2, 5, 12] {
            let a = random_hermitian(&mut rng, n);
            let e = hermitian_eig(&a);
            for (k, &lam) in e.values.iter().enumerate() {
                let v = e.vectors.column(k);
                let av = a.mul_vec(&v);
                let res: f64 = av.iter().zip(&v).map(|(x, y)| (x - y * lam).norm_sqr()).sum::<f64>().sqrt();
                assert!(res < 1e-12 * a.frobenius().max(1.0), "residual {res}");
            }
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn pencil_residuals_and_q_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2, 6, 10] {
            let s = random_hermitian(&mut rng, n);
            let q = random_pd(&mut rng, n);
            let e = hermitian_pencil_eig(&s, &q).unwrap();
            for (k, &lam) in e.values.iter().enumerate() {
                let v = e.vectors.column(k);
                let sv = s.mul_vec(&v);
                let qv = q.mul_vec(&v);
                let res: f64 = sv.iter().zip(&qv).map(|(a, b)| (a - b * lam).norm_sqr()).sum::<f64>().sqrt();
                assert!(res <= 1e-9 * s.frobenius(), "residual {res}");
                assert!((q.quad_form(&v) - 1.0).abs() < 1e-10);
            }
        }
    }
}
