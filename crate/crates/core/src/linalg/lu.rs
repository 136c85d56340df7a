use num_complex::Complex64;

use super::matrix::{CMatrix, ONE, ZERO};
use crate::error::{Error, Result};

/// Relative pivot floor below which a matrix is treated as singular (≈ condition 1e12).
const SINGULAR_PIVOT_RATIO: f64 = 1e-12;

/// LU factorization with partial pivoting, `P M = L U`.
pub struct LuDecomposition {
    lu: CMatrix,
    perm: Vec<usize>,
    sign: f64,
}

impl LuDecomposition {
    pub fn new(m: &CMatrix) -> Self {
        let n = m.dim();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for col in 0..n {
            let pivot_row = (col..n)
                .max_by(|&a, &b| lu[(a, col)].norm().total_cmp(&lu[(b, col)].norm()))
                .unwrap_or(col);
            if pivot_row != col {
                for j in 0..n {
                    let tmp = lu[(col, j)];
                    lu[(col, j)] = lu[(pivot_row, j)];
                    lu[(pivot_row, j)] = tmp;
                }
                perm.swap(col, pivot_row);
                sign = -sign;
            }
            let pivot = lu[(col, col)];
            if pivot == ZERO {
                continue;
            }
            for row in (col + 1)..n {
                let factor = lu[(row, col)] / pivot;
                lu[(row, col)] = factor;
                if factor == ZERO {
                    continue;
                }
                for j in (col + 1)..n {
                    let u = lu[(col, j)];
                    lu[(row, j)] -= factor * u;
                }
            }
        }
        Self { lu, perm, sign }
    }

    pub fn determinant(&self) -> Complex64 {
        let n = self.lu.dim();
        (0..n).fold(Complex64::new(self.sign, 0.0), |acc, i| acc * self.lu[(i, i)])
    }

    /// Smallest `|u_ii| / max |u_jj|`, a cheap conditioning proxy.
    fn pivot_ratio(&self) -> (f64, usize) {
        let n = self.lu.dim();
        let max = (0..n).map(|i| self.lu[(i, i)].norm()).fold(0.0, f64::max);
        let (idx, min) = (0..n)
            .map(|i| (i, self.lu[(i, i)].norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap_or((0, 0.0));
        if max == 0.0 {
            (0.0, idx)
        } else {
            (min / max, idx)
        }
    }

    pub fn solve(&self, rhs: &[Complex64]) -> Vec<Complex64> {
        let n = self.lu.dim();
        let mut y: Vec<Complex64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[(i, j)];
                y[i] = y[i] - l * y[j];
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let u = self.lu[(i, j)];
                y[i] = y[i] - u * y[j];
            }
            y[i] /= self.lu[(i, i)];
        }
        y
    }
}

/// Matrix inverse via partial-pivoting LU. Fails with `Singular` when a pivot falls below
/// `1e-12` of the largest pivot.
pub fn inverse(m: &CMatrix) -> Result<CMatrix> {
    let n = m.dim();
    let lu = LuDecomposition::new(m);
    let (ratio, pivot) = lu.pivot_ratio();
    if !(ratio > SINGULAR_PIVOT_RATIO) {
        return Err(Error::Singular { pivot });
    }
    let mut out = CMatrix::zeros(n);
    let mut e = vec![ZERO; n];
    for j in 0..n {
        e.iter_mut().for_each(|x| *x = ZERO);
        e[j] = ONE;
        let col = lu.solve(&e);
        for (i, v) in col.into_iter().enumerate() {
            out[(i, j)] = v;
        }
    }
    Ok(out)
}

pub fn determinant(m: &CMatrix) -> Complex64 {
    LuDecomposition::new(m).determinant()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::CMatrix;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn inverse_of_unipotent_shift() {
        // (I - S)^{-1} = I + S when S^2 = 0
        let s = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let m = &CMatrix::identity(2) - &s;
        let inv = inverse(&m).unwrap();
        let expected = &CMatrix::identity(2) + &s;
        assert!(inv.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn inverse_of_diagonal() {
        let m = CMatrix::diagonal(&[c(2.0), c(4.0)]);
        let inv = inverse(&m).unwrap();
        assert!(inv.max_abs_diff(&CMatrix::diagonal(&[c(0.5), c(0.25)])) < 1e-15);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let m = CMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]).unwrap();
        assert!(matches!(inverse(&m), Err(Error::Singular { .. })));
    }

    #[test]
    fn determinant_with_pivoting() {
        let m = CMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        assert!((determinant(&m) - c(-1.0)).norm() < 1e-15);
        let m = CMatrix::from_fn(3, |i, j| Complex64::new((i + 2 * j) as f64, (i * j) as f64 - 1.0));
        // cofactor expansion
        let a = |i: usize, j: usize| m[(i, j)];
        let expected = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
            - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
            + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
        assert!((determinant(&m) - expected).norm() < 1e-12);
    }
}
