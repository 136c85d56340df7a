use num_complex::Complex64;

use super::matrix::{CMatrix, ZERO};
use crate::error::{Error, Result};

/// Singular values of a `rows x cols` complex matrix given column-major, descending.
///
/// One-sided (Hestenes) Jacobi: columns are rotated pairwise until mutually orthogonal;
/// the singular values are then the column norms.
pub fn singular_values_rect(rows: usize, cols: usize, col_major: &[Complex64]) -> Result<Vec<f64>> {
    if col_major.len() != rows * cols {
        return Err(Error::DimensionMismatch {
            expected: rows * cols,
            actual: col_major.len(),
        });
    }
    let mut columns: Vec<Vec<Complex64>> = if rows >= cols {
        col_major.chunks(rows).map(|c| c.to_vec()).collect()
    } else {
        // work on the conjugate transpose so there are at most `rows` columns
        (0..rows)
            .map(|i| (0..cols).map(|j| col_major[j * rows + i].conj()).collect())
            .collect()
    };
    let k = columns.len();
    let tol = f64::EPSILON * (k.max(1) as f64);
    // pairs whose coupling is negligible against the whole matrix are left alone; otherwise
    // columns of rounding-level norm keep rotating without progress
    let floor = f64::EPSILON * f64::EPSILON * col_major.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let mut converged = false;
    for _ in 0..80 {
        let mut rotated = false;
        for p in 0..k {
            for q in (p + 1)..k {
                let alpha: f64 = columns[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = columns[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma = columns[p]
                    .iter()
                    .zip(&columns[q])
                    .fold(ZERO, |acc, (a, b)| acc + a.conj() * b);
                let g = gamma.norm();
                if g <= floor || g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = columns.split_at_mut(q);
                let cp = &mut left[p];
                let cq = &mut right[0];
                for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
                    let yq = *y * phase.conj();
                    let xp = *x;
                    *x = xp * c - yq * s;
                    *y = xp * s + yq * c;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence("one-sided Jacobi SVD".into()));
    }
    let mut sv: Vec<f64> = columns
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// Singular values of a square matrix, descending.
pub fn singular_values(m: &CMatrix) -> Result<Vec<f64>> {
    let n = m.dim();
    let col_major: Vec<Complex64> = (0..n).flat_map(|j| (0..n).map(move |i| (i, j))).map(|(i, j)| m[(i, j)]).collect();
    singular_values_rect(n, n, &col_major)
}

/// Spectral (operator 2-) norm.
pub fn operator_norm(m: &CMatrix) -> f64 {
    singular_values(m)
        .map(|sv| sv.first().copied().unwrap_or(0.0))
        .unwrap_or_else(|_| m.frobenius_norm())
}
