//! Hermitian eigendecomposition (Householder tridiagonalization + implicit QL) and
//! eigenvalues of general complex matrices (Hessenberg reduction + shifted QR).

use num_complex::Complex64;

use super::matrix::{inner, vector_norm, CMatrix, ONE, ZERO};
use crate::error::{Error, Result};

/// Relative symmetry residual accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

const EPS: f64 = f64::EPSILON;

/// Spectral decomposition of a Hermitian matrix: ascending eigenvalues and the matching
/// orthonormal eigenvectors (one `Vec` per eigenvalue).
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<Complex64>>,
}

impl EigenResult {
    /// `max |λ_i|`, the spectral norm of the decomposed matrix.
    pub fn spectral_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| f64::max(m, v.abs()))
    }

    /// Rebuilds `V Λ V*`.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.values.len();
        CMatrix::from_fn(n, |i, j| {
            self.values
                .iter()
                .zip(&self.vectors)
                .fold(ZERO, |acc, (&l, v)| acc + v[i] * v[j].conj() * l)
        })
    }
}

fn checked_hermitian(m: &CMatrix) -> Result<CMatrix> {
    let residual = m.hermitian_residual();
    if !(residual <= HERMITIAN_TOL) {
        return Err(Error::NotHermitian { residual });
    }
    Ok(m.hermitian_part())
}

pub fn hermitian_eigen(m: &CMatrix) -> Result<EigenResult> {
    let h = checked_hermitian(m)?;
    let (values, z) = tridiagonal_eigen(h, true)?;
    let z = z.expect("vectors requested");
    let vectors = (0..values.len()).map(|j| z.column(j)).collect();
    Ok(EigenResult { values, vectors })
}

/// Ascending eigenvalues only.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    let h = checked_hermitian(m)?;
    Ok(tridiagonal_eigen(h, false)?.0)
}

pub fn min_eig(m: &CMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?[0])
}

pub fn max_eig(m: &CMatrix) -> Result<f64> {
    Ok(*hermitian_eigenvalues(m)?.last().expect("nonempty"))
}

/// Orthonormal basis of the numerical null space of a Hermitian PSD matrix.
///
/// Eigenvalues with `|λ| <= tol·‖M‖` are null. The next eigenvalue must clear
/// `10·tol·‖M‖`, otherwise the nullity is ill-determined and `GapTooSmall` is returned.
pub fn nullspace(m: &CMatrix, tol: f64) -> Result<Vec<Vec<Complex64>>> {
    let eig = hermitian_eigen(m)?;
    let scale = eig.spectral_norm();
    if scale == 0.0 {
        return Ok(eig.vectors);
    }
    let threshold = tol * scale;
    if eig.values[0] < -threshold {
        return Err(Error::NotPositiveSemidefinite {
            min_eigenvalue: eig.values[0],
        });
    }
    let null_count = eig.values.iter().take_while(|&&v| v <= threshold).count();
    if let Some(&next) = eig.values.get(null_count) {
        if next < 10.0 * threshold {
            return Err(Error::GapTooSmall { next, threshold });
        }
    }
    Ok(eig.vectors.into_iter().take(null_count).collect())
}

/// Householder reduction of a Hermitian matrix to real symmetric tridiagonal form followed by
/// implicit QL. Returns ascending eigenvalues and, optionally, the eigenvector matrix (columns).
fn tridiagonal_eigen(mut a: CMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<CMatrix>)> {
    let n = a.dim();
    let mut q = want_vectors.then(|| CMatrix::identity(n));
    let mut v = vec![ZERO; n];

    for k in 0..n.saturating_sub(2) {
        let alpha_norm = ((k + 1)..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if alpha_norm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() == 0.0 { ONE } else { x0 / x0.norm() };
        let alpha = -phase * alpha_norm;
        v.iter_mut().for_each(|x| *x = ZERO);
        for i in (k + 1)..n {
            v[i] = a[(i, k)];
        }
        v[k + 1] -= alpha;
        let vn = vector_norm(&v);
        if vn == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= vn);

        // A <- H A with H = I - 2 v v*
        for j in 0..n {
            let w = ((k + 1)..n).fold(ZERO, |acc, i| acc + v[i].conj() * a[(i, j)]);
            if w == ZERO {
                continue;
            }
            for i in (k + 1)..n {
                a[(i, j)] -= v[i] * w * 2.0;
            }
        }
        // A <- A H, Q <- Q H
        apply_householder_right(&mut a, &v, k + 1);
        if let Some(q) = q.as_mut() {
            apply_householder_right(q, &v, k + 1);
        }
    }

    let mut d: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut e = vec![0.0; n];
    // Rotate the complex subdiagonal to real nonnegative values with a diagonal unitary.
    let mut phases = vec![ONE; n];
    for i in 0..n.saturating_sub(1) {
        let sub = a[(i + 1, i)];
        let modulus = sub.norm();
        e[i] = modulus;
        phases[i + 1] = if modulus == 0.0 {
            phases[i]
        } else {
            phases[i] * (sub / modulus)
        };
    }
    if let Some(q) = q.as_mut() {
        for i in 0..n {
            for (j, p) in phases.iter().enumerate() {
                q[(i, j)] *= p;
            }
        }
    }

    tql2(&mut d, &mut e, q.as_mut())?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| d[x].total_cmp(&d[y]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = q.map(|q| CMatrix::from_fn(n, |i, j| q[(i, order[j])]));
    Ok((values, vectors))
}

fn apply_householder_right(m: &mut CMatrix, v: &[Complex64], start: usize) {
    let n = m.dim();
    for i in 0..n {
        let u = (start..n).fold(ZERO, |acc, j| acc + m[(i, j)] * v[j]);
        if u == ZERO {
            continue;
        }
        for j in start..n {
            m[(i, j)] -= u * v[j].conj() * 2.0;
        }
    }
}

/// Implicit QL on a real symmetric tridiagonal matrix (`d` diagonal, `e[i]` couples `i` and
/// `i+1`). Rotations are accumulated into the columns of `z` when given.
fn tql2(d: &mut [f64], e: &mut [f64], mut z: Option<&mut CMatrix>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > EPS * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(Error::NoConvergence(format!(
                        "tridiagonal QL stalled at index {l}"
                    )));
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if let Some(z) = z.as_deref_mut() {
                        for k in 0..n {
                            let zk1 = z[(k, i + 1)];
                            let zk = z[(k, i)];
                            z[(k, i + 1)] = zk * s + zk1 * c;
                            z[(k, i)] = zk * c - zk1 * s;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= EPS * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

/// Eigenvalues of a general complex matrix (unordered).
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    let n = m.dim();
    let mut h = hessenberg(m);
    let scale = m.frobenius_norm();
    let mut out = vec![ZERO; n];
    if n == 0 {
        return Ok(out);
    }
    let mut hi = n - 1;
    let mut iter = 0usize;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let mut s = h[(l, l)].norm() + h[(l - 1, l - 1)].norm();
            if s == 0.0 {
                s = scale;
            }
            if h[(l, l - 1)].norm() <= EPS * s {
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            out[hi] = h[(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > 60 * n {
            return Err(Error::NoConvergence("Hessenberg QR".into()));
        }
        let shift = if iter.is_multiple_of(11) {
            // exceptional shift
            h[(hi, hi)] + Complex64::new(h[(hi, hi - 1)].norm(), 0.0) * 0.75
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };
        qr_step(&mut h, l, hi, shift);
    }
    out[0] = h[(0, 0)];
    Ok(out)
}

pub fn spectral_radius(m: &CMatrix) -> Result<f64> {
    Ok(eigenvalues(m)?.iter().fold(0.0, |acc, z| f64::max(acc, z.norm())))
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let root = (half * half + b * c).sqrt();
    let mean = (a + d) * 0.5;
    let l1 = mean + root;
    let l2 = mean - root;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One shifted QR sweep on the active window `lo..=hi` of a Hessenberg matrix.
fn qr_step(h: &mut CMatrix, lo: usize, hi: usize, shift: Complex64) {
    for i in lo..=hi {
        h[(i, i)] -= shift;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let x = h[(k, k)];
        let y = h[(k + 1, k)];
        let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
        let (c, s) = if r == 0.0 { (ONE, ZERO) } else { (x / r, y / r) };
        for j in k..=hi {
            let top = h[(k, j)];
            let bot = h[(k + 1, j)];
            h[(k, j)] = c.conj() * top + s.conj() * bot;
            h[(k + 1, j)] = -s * top + c * bot;
        }
        rotations.push((c, s));
    }
    for (idx, &(c, s)) in rotations.iter().enumerate() {
        let k = lo + idx;
        for i in lo..=(k + 1).min(hi) {
            let left = h[(i, k)];
            let right = h[(i, k + 1)];
            h[(i, k)] = left * c + right * s;
            h[(i, k + 1)] = -left * s.conj() + right * c.conj();
        }
    }
    for i in lo..=hi {
        h[(i, i)] += shift;
    }
}

fn hessenberg(m: &CMatrix) -> CMatrix {
    let n = m.dim();
    let mut a = m.clone();
    let mut v = vec![ZERO; n];
    for k in 0..n.saturating_sub(2) {
        let alpha_norm = ((k + 1)..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if alpha_norm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() == 0.0 { ONE } else { x0 / x0.norm() };
        v.iter_mut().for_each(|x| *x = ZERO);
        for i in (k + 1)..n {
            v[i] = a[(i, k)];
        }
        v[k + 1] += phase * alpha_norm;
        let vn = vector_norm(&v);
        if vn == 0.0 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= vn);
        for j in 0..n {
            let w = ((k + 1)..n).fold(ZERO, |acc, i| acc + v[i].conj() * a[(i, j)]);
            for i in (k + 1)..n {
                a[(i, j)] -= v[i] * w * 2.0;
            }
        }
        apply_householder_right(&mut a, &v, k + 1);
        for i in (k + 2)..n {
            a[(i, k)] = ZERO;
        }
    }
    a
}

/// Residual `max_i ‖M v_i − λ_i v_i‖`.
pub fn eigen_residual(m: &CMatrix, eig: &EigenResult) -> f64 {
    eig.values
        .iter()
        .zip(&eig.vectors)
        .map(|(&l, v)| {
            let mv = m.matvec(v);
            let diff: Vec<Complex64> = mv.iter().zip(v).map(|(a, b)| a - b * l).collect();
            vector_norm(&diff)
        })
        .fold(0.0, f64::max)
}

/// `max_{i,j} |⟨v_i, v_j⟩ − δ_ij|`.
pub fn orthonormality_defect(vectors: &[Vec<Complex64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, vi) in vectors.iter().enumerate() {
        for (j, vj) in vectors.iter().enumerate() {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((inner(vi, vj) - target).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn identity_spectrum() {
        let vals = hermitian_eigenvalues(&CMatrix::identity(3)).unwrap();
        assert!(close(&vals, &[1.0, 1.0, 1.0], 1e-15));
    }

    #[test]
    fn classic_two_by_two() {
        let m = CMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
        assert!(close(&hermitian_eigenvalues(&m).unwrap(), &[1.0, 3.0], 1e-14));
        assert!((min_eig(&m).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rho_minus_plus_a() {
        let m = CMatrix::from_real_rows(&[&[2.0, 1.5], &[1.5, 2.0]]).unwrap();
        assert!(close(&hermitian_eigenvalues(&m).unwrap(), &[0.5, 3.5], 1e-14));
    }

    #[test]
    fn scalar_and_singular_minima() {
        let m = CMatrix::identity(4).scale_real(2.0);
        assert!((min_eig(&m).unwrap() - 2.0).abs() < 1e-15);
        let k = CMatrix::from_real_rows(&[&[2.0, 2.0], &[2.0, 2.0]]).unwrap();
        assert!(min_eig(&k).unwrap().abs() < 1e-14);
    }

    #[test]
    fn complex_hermitian_residuals() {
        let m = CMatrix::from_fn(6, |i, j| {
            let (i, j) = (i as f64, j as f64);
            if i == j {
                re(1.0 + i)
            } else if i < j {
                Complex64::new(0.3 * (i + j), 0.7 * (j - i).sin())
            } else {
                Complex64::new(0.3 * (i + j), -0.7 * (i - j).sin())
            }
        });
        let eig = hermitian_eigen(&m).unwrap();
        assert!(eigen_residual(&m, &eig) < 1e-12);
        assert!(orthonormality_defect(&eig.vectors) < 1e-12);
        assert!(eig.reconstruct().max_abs_diff(&m) < 1e-12);
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(hermitian_eigen(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn nullspace_examples() {
        let m = CMatrix::from_real_rows(&[&[1.0, -1.0], &[-1.0, 1.0]]).unwrap();
        let ns = nullspace(&m, 1e-8).unwrap();
        assert_eq!(ns.len(), 1);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((inner(&ns[0], &[re(s), re(s)]).norm() - 1.0).abs() < 1e-12);

        assert!(nullspace(&CMatrix::identity(3).scale_real(2.0), 1e-8)
            .unwrap()
            .is_empty());

        let k = CMatrix::from_real_rows(&[&[2.0, 2.0], &[2.0, 2.0]]).unwrap();
        let ns = nullspace(&k, 1e-8).unwrap();
        assert_eq!(ns.len(), 1);
        assert!((inner(&ns[0], &[re(s), re(-s)]).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nullspace_gap_too_small() {
        let m = CMatrix::diagonal(&[re(1.0), re(5e-8)]);
        assert!(matches!(nullspace(&m, 1e-8), Err(Error::GapTooSmall { .. })));
    }

    #[test]
    fn general_eigenvalues_triangular_and_rotation() {
        let t = CMatrix::from_fn(4, |i, j| {
            if i == j {
                Complex64::new(i as f64, 1.0)
            } else if j > i {
                re(0.5)
            } else {
                ZERO
            }
        });
        let mut ev = eigenvalues(&t).unwrap();
        ev.sort_by(|a, b| a.re.total_cmp(&b.re));
        for (k, z) in ev.iter().enumerate() {
            assert!((z - Complex64::new(k as f64, 1.0)).norm() < 1e-12);
        }
        let rot = CMatrix::from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]).unwrap();
        let mut ev = eigenvalues(&rot).unwrap();
        ev.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((ev[0] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        assert!((ev[1] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn general_eigenvalues_dense() {
        // companion-like matrix with known spectrum {1, 2, 3, 4} after similarity
        let d = CMatrix::diagonal(&[re(1.0), re(2.0), re(3.0), re(4.0)]);
        let p = CMatrix::from_fn(4, |i, j| Complex64::new(1.0 / (1.0 + i as f64 + j as f64), (i as f64 - j as f64) * 0.1));
        let pinv = crate::linalg::inverse(&p).unwrap();
        let m = &(&p * &d) * &pinv;
        let mut ev = eigenvalues(&m).unwrap();
        ev.sort_by(|a, b| a.re.total_cmp(&b.re));
        for (k, z) in ev.iter().enumerate() {
            assert!((z - re(k as f64 + 1.0)).norm() < 1e-8, "{z}");
        }
    }
}
