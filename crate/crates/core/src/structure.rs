//! Structure of the boundary null vectors of the normalized shift and what it forces on
//! operators Harnack equivalent to it: support, reversal antisymmetry, necessary shape
//! conditions, unitary orbits, irreducibility and the canonical form in `C₂`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harnack::{self, ANGLE_TOL, TORUS_ANGLES};
use crate::kernel::{self, DiscGrid};
use crate::linalg::{self, CMatrix, NULLSPACE_TOL};
use crate::radius::{self, DEFAULT_BISECT_TOL};
use crate::shifts::{make_shift, normalized_shift, rotation_diagonal};

/// Largest `n` for which the null direction of `K_1^ρ(S)` is resolved reliably.
pub const MAX_PROFILE_N: usize = 24;

/// Null vector of `K_1^ρ(S)` for the normalized shift `S` of size `n+1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullProfile {
    pub n: usize,
    pub rho: f64,
    /// Unit vector with `v₀ > 0`.
    pub v: Vec<Complex64>,
    /// `max_k |v_k + v_{n−k}|`
    pub antisymmetry_residual: f64,
    /// `|v_k| ≤ 10·tol`
    pub zero_pattern: Vec<bool>,
    pub tol: f64,
}

impl NullProfile {
    /// Vanishing coordinates are exactly the middle one in odd dimension and none in even
    /// dimension.
    pub fn parity_pattern_holds(&self) -> bool {
        let n = self.n;
        self.zero_pattern
            .iter()
            .enumerate()
            .all(|(k, &zero)| zero == (n.is_multiple_of(2) && k == n / 2))
    }

    pub fn support(&self) -> Vec<usize> {
        (0..=self.n).filter(|&k| !self.zero_pattern[k]).collect()
    }

    /// Smallest modulus among coordinates declared nonzero.
    pub fn min_support_modulus(&self) -> f64 {
        self.support()
            .iter()
            .map(|&k| self.v[k].norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// `diag(1, z, …, zⁿ)·v`
    pub fn rotated(&self, z: Complex64) -> Vec<Complex64> {
        rotation_diagonal(self.n, z).matvec(&self.v)
    }
}

pub fn null_profile(n: usize, rho: f64, tol: f64) -> Result<NullProfile> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be >= 1".into()));
    }
    if !(rho > 1.0) {
        return Err(Error::InvalidInput(format!("null profiles need rho > 1, got {rho}")));
    }
    if n > MAX_PROFILE_N {
        // refuse instead of reporting a null direction below double-precision resolution
        return Err(Error::GapTooSmall {
            next: f64::NAN,
            threshold: NULLSPACE_TOL,
        });
    }
    let s = normalized_shift(n, rho)?;
    let basis = kernel::torus_nullspace(&s, rho, Complex64::new(1.0, 0.0), NULLSPACE_TOL)?;
    if basis.len() != 1 {
        return Err(Error::ResidualCheck(format!(
            "expected a one-dimensional boundary null space, found dimension {} (n={n}, rho={rho})",
            basis.len()
        )));
    }
    let raw = &basis[0];
    let v0 = raw[0];
    if v0.norm() <= 10.0 * tol {
        return Err(Error::ResidualCheck(format!("leading null coordinate vanishes (n={n}, rho={rho})")));
    }
    let phase = v0.conj() / v0.norm();
    let v: Vec<Complex64> = raw.iter().map(|x| x * phase).collect();
    let antisymmetry_residual = (0..=n).map(|k| (v[k] + v[n - k]).norm()).fold(0.0, f64::max);
    let norm = linalg::vector_norm(&v);
    let zero_pattern = v.iter().map(|x| x.norm() <= 10.0 * tol * norm).collect();
    Ok(NullProfile {
        n,
        rho,
        v,
        antisymmetry_residual,
        zero_pattern,
        tol,
    })
}

/// Worst principal-angle residual between `𝒩(K_z^ρ(S))` and `diag(1, z, …, zⁿ)·v` over the
/// given unimodular points.
pub fn rotation_family_check(n: usize, rho: f64, z_samples: &[Complex64]) -> Result<f64> {
    let profile = null_profile(n, rho, ANGLE_TOL)?;
    let s = normalized_shift(n, rho)?;
    let residuals: Vec<f64> = z_samples
        .par_iter()
        .map(|&z| {
            let basis = kernel::torus_nullspace(&s, rho, z, NULLSPACE_TOL)?;
            let expected = linalg::normalize(&profile.rotated(z))
                .ok_or_else(|| Error::ResidualCheck("zero null profile".into()))?;
            Ok(linalg::subspace_distance(&basis, &[expected]))
        })
        .collect::<Result<_>>()?;
    Ok(residuals.into_iter().fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReversalReport {
    /// `ε` in `v_k = ε v_{n−k}`.
    pub epsilon: i32,
    /// `‖v − ε𝒲v‖`
    pub residual: f64,
}

/// Sign `ε` of the reversal `𝒲e_k = e_{n−k}` on the null vector; `ε = +1` is an error.
pub fn reversal_symmetry_check(n: usize, rho: f64) -> Result<ReversalReport> {
    let profile = null_profile(n, rho, ANGLE_TOL)?;
    let reversed: Vec<Complex64> = profile.v.iter().rev().copied().collect();
    let overlap = linalg::inner(&reversed, &profile.v).re;
    let epsilon = if overlap > 0.0 { 1 } else { -1 };
    if epsilon == 1 {
        return Err(Error::ReversalSymmetric);
    }
    let residual = profile
        .v
        .iter()
        .zip(&reversed)
        .map(|(a, b)| (a + b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok(ReversalReport { epsilon, residual })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    /// `‖Te₀‖`
    pub first_column_norm: f64,
    /// `‖T*eₙ‖`
    pub last_row_norm: f64,
    /// `|⟨Teₙ, e₀⟩|`
    pub corner: f64,
    pub first_column_zero: bool,
    pub last_row_zero: bool,
    pub corner_zero: bool,
    /// The corner condition only constrains `T` from dimension 3 on; in dimension 2 the
    /// corner is the superdiagonal entry itself.
    pub corner_applies: bool,
}

impl MembershipReport {
    pub fn all(&self) -> bool {
        self.first_column_zero && self.last_row_zero && (self.corner_zero || !self.corner_applies)
    }
}

/// Shape conditions every member of the Harnack part of the normalized shift satisfies:
/// `Te₀ = 0`, `T*eₙ = 0` and `⟨Teₙ, e₀⟩ = 0`.
pub fn membership_necessary_conditions(t: &CMatrix, tol: f64) -> MembershipReport {
    let d = t.dim();
    let first_column_norm = linalg::vector_norm(&t.column(0));
    let last_row_norm = linalg::vector_norm(t.row(d - 1));
    let corner = t[(0, d - 1)].norm();
    MembershipReport {
        first_column_norm,
        last_row_norm,
        corner,
        first_column_zero: first_column_norm <= tol,
        last_row_zero: last_row_norm <= tol,
        corner_zero: corner <= tol,
        corner_applies: d >= 3,
    }
}

fn unitary_residual(u: &CMatrix) -> f64 {
    (&(&u.adjoint() * u) - &CMatrix::identity(u.dim())).max_abs()
}

/// Whether `U*SU` lies in the Harnack part of the normalized shift: `Ue_k = αe_k` for one
/// unimodular `α` and every `k` in the support of the null vector.
pub fn unitary_orbit_predicate(u: &CMatrix, n: usize, rho: f64, tol: f64) -> Result<bool> {
    if u.dim() != n + 1 {
        return Err(Error::DimensionMismatch {
            expected: n + 1,
            actual: u.dim(),
        });
    }
    let residual = unitary_residual(u);
    if residual > 1e-10 {
        return Err(Error::NotUnitary { residual });
    }
    let profile = null_profile(n, rho, ANGLE_TOL)?;
    let support = profile.support();
    let alpha = u[(support[0], support[0])];
    Ok(support.iter().all(|&k| {
        let mut col = u.column(k);
        col[k] -= alpha;
        linalg::vector_norm(&col) <= tol
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IrreducibilityReport {
    pub irreducible: bool,
    /// Real dimension of the Hermitian matrices commuting with `T` and `T*`.
    pub commutant_dimension: usize,
}

/// Irreducibility through the real dimension of `{X = X* : TX = XT, T*X = XT*}`; a reducing
/// projection exists exactly when that space is bigger than the multiples of `I`.
pub fn irreducibility_check(t: &CMatrix, tol: f64) -> Result<IrreducibilityReport> {
    let d = t.dim();
    let ta = t.adjoint();
    // real basis of the Hermitian matrices
    let mut basis = Vec::with_capacity(d * d);
    for i in 0..d {
        basis.push(CMatrix::from_fn(d, |r, c| {
            if r == i && c == i { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }
        }));
        for j in (i + 1)..d {
            basis.push(CMatrix::from_fn(d, |r, c| match (r, c) {
                (r, c) if (r, c) == (i, j) || (r, c) == (j, i) => Complex64::new(1.0, 0.0),
                _ => Complex64::new(0.0, 0.0),
            }));
            basis.push(CMatrix::from_fn(d, |r, c| match (r, c) {
                (r, c) if (r, c) == (i, j) => Complex64::new(0.0, 1.0),
                (r, c) if (r, c) == (j, i) => Complex64::new(0.0, -1.0),
                _ => Complex64::new(0.0, 0.0),
            }));
        }
    }
    let rows = 4 * d * d;
    let mut col_major = Vec::with_capacity(rows * basis.len());
    for x in &basis {
        let c1 = &(t * x) - &(x * t);
        let c2 = &(&ta * x) - &(x * &ta);
        for m in [&c1, &c2] {
            for z in m.as_slice() {
                col_major.push(Complex64::new(z.re, 0.0));
                col_major.push(Complex64::new(z.im, 0.0));
            }
        }
    }
    let sv = linalg::singular_values_rect(rows, basis.len(), &col_major)?;
    let scale = sv.first().copied().unwrap_or(0.0).max(t.max_abs()).max(f64::MIN_POSITIVE);
    let commutant_dimension = sv.iter().filter(|&&s| s <= tol * scale).count();
    Ok(IrreducibilityReport {
        irreducible: commutant_dimension == 1,
        commutant_dimension,
    })
}

/// The `w₂`-normalized shift with the two middle superdiagonal entries twisted by `e^{±iθ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalC2Form {
    pub n: usize,
    pub theta: f64,
    /// `1/cos(π/(n+2))`
    pub a: f64,
    /// In even dimension the twist is not allowed and the form is `S` itself.
    pub theta_ignored: bool,
}

impl CanonicalC2Form {
    pub fn new(n: usize, theta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("n must be >= 1".into()));
        }
        Ok(Self {
            n,
            theta,
            a: 1.0 / (PI / (n as f64 + 2.0)).cos(),
            theta_ignored: n % 2 == 1,
        })
    }

    pub fn matrix(&self) -> CMatrix {
        let mut t = make_shift(self.n, self.a);
        if !self.theta_ignored {
            let p = self.n / 2;
            t[(p - 1, p)] = Complex64::from_polar(self.a, self.theta);
            t[(p, p + 1)] = Complex64::from_polar(self.a, -self.theta);
        }
        t
    }

    /// `D = diag(1, …, e^{iθ}, …, 1)` with the phase at the middle coordinate, so that
    /// `D*SD` is the canonical form.
    pub fn conjugating_unitary(&self) -> CMatrix {
        let mut d = vec![Complex64::new(1.0, 0.0); self.n + 1];
        if !self.theta_ignored {
            d[self.n / 2] = Complex64::from_polar(1.0, self.theta);
        }
        CMatrix::diagonal(&d)
    }
}

#[allow(non_snake_case)]
pub fn canonical_form_C2(n: usize, theta: f64) -> Result<CMatrix> {
    Ok(CanonicalC2Form::new(n, theta)?.matrix())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct C2PartRow {
    pub theta: f64,
    pub norm: f64,
    pub w2: f64,
    pub necessary: MembershipReport,
    pub nullspace_equal: bool,
    pub expected_equivalent: bool,
    /// All checks agree with the expectation for this θ.
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct C2PartReport {
    pub n: usize,
    pub a: f64,
    pub rows: Vec<C2PartRow>,
}

impl C2PartReport {
    pub fn all_consistent(&self) -> bool {
        self.rows.iter().all(|r| r.consistent)
    }
}

/// The `C₂` Harnack part of the normalized shift along a θ sweep. In odd dimension the
/// canonical form is checked for every θ; in even dimension the middle-coordinate twist
/// `D_θ* S D_θ` is checked and only `θ ≡ 0` may be equivalent.
pub fn c2_part_verification(n: usize, theta_samples: &[f64]) -> Result<C2PartReport> {
    let s = normalized_shift(n, 2.0)?;
    let a = 1.0 / (PI / (n as f64 + 2.0)).cos();
    let grid = DiscGrid::default();
    let odd_dimension = n.is_multiple_of(2);
    let rows = theta_samples
        .iter()
        .map(|&theta| {
            let t = if odd_dimension {
                canonical_form_C2(n, theta)?
            } else {
                let mut d = vec![Complex64::new(1.0, 0.0); n + 1];
                d[n.div_ceil(2)] = Complex64::from_polar(1.0, theta);
                let d = CMatrix::diagonal(&d);
                &(&d.adjoint() * &s) * &d
            };
            let norm = linalg::operator_norm(&t);
            let w2 = radius::radius_bisect(&t, 2.0, &grid, DEFAULT_BISECT_TOL)?.value;
            let necessary = membership_necessary_conditions(&t, 1e-9);
            let nullspace_equal = harnack::nullspace_equality(&t, &s, 2.0, TORUS_ANGLES, ANGLE_TOL)?.equal;
            let twist = Complex64::from_polar(1.0, theta);
            let expected_equivalent = odd_dimension || (twist - 1.0).norm() <= 1e-12;
            let consistent = (norm - a).abs() <= 1e-9 * a
                && (w2 - 1.0).abs() <= 1e-5
                && necessary.all()
                && nullspace_equal == expected_equivalent;
            Ok(C2PartRow {
                theta,
                norm,
                w2,
                necessary,
                nullspace_equal,
                expected_equivalent,
                consistent,
            })
        })
        .collect::<Result<_>>()?;
    Ok(C2PartReport { n, a, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(v: &[Complex64]) -> Vec<f64> {
        v.iter().map(|z| z.re).collect()
    }

    #[test]
    fn small_profiles() {
        let h = 0.5f64.sqrt();
        for &rho in &[1.5, 2.0, 3.0, 5.0] {
            let p = null_profile(1, rho, 1e-7).unwrap();
            let v = re(&p.v);
            assert!((v[0] - h).abs() < 1e-9 && (v[1] + h).abs() < 1e-9, "rho={rho}: {v:?}");
            let p = null_profile(2, rho, 1e-7).unwrap();
            let v = re(&p.v);
            assert!((v[0] - h).abs() < 1e-8 && v[1].abs() < 1e-8 && (v[2] + h).abs() < 1e-8);
            assert_eq!(p.zero_pattern, vec![false, true, false]);
            assert!(p.parity_pattern_holds());
        }
    }

    #[test]
    fn four_dimensional_profile_at_rho_two() {
        let p = null_profile(3, 2.0, 1e-7).unwrap();
        assert!(p.antisymmetry_residual < 1e-9);
        assert!(p.parity_pattern_holds());
        assert!(p.min_support_modulus() > 0.1);
        // oracle: K_1^2(S_4(a)) v = 0 with the first row giving 2v0 + a v1 + a² v2 + a³ v3 = 0
        let a = 1.0 / (PI / 5.0).cos();
        let v = re(&p.v);
        let row0 = 2.0 * v[0] + a * v[1] + a * a * v[2] + a.powi(3) * v[3];
        assert!(row0.abs() < 1e-9);
    }

    #[test]
    fn too_large_n_is_refused() {
        assert!(matches!(null_profile(25, 2.0, 1e-7), Err(Error::GapTooSmall { .. })));
    }

    #[test]
    fn rotation_family() {
        let zs: Vec<Complex64> = kernel::torus_points(16);
        for n in 1..6 {
            assert!(rotation_family_check(n, 2.0, &zs).unwrap() < 1e-7);
        }
        assert!(rotation_family_check(2, 2.0, &[Complex64::new(1.0, 0.0)]).unwrap() < 1e-12);
    }

    #[test]
    fn reversal_sign() {
        for n in 1..8 {
            let r = reversal_symmetry_check(n, 2.0).unwrap();
            assert_eq!(r.epsilon, -1);
            assert!(r.residual < 1e-8);
        }
    }

    #[test]
    fn membership_examples() {
        let s = normalized_shift(3, 2.0).unwrap();
        assert!(membership_necessary_conditions(&s, 1e-9).all());
        assert!(membership_necessary_conditions(&canonical_form_C2(4, 1.1).unwrap(), 1e-9).all());
        let mut t = s.clone();
        t[(1, 0)] = Complex64::new(0.3, 0.0);
        let r = membership_necessary_conditions(&t, 1e-9);
        assert!(!r.first_column_zero && r.last_row_zero && r.corner_zero);
    }

    #[test]
    fn orbit_examples() {
        let phase = CMatrix::identity(3).scale(Complex64::from_polar(1.0, 0.4));
        assert!(unitary_orbit_predicate(&phase, 2, 2.0, 1e-9).unwrap());
        let mid = CMatrix::diagonal(&[
            Complex64::new(1.0, 0.0),
            Complex64::from_polar(1.0, 2.0),
            Complex64::new(1.0, 0.0),
        ]);
        assert!(unitary_orbit_predicate(&mid, 2, 2.0, 1e-9).unwrap());
        let edge = CMatrix::diagonal(&[Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, 2.0)]);
        assert!(!unitary_orbit_predicate(&edge, 1, 2.0, 1e-9).unwrap());
        let not_unitary = CMatrix::identity(2).scale_real(1.1);
        assert!(matches!(
            unitary_orbit_predicate(&not_unitary, 1, 2.0, 1e-9),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn irreducibility_examples() {
        let s = normalized_shift(3, 2.0).unwrap();
        let r = irreducibility_check(&s, 1e-9).unwrap();
        assert!(r.irreducible && r.commutant_dimension == 1);
        let r = irreducibility_check(&CMatrix::zeros(2), 1e-9).unwrap();
        assert!(!r.irreducible);
        assert_eq!(r.commutant_dimension, 4);
        assert!(irreducibility_check(&canonical_form_C2(3, 0.8).unwrap(), 1e-9).unwrap().irreducible);
        assert!(irreducibility_check(&canonical_form_C2(2, 0.8).unwrap(), 1e-9).unwrap().irreducible);
        // a direct sum of two shifts is reducible
        let mut t = CMatrix::zeros(4);
        t[(0, 1)] = Complex64::new(1.0, 0.0);
        t[(2, 3)] = Complex64::new(1.0, 0.0);
        assert!(!irreducibility_check(&t, 1e-9).unwrap().irreducible);
    }

    #[test]
    fn canonical_form_shape() {
        let t = canonical_form_C2(2, 0.3).unwrap();
        let r2 = 2f64.sqrt();
        assert!((t[(0, 1)] - Complex64::from_polar(r2, 0.3)).norm() < 1e-15);
        assert!((t[(1, 2)] - Complex64::from_polar(r2, -0.3)).norm() < 1e-15);
        assert!(canonical_form_C2(2, 0.0).unwrap().max_abs_diff(&normalized_shift(2, 2.0).unwrap()) < 1e-12);
        assert!(canonical_form_C2(3, 1.7).unwrap().max_abs_diff(&normalized_shift(3, 2.0).unwrap()) < 1e-12);
        for n in [2, 4, 6] {
            let form = CanonicalC2Form::new(n, 0.9).unwrap();
            let d = form.conjugating_unitary();
            let s = make_shift(n, form.a);
            assert!((&(&d.adjoint() * &s) * &d).max_abs_diff(&form.matrix()) < 1e-15);
        }
    }

    #[test]
    fn c2_part_small() {
        let rep = c2_part_verification(2, &[0.0, PI / 3.0, PI]).unwrap();
        assert!(rep.all_consistent(), "{rep:?}");
        assert!(rep.rows.iter().all(|r| r.nullspace_equal));
        let rep = c2_part_verification(1, &[0.0, 0.5]).unwrap();
        assert!(rep.all_consistent(), "{rep:?}");
        assert!(rep.rows[0].nullspace_equal && !rep.rows[1].nullspace_equal);
    }
}
