use num_complex::Complex64;
use proptest::prelude::*;

use rhokit::determinants;
use rhokit::harnack;
use rhokit::io::{fmt_sig, MatrixDocument};
use rhokit::kernel::{self, DiscGrid};
use rhokit::linalg::{self, CMatrix};
use rhokit::radius;
use rhokit::shifts::{make_shift, normalized_shift, rotation_diagonal};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Square complex matrix of dimension 2..=4 with entries in the unit box.
fn small_matrix() -> impl Strategy<Value = CMatrix> {
    (2usize..=4).prop_flat_map(|d| {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d * d).prop_map(move |v| {
            CMatrix::from_row_major(d, v.into_iter().map(|(re, im)| c(re, im)).collect()).unwrap()
        })
    })
}

/// `T` rescaled so its spectral radius is at most 0.9.
fn strict_spectrum(t: CMatrix) -> CMatrix {
    let r = linalg::spectral_radius(&t).unwrap();
    if r > 0.9 { t.scale_real(0.9 / r) } else { t }
}

fn disc_point() -> impl Strategy<Value = Complex64> {
    (0.0f64..0.95, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn toeplitz(m: usize, a: f64, rho: f64, last_one: bool) -> CMatrix {
    CMatrix::from_fn(m + 1, |i, j| {
        let v = if i != j {
            a.powi(i.abs_diff(j) as i32)
        } else if last_one && i == m {
            1.0
        } else {
            rho
        };
        c(v, 0.0)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kernel_is_hermitian(t in small_matrix(), z in disc_point(), rho in 1.0f64..6.0) {
        let t = strict_spectrum(t);
        let k = kernel::kernel_matrix(&t, z, rho).unwrap();
        prop_assert!(k.hermitian_residual() <= 1e-12 * k.max_abs().max(1.0));
    }

    #[test]
    fn kernel_rotation_identity(n in 1usize..6, theta in 0.0f64..std::f64::consts::TAU, rho in 1.1f64..8.0) {
        // K_z(S) = D_z K_1(S) D_z* on the torus, so the spectra agree
        let s = make_shift(n, 0.8);
        let z = Complex64::from_polar(1.0, theta);
        let a = kernel::kernel_spectrum(&s, z, rho).unwrap();
        let b = kernel::kernel_spectrum(&s, c(1.0, 0.0), rho).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-10 * rho);
        }
        let d = rotation_diagonal(n, z);
        let k1 = kernel::kernel_matrix(&s, c(1.0, 0.0), rho).unwrap();
        let kz = kernel::kernel_matrix(&s, z, rho).unwrap();
        let rotated = &(&d * &k1) * &d.adjoint();
        prop_assert!(rotated.max_abs_diff(&kz) <= 1e-12 * rho);
    }

    #[test]
    fn recurrences_match_lu(m in 0usize..8, a in 0.2f64..3.0, rho in 1.0f64..6.0) {
        let lu_t = linalg::determinant(&toeplitz(m, a, rho, true)).re;
        let lu_b = linalg::determinant(&toeplitz(m, a, rho, false)).re;
        let scale = (1.0 + a * a).powi(m as i32 + 1) * rho.powi(m as i32 + 1);
        prop_assert!((determinants::dtilde(m, a, rho) - lu_t).abs() <= 1e-11 * scale);
        prop_assert!((determinants::dbold(m, a, rho) - lu_b).abs() <= 1e-11 * scale);
    }

    #[test]
    fn discriminant_is_alpha_squared_minus_four_beta(a in 0.0f64..5.0, rho in 1.0f64..20.0) {
        let al = determinants::alpha(a, rho);
        let be = determinants::beta(a, rho);
        let d = determinants::discriminant(a, rho);
        prop_assert!((d - (al * al - 4.0 * be)).abs() <= 1e-11 * (al * al + 4.0 * be).max(1.0));
    }

    #[test]
    fn shift_radius_decreases_in_rho(n in 1usize..10, r1 in 1.0f64..15.0, dr in 0.05f64..5.0) {
        let w1 = radius::shift_radius(n, r1, radius::DEFAULT_SHIFT_TOL).unwrap().value;
        let w2 = radius::shift_radius(n, r1 + dr, radius::DEFAULT_SHIFT_TOL).unwrap().value;
        prop_assert!(w2 < w1 + 1e-12, "w({r1}) = {w1}, w({}) = {w2}", r1 + dr);
        // sandwich r(S) = 0 <= ‖S‖/ρ <= w_ρ <= ‖S‖ = 1
        prop_assert!(w1 <= 1.0 + 1e-12 && w1 >= 1.0 / r1 - 1e-12);
    }

    #[test]
    fn normalized_shift_sits_on_the_boundary(n in 1usize..8, rho in 1.05f64..12.0) {
        let s = normalized_shift(n, rho).unwrap();
        let min = kernel::kernel_spectrum(&s, c(1.0, 0.0), rho).unwrap()[0];
        prop_assert!(min.abs() <= 1e-8 * rho, "min eigenvalue {min}");
        let interior = kernel::kernel_spectrum(&s, c(0.5, 0.0), rho).unwrap()[0];
        prop_assert!(interior > 0.0);
    }

    #[test]
    fn matrix_document_round_trip(t in small_matrix(), scale in -300i32..300) {
        let t = t.scale_real(10f64.powi(scale));
        let doc = MatrixDocument::from_matrix(&t, Some("m".into()));
        let back = MatrixDocument::from_json(&doc.to_json()).unwrap();
        prop_assert_eq!(&back, &doc);
        let m = back.to_matrix().unwrap();
        for (x, y) in m.as_slice().iter().zip(t.as_slice()) {
            prop_assert_eq!(x.re.to_bits(), y.re.to_bits());
            prop_assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
    }

    #[test]
    fn fmt_sig_keeps_eight_digits(x in prop::num::f64::NORMAL) {
        let back: f64 = fmt_sig(x).parse().unwrap();
        prop_assert!((back - x).abs() <= 5e-8 * x.abs());
    }

    #[test]
    fn eigen_reconstructs(t in small_matrix()) {
        let h = t.hermitian_part();
        let e = linalg::hermitian_eigen(&h).unwrap();
        prop_assert!(e.reconstruct().max_abs_diff(&h) <= 1e-12 * h.max_abs().max(1.0));
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn radius_bounds_and_homogeneity(t in small_matrix(), s in 0.2f64..3.0, rho in 1.0f64..4.0) {
        let t = strict_spectrum(t);
        let grid = DiscGrid::default();
        let w = radius::radius_bisect(&t, rho, &grid, 1e-9).unwrap().value;
        let norm = linalg::operator_norm(&t);
        let r = linalg::spectral_radius(&t).unwrap();
        let slack = 1e-7 * norm.max(1e-12);
        prop_assert!(w >= r.max(norm / rho) - slack && w <= norm + slack);
        let ws = radius::radius_bisect(&t.scale_real(s), rho, &grid, 1e-9).unwrap().value;
        prop_assert!((ws - s * w).abs() <= 1e-6 * s * norm.max(1e-12));
    }

    #[test]
    fn radius_is_unitarily_invariant(t in small_matrix(), phases in prop::collection::vec(0.0f64..6.3, 4)) {
        let t = strict_spectrum(t);
        let d = t.dim();
        let u = CMatrix::diagonal(&phases[..d].iter().map(|&p| Complex64::from_polar(1.0, p)).collect::<Vec<_>>());
        let tu = &(&u.adjoint() * &t) * &u;
        let grid = DiscGrid::default();
        let a = radius::radius_bisect(&t, 2.0, &grid, 1e-9).unwrap().value;
        let b = radius::radius_bisect(&tu, 2.0, &grid, 1e-9).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-7 * a.max(1e-12));
    }

    #[test]
    fn harnack_verdict_is_symmetric(n in 1usize..5, theta in 0.0f64..6.3, p in 0usize..5) {
        let s = normalized_shift(n, 2.0).unwrap();
        let mut d = vec![c(1.0, 0.0); n + 1];
        d[p % (n + 1)] = Complex64::from_polar(1.0, theta);
        let d = CMatrix::diagonal(&d);
        let t = &(&d.adjoint() * &s) * &d;
        let fwd = harnack::nullspace_equality(&t, &s, 2.0, 64, harnack::ANGLE_TOL).unwrap();
        let bwd = harnack::nullspace_equality(&s, &t, 2.0, 64, harnack::ANGLE_TOL).unwrap();
        prop_assert_eq!(fwd.equal, bwd.equal);
    }
}
