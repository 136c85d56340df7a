//! The support criterion for `U*SU` against the direct nullspace comparison, on random
//! unitaries of three kinds.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rhokit::harnack::{nullspace_equality, ANGLE_TOL};
use rhokit::linalg::{self, CMatrix};
use rhokit::shifts::normalized_shift;
use rhokit::structure::{null_profile, unitary_orbit_predicate};

const PER_KIND: usize = 50;
const RHO: f64 = 2.0;

fn phase(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
}

/// Random phases, but a shared one on the support half of the time so members show up.
fn diagonal(rng: &mut ChaCha8Rng, n: usize, support: &[usize]) -> CMatrix {
    let shared = phase(rng);
    let tie = rng.random_bool(0.5);
    let d: Vec<Complex64> = (0..=n)
        .map(|k| if tie && support.contains(&k) { shared } else { phase(rng) })
        .collect();
    CMatrix::diagonal(&d)
}

fn permutation(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let mut p: Vec<usize> = (0..=n).collect();
    for i in (1..p.len()).rev() {
        p.swap(i, rng.random_range(0..=i));
    }
    let g = phase(rng);
    CMatrix::from_fn(n + 1, |i, j| if p[j] == i { g } else { Complex64::new(0.0, 0.0) })
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.random_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Gram-Schmidt on a complex Gaussian matrix.
fn haar(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let d = n + 1;
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v: Vec<Complex64> = (0..d).map(|_| Complex64::new(gaussian(rng), gaussian(rng))).collect();
        for q in &cols {
            let p = linalg::inner(q, &v);
            for (x, y) in v.iter_mut().zip(q) {
                *x -= p * y;
            }
        }
        if let Some(v) = linalg::normalize(&v) {
            cols.push(v);
        }
    }
    CMatrix::from_fn(d, |i, j| cols[j][i])
}

#[test]
fn support_criterion_matches_nullspace_equality() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut members = 0;
    for n in 1..=4 {
        let s = normalized_shift(n, RHO).unwrap();
        let support = null_profile(n, RHO, ANGLE_TOL).unwrap().support();
        for kind in ["diagonal", "permutation", "haar"] {
            for trial in 0..PER_KIND {
                let u = match kind {
                    "diagonal" => diagonal(&mut rng, n, &support),
                    "permutation" => permutation(&mut rng, n),
                    _ => haar(&mut rng, n),
                };
                let t = &(&u.adjoint() * &s) * &u;
                let predicted = unitary_orbit_predicate(&u, n, RHO, 1e-9).unwrap();
                let observed = nullspace_equality(&t, &s, RHO, 64, ANGLE_TOL).unwrap().equal;
                assert_eq!(predicted, observed, "dim {} {kind} trial {trial}", n + 1);
                members += predicted as usize;
            }
        }
    }
    assert!(members >= 50, "only {members} members sampled");
}
