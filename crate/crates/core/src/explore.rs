//! Numeric sweeps around two open questions about the Harnack part of the normalized shift.
//! Nothing here is asserted; the report only records what the sweeps saw.
//!
//! * Norm question: are there `T` Harnack equivalent to `S` in `C₂` with `‖T‖ ≠ ‖S‖`?
//!   Probed by rescaling one superdiagonal weight of `S` and testing nullspace equality.
//! * General ρ question: does the middle-coordinate twist of odd dimension stay in the Harnack
//!   part of the `w_ρ`-normalized shift for ρ ≠ 2, and does an off-support twist leave it?

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harnack::{self, ANGLE_TOL, TORUS_ANGLES};
use crate::kernel::DiscGrid;
use crate::linalg::{self, CMatrix};
use crate::radius::{self, DEFAULT_BISECT_TOL};
use crate::shifts::normalized_shift;
use crate::structure::{self, null_profile};

pub const NOTICE: &str = "non-normative: exploratory sweeps, no claim is asserted";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExploreConfig {
    pub n_values: Vec<usize>,
    /// Relative perturbations `ε` of one superdiagonal weight, `a → a(1+ε)`.
    pub weight_perturbations: Vec<f64>,
    pub rhos: Vec<f64>,
    pub thetas: Vec<f64>,
}

impl Default for ExploreConfig {
    fn default() -> Self {
        Self {
            n_values: vec![2, 3, 4],
            weight_perturbations: vec![-0.05, -0.01, 0.0, 0.01, 0.05],
            rhos: vec![1.5, 3.0, 5.0],
            thetas: vec![0.7, 2.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormRow {
    pub n: usize,
    /// Index `k` of the perturbed entry `(k, k+1)`.
    pub entry: usize,
    pub epsilon: f64,
    pub norm_ratio: f64,
    /// `w₂(T)`
    pub w2: f64,
    /// `None` when `T` is not a 2-contraction, so its kernel has no null space to compare.
    pub nullspace_equal: Option<bool>,
    pub nullspace_distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwistRow {
    pub n: usize,
    pub rho: f64,
    pub theta: f64,
    pub coordinate: usize,
    /// Whether the coordinate lies in the support of the null vector.
    pub on_support: bool,
    pub orbit_predicate: bool,
    pub nullspace_equal: bool,
    pub nullspace_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExploreReport {
    pub notice: String,
    pub norm_sweep: Vec<NormRow>,
    pub twist_sweep: Vec<TwistRow>,
}

fn twist(n: usize, p: usize, theta: f64) -> CMatrix {
    let mut d = vec![Complex64::new(1.0, 0.0); n + 1];
    d[p] = Complex64::from_polar(1.0, theta);
    CMatrix::diagonal(&d)
}

fn norm_row(n: usize, entry: usize, epsilon: f64, grid: &DiscGrid) -> Result<NormRow> {
    let s = normalized_shift(n, 2.0)?;
    let mut t = s.clone();
    t[(entry, entry + 1)] *= 1.0 + epsilon;
    let rep = match harnack::nullspace_equality(&t, &s, 2.0, TORUS_ANGLES, ANGLE_TOL) {
        Ok(rep) => Some(rep),
        Err(Error::NotPositiveSemidefinite { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(NormRow {
        n,
        entry,
        epsilon,
        norm_ratio: linalg::operator_norm(&t) / linalg::operator_norm(&s),
        w2: radius::radius_bisect(&t, 2.0, grid, DEFAULT_BISECT_TOL)?.value,
        nullspace_equal: rep.as_ref().map(|r| r.equal),
        nullspace_distance: rep.as_ref().map(|r| r.worst_distance),
    })
}

fn twist_row(n: usize, rho: f64, theta: f64, p: usize) -> Result<TwistRow> {
    let s = normalized_shift(n, rho)?;
    let u = twist(n, p, theta);
    let t = &(&u.adjoint() * &s) * &u;
    let rep = harnack::nullspace_equality(&t, &s, rho, TORUS_ANGLES, ANGLE_TOL)?;
    Ok(TwistRow {
        n,
        rho,
        theta,
        coordinate: p,
        on_support: null_profile(n, rho, ANGLE_TOL)?.support().contains(&p),
        orbit_predicate: structure::unitary_orbit_predicate(&u, n, rho, 1e-9)?,
        nullspace_equal: rep.equal,
        nullspace_distance: rep.worst_distance,
    })
}

pub fn run(config: &ExploreConfig) -> Result<ExploreReport> {
    let grid = DiscGrid::default();
    let mut norm_cells = Vec::new();
    for &n in &config.n_values {
        for entry in 0..n {
            for &eps in &config.weight_perturbations {
                norm_cells.push((n, entry, eps));
            }
        }
    }
    let norm_sweep = norm_cells
        .par_iter()
        .map(|&(n, entry, eps)| norm_row(n, entry, eps, &grid))
        .collect::<Result<Vec<_>>>()?;

    let mut twist_cells = Vec::new();
    for &n in &config.n_values {
        for &rho in &config.rhos {
            for &theta in &config.thetas {
                // the middle coordinate and its neighbour
                for p in [n / 2, n / 2 + 1] {
                    if n % 2 == 0 || p == n / 2 {
                        twist_cells.push((n, rho, theta, p));
                    }
                }
            }
        }
    }
    let twist_sweep = twist_cells
        .par_iter()
        .map(|&(n, rho, theta, p)| twist_row(n, rho, theta, p))
        .collect::<Result<Vec<_>>>()?;

    Ok(ExploreReport {
        notice: NOTICE.into(),
        norm_sweep,
        twist_sweep,
    })
}
