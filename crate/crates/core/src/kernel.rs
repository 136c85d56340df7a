//! The operatorial ρ-kernel `K_z^ρ(T) = (I − z̄T)⁻¹ + (I − zT*)⁻¹ + (ρ − 2)I`, its positivity
//! over the closed disc and the resulting class membership test.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

/// Sampling of the closed unit disc: circles of the given radii (all `< 1`) with
/// `angles_per_radius` points each, plus `torus_angles` points on the unit circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscGrid {
    radii: Vec<f64>,
    angles_per_radius: usize,
    torus_angles: usize,
}

impl Default for DiscGrid {
    fn default() -> Self {
        let mut radii: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
        radii.extend([0.99, 0.999]);
        Self {
            radii,
            angles_per_radius: 64,
            torus_angles: 256,
        }
    }
}

impl DiscGrid {
    pub fn new(radii: Vec<f64>, angles_per_radius: usize, torus_angles: usize) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::InvalidInput("grid needs at least one radius".into()));
        }
        if radii.iter().any(|r| !(0.0..1.0).contains(r)) {
            return Err(Error::InvalidInput("grid radii must lie in [0, 1)".into()));
        }
        if radii.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("grid radii must be strictly increasing".into()));
        }
        if angles_per_radius == 0 || torus_angles == 0 {
            return Err(Error::InvalidInput("angle counts must be positive".into()));
        }
        Ok(Self {
            radii,
            angles_per_radius,
            torus_angles,
        })
    }

    /// Same angular resolution, radii `{0.1, …, 0.9}` followed by `extra` (e.g. `[0.99]`).
    pub fn with_outer_radii(extra: &[f64], angles_per_radius: usize, torus_angles: usize) -> Result<Self> {
        let mut radii: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
        radii.extend(extra.iter().copied().filter(|&r| r > 0.9));
        Self::new(radii, angles_per_radius, torus_angles)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn angles_per_radius(&self) -> usize {
        self.angles_per_radius
    }

    pub fn torus_angles(&self) -> usize {
        self.torus_angles
    }

    pub fn max_radius(&self) -> f64 {
        *self.radii.last().expect("nonempty radii")
    }

    /// Interior sample points, radius-major.
    pub fn interior_points(&self) -> Vec<Complex64> {
        let step = 2.0 * PI / self.angles_per_radius as f64;
        self.radii
            .iter()
            .flat_map(|&r| (0..self.angles_per_radius).map(move |k| Complex64::from_polar(r, step * k as f64)))
            .collect()
    }

    pub fn torus_points(&self) -> Vec<Complex64> {
        torus_points(self.torus_angles)
    }
}

/// `e^{2πik/count}` for `k = 0..count`.
pub fn torus_points(count: usize) -> Vec<Complex64> {
    let step = 2.0 * PI / count as f64;
    (0..count).map(|k| Complex64::from_polar(1.0, step * k as f64)).collect()
}

/// `K_z^ρ(T)` at one point together with its smallest eigenvalue.
#[derive(Debug, Clone)]
pub struct KernelEval {
    pub z: Complex64,
    pub rho: f64,
    pub matrix: CMatrix,
    pub min_eigenvalue: f64,
}

/// Builds `K_z^ρ(T)` without the eigenvalue summary.
pub fn kernel_matrix(t: &CMatrix, z: Complex64, rho: f64) -> Result<CMatrix> {
    let n = t.dim();
    let resolvent_arg = &CMatrix::identity(n) - &t.scale(z.conj());
    let a = linalg::inverse(&resolvent_arg)?;
    // A + A* is Hermitian entry-for-entry in floating point
    let mut k = &a + &a.adjoint();
    for i in 0..n {
        k[(i, i)] += rho - 2.0;
    }
    Ok(k)
}

pub fn rho_kernel(t: &CMatrix, z: Complex64, rho: f64) -> Result<KernelEval> {
    let matrix = kernel_matrix(t, z, rho)?;
    let min_eigenvalue = linalg::min_eig(&matrix)?;
    Ok(KernelEval {
        z,
        rho,
        matrix,
        min_eigenvalue,
    })
}

/// Ascending spectrum of `K_z^ρ(T)`.
pub fn kernel_spectrum(t: &CMatrix, z: Complex64, rho: f64) -> Result<Vec<f64>> {
    linalg::hermitian_eigenvalues(&kernel_matrix(t, z, rho)?)
}

/// The middle factor `L_z^ρ(S) = ρI + 2(1−ρ)Re(z̄S) + (ρ−2)|z|²S*S` of the shift kernel,
/// `K_z^ρ(S) = (I − zS*)⁻¹ L_z^ρ(S) (I − z̄S)⁻¹`, for `S = S_{n+1}(a)`.
pub fn boundary_defect_shift(n: usize, a: f64, rho: f64, z: Complex64) -> CMatrix {
    let off = z.conj() * (a * (1.0 - rho));
    let tail = rho + (rho - 2.0) * z.norm_sqr() * a * a;
    CMatrix::from_fn(n + 1, |i, j| {
        if i == j {
            Complex64::new(if i == 0 { rho } else { tail }, 0.0)
        } else if j == i + 1 {
            off
        } else if i == j + 1 {
            off.conj()
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Grid point where the kernel's smallest eigenvalue was lowest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub z: Complex64,
    pub min_eigenvalue: f64,
}

/// Outcome of the grid-certified membership test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionCheck {
    pub member: bool,
    pub spectral_radius: f64,
    /// `None` when the spectral condition already failed.
    pub witness: Option<Witness>,
    /// Whether unit-circle points were sampled (skipped when T has spectrum near the torus).
    pub torus_evaluated: bool,
}

/// Kernel minimum over a list of points, ties broken by position so the result does not
/// depend on thread scheduling.
pub(crate) fn min_over_points(t: &CMatrix, rho: f64, points: &[Complex64]) -> Result<Witness> {
    let evaluated: Vec<(usize, f64)> = points
        .par_iter()
        .enumerate()
        .map(|(i, &z)| linalg::min_eig(&kernel_matrix(t, z, rho)?).map(|m| (i, m)))
        .collect::<Result<_>>()?;
    let lowest = evaluated
        .iter()
        .map(|e| e.1)
        .min_by(f64::total_cmp)
        .ok_or_else(|| Error::InvalidInput("empty grid".into()))?;
    // values within rounding of the minimum count as ties; the first point wins
    let slack = 1e-13 * lowest.abs().max(1.0);
    let (idx, _) = evaluated
        .iter()
        .copied()
        .find(|e| e.1 <= lowest + slack)
        .expect("minimum is attained");
    let min_eigenvalue = lowest;
    Ok(Witness {
        z: points[idx],
        min_eigenvalue,
    })
}

/// Angular refinement around a witness: repeated halving of the step on the witness circle.
fn refine_witness(t: &CMatrix, rho: f64, start: Witness, step: f64) -> Result<Witness> {
    let radius = start.z.norm();
    let mut best = start;
    let mut h = step / 2.0;
    for _ in 0..8 {
        let theta = best.z.arg();
        let candidates = [
            Complex64::from_polar(radius, theta - h),
            Complex64::from_polar(radius, theta + h),
        ];
        let local = min_over_points(t, rho, &candidates)?;
        if local.min_eigenvalue < best.min_eigenvalue {
            best = local;
        }
        h /= 2.0;
    }
    Ok(best)
}

/// Kernel minimum over the unit circle alone. When `r(T) < 1` the kernel is harmonic on a
/// neighbourhood of the closed disc, so its smallest eigenvalue is minimized on the boundary.
pub(crate) fn boundary_minimum(t: &CMatrix, rho: f64, torus_angles: usize) -> Result<Witness> {
    let best = min_over_points(t, rho, &torus_points(torus_angles))?;
    refine_witness(t, rho, best, 2.0 * PI / torus_angles as f64)
}

/// Grid-certified test of `σ(T) ⊆ 𝔻̄` and `K_z^ρ(T) ⪰ 0` on the disc.
pub fn is_rho_contraction(t: &CMatrix, rho: f64, grid: &DiscGrid, tol: f64) -> Result<ContractionCheck> {
    if !(rho >= 1.0) {
        return Err(Error::InvalidInput(format!("rho must be >= 1, got {rho}")));
    }
    let spectral_radius = linalg::spectral_radius(t)?;
    if spectral_radius > 1.0 + tol {
        return Ok(ContractionCheck {
            member: false,
            spectral_radius,
            witness: None,
            torus_evaluated: false,
        });
    }
    let torus_evaluated = spectral_radius < 1.0 - tol;
    let interior = grid.interior_points();
    let mut best = min_over_points(t, rho, &interior)?;
    let mut step = 2.0 * PI / grid.angles_per_radius() as f64;
    if torus_evaluated {
        let torus = min_over_points(t, rho, &grid.torus_points())?;
        if torus.min_eigenvalue <= best.min_eigenvalue {
            best = torus;
            step = 2.0 * PI / grid.torus_angles() as f64;
        }
    }
    let best = refine_witness(t, rho, best, step)?;
    Ok(ContractionCheck {
        member: best.min_eigenvalue >= -tol,
        spectral_radius,
        witness: Some(best),
        torus_evaluated,
    })
}

/// Orthonormal basis of `𝒩(K_z^ρ(T))` at a unimodular `z`. Rejects `T` with eigenvalues
/// within `tol` of the unit circle, where the kernel does not extend to the boundary.
pub fn torus_nullspace(t: &CMatrix, rho: f64, z: Complex64, tol: f64) -> Result<Vec<Vec<Complex64>>> {
    if (z.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidInput(format!("z = {z} is not unimodular")));
    }
    check_torus_free(t, tol)?;
    linalg::nullspace(&kernel_matrix(t, z, rho)?, tol)
}

pub(crate) fn check_torus_free(t: &CMatrix, tol: f64) -> Result<()> {
    if let Some(&eigenvalue) = linalg::eigenvalues(t)?
        .iter()
        .find(|l| (l.norm() - 1.0).abs() <= tol)
    {
        return Err(Error::TorusSpectrum { eigenvalue });
    }
    Ok(())
}
