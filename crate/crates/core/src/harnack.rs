//! Harnack domination `K_z^ρ(T₁) ⪯ c² K_z^ρ(T₀)` on a disc grid and the nullspace criterion
//! on the unit circle that decides Harnack equivalence when the nullity is constant.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{self, DiscGrid};
use crate::linalg::{self, CMatrix, NULLSPACE_TOL};

/// Default principal-angle tolerance for nullspace comparisons.
pub const ANGLE_TOL: f64 = 1e-7;
/// Default number of unit-circle samples for nullspace comparisons.
pub const TORUS_ANGLES: usize = 256;
/// Slack allowed when re-checking a domination certificate.
const CERTIFICATE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarnackCertificate {
    /// Smallest `c²` that works on every grid point; `None` when no finite constant exists.
    pub c_squared: Option<f64>,
    /// Point where `c²` is attained, or where domination first fails.
    pub worst_z: Complex64,
    pub grid: DiscGrid,
    /// `(dominated, dominating)`
    pub direction: (String, String),
    pub tol: f64,
}

impl HarnackCertificate {
    pub fn is_feasible(&self) -> bool {
        self.c_squared.is_some()
    }

    /// Re-evaluates `(c² + tol)·K(T₀) − K(T₁) ⪰ 0` at every grid point.
    pub fn recheck(&self, t1: &CMatrix, t0: &CMatrix, rho: f64) -> Result<bool> {
        let Some(c2) = self.c_squared else {
            return Ok(false);
        };
        let points = domination_points(&self.grid);
        let ok: Vec<bool> = points
            .par_iter()
            .map(|&z| {
                let k1 = kernel::kernel_matrix(t1, z, rho)?;
                let k0 = kernel::kernel_matrix(t0, z, rho)?;
                let diff = &k0.scale_real(c2 + self.tol) - &k1;
                let scale = k0.max_abs().max(k1.max_abs());
                Ok(linalg::min_eig(&diff)? >= -self.tol * scale)
            })
            .collect::<Result<_>>()?;
        Ok(ok.into_iter().all(|b| b))
    }
}

/// Interior grid points with the origin prepended; at `z = 0` both kernels equal `ρI`,
/// which pins `c² ≥ 1`.
fn domination_points(grid: &DiscGrid) -> Vec<Complex64> {
    let mut points = vec![Complex64::new(0.0, 0.0)];
    points.extend(grid.interior_points());
    points
}

enum PencilMax {
    Finite(f64),
    Infeasible,
}

/// Largest eigenvalue of the pencil `K₁x = λK₀x` through the congruence `K₀^{-1/2} K₁ K₀^{-1/2}`
/// restricted to the range of `K₀`.
fn pencil_max(k1: &CMatrix, k0: &CMatrix, z: Complex64) -> Result<PencilMax> {
    let eig = linalg::hermitian_eigen(k0)?;
    let scale = eig.spectral_norm().max(k1.max_abs());
    let threshold = 1e-12 * scale;
    if eig.values[0] < -threshold {
        return Err(Error::InteriorSingular { z });
    }
    let (null, range): (Vec<usize>, Vec<usize>) = (0..eig.values.len()).partition(|&i| eig.values[i] <= threshold);
    for &i in &null {
        let image = k1.matvec(&eig.vectors[i]);
        if linalg::vector_norm(&image) > 1e-9 * scale {
            return Ok(PencilMax::Infeasible);
        }
    }
    if range.is_empty() {
        return Ok(PencilMax::Finite(0.0));
    }
    let images: Vec<Vec<Complex64>> = range.iter().map(|&j| k1.matvec(&eig.vectors[j])).collect();
    let r = range.len();
    let mut m = CMatrix::from_fn(r, |a, b| {
        let (i, j) = (range[a], range[b]);
        linalg::inner(&eig.vectors[i], &images[b]) / (eig.values[i] * eig.values[j]).sqrt()
    });
    m = m.hermitian_part();
    Ok(PencilMax::Finite(linalg::max_eig(&m)?))
}

/// Best grid constant `c²` with `K_z^ρ(T₁) ⪯ c² K_z^ρ(T₀)` at every interior grid point.
///
/// `InteriorSingular` when `K_z^ρ(T₀)` has a negative eigenvalue (T₀ is not in `C_ρ`);
/// an infeasible certificate when `K_z^ρ(T₀)` is singular in a direction where
/// `K_z^ρ(T₁)` is not.
pub fn domination_constant(t1: &CMatrix, t0: &CMatrix, rho: f64, grid: &DiscGrid) -> Result<HarnackCertificate> {
    if t1.dim() != t0.dim() {
        return Err(Error::DimensionMismatch {
            expected: t0.dim(),
            actual: t1.dim(),
        });
    }
    if !(rho >= 1.0) {
        return Err(Error::InvalidInput(format!("rho must be >= 1, got {rho}")));
    }
    let direction = ("T1".to_string(), "T0".to_string());
    let points = domination_points(grid);
    if t1 == t0 {
        return Ok(HarnackCertificate {
            c_squared: Some(1.0),
            worst_z: points[0],
            grid: grid.clone(),
            direction,
            tol: CERTIFICATE_TOL,
        });
    }
    let results: Vec<PencilMax> = points
        .par_iter()
        .map(|&z| {
            let k1 = kernel::kernel_matrix(t1, z, rho)?;
            let k0 = kernel::kernel_matrix(t0, z, rho)?;
            pencil_max(&k1, &k0, z)
        })
        .collect::<Result<_>>()?;

    let mut worst: Option<(usize, f64)> = None;
    for (i, r) in results.iter().enumerate() {
        match *r {
            PencilMax::Infeasible => {
                return Ok(HarnackCertificate {
                    c_squared: None,
                    worst_z: points[i],
                    grid: grid.clone(),
                    direction,
                    tol: CERTIFICATE_TOL,
                });
            }
            PencilMax::Finite(v) => {
                if worst.is_none_or(|(_, w)| v > w) {
                    worst = Some((i, v));
                }
            }
        }
    }
    let (idx, c2) = worst.expect("at least the origin is evaluated");
    Ok(HarnackCertificate {
        c_squared: Some(c2),
        worst_z: points[idx],
        grid: grid.clone(),
        direction,
        tol: CERTIFICATE_TOL,
    })
}

/// Necessary condition for `T₁ ≺ T₀`: every eigenvalue of `T₁` on the unit circle is
/// matched by one of `T₀`.
pub fn torus_spectrum_check(t1: &CMatrix, t0: &CMatrix) -> Result<bool> {
    let e1 = linalg::eigenvalues(t1)?;
    let e0 = linalg::eigenvalues(t0)?;
    Ok(e1
        .iter()
        .filter(|l| (l.norm() - 1.0).abs() <= 1e-8)
        .all(|l| e0.iter().any(|m| (l - m).norm() <= 1e-6)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullspaceSample {
    pub z: Complex64,
    pub nullity_t1: usize,
    pub nullity_t0: usize,
    /// `1 − σ_min` of the cross-Gram matrix, `1` when the nullities differ.
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullspaceReport {
    pub equal: bool,
    /// Whether the nullity of `K_z^ρ(T₀)` is the same at every sample.
    pub constant_nullity: bool,
    pub worst_distance: f64,
    pub worst_z: Complex64,
    pub samples: Vec<NullspaceSample>,
}

/// Compares `𝒩(K_z^ρ(T₁))` and `𝒩(K_z^ρ(T₀))` at `z = e^{2πik/torus_angles}`.
pub fn nullspace_equality(
    t1: &CMatrix,
    t0: &CMatrix,
    rho: f64,
    torus_angles: usize,
    tol: f64,
) -> Result<NullspaceReport> {
    if t1.dim() != t0.dim() {
        return Err(Error::DimensionMismatch {
            expected: t0.dim(),
            actual: t1.dim(),
        });
    }
    if torus_angles == 0 {
        return Err(Error::InvalidInput("torus_angles must be positive".into()));
    }
    kernel::check_torus_free(t1, 1e-8)?;
    kernel::check_torus_free(t0, 1e-8)?;
    let points = kernel::torus_points(torus_angles);
    let samples: Vec<NullspaceSample> = points
        .par_iter()
        .map(|&z| {
            let n1 = linalg::nullspace(&kernel::kernel_matrix(t1, z, rho)?, NULLSPACE_TOL)?;
            let n0 = linalg::nullspace(&kernel::kernel_matrix(t0, z, rho)?, NULLSPACE_TOL)?;
            Ok(NullspaceSample {
                z,
                nullity_t1: n1.len(),
                nullity_t0: n0.len(),
                distance: linalg::subspace_distance(&n1, &n0),
            })
        })
        .collect::<Result<_>>()?;
    let (worst_idx, worst_distance) = samples
        .iter()
        .enumerate()
        .map(|(i, s)| (i, s.distance))
        .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    let equal = samples
        .iter()
        .all(|s| s.nullity_t1 == s.nullity_t0 && s.distance <= tol);
    let constant_nullity = samples.iter().all(|s| s.nullity_t0 == samples[0].nullity_t0);
    Ok(NullspaceReport {
        equal,
        constant_nullity,
        worst_distance,
        worst_z: samples[worst_idx].z,
        samples,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarnackVerdict {
    /// Nullspace equality with constant nullity over the torus samples.
    pub verdict: bool,
    pub nullspace: NullspaceReport,
    /// `T₁ ≺ T₀` on the interior grid.
    pub forward: HarnackCertificate,
    /// `T₀ ≺ T₁` on the interior grid.
    pub backward: HarnackCertificate,
}

impl HarnackVerdict {
    /// Whether the grid constants are finite in both directions.
    pub fn domination_corroborates(&self) -> bool {
        self.forward.is_feasible() && self.backward.is_feasible()
    }
}

/// Harnack equivalence of two torus-spectrum-free members of `C_ρ`. The verdict rests on
/// the nullspace criterion; the two domination certificates are attached as evidence.
pub fn are_harnack_equivalent(t1: &CMatrix, t0: &CMatrix, rho: f64, grid: &DiscGrid) -> Result<HarnackVerdict> {
    let nullspace = nullspace_equality(t1, t0, rho, grid.torus_angles(), ANGLE_TOL)?;
    let forward = domination_constant(t1, t0, rho, grid)?;
    let mut backward = domination_constant(t0, t1, rho, grid)?;
    backward.direction = ("T0".into(), "T1".into());
    Ok(HarnackVerdict {
        verdict: nullspace.equal && nullspace.constant_nullity,
        nullspace,
        forward,
        backward,
    })
}
