//! The ρ-numerical radius `w_ρ(T) = inf{γ > 0 : T/γ ∈ C_ρ}`.
//!
//! General matrices go through [`radius_bisect`]. Truncated shifts have three dedicated
//! routes: the trigonometric ω-system for `1 < ρ < n+2`, the closed form at `ρ = n+2`, and the
//! first singularity of `K_1^ρ(S_{n+1}(a))` in `a` otherwise.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::determinants::{self, discriminant};
use crate::error::{Error, Result};
use crate::kernel::{self, DiscGrid};
use crate::linalg::{self, CMatrix};
use crate::shifts::make_shift;

/// Default target for the shift solvers, close to double precision.
pub const DEFAULT_SHIFT_TOL: f64 = 1e-14;
/// Default bracket width for [`radius_bisect`].
pub const DEFAULT_BISECT_TOL: f64 = 1e-8;
const MAX_BISECTIONS: usize = 200;
/// Accepted residual of the two defining trigonometric equations.
const OMEGA_RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusMethod {
    Bisection,
    OmegaSystem,
    DeterminantOracle,
    ClosedForm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusResult {
    pub value: f64,
    pub method: RadiusMethod,
    pub omega: Option<f64>,
    /// Residual of whatever equation defines the value for this method.
    pub residual: f64,
    /// Final bracket on the value.
    pub bracket: (f64, f64),
    pub iterations: usize,
}

/// Bisection on a predicate that is false at `lo` and true at `hi`.
/// Returns the final `(lo, hi)` and the iteration count.
fn bisect(
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    mut pred: impl FnMut(f64) -> Result<bool>,
) -> Result<(f64, f64, usize)> {
    for it in 0..MAX_BISECTIONS {
        if hi - lo <= tol * hi.abs().max(1.0) {
            return Ok((lo, hi, it));
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // bracket is down to adjacent floats
            return Ok((lo, hi, it));
        }
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if hi - lo <= tol * hi.abs().max(1.0) {
        Ok((lo, hi, MAX_BISECTIONS))
    } else {
        Err(Error::NoConvergence(format!(
            "bisection stopped at [{lo}, {hi}] after {MAX_BISECTIONS} steps"
        )))
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho >= 1.0) || !rho.is_finite() {
        return Err(Error::InvalidInput(format!("rho must be a finite real >= 1, got {rho}")));
    }
    Ok(())
}

/// Grid-certified membership of `T/γ` in `C_ρ`.
fn scaled_member(t: &CMatrix, spectral: f64, gamma: f64, rho: f64, grid: &DiscGrid, tol: f64) -> Result<bool> {
    let scaled = t.scale_real(1.0 / gamma);
    let r = spectral / gamma;
    if r < 1.0 - 1e-9 {
        let w = kernel::boundary_minimum(&scaled, rho, grid.torus_angles())?;
        Ok(w.min_eigenvalue >= -tol)
    } else {
        Ok(kernel::is_rho_contraction(&scaled, rho, grid, tol)?.member)
    }
}

/// `w_ρ(T)` by bisection on `γ ∈ [max(r(T), ‖T‖/ρ), ‖T‖]`, testing `T/γ ∈ C_ρ` on `grid`.
///
/// When the predicate already holds at the lower end of the bracket (normal matrices, or
/// shifts whose radius equals `‖T‖/ρ`), that endpoint is the exact value and is returned.
pub fn radius_bisect(t: &CMatrix, rho: f64, grid: &DiscGrid, tol: f64) -> Result<RadiusResult> {
    check_rho(rho)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    if t.is_zero() {
        return Ok(RadiusResult {
            value: 0.0,
            method: RadiusMethod::Bisection,
            omega: None,
            residual: 0.0,
            bracket: (0.0, 0.0),
            iterations: 0,
        });
    }
    let norm = linalg::operator_norm(t);
    let spectral = linalg::spectral_radius(t)?;
    let lo = spectral.max(norm / rho).min(norm);
    let hi = norm;
    let pred_tol = 1e-12 * rho.max(1.0);
    let pred = |g: f64| scaled_member(t, spectral, g, rho, grid, pred_tol);

    if !pred(hi)? {
        return Err(Error::BracketInvalid(format!(
            "T/||T|| is not certified in C_rho for rho={rho}"
        )));
    }
    if hi - lo <= tol * hi.max(1.0) || pred(lo)? {
        return Ok(RadiusResult {
            value: lo,
            method: RadiusMethod::Bisection,
            omega: None,
            residual: 0.0,
            bracket: (lo, lo),
            iterations: 0,
        });
    }
    let (a, b, iterations) = bisect(lo, hi, tol, pred)?;
    Ok(RadiusResult {
        value: 0.5 * (a + b),
        method: RadiusMethod::Bisection,
        omega: None,
        residual: b - a,
        bracket: (a, b),
        iterations,
    })
}

/// `(ρ₀, a₀) = (n+2, (n+2)/n)`, where the characteristic roots of the determinant
/// recurrence at the normalized weight coalesce.
pub fn critical_rho(n: usize) -> (f64, f64) {
    let nf = n as f64;
    (nf + 2.0, (nf + 2.0) / nf)
}

/// `w_ρ(S_{n+1}(1))`.
pub fn shift_radius(n: usize, rho: f64, tol: f64) -> Result<RadiusResult> {
    if n == 0 {
        return Err(Error::InvalidInput("the 1x1 shift is zero; n must be >= 1".into()));
    }
    check_rho(rho)?;
    let nf = n as f64;
    if rho == 1.0 {
        // w_1 is the operator norm
        return Ok(RadiusResult {
            value: 1.0,
            method: RadiusMethod::ClosedForm,
            omega: None,
            residual: 0.0,
            bracket: (1.0, 1.0),
            iterations: 0,
        });
    }
    if rho == nf + 2.0 {
        let (rho0, a0) = critical_rho(n);
        let value = nf / (nf + 2.0);
        return Ok(RadiusResult {
            value,
            method: RadiusMethod::ClosedForm,
            omega: None,
            residual: discriminant(a0, rho0).abs(),
            bracket: (value, value),
            iterations: 0,
        });
    }
    if n == 1 || rho > nf + 2.0 {
        return determinant_radius(n, rho, tol);
    }
    omega_radius(n, rho, tol)
}

/// `a(ω) = ρ sin((n+1)ω) / ((ρ−1) sin nω)` and its derivative.
fn weight_of_omega(n: f64, rho: f64, omega: f64) -> (f64, f64) {
    let s0 = (n * omega).sin();
    let s1 = ((n + 1.0) * omega).sin();
    let c = rho / (rho - 1.0);
    let a = c * s1 / s0;
    let da = c * ((n + 1.0) * ((n + 1.0) * omega).cos() * s0 - n * (n * omega).cos() * s1) / (s0 * s0);
    (a, da)
}

/// `G(ω) = ρ + (ρ−2)a² − 2a(ρ−1)cos ω` along `a = a(ω)`, with its derivative.
///
/// Zeros of `G` are the points where the determinant recurrence both vanishes at step `n`
/// and has complex roots with argument `ω`; on `(0, π/(n+1))` there is exactly one.
fn omega_equation(n: f64, rho: f64, omega: f64) -> (f64, f64) {
    let (a, da) = weight_of_omega(n, rho, omega);
    let (s, c) = omega.sin_cos();
    let g = rho + (rho - 2.0) * a * a - 2.0 * a * (rho - 1.0) * c;
    let dg = 2.0 * (rho - 2.0) * a * da - 2.0 * (rho - 1.0) * (da * c - a * s);
    (g, dg)
}

/// Residuals of `sin nω / sin ω = ρx` and `cos ω = (ρx² + ρ − 2) / (2x(ρ−1))`, the second
/// cleared of its denominator, which vanishes as `ρ → 1`.
pub fn omega_system_residuals(n: usize, rho: f64, x: f64, omega: f64) -> (f64, f64) {
    let nf = n as f64;
    let r1 = ((nf * omega).sin() / omega.sin() - rho * x).abs();
    let r2 = (2.0 * x * (rho - 1.0) * omega.cos() - (rho * x * x + rho - 2.0)).abs();
    (r1, r2)
}

/// `w_ρ(S_{n+1}(1))` through the trigonometric system; only defined for `1 < ρ < n+2`.
pub fn omega_radius(n: usize, rho: f64, tol: f64) -> Result<RadiusResult> {
    check_rho(rho)?;
    let nf = n as f64;
    if n == 0 || !(rho > 1.0 && rho < nf + 2.0) {
        return Err(Error::InvalidInput(format!(
            "the omega system needs n >= 1 and 1 < rho < n+2, got n={n}, rho={rho}"
        )));
    }
    let edge = 1e-9;
    let (lo, hi) = (edge, PI / (nf + 1.0) - edge);
    let g_lo = omega_equation(nf, rho, lo).0;
    let g_hi = omega_equation(nf, rho, hi).0;
    if !(g_lo < 0.0 && g_hi > 0.0) {
        return Err(Error::NoRoot(format!(
            "no sign change of the omega equation for n={n}, rho={rho}: G({lo})={g_lo}, G({hi})={g_hi}"
        )));
    }
    let (mut a, mut b, iterations) = bisect(lo, hi, tol, |w| Ok(omega_equation(nf, rho, w).0 > 0.0))?;
    let mut omega = 0.5 * (a + b);
    for _ in 0..4 {
        let (g, dg) = omega_equation(nf, rho, omega);
        if g == 0.0 || dg == 0.0 {
            break;
        }
        let next = omega - g / dg;
        if !(next > a && next < b) || omega_equation(nf, rho, next).0.abs() >= g.abs() {
            break;
        }
        if g > 0.0 {
            b = omega;
        } else {
            a = omega;
        }
        omega = next;
    }
    let weight = weight_of_omega(nf, rho, omega).0;
    let x = 1.0 / weight;
    let (r1, r2) = omega_system_residuals(n, rho, x, omega);
    let residual = r1.max(r2);
    if !(x > 1.0 / rho && x < 1.0) || residual > OMEGA_RESIDUAL_TOL * rho {
        return Err(Error::ResidualCheck(format!(
            "omega system at n={n}, rho={rho}: x={x}, residuals {r1:e}, {r2:e}"
        )));
    }
    let xa = 1.0 / weight_of_omega(nf, rho, a).0;
    let xb = 1.0 / weight_of_omega(nf, rho, b).0;
    Ok(RadiusResult {
        value: x,
        method: RadiusMethod::OmegaSystem,
        omega: Some(omega),
        residual,
        bracket: (xa.min(xb), xa.max(xb)),
        iterations,
    })
}

fn boundary_kernel_min(n: usize, a: f64, rho: f64) -> Result<f64> {
    linalg::min_eig(&kernel::kernel_matrix(&make_shift(n, a), num_complex::Complex64::new(1.0, 0.0), rho)?)
}

/// `1/a*`, where `a*` is the first weight at which `K_1^ρ(S_{n+1}(a))` becomes singular.
///
/// Two independent routes are run and required to agree: bisection on the smallest
/// eigenvalue over `a ∈ [1, ρ]`, and the first sign change of the determinant recurrence
/// `D_n(a)` located by a fine scan and refined by bisection.
pub fn determinant_radius(n: usize, rho: f64, tol: f64) -> Result<RadiusResult> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be >= 1".into()));
    }
    check_rho(rho)?;
    if rho == 1.0 {
        return Err(Error::InvalidInput("determinant route needs rho > 1".into()));
    }
    let eig_tol = 1e-12 * rho;
    if boundary_kernel_min(n, rho, rho)? > eig_tol {
        return Err(Error::BracketInvalid(format!(
            "K_1 is still positive definite at a = rho = {rho} (n={n})"
        )));
    }
    let (a1, b1, iterations) = bisect(1.0, rho, tol, |a| Ok(boundary_kernel_min(n, a, rho)? <= 0.0))?;
    let eig_root = 0.5 * (a1 + b1);

    let det = |a: f64| determinants::RecurrenceState::dbold(a, rho, n).values[n].mantissa;
    let steps = 400 * (n + 1);
    let h = (rho - 1.0) / steps as f64;
    let mut prev = 1.0;
    let mut det_bracket = None;
    for k in 1..=steps {
        let a = if k == steps { rho } else { 1.0 + h * k as f64 };
        if det(a) <= 0.0 {
            det_bracket = Some((prev, a));
            break;
        }
        prev = a;
    }
    let (lo, hi) = det_bracket.ok_or_else(|| {
        Error::NoRoot(format!("D_n(a) keeps its sign on [1, rho] for n={n}, rho={rho}"))
    })?;
    let (a2, b2, _) = bisect(lo, hi, tol, |a| Ok(det(a) <= 0.0))?;
    let det_root = 0.5 * (a2 + b2);

    let agreement = (1.0 / eig_root - 1.0 / det_root).abs();
    if agreement > 1e-9 {
        return Err(Error::ResidualCheck(format!(
            "eigenvalue root {eig_root} and determinant root {det_root} disagree (n={n}, rho={rho})"
        )));
    }
    let residual = boundary_kernel_min(n, eig_root, rho)?.abs() / rho;
    Ok(RadiusResult {
        value: 1.0 / eig_root,
        method: RadiusMethod::DeterminantOracle,
        omega: None,
        residual: residual.max(agreement),
        bracket: (1.0 / b1, 1.0 / a1),
        iterations,
    })
}

/// Outcome of the inequality `w_{m+1}(T) ≤ (m−1)/(m+1)·‖T‖` for `T^m = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NilpotentBound {
    pub holds: bool,
    pub radius: f64,
    pub bound: f64,
    pub norm: f64,
}

pub fn nilpotent_bound(m: usize, t: &CMatrix, grid: &DiscGrid, tol: f64) -> Result<NilpotentBound> {
    if m < 2 {
        return Err(Error::InvalidInput(format!("nilpotency order must be >= 2, got {m}")));
    }
    let norm = linalg::operator_norm(t);
    let residual = t.pow(m as u32).max_abs();
    if residual > 1e-10 * norm.powi(m as i32).max(f64::MIN_POSITIVE) {
        return Err(Error::NotNilpotent { order: m, residual });
    }
    let mf = m as f64;
    let bound = (mf - 1.0) / (mf + 1.0) * norm;
    let radius = radius_bisect(t, mf + 1.0, grid, DEFAULT_BISECT_TOL)?.value;
    Ok(NilpotentBound {
        holds: radius <= bound + tol,
        radius,
        bound,
        norm,
    })
}

/// `ω(ρ)` at each sample in `(1, n+2)`, checking that it decreases strictly and that it
/// tends to `π/(n+1)` as `ρ → 1⁺`.
pub fn omega_of_rho_curve(n: usize, rho_samples: &[f64]) -> Result<Vec<(f64, f64)>> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("the omega curve needs n >= 2, got {n}")));
    }
    let upper = n as f64 + 2.0;
    if let Some(&bad) = rho_samples.iter().find(|&&r| !(r > 1.0 && r < upper)) {
        return Err(Error::InvalidInput(format!("rho={bad} outside (1, {upper})")));
    }
    let omega_at = |rho: f64| -> Result<f64> {
        shift_radius(n, rho, DEFAULT_SHIFT_TOL)?
            .omega
            .ok_or_else(|| Error::NoRoot(format!("no omega at rho={rho}")))
    };
    let curve: Vec<(f64, f64)> = rho_samples
        .iter()
        .map(|&rho| omega_at(rho).map(|w| (rho, w)))
        .collect::<Result<_>>()?;

    let mut sorted = curve.clone();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    for pair in sorted.windows(2) {
        if pair[0].0 < pair[1].0 && pair[0].1 <= pair[1].1 {
            return Err(Error::ResidualCheck(format!(
                "omega not strictly decreasing: omega({})={} <= omega({})={}",
                pair[0].0, pair[0].1, pair[1].0, pair[1].1
            )));
        }
    }
    let limit = omega_at(1.0 + 1e-4)?;
    let edge = PI / (n as f64 + 1.0);
    if edge - limit > 1e-3 || limit >= edge {
        return Err(Error::ResidualCheck(format!(
            "omega near rho=1 is {limit}, expected just below {edge}"
        )));
    }
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn rho_two_closed_form() {
        for n in 2..=20 {
            let r = shift_radius(n, 2.0, DEFAULT_SHIFT_TOL).unwrap();
            let w = PI / (n as f64 + 2.0);
            assert!((r.value - w.cos()).abs() < 1e-12, "n={n}");
            assert!((r.omega.unwrap() - w).abs() < 1e-10);
            assert_eq!(r.method, RadiusMethod::OmegaSystem);
        }
    }

    #[test]
    fn critical_examples() {
        assert_eq!(critical_rho(1), (3.0, 3.0));
        assert_eq!(critical_rho(2), (4.0, 2.0));
        assert_eq!(shift_radius(2, 4.0, 1e-14).unwrap().value, 0.5);
        for n in 1..=12 {
            let d = determinant_radius(n, n as f64 + 2.0, 1e-14).unwrap();
            assert!((d.value - n as f64 / (n as f64 + 2.0)).abs() < 1e-9, "n={n}");
        }
    }

    #[test]
    fn n_one_is_inverse_rho() {
        for &rho in &[1.2, 2.0, 2.9, 3.0, 5.0] {
            let r = shift_radius(1, rho, 1e-14).unwrap();
            assert!((r.value - 1.0 / rho).abs() < 1e-12, "rho={rho}");
        }
    }

    #[test]
    fn rho_one_is_norm() {
        assert_eq!(shift_radius(5, 1.0, 1e-14).unwrap().value, 1.0);
    }

    #[test]
    fn omega_route_matches_determinant_route() {
        for n in 2..=12 {
            for &rho in &[1.05, 1.5, 2.0, 3.0, 2.9, n as f64 + 1.9] {
                let s = shift_radius(n, rho, 1e-14).unwrap();
                let d = determinant_radius(n, rho, 1e-14).unwrap();
                assert!((s.value - d.value).abs() < 1e-9, "n={n} rho={rho}: {} vs {}", s.value, d.value);
            }
        }
    }

    #[test]
    fn monotone_in_rho() {
        for n in 2..7 {
            let mut prev_w = f64::INFINITY;
            let mut prev_g = 0.0;
            for k in 0..30 {
                let rho = 1.0 + 0.3 * k as f64;
                let w = shift_radius(n, rho, 1e-14).unwrap().value;
                assert!(w <= prev_w + 1e-12);
                assert!(rho * w >= prev_g - 1e-12);
                if rho > 1.0 {
                    assert!(rho * w > 1.0);
                }
                prev_w = w;
                prev_g = rho * w;
            }
        }
    }

    #[test]
    fn bisect_examples() {
        let grid = DiscGrid::default();
        let u = CMatrix::diagonal(&[Complex64::from_polar(1.0, 0.4)]);
        for &rho in &[1.0, 2.0, 7.0] {
            assert!((radius_bisect(&u, rho, &grid, 1e-8).unwrap().value - 1.0).abs() < 1e-12);
        }
        let s2 = make_shift(1, 1.0);
        assert!((radius_bisect(&s2, 3.0, &grid, 1e-8).unwrap().value - 1.0 / 3.0).abs() < 1e-8);
        let s3 = make_shift(2, 1.0);
        let r = radius_bisect(&s3, 2.0, &grid, 1e-8).unwrap();
        assert!((r.value - (PI / 4.0).cos()).abs() < 1e-7);
        assert_eq!(radius_bisect(&CMatrix::zeros(3), 2.0, &grid, 1e-8).unwrap().value, 0.0);
    }

    #[test]
    fn bisect_on_non_nilpotent() {
        // upper triangular with spectrum {0.5, 0}: w_2 is the numerical radius
        let t = CMatrix::from_real_rows(&[&[0.5, 1.0], &[0.0, 0.0]]).unwrap();
        let r = radius_bisect(&t, 2.0, &DiscGrid::default(), 1e-8).unwrap();
        // numerical range of [[a, b],[0, 0]] is an ellipse; w = (|a| + sqrt(|a|^2+|b|^2))/2
        let expected = (0.5 + (0.25f64 + 1.0).sqrt()) / 2.0;
        assert!((r.value - expected).abs() < 1e-6, "{} vs {expected}", r.value);
    }

    #[test]
    fn nilpotent_examples() {
        let grid = DiscGrid::default();
        for m in 2..5 {
            let nb = nilpotent_bound(m, &make_shift(m - 1, 1.0), &grid, 1e-6).unwrap();
            assert!(nb.holds);
            assert!((nb.radius - nb.bound).abs() < 1e-6, "m={m}");
        }
        let padded = CMatrix::from_real_rows(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0]]).unwrap();
        let nb = nilpotent_bound(2, &padded, &grid, 1e-6).unwrap();
        assert!(nb.holds && (nb.radius - 1.0 / 3.0).abs() < 1e-7);
        assert!(matches!(
            nilpotent_bound(2, &make_shift(3, 1.0), &grid, 1e-6),
            Err(Error::NotNilpotent { .. })
        ));
    }

    #[test]
    fn omega_curve() {
        for n in 2..8 {
            let samples: Vec<f64> = (0..16).map(|k| 1.05 + k as f64 * (n as f64 + 0.9) / 15.0).collect();
            let curve = omega_of_rho_curve(n, &samples).unwrap();
            assert_eq!(curve.len(), 16);
            let at2 = omega_of_rho_curve(n, &[2.0]).unwrap()[0].1;
            assert!((at2 - PI / (n as f64 + 2.0)).abs() < 1e-10);
        }
        assert!(omega_of_rho_curve(3, &[5.0]).is_err());
    }
}
