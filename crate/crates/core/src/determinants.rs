//! Three-term recurrences for the Toeplitz-like determinants `D̃_m(a)` (last diagonal entry 1)
//! and `D_n(a)` (all-ρ diagonal) with off-diagonal entries `a^{|i−j|}`, their characteristic
//! roots, closed forms in the three discriminant regimes, and the trigonometric identities
//! they imply at the normalized weight.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radius::{self, DEFAULT_SHIFT_TOL};

/// Recurrence values above this magnitude are renormalized by a power of two.
const RESCALE_THRESHOLD: f64 = 1e250;

/// `mantissa · 2^exponent`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledValue {
    pub mantissa: f64,
    pub exponent: i32,
}

impl ScaledValue {
    /// The plain `f64`, which may overflow to ±∞ for very long recurrences.
    pub fn value(&self) -> f64 {
        self.mantissa * 2f64.powi(self.exponent)
    }
}

/// One run of `u_k = α u_{k−1} − β u_{k−2}` at a fixed `(ρ, a)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceState {
    pub rho: f64,
    pub a: f64,
    pub alpha: f64,
    pub beta: f64,
    pub values: Vec<ScaledValue>,
}

pub fn alpha(a: f64, rho: f64) -> f64 {
    rho + (rho - 2.0) * a * a
}

pub fn beta(a: f64, rho: f64) -> f64 {
    a * a * (1.0 - rho) * (1.0 - rho)
}

impl RecurrenceState {
    fn run(a: f64, rho: f64, init: [f64; 2], last: usize) -> Self {
        let (alpha, beta) = (alpha(a, rho), beta(a, rho));
        let mut values = vec![ScaledValue { mantissa: init[0], exponent: 0 }];
        if last >= 1 {
            values.push(ScaledValue { mantissa: init[1], exponent: 0 });
        }
        let (mut prev, mut cur, mut exponent) = (init[0], init[1], 0i32);
        for _ in 2..=last {
            let mut next = alpha * cur - beta * prev;
            if next.abs() > RESCALE_THRESHOLD {
                let shift = next.abs().log2().floor() as i32;
                let factor = 2f64.powi(-shift);
                next *= factor;
                cur *= factor;
                exponent += shift;
            }
            values.push(ScaledValue { mantissa: next, exponent });
            prev = cur;
            cur = next;
        }
        Self { rho, a, alpha, beta, values }
    }

    /// `D̃_0, …, D̃_last`
    pub fn dtilde(a: f64, rho: f64, last: usize) -> Self {
        Self::run(a, rho, [1.0, rho - a * a], last)
    }

    /// `D_0, …, D_last`
    pub fn dbold(a: f64, rho: f64, last: usize) -> Self {
        Self::run(a, rho, [rho, rho * rho - a * a], last)
    }

    pub fn value(&self, k: usize) -> f64 {
        self.values[k].value()
    }

    pub fn plain_values(&self) -> Vec<f64> {
        self.values.iter().map(ScaledValue::value).collect()
    }

    /// Whether the stored α, β match those recomputed from `(ρ, a)`.
    pub fn is_consistent(&self) -> bool {
        self.alpha == alpha(self.a, self.rho) && self.beta == beta(self.a, self.rho)
    }
}

/// `D̃_m(a)`: determinant of the `(m+1)×(m+1)` matrix with diagonal `(ρ, …, ρ, 1)` and
/// off-diagonal entries `a^{|i−j|}`.
pub fn dtilde(m: usize, a: f64, rho: f64) -> f64 {
    RecurrenceState::dtilde(a, rho, m).value(m)
}

/// `D_k(a)`: determinant of the `(k+1)×(k+1)` matrix with diagonal `ρ` and off-diagonal
/// entries `a^{|i−j|}`, i.e. `det K_1^ρ(S_{k+1}(a))`.
pub fn dbold(k: usize, a: f64, rho: f64) -> f64 {
    RecurrenceState::dbold(a, rho, k).value(k)
}

/// `Δ = (a²−1)((a+1)ρ − 2a)((a−1)ρ − 2a)`, equal to `α² − 4β`.
pub fn discriminant(a: f64, rho: f64) -> f64 {
    (a * a - 1.0) * ((a + 1.0) * rho - 2.0 * a) * ((a - 1.0) * rho - 2.0 * a)
}

/// Roots of `r² − αr + β = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CharacteristicRoots {
    Real { lambda1: f64, lambda2: f64 },
    Double { lambda: f64 },
    /// `λ = modulus · e^{iω}`, `0 < ω < π`.
    Complex { modulus: f64, omega: f64 },
}

pub fn characteristic_roots(a: f64, rho: f64) -> CharacteristicRoots {
    let (al, be) = (alpha(a, rho), beta(a, rho));
    let disc = al * al - 4.0 * be;
    if disc.abs() <= 1e-12 * al * al {
        CharacteristicRoots::Double { lambda: al / 2.0 }
    } else if disc > 0.0 {
        let root = disc.sqrt();
        // the smaller root via β/λ₂ avoids cancellation
        let lambda2 = (al + al.signum() * root) / 2.0;
        let lambda1 = be / lambda2;
        let (lambda1, lambda2) = if lambda1 <= lambda2 { (lambda1, lambda2) } else { (lambda2, lambda1) };
        CharacteristicRoots::Real { lambda1, lambda2 }
    } else {
        let modulus = be.sqrt();
        let omega = (al / (2.0 * modulus)).clamp(-1.0, 1.0).acos();
        CharacteristicRoots::Complex { modulus, omega }
    }
}

/// Closed forms at the double-root point `ρ₀ = n+2`, `a₀ = (n+2)/n`:
/// `D̃_m(a₀) = (1 + (1−a₀)m) λ^m` and `D_m(a₀) = (ρ₀ − a₀m) λ^m` with `λ = a₀(1+a₀)/(a₀−1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Case1Values {
    pub a0: f64,
    pub rho0: f64,
    pub lambda: f64,
    pub dtilde_closed: f64,
    pub dbold_closed: f64,
    pub dtilde_recurrence: f64,
    pub dbold_recurrence: f64,
}

pub fn closed_form_case1(m: usize, n: usize) -> Result<Case1Values> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be >= 1".into()));
    }
    let (rho0, a0) = radius::critical_rho(n);
    let lambda = a0 * (1.0 + a0) / (a0 - 1.0);
    let lm = lambda.powi(m as i32);
    let mf = m as f64;
    let dtilde_closed = (1.0 + (1.0 - a0) * mf) * lm;
    let dbold_closed = (rho0 - a0 * mf) * lm;
    let dtilde_recurrence = dtilde(m, a0, rho0);
    let dbold_recurrence = dbold(m, a0, rho0);

    let scale_t = (1.0 + (a0 - 1.0) * mf) * lm;
    let scale_b = (rho0 + a0 * mf) * lm;
    let err_t = (dtilde_closed - dtilde_recurrence).abs() / scale_t;
    let err_b = (dbold_closed - dbold_recurrence).abs() / scale_b;
    if err_t > 1e-9 || err_b > 1e-9 {
        return Err(Error::ResidualCheck(format!(
            "double-root closed form disagrees with recurrence at m={m}, n={n}: {err_t:e}, {err_b:e}"
        )));
    }
    Ok(Case1Values {
        a0,
        rho0,
        lambda,
        dtilde_closed,
        dbold_closed,
        dtilde_recurrence,
        dbold_recurrence,
    })
}

/// `a(ρ)` and `ω` with `cos ω = α / (2a(ρ−1))` in the complex-root regime `1 < ρ < n+2`.
pub fn case3_parameters(n: usize, rho: f64) -> Result<(f64, f64)> {
    if !(rho > 1.0 && rho < n as f64 + 2.0) {
        return Err(Error::InvalidInput(format!(
            "complex-root regime needs 1 < rho < n+2, got rho={rho}, n={n}"
        )));
    }
    let a = 1.0 / radius::shift_radius(n, rho, DEFAULT_SHIFT_TOL)?.value;
    match characteristic_roots(a, rho) {
        CharacteristicRoots::Complex { omega, .. } => Ok((a, omega)),
        other => Err(Error::ResidualCheck(format!(
            "expected complex characteristic roots at rho={rho}, n={n}, got {other:?}"
        ))),
    }
}

/// `D_k(a) = ρ a^k (ρ−1)^k sin((n−k)ω) / sin(nω)` at the normalized weight.
pub fn closed_form_case3(k: usize, n: usize, rho: f64) -> Result<f64> {
    if k > n {
        return Err(Error::InvalidInput(format!("k={k} exceeds n={n}")));
    }
    let (a, omega) = case3_parameters(n, rho)?;
    Ok(case3_value(k, n, a, rho, omega))
}

fn case3_value(k: usize, n: usize, a: f64, rho: f64, omega: f64) -> f64 {
    let nf = n as f64;
    rho * (a * (rho - 1.0)).powi(k as i32) * ((nf - k as f64) * omega).sin() / (nf * omega).sin()
}

/// Relative residual of `D̃_m = [a²(ρ−2)+1] D_{m−1} − a²(ρ−1)² D_{m−2}`.
pub fn mixed_identity_check(m: usize, a: f64, rho: f64) -> Result<f64> {
    if m < 2 {
        return Err(Error::InvalidInput(format!("mixed identity needs m >= 2, got {m}")));
    }
    let lhs = dtilde(m, a, rho);
    let t1 = (a * a * (rho - 2.0) + 1.0) * dbold(m - 1, a, rho);
    let t2 = a * a * (rho - 1.0) * (rho - 1.0) * dbold(m - 2, a, rho);
    let scale = lhs.abs().max(t1.abs()).max(t2.abs()).max(f64::MIN_POSITIVE);
    Ok((lhs - (t1 - t2)).abs() / scale)
}

/// Residuals of the sine identities for one candidate index `l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LScanRow {
    pub l: usize,
    /// `|sin 2lω − (ρ/a) sin ω|`
    pub double_angle_residual: f64,
    /// `|sin nω − (ρ/a) sin ω| + |sin 2lω − (ρ/a) sin ω|`
    pub joint_residual: f64,
    /// `|a sin((n−l)ω) − sin((n−l+1)ω)|`
    pub reversal_residual: f64,
    /// `|sin((2q+1)ω) − (ρ−1) sin ω|` with `q = n − l`
    pub odd_angle_residual: f64,
    /// The two angles a vanishing `v_l` would force: `π/(n+2l)` and `π/(3n−2l)`.
    pub forced_omega_first: f64,
    pub forced_omega_second: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Case3Report {
    pub n: usize,
    pub rho: f64,
    pub a: f64,
    pub omega: f64,
    /// `|sin nω − (ρ/a) sin ω|` at the computed `(a, ω)`.
    pub sine_identity_residual: f64,
    pub l_scan: Vec<LScanRow>,
    /// Smallest joint residual over the scan; `None` when the scan is empty (n ≤ 2).
    pub min_joint_residual: Option<f64>,
}

/// Evaluates `sin nω = (ρ/a) sin ω` at the normalized weight and scans the candidate indices
/// `l ∈ {1, …, ⌈n/2⌉−1}` for which a vanishing null-vector coordinate would require
/// `sin 2lω = (ρ/a) sin ω` as well.
pub fn case3_sin_system(n: usize, rho: f64) -> Result<Case3Report> {
    let (a, omega) = case3_parameters(n, rho)?;
    let target = rho / a * omega.sin();
    let nf = n as f64;
    let sine_identity_residual = ((nf * omega).sin() - target).abs();
    let l_scan: Vec<LScanRow> = (1..n.div_ceil(2))
        .map(|l| {
            let lf = l as f64;
            let q = nf - lf;
            let double_angle_residual = ((2.0 * lf * omega).sin() - target).abs();
            LScanRow {
                l,
                double_angle_residual,
                joint_residual: sine_identity_residual + double_angle_residual,
                reversal_residual: (a * (q * omega).sin() - ((q + 1.0) * omega).sin()).abs(),
                odd_angle_residual: (((2.0 * q + 1.0) * omega).sin() - (rho - 1.0) * omega.sin()).abs(),
                forced_omega_first: PI / (nf + 2.0 * lf),
                forced_omega_second: PI / (3.0 * nf - 2.0 * lf),
            }
        })
        .collect();
    let min_joint_residual = l_scan.iter().map(|r| r.joint_residual).min_by(f64::total_cmp);
    Ok(Case3Report {
        n,
        rho,
        a,
        omega,
        sine_identity_residual,
        l_scan,
        min_joint_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_conditions() {
        let (a, rho) = (1.7, 2.3);
        assert_eq!(dtilde(0, a, rho), 1.0);
        assert_eq!(dtilde(1, a, rho), rho - a * a);
        assert_eq!(dbold(0, a, rho), rho);
        assert_eq!(dbold(1, a, rho), rho * rho - a * a);
    }

    #[test]
    fn second_step_by_hand() {
        // 3x3 determinants expanded by cofactors
        let (a, rho): (f64, f64) = (0.8, 1.9);
        let dt2 = rho * (rho - a * a) - a * (a - a.powi(3)) + a * a * (a * a - rho * a * a);
        assert!((dtilde(2, a, rho) - dt2).abs() < 1e-13);
        let db2 = rho * (rho * rho - a * a) - a * (a * rho - a.powi(3)) + a * a * (a * a - rho * a * a);
        assert!((dbold(2, a, rho) - db2).abs() < 1e-13);
    }

    #[test]
    fn zero_weight_reduces_to_powers_of_rho() {
        for m in 2..7 {
            assert!((dtilde(m, 0.0, 1.7) - 1.7f64.powi(m as i32)).abs() < 1e-12);
            assert!(mixed_identity_check(m, 0.0, 1.7).unwrap() < 1e-15);
        }
    }

    #[test]
    fn discriminant_matches_alpha_beta() {
        for &(a, rho) in &[(0.5, 1.5), (1.3, 2.0), (3.0, 4.0), (1.1, 7.5)] {
            let d = discriminant(a, rho);
            let ab = alpha(a, rho).powi(2) - 4.0 * beta(a, rho);
            assert!((d - ab).abs() < 1e-11 * ab.abs().max(1.0));
        }
        assert_eq!(discriminant(1.0, 3.3), 0.0);
    }

    #[test]
    fn critical_discriminant_vanishes() {
        for n in 1..15 {
            let (rho0, a0) = radius::critical_rho(n);
            assert!(discriminant(a0, rho0).abs() < 1e-12 * rho0.powi(2) * a0.powi(4));
        }
    }

    #[test]
    fn rescaling_keeps_long_sequences_finite() {
        let st = RecurrenceState::dbold(40.0, 500.0, 400);
        let last = st.values.last().unwrap();
        assert!(last.mantissa.is_finite() && last.exponent > 0);
        assert!(st.is_consistent());
        let short = RecurrenceState::dbold(40.0, 500.0, 40);
        for k in 0..=40 {
            let x = st.value(k);
            let y = short.value(k);
            assert!((x - y).abs() <= 1e-12 * y.abs(), "k={k}");
        }
        // growth rate tends to the dominant root
        let log_growth = (last.mantissa.abs().log2() + last.exponent as f64) / 400.0;
        match characteristic_roots(40.0, 500.0) {
            CharacteristicRoots::Real { lambda2, .. } => assert!((log_growth - lambda2.log2()).abs() < 0.05),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn case1_examples() {
        for n in 1..10 {
            let v = closed_form_case1(n, n).unwrap();
            assert!(v.dbold_closed.abs() < 1e-12 * v.lambda.powi(n as i32));
            assert!(v.dbold_recurrence.abs() < 1e-9 * v.rho0 * v.lambda.powi(n as i32));
            let v0 = closed_form_case1(0, n).unwrap();
            assert_eq!(v0.dtilde_closed, 1.0);
        }
        for m in 0..8 {
            for n in 1..8 {
                closed_form_case1(m, n).unwrap();
            }
        }
    }

    #[test]
    fn case3_endpoint_values() {
        for n in 2..9 {
            for &rho in &[1.3, 2.0, n as f64 + 1.5] {
                let (a, omega) = case3_parameters(n, rho).unwrap();
                assert!((closed_form_case3(0, n, rho).unwrap() - rho).abs() < 1e-12);
                let scale = rho * (a * (rho - 1.0)).powi(n as i32);
                assert!(closed_form_case3(n, n, rho).unwrap().abs() < 1e-12 * scale);
                for k in 1..n {
                    assert!(closed_form_case3(k, n, rho).unwrap() > 0.0);
                }
                assert!(omega > 0.0 && omega < PI / n as f64);
            }
        }
        assert!(closed_form_case3(1, 3, 5.0).is_err());
    }

    #[test]
    fn roots_by_regime() {
        // n = 3 at rho = n+4: Δ > 0, and both roots exceed 1 since ψ(1) = 1 − α + β > 0
        let a = 1.0 / radius::shift_radius(3, 7.0, 1e-14).unwrap().value;
        assert!(1.0 - alpha(a, 7.0) + beta(a, 7.0) > 0.0);
        match characteristic_roots(a, 7.0) {
            CharacteristicRoots::Real { lambda1, lambda2 } => {
                assert!(lambda1 > 1.0 && lambda2 > 3.5);
                assert!((lambda1 * lambda2 - beta(a, 7.0)).abs() < 1e-9 * beta(a, 7.0));
            }
            other => panic!("unexpected {other:?}"),
        }
        let (rho0, a0) = radius::critical_rho(4);
        assert!(matches!(characteristic_roots(a0, rho0), CharacteristicRoots::Double { .. }));
        let a = 1.0 / radius::shift_radius(4, 2.0, 1e-14).unwrap().value;
        match characteristic_roots(a, 2.0) {
            CharacteristicRoots::Complex { modulus, omega } => {
                assert!((modulus - a).abs() < 1e-12);
                assert!((omega - PI / 6.0).abs() < 1e-10);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sine_system_at_rho_two() {
        for n in 2..10 {
            let rep = case3_sin_system(n, 2.0).unwrap();
            assert!((rep.omega - PI / (n as f64 + 2.0)).abs() < 1e-10);
            let nf = n as f64;
            assert!(((nf * rep.omega).sin() - (2.0 * rep.omega).sin()).abs() < 1e-10);
            assert!(rep.sine_identity_residual < 1e-9);
            assert_eq!(rep.l_scan.len(), n.div_ceil(2) - 1);
        }
    }
}
