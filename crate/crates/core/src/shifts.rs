//! Truncated shifts `S_{n+1}(b)` and the `w_ρ`-normalized shift.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::radius::{shift_radius, DEFAULT_SHIFT_TOL};

/// A truncated shift of size `n + 1` with constant superdiagonal weight `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftSpec {
    pub n: usize,
    pub b: f64,
}

impl ShiftSpec {
    pub fn new(n: usize, b: f64) -> Result<Self> {
        if !(b > 0.0) || !b.is_finite() {
            return Err(Error::InvalidInput(format!("shift weight must be positive, got {b}")));
        }
        Ok(Self { n, b })
    }

    pub fn matrix(&self) -> CMatrix {
        make_shift(self.n, self.b)
    }
}

/// `(n+1)×(n+1)` matrix with `b` on the first superdiagonal. `n = 0` gives the 1×1 zero matrix.
pub fn make_shift(n: usize, b: f64) -> CMatrix {
    let w = Complex64::new(b, 0.0);
    CMatrix::from_fn(n + 1, |i, j| if j == i + 1 { w } else { Complex64::new(0.0, 0.0) })
}

/// The shift of size `n + 1` scaled so that its ρ-numerical radius is one.
pub fn normalized_shift(n: usize, rho: f64) -> Result<CMatrix> {
    Ok(make_shift(n, normalized_weight(n, rho)?))
}

/// `a(ρ) = 1 / w_ρ(S_{n+1}(1))`.
pub fn normalized_weight(n: usize, rho: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidInput(
            "the 1x1 zero shift has w_rho = 0 and cannot be normalized".into(),
        ));
    }
    if !(rho >= 1.0) {
        return Err(Error::InvalidInput(format!("rho must be >= 1, got {rho}")));
    }
    Ok(1.0 / shift_radius(n, rho, DEFAULT_SHIFT_TOL)?.value)
}

/// `diag(1, z, …, zⁿ)`
pub fn rotation_diagonal(n: usize, z: Complex64) -> CMatrix {
    let mut powers = Vec::with_capacity(n + 1);
    let mut p = Complex64::new(1.0, 0.0);
    for _ in 0..=n {
        powers.push(p);
        p *= z;
    }
    CMatrix::diagonal(&powers)
}
