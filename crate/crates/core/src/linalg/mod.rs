//! Dense complex linear algebra for small matrices (dim ≤ 64).

mod eigen;
mod lu;
mod matrix;
mod svd;

pub use eigen::{
    eigen_residual, eigenvalues, hermitian_eigen, hermitian_eigenvalues, max_eig, min_eig,
    nullspace, orthonormality_defect, spectral_radius, EigenResult, HERMITIAN_TOL,
};
pub use lu::{determinant, inverse, LuDecomposition};
pub use matrix::{inner, normalize, vector_norm, CMatrix};
pub use svd::{operator_norm, singular_values, singular_values_rect};

/// Default relative tolerance for null-space extraction.
pub const NULLSPACE_TOL: f64 = 1e-8;
/// Default relative residual accepted for eigenpairs.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-10;

/// Largest principal-angle defect between two subspaces given by orthonormal bases:
/// `1 − σ_min(U₁* U₀)`, and `1.0` when dimensions differ.
pub fn subspace_distance(
    u1: &[Vec<num_complex::Complex64>],
    u0: &[Vec<num_complex::Complex64>],
) -> f64 {
    if u1.len() != u0.len() {
        return 1.0;
    }
    if u1.is_empty() {
        return 0.0;
    }
    if u1.len() == 1 {
        return (1.0 - inner(&u1[0], &u0[0]).norm()).abs();
    }
    let k = u1.len();
    let col_major: Vec<num_complex::Complex64> = (0..k)
        .flat_map(|j| (0..k).map(move |i| (i, j)))
        .map(|(i, j)| inner(&u1[i], &u0[j]))
        .collect();
    match singular_values_rect(k, k, &col_major) {
        Ok(sv) => (1.0 - sv.last().copied().unwrap_or(0.0)).abs(),
        Err(_) => 1.0,
    }
}
