//! Dense complex matrix kernel: arithmetic, Hilbert-Schmidt geometry,
//! Hermitian eigensolver, range projections and joins.

mod eigen;
mod matrix;
mod projection;
mod tolerance;

pub use eigen::{hermitian_eig, inverse_sqrt, HermitianEigen};
pub use matrix::{hs_inner, kron, ComplexMatrix, C64};
pub use projection::{join, range_projection, Projection};
pub use tolerance::Tolerance;

pub(crate) use eigen::{gram_nullspace, gram_of_columns, isometry_deviation, jacobi};
pub(crate) use matrix::{hs_inner_unchecked, ONE, ZERO};

/// Minimum eigenvalue of a Hermitian matrix (after symmetrization).
pub(crate) fn min_eigenvalue(a: &ComplexMatrix) -> f64 {
    jacobi(a.hermitian_part())
        .values
        .last()
        .copied()
        .unwrap_or(0.0)
}

/// `‖X‖ ≤ tol · scale`: the "equals zero" test for product expressions,
/// where `scale` is the product of the operand norms.
pub fn vanishes(x: &ComplexMatrix, scale: f64, tol: Tolerance) -> bool {
    tol.negligible(x.hs_norm(), scale)
}
