use super::eigen::{hermitian_eig, jacobi, HermitianEigen};
use super::matrix::ComplexMatrix;
use super::tolerance::Tolerance;
use crate::error::{Error, Result};

/// Orthogonal projection `P = P² = P*` with its rank.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    matrix: ComplexMatrix,
    rank: usize,
}

impl Projection {
    /// Validates `‖P - P*‖` and `‖P² - P‖` against the tolerance.
    pub fn new(matrix: ComplexMatrix, tol: Tolerance) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare(matrix.rows(), matrix.cols()));
        }
        let scale = matrix.hs_norm().max(1.0);
        let herm = matrix.hermitian_deviation();
        let idem = (&(&matrix * &matrix) - &matrix).hs_norm();
        let dev = herm.max(idem);
        if !tol.negligible(dev, scale) {
            return Err(Error::NotProjection(dev));
        }
        let eig = hermitian_eig(&matrix, tol)?;
        let rank = eig.values.iter().filter(|&&l| l > 0.5).count();
        Ok(Projection { matrix, rank })
    }

    /// Projection assembled from an eigenbasis: sum of `v v*` over the
    /// selected eigenvectors.
    pub(crate) fn from_eigenvectors(eig: &HermitianEigen, selected: &[usize]) -> Self {
        let n = eig.vectors.rows();
        let mut matrix = ComplexMatrix::zeros(n, n);
        for &k in selected {
            for i in 0..n {
                let vi = eig.vectors[(i, k)];
                for j in 0..n {
                    matrix[(i, j)] += vi * eig.vectors[(j, k)].conj();
                }
            }
        }
        Projection {
            matrix,
            rank: selected.len(),
        }
    }

    /// Projection `W W*` onto the span of orthonormal columns.
    pub fn from_isometry(w: &ComplexMatrix) -> Self {
        Projection {
            matrix: w * &w.adjoint(),
            rank: w.cols(),
        }
    }

    pub fn zero(n: usize) -> Self {
        Projection {
            matrix: ComplexMatrix::zeros(n, n),
            rank: 0,
        }
    }

    pub fn identity(n: usize) -> Self {
        Projection {
            matrix: ComplexMatrix::identity(n),
            rank: n,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `I - P`.
    pub fn complement(&self) -> Self {
        let n = self.dim();
        Projection {
            matrix: &ComplexMatrix::identity(n) - &self.matrix,
            rank: n - self.rank,
        }
    }

    /// `P ⊗ I_k`.
    pub fn ampliate(&self, k: usize) -> Self {
        Projection {
            matrix: self.matrix.ampliate(k),
            rank: self.rank * k,
        }
    }

    /// `P ≤ Q`, i.e. `QP = P`.
    pub fn is_below(&self, other: &Projection, tol: Tolerance) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let dev = (&(&other.matrix * &self.matrix) - &self.matrix).hs_norm();
        tol.negligible(dev, self.matrix.hs_norm().max(1.0))
    }

    /// Same projection within tolerance.
    pub fn approx_eq(&self, other: &Projection, tol: Tolerance) -> bool {
        self.dim() == other.dim()
            && self.rank == other.rank
            && tol.negligible(
                (&self.matrix - &other.matrix).hs_norm(),
                self.matrix.hs_norm().max(1.0),
            )
    }

    /// Orthonormal basis of the range, as the columns of an isometry.
    /// Columns are eigenvectors with eigenvalue one, in descending
    /// eigenvalue order (ties by index).
    pub fn range_isometry(&self) -> ComplexMatrix {
        let eig = jacobi(self.matrix.hermitian_part());
        let n = self.dim();
        ComplexMatrix::from_fn(n, self.rank, |i, j| eig.vectors[(i, j)])
    }
}

/// Range projection `[A]`.
///
/// Hermitian input is decomposed directly; anything else (including
/// rectangular matrices) goes through `[A A*]`. An eigenvalue `λ` counts
/// when `|λ| > rel_eps · max(λ_max, abs_floor)`.
pub fn range_projection(a: &ComplexMatrix, tol: Tolerance) -> Projection {
    let herm = a.is_square() && tol.negligible(a.hermitian_deviation(), a.hs_norm());
    let eig = if herm {
        jacobi(a.hermitian_part())
    } else {
        jacobi((a * &a.adjoint()).hermitian_part())
    };
    let cutoff = tol.rank_cutoff(eig.max_abs_value());
    let selected: Vec<usize> = (0..eig.values.len())
        .filter(|&k| eig.values[k].abs() > cutoff)
        .collect();
    Projection::from_eigenvectors(&eig, &selected)
}

/// Smallest projection dominating every input: `[Σ P_i]`.
pub fn join(projections: &[Projection], tol: Tolerance) -> Result<Projection> {
    let first = projections.first().ok_or(Error::EmptyJoin)?;
    let n = first.dim();
    let mut sum = ComplexMatrix::zeros(n, n);
    for p in projections {
        if p.dim() != n {
            return Err(Error::ShapeMismatch {
                op: "join",
                left: (n, n),
                right: (p.dim(), p.dim()),
            });
        }
        sum += p.matrix();
    }
    Ok(range_projection(&sum, tol))
}
