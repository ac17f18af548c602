//! Cyclic Jacobi eigensolver for small dense Hermitian matrices.

use super::matrix::{ComplexMatrix, C64, ZERO};
use super::tolerance::Tolerance;
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition `A = V diag(values) V*` with values sorted descending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the eigenvectors.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, j: usize) -> Vec<C64> {
        self.vectors.column_vec(j)
    }

    pub fn max_abs_value(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// `V diag(f(λ)) V*`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lambda) in self.values.iter().enumerate() {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vi * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }
}

/// Eigen-decomposition of a Hermitian matrix.
///
/// Fails when `‖A - A*‖_HS` exceeds the tolerance threshold relative to `‖A‖_HS`.
pub fn hermitian_eig(a: &ComplexMatrix, tol: Tolerance) -> Result<HermitianEigen> {
    if !a.is_square() {
        return Err(Error::NotSquare(a.rows(), a.cols()));
    }
    let dev = a.hermitian_deviation();
    if !tol.negligible(dev, a.hs_norm()) {
        return Err(Error::NotHermitian(dev));
    }
    Ok(jacobi(a.hermitian_part()))
}

/// Jacobi on a matrix already known to be Hermitian.
pub(crate) fn jacobi(mut a: ComplexMatrix) -> HermitianEigen {
    let n = a.rows();
    let mut v = ComplexMatrix::identity(n);
    let total = a.hs_norm_sqr();

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum();
        if off <= 1e-30 * total || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    // stable: ties keep index order
    order.sort_by(|&x, &y| {
        diag[y]
            .partial_cmp(&diag[x])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    HermitianEigen { values, vectors }
}

/// Annihilate `a[p][q]` with a unitary `G = diag-phase · real rotation`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    if r < 1e-300 || r <= 1e-18 * (app.abs() + aqq.abs()) {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return;
    }
    // phase making the pivot real and positive after the column scaling
    let phase = apq / r; // e^{iθ}
    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // G restricted to (p, q):
    //   G_pp = c,              G_pq = s
    //   G_qp = -s e^{-iθ},     G_qq = c e^{-iθ}
    let ph = phase.conj();
    let gpp = C64::new(c, 0.0);
    let gpq = C64::new(s, 0.0);
    let gqp = ph * (-s);
    let gqq = ph * c;

    let n = a.rows();
    // A <- A G
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * gpp + akq * gqp;
        a[(k, q)] = akp * gpq + akq * gqq;
    }
    // A <- G* A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = gpp.conj() * apk + gqp.conj() * aqk;
        a[(q, k)] = gpq.conj() * apk + gqq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
    // V <- V G
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * gpp + vkq * gqp;
        v[(k, q)] = vkp * gpq + vkq * gqq;
    }
}

/// Orthonormal basis of the kernel of a Hermitian positive semidefinite
/// Gram matrix `G = L* L`, i.e. of the linear map `L`. Columns of the
/// result span the kernel.
pub(crate) fn gram_nullspace(gram: &ComplexMatrix, tol: Tolerance) -> Vec<Vec<C64>> {
    let eig = jacobi(gram.hermitian_part());
    let cutoff = tol.rank_cutoff(eig.max_abs_value());
    let n = gram.rows();
    (0..n)
        .filter(|&j| eig.values[j] <= cutoff)
        .map(|j| eig.vector(j))
        .collect()
}

/// Gram matrix `G[a][b] = <col_a, col_b>` of a family of vectors (the
/// columns of a linear map).
pub(crate) fn gram_of_columns(columns: &[Vec<C64>]) -> ComplexMatrix {
    let n = columns.len();
    let mut g = ComplexMatrix::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let z: C64 = columns[a]
                .iter()
                .zip(&columns[b])
                .map(|(x, y)| x.conj() * y)
                .sum();
            g[(a, b)] = z;
            g[(b, a)] = z.conj();
        }
    }
    g
}

/// Inverse square root of a positive definite matrix.
pub fn inverse_sqrt(a: &ComplexMatrix, tol: Tolerance) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(a, tol)?;
    let min = eig.values.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= tol.rank_cutoff(eig.max_abs_value()) {
        return Err(Error::NotPositive(min));
    }
    Ok(eig.map_values(|l| 1.0 / l.sqrt()))
}

/// `V*V - I` deviation for a matrix meant to have orthonormal columns.
pub(crate) fn isometry_deviation(w: &ComplexMatrix) -> f64 {
    let g = &w.adjoint() * w;
    (&g - &ComplexMatrix::identity(w.cols())).hs_norm()
}
