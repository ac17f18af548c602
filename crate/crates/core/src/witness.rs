//! Separating witnesses for `B ∉ V` and recovery of `V` from them.

use crate::error::{Error, Result};
use crate::linalg::{
    gram_nullspace, gram_of_columns, range_projection, ComplexMatrix, Projection, Tolerance, C64,
    ZERO,
};
use crate::relation::QuantumRelation;
use crate::space::OperatorSpace;

/// Vectors with `⟨α|(A ⊗ I_k)|β⟩ = Tr(A C)` vanishing on `V` but not at `B`.
#[derive(Clone, Debug)]
pub struct WitnessVectors {
    pub k: usize,
    pub alpha: Vec<C64>,
    pub beta: Vec<C64>,
    /// The functional `A ↦ Tr(A C)`.
    pub dual: ComplexMatrix,
}

impl WitnessVectors {
    /// `⟨α|(A ⊗ I_k)|β⟩`.
    pub fn pairing(&self, a: &ComplexMatrix) -> C64 {
        let v = a.ampliate(self.k).apply(&self.beta);
        self.alpha.iter().zip(&v).map(|(x, y)| x.conj() * y).sum()
    }
}

/// Projections in `M_k(M)` with `P (A ⊗ I_k) Q = 0` on `V` but not at `B`.
#[derive(Clone, Debug)]
pub struct WitnessProjections {
    pub k: usize,
    pub p: Projection,
    pub q: Projection,
}

impl WitnessProjections {
    /// `‖P (A ⊗ I_k) Q‖`.
    pub fn evaluate(&self, a: &ComplexMatrix) -> f64 {
        (&(self.p.matrix() * &a.ampliate(self.k)) * self.q.matrix()).hs_norm()
    }
}

fn check_square_space(v: &OperatorSpace, b: &ComplexMatrix) -> Result<usize> {
    let (m, c) = v.shape();
    if m != c {
        return Err(Error::NotSquare(m, c));
    }
    if b.shape() != (m, m) {
        return Err(Error::ShapeMismatch {
            op: "witness",
            left: (m, m),
            right: b.shape(),
        });
    }
    Ok(m)
}

/// The dual element `C`: `(B - proj_V B)*` normalized, which satisfies
/// `Tr(A C) = ⟨D, A⟩ = 0` on `V` and `Tr(B C) = ‖D‖`. If the check fails
/// numerically, solve `Tr(b C) = 0` over the basis directly.
fn dual_element(v: &OperatorSpace, b: &ComplexMatrix, tol: Tolerance) -> Result<ComplexMatrix> {
    let d = b - &v.project(b)?;
    let norm = d.hs_norm();
    let c = d.adjoint().scale_real(1.0 / norm);
    let vanishes = v
        .basis()
        .iter()
        .all(|a| tol.negligible((a * &c).trace().norm(), 1.0));
    if vanishes && !tol.negligible((b * &c).trace().norm(), b.hs_norm()) {
        return Ok(c);
    }
    solve_dual(v, b, tol)
}

/// Kernel of `C ↦ (Tr(b_i C))_i`, picking the kernel vector with the
/// largest `|Tr(B C)|`.
fn solve_dual(v: &OperatorSpace, b: &ComplexMatrix, tol: Tolerance) -> Result<ComplexMatrix> {
    // C ↦ (Tr(b_i C))_i as a linear map on the entries of C
    let m = b.rows();
    let columns: Vec<Vec<C64>> = (0..m * m)
        .map(|idx| {
            let (r, s) = (idx / m, idx % m);
            // Tr(b E_rs) = b[s, r]
            v.basis().iter().map(|a| a[(s, r)]).collect()
        })
        .collect();
    let kernel = gram_nullspace(&gram_of_columns(&columns), tol);
    kernel
        .into_iter()
        .map(|x| ComplexMatrix::from_vec(m, m, x).expect("m*m entries"))
        .max_by(|x, y| {
            let fx = (b * x).trace().norm();
            let fy = (b * y).trace().norm();
            fx.partial_cmp(&fy).unwrap_or(std::cmp::Ordering::Equal)
        })
        .ok_or(Error::InSpace)
}

/// `k = m`, `α = Σ e_i ⊗ e_i`, `β = Σ e_i ⊗ c_i` with `c_i` the rows of `C`
/// laid out so that `⟨α|(A ⊗ I)|β⟩ = Tr(A C)`.
pub fn separate_vectors(
    v: &OperatorSpace,
    b: &ComplexMatrix,
    tol: Tolerance,
) -> Result<WitnessVectors> {
    let m = check_square_space(v, b)?;
    if v.contains(b, tol)? {
        return Err(Error::InSpace);
    }
    let c = dual_element(v, b, tol)?;
    let mut alpha = vec![ZERO; m * m];
    let mut beta = vec![ZERO; m * m];
    for i in 0..m {
        alpha[i * m + i] = C64::new(1.0, 0.0);
        for p in 0..m {
            beta[i * m + p] = c[(i, p)];
        }
    }
    Ok(WitnessVectors {
        k: m,
        alpha,
        beta,
        dual: c,
    })
}

/// Projections onto the `M' ⊗ I_m` orbits of the witness vectors.
pub fn separate_projections(
    v: &QuantumRelation,
    b: &ComplexMatrix,
    tol: Tolerance,
) -> Result<WitnessProjections> {
    let w = separate_vectors(v.space(), b, tol)?;
    let m = v.dim();
    let comm = v.algebra().commutant(tol);
    let orbit = |x: &[C64]| {
        let cols: Vec<Vec<C64>> = comm
            .space()
            .basis()
            .iter()
            .map(|c| c.ampliate(m).apply(x))
            .collect();
        range_projection(&ComplexMatrix::from_columns(m * m, &cols), tol)
    };
    let p = orbit(&w.alpha);
    let q = orbit(&w.beta);
    for x in [&p, &q] {
        if !v.algebra().contains_at_level(x.matrix(), m, tol)? {
            return Err(Error::NotInAlgebra("witness projection"));
        }
    }
    Ok(WitnessProjections { k: m, p, q })
}

/// `{A : P_b (A ⊗ I_m) Q_b = 0 for every witness}`, one witness per basis
/// element of the orthogonal complement of `V`.
pub fn recover_space(v: &QuantumRelation, tol: Tolerance) -> Result<OperatorSpace> {
    let m = v.dim();
    let complement = v.space().complement();
    if complement.dim() == 0 {
        return Ok(OperatorSpace::full(m, m));
    }
    let witnesses = complement
        .basis()
        .iter()
        .map(|b| separate_projections(v, b, tol))
        .collect::<Result<Vec<_>>>()?;
    let columns: Vec<Vec<C64>> = (0..m * m)
        .map(|idx| {
            let e = ComplexMatrix::unit(m, m, idx / m, idx % m).ampliate(m);
            witnesses
                .iter()
                .flat_map(|w| (&(w.p.matrix() * &e) * w.q.matrix()).into_vec())
                .collect()
        })
        .collect();
    let kernel = gram_nullspace(&gram_of_columns(&columns), tol);
    let basis = kernel
        .into_iter()
        .map(|x| ComplexMatrix::from_vec(m, m, x).expect("m*m entries"))
        .collect();
    Ok(OperatorSpace::from_orthonormal(m, m, basis))
}
