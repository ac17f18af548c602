//! Unital *-subalgebras of `M_m`: closure, commutant, matrix levels and
//! compression by a projection.

use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::linalg::{gram_nullspace, range_projection, ComplexMatrix, Projection, Tolerance, C64};
use crate::space::OperatorSpace;

/// A unital *-subalgebra `M ⊆ M_m`, stored as the linear span of its
/// elements. The commutant is computed on first use and cached.
#[derive(Clone, Debug)]
pub struct StarAlgebra {
    dim: usize,
    space: OperatorSpace,
    commutant: Arc<OnceLock<(Tolerance, OperatorSpace)>>,
}

impl StarAlgebra {
    fn from_parts(dim: usize, space: OperatorSpace) -> Self {
        StarAlgebra {
            dim,
            space,
            commutant: Arc::new(OnceLock::new()),
        }
    }

    pub(crate) fn from_trusted(dim: usize, space: OperatorSpace) -> Self {
        Self::from_parts(dim, space)
    }

    /// `M_m`.
    pub fn full(m: usize) -> Self {
        Self::from_parts(m, OperatorSpace::full(m, m))
    }

    /// `D_m`, the diagonal matrices.
    pub fn diagonal(m: usize) -> Self {
        let basis = (0..m).map(|i| ComplexMatrix::unit(m, m, i, i)).collect();
        Self::from_parts(m, OperatorSpace::from_orthonormal(m, m, basis))
    }

    /// `ℂ·I_m`.
    pub fn scalars(m: usize) -> Self {
        let b = ComplexMatrix::identity(m).scale_real(1.0 / (m as f64).sqrt());
        Self::from_parts(m, OperatorSpace::from_orthonormal(m, m, vec![b]))
    }

    /// Smallest unital *-algebra containing the generators: adjoin the
    /// identity and adjoints, then pairwise products, until the dimension
    /// stops growing.
    pub fn closure(m: usize, generators: &[ComplexMatrix], tol: Tolerance) -> Result<Self> {
        for g in generators {
            if !g.is_square() {
                return Err(Error::NotSquare(g.rows(), g.cols()));
            }
            if g.rows() != m {
                return Err(Error::ShapeMismatch {
                    op: "algebra_closure",
                    left: (m, m),
                    right: g.shape(),
                });
            }
        }
        let mut gens = vec![ComplexMatrix::identity(m)];
        for g in generators {
            gens.push(g.clone());
            gens.push(g.adjoint());
        }
        let mut space = OperatorSpace::span(m, m, &gens, tol)?;
        loop {
            let before = space.dim();
            let prod = space.product(&space, tol)?;
            space = space.sum(&prod, tol)?.sum(&prod.adjoint(), tol)?;
            if space.dim() == before {
                break;
            }
        }
        Ok(Self::from_parts(m, space))
    }

    /// Wrap a space after checking it is a unital *-algebra.
    pub fn from_space(space: OperatorSpace, tol: Tolerance) -> Result<Self> {
        let (m, c) = space.shape();
        if m != c {
            return Err(Error::NotSquare(m, c));
        }
        let alg = Self::from_parts(m, space);
        alg.validate(tol)?;
        Ok(alg)
    }

    /// Identity, adjoint and product closure.
    pub fn validate(&self, tol: Tolerance) -> Result<()> {
        let s = &self.space;
        let ok = s.contains(&ComplexMatrix::identity(self.dim), tol)?
            && s.adjoint().is_subspace_of(s, tol)?
            && s.product(s, tol)?.is_subspace_of(s, tol)?;
        if ok {
            Ok(())
        } else {
            Err(Error::NotInAlgebra("closure of the given space"))
        }
    }

    /// Ambient dimension `m`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn space(&self) -> &OperatorSpace {
        &self.space
    }

    pub fn contains(&self, a: &ComplexMatrix, tol: Tolerance) -> Result<bool> {
        self.space.contains(a, tol)
    }

    pub fn equals(&self, other: &StarAlgebra, tol: Tolerance) -> Result<bool> {
        self.space.equals(&other.space, tol)
    }

    /// The commutant `M' = {B : AB = BA for all A ∈ M}`.
    ///
    /// Solves `b_i B - B b_i = 0` for every basis element `b_i` as the
    /// kernel of the Hermitian normal equations of the stacked commutator
    /// operator.
    pub fn commutant(&self, tol: Tolerance) -> StarAlgebra {
        if let Some((t, space)) = self.commutant.get() {
            if *t == tol {
                return Self::from_parts(self.dim, space.clone());
            }
        }
        let space = commutant_space(&self.space, tol);
        let _ = self.commutant.set((tol, space.clone()));
        Self::from_parts(self.dim, space)
    }

    /// Membership in `M_k(M) = M ⊗ M_k`: every block `X^{pq}` of
    /// `A = Σ X^{pq} ⊗ E_pq` must lie in `M`. The aggregated residual is
    /// compared against `‖A‖`.
    pub fn contains_at_level(&self, a: &ComplexMatrix, k: usize, tol: Tolerance) -> Result<bool> {
        Ok(tol.negligible(self.level_residual(a, k)?, a.hs_norm()))
    }

    pub(crate) fn level_residual(&self, a: &ComplexMatrix, k: usize) -> Result<f64> {
        let m = self.dim;
        if !a.is_square() {
            return Err(Error::NotSquare(a.rows(), a.cols()));
        }
        if k == 0 || a.rows() != m * k {
            return Err(Error::LevelMismatch {
                dim: a.rows(),
                base: m,
            });
        }
        let mut sq = 0.0;
        for p in 0..k {
            for q in 0..k {
                let r = self.space.residual(&a.level_block(k, p, q))?;
                sq += r * r;
            }
        }
        Ok(sq.sqrt())
    }

    /// Smallest projection in `M_k(M)` dominating `R`: the range of
    /// `Σ (b ⊗ I_k) R (b ⊗ I_k)*` over a basis `b` of `M'`, i.e. the
    /// `M' ⊗ I_k`-invariant subspace generated by `ran R`.
    pub fn level_support(&self, r: &Projection, k: usize, tol: Tolerance) -> Result<Projection> {
        if k == 0 || r.dim() != self.dim * k {
            return Err(Error::LevelMismatch {
                dim: r.dim(),
                base: self.dim,
            });
        }
        let comm = self.commutant(tol);
        let n = r.dim();
        let mut sum = ComplexMatrix::zeros(n, n);
        for b in comm.space().basis() {
            let bk = b.ampliate(k);
            sum += &(&(&bk * r.matrix()) * &bk.adjoint());
        }
        Ok(range_projection(&sum, tol))
    }

    /// Compression `E M E` represented on `ran E ≅ ℂ^r`.
    ///
    /// `E` must be a projection lying in `M` or commuting with `M`; either
    /// way `E M E` is again a *-algebra.
    pub fn compress(&self, e: &Projection, tol: Tolerance) -> Result<Compression> {
        if e.dim() != self.dim {
            return Err(Error::ShapeMismatch {
                op: "compress",
                left: (self.dim, self.dim),
                right: (e.dim(), e.dim()),
            });
        }
        if e.rank() == 0 {
            return Err(Error::ZeroRank);
        }
        if !self.contains(e.matrix(), tol)? && !self.commutes_with(e.matrix(), tol) {
            return Err(Error::NotInAlgebra("projection"));
        }
        let isometry = e.range_isometry();
        let r = isometry.cols();
        let wa = isometry.adjoint();
        let gens: Vec<ComplexMatrix> = self
            .space
            .basis()
            .iter()
            .map(|b| &(&wa * b) * &isometry)
            .collect();
        let space = OperatorSpace::span_scaled(r, r, &gens, 1.0, tol)?;
        Ok(Compression {
            projection: e.clone(),
            isometry,
            algebra: Self::from_parts(r, space),
        })
    }

    fn commutes_with(&self, x: &ComplexMatrix, tol: Tolerance) -> bool {
        self.space.basis().iter().all(|b| {
            let c = &(b * x) - &(x * b);
            tol.negligible(c.hs_norm(), x.hs_norm())
        })
    }
}

fn commutant_space(space: &OperatorSpace, tol: Tolerance) -> OperatorSpace {
    let m = space.rows();
    let n = m * m;
    // column (k,l) of the stacked operator: [b_i, E_kl] for every i
    let columns: Vec<Vec<C64>> = (0..n)
        .map(|idx| {
            let e = ComplexMatrix::unit(m, m, idx / m, idx % m);
            space
                .basis()
                .iter()
                .flat_map(|b| {
                    let c = &(b * &e) - &(&e * b);
                    c.into_vec()
                })
                .collect()
        })
        .collect();
    let gram = crate::linalg::gram_of_columns(&columns);
    let kernel = gram_nullspace(&gram, tol);
    let basis = kernel
        .into_iter()
        .map(|v| ComplexMatrix::from_vec(m, m, v).expect("kernel vector has m*m entries"))
        .collect();
    OperatorSpace::from_orthonormal(m, m, basis)
}

/// `E M E` carried to `M_r` through the isometry `W` whose columns span
/// `ran E`; `W* X W` compresses and `W Y W*` lifts.
#[derive(Clone, Debug)]
pub struct Compression {
    projection: Projection,
    isometry: ComplexMatrix,
    algebra: StarAlgebra,
}

impl Compression {
    pub fn projection(&self) -> &Projection {
        &self.projection
    }

    /// `m x r` isometry.
    pub fn isometry(&self) -> &ComplexMatrix {
        &self.isometry
    }

    /// The compressed algebra inside `M_r`.
    pub fn algebra(&self) -> &StarAlgebra {
        &self.algebra
    }

    pub fn rank(&self) -> usize {
        self.isometry.cols()
    }

    /// `W* X W`.
    pub fn compress_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let w = &self.isometry;
        w.adjoint().matmul(x)?.matmul(w)
    }

    /// `W Y W*`.
    pub fn lift(&self, y: &ComplexMatrix) -> Result<ComplexMatrix> {
        let w = &self.isometry;
        w.matmul(y)?.matmul(&w.adjoint())
    }

    /// `(W ⊗ I_k)* X (W ⊗ I_k)`.
    pub fn compress_level(&self, x: &ComplexMatrix, k: usize) -> Result<ComplexMatrix> {
        let w = self.isometry.ampliate(k);
        w.adjoint().matmul(x)?.matmul(&w)
    }

    /// `(W ⊗ I_k) Y (W ⊗ I_k)*`.
    pub fn lift_level(&self, y: &ComplexMatrix, k: usize) -> Result<ComplexMatrix> {
        let w = self.isometry.ampliate(k);
        w.matmul(y)?.matmul(&w.adjoint())
    }

    /// Compress every element of a space.
    pub fn compress_space(&self, v: &OperatorSpace, tol: Tolerance) -> Result<OperatorSpace> {
        let gens = v
            .basis()
            .iter()
            .map(|b| self.compress_matrix(b))
            .collect::<Result<Vec<_>>>()?;
        OperatorSpace::span_scaled(self.rank(), self.rank(), &gens, 1.0, tol)
    }

    #[cfg(test)]
    pub(crate) fn isometry_defect(&self) -> f64 {
        crate::linalg::isometry_deviation(&self.isometry)
    }
}

/// `V ⊗ M_k`.
pub fn ampliate(v: &OperatorSpace, k: usize) -> OperatorSpace {
    v.ampliate(k)
}
