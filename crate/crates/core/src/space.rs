//! Operator spaces: linear subspaces of `M_{n,m}` held as Hilbert-Schmidt
//! orthonormal bases.

use crate::error::{Error, Result};
use crate::linalg::{hs_inner_unchecked, ComplexMatrix, Tolerance, C64, ONE};

#[derive(Clone, Debug)]
pub struct OperatorSpace {
    rows: usize,
    cols: usize,
    basis: Vec<ComplexMatrix>,
}

impl OperatorSpace {
    /// The zero subspace of `M_{rows,cols}`.
    pub fn zero(rows: usize, cols: usize) -> Self {
        OperatorSpace {
            rows,
            cols,
            basis: Vec::new(),
        }
    }

    /// All of `M_{rows,cols}`, with the matrix units as basis.
    pub fn full(rows: usize, cols: usize) -> Self {
        let basis = (0..rows)
            .flat_map(|i| (0..cols).map(move |j| (i, j)))
            .map(|(i, j)| ComplexMatrix::unit(rows, cols, i, j))
            .collect();
        OperatorSpace { rows, cols, basis }
    }

    /// Linear span of the generators.
    ///
    /// Modified Gram-Schmidt in input order with one re-orthogonalization
    /// pass; a generator whose residual falls below `rel_eps` times the
    /// largest generator norm is dropped.
    pub fn span(
        rows: usize,
        cols: usize,
        generators: &[ComplexMatrix],
        tol: Tolerance,
    ) -> Result<Self> {
        OperatorSpace::span_scaled(rows, cols, generators, 0.0, tol)
    }

    /// As [`span`](Self::span) with the cutoff taken relative to
    /// `max(scale, largest generator norm)`. Generators derived from
    /// normalized data (compressions, products of orthonormal bases) pass
    /// `scale = 1` so that rounding residue is not promoted to a direction.
    pub fn span_scaled(
        rows: usize,
        cols: usize,
        generators: &[ComplexMatrix],
        scale: f64,
        tol: Tolerance,
    ) -> Result<Self> {
        for g in generators {
            if g.shape() != (rows, cols) {
                return Err(Error::ShapeMismatch {
                    op: "span",
                    left: (rows, cols),
                    right: g.shape(),
                });
            }
        }
        let largest = generators.iter().map(|g| g.hs_norm()).fold(scale, f64::max);
        let mut space = OperatorSpace::zero(rows, cols);
        space.extend_with(generators.iter(), tol.threshold(largest));
        Ok(space)
    }

    /// Orthonormal family taken as-is. Caller guarantees orthonormality.
    pub(crate) fn from_orthonormal(rows: usize, cols: usize, basis: Vec<ComplexMatrix>) -> Self {
        debug_assert!(basis.iter().all(|b| b.shape() == (rows, cols)));
        OperatorSpace { rows, cols, basis }
    }

    fn extend_with<'a>(
        &mut self,
        generators: impl Iterator<Item = &'a ComplexMatrix>,
        cutoff: f64,
    ) {
        let full = self.rows * self.cols;
        for g in generators {
            if self.basis.len() == full {
                break;
            }
            let mut r = g.clone();
            for _ in 0..2 {
                for b in &self.basis {
                    let c = hs_inner_unchecked(b, &r);
                    r.axpy(-c, b);
                }
            }
            let norm = r.hs_norm();
            if norm > cutoff {
                self.basis.push(r.scale_real(1.0 / norm));
            }
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.rows * self.cols
    }

    fn check_shape(&self, op: &'static str, shape: (usize, usize)) -> Result<()> {
        if self.shape() != shape {
            return Err(Error::ShapeMismatch {
                op,
                left: self.shape(),
                right: shape,
            });
        }
        Ok(())
    }

    /// Orthogonal projection of `b` onto the space.
    pub fn project(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_shape("project", b.shape())?;
        let mut p = ComplexMatrix::zeros(self.rows, self.cols);
        for e in &self.basis {
            p.axpy(hs_inner_unchecked(e, b), e);
        }
        Ok(p)
    }

    /// `‖b - proj(b)‖_HS`.
    pub fn residual(&self, b: &ComplexMatrix) -> Result<f64> {
        let p = self.project(b)?;
        Ok((b - &p).hs_norm())
    }

    /// Membership: residual below `rel_eps · max(‖b‖, abs_floor)`.
    pub fn contains(&self, b: &ComplexMatrix, tol: Tolerance) -> Result<bool> {
        let r = self.residual(b)?;
        Ok(tol.negligible(r, b.hs_norm()))
    }

    /// `V* = {A*: A ∈ V}`.
    pub fn adjoint(&self) -> Self {
        OperatorSpace {
            rows: self.cols,
            cols: self.rows,
            basis: self.basis.iter().map(ComplexMatrix::adjoint).collect(),
        }
    }

    /// `VW = span{AB}`.
    pub fn product(&self, other: &OperatorSpace, tol: Tolerance) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                op: "product_space",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let gens: Vec<ComplexMatrix> = self
            .basis
            .iter()
            .flat_map(|a| other.basis.iter().map(move |b| a * b))
            .collect();
        OperatorSpace::span_scaled(self.rows, other.cols, &gens, 1.0, tol)
    }

    /// `V + W`.
    pub fn sum(&self, other: &OperatorSpace, tol: Tolerance) -> Result<Self> {
        self.check_shape("sum_space", other.shape())?;
        let mut space = self.clone();
        space.extend_with(other.basis.iter(), tol.threshold(1.0));
        Ok(space)
    }

    /// Orthogonal complement inside `M_{rows,cols}`.
    ///
    /// Pivoted Gram-Schmidt over the matrix units: at each step the unit
    /// with the largest residual is taken, so every accepted vector has
    /// residual at least `1/sqrt(rows·cols)`.
    pub fn complement(&self) -> Self {
        let (rows, cols) = self.shape();
        let n = rows * cols;
        let target = n - self.dim();
        let mut residuals: Vec<ComplexMatrix> = (0..n)
            .map(|idx| {
                let mut e = ComplexMatrix::unit(rows, cols, idx / cols, idx % cols);
                for b in &self.basis {
                    let c = hs_inner_unchecked(b, &e);
                    e.axpy(-c, b);
                }
                e
            })
            .collect();
        let mut out: Vec<ComplexMatrix> = Vec::with_capacity(target);
        while out.len() < target {
            let (best, norm) = residuals
                .iter()
                .enumerate()
                .map(|(i, r)| (i, r.hs_norm()))
                .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if norm <= 1e-8 {
                break;
            }
            let mut v = residuals[best].clone();
            for b in self.basis.iter().chain(out.iter()) {
                let c = hs_inner_unchecked(b, &v);
                v.axpy(-c, b);
            }
            let v = v.scale_real(1.0 / v.hs_norm());
            for r in residuals.iter_mut() {
                let c = hs_inner_unchecked(&v, r);
                r.axpy(-c, &v);
            }
            out.push(v);
        }
        OperatorSpace::from_orthonormal(rows, cols, out)
    }

    /// `V ∩ W`, computed as the complement of `V⊥ + W⊥`.
    pub fn intersect(&self, other: &OperatorSpace, tol: Tolerance) -> Result<Self> {
        self.check_shape("intersect_space", other.shape())?;
        let perp = self.complement().sum(&other.complement(), tol)?;
        Ok(perp.complement())
    }

    pub fn is_subspace_of(&self, other: &OperatorSpace, tol: Tolerance) -> Result<bool> {
        self.check_shape("is_subspace_of", other.shape())?;
        for b in &self.basis {
            if !other.contains(b, tol)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn equals(&self, other: &OperatorSpace, tol: Tolerance) -> Result<bool> {
        self.check_shape("equals", other.shape())?;
        Ok(self.dim() == other.dim()
            && self.is_subspace_of(other, tol)?
            && other.is_subspace_of(self, tol)?)
    }

    /// First basis element of `self` not contained in `other`.
    pub fn first_escape(
        &self,
        other: &OperatorSpace,
        tol: Tolerance,
    ) -> Result<Option<&ComplexMatrix>> {
        self.check_shape("first_escape", other.shape())?;
        for b in &self.basis {
            if !other.contains(b, tol)? {
                return Ok(Some(b));
            }
        }
        Ok(None)
    }

    /// `V ⊗ M_k = span{b ⊗ E_pq}`.
    pub fn ampliate(&self, k: usize) -> Self {
        let mut basis = Vec::with_capacity(self.dim() * k * k);
        for b in &self.basis {
            for p in 0..k {
                for q in 0..k {
                    basis.push(b.kron(&ComplexMatrix::unit(k, k, p, q)));
                }
            }
        }
        OperatorSpace::from_orthonormal(self.rows * k, self.cols * k, basis)
    }

    /// Linear combination `Σ c_i b_i`.
    pub fn combination(&self, coeffs: &[C64]) -> ComplexMatrix {
        assert_eq!(coeffs.len(), self.dim());
        let mut out = ComplexMatrix::zeros(self.rows, self.cols);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            out.axpy(*c, b);
        }
        out
    }

    /// Largest deviation `|<b_i, b_j> - δ_ij|` of the stored basis.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                let want = if i == j { ONE } else { C64::new(0.0, 0.0) };
                worst = worst.max((hs_inner_unchecked(a, b) - want).norm());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::Sampler;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    /// `[[a, b], [c, a]]`.
    fn v1() -> OperatorSpace {
        OperatorSpace::span(
            2,
            2,
            &[
                ComplexMatrix::identity(2),
                ComplexMatrix::unit(2, 2, 0, 1),
                ComplexMatrix::unit(2, 2, 1, 0),
            ],
            tol(),
        )
        .unwrap()
    }

    /// Numerical rank of a generator Gram matrix by Gaussian elimination
    /// with full pivoting; independent of the Gram-Schmidt path.
    fn gram_rank(gens: &[ComplexMatrix]) -> usize {
        let n = gens.len();
        let mut g: Vec<Vec<C64>> = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| hs_inner_unchecked(&gens[a], &gens[b]))
                    .collect()
            })
            .collect();
        let scale = g.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
        let mut rank = 0;
        let mut used_r = vec![false; n];
        let mut used_c = vec![false; n];
        loop {
            let mut best = (0, 0, 0.0);
            for r in 0..n {
                for c in 0..n {
                    if !used_r[r] && !used_c[c] && g[r][c].norm() > best.2 {
                        best = (r, c, g[r][c].norm());
                    }
                }
            }
            if best.2 <= 1e-10 * scale.max(1e-300) {
                return rank;
            }
            let (pr, pc, _) = best;
            used_r[pr] = true;
            used_c[pc] = true;
            rank += 1;
            for r in 0..n {
                if r != pr {
                    let f = g[r][pc] / g[pr][pc];
                    let pivot = g[pr].clone();
                    for (x, p) in g[r].iter_mut().zip(&pivot) {
                        *x -= f * p;
                    }
                }
            }
        }
    }

    #[test]
    fn span_trivial_cases() {
        let i2 = ComplexMatrix::identity(2);
        let s = OperatorSpace::span(2, 2, &[i2.clone(), i2.scale_real(2.0)], tol()).unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(OperatorSpace::span(2, 2, &[], tol()).unwrap().dim(), 0);
        assert_eq!(v1().dim(), 3);
    }

    #[test]
    fn span_dimension_matches_gram_rank() {
        let mut s = Sampler::new(31);
        for trial in 0..20 {
            let k = 1 + trial % 4;
            let base: Vec<ComplexMatrix> = (0..k).map(|_| s.matrix(3, 2)).collect();
            let mut gens = base.clone();
            // dependent extras
            gens.push(&base[0].scale_real(2.0) + &base[k - 1]);
            gens.push(ComplexMatrix::zeros(3, 2));
            let sp = OperatorSpace::span(3, 2, &gens, tol()).unwrap();
            assert_eq!(sp.dim(), gram_rank(&gens));
            assert!(sp.orthonormality_defect() < 1e-12);
        }
    }

    #[test]
    fn span_rejects_shape_mismatch() {
        let r = OperatorSpace::span(2, 2, &[ComplexMatrix::zeros(2, 3)], tol());
        assert!(matches!(r, Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn membership() {
        let i2 = ComplexMatrix::identity(2);
        let s = OperatorSpace::span(2, 2, std::slice::from_ref(&i2), tol()).unwrap();
        assert!(s.contains(&i2, tol()).unwrap());
        let z = ComplexMatrix::diag_real(&[1.0, -1.0]);
        // residual of diag(1,-1) against V1: it is HS-orthogonal to I, E01, E10
        let r = v1().residual(&z).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
        assert!(!v1().contains(&z, tol()).unwrap());
        assert!(v1()
            .contains(&ComplexMatrix::unit(2, 2, 0, 1), tol())
            .unwrap());
        assert!(v1().contains(&ComplexMatrix::zeros(2, 2), tol()).unwrap());
    }

    #[test]
    fn adjoints() {
        let e01 = OperatorSpace::span(2, 2, &[ComplexMatrix::unit(2, 2, 0, 1)], tol()).unwrap();
        let e10 = OperatorSpace::span(2, 2, &[ComplexMatrix::unit(2, 2, 1, 0)], tol()).unwrap();
        assert!(e01.adjoint().equals(&e10, tol()).unwrap());
        assert!(v1().adjoint().equals(&v1(), tol()).unwrap());
        let mut s = Sampler::new(1);
        let v = s.space(3, 3, 4, tol());
        assert!(v.adjoint().adjoint().equals(&v, tol()).unwrap());
        let r = s.space(2, 3, 3, tol());
        assert_eq!(r.adjoint().shape(), (3, 2));
        assert_eq!(r.adjoint().dim(), 3);
    }

    #[test]
    fn products() {
        let mut s = Sampler::new(2);
        let w = s.space(3, 3, 4, tol());
        let scalars = OperatorSpace::span(3, 3, &[ComplexMatrix::identity(3)], tol()).unwrap();
        assert!(scalars
            .product(&w, tol())
            .unwrap()
            .equals(&w, tol())
            .unwrap());

        let e01 = OperatorSpace::span(2, 2, &[ComplexMatrix::unit(2, 2, 0, 1)], tol()).unwrap();
        let e10 = OperatorSpace::span(2, 2, &[ComplexMatrix::unit(2, 2, 1, 0)], tol()).unwrap();
        let e00 = OperatorSpace::span(2, 2, &[ComplexMatrix::unit(2, 2, 0, 0)], tol()).unwrap();
        assert!(e01
            .product(&e10, tol())
            .unwrap()
            .equals(&e00, tol())
            .unwrap());

        // brute force: nine pairwise products of the V1 generators
        let g = [
            ComplexMatrix::identity(2),
            ComplexMatrix::unit(2, 2, 0, 1),
            ComplexMatrix::unit(2, 2, 1, 0),
        ];
        let prods: Vec<ComplexMatrix> = g
            .iter()
            .flat_map(|a| g.iter().map(move |b| a * b))
            .collect();
        assert_eq!(gram_rank(&prods), 4);
        let sq = v1().product(&v1(), tol()).unwrap();
        assert!(sq.is_full());

        let bad = OperatorSpace::full(2, 3).product(&OperatorSpace::full(2, 3), tol());
        assert!(bad.is_err());
    }

    #[test]
    fn product_adjoint_reverses() {
        let mut s = Sampler::new(3);
        for _ in 0..10 {
            let v = s.space(3, 2, 2, tol());
            let w = s.space(2, 3, 2, tol());
            let lhs = v.product(&w, tol()).unwrap().adjoint();
            let rhs = w.adjoint().product(&v.adjoint(), tol()).unwrap();
            assert!(lhs.equals(&rhs, tol()).unwrap());
        }
    }

    #[test]
    fn sums_and_intersections() {
        let mut s = Sampler::new(4);
        let v = s.space(2, 2, 3, tol());
        assert!(v.intersect(&v, tol()).unwrap().equals(&v, tol()).unwrap());

        let a = OperatorSpace::span(2, 2, &[ComplexMatrix::unit(2, 2, 0, 0)], tol()).unwrap();
        let b = OperatorSpace::span(2, 2, &[ComplexMatrix::unit(2, 2, 1, 1)], tol()).unwrap();
        assert_eq!(a.intersect(&b, tol()).unwrap().dim(), 0);

        let both = v1().intersect(&v1().adjoint(), tol()).unwrap();
        assert!(both.equals(&v1(), tol()).unwrap());

        for _ in 0..20 {
            let n = 3;
            let dv = s.index(n * n + 1);
            let dw = s.index(n * n + 1);
            // share a random common part so intersections are nontrivial
            let common: Vec<ComplexMatrix> = (0..s.index(3)).map(|_| s.matrix(n, n)).collect();
            let mut gv = common.clone();
            gv.extend((0..dv).map(|_| s.matrix(n, n)));
            let mut gw = common;
            gw.extend((0..dw).map(|_| s.matrix(n, n)));
            let v = OperatorSpace::span(n, n, &gv, tol()).unwrap();
            let w = OperatorSpace::span(n, n, &gw, tol()).unwrap();
            let sum = v.sum(&w, tol()).unwrap();
            let cap = v.intersect(&w, tol()).unwrap();
            assert_eq!(sum.dim() + cap.dim(), v.dim() + w.dim());
            assert!(cap.is_subspace_of(&v, tol()).unwrap());
            assert!(cap.is_subspace_of(&w, tol()).unwrap());
        }
    }

    #[test]
    fn complement_membership() {
        let mut s = Sampler::new(5);
        let v = s.space(3, 3, 4, tol());
        for b in v.basis() {
            assert!(v.contains(b, tol()).unwrap());
        }
        let coeffs: Vec<C64> = (0..v.dim()).map(|_| s.complex()).collect();
        assert!(v.contains(&v.combination(&coeffs), tol()).unwrap());
        let perp = v.complement();
        assert_eq!(perp.dim(), 5);
        for b in perp.basis() {
            assert!(!v.contains(b, tol()).unwrap());
        }
        assert!(perp.orthonormality_defect() < 1e-12);
    }

    #[test]
    fn equality_and_inclusion() {
        let v = v1();
        assert!(v.equals(&v, tol()).unwrap());
        let scalars = OperatorSpace::span(2, 2, &[ComplexMatrix::identity(2)], tol()).unwrap();
        assert!(scalars.is_subspace_of(&v, tol()).unwrap());
        assert!(!v.equals(&OperatorSpace::full(2, 2), tol()).unwrap());
        assert!(v.is_subspace_of(&OperatorSpace::full(2, 2), tol()).unwrap());
        assert!(v.equals(&OperatorSpace::full(3, 3), tol()).is_err());
    }

    #[test]
    fn ampliation_dimension() {
        let mut s = Sampler::new(6);
        let v = s.space(3, 3, 2, tol());
        assert!(v.ampliate(1).equals(&v, tol()).unwrap());
        assert_eq!(v1().ampliate(2).dim(), 12);
        assert!(v1().ampliate(2).orthonormality_defect() < 1e-14);
    }
}
