//! Quantum relations: `M'`-`M'` bimodules `V ⊆ M_m` over a *-algebra `M`.

use crate::algebra::{Compression, StarAlgebra};
use crate::classical::ClassicalRelation;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Projection, Tolerance};
use crate::space::OperatorSpace;

#[derive(Clone, Debug)]
pub struct QuantumRelation {
    algebra: StarAlgebra,
    space: OperatorSpace,
}

/// The four flags of a relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RelationProperties {
    pub reflexive: bool,
    pub symmetric: bool,
    pub antisymmetric: bool,
    pub transitive: bool,
}

impl QuantumRelation {
    /// Checks `M' V M' ⊆ V`.
    pub fn new(algebra: StarAlgebra, space: OperatorSpace, tol: Tolerance) -> Result<Self> {
        let m = algebra.dim();
        if space.shape() != (m, m) {
            return Err(Error::ShapeMismatch {
                op: "relation",
                left: (m, m),
                right: space.shape(),
            });
        }
        if !is_bimodule(&algebra, &space, tol)? {
            return Err(Error::NotBimodule);
        }
        Ok(QuantumRelation { algebra, space })
    }

    pub(crate) fn from_trusted(algebra: StarAlgebra, space: OperatorSpace) -> Self {
        QuantumRelation { algebra, space }
    }

    pub fn algebra(&self) -> &StarAlgebra {
        &self.algebra
    }

    pub fn space(&self) -> &OperatorSpace {
        &self.space
    }

    /// Ambient dimension `m`.
    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    /// Same algebra, same space.
    pub fn equals(&self, other: &QuantumRelation, tol: Tolerance) -> Result<bool> {
        Ok(self.algebra.equals(&other.algebra, tol)? && self.space.equals(&other.space, tol)?)
    }

    pub fn properties(&self, tol: Tolerance) -> Result<RelationProperties> {
        let v = &self.space;
        let diag = self.algebra.commutant(tol);
        let adj = v.adjoint();
        Ok(RelationProperties {
            reflexive: diag.space().is_subspace_of(v, tol)?,
            symmetric: adj.equals(v, tol)?,
            antisymmetric: v.intersect(&adj, tol)?.is_subspace_of(diag.space(), tol)?,
            transitive: v.product(v, tol)?.is_subspace_of(v, tol)?,
        })
    }

    /// Reflexive and symmetric.
    pub fn is_quantum_graph(&self, tol: Tolerance) -> Result<bool> {
        let diag = self.algebra.commutant(tol);
        Ok(diag.space().is_subspace_of(&self.space, tol)?
            && self.space.adjoint().equals(&self.space, tol)?)
    }

    /// `P (A ⊗ I_k) Q ≠ 0` for some `A ∈ V`.
    ///
    /// `P` and `Q` must lie in `M_k(M)`. By linearity it suffices to test
    /// the basis; a basis element counts when `‖P (b ⊗ I_k) Q‖` exceeds
    /// `rel_eps · ‖P‖ ‖Q‖ ‖b ⊗ I_k‖`.
    pub fn connects(
        &self,
        p: &Projection,
        q: &Projection,
        k: usize,
        tol: Tolerance,
    ) -> Result<bool> {
        for x in [p, q] {
            if !self.algebra.contains_at_level(x.matrix(), k, tol)? {
                return Err(Error::NotInAlgebra("projection at matrix level k"));
            }
        }
        let strength = self.connection_strength(p, q, k)?;
        Ok(!tol.negligible(strength, 1.0))
    }

    /// `max_b ‖P (b ⊗ I_k) Q‖ / (‖P‖ ‖Q‖ √k)` over the orthonormal basis,
    /// without checking that `P` and `Q` lie in `M_k(M)`. Zero when either
    /// projection is zero.
    pub fn connection_strength(&self, p: &Projection, q: &Projection, k: usize) -> Result<f64> {
        let m = self.dim();
        for x in [p, q] {
            if k == 0 || x.dim() != m * k {
                return Err(Error::LevelMismatch {
                    dim: x.dim(),
                    base: m,
                });
            }
        }
        let scale = p.matrix().hs_norm() * q.matrix().hs_norm() * (k as f64).sqrt();
        if scale == 0.0 {
            return Ok(0.0);
        }
        let mut best: f64 = 0.0;
        for b in self.space.basis() {
            let x = &(p.matrix() * &b.ampliate(k)) * q.matrix();
            best = best.max(x.hs_norm() / scale);
        }
        Ok(best)
    }

    /// `E V E` as a relation on the compressed algebra `E M E ⊆ M_r`.
    pub fn restrict(&self, e: &Projection, tol: Tolerance) -> Result<Restriction> {
        if e.dim() != self.dim() {
            return Err(Error::ShapeMismatch {
                op: "restrict",
                left: (self.dim(), self.dim()),
                right: (e.dim(), e.dim()),
            });
        }
        if !self.algebra.contains(e.matrix(), tol)? {
            return Err(Error::NotInAlgebra("projection"));
        }
        let compression = self.algebra.compress(e, tol)?;
        let space = compression.compress_space(&self.space, tol)?;
        let relation = QuantumRelation::from_trusted(compression.algebra().clone(), space);
        Ok(Restriction {
            relation,
            compression,
        })
    }

    /// The restriction to `E M E` is the diagonal relation there.
    pub fn is_independent(&self, e: &Projection, tol: Tolerance) -> Result<bool> {
        if !self.is_quantum_graph(tol)? {
            return Err(Error::NotQuantumGraph);
        }
        let r = self.restrict(e, tol)?;
        let diag = r.relation.algebra.commutant(tol);
        r.relation.space.equals(diag.space(), tol)
    }
}

/// Result of `restrict`: the compressed relation plus the compression that
/// maps between `M_m` and `M_r`.
#[derive(Clone, Debug)]
pub struct Restriction {
    relation: QuantumRelation,
    compression: Compression,
}

impl Restriction {
    pub fn relation(&self) -> &QuantumRelation {
        &self.relation
    }

    pub fn into_relation(self) -> QuantumRelation {
        self.relation
    }

    pub fn compression(&self) -> &Compression {
        &self.compression
    }

    /// `E V E` inside `M_m`.
    pub fn uncompressed(&self, tol: Tolerance) -> Result<OperatorSpace> {
        let m = self.compression.isometry().rows();
        let gens = self
            .relation
            .space
            .basis()
            .iter()
            .map(|b| self.compression.lift(b))
            .collect::<Result<Vec<_>>>()?;
        OperatorSpace::span_scaled(m, m, &gens, 1.0, tol)
    }
}

/// `C' V C' ⊆ V` for `C'` the commutant; `I ∈ M'` reduces this to one-sided
/// products against a basis.
pub fn is_bimodule(algebra: &StarAlgebra, space: &OperatorSpace, tol: Tolerance) -> Result<bool> {
    let comm = algebra.commutant(tol);
    for c in comm.space().basis() {
        for b in space.basis() {
            if !space.contains(&(c * b), tol)? || !space.contains(&(b * c), tol)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The diagonal relation `M'`.
pub fn diagonal_relation(algebra: &StarAlgebra, tol: Tolerance) -> QuantumRelation {
    let comm = algebra.commutant(tol);
    QuantumRelation::from_trusted(algebra.clone(), comm.space().clone())
}

/// `span{B₁ g B₂ : B₁, B₂ ∈ M', g ∈ gens}`.
///
/// Built in two one-sided passes, left then right; both sides range over a
/// basis of `M'`, which is product closed.
pub fn bimodule_closure(
    gens: &[ComplexMatrix],
    algebra: &StarAlgebra,
    tol: Tolerance,
) -> Result<QuantumRelation> {
    let m = algebra.dim();
    let seed = OperatorSpace::span(m, m, gens, tol)?;
    let comm = algebra.commutant(tol);
    let cb = comm.space().basis();
    let left: Vec<ComplexMatrix> = cb
        .iter()
        .flat_map(|c| seed.basis().iter().map(move |g| c * g))
        .collect();
    let left = OperatorSpace::span_scaled(m, m, &left, 1.0, tol)?;
    let both: Vec<ComplexMatrix> = left
        .basis()
        .iter()
        .flat_map(|g| cb.iter().map(move |c| g * c))
        .collect();
    let space = OperatorSpace::span_scaled(m, m, &both, 1.0, tol)?;
    Ok(QuantumRelation::from_trusted(algebra.clone(), space))
}

/// `V_R = span{E_ij : (i, j) ∈ R}` over `D_m`.
pub fn classical_to_quantum(r: &ClassicalRelation) -> QuantumRelation {
    let m = r.size();
    let basis = r
        .pairs()
        .map(|(i, j)| ComplexMatrix::unit(m, m, i, j))
        .collect();
    QuantumRelation::from_trusted(
        StarAlgebra::diagonal(m),
        OperatorSpace::from_orthonormal(m, m, basis),
    )
}

/// `R = {(i, j) : E_ij ∈ V}` for a `D_m`-bimodule `V`.
pub fn quantum_to_classical(v: &QuantumRelation, tol: Tolerance) -> Result<ClassicalRelation> {
    let m = v.dim();
    let diag = StarAlgebra::diagonal(m);
    if !is_bimodule(&diag, v.space(), tol)? {
        return Err(Error::NotBimodule);
    }
    let mut pairs = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if v.space().contains(&ComplexMatrix::unit(m, m, i, j), tol)? {
                pairs.push((i, j));
            }
        }
    }
    ClassicalRelation::new(m, pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{join, range_projection, C64};
    use crate::random::Sampler;
    use proptest::prelude::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn v1() -> QuantumRelation {
        let gens = [
            ComplexMatrix::identity(2),
            ComplexMatrix::unit(2, 2, 0, 1),
            ComplexMatrix::unit(2, 2, 1, 0),
        ];
        let space = OperatorSpace::span(2, 2, &gens, tol()).unwrap();
        QuantumRelation::new(StarAlgebra::full(2), space, tol()).unwrap()
    }

    fn coord_projection(m: usize, subset: &[usize]) -> Projection {
        let d: Vec<f64> = (0..m)
            .map(|i| if subset.contains(&i) { 1.0 } else { 0.0 })
            .collect();
        Projection::new(ComplexMatrix::diag_real(&d), tol()).unwrap()
    }

    #[test]
    fn diagonal_examples() {
        let d = diagonal_relation(&StarAlgebra::full(3), tol());
        assert!(d
            .space()
            .equals(StarAlgebra::scalars(3).space(), tol())
            .unwrap());
        let d = diagonal_relation(&StarAlgebra::diagonal(3), tol());
        assert!(d
            .space()
            .equals(StarAlgebra::diagonal(3).space(), tol())
            .unwrap());
        let mut s = Sampler::new(50);
        for _ in 0..10 {
            let alg = s.algebra(3, tol());
            let p = diagonal_relation(&alg, tol()).properties(tol()).unwrap();
            assert!(p.reflexive && p.symmetric && p.antisymmetric && p.transitive);
        }
    }

    #[test]
    fn v1_flags() {
        let p = v1().properties(tol()).unwrap();
        assert_eq!(
            p,
            RelationProperties {
                reflexive: true,
                symmetric: true,
                antisymmetric: false,
                transitive: false
            }
        );
    }

    #[test]
    fn quantum_graph_examples() {
        let x = ComplexMatrix::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let sys = OperatorSpace::span(2, 2, &[ComplexMatrix::identity(2), x], tol()).unwrap();
        let v = QuantumRelation::new(StarAlgebra::full(2), sys, tol()).unwrap();
        assert!(v.is_quantum_graph(tol()).unwrap());
        let e01 = OperatorSpace::span(2, 2, &[ComplexMatrix::unit(2, 2, 0, 1)], tol()).unwrap();
        let v = QuantumRelation::new(StarAlgebra::full(2), e01, tol()).unwrap();
        assert!(!v.is_quantum_graph(tol()).unwrap());
        let r = ClassicalRelation::new(3, [(0, 0), (1, 1), (2, 2), (0, 2), (2, 0)]).unwrap();
        assert!(classical_to_quantum(&r).is_quantum_graph(tol()).unwrap());
    }

    #[test]
    fn bimodule_closure_examples() {
        let c =
            bimodule_closure(&[ComplexMatrix::identity(3)], &StarAlgebra::full(3), tol()).unwrap();
        assert!(c
            .space()
            .equals(StarAlgebra::scalars(3).space(), tol())
            .unwrap());
        let c = bimodule_closure(
            &[ComplexMatrix::unit(2, 2, 0, 0)],
            &StarAlgebra::diagonal(2),
            tol(),
        )
        .unwrap();
        assert_eq!(c.space().dim(), 1);
        assert!(c
            .space()
            .contains(&ComplexMatrix::unit(2, 2, 0, 0), tol())
            .unwrap());
        let c = bimodule_closure(
            &[ComplexMatrix::unit(2, 2, 0, 1)],
            &StarAlgebra::scalars(2),
            tol(),
        )
        .unwrap();
        assert!(c.space().is_full());
    }

    #[test]
    fn rejects_non_bimodule() {
        let e01 = OperatorSpace::span(2, 2, &[ComplexMatrix::unit(2, 2, 0, 1)], tol()).unwrap();
        assert_eq!(
            QuantumRelation::new(StarAlgebra::scalars(2), e01, tol()).unwrap_err(),
            Error::NotBimodule
        );
    }

    #[test]
    fn connects_examples() {
        let v = v1();
        let z = Projection::zero(2);
        assert!(!v.connects(&z, &z, 1, tol()).unwrap());
        let mut s = Sampler::new(51);
        let full =
            QuantumRelation::new(StarAlgebra::full(2), OperatorSpace::full(2, 2), tol()).unwrap();
        for _ in 0..20 {
            let a = s.unit_vector(2);
            let b = s.unit_vector(2);
            let p = range_projection(&ComplexMatrix::outer(&a, &a), tol());
            let q = range_projection(&ComplexMatrix::outer(&b, &b), tol());
            assert!(v.connects(&p, &q, 1, tol()).unwrap());
            assert!(full.connects(&p, &q, 1, tol()).unwrap());
        }
        let d = diagonal_relation(&StarAlgebra::diagonal(2), tol());
        let off =
            Projection::new(ComplexMatrix::from_real(&[&[0.5, 0.5], &[0.5, 0.5]]), tol()).unwrap();
        assert_eq!(
            d.connects(&off, &off, 1, tol()).unwrap_err(),
            Error::NotInAlgebra("projection at matrix level k")
        );
    }

    #[test]
    fn restrict_examples() {
        let mut s = Sampler::new(52);
        let alg = s.algebra(3, tol());
        let v = s.bimodule(&alg, tol());
        let r = v.restrict(&Projection::identity(3), tol()).unwrap();
        assert_eq!(r.relation().space().dim(), v.space().dim());
        assert!(r
            .uncompressed(tol())
            .unwrap()
            .equals(v.space(), tol())
            .unwrap());

        for mask in 0..512u64 {
            let rel = ClassicalRelation::from_mask(3, mask);
            let v = classical_to_quantum(&rel);
            for subset in [vec![0, 2], vec![1], vec![0, 1, 2]] {
                let e = coord_projection(3, &subset);
                let r = v.restrict(&e, tol()).unwrap();
                let back = quantum_to_classical(r.relation(), tol()).unwrap();
                assert_eq!(back, rel.induced(&subset), "mask {mask} subset {subset:?}");
            }
        }
    }

    #[test]
    fn independence() {
        let mut s = Sampler::new(53);
        let alg = s.algebra(3, tol());
        let d = diagonal_relation(&alg, tol());
        for _ in 0..5 {
            let e = s.nonzero_projection_in(alg.space(), tol()).unwrap();
            assert!(d.is_independent(&e, tol()).unwrap());
        }
        let g = s.space(3, 3, 2, tol());
        let sys = OperatorSpace::span(
            3,
            3,
            &[
                &[ComplexMatrix::identity(3)][..],
                g.basis(),
                g.adjoint().basis(),
            ]
            .concat(),
            tol(),
        )
        .unwrap();
        let v = QuantumRelation::new(StarAlgebra::full(3), sys, tol()).unwrap();
        let u = s.unit_vector(3);
        let e = range_projection(&ComplexMatrix::outer(&u, &u), tol());
        assert!(v.is_independent(&e, tol()).unwrap());

        let g = ClassicalRelation::new(3, [(0, 0), (1, 1), (2, 2), (0, 1), (1, 0)]).unwrap();
        let v = classical_to_quantum(&g);
        assert!(v
            .is_independent(&coord_projection(3, &[0, 2]), tol())
            .unwrap());
        assert!(!v
            .is_independent(&coord_projection(3, &[0, 1]), tol())
            .unwrap());
        let not_graph = classical_to_quantum(&ClassicalRelation::new(3, [(0, 1)]).unwrap());
        assert_eq!(
            not_graph
                .is_independent(&coord_projection(3, &[0]), tol())
                .unwrap_err(),
            Error::NotQuantumGraph
        );
    }

    #[test]
    fn classical_bridge_examples() {
        let d = classical_to_quantum(&ClassicalRelation::diagonal(3));
        assert!(d
            .space()
            .equals(StarAlgebra::diagonal(3).space(), tol())
            .unwrap());
        assert_eq!(
            classical_to_quantum(&ClassicalRelation::empty(3))
                .space()
                .dim(),
            0
        );
        assert_eq!(
            classical_to_quantum(&ClassicalRelation::full(3))
                .space()
                .dim(),
            9
        );
        let v = QuantumRelation::new(
            StarAlgebra::diagonal(2),
            OperatorSpace::span(2, 2, &[ComplexMatrix::unit(2, 2, 0, 1)], tol()).unwrap(),
            tol(),
        )
        .unwrap();
        assert_eq!(
            quantum_to_classical(&v, tol()).unwrap(),
            ClassicalRelation::new(2, [(0, 1)]).unwrap()
        );
        assert_eq!(
            quantum_to_classical(&v1(), tol()).unwrap_err(),
            Error::NotBimodule
        );
    }

    #[test]
    fn kl_form_on_full_algebra() {
        let mut s = Sampler::new(54);
        for _ in 0..10 {
            let g = s.space(3, 3, 2, tol());
            let sys = OperatorSpace::span(
                3,
                3,
                &[
                    &[ComplexMatrix::identity(3)][..],
                    g.basis(),
                    g.adjoint().basis(),
                ]
                .concat(),
                tol(),
            )
            .unwrap();
            let v = QuantumRelation::new(StarAlgebra::full(3), sys, tol()).unwrap();
            let e = s
                .nonzero_projection_in(StarAlgebra::full(3).space(), tol())
                .unwrap();
            let eve: Vec<ComplexMatrix> = v
                .space()
                .basis()
                .iter()
                .map(|b| &(e.matrix() * b) * e.matrix())
                .collect();
            let eve = OperatorSpace::span(3, 3, &eve, tol()).unwrap();
            let ce = OperatorSpace::span(3, 3, &[e.matrix().clone()], tol()).unwrap();
            assert_eq!(
                v.is_independent(&e, tol()).unwrap(),
                eve.equals(&ce, tol()).unwrap()
            );
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn bimodule_stable_under_operations(seed in any::<u64>()) {
            let mut s = Sampler::new(seed);
            let m = 2 + s.index(2);
            let alg = s.algebra(m, tol());
            let v = s.bimodule(&alg, tol());
            let w = s.bimodule(&alg, tol());
            let vs = v.space();
            let ws = w.space();
            for space in [
                vs.adjoint(),
                vs.sum(ws, tol()).unwrap(),
                vs.intersect(ws, tol()).unwrap(),
                vs.product(ws, tol()).unwrap(),
            ] {
                prop_assert!(is_bimodule(&alg, &space, tol()).unwrap());
            }
            if let Some(e) = s.nonzero_projection_in(alg.space(), tol()) {
                let r = v.restrict(&e, tol()).unwrap();
                prop_assert!(is_bimodule(r.relation().algebra(), r.relation().space(), tol()).unwrap());
                prop_assert!(is_bimodule(&alg, &r.uncompressed(tol()).unwrap(), tol()).unwrap());
            }
        }

        #[test]
        fn scalar_compatibility(seed in any::<u64>()) {
            // ‖P (A⊗I_k) B Q‖ = ‖P B (A⊗I_l) Q‖ for B = I_m ⊗ b, b ∈ M_{k,l}
            let mut s = Sampler::new(seed);
            let m = 2;
            let (k, l) = (1 + s.index(2), 1 + s.index(2));
            let alg = s.algebra(m, tol());
            let v = s.bimodule(&alg, tol());
            let p = s.level_projection(&alg, k);
            let q = s.level_projection(&alg, l);
            let b = ComplexMatrix::identity(m).kron(&s.matrix(k, l));
            for a in v.space().basis() {
                let lhs = &(&(p.matrix() * &a.ampliate(k)) * &b) * q.matrix();
                let rhs = &(&(p.matrix() * &b) * &a.ampliate(l)) * q.matrix();
                prop_assert!((&lhs - &rhs).hs_norm() < 1e-10);
            }
        }

        #[test]
        fn join_axiom(seed in any::<u64>()) {
            let mut s = Sampler::new(seed);
            let m = 2 + s.index(2);
            let k = 1 + s.index(2);
            let alg = s.algebra(m, tol());
            let v = s.bimodule(&alg, tol());
            let ps: Vec<Projection> = (0..2).map(|_| s.level_projection(&alg, k)).collect();
            let qs: Vec<Projection> = (0..2).map(|_| s.level_projection(&alg, k)).collect();
            let jp = join(&ps, tol()).unwrap();
            let jq = join(&qs, tol()).unwrap();
            let joined = v.connects(&jp, &jq, k, tol()).unwrap();
            let mut any = false;
            for p in &ps {
                for q in &qs {
                    any |= v.connects(p, q, k, tol()).unwrap();
                }
            }
            prop_assert_eq!(joined, any);
        }

        #[test]
        fn scalar_multiples_do_not_change_connection(seed in any::<u64>(), re in -3.0f64..3.0, im in -3.0f64..3.0) {
            prop_assume!(re.abs() + im.abs() > 0.1);
            let mut s = Sampler::new(seed);
            let alg = s.algebra(2, tol());
            let v = s.bimodule(&alg, tol());
            let gens: Vec<ComplexMatrix> = v.space().basis().iter().map(|b| b.scale(C64::new(re, im))).collect();
            let w = QuantumRelation::new(alg.clone(), OperatorSpace::span(2, 2, &gens, tol()).unwrap(), tol()).unwrap();
            prop_assert!(w.space().equals(v.space(), tol()).unwrap());
        }
    }
}
