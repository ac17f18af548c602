//! Moving relations along CP maps: pushforward, pullback, confusability
//! graphs, Knill-Laflamme codes and morphism predicates.

use crate::algebra::StarAlgebra;
use crate::channel::CPMap;
use crate::error::{Error, Result};
use crate::linalg::{min_eigenvalue, ComplexMatrix, Projection, Tolerance, C64};
use crate::relation::{bimodule_closure, diagonal_relation, QuantumRelation};
use crate::space::OperatorSpace;

fn check_dims(op: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::ShapeMismatch {
            op,
            left: (expected, expected),
            right: (got, got),
        });
    }
    Ok(())
}

/// Generators `K_i b K_j*` in order basis, then `i`, then `j`.
fn push_generators(v: &OperatorSpace, phi: &CPMap) -> Vec<ComplexMatrix> {
    let ks = phi.kraus();
    let adj: Vec<ComplexMatrix> = ks.iter().map(|k| k.adjoint()).collect();
    let mut out = Vec::with_capacity(v.dim() * ks.len() * ks.len());
    for b in v.basis() {
        for ki in ks {
            let kb = ki * b;
            for kj in &adj {
                out.push(&kb * kj);
            }
        }
    }
    out
}

/// The `N'`-`N'` bimodule generated by `{K_i A K_j* : A ∈ V}`.
pub fn pushforward(
    v: &QuantumRelation,
    phi: &CPMap,
    target: &StarAlgebra,
    tol: Tolerance,
) -> Result<QuantumRelation> {
    check_dims("pushforward", phi.in_dim(), v.dim())?;
    check_dims("pushforward", phi.out_dim(), target.dim())?;
    bimodule_closure(&push_generators(v.space(), phi), target, tol)
}

/// The `M'`-`M'` bimodule generated by `{K_i* B K_j : B ∈ W}`.
pub fn pullback(
    w: &QuantumRelation,
    phi: &CPMap,
    source: &StarAlgebra,
    tol: Tolerance,
) -> Result<QuantumRelation> {
    check_dims("pullback", phi.out_dim(), w.dim())?;
    check_dims("pullback", phi.in_dim(), source.dim())?;
    let ks = phi.kraus();
    let mut gens = Vec::with_capacity(w.space().dim() * ks.len() * ks.len());
    for b in w.space().basis() {
        for ki in ks {
            let kb = &ki.adjoint() * b;
            for kj in ks {
                gens.push(&kb * kj);
            }
        }
    }
    bimodule_closure(&gens, source, tol)
}

/// Pullback of the diagonal relation `ℂ·I_n` of `M_n`; on `M = M_m` this is
/// `span{K_i* K_j}`.
pub fn confusability(phi: &CPMap, source: &StarAlgebra, tol: Tolerance) -> Result<QuantumRelation> {
    let diag = diagonal_relation(&StarAlgebra::full(phi.out_dim()), tol);
    pullback(&diag, phi, source, tol)
}

/// Pushforward of the diagonal relation `M'` of the source.
pub fn dual_confusability(
    phi: &CPMap,
    source: &StarAlgebra,
    target: &StarAlgebra,
    tol: Tolerance,
) -> Result<QuantumRelation> {
    pushforward(&diagonal_relation(source, tol), phi, target, tol)
}

/// `span{K_i} ⊆ M_{n,m}`.
pub fn bipartite_graph(phi: &CPMap, tol: Tolerance) -> OperatorSpace {
    OperatorSpace::span(phi.out_dim(), phi.in_dim(), phi.kraus(), tol)
        .expect("Kraus matrices share a shape")
}

fn check_positive(a: &ComplexMatrix, tol: Tolerance) -> Result<()> {
    let dev = a.hermitian_deviation();
    if !tol.negligible(dev, a.hs_norm()) {
        return Err(Error::NotHermitian(dev));
    }
    let min = min_eigenvalue(a);
    if min < -tol.threshold(a.hs_norm()) {
        return Err(Error::NotPositive(min));
    }
    Ok(())
}

/// `C (B ⊗ I_k) A ≠ 0` for some `B ∈ span{K_i}`, for positive `A` of size
/// `mk` and `C` of size `nk`. Equivalent to `Φ(A) C ≠ 0`.
pub fn bipartite_connects(
    phi: &CPMap,
    a: &ComplexMatrix,
    c: &ComplexMatrix,
    k: usize,
    tol: Tolerance,
) -> Result<bool> {
    let (m, n) = (phi.in_dim(), phi.out_dim());
    if k == 0 || a.shape() != (m * k, m * k) {
        return Err(Error::ShapeMismatch {
            op: "bipartite_connects",
            left: (m * k, m * k),
            right: a.shape(),
        });
    }
    if c.shape() != (n * k, n * k) {
        return Err(Error::ShapeMismatch {
            op: "bipartite_connects",
            left: (n * k, n * k),
            right: c.shape(),
        });
    }
    check_positive(a, tol)?;
    check_positive(c, tol)?;
    let scale = a.hs_norm() * c.hs_norm() * (k as f64).sqrt();
    for b in bipartite_graph(phi, tol).basis() {
        let x = &(c * &b.ampliate(k)) * a;
        if !tol.negligible(x.hs_norm(), scale) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Outcome of the Knill-Laflamme test.
#[derive(Clone, Debug, PartialEq)]
pub struct KlReport {
    pub is_code: bool,
    /// `λ_ij = Tr(E K_i* K_j E) / rank E`, present when `is_code`.
    pub lambda: Option<ComplexMatrix>,
}

/// `E K_i* K_j E = λ_ij E` for all `i, j`, each checked against
/// `rel_eps · ‖K_i* K_j‖`.
pub fn kl_check(phi: &CPMap, e: &Projection, tol: Tolerance) -> Result<KlReport> {
    check_dims("kl_check", phi.in_dim(), e.dim())?;
    if e.rank() == 0 {
        return Err(Error::ZeroRank);
    }
    let ks = phi.kraus();
    let d = ks.len();
    let r = e.rank() as f64;
    let em = e.matrix();
    let mut lambda = ComplexMatrix::zeros(d, d);
    for (i, ki) in ks.iter().enumerate() {
        let kia = ki.adjoint();
        for (j, kj) in ks.iter().enumerate() {
            let g = &kia * kj;
            let x = &(em * &g) * em;
            let l: C64 = x.trace() / r;
            let dev = (&x - &em.scale(l)).hs_norm();
            if !tol.negligible(dev, g.hs_norm()) {
                return Ok(KlReport {
                    is_code: false,
                    lambda: None,
                });
            }
            lambda[(i, j)] = l;
        }
    }
    Ok(KlReport {
        is_code: true,
        lambda: Some(lambda),
    })
}

/// Strong and weak CP-morphism verdicts.
#[derive(Clone, Debug)]
pub struct MorphismVerdict {
    /// Pushforward of `V` lies in `W`.
    pub strong: bool,
    /// `V` lies in the pullback of `W`.
    pub weak: bool,
    /// First generator `K_i b K_j*` outside `W`, in basis-then-Kraus order.
    pub witness_generator: Option<ComplexMatrix>,
}

pub fn is_cp_morphism(
    phi: &CPMap,
    v: &QuantumRelation,
    w: &QuantumRelation,
    tol: Tolerance,
) -> Result<MorphismVerdict> {
    check_dims("is_cp_morphism", phi.in_dim(), v.dim())?;
    check_dims("is_cp_morphism", phi.out_dim(), w.dim())?;
    // W is an N'-bimodule, so containment of the generators is enough
    let mut witness = None;
    for g in push_generators(v.space(), phi) {
        if !w.space().contains(&g, tol)? {
            witness = Some(g);
            break;
        }
    }
    let back = pullback(w, phi, v.algebra(), tol)?;
    Ok(MorphismVerdict {
        strong: witness.is_none(),
        weak: v.space().is_subspace_of(back.space(), tol)?,
        witness_generator: witness,
    })
}
