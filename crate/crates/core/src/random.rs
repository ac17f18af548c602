//! Seeded generators for matrices, algebras, relations and channels.
//!
//! Used by the test suites and by the CLI's randomized law checks. All
//! draws come from one ChaCha8 stream, so a seed fixes every instance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::StarAlgebra;
use crate::channel::CPMap;
use crate::classical::ClassicalRelation;
use crate::linalg::{inverse_sqrt, jacobi, ComplexMatrix, Projection, Tolerance, C64};
use crate::relation::{bimodule_closure, diagonal_relation, QuantumRelation};
use crate::space::OperatorSpace;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Uniform in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    /// Uniform in `lo..=hi`.
    pub fn between(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.random_range(lo..=hi)
    }

    pub fn coin(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Standard complex Gaussian.
    pub fn complex(&mut self) -> C64 {
        let re: f64 = self.rng.sample(StandardNormal);
        let im: f64 = self.rng.sample(StandardNormal);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }

    pub fn vector(&mut self, n: usize) -> Vec<C64> {
        (0..n).map(|_| self.complex()).collect()
    }

    pub fn unit_vector(&mut self, n: usize) -> Vec<C64> {
        loop {
            let v = self.vector(n);
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-6 {
                return v.into_iter().map(|z| z / norm).collect();
            }
        }
    }

    /// Gaussian matrix.
    pub fn matrix(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| self.complex())
    }

    pub fn hermitian(&mut self, n: usize) -> ComplexMatrix {
        self.matrix(n, n).hermitian_part()
    }

    /// `rows x cols` matrix with orthonormal columns (`rows >= cols`).
    pub fn isometry(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        assert!(rows >= cols, "isometry needs rows >= cols");
        let mut columns: Vec<Vec<C64>> = Vec::with_capacity(cols);
        while columns.len() < cols {
            let mut v = self.vector(rows);
            for _ in 0..2 {
                for c in &columns {
                    let z: C64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                    for (x, y) in v.iter_mut().zip(c) {
                        *x -= z * y;
                    }
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-6 {
                columns.push(v.into_iter().map(|z| z / norm).collect());
            }
        }
        ComplexMatrix::from_columns(rows, &columns)
    }

    pub fn unitary(&mut self, n: usize) -> ComplexMatrix {
        self.isometry(n, n)
    }

    /// `X X*` with `X` an `n x r` Gaussian matrix; rank `r` almost surely.
    pub fn positive_of_rank(&mut self, n: usize, r: usize) -> ComplexMatrix {
        let x = self.matrix(n, r);
        &x * &x.adjoint()
    }

    /// Span of `dim` Gaussian matrices.
    pub fn space(&mut self, rows: usize, cols: usize, dim: usize, tol: Tolerance) -> OperatorSpace {
        let gens: Vec<ComplexMatrix> = (0..dim).map(|_| self.matrix(rows, cols)).collect();
        OperatorSpace::span(rows, cols, &gens, tol).expect("generators share a shape")
    }

    /// Gaussian combination of the basis.
    pub fn element_of(&mut self, space: &OperatorSpace) -> ComplexMatrix {
        let coeffs = self.vector(space.dim());
        space.combination(&coeffs)
    }

    /// Random unital *-subalgebra of `M_m`.
    ///
    /// Either `M_m`, `D_m`, `ℂI`, or a direct sum of blocks `M_{n_i} ⊗ I_{k_i}`
    /// conjugated by a random unitary half of the time.
    pub fn algebra(&mut self, m: usize, tol: Tolerance) -> StarAlgebra {
        let _ = tol;
        match self.index(6) {
            0 => StarAlgebra::full(m),
            1 => StarAlgebra::diagonal(m),
            2 => StarAlgebra::scalars(m),
            _ => {
                let mut blocks = Vec::new();
                let mut left = m;
                while left > 0 {
                    let k = self.between(1, left);
                    let n = self.between(1, left / k);
                    blocks.push((n, k));
                    left -= n * k;
                }
                let mut basis = Vec::new();
                let mut offset = 0;
                for &(n, k) in &blocks {
                    let w = 1.0 / (k as f64).sqrt();
                    for a in 0..n {
                        for b in 0..n {
                            let block =
                                ComplexMatrix::unit(n, n, a, b).kron(&ComplexMatrix::identity(k));
                            let mut e = ComplexMatrix::zeros(m, m);
                            for i in 0..n * k {
                                for j in 0..n * k {
                                    e[(offset + i, offset + j)] = block[(i, j)] * w;
                                }
                            }
                            basis.push(e);
                        }
                    }
                    offset += n * k;
                }
                if self.coin(0.5) {
                    let u = self.unitary(m);
                    let ua = u.adjoint();
                    basis = basis.iter().map(|b| &(&u * b) * &ua).collect();
                }
                StarAlgebra::from_trusted(m, OperatorSpace::from_orthonormal(m, m, basis))
            }
        }
    }

    /// Spectral projection of a random Hermitian element of a *-closed
    /// space: a random union of eigenvalue clusters. May be zero or the
    /// identity.
    pub fn projection_in(&mut self, space: &OperatorSpace) -> Projection {
        self.projection_from_clusters(space, false)
    }

    /// As `projection_in`, but never zero. `None` only for the 0x0 case.
    pub fn nonzero_projection_in(
        &mut self,
        space: &OperatorSpace,
        _tol: Tolerance,
    ) -> Option<Projection> {
        if space.rows() == 0 {
            return None;
        }
        Some(self.projection_from_clusters(space, true))
    }

    /// Random projection in `M_k(M)`.
    pub fn level_projection(&mut self, algebra: &StarAlgebra, k: usize) -> Projection {
        self.projection_in(&algebra.space().ampliate(k))
    }

    fn projection_from_clusters(&mut self, space: &OperatorSpace, nonzero: bool) -> Projection {
        let h = self.element_of(space).hermitian_part();
        let eig = jacobi(h);
        let scale = eig.max_abs_value().max(1.0);
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        for (j, &v) in eig.values.iter().enumerate() {
            match clusters.last_mut() {
                Some(c) if (eig.values[*c.last().unwrap()] - v).abs() <= 1e-6 * scale => c.push(j),
                _ => clusters.push(vec![j]),
            }
        }
        let mut chosen: Vec<usize> = Vec::new();
        for c in &clusters {
            if self.coin(0.5) {
                chosen.extend(c);
            }
        }
        if nonzero && chosen.is_empty() && !clusters.is_empty() {
            let pick = self.index(clusters.len());
            chosen.extend(&clusters[pick]);
        }
        chosen.sort_unstable();
        Projection::from_eigenvectors(&eig, &chosen)
    }

    /// Random M'-M' bimodule: closure of a few `P₁ X P₂` with `P₁, P₂`
    /// spectral projections of `M`, occasionally the diagonal or everything.
    pub fn bimodule(&mut self, algebra: &StarAlgebra, tol: Tolerance) -> QuantumRelation {
        let m = algebra.dim();
        match self.index(10) {
            0 => diagonal_relation(algebra, tol),
            1 => QuantumRelation::new(algebra.clone(), OperatorSpace::full(m, m), tol)
                .expect("full space is a bimodule"),
            _ => {
                let count = self.between(1, 3);
                let gens: Vec<ComplexMatrix> = (0..count)
                    .map(|_| {
                        let p1 = self.projection_in(algebra.space());
                        let p2 = self.projection_in(algebra.space());
                        let x = self.matrix(m, m);
                        &(p1.matrix() * &x) * p2.matrix()
                    })
                    .collect();
                bimodule_closure(&gens, algebra, tol).expect("generators are m x m")
            }
        }
    }

    /// Random trace-preserving channel with `d` Kraus operators.
    pub fn channel(&mut self, m: usize, n: usize, d: usize, tol: Tolerance) -> CPMap {
        assert!(
            d * n >= m,
            "no trace preserving family with {d} Kraus of size {n}x{m}"
        );
        loop {
            let kraus: Vec<ComplexMatrix> = (0..d).map(|_| self.matrix(n, m)).collect();
            if let Some(k) = normalize_kraus(kraus, tol) {
                return CPMap::new(k, true, tol).expect("normalized family is trace preserving");
            }
        }
    }

    /// Random CP map whose Kraus entries are zeroed with probability
    /// `1 - density`; not normalized. Sparse supports give relations that
    /// are neither empty nor everything.
    pub fn cp_map(&mut self, m: usize, n: usize, d: usize, density: f64, tol: Tolerance) -> CPMap {
        let kraus: Vec<ComplexMatrix> = (0..d)
            .map(|_| {
                let mut k = ComplexMatrix::from_fn(n, m, |_, _| {
                    if self.coin(density) {
                        self.complex()
                    } else {
                        C64::new(0.0, 0.0)
                    }
                });
                if k.hs_norm() == 0.0 {
                    let (i, j) = (self.index(n), self.index(m));
                    k[(i, j)] = self.complex();
                }
                k
            })
            .collect();
        CPMap::new(kraus, false, tol).expect("nonempty family of equal shapes")
    }

    /// Column-stochastic `n x m` matrix (columns are inputs) with random
    /// zero patterns.
    pub fn stochastic(&mut self, n: usize, m: usize) -> ComplexMatrix {
        let mut t = ComplexMatrix::zeros(n, m);
        for j in 0..m {
            let mut weights: Vec<f64> = (0..n)
                .map(|_| {
                    if self.coin(0.5) {
                        self.uniform() + 0.05
                    } else {
                        0.0
                    }
                })
                .collect();
            if weights.iter().all(|&w| w == 0.0) {
                weights[self.index(n)] = 1.0;
            }
            let total: f64 = weights.iter().sum();
            for (i, w) in weights.into_iter().enumerate() {
                t[(i, j)] = C64::new(w / total, 0.0);
            }
        }
        t
    }

    /// Each ordered pair present with probability 1/2.
    pub fn classical_relation(&mut self, m: usize) -> ClassicalRelation {
        let pairs: Vec<(usize, usize)> = (0..m)
            .flat_map(|i| (0..m).map(move |j| (i, j)))
            .filter(|_| self.coin(0.5))
            .collect();
        ClassicalRelation::new(m, pairs).expect("indices below m")
    }
}

/// `K_i ↦ K_i S^{-1/2}` with `S = Σ K_i* K_i`; `None` if `S` is singular.
pub(crate) fn normalize_kraus(
    kraus: Vec<ComplexMatrix>,
    tol: Tolerance,
) -> Option<Vec<ComplexMatrix>> {
    let m = kraus.first()?.cols();
    let mut s = ComplexMatrix::zeros(m, m);
    for k in &kraus {
        s += &(&k.adjoint() * k);
    }
    let r = inverse_sqrt(&s, tol).ok()?;
    Some(kraus.iter().map(|k| k * &r).collect())
}
