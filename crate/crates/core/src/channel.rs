//! Completely positive maps in Kraus form `ρ ↦ Σ K_i ρ K_i*`.

use crate::error::{Error, Result};
use crate::linalg::{join, range_projection, ComplexMatrix, Projection, Tolerance, C64};

/// CP map `M_m → M_n` given by `n x m` Kraus matrices.
#[derive(Clone, Debug)]
pub struct CPMap {
    in_dim: usize,
    out_dim: usize,
    kraus: Vec<ComplexMatrix>,
    trace_preserving: bool,
}

impl CPMap {
    /// With `trace_preserving` set, `‖Σ K_i* K_i - I_m‖` must be within
    /// tolerance of zero (relative to `‖I_m‖`).
    pub fn new(kraus: Vec<ComplexMatrix>, trace_preserving: bool, tol: Tolerance) -> Result<Self> {
        let first = kraus.first().ok_or(Error::EmptyKraus)?;
        let (n, m) = first.shape();
        for k in &kraus {
            if k.shape() != (n, m) {
                return Err(Error::ShapeMismatch {
                    op: "kraus",
                    left: (n, m),
                    right: k.shape(),
                });
            }
        }
        let map = CPMap {
            in_dim: m,
            out_dim: n,
            kraus,
            trace_preserving,
        };
        if trace_preserving {
            let dev = map.trace_deviation();
            if !tol.negligible(dev, (m as f64).sqrt()) {
                return Err(Error::NotTracePreserving(dev));
            }
        }
        Ok(map)
    }

    /// Single Kraus `I_m`.
    pub fn identity(m: usize) -> Self {
        CPMap {
            in_dim: m,
            out_dim: m,
            kraus: vec![ComplexMatrix::identity(m)],
            trace_preserving: true,
        }
    }

    /// `ρ ↦ U ρ U*` for an isometry `U`.
    pub fn isometric(u: ComplexMatrix, tol: Tolerance) -> Result<Self> {
        CPMap::new(vec![u], true, tol).map_err(|e| match e {
            Error::NotTracePreserving(d) => Error::NotIsometry(d),
            other => other,
        })
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    /// `‖Σ K_i* K_i - I‖`.
    pub fn trace_deviation(&self) -> f64 {
        let mut s = ComplexMatrix::identity(self.in_dim).scale_real(-1.0);
        for k in &self.kraus {
            s += &(&k.adjoint() * k);
        }
        s.hs_norm()
    }

    /// `Σ (K_i ⊗ I_k) ρ (K_i ⊗ I_k)*` for `ρ` of size `mk`.
    pub fn apply(&self, rho: &ComplexMatrix, k: usize) -> Result<ComplexMatrix> {
        self.check_level(rho, self.in_dim, k, "apply")?;
        let n = self.out_dim * k;
        let mut out = ComplexMatrix::zeros(n, n);
        for kr in &self.kraus {
            let a = kr.ampliate(k);
            out += &(&(&a * rho) * &a.adjoint());
        }
        Ok(out)
    }

    /// `Σ (K_i ⊗ I_k)* A (K_i ⊗ I_k)` for `A` of size `nk`.
    pub fn adjoint_apply(&self, a: &ComplexMatrix, k: usize) -> Result<ComplexMatrix> {
        self.check_level(a, self.out_dim, k, "adjoint_apply")?;
        let m = self.in_dim * k;
        let mut out = ComplexMatrix::zeros(m, m);
        for kr in &self.kraus {
            let x = kr.ampliate(k);
            out += &(&(&x.adjoint() * a) * &x);
        }
        Ok(out)
    }

    fn check_level(
        &self,
        x: &ComplexMatrix,
        base: usize,
        k: usize,
        op: &'static str,
    ) -> Result<()> {
        if k == 0 || x.shape() != (base * k, base * k) {
            return Err(Error::ShapeMismatch {
                op,
                left: (base * k, base * k),
                right: x.shape(),
            });
        }
        Ok(())
    }

    /// `K'_a = Σ_b U[a, b] K_b` for an isometry `U` (`d' x d`).
    pub fn kraus_mix(&self, u: &ComplexMatrix, tol: Tolerance) -> Result<CPMap> {
        let d = self.kraus.len();
        if u.cols() != d || u.rows() < d {
            return Err(Error::ShapeMismatch {
                op: "kraus_mix",
                left: (u.rows().max(d), d),
                right: u.shape(),
            });
        }
        let dev = crate::linalg::isometry_deviation(u);
        if !tol.negligible(dev, (d as f64).sqrt()) {
            return Err(Error::NotIsometry(dev));
        }
        let kraus = (0..u.rows())
            .map(|a| {
                let mut k = ComplexMatrix::zeros(self.out_dim, self.in_dim);
                for (b, kb) in self.kraus.iter().enumerate() {
                    k.axpy(u[(a, b)], kb);
                }
                k
            })
            .collect();
        Ok(CPMap {
            in_dim: self.in_dim,
            out_dim: self.out_dim,
            kraus,
            trace_preserving: self.trace_preserving,
        })
    }

    /// Kraus family `{K_i*}`: the map `A ↦ Σ K_i* A K_i` written as a map
    /// in its own right. Not trace preserving in general.
    pub fn adjoint_map(&self) -> CPMap {
        CPMap {
            in_dim: self.out_dim,
            out_dim: self.in_dim,
            kraus: self.kraus.iter().map(|k| k.adjoint()).collect(),
            trace_preserving: false,
        }
    }

    /// `⋁_i [(K_i ⊗ I_k) P]`, a projection of size `nk`.
    ///
    /// For `P` in `M_k(M)` this need not lie in `M_k(N)`; the hereditary
    /// cone projection is its support there, see
    /// [`StarAlgebra::level_support`](crate::StarAlgebra::level_support).
    pub fn backward_projection(
        &self,
        p: &Projection,
        k: usize,
        tol: Tolerance,
    ) -> Result<Projection> {
        self.check_level(p.matrix(), self.in_dim, k, "backward_projection")?;
        let parts: Vec<Projection> = self
            .kraus
            .iter()
            .map(|kr| range_projection(&(&kr.ampliate(k) * p.matrix()), tol))
            .collect();
        join(&parts, tol)
    }
}

/// `Φ₂ ∘ Φ₁` with Kraus family `{K⁽²⁾_i K⁽¹⁾_j}` (outer index major).
pub fn compose(outer: &CPMap, inner: &CPMap) -> Result<CPMap> {
    if inner.out_dim != outer.in_dim {
        return Err(Error::ShapeMismatch {
            op: "compose",
            left: (outer.out_dim, outer.in_dim),
            right: (inner.out_dim, inner.in_dim),
        });
    }
    let kraus = outer
        .kraus
        .iter()
        .flat_map(|a| inner.kraus.iter().map(move |b| a * b))
        .collect();
    Ok(CPMap {
        in_dim: inner.in_dim,
        out_dim: outer.out_dim,
        kraus,
        trace_preserving: outer.trace_preserving && inner.trace_preserving,
    })
}

/// Embedding of a column-stochastic `n x m` matrix `T` (rows are outputs):
/// Kraus `√T[j, i] · E_ji` for each `T[j, i] > 0`, input major.
pub fn classical_channel(t: &ComplexMatrix, tol: Tolerance) -> Result<CPMap> {
    let (n, m) = t.shape();
    if n == 0 || m == 0 {
        return Err(Error::NotStochastic("empty matrix".into()));
    }
    for i in 0..m {
        let mut total = 0.0;
        for j in 0..n {
            let z = t[(j, i)];
            if z.im != 0.0 || z.re < 0.0 {
                return Err(Error::NotStochastic(format!(
                    "entry ({j}, {i}) is not a nonnegative real"
                )));
            }
            total += z.re;
        }
        if !tol.negligible((total - 1.0).abs(), 1.0) {
            return Err(Error::NotStochastic(format!("column {i} sums to {total}")));
        }
    }
    let mut kraus = Vec::new();
    for i in 0..m {
        for j in 0..n {
            let w = t[(j, i)].re;
            if w > 0.0 {
                kraus.push(ComplexMatrix::unit(n, m, j, i).scale(C64::new(w.sqrt(), 0.0)));
            }
        }
    }
    CPMap::new(kraus, true, tol)
}
