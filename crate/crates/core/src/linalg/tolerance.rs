use crate::error::{Error, Result};

/// Numerical tolerance shared by every operation in the crate.
///
/// Every "is zero" decision compares a norm against
/// `rel_eps * max(scale, abs_floor)`, where `scale` is the norm (or product
/// of norms) of the operands that produced the value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub rel_eps: f64,
    pub abs_floor: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel_eps: 1e-9,
            abs_floor: 1e-12,
        }
    }
}

impl Tolerance {
    pub fn new(rel_eps: f64, abs_floor: f64) -> Result<Self> {
        if !(rel_eps.is_finite() && rel_eps > 0.0) {
            return Err(Error::InvalidTolerance(format!(
                "rel_eps must be positive and finite, got {rel_eps}"
            )));
        }
        if !(abs_floor.is_finite() && abs_floor >= 0.0) {
            return Err(Error::InvalidTolerance(format!(
                "abs_floor must be nonnegative and finite, got {abs_floor}"
            )));
        }
        Ok(Tolerance { rel_eps, abs_floor })
    }

    /// Same floor, different relative epsilon.
    pub fn with_rel_eps(rel_eps: f64) -> Result<Self> {
        Tolerance::new(rel_eps, Tolerance::default().abs_floor)
    }

    pub fn threshold(&self, scale: f64) -> f64 {
        self.rel_eps * scale.max(self.abs_floor)
    }

    pub fn negligible(&self, value: f64, scale: f64) -> bool {
        value <= self.threshold(scale)
    }

    /// Eigenvalues strictly above this count toward the rank.
    pub fn rank_cutoff(&self, lambda_max: f64) -> f64 {
        self.threshold(lambda_max)
    }
}
