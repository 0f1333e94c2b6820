//! Discrete Caputo derivatives on uniform time meshes.
//!
//! The L1 operator interpolates piecewise linearly and has truncation order
//! `2 - alpha`; the L2 operator interpolates piecewise quadratically and has
//! order `3 - alpha`. Both are stored in "recast" form over differences
//! `u^n - u^k`, which is what the discrete modified energies are built from.

mod history;
mod l1;
mod l2;

pub use history::{Metric, PairMetric, SolveHistory};
pub use l1::{l1_apply, l1_apply_recast, l1_history_sum, l1_weights, L1Weights};
pub use l2::{l2_apply, l2_coefficients, l2_history_part, CoefficientViolation, L2Coefficients};

use crate::special::gamma;
use crate::{Error, Result};

/// Order of the Caputo derivative, strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha < 1.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidOrder(alpha))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for FractionalOrder {
    type Error = Error;

    fn try_from(alpha: f64) -> Result<Self> {
        Self::new(alpha)
    }
}

/// Exact Caputo derivative of `t^m`: `m! / Gamma(m + 1 - alpha) * t^(m - alpha)`.
pub fn caputo_exact_monomial(alpha: FractionalOrder, m: u32, t: f64) -> f64 {
    assert!(m >= 1, "monomial degree must be at least 1");
    assert!(t >= 0.0, "time must be nonnegative");
    let a = alpha.value();
    let m = m as f64;
    if t == 0.0 {
        return 0.0;
    }
    gamma(m + 1.0) / gamma(m + 1.0 - a) * t.powf(m - a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn order_rejects_endpoints() {
        assert!(FractionalOrder::new(0.0).is_err());
        assert!(FractionalOrder::new(1.0).is_err());
        assert!(FractionalOrder::new(f64::NAN).is_err());
        assert!(FractionalOrder::try_from(0.5).is_ok());
    }

    #[test]
    fn exact_monomial_values() {
        let half = FractionalOrder::new(0.5).unwrap();
        assert_relative_eq!(caputo_exact_monomial(half, 2, 1.0), 1.504_505_556_127_350_2, max_relative = 1e-13);
        for a in [0.1, 0.4, 0.9] {
            let o = FractionalOrder::new(a).unwrap();
            assert_relative_eq!(caputo_exact_monomial(o, 1, 1.0), 1.0 / gamma(2.0 - a), max_relative = 1e-14);
        }
        assert_eq!(caputo_exact_monomial(half, 2, 0.0), 0.0);
        assert!(caputo_exact_monomial(half, 2, 1e-12) < 1e-17);
    }
}
