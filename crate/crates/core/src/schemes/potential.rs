//! Double-well potential truncated to quadratic growth outside `[-M, M]`.

/// `L = 3M^2 - 1`, the bound on `|F~''|`.
pub fn lipschitz_bound(m: f64) -> f64 {
    3.0 * m * m - 1.0
}

/// Truncated potential `F~`: `(u^2-1)^2/4` on `[-M, M]`, continued by the
/// quadratic that matches value and slope at `+-M`.
#[allow(non_snake_case)]
pub fn truncated_F(u: f64, m: f64) -> f64 {
    let l = lipschitz_bound(m);
    let s = m * m - 1.0;
    let edge = 0.25 * s * s;
    let slope = m * m * m - m;
    if u > m {
        let d = u - m;
        0.5 * l * d * d + slope * d + edge
    } else if u < -m {
        let d = u + m;
        0.5 * l * d * d - slope * d + edge
    } else {
        let q = u * u - 1.0;
        0.25 * q * q
    }
}

/// `f~ = F~'`.
pub fn truncated_f(u: f64, m: f64) -> f64 {
    let l = lipschitz_bound(m);
    let slope = m * m * m - m;
    if u > m {
        l * (u - m) + slope
    } else if u < -m {
        l * (u + m) - slope
    } else {
        u * u * u - u
    }
}

/// Untruncated `f(u) = u^3 - u`.
pub fn cubic_f(u: f64) -> f64 {
    u * u * u - u
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn branch_values() {
        assert_eq!(truncated_F(2.0, 1.0), 1.0);
        assert_eq!(truncated_f(2.0, 1.0), 2.0);
        assert_eq!(truncated_F(-2.0, 1.0), 1.0);
        assert_eq!(truncated_f(-2.0, 1.0), -2.0);
        assert_eq!(truncated_F(0.3, 1.0), 0.25 * (0.09f64 - 1.0).powi(2));
        assert_eq!(lipschitz_bound(1.0), 2.0);
    }

    #[test]
    fn continuous_at_truncation_points() {
        for m in [1.0, 1.3, 2.0] {
            let inner = 0.25 * (m * m - 1.0f64).powi(2);
            for side in [m, -m] {
                let h = 1e-9 * side.signum();
                assert_relative_eq!(truncated_F(side + h, m), inner, epsilon = 1e-8);
                assert_relative_eq!(truncated_f(side + h, m), truncated_f(side - h, m), epsilon = 1e-7);
            }
        }
    }

    proptest! {
        #[test]
        fn derivative_matches_finite_difference(u in -4.0f64..4.0, m in 1.0f64..2.5) {
            let h = 1e-6;
            let fd = (truncated_F(u + h, m) - truncated_F(u - h, m)) / (2.0 * h);
            prop_assert!((fd - truncated_f(u, m)).abs() <= 1e-5 * (1.0 + fd.abs()));
        }

        #[test]
        fn second_derivative_bounded(u in -4.0f64..4.0, m in 1.0f64..2.5) {
            let h = 1e-4;
            let fd2 = (truncated_f(u + h, m) - truncated_f(u - h, m)) / (2.0 * h);
            prop_assert!(fd2.abs() <= lipschitz_bound(m) + 1e-6);
        }
    }
}
