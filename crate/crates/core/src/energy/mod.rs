//! Ginzburg-Landau energy and the history terms that make the modified
//! energies nonincreasing.
//!
//! Every modified energy has the shape `E(u^n) + D^n / gamma (+ stab)`,
//! where `D^n` is a nonnegative combination of squared distances
//! `|u^n - u^k|` between the newest state and all earlier ones. The L1 and
//! L2 variants measure those distances in L2; the Cahn-Hilliard variant uses
//! the H^-1 seminorm.

mod continuous;

pub use continuous::{
    d_alpha_quadrature, d_functional_quadrature, lemma31_residual, QuadratureSpec, SampledTrajectory, ScalarPath,
    Trajectory,
};

use crate::fields::{pairwise_sum_by, ScalarField2D, Spectral};
use crate::fracops::{L1Weights, L2Coefficients, Metric, SolveHistory};
use crate::{Error, Result};

/// Zero-mean tolerance for H^-1 distances.
pub const MEAN_TOL: f64 = 1e-10;

/// One row of energy output. `e_tilde = e + d_term + stab_term`, where
/// `d_term` is the history contribution already divided by `gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRecord {
    pub t: f64,
    pub e: f64,
    pub e_tilde: f64,
    pub d_term: f64,
    pub stab_term: f64,
    pub max_abs_u: f64,
    pub mean_u: f64,
}

/// `F(u) = (u^2 - 1)^2 / 4`.
pub fn double_well(u: f64) -> f64 {
    let s = u * u - 1.0;
    0.25 * s * s
}

/// `int eps^2/2 |grad u|^2 + F(u) dx` with a spectral gradient.
pub fn gl_energy(u: &ScalarField2D, eps: f64) -> f64 {
    gl_energy_with(&Spectral::new(*u.grid()), u.values(), eps)
}

pub fn gl_energy_with(sp: &Spectral, values: &[f64], eps: f64) -> f64 {
    let grad = sp.grad_sq_integral(values);
    let bulk = pairwise_sum_by(values.len(), &|i| double_well(values[i])) * sp.grid().cell_area();
    0.5 * eps * eps * grad + bulk
}

/// Energy of state `n`: Ginzburg-Landau for grid histories, the weighted
/// potential sum for grid-free (scalar/vector) histories.
fn state_energy(history: &SolveHistory, n: usize, eps: f64, sp: Option<&Spectral>) -> f64 {
    let u = history.state(n);
    match (history.grid(), sp) {
        (Some(_), Some(sp)) => gl_energy_with(sp, u, eps),
        (Some(g), None) => gl_energy_with(&Spectral::new(*g), u, eps),
        (None, _) => pairwise_sum_by(u.len(), &|i| double_well(u[i])) * history.weight(),
    }
}

fn base_record(history: &SolveHistory, n: usize, e: f64) -> EnergyRecord {
    let u = history.state(n);
    EnergyRecord {
        t: n as f64 * history.dt(),
        e,
        e_tilde: e,
        d_term: 0.0,
        stab_term: 0.0,
        max_abs_u: u.iter().fold(0.0, |m, v| m.max(v.abs())),
        mean_u: pairwise_sum_by(u.len(), &|i| u[i]) / u.len() as f64,
    }
}

fn check_step(history: &SolveHistory, n: usize) -> Result<()> {
    if n >= history.len() {
        return Err(Error::LengthMismatch(format!(
            "step {n} requested from a history of {} states",
            history.len()
        )));
    }
    Ok(())
}

/// `sum_{k=1}^{n-1} (b_{n-k-1} - b_{n-k}) |u^n - u^k|^2 / 2 + b_{n-1} |u^n - u^0|^2 / 2`
/// in the given metric.
fn l1_history_energy(history: &SolveHistory, w: &L1Weights, n: usize, metric: Metric<'_>) -> Result<f64> {
    check_step(history, n)?;
    if n == 0 {
        return Ok(0.0);
    }
    if w.len() < n {
        return Err(Error::LengthMismatch(format!("{} L1 weights for step {n}", w.len())));
    }
    let mut d = 0.5 * w.b(n - 1) * history.pair_norm_sq(n, 0, metric)?;
    for k in 1..n {
        d += 0.5 * (w.b(n - k - 1) - w.b(n - k)) * history.pair_norm_sq(n, k, metric)?;
    }
    Ok(d)
}

/// Discrete L1 history energy `D^n` (`D^0 = 0`, `D^1 = b_0 |u^1 - u^0|^2 / 2`).
#[allow(non_snake_case)]
pub fn l1_discrete_D(history: &SolveHistory, w: &L1Weights, n: usize) -> Result<f64> {
    l1_history_energy(history, w, n, Metric::L2)
}

/// Modified energy of the L1 Allen-Cahn scheme, `E(u^n) + D^n / gamma`.
pub fn l1_modified_energy(
    history: &SolveHistory,
    w: &L1Weights,
    gamma: f64,
    eps: f64,
    n: usize,
    sp: Option<&Spectral>,
) -> Result<EnergyRecord> {
    check_step(history, n)?;
    let mut rec = base_record(history, n, state_energy(history, n, eps, sp));
    rec.d_term = l1_discrete_D(history, w, n)? / gamma;
    rec.e_tilde = rec.e + rec.d_term;
    Ok(rec)
}

/// Modified energy of the L1 Cahn-Hilliard scheme: distances are H^-1
/// seminorms `|grad psi^{n,k}|` with `-lap psi^{n,k} = u^n - u^k`.
pub fn ch_modified_energy(
    history: &SolveHistory,
    w: &L1Weights,
    gamma: f64,
    eps: f64,
    n: usize,
    sp: &Spectral,
) -> Result<EnergyRecord> {
    check_step(history, n)?;
    let mut rec = base_record(history, n, state_energy(history, n, eps, Some(sp)));
    rec.d_term = l1_history_energy(history, w, n, Metric::HMinus1(sp))? / gamma;
    rec.e_tilde = rec.e + rec.d_term;
    Ok(rec)
}

/// The bracketed L2 history sum at step `n`, together with the sum of the
/// absolute values of its terms (for the sign check).
fn l2_bracket(history: &SolveHistory, co: &L2Coefficients, n: usize) -> Result<(f64, f64)> {
    let al = co.alpha().value();
    let mut terms = Vec::with_capacity(n + 2);
    terms.push(0.25 * al * history.pair_norm_sq(n, n - 1, Metric::L2)?);
    if n == 1 {
        terms.push(-0.5 * co.a(0) * history.pair_norm_sq(1, 0, Metric::L2)?);
    } else {
        for j in 1..n {
            terms.push(0.5 * (co.d(n - j) - co.d(n - j + 1)) * history.pair_norm_sq(n, j, Metric::L2)?);
        }
        terms.push(0.5 * co.c(n) * history.pair_norm_sq(n, 1, Metric::L2)?);
        terms.push(-0.5 * co.a(n) * history.pair_norm_sq(n, 0, Metric::L2)?);
    }
    let sum = terms.iter().sum();
    let mag = terms.iter().map(|t| t.abs()).sum();
    Ok((sum, mag))
}

fn l2_energy_checked(history: &SolveHistory, co: &L2Coefficients, n: usize) -> Result<f64> {
    check_step(history, n)?;
    if co.max_index() < n {
        return Err(Error::LengthMismatch(format!(
            "L2 coefficients up to {} for step {n}",
            co.max_index()
        )));
    }
    let (sum, mag) = l2_bracket(history, co, n)?;
    if sum < -1e-12 * mag {
        let detail = format!(
            "alpha={} a_n={:e} c_n={:e} d_1..={:?}",
            co.alpha().value(),
            co.a(n),
            co.c(n),
            (1..=n.min(8)).map(|j| co.d(j)).collect::<Vec<_>>()
        );
        return Err(Error::NegativeHistoryEnergy {
            step: n,
            value: sum,
            detail,
        });
    }
    Ok(co.prefactor(history.dt()) * sum.max(0.0))
}

/// Discrete L2 history energy for `n >= 2`:
/// `[alpha/4 |u^n-u^{n-1}|^2 + 1/2 sum_{j=1}^{n-1} (d_{n-j} - d_{n-j+1}) |u^n-u^j|^2
///   + c_n/2 |u^n-u^1|^2 - a_n/2 |u^n-u^0|^2] / (Gamma(3-alpha) dt^alpha)`.
#[allow(non_snake_case)]
pub fn l2_discrete_D(history: &SolveHistory, co: &L2Coefficients, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::param("n", format!("L2 history energy is defined for n >= 2, got {n}")));
    }
    l2_energy_checked(history, co, n)
}

/// First-step L2 history energy, `(alpha/4 + 1 - alpha) |u^1 - u^0|^2` over
/// the prefactor: the `n = 1` member of the same family with `a_0 = -(2 - 2 alpha)`.
#[allow(non_snake_case)]
pub fn l2_first_step_D(history: &SolveHistory, co: &L2Coefficients) -> Result<f64> {
    l2_energy_checked(history, co, 1)
}

/// `E(u^n) + D~^n / gamma + (3M^2 - 1)/2 |u^n - u^{n-1}|^2`.
#[allow(clippy::too_many_arguments)]
pub fn l2_modified_energy(
    history: &SolveHistory,
    co: &L2Coefficients,
    gamma: f64,
    eps: f64,
    m: f64,
    n: usize,
    sp: Option<&Spectral>,
) -> Result<EnergyRecord> {
    check_step(history, n)?;
    let mut rec = base_record(history, n, state_energy(history, n, eps, sp));
    if n == 0 {
        return Ok(rec);
    }
    let d = if n == 1 {
        l2_first_step_D(history, co)?
    } else {
        l2_discrete_D(history, co, n)?
    };
    rec.d_term = d / gamma;
    rec.stab_term = 0.5 * (3.0 * m * m - 1.0) * history.pair_norm_sq(n, n - 1, Metric::L2)?;
    rec.e_tilde = rec.e + rec.d_term + rec.stab_term;
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::GridDescriptor;
    use crate::fracops::{l1_weights, l2_coefficients, FractionalOrder};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn order(a: f64) -> FractionalOrder {
        FractionalOrder::new(a).unwrap()
    }

    #[test]
    fn gl_energy_examples() {
        let g = GridDescriptor::square_2pi(32).unwrap();
        assert_eq!(gl_energy(&ScalarField2D::constant(g, 1.0), 0.1), 0.0);
        assert_relative_eq!(gl_energy(&ScalarField2D::constant(g, 0.0), 0.1), PI * PI, max_relative = 1e-13);
        let s = ScalarField2D::from_fn(g, |x, _| x.sin());
        let expect = 0.01 * PI * PI + 3.0 * PI * PI / 8.0;
        assert_relative_eq!(gl_energy(&s, 0.1), expect, max_relative = 1e-12);
    }

    #[test]
    fn l1_d_examples() {
        let w = l1_weights(order(0.5), 1.0, 4).unwrap();
        let h = SolveHistory::scalar(1.0, &[0.0, 1.0]).unwrap();
        assert_eq!(l1_discrete_D(&h, &w, 0).unwrap(), 0.0);
        assert_relative_eq!(l1_discrete_D(&h, &w, 1).unwrap(), 0.564_189_583_547_756_3, max_relative = 1e-13);
        let c = SolveHistory::scalar(1.0, &[0.3; 5]).unwrap();
        for n in 0..5 {
            assert_eq!(l1_discrete_D(&c, &w, n).unwrap(), 0.0);
        }
        assert!(l1_discrete_D(&h, &w, 2).is_err());
    }

    #[test]
    fn l1_record_at_start_and_constant() {
        let g = GridDescriptor::square_2pi(16).unwrap();
        let u0 = ScalarField2D::from_fn(g, |x, y| 0.5 * x.sin() * y.cos());
        let mut h = SolveHistory::new(0.1, u0.clone()).unwrap();
        let w = l1_weights(order(0.4), 0.1, 4).unwrap();
        let r0 = l1_modified_energy(&h, &w, 2.0, 0.1, 0, None).unwrap();
        assert_eq!(r0.e_tilde, r0.e);
        for _ in 0..3 {
            h.push_field(u0.clone()).unwrap();
        }
        let r3 = l1_modified_energy(&h, &w, 2.0, 0.1, 3, None).unwrap();
        assert_eq!(r3.e_tilde, r0.e);
        assert_relative_eq!(r3.t, 0.3, max_relative = 1e-15);
    }

    #[test]
    fn l2_d_n2_hand_evaluation() {
        // (u0, u1, u2) = (0, 1, 1): only the d_1-d_2 term vanishes, |u2-u1| = 0
        let al = 0.5;
        let co = l2_coefficients(order(al), 2).unwrap();
        let h = SolveHistory::scalar(1.0, &[0.0, 1.0, 1.0]).unwrap();
        let pre = 1.0 / crate::special::gamma(2.5);
        let expect = pre * (0.0 + 0.0 + 0.0 - 0.5 * co.a(2) * 1.0);
        assert_relative_eq!(l2_discrete_D(&h, &co, 2).unwrap(), expect, max_relative = 1e-14);
        assert!(l2_discrete_D(&h, &co, 1).is_err());
    }

    #[test]
    fn l2_record_stabilization_coefficient() {
        let co = l2_coefficients(order(0.5), 3).unwrap();
        let h = SolveHistory::scalar(0.1, &[0.0, 0.0, 0.0, 1.0]).unwrap();
        let r = l2_modified_energy(&h, &co, 1.0, 0.1, 1.0, 3, None).unwrap();
        assert_relative_eq!(r.stab_term, 1.0, max_relative = 1e-15);
        let c = SolveHistory::scalar(0.1, &[0.2; 4]).unwrap();
        let r = l2_modified_energy(&c, &co, 1.0, 0.1, 1.0, 3, None).unwrap();
        assert_eq!(r.e_tilde, r.e);
    }

    #[test]
    fn ch_record_constant_history() {
        let g = GridDescriptor::square_2pi(16).unwrap();
        let sp = Spectral::new(g);
        let u0 = ScalarField2D::from_fn(g, |x, _| 0.3 * x.cos());
        let mut h = SolveHistory::new(0.1, u0.clone()).unwrap();
        let w = l1_weights(order(0.6), 0.1, 3).unwrap();
        let r0 = ch_modified_energy(&h, &w, 0.02, 0.05, 0, &sp).unwrap();
        assert_eq!(r0.e, r0.e_tilde);
        h.push_field(u0.clone()).unwrap();
        h.push_field(u0).unwrap();
        let r2 = ch_modified_energy(&h, &w, 0.02, 0.05, 2, &sp).unwrap();
        assert_eq!(r2.e_tilde, r0.e);
    }

    #[test]
    fn ch_record_flags_mass_change() {
        let g = GridDescriptor::square_2pi(16).unwrap();
        let sp = Spectral::new(g);
        let mut h = SolveHistory::new(0.1, ScalarField2D::constant(g, 0.0)).unwrap();
        h.push_field(ScalarField2D::constant(g, 0.5)).unwrap();
        let w = l1_weights(order(0.6), 0.1, 2).unwrap();
        assert!(matches!(
            ch_modified_energy(&h, &w, 0.02, 0.05, 1, &sp),
            Err(Error::MeanTooLarge { .. })
        ));
    }
}
