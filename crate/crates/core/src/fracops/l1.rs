use super::{FractionalOrder, SolveHistory};
use crate::special::{forward_power_diff, gamma};
use crate::{Error, Result};

/// L1 weights `b_k = ((k+1)^(1-a) - k^(1-a)) / (Gamma(2-a) dt^a)`.
///
/// The weights do not depend on the step index, so one table serves every
/// `n <= len()`; [`L1Weights::extend_to`] grows it in place.
#[derive(Debug, Clone, PartialEq)]
pub struct L1Weights {
    alpha: FractionalOrder,
    dt: f64,
    b: Vec<f64>,
}

impl L1Weights {
    pub fn alpha(&self) -> FractionalOrder {
        self.alpha
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    pub fn b(&self, k: usize) -> f64 {
        self.b[k]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.b
    }

    /// `1 / (Gamma(2 - alpha) dt^alpha)`.
    pub fn prefactor(&self) -> f64 {
        let a = self.alpha.value();
        1.0 / (gamma(2.0 - a) * self.dt.powf(a))
    }

    pub fn extend_to(&mut self, n: usize) {
        let e = 1.0 - self.alpha.value();
        let scale = self.prefactor();
        for k in self.b.len()..n {
            self.b.push(scale * forward_power_diff(k as f64, e));
        }
    }
}

/// Weights `b_0 .. b_{n-1}` for step `n`.
pub fn l1_weights(alpha: FractionalOrder, dt: f64, n: usize) -> Result<L1Weights> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::param("dt", format!("must be positive, got {dt}")));
    }
    if n == 0 {
        return Err(Error::param("n", "need at least one step"));
    }
    let mut w = L1Weights {
        alpha,
        dt,
        b: Vec::with_capacity(n),
    };
    w.extend_to(n);
    Ok(w)
}

fn check(history: &SolveHistory, w: &L1Weights, n: usize) -> Result<()> {
    if n == 0 || n >= history.len() {
        return Err(Error::LengthMismatch(format!(
            "step {n} requested from a history of {} states",
            history.len()
        )));
    }
    if w.len() < n {
        return Err(Error::LengthMismatch(format!("{} L1 weights for step {n}", w.len())));
    }
    if (w.dt - history.dt()).abs() > 1e-14 * history.dt() {
        return Err(Error::LengthMismatch(format!(
            "weights built for dt = {}, history has dt = {}",
            w.dt,
            history.dt()
        )));
    }
    Ok(())
}

/// `sum_{k=1}^{n} b_{n-k} (u^k - u^{k-1})` at the newest step `n`.
pub fn l1_apply(history: &SolveHistory, w: &L1Weights) -> Result<Vec<f64>> {
    let n = history.len().saturating_sub(1);
    check(history, w, n)?;
    let mut out = vec![0.0; history.dim()];
    for k in 1..=n {
        let (uk, ukm) = (history.state(k), history.state(k - 1));
        let bk = w.b(n - k);
        for ((o, a), b) in out.iter_mut().zip(uk).zip(ukm) {
            *o += bk * (a - b);
        }
    }
    Ok(out)
}

/// The same operator in difference form:
/// `sum_{k=1}^{n-1} (b_{n-k-1} - b_{n-k}) (u^n - u^k) + b_{n-1} (u^n - u^0)`.
pub fn l1_apply_recast(history: &SolveHistory, w: &L1Weights) -> Result<Vec<f64>> {
    let n = history.len().saturating_sub(1);
    check(history, w, n)?;
    let un = history.state(n);
    let mut out = vec![0.0; history.dim()];
    for k in 0..n {
        let coef = if k == 0 { w.b(n - 1) } else { w.b(n - k - 1) - w.b(n - k) };
        for ((o, a), b) in out.iter_mut().zip(un).zip(history.state(k)) {
            *o += coef * (a - b);
        }
    }
    Ok(out)
}

/// Explicit part of the operator at step `n`: `sum_{k=1}^{n-1} b_{n-k} (u^k - u^{k-1})`.
/// Only `u^0 .. u^{n-1}` are read.
pub fn l1_history_sum(history: &SolveHistory, w: &L1Weights, n: usize) -> Result<Vec<f64>> {
    if n == 0 || n > history.len() {
        return Err(Error::LengthMismatch(format!(
            "history of {} states cannot start step {n}",
            history.len()
        )));
    }
    if w.len() < n {
        return Err(Error::LengthMismatch(format!("{} L1 weights for step {n}", w.len())));
    }
    let mut out = vec![0.0; history.dim()];
    for k in 1..n {
        let bk = w.b(n - k);
        for ((o, a), b) in out.iter_mut().zip(history.state(k)).zip(history.state(k - 1)) {
            *o += bk * (a - b);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn order(a: f64) -> FractionalOrder {
        FractionalOrder::new(a).unwrap()
    }

    #[test]
    fn weight_examples() {
        let w = l1_weights(order(0.5), 1.0, 2).unwrap();
        assert_relative_eq!(w.b(0), 1.128_379_167_095_512_6, max_relative = 1e-13);
        assert_relative_eq!(w.b(1), 0.467_389_954_510_218_25, max_relative = 1e-12);
    }

    #[test]
    fn weights_near_alpha_one() {
        let dt = 0.1;
        let w = l1_weights(order(1.0 - 1e-9), dt, 5).unwrap();
        assert_relative_eq!(w.b(0), 1.0 / dt, max_relative = 1e-7);
        for k in 1..5 {
            assert!(w.b(k) < 1e-7);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(l1_weights(order(0.5), 0.0, 3).is_err());
        assert!(l1_weights(order(0.5), -1.0, 3).is_err());
        assert!(l1_weights(order(0.5), 1.0, 0).is_err());
    }

    #[test]
    fn strictly_decreasing_and_positive() {
        for i in 1..10 {
            let w = l1_weights(order(i as f64 / 10.0), 0.01, 1024).unwrap();
            for k in 0..1023 {
                assert!(w.b(k) > w.b(k + 1), "alpha={} k={k}", i as f64 / 10.0);
            }
            assert!(w.b(1023) > 0.0);
        }
    }

    #[test]
    fn apply_constant_history_is_zero() {
        let h = SolveHistory::scalar(0.1, &[2.0; 6]).unwrap();
        let w = l1_weights(order(0.4), 0.1, 5).unwrap();
        assert_eq!(l1_apply(&h, &w).unwrap(), vec![0.0]);
    }

    #[test]
    fn apply_single_step() {
        let h = SolveHistory::scalar(0.5, &[0.25, 1.0]).unwrap();
        let w = l1_weights(order(0.3), 0.5, 1).unwrap();
        assert_relative_eq!(l1_apply(&h, &w).unwrap()[0], w.b(0) * 0.75, max_relative = 1e-15);
    }

    #[test]
    fn apply_reports_mismatch() {
        let h = SolveHistory::scalar(0.5, &[0.0, 1.0, 2.0]).unwrap();
        let w = l1_weights(order(0.3), 0.5, 1).unwrap();
        assert!(l1_apply(&h, &w).is_err());
        let h0 = SolveHistory::scalar(0.5, &[0.0]).unwrap();
        assert!(l1_apply(&h0, &w).is_err());
    }

    #[test]
    fn history_sum_plus_newest_term_equals_apply() {
        let vals = [0.1, -0.4, 0.9, 0.3, 0.35];
        let h = SolveHistory::scalar(0.2, &vals).unwrap();
        let w = l1_weights(order(0.6), 0.2, 4).unwrap();
        let full = l1_apply(&h, &w).unwrap()[0];
        let explicit = l1_history_sum(&h, &w, 4).unwrap()[0];
        assert_relative_eq!(explicit + w.b(0) * (vals[4] - vals[3]), full, max_relative = 1e-14);
    }
}
