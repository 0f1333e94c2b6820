use super::{FractionalOrder, SolveHistory};
use crate::special::{forward_power_diff, gamma};
use crate::{Error, Result};

/// Coefficients of the L2 operator, indexed from `j = 1` up to `n`.
///
/// Index 0 of `a` stores `-(2 - 2 alpha)`, the value for which
/// `d_1 = c_1 - a_0` continues the `d_j = c_j - a_{j-1}` recurrence; it is
/// what the first-step history energy uses.
#[derive(Debug, Clone, PartialEq)]
pub struct L2Coefficients {
    alpha: FractionalOrder,
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    d: Vec<f64>,
    r1: f64,
}

/// A coefficient inequality that failed to hold at index `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientViolation {
    pub alpha: f64,
    pub j: usize,
    pub relation: &'static str,
    pub lhs: f64,
    pub rhs: f64,
}

/// `c_j` without cancellation. For large `j` the difference between the
/// exact integral of `(2-a) x^(1-a)` over `[j, j+1]` and its trapezoid rule
/// is summed as a series in `1/j`.
fn c_coeff(alpha: f64, j: usize) -> f64 {
    let e = 1.0 - alpha;
    let jf = j as f64;
    if j < 8 {
        return -0.5 * (2.0 - alpha) * ((jf + 1.0).powf(e) + jf.powf(e)) + (jf + 1.0).powf(2.0 - alpha)
            - jf.powf(2.0 - alpha);
    }
    let h = 1.0 / jf;
    // binom(e, m-1) carried incrementally, starting at m = 3
    let mut binom = e * (e - 1.0) / 2.0;
    let mut hp = h * h * h;
    let mut sum = 0.0;
    for m in 3..200 {
        let mf = m as f64;
        let term = binom * (1.0 / mf - 0.5) * hp;
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
        binom *= (e - (mf - 1.0)) / mf;
        hp *= h;
    }
    (2.0 - alpha) * jf.powf(e + 1.0) * sum
}

impl L2Coefficients {
    pub fn alpha(&self) -> FractionalOrder {
        self.alpha
    }

    /// Largest index available.
    pub fn max_index(&self) -> usize {
        self.c.len() - 1
    }

    pub fn a(&self, j: usize) -> f64 {
        self.a[j]
    }

    pub fn b(&self, j: usize) -> f64 {
        assert!(j >= 1);
        self.b[j]
    }

    pub fn c(&self, j: usize) -> f64 {
        assert!(j >= 1);
        self.c[j]
    }

    pub fn d(&self, j: usize) -> f64 {
        assert!(j >= 1);
        self.d[j]
    }

    pub fn r1(&self) -> f64 {
        self.r1
    }

    /// `1 / (Gamma(3 - alpha) dt^alpha)`.
    pub fn prefactor(&self, dt: f64) -> f64 {
        let a = self.alpha.value();
        1.0 / (gamma(3.0 - a) * dt.powf(a))
    }

    pub fn extend_to(&mut self, n: usize) {
        let al = self.alpha.value();
        for j in self.c.len()..=n {
            let c = c_coeff(al, j);
            let a = c - (2.0 - al) * forward_power_diff(j as f64, 1.0 - al);
            self.a.push(a);
            self.b.push(-a - c);
            self.c.push(c);
            let d = if j == 1 { c + 2.0 - 2.0 * al } else { c - self.a[j - 1] };
            self.d.push(d);
        }
    }

    /// Checks `a_j < 0`, `c_{j-1} >= c_j`, `d_{j-1} - d_j >= c_{j-1} - c_j`
    /// and `d_j - d_{j+1} <= d_{j-1} - d_j` over the stored range, with a
    /// roundoff allowance.
    pub fn violations(&self) -> Vec<CoefficientViolation> {
        let al = self.alpha.value();
        let n = self.max_index();
        let mut out = Vec::new();
        let mut push = |j, relation, lhs: f64, rhs: f64, ok: bool| {
            if !ok {
                out.push(CoefficientViolation {
                    alpha: al,
                    j,
                    relation,
                    lhs,
                    rhs,
                });
            }
        };
        let slack = |x: f64, y: f64| 1e-13 * x.abs().max(y.abs());
        for j in 1..=n {
            push(j, "a_j < 0", self.a[j], 0.0, self.a[j] < 0.0);
            if j >= 2 {
                let (l, r) = (self.c[j - 1], self.c[j]);
                push(j, "c_{j-1} >= c_j", l, r, l >= r - slack(l, r));
                let (l, r) = (self.d[j - 1] - self.d[j], self.c[j - 1] - self.c[j]);
                push(j, "d_{j-1} - d_j >= c_{j-1} - c_j", l, r, l >= r - slack(self.d[j], self.d[j - 1]));
            }
            if j >= 2 && j < n {
                let (l, r) = (self.d[j] - self.d[j + 1], self.d[j - 1] - self.d[j]);
                push(j, "d_j - d_{j+1} <= d_{j-1} - d_j", l, r, l <= r + slack(self.d[j], self.d[j - 1]));
            }
        }
        out
    }
}

/// Coefficients up to index `n` (`n >= 2`).
pub fn l2_coefficients(alpha: FractionalOrder, n: usize) -> Result<L2Coefficients> {
    if n < 2 {
        return Err(Error::param("n", format!("L2 coefficients need n >= 2, got {n}")));
    }
    let al = alpha.value();
    let mut co = L2Coefficients {
        alpha,
        a: vec![-(2.0 - 2.0 * al)],
        b: vec![0.0],
        c: vec![0.0],
        d: vec![0.0],
        r1: 2.0 + 0.5 * al - (0.5 * al + 1.0) * 2f64.powf(1.0 - al),
    };
    co.extend_to(n);
    Ok(co)
}

fn axpy_diff(out: &mut [f64], s: f64, hi: &[f64], lo: &[f64]) {
    for ((o, a), b) in out.iter_mut().zip(hi).zip(lo) {
        *o += s * (a - b);
    }
}

/// Explicit part of the reformulated operator at step `n >= 2`, without the
/// prefactor: `-a/2 du^{n-1} + sum_{j=2}^{n} d_j du^{n-j+1} - c_n du^1`.
/// Only `u^0 .. u^{n-1}` are read.
pub fn l2_history_part(history: &SolveHistory, co: &L2Coefficients, n: usize) -> Result<Vec<f64>> {
    if n < 2 || n > history.len() {
        return Err(Error::LengthMismatch(format!(
            "history of {} states cannot start L2 step {n}",
            history.len()
        )));
    }
    if co.max_index() < n {
        return Err(Error::LengthMismatch(format!(
            "L2 coefficients up to {} for step {n}",
            co.max_index()
        )));
    }
    let al = co.alpha.value();
    let mut out = vec![0.0; history.dim()];
    axpy_diff(&mut out, -0.5 * al, history.state(n - 1), history.state(n - 2));
    for j in 2..=n {
        let m = n - j + 1;
        axpy_diff(&mut out, co.d(j), history.state(m), history.state(m - 1));
    }
    axpy_diff(&mut out, -co.c(n), history.state(1), history.state(0));
    Ok(out)
}

/// The L2 approximation at step `n` (`1 <= n < history.len()`).
pub fn l2_apply(history: &SolveHistory, co: &L2Coefficients, n: usize) -> Result<Vec<f64>> {
    if n == 0 || n >= history.len() {
        return Err(Error::LengthMismatch(format!(
            "step {n} requested from a history of {} states",
            history.len()
        )));
    }
    let pre = co.prefactor(history.dt());
    let al = co.alpha.value();
    let mut out = vec![0.0; history.dim()];
    if n == 1 {
        axpy_diff(&mut out, pre * (co.r1 + co.d(1)), history.state(1), history.state(0));
        return Ok(out);
    }
    let rest = l2_history_part(history, co, n)?;
    let lead = 1.5 * al + co.d(1);
    for ((o, r), (a, b)) in out
        .iter_mut()
        .zip(&rest)
        .zip(history.state(n).iter().zip(history.state(n - 1)))
    {
        *o = pre * (lead * (a - b) + r);
    }
    Ok(out)
}
