//! Randomized and deterministic checks of the discrete inequalities behind
//! the energy estimates. Each suite returns a [`SuiteReport`] instead of
//! panicking, so the same code backs unit tests and the `verify` command.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::energy::{l1_discrete_D, l2_discrete_D, l2_first_step_D, lemma31_residual, QuadratureSpec};
use crate::fracops::{l1_apply, l1_weights, l2_apply, l2_coefficients, FractionalOrder, SolveHistory};
use crate::special::gamma;
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: String,
    pub cases: usize,
    pub violations: usize,
    /// Smallest normalized slack `(lhs - rhs) / scale` seen; negative means a violation.
    pub worst_margin: f64,
    /// Descriptions of the first few violations.
    pub details: Vec<String>,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            cases: 0,
            violations: 0,
            worst_margin: f64::INFINITY,
            details: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0 && self.cases > 0
    }

    /// Records `lhs >= rhs` up to `rel * scale`.
    fn check(&mut self, lhs: f64, rhs: f64, scale: f64, rel: f64, what: impl FnOnce() -> String) {
        self.cases += 1;
        let scale = scale.max(f64::MIN_POSITIVE);
        let margin = (lhs - rhs) / scale;
        self.worst_margin = self.worst_margin.min(margin);
        if !(margin >= -rel) {
            self.violations += 1;
            if self.details.len() < 5 {
                self.details.push(format!("{}: lhs={lhs:e} rhs={rhs:e}", what()));
            }
        }
    }

    fn fail(&mut self, what: String) {
        self.cases += 1;
        self.violations += 1;
        if self.details.len() < 5 {
            self.details.push(what);
        }
    }
}

impl std::fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: {} cases, {} violations, worst margin {:.3e}",
            self.name, self.cases, self.violations, self.worst_margin
        )?;
        for d in &self.details {
            write!(f, "\n  {d}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzConfig {
    pub alphas: Vec<f64>,
    /// Random histories per order.
    pub trials: usize,
    pub max_n: usize,
    pub seed: u64,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        Self {
            alphas: vec![0.3, 0.5, 0.8],
            trials: 10_000,
            max_n: 20,
            seed: 20_240_601,
        }
    }
}

/// Uniform in `[0, 1)` from the top 53 bits.
fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Random scalar history of `n + 1` states with a random step size. Shapes
/// alternate between independent values, random walks with occasional
/// jumps, and nearly constant tails, across several magnitudes.
fn random_history(rng: &mut ChaCha8Rng, n: usize) -> Result<SolveHistory> {
    let dt = 10f64.powf(-3.0 + 3.0 * unit(rng));
    let scale = 10f64.powf(-2.0 + 4.0 * unit(rng));
    let shape = rng.next_u32() % 3;
    let mut u = Vec::with_capacity(n + 1);
    let mut x = scale * (2.0 * unit(rng) - 1.0);
    u.push(x);
    for k in 1..=n {
        x = match shape {
            0 => scale * (2.0 * unit(rng) - 1.0),
            1 => {
                let jump = if unit(rng) < 0.1 { 10.0 } else { 1.0 };
                x + jump * scale * 0.1 * (2.0 * unit(rng) - 1.0)
            }
            _ if k * 2 > n => x + scale * 1e-6 * (2.0 * unit(rng) - 1.0),
            _ => scale * (2.0 * unit(rng) - 1.0),
        };
        u.push(x);
    }
    SolveHistory::scalar(dt, &u)
}

fn order(a: f64) -> Result<FractionalOrder> {
    FractionalOrder::new(a)
}

/// `<dbar^a u^n, u^n - u^{n-1}> >= D^n - D^{n-1}` on random scalar histories.
pub fn fuzz_l1_inequality(cfg: &FuzzConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("L1 energy inequality");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for &a in &cfg.alphas {
        let al = order(a)?;
        for _ in 0..cfg.trials {
            let n = 1 + (rng.next_u32() as usize) % cfg.max_n;
            let h = random_history(&mut rng, n)?;
            let w = l1_weights(al, h.dt(), n)?;
            let du = h.state(n)[0] - h.state(n - 1)[0];
            let lhs = l1_apply(&h, &w)?[0] * du;
            let (dn, dm) = (l1_discrete_D(&h, &w, n)?, l1_discrete_D(&h, &w, n - 1)?);
            let scale = lhs.abs() + dn + dm;
            rep.check(lhs, dn - dm, scale, 1e-12, || format!("alpha={a} n={n} dt={}", h.dt()));
        }
    }
    Ok(rep)
}

/// `<L_n u, du^n> >= D~^n - D~^{n-1} + a/(Gamma(3-a) dt^a) |du^n|^2` for
/// `n >= 2` on random scalar histories.
pub fn fuzz_l2_inequality(cfg: &FuzzConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("L2 energy inequality");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    for &a in &cfg.alphas {
        let al = order(a)?;
        let co = l2_coefficients(al, cfg.max_n.max(2))?;
        for _ in 0..cfg.trials {
            let n = 2 + (rng.next_u32() as usize) % (cfg.max_n.max(2) - 1);
            let h = random_history(&mut rng, n)?;
            let du = h.state(n)[0] - h.state(n - 1)[0];
            let lhs = l2_apply(&h, &co, n)?[0] * du;
            let dn = l2_discrete_D(&h, &co, n)?;
            let dm = if n == 2 {
                l2_first_step_D(&h, &co)?
            } else {
                l2_discrete_D(&h, &co, n - 1)?
            };
            let extra = a / (gamma(3.0 - a) * h.dt().powf(a)) * du * du;
            let scale = lhs.abs() + dn + dm + extra;
            rep.check(lhs, dn - dm + extra, scale, 1e-12, || format!("alpha={a} n={n} dt={}", h.dt()));
        }
    }
    Ok(rep)
}

/// L1 weights positive and strictly decreasing; L2 coefficient identities
/// and inequalities; `r1 > 0`.
pub fn coefficient_suite(alphas: &[f64], kmax: usize) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("coefficients");
    for &a in alphas {
        let al = order(a)?;
        let w = l1_weights(al, 1.0, kmax + 1)?;
        for k in 0..=kmax {
            let (bk, next) = (w.b(k), if k < kmax { w.b(k + 1) } else { 0.0 });
            rep.check(bk - next, 0.0, bk, 0.0, || format!("alpha={a}: b_{k} <= b_{}", k + 1));
            if k < kmax && bk <= next {
                rep.fail(format!("alpha={a}: b_{k} not strictly above b_{}", k + 1));
            }
        }
        let co = l2_coefficients(al, kmax)?;
        rep.check(co.r1(), 0.0, 1.0, 0.0, || format!("alpha={a}: r1"));
        if co.r1() <= 0.0 {
            rep.fail(format!("alpha={a}: r1 = {} not positive", co.r1()));
        }
        for j in 1..=kmax {
            let s = co.a(j) + co.b(j) + co.c(j);
            let mag = co.a(j).abs() + co.b(j).abs() + co.c(j).abs();
            rep.check(1e-11 * mag.max(1.0), s.abs(), 1.0, 0.0, || format!("alpha={a}: a+b+c at j={j}"));
        }
        for v in co.violations() {
            rep.fail(format!("alpha={} j={}: {} ({:e} vs {:e})", v.alpha, v.j, v.relation, v.lhs, v.rhs));
        }
        rep.cases += 4 * kmax;
    }
    Ok(rep)
}

/// Residual of the continuous identity at each refinement level.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualSeries {
    pub label: String,
    pub alpha: f64,
    pub residuals: Vec<f64>,
}

/// Residuals below this are treated as converged.
pub const RESIDUAL_FLOOR: f64 = 1e-9;

impl ResidualSeries {
    /// Nonincreasing until the residual reaches the roundoff floor `1e-9`.
    pub fn decreasing(&self) -> bool {
        self.residuals.windows(2).all(|w| w[1] <= w[0] || w[1] <= RESIDUAL_FLOOR)
    }

    pub fn last(&self) -> f64 {
        *self.residuals.last().unwrap_or(&f64::INFINITY)
    }
}

/// Residuals for `u = t^2` and `u = sin t` at `t = 1` under `levels`
/// refinements of a 16-node graded rule.
pub fn continuous_identity_suite(alphas: &[f64], levels: u32) -> Result<Vec<ResidualSeries>> {
    let paths: [(&str, fn(f64) -> f64); 2] = [("t^2", |t| t * t), ("sin t", f64::sin)];
    let mut out = Vec::new();
    for &a in alphas {
        let al = order(a)?;
        for (label, u) in paths {
            let residuals = (0..=levels)
                .map(|l| lemma31_residual(u, al, 1.0, &QuadratureSpec::for_order(al, 16, l)?))
                .collect::<Result<Vec<_>>>()?;
            out.push(ResidualSeries {
                label: label.to_string(),
                alpha: a,
                residuals,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn energy_inequalities_hold_on_small_fuzz() {
        let cfg = FuzzConfig {
            trials: 300,
            ..FuzzConfig::default()
        };
        let r1 = fuzz_l1_inequality(&cfg).unwrap();
        let r3 = fuzz_l2_inequality(&cfg).unwrap();
        assert!(r1.passed(), "{r1}");
        assert!(r3.passed(), "{r3}");
        assert_eq!(r1.cases, 900);
    }

    #[test]
    fn coefficients_pass() {
        let alphas: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
        let r = coefficient_suite(&alphas, 64).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn report_records_violations() {
        let mut r = SuiteReport::new("x");
        r.check(1.0, 2.0, 1.0, 1e-12, || "bad".into());
        r.check(2.0, 1.0, 1.0, 1e-12, || "good".into());
        assert_eq!((r.cases, r.violations), (2, 1));
        assert!(!r.passed());
        assert!(r.to_string().contains("bad"));
    }

    #[test]
    fn residuals_shrink() {
        for s in continuous_identity_suite(&[0.3, 0.7], 3).unwrap() {
            assert!(s.decreasing(), "{s:?}");
            assert!(s.last() < 1e-8, "{s:?}");
        }
    }
}
