//! The continuous history functional
//! `D_p(t) = |u(t)-u(0)|^2 / (2 t^p) + p/2 int_0^t |u(t)-u(tau)|^2 / (t-tau)^(p+1) dtau`
//! on given trajectories, and the residual of the identity
//! `Gamma(1-a) <d^a u, u'> = D_a'(t) + a D_{a+1}(t)`.

use crate::fields::dist_sq;
use crate::fracops::FractionalOrder;
use crate::quadrature::GaussLegendre;
use crate::{Error, Result};

const GL_ORDER: usize = 8;

/// Graded composite Gauss-Legendre: `nodes` points at the coarsest level,
/// substitution `t - tau = t w^grading`, and `refinements` panel doublings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub nodes: usize,
    pub grading: f64,
    pub refinements: u32,
}

impl QuadratureSpec {
    pub fn new(nodes: usize, grading: f64, refinements: u32) -> Result<Self> {
        if nodes < 16 {
            return Err(Error::param("nodes", format!("need at least 16, got {nodes}")));
        }
        if !(grading >= 1.0) {
            return Err(Error::param("grading", format!("need >= 1, got {grading}")));
        }
        Ok(Self {
            nodes,
            grading,
            refinements,
        })
    }

    /// Grading `2/alpha`, which makes the Holder-continuous integrand smooth
    /// in the substituted variable.
    pub fn for_order(alpha: FractionalOrder, nodes: usize, refinements: u32) -> Result<Self> {
        Self::new(nodes, (2.0 / alpha.value()).max(1.0), refinements)
    }

    fn panels(&self, level: u32) -> usize {
        self.nodes.div_ceil(GL_ORDER) << level
    }
}

/// Something that can report `|u(t) - u(s)|^2`.
pub trait Trajectory {
    fn dist_sq(&self, t: f64, s: f64) -> f64;

    /// Time interval over which the trajectory is defined.
    fn span(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }

    /// Number of stored samples, for sampled trajectories.
    fn sample_count(&self) -> Option<usize> {
        None
    }
}

/// A scalar path given as a closure.
pub struct ScalarPath<F>(pub F);

impl<F: Fn(f64) -> f64> Trajectory for ScalarPath<F> {
    fn dist_sq(&self, t: f64, s: f64) -> f64 {
        let d = (self.0)(t) - (self.0)(s);
        d * d
    }
}

/// Stored states at increasing times, linearly interpolated in between.
#[derive(Debug, Clone)]
pub struct SampledTrajectory {
    times: Vec<f64>,
    states: Vec<Vec<f64>>,
    weight: f64,
}

impl SampledTrajectory {
    pub fn new(times: Vec<f64>, states: Vec<Vec<f64>>, weight: f64) -> Result<Self> {
        if times.len() != states.len() || times.len() < 2 {
            return Err(Error::InsufficientSamples(format!(
                "{} times for {} states",
                times.len(),
                states.len()
            )));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::param("times", "must be strictly increasing"));
        }
        Ok(Self { times, states, weight })
    }

    /// Scalar samples `(t_i, u_i)`.
    pub fn scalar(samples: &[(f64, f64)]) -> Result<Self> {
        let (t, u): (Vec<_>, Vec<_>) = samples.iter().map(|&(t, u)| (t, vec![u])).unzip();
        Self::new(t, u, 1.0)
    }

    fn at(&self, t: f64) -> Vec<f64> {
        let i = self.times.partition_point(|&x| x <= t).clamp(1, self.times.len() - 1);
        let (t0, t1) = (self.times[i - 1], self.times[i]);
        let theta = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
        self.states[i - 1]
            .iter()
            .zip(&self.states[i])
            .map(|(a, b)| a + theta * (b - a))
            .collect()
    }
}

impl Trajectory for SampledTrajectory {
    fn dist_sq(&self, t: f64, s: f64) -> f64 {
        dist_sq(&self.at(t), &self.at(s), self.weight)
    }

    fn span(&self) -> (f64, f64) {
        (self.times[0], *self.times.last().unwrap())
    }

    fn sample_count(&self) -> Option<usize> {
        Some(self.times.len())
    }
}

/// `int_0^t g(t - tau) (t - tau)^(-p-1) dtau` where `g(s) = O(s^vanish)`,
/// through `s = t w^q` with `q` large enough that the transformed integrand
/// vanishes at `w = 0`.
fn graded_singular<G: Fn(f64) -> f64>(g: G, t: f64, p: f64, vanish: f64, grading: f64, panels: usize) -> f64 {
    let q = grading.max(2.0 / (vanish - p));
    let gl = GaussLegendre::new(GL_ORDER);
    let integrand = |w: f64| {
        let s = t * w.powf(q);
        g(s) * w.powf(-q * p - 1.0)
    };
    q * t.powf(-p) * gl.integrate_composite(integrand, 0.0, 1.0, panels)
}

fn check_coverage<T: Trajectory + ?Sized>(traj: &T, t: f64, spec: &QuadratureSpec) -> Result<()> {
    if !(t > 0.0) {
        return Err(Error::param("t", format!("must be positive, got {t}")));
    }
    let (lo, hi) = traj.span();
    if lo > 0.0 || hi < t {
        return Err(Error::InsufficientSamples(format!(
            "trajectory covers [{lo}, {hi}], need [0, {t}]"
        )));
    }
    if let Some(n) = traj.sample_count() {
        if n < spec.nodes {
            return Err(Error::InsufficientSamples(format!(
                "{n} samples cannot resolve {} quadrature nodes",
                spec.nodes
            )));
        }
    }
    Ok(())
}

/// `D_p(t)` for a general exponent `p` (`p = alpha` or `alpha + 1`), at the
/// finest refinement level.
pub fn d_functional_quadrature<T: Trajectory + ?Sized>(traj: &T, p: f64, t: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_coverage(traj, t, spec)?;
    Ok(d_functional_level(traj, p, t, spec, spec.refinements))
}

fn d_functional_level<T: Trajectory + ?Sized>(traj: &T, p: f64, t: f64, spec: &QuadratureSpec, level: u32) -> f64 {
    let head = traj.dist_sq(t, 0.0) / (2.0 * t.powf(p));
    let integral = graded_singular(|s| traj.dist_sq(t, t - s), t, p, 2.0, spec.grading, spec.panels(level));
    head + 0.5 * p * integral
}

/// Continuous history functional `D_alpha(t)` of a trajectory.
pub fn d_alpha_quadrature<T: Trajectory + ?Sized>(
    traj: &T,
    alpha: FractionalOrder,
    t: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    d_functional_quadrature(traj, alpha.value(), t, spec)
}

/// Pointwise derivative of a smooth path; one-sided near the origin so the
/// path is never sampled at negative times.
fn path_derivative<F: Fn(f64) -> f64>(u: &F, x: f64, h: f64) -> f64 {
    if x >= h {
        (u(x + h) - u(x - h)) / (2.0 * h)
    } else {
        (-3.0 * u(x) + 4.0 * u(x + h) - u(x + 2.0 * h)) / (2.0 * h)
    }
}

/// `|Gamma(1-a) d^a u(t) u'(t) - (D_a'(t) + a D_{a+1}(t))|` for a smooth
/// scalar path. The Caputo derivative uses the integrated-by-parts form
/// `(u(t)-u(0))/t^a + a int (u(t)-u(tau))/(t-tau)^(a+1)`, and `D_a'` is
/// differentiated under the integral sign, so only pointwise values of `u'`
/// are approximated (central differences with a fixed step).
///
/// The graded substitution samples `u(t) - u(t-s)` at `s` far below the
/// resolution of `t`; short increments are therefore integrated from `u'`
/// instead of being formed by subtraction.
pub fn lemma31_residual<F: Fn(f64) -> f64>(u: F, alpha: FractionalOrder, t: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::param("t", format!("must be positive, got {t}")));
    }
    let a = alpha.value();
    let panels = spec.panels(spec.refinements);
    let h = 6e-6 * t;
    let du = |x: f64| path_derivative(&u, x, h);
    let gl = GaussLegendre::new(GL_ORDER);
    let ut = u(t);
    let u0 = u(0.0);
    let dut = du(t);
    let inc = |s: f64| {
        if s < 1e-2 * t {
            s * gl.integrate_composite(|th| du(t - s * th), 0.0, 1.0, 1)
        } else {
            ut - u(t - s)
        }
    };
    let sing = |g: &dyn Fn(f64) -> f64, p: f64, vanish: f64| graded_singular(g, t, p, vanish, spec.grading, panels);

    let caputo_scaled = (ut - u0) / t.powf(a) + a * sing(&|s| inc(s), a, 1.0);
    let lhs = caputo_scaled * dut;

    // d/dt of (u(t)-u(0))^2 / (2 t^a) + a/2 int_0^t (u(t)-u(t-s))^2 s^(-a-1) ds;
    // the boundary term of the integral cancels the t-derivative of 1/t^a
    let d_prime = (ut - u0) * dut / t.powf(a) + a * sing(&|s| inc(s) * (dut - du(t - s)), a, 2.0);
    let d_next = (ut - u0).powi(2) / (2.0 * t.powf(a + 1.0)) + 0.5 * (a + 1.0) * sing(&|s| inc(s).powi(2), a + 1.0, 2.0);
    Ok((lhs - (d_prime + a * d_next)).abs())
}
