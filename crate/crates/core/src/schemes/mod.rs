//! Time steppers for the time-fractional Allen-Cahn and Cahn-Hilliard
//! equations on periodic grids.
//!
//! Each step treats diffusion implicitly and the nonlinearity explicitly,
//! with a stabilization term. The implicit operator is diagonal in Fourier
//! space, so a step is one forward transform, a pointwise division and one
//! inverse transform.
//!
//! * `L1Ac`: `dbar^a u^n = gamma (eps^2 lap u^n - f(u^{n-1}) - S (u^n - u^{n-1}))`
//! * `L2Ac`: `L^a_n u = gamma (eps^2 lap u^n - 2 f~(u^{n-1}) + f~(u^{n-2}) - S dt (u^n - u^{n-1}))`,
//!   started by one `L1Ac` step
//! * `L1Ch`: `dbar^a u^n = gamma lap (-eps^2 lap u^n + f~(u^{n-1}) + S (u^n - u^{n-1}))`

mod potential;
mod run;

pub use potential::{cubic_f, lipschitz_bound, truncated_F, truncated_f};
pub use run::{run, RunObserver, RunOutput};

use num_complex::Complex64;

use crate::fields::{ScalarField2D, Spectral};
use crate::fracops::{l1_history_sum, l1_weights, l2_coefficients, l2_history_part, FractionalOrder, L1Weights, L2Coefficients, SolveHistory};
use crate::special::gamma as gamma_fn;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    L1Ac,
    L2Ac,
    L1Ch,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::L1Ac => "l1-ac",
            Scheme::L2Ac => "l2-ac",
            Scheme::L1Ch => "l1-ch",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "l1-ac" => Ok(Scheme::L1Ac),
            "l2-ac" => Ok(Scheme::L2Ac),
            "l1-ch" => Ok(Scheme::L1Ch),
            _ => Err(Error::param("scheme", format!("unknown scheme `{s}`"))),
        }
    }
}

/// Which explicit nonlinearity the steppers use. `Off` replaces it by zero,
/// leaving the linear problem `d^a u = gamma eps^2 lap u` (used to compare
/// against Mittag-Leffler solutions).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Nonlinearity {
    #[default]
    Potential,
    Off,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig {
    pub alpha: FractionalOrder,
    pub gamma: f64,
    pub eps: f64,
    pub dt: f64,
    pub s: f64,
    pub m: f64,
    pub scheme: Scheme,
    pub n_steps: usize,
    pub energy_tracking: bool,
    /// Evaluate the modified energy every `energy_stride` steps (and at the end).
    pub energy_stride: usize,
    /// Reject configurations outside the proven energy-stability regime.
    pub require_guarantee: bool,
    pub nonlinearity: Nonlinearity,
}

impl SchemeConfig {
    pub fn new(scheme: Scheme, alpha: FractionalOrder, gamma: f64, eps: f64, dt: f64, s: f64) -> Self {
        Self {
            alpha,
            gamma,
            eps,
            dt,
            s,
            m: 1.0,
            scheme,
            n_steps: 0,
            energy_tracking: true,
            energy_stride: 1,
            require_guarantee: false,
            nonlinearity: Nonlinearity::Potential,
        }
    }

    pub fn with_steps(mut self, n: usize) -> Self {
        self.n_steps = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::param(name, format!("must be positive, got {v}")))
            }
        };
        positive("gamma", self.gamma)?;
        positive("eps", self.eps)?;
        positive("dt", self.dt)?;
        if !(self.s >= 0.0 && self.s.is_finite()) {
            return Err(Error::param("S", format!("must be nonnegative, got {}", self.s)));
        }
        if !(self.m >= 1.0 && self.m.is_finite()) {
            return Err(Error::param("M", format!("must be at least 1, got {}", self.m)));
        }
        if self.energy_stride == 0 {
            return Err(Error::param("energy_stride", "must be at least 1"));
        }
        if self.require_guarantee && !self.guarantee_applies() {
            return Err(Error::param(
                "S",
                format!(
                    "S = {} is below the stability threshold {} for {}",
                    self.s,
                    self.stability_threshold(),
                    self.scheme.name()
                ),
            ));
        }
        Ok(())
    }

    /// Smallest `S` for which the modified energy is proven nonincreasing.
    pub fn stability_threshold(&self) -> f64 {
        let l = lipschitz_bound(self.m);
        match self.scheme {
            Scheme::L1Ac => 2.0,
            Scheme::L2Ac => stab_bound_l2(self.alpha, self.gamma, self.m),
            Scheme::L1Ch => 0.5 * l,
        }
    }

    pub fn guarantee_applies(&self) -> bool {
        self.s >= self.stability_threshold()
    }

    /// The L1 Allen-Cahn step keeps the cubic `f` when `S >= 2`, where the
    /// maximum principle holds; everything else uses the truncated `f~`.
    fn l1_ac_uses_cubic(&self) -> bool {
        self.s >= 2.0
    }
}

/// Sufficient stabilization for the L2 scheme:
/// `3 a L / (2 (1 + a)) * (3 gamma Gamma(3 - a) L / (2 a (1 + a)))^(1/a)`, `L = 3M^2 - 1`.
pub fn stab_bound_l2(alpha: FractionalOrder, gamma: f64, m: f64) -> f64 {
    let a = alpha.value();
    let l = lipschitz_bound(m);
    let inner = 3.0 * gamma * gamma_fn(3.0 - a) * l / (2.0 * a * (1.0 + a));
    3.0 * a * l / (2.0 * (1.0 + a)) * inner.powf(1.0 / a)
}

/// Parameters that determine the cached implicit symbols.
#[derive(Debug, Clone, Copy, PartialEq)]
struct SymbolKey {
    alpha: f64,
    gamma: f64,
    eps: f64,
    dt: f64,
    s: f64,
}

impl SymbolKey {
    fn of(cfg: &SchemeConfig) -> Self {
        Self {
            alpha: cfg.alpha.value(),
            gamma: cfg.gamma,
            eps: cfg.eps,
            dt: cfg.dt,
            s: cfg.s,
        }
    }
}

#[derive(Debug, Clone, Default)]
struct Symbols {
    l1_ac: Option<Vec<f64>>,
    l2_ac: Option<Vec<f64>>,
    l1_ch: Option<Vec<f64>>,
}

/// Everything a stepper needs between steps: the full history, transforms,
/// weight tables and cached symbols of the implicit operators.
#[derive(Debug, Clone)]
pub struct SimulationState {
    history: SolveHistory,
    spectral: Spectral,
    weights: L1Weights,
    l2: Option<L2Coefficients>,
    key: SymbolKey,
    symbols: Symbols,
    /// `f~(u^{n-1})` from the previous L2 step, reused as `f~(u^{n-2})`.
    prev_nonlinear: Option<(usize, Vec<f64>)>,
    last_residual: f64,
}

impl SimulationState {
    pub fn new(cfg: &SchemeConfig, u0: ScalarField2D) -> Result<Self> {
        cfg.validate()?;
        let spectral = Spectral::new(*u0.grid());
        let history = SolveHistory::new(cfg.dt, u0)?;
        let weights = l1_weights(cfg.alpha, cfg.dt, 1)?;
        Ok(Self {
            history,
            spectral,
            weights,
            l2: None,
            key: SymbolKey::of(cfg),
            symbols: Symbols::default(),
            prev_nonlinear: None,
            last_residual: 0.0,
        })
    }

    pub fn history(&self) -> &SolveHistory {
        &self.history
    }

    pub(crate) fn history_mut(&mut self) -> &mut SolveHistory {
        &mut self.history
    }

    pub fn into_history(self) -> SolveHistory {
        self.history
    }

    pub fn spectral(&self) -> &Spectral {
        &self.spectral
    }

    pub fn weights(&self) -> &L1Weights {
        &self.weights
    }

    pub fn l2_coefficients(&self) -> Option<&L2Coefficients> {
        self.l2.as_ref()
    }

    /// Index of the newest state.
    pub fn step_index(&self) -> usize {
        self.history.newest()
    }

    pub fn time(&self) -> f64 {
        self.history.newest() as f64 * self.history.dt()
    }

    pub fn current(&self) -> ScalarField2D {
        self.history.field(self.history.newest()).expect("grid history")
    }

    /// Relative residual of the most recent implicit solve.
    pub fn last_residual(&self) -> f64 {
        self.last_residual
    }

    fn sync(&mut self, cfg: &SchemeConfig) -> Result<()> {
        let key = SymbolKey::of(cfg);
        if key.dt != self.history.dt() {
            return Err(Error::param("dt", "time step differs from the one the history was built with"));
        }
        if key.alpha != self.weights.alpha().value() {
            return Err(Error::param("alpha", "order differs from the one the history was built with"));
        }
        if key != self.key {
            self.key = key;
            self.symbols = Symbols::default();
        }
        let n = self.history.len();
        if self.weights.len() < n {
            self.weights.extend_to(n.next_power_of_two());
        }
        Ok(())
    }

    fn nonlinear(&self, k: usize, cubic: bool, cfg: &SchemeConfig) -> Vec<f64> {
        let u = self.history.state(k);
        match cfg.nonlinearity {
            Nonlinearity::Off => vec![0.0; u.len()],
            Nonlinearity::Potential if cubic => u.iter().map(|&v| cubic_f(v)).collect(),
            Nonlinearity::Potential => u.iter().map(|&v| truncated_f(v, cfg.m)).collect(),
        }
    }

    /// Divides `rhs` by the symbol, transforms back, checks the residual
    /// and pushes the new state.
    fn solve_and_push(&mut self, symbol: &[f64], rhs: Vec<Complex64>) -> Result<()> {
        let n = self.history.len();
        let t = n as f64 * self.history.dt();
        let sol: Vec<Complex64> = rhs.iter().zip(symbol).map(|(r, s)| r / s).collect();
        let u = self.spectral.inverse(&sol);
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { step: n, t });
        }
        let back = self.spectral.forward(&u);
        let mut res = 0.0;
        let mut nrm = 0.0;
        for ((b, s), r) in back.iter().zip(symbol).zip(&rhs) {
            res += (b * s - r).norm_sqr();
            nrm += r.norm_sqr();
        }
        let rel = if nrm > 0.0 { (res / nrm).sqrt() } else { res.sqrt() };
        if !rel.is_finite() {
            return Err(Error::NonFinite { step: n, t });
        }
        if rel > 1e-10 {
            return Err(Error::SolverResidual { step: n, residual: rel });
        }
        self.last_residual = rel;
        self.history.push(u)
    }
}

fn l1_ac_symbol(sp: &Spectral, b0: f64, cfg: &SchemeConfig) -> Vec<f64> {
    let e2 = cfg.eps * cfg.eps;
    sp.k2().iter().map(|k2| b0 / cfg.gamma + cfg.s + e2 * k2).collect()
}

/// One L1 Allen-Cahn step:
/// `(b_0/gamma + S + eps^2 |k|^2) u^n = (b_0/gamma + S) u^{n-1} - H/gamma - f(u^{n-1})`
/// with `H = sum_{k=1}^{n-1} b_{n-k} (u^k - u^{k-1})`.
pub fn step_l1_ac(state: &mut SimulationState, cfg: &SchemeConfig) -> Result<()> {
    state.sync(cfg)?;
    let n = state.history.len();
    let b0 = state.weights.b(0);
    let symbol = state
        .symbols
        .l1_ac
        .get_or_insert_with(|| l1_ac_symbol(&state.spectral, b0, cfg))
        .clone();
    let h = l1_history_sum(&state.history, &state.weights, n)?;
    let f = state.nonlinear(n - 1, cfg.l1_ac_uses_cubic(), cfg);
    let lead = b0 / cfg.gamma + cfg.s;
    let g = cfg.gamma;
    let explicit: Vec<f64> = state
        .history
        .state(n - 1)
        .iter()
        .zip(&h)
        .zip(&f)
        .map(|((u, h), f)| lead * u - h / g - f)
        .collect();
    let rhs = state.spectral.forward(&explicit);
    state.solve_and_push(&symbol, rhs)
}

/// One L2 Allen-Cahn step for `n >= 2`:
/// `(C lam/gamma + S dt + eps^2 |k|^2) u^n = (C lam/gamma + S dt) u^{n-1} - C R/gamma
///  - (2 f~(u^{n-1}) - f~(u^{n-2}))`, `lam = 3a/2 + d_1`, `C = 1/(Gamma(3-a) dt^a)`.
/// At `n = 1` this performs the L1 first step.
pub fn step_l2_ac(state: &mut SimulationState, cfg: &SchemeConfig) -> Result<()> {
    let n = state.history.len();
    if n == 1 {
        return step_l1_ac(state, cfg);
    }
    state.sync(cfg)?;
    match &mut state.l2 {
        Some(co) if co.max_index() >= n => {}
        Some(co) => co.extend_to((n + 1).next_power_of_two()),
        None => state.l2 = Some(l2_coefficients(cfg.alpha, (n + 1).next_power_of_two())?),
    }
    let co = state.l2.as_ref().expect("coefficients built");
    let pre = co.prefactor(cfg.dt);
    let lam = 1.5 * cfg.alpha.value() + co.d(1);
    let lead = pre * lam / cfg.gamma + cfg.s * cfg.dt;
    let e2 = cfg.eps * cfg.eps;
    let symbol = state
        .symbols
        .l2_ac
        .get_or_insert_with(|| state.spectral.k2().iter().map(|k2| lead + e2 * k2).collect())
        .clone();
    let r = l2_history_part(&state.history, co, n)?;
    let f1 = state.nonlinear(n - 1, false, cfg);
    let f2 = match state.prev_nonlinear.take() {
        Some((k, v)) if k == n - 2 => v,
        _ => state.nonlinear(n - 2, false, cfg),
    };
    let g = cfg.gamma;
    let explicit: Vec<f64> = state
        .history
        .state(n - 1)
        .iter()
        .zip(&r)
        .zip(f1.iter().zip(&f2))
        .map(|((u, r), (a, b))| lead * u - pre * r / g - (2.0 * a - b))
        .collect();
    let rhs = state.spectral.forward(&explicit);
    state.solve_and_push(&symbol, rhs)?;
    state.prev_nonlinear = Some((n - 1, f1));
    Ok(())
}

/// One L1 Cahn-Hilliard step:
/// `(b_0/gamma + |k|^2 (eps^2 |k|^2 + S)) u^n = (b_0/gamma + S |k|^2) u^{n-1} - H/gamma - |k|^2 f~(u^{n-1})`.
/// The zero mode is carried over from `u^{n-1}`, so the mean is conserved.
pub fn step_l1_ch(state: &mut SimulationState, cfg: &SchemeConfig) -> Result<()> {
    state.sync(cfg)?;
    let n = state.history.len();
    let b0 = state.weights.b(0);
    let e2 = cfg.eps * cfg.eps;
    let g = cfg.gamma;
    let symbol = state
        .symbols
        .l1_ch
        .get_or_insert_with(|| {
            state
                .spectral
                .k2()
                .iter()
                .map(|k2| b0 / g + k2 * (e2 * k2 + cfg.s))
                .collect()
        })
        .clone();
    let h = l1_history_sum(&state.history, &state.weights, n)?;
    let f = state.nonlinear(n - 1, false, cfg);
    let u_prev = state.history.state(n - 1);
    let u_hat = state.spectral.forward(u_prev);
    let h_hat = state.spectral.forward(&h);
    let f_hat = state.spectral.forward(&f);
    let k2 = state.spectral.k2();
    let mut rhs: Vec<Complex64> = (0..u_hat.len())
        .map(|i| u_hat[i] * (b0 / g + cfg.s * k2[i]) - h_hat[i] / g - f_hat[i] * k2[i])
        .collect();
    // zero mode: every earlier increment has zero mean
    rhs[0] = u_hat[0] * symbol[0];
    state.solve_and_push(&symbol, rhs)
}

/// Advances by one step of `cfg.scheme`.
pub fn advance(state: &mut SimulationState, cfg: &SchemeConfig) -> Result<()> {
    match cfg.scheme {
        Scheme::L1Ac => step_l1_ac(state, cfg),
        Scheme::L2Ac => step_l2_ac(state, cfg),
        Scheme::L1Ch => step_l1_ch(state, cfg),
    }
}
