use super::{advance, Scheme, SchemeConfig, SimulationState};
use crate::energy::{ch_modified_energy, gl_energy_with, l1_modified_energy, l2_modified_energy, EnergyRecord, MEAN_TOL};
use crate::fields::{pairwise_sum, ScalarField2D};
use crate::fracops::{l2_coefficients, PairMetric, SolveHistory};
use crate::Result;

/// Hooks invoked while a run progresses. Records reach `on_record` as soon
/// as they are computed, so a failing run still delivers everything before
/// the failure.
pub trait RunObserver {
    fn on_record(&mut self, _rec: &EnergyRecord) -> Result<()> {
        Ok(())
    }

    /// Called after every completed step (and once for the initial state).
    fn on_step(&mut self, _state: &SimulationState) -> Result<()> {
        Ok(())
    }
}

impl RunObserver for () {}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub history: SolveHistory,
    pub records: Vec<EnergyRecord>,
}

/// Record for the newest state. Without energy tracking only `E`,
/// `max_abs_u` and `mean_u` are filled in; the history terms are NaN.
fn record(state: &mut SimulationState, cfg: &SchemeConfig) -> Result<EnergyRecord> {
    let n = state.step_index();
    let sp = state.spectral.clone();
    if !cfg.energy_tracking {
        let u = state.history.state(n);
        return Ok(EnergyRecord {
            t: state.time(),
            e: gl_energy_with(&sp, u, cfg.eps),
            e_tilde: f64::NAN,
            d_term: f64::NAN,
            stab_term: f64::NAN,
            max_abs_u: u.iter().fold(0.0, |m: f64, v| m.max(v.abs())),
            mean_u: pairwise_sum(u) / u.len() as f64,
        });
    }
    let h = &state.history;
    match cfg.scheme {
        Scheme::L1Ac => l1_modified_energy(h, &state.weights, cfg.gamma, cfg.eps, n, Some(&sp)),
        Scheme::L1Ch => ch_modified_energy(h, &state.weights, cfg.gamma, cfg.eps, n, &sp),
        Scheme::L2Ac => {
            let need = n.max(2);
            let fresh;
            let co = match &state.l2 {
                Some(co) if co.max_index() >= need => co,
                _ => {
                    fresh = l2_coefficients(cfg.alpha, need.next_power_of_two())?;
                    &fresh
                }
            };
            l2_modified_energy(h, co, cfg.gamma, cfg.eps, cfg.m, n, Some(&sp))
        }
    }
}

/// Runs `cfg.n_steps` steps from `u0`, evaluating the scheme's modified
/// energy at `n = 0`, every `cfg.energy_stride` steps and at the last step.
pub fn run(cfg: &SchemeConfig, u0: ScalarField2D, observer: &mut dyn RunObserver) -> Result<RunOutput> {
    let mut state = SimulationState::new(cfg, u0)?;
    if cfg.energy_tracking && cfg.energy_stride == 1 {
        // every pair distance is needed at every step: keep them
        let (metric, sp) = match cfg.scheme {
            Scheme::L1Ch => (PairMetric::HMinus1, Some(state.spectral.clone())),
            _ => (PairMetric::L2, None),
        };
        state.history_mut().enable_pair_cache(metric, sp, MEAN_TOL)?;
    }
    // weights for the whole run up front
    state.weights.extend_to(cfg.n_steps + 1);
    let mut records = Vec::new();
    let mut emit = |state: &mut SimulationState, observer: &mut dyn RunObserver| -> Result<()> {
        let rec = record(state, cfg)?;
        observer.on_record(&rec)?;
        records.push(rec);
        Ok(())
    };
    emit(&mut state, observer)?;
    observer.on_step(&state)?;
    for n in 1..=cfg.n_steps {
        advance(&mut state, cfg)?;
        observer.on_step(&state)?;
        if n % cfg.energy_stride == 0 || n == cfg.n_steps {
            emit(&mut state, observer)?;
        }
    }
    Ok(RunOutput {
        history: state.into_history(),
        records,
    })
}
