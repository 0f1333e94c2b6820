//! Runs a resolved configuration and writes its artifacts.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use tfphase_core::energy::EnergyRecord;
use tfphase_core::schemes::{run, RunObserver, Scheme, SimulationState};

use crate::config::{ResolvedRun, RunOptions};
use crate::output::{emit_pgm, emit_snapshot, CsvWriter};

/// Worst step-to-step increase of `E_tilde`, relative to `|E_tilde(0)|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monotonicity {
    pub worst_increase: f64,
    pub holds: bool,
}

/// Checks `E~(n) <= E~(n-1) + rel |E~(0)|` along `records`. With
/// `from_second_step` the pair `(0, 1)` is skipped (the L2 estimate starts at
/// `n = 2`).
pub fn monotonicity(records: &[EnergyRecord], rel: f64, from_second_step: bool) -> Monotonicity {
    let scale = records.first().map_or(1.0, |r| r.e_tilde.abs()).max(f64::MIN_POSITIVE);
    let skip = usize::from(from_second_step);
    let worst = records
        .windows(2)
        .skip(skip)
        .map(|w| (w[1].e_tilde - w[0].e_tilde) / scale)
        .fold(f64::NEG_INFINITY, f64::max);
    Monotonicity {
        worst_increase: worst,
        holds: !(worst > rel),
    }
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub out: PathBuf,
    pub records: Vec<EnergyRecord>,
    pub monotonicity: Monotonicity,
    pub guaranteed: bool,
}

struct ArtifactWriter<'a> {
    dir: &'a Path,
    csv: CsvWriter,
    snap_stride: usize,
    last: usize,
    pgm: bool,
}

impl ArtifactWriter<'_> {
    fn snapshot(&self, state: &SimulationState) -> Result<()> {
        let n = state.step_index();
        let u = state.current();
        emit_snapshot(&u, &self.dir.join(format!("snap_{n:06}.tfp")))?;
        if self.pgm {
            emit_pgm(&u, &self.dir.join(format!("snap_{n:06}.pgm")))?;
        }
        Ok(())
    }
}

fn io_err(e: anyhow::Error) -> tfphase_core::Error {
    tfphase_core::Error::Io {
        context: format!("{e:#}"),
        source: std::io::Error::other(e.to_string()),
    }
}

impl RunObserver for ArtifactWriter<'_> {
    fn on_record(&mut self, rec: &EnergyRecord) -> tfphase_core::Result<()> {
        self.csv.write(rec).map_err(io_err)
    }

    fn on_step(&mut self, state: &SimulationState) -> tfphase_core::Result<()> {
        let n = state.step_index();
        let due = n == 0 || n == self.last || (self.snap_stride > 0 && n % self.snap_stride == 0);
        if due {
            self.snapshot(state).map_err(io_err)?;
        }
        Ok(())
    }
}

/// Writes `manifest.txt`, `energy.csv` and snapshots into `run.out`.
pub fn run_experiment(run_cfg: &ResolvedRun) -> Result<RunSummary> {
    let dir = &run_cfg.out;
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    std::fs::write(dir.join("manifest.txt"), run_cfg.manifest())
        .with_context(|| format!("writing manifest in {}", dir.display()))?;
    let grid = run_cfg.preset.grid(run_cfg.grid)?;
    let u0 = run_cfg.preset.initial(grid, run_cfg.scheme.eps, run_cfg.seed);
    let mut writer = ArtifactWriter {
        dir,
        csv: CsvWriter::create(&dir.join("energy.csv"))?,
        snap_stride: run_cfg.snap_stride,
        last: run_cfg.scheme.n_steps,
        pgm: run_cfg.pgm,
    };
    let result = run(&run_cfg.scheme, u0, &mut writer);
    // keep whatever was produced before a failure
    writer.csv.flush()?;
    let output = result.with_context(|| format!("run in {} failed", dir.display()))?;
    let from_second = run_cfg.scheme.scheme == Scheme::L2Ac;
    Ok(RunSummary {
        out: dir.clone(),
        monotonicity: monotonicity(&output.records, 1e-10, from_second),
        records: output.records,
        guaranteed: run_cfg.scheme.guarantee_applies(),
    })
}

/// One run per `(alpha, S)` pair, in parallel, each in its own
/// subdirectory `alpha-<a>_S-<s>` of the base output directory.
pub fn run_sweep(base: &RunOptions, alphas: &[f64], s_values: &[f64]) -> Result<Vec<(String, Result<RunSummary>)>> {
    let root = base.resolve()?.out;
    let mut jobs = Vec::new();
    for &a in alphas {
        for &s in s_values {
            let label = format!("alpha-{a}_S-{s}");
            let mut opts = base.clone();
            opts.alpha = Some(a);
            opts.s = Some(s);
            opts.out = Some(root.join(&label));
            jobs.push((label, opts));
        }
    }
    let results = std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|(label, opts)| {
                let h = scope.spawn(move || opts.resolve().and_then(|r| run_experiment(&r)));
                (label.clone(), h)
            })
            .collect();
        handles
            .into_iter()
            .map(|(label, h)| {
                let r = h.join().unwrap_or_else(|_| Err(anyhow::anyhow!("run thread panicked")));
                (label, r)
            })
            .collect()
    });
    Ok(results)
}
