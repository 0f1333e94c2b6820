use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use tfphase_cli::commands::{coeff_table, verify_report, CoeffFamily};
use tfphase_cli::presets::DEFAULT_SEED;
use tfphase_cli::{run_experiment, run_sweep, Preset, RunOptions, RunSummary};
use tfphase_core::schemes::Scheme;

#[derive(Parser)]
#[command(name = "tfphase", version, about = "Time-fractional Allen-Cahn / Cahn-Hilliard experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment.
    Run(RunArgs),
    /// Run one experiment per (alpha, S) pair concurrently.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated orders.
        #[arg(long, value_delimiter = ',', required = true)]
        alphas: Vec<f64>,
        /// Comma-separated stabilization values (default: the preset's).
        #[arg(long = "S-values", value_delimiter = ',')]
        s_values: Vec<f64>,
    },
    /// Print L1 or L2 coefficient tables as CSV.
    Coeffs {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "l1")]
        which: CoeffFamily,
        #[arg(long, default_value_t = 1.0)]
        dt: f64,
    },
    /// Run the coefficient, energy-inequality and continuous-identity checks.
    Verify {
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Args, Clone)]
struct RunArgs {
    /// `key = value` file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<Preset>,
    #[arg(long)]
    scheme: Option<Scheme>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    end_time: Option<f64>,
    #[arg(long = "S")]
    s: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long = "M")]
    m: Option<f64>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    energy_stride: Option<usize>,
    #[arg(long)]
    snap_stride: Option<usize>,
    #[arg(long)]
    pgm: bool,
    /// Skip the history energy terms (faster; E_tilde columns become NaN).
    #[arg(long)]
    no_energy: bool,
}

impl RunArgs {
    fn options(&self) -> Result<RunOptions> {
        let file = match &self.config {
            Some(p) => RunOptions::from_file(p)?,
            None => RunOptions::default(),
        };
        let flags = RunOptions {
            preset: self.preset,
            scheme: self.scheme,
            alpha: self.alpha,
            dt: self.dt,
            steps: self.steps,
            end_time: self.end_time,
            s: self.s,
            gamma: self.gamma,
            eps: self.eps,
            m: self.m,
            grid: self.grid,
            out: self.out.clone(),
            seed: self.seed,
            energy_stride: self.energy_stride,
            snap_stride: self.snap_stride,
            pgm: self.pgm.then_some(true),
            energy_tracking: self.no_energy.then_some(false),
        };
        Ok(file.overridden_by(&flags))
    }
}

fn report(s: &RunSummary) {
    let last = s.records.last();
    println!(
        "{}: {} records, final E = {}, E_tilde monotone: {} (worst relative increase {:.3e}), stability guaranteed: {}",
        s.out.display(),
        s.records.len(),
        last.map_or(f64::NAN, |r| r.e),
        s.monotonicity.holds,
        s.monotonicity.worst_increase,
        s.guaranteed
    );
}

fn main_inner() -> Result<bool> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => {
            let resolved = args.options()?.resolve()?;
            report(&run_experiment(&resolved)?);
            Ok(true)
        }
        Command::Sweep { run, alphas, s_values } => {
            let opts = run.options()?;
            let s_values = if s_values.is_empty() {
                vec![opts.resolve()?.scheme.s]
            } else {
                s_values
            };
            let mut ok = true;
            for (label, r) in run_sweep(&opts, &alphas, &s_values)? {
                match r {
                    Ok(s) => report(&s),
                    Err(e) => {
                        ok = false;
                        eprintln!("{label}: {e:#}");
                    }
                }
            }
            Ok(ok)
        }
        Command::Coeffs { alpha, n, which, dt } => {
            print!("{}", coeff_table(which, alpha, n, dt)?);
            Ok(true)
        }
        Command::Verify { trials, seed } => {
            if trials == 0 {
                bail!("--trials must be positive");
            }
            let (text, ok) = verify_report(trials, seed)?;
            print!("{text}");
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
