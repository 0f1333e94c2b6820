//! Run options from `key = value` files and command-line flags, resolved
//! against a preset.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use tfphase_core::fracops::FractionalOrder;
use tfphase_core::schemes::{Scheme, SchemeConfig};

use crate::presets::{Preset, DEFAULT_SEED};

/// Every field is optional; unset fields fall back to the preset.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    pub preset: Option<Preset>,
    pub scheme: Option<Scheme>,
    pub alpha: Option<f64>,
    pub dt: Option<f64>,
    pub steps: Option<usize>,
    pub end_time: Option<f64>,
    pub s: Option<f64>,
    pub gamma: Option<f64>,
    pub eps: Option<f64>,
    pub m: Option<f64>,
    pub grid: Option<usize>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub energy_stride: Option<usize>,
    pub snap_stride: Option<usize>,
    pub pgm: Option<bool>,
    pub energy_tracking: Option<bool>,
}

fn parse<T: FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>().map_err(|e| anyhow!("bad value `{v}` for `{key}`: {e}"))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => bail!("bad value `{v}` for `{key}`: expected true or false"),
    }
}

impl RunOptions {
    /// Sets one option by its flag name (`S` and `s` are the same key;
    /// underscores and dashes are interchangeable).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let k = key.trim().replace('_', "-");
        let v = value.trim();
        match k.as_str() {
            "preset" => self.preset = Some(v.parse::<Preset>().map_err(|e| anyhow!(e))?),
            "scheme" => self.scheme = Some(parse(&k, v)?),
            "alpha" => self.alpha = Some(parse(&k, v)?),
            "dt" => self.dt = Some(parse(&k, v)?),
            "steps" => self.steps = Some(parse(&k, v)?),
            "end-time" => self.end_time = Some(parse(&k, v)?),
            "S" | "s" => self.s = Some(parse(&k, v)?),
            "gamma" => self.gamma = Some(parse(&k, v)?),
            "eps" => self.eps = Some(parse(&k, v)?),
            "M" | "m" => self.m = Some(parse(&k, v)?),
            "grid" => self.grid = Some(parse(&k, v)?),
            "out" => self.out = Some(PathBuf::from(v)),
            "seed" => self.seed = Some(parse(&k, v)?),
            "energy-stride" => self.energy_stride = Some(parse(&k, v)?),
            "snap-stride" => self.snap_stride = Some(parse(&k, v)?),
            "pgm" => self.pgm = Some(parse_bool(&k, v)?),
            "energy-tracking" => self.energy_tracking = Some(parse_bool(&k, v)?),
            _ => bail!("unknown option `{key}`"),
        }
        Ok(())
    }

    /// Parses `key = value` lines; blank lines and `#` comments are skipped.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut opts = Self::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`", i + 1))?;
            opts.set(k, v).with_context(|| format!("line {}", i + 1))?;
        }
        Ok(opts)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse_text(&text).with_context(|| format!("in {}", path.display()))
    }

    /// `other`'s set fields win.
    pub fn overridden_by(mut self, other: &RunOptions) -> Self {
        macro_rules! take {
            ($($f:ident),*) => {
                $(if other.$f.is_some() { self.$f = other.$f.clone(); })*
            };
        }
        take!(preset, scheme, alpha, dt, steps, end_time, s, gamma, eps, m, grid, out, seed, energy_stride, snap_stride, pgm, energy_tracking);
        self
    }

    pub fn resolve(&self) -> Result<ResolvedRun> {
        let preset = self.preset.ok_or_else(|| anyhow!("no preset given"))?;
        let d = preset.defaults();
        let dt = self.dt.unwrap_or(d.dt);
        let steps = match (self.steps, self.end_time) {
            (Some(n), Some(t)) => {
                if (n as f64 * dt - t).abs() > dt * (1.0 + 1e-9) {
                    bail!("steps = {n} with dt = {dt} ends at {}, not end-time = {t}", n as f64 * dt);
                }
                n
            }
            (Some(n), None) => n,
            (None, Some(t)) => (t / dt).round() as usize,
            (None, None) => (d.end_time / dt).round() as usize,
        };
        let alpha = FractionalOrder::new(self.alpha.unwrap_or(d.alpha))?;
        let mut scheme = SchemeConfig::new(
            self.scheme.unwrap_or(d.scheme),
            alpha,
            self.gamma.unwrap_or(d.gamma),
            self.eps.unwrap_or(d.eps),
            dt,
            self.s.unwrap_or(d.s),
        )
        .with_steps(steps);
        if let Some(m) = self.m {
            scheme.m = m;
        }
        scheme.energy_stride = self.energy_stride.unwrap_or(1);
        scheme.energy_tracking = self.energy_tracking.unwrap_or(true);
        scheme.validate()?;
        let snap_stride = self.snap_stride.unwrap_or(0);
        Ok(ResolvedRun {
            preset,
            scheme,
            grid: self.grid.unwrap_or(d.grid),
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            out: self.out.clone().unwrap_or_else(|| PathBuf::from(format!("out-{}", preset.name()))),
            snap_stride,
            pgm: self.pgm.unwrap_or(false),
        })
    }
}

/// A fully specified run.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedRun {
    pub preset: Preset,
    pub scheme: SchemeConfig,
    pub grid: usize,
    pub seed: u64,
    pub out: PathBuf,
    /// Write a snapshot every `snap_stride` steps; 0 writes only the first and last.
    pub snap_stride: usize,
    pub pgm: bool,
}

impl ResolvedRun {
    /// All resolved parameters as `key = value` lines.
    pub fn manifest(&self) -> String {
        let c = &self.scheme;
        let lines = [
            ("tfphase_version", env!("CARGO_PKG_VERSION").to_string()),
            ("preset", self.preset.name().to_string()),
            ("scheme", c.scheme.name().to_string()),
            ("alpha", c.alpha.value().to_string()),
            ("gamma", c.gamma.to_string()),
            ("eps", c.eps.to_string()),
            ("S", c.s.to_string()),
            ("M", c.m.to_string()),
            ("dt", c.dt.to_string()),
            ("steps", c.n_steps.to_string()),
            ("end_time", (c.n_steps as f64 * c.dt).to_string()),
            ("grid", format!("{0}x{0}", self.grid)),
            ("domain", self.domain()),
            ("seed", self.seed.to_string()),
            ("rng", "ChaCha8 (rand_chacha 0.3), seed_from_u64".to_string()),
            ("energy_tracking", c.energy_tracking.to_string()),
            ("energy_stride", c.energy_stride.to_string()),
            ("snap_stride", self.snap_stride.to_string()),
            ("pgm", self.pgm.to_string()),
            ("stability_threshold_S", c.stability_threshold().to_string()),
            ("stability_guaranteed", c.guarantee_applies().to_string()),
        ];
        lines.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    fn domain(&self) -> String {
        match self.preset {
            Preset::Flower => "[-1,1]^2".into(),
            _ => "[0,2pi]^2".into(),
        }
    }
}
