//! Initial conditions and parameter sets of the three experiments.

use std::f64::consts::{PI, SQRT_2};

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tfphase_core::fields::{GridDescriptor, ScalarField2D};
use tfphase_core::schemes::Scheme;

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    Flower,
    Circles,
    ChRandom,
}

/// Parameters of a preset before any override.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PresetDefaults {
    pub scheme: Scheme,
    pub alpha: f64,
    pub eps: f64,
    pub gamma: f64,
    pub s: f64,
    pub grid: usize,
    pub dt: f64,
    pub end_time: f64,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Flower, Preset::Circles, Preset::ChRandom];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Flower => "flower",
            Preset::Circles => "circles",
            Preset::ChRandom => "ch-random",
        }
    }

    pub fn defaults(self) -> PresetDefaults {
        match self {
            Preset::Flower => PresetDefaults {
                scheme: Scheme::L1Ac,
                alpha: 0.6,
                eps: 0.025,
                gamma: 2.0,
                s: 20.0,
                grid: 128,
                dt: 0.01,
                end_time: 64.0,
            },
            Preset::Circles => PresetDefaults {
                scheme: Scheme::L2Ac,
                alpha: 0.6,
                eps: 0.1,
                gamma: 1.0,
                s: 1.0,
                grid: 128,
                dt: 0.05,
                end_time: 50.0,
            },
            Preset::ChRandom => PresetDefaults {
                scheme: Scheme::L1Ch,
                alpha: 0.6,
                eps: 0.05,
                gamma: 0.02,
                s: 0.1,
                grid: 128,
                dt: 0.1,
                end_time: 64.0,
            },
        }
    }

    /// Periodic domain: `[-1, 1]^2` for the flower, `[0, 2 pi]^2` otherwise.
    pub fn grid(self, n: usize) -> tfphase_core::Result<GridDescriptor> {
        match self {
            Preset::Flower => GridDescriptor::with_origin(n, n, 2.0, 2.0, -1.0, -1.0),
            _ => GridDescriptor::square_2pi(n),
        }
    }

    pub fn initial(self, grid: GridDescriptor, eps: f64, seed: u64) -> ScalarField2D {
        match self {
            Preset::Flower => preset_flower(grid, eps),
            Preset::Circles => preset_seven_circles(grid, eps),
            Preset::ChRandom => preset_ch_random(grid, seed),
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "flower" => Ok(Preset::Flower),
            "circles" | "seven-circles" => Ok(Preset::Circles),
            "ch-random" | "ch" => Ok(Preset::ChRandom),
            _ => Err(format!("unknown preset `{s}` (expected flower, circles or ch-random)")),
        }
    }
}

/// `tanh((2r/3 - 1/4 - (1 + cos 4 theta)/16) / (sqrt2 eps))` with the polar
/// angle `theta = atan2(y, x)`.
pub fn preset_flower(grid: GridDescriptor, eps: f64) -> ScalarField2D {
    ScalarField2D::from_fn(grid, |x, y| {
        let r = x.hypot(y);
        let theta = y.atan2(x);
        ((2.0 * r / 3.0 - 0.25 - (1.0 + (4.0 * theta).cos()) / 16.0) / (SQRT_2 * eps)).tanh()
    })
}

/// Centers and radii of the seven bumps.
pub const CIRCLES: [(f64, f64, f64); 7] = [
    (PI / 2.0, PI / 2.0, PI / 5.0),
    (PI / 4.0, 3.0 * PI / 4.0, 2.0 * PI / 15.0),
    (PI / 2.0, 5.0 * PI / 4.0, 2.0 * PI / 15.0),
    (PI, PI / 4.0, PI / 10.0),
    (3.0 * PI / 2.0, PI / 4.0, PI / 10.0),
    (PI, PI, PI / 4.0),
    (3.0 * PI / 2.0, 3.0 * PI / 2.0, PI / 4.0),
];

fn bump(s: f64, eps: f64) -> f64 {
    if s < 0.0 {
        2.0 * (-eps * eps / (s * s)).exp()
    } else {
        0.0
    }
}

/// `-1 + sum_i f(|x - x_i| - r_i)` with `f(s) = 2 exp(-eps^2/s^2)` for `s < 0`.
pub fn preset_seven_circles(grid: GridDescriptor, eps: f64) -> ScalarField2D {
    ScalarField2D::from_fn(grid, |x, y| {
        -1.0 + CIRCLES
            .iter()
            .map(|&(cx, cy, r)| bump((x - cx).hypot(y - cy) - r, eps))
            .sum::<f64>()
    })
}

/// I.i.d. uniform samples on `[-1, 1)` from ChaCha8 seeded with
/// `seed_from_u64(seed)`: each sample is `2 (next_u64 >> 11) 2^-53 - 1`,
/// drawn in row-major order.
pub fn preset_ch_random(grid: GridDescriptor, seed: u64) -> ScalarField2D {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..grid.len())
        .map(|_| 2.0 * ((rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)) - 1.0)
        .collect();
    ScalarField2D::from_values(grid, values).expect("finite samples")
}
