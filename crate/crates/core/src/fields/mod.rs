//! Uniform periodic grids, real fields on them, and spectral operators.

mod snapshot;
mod spectral;

pub use snapshot::{decode_snapshot, encode_snapshot, read_snapshot, write_snapshot, Snapshot};
pub use spectral::{Spectral, SpectralField2D};

use crate::{Error, Result};

/// Uniform periodic grid on `[x0, x0 + lx) x [y0, y0 + ly)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridDescriptor {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    pub x0: f64,
    pub y0: f64,
}

impl GridDescriptor {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        Self::with_origin(nx, ny, lx, ly, 0.0, 0.0)
    }

    pub fn with_origin(nx: usize, ny: usize, lx: f64, ly: f64, x0: f64, y0: f64) -> Result<Self> {
        for (name, n) in [("nx", nx), ("ny", ny)] {
            if n < 4 || n % 2 != 0 {
                return Err(Error::param(name, format!("need an even count >= 4, got {n}")));
            }
        }
        for (name, l) in [("lx", lx), ("ly", ly)] {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::param(name, format!("domain length must be positive, got {l}")));
            }
        }
        Ok(Self { nx, ny, lx, ly, x0, y0 })
    }

    /// `[0, 2*pi]^2` with `n x n` points.
    pub fn square_2pi(n: usize) -> Result<Self> {
        let l = 2.0 * std::f64::consts::PI;
        Self::new(n, n, l, l)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    pub fn area(&self) -> f64 {
        self.lx * self.ly
    }

    pub fn x(&self, ix: usize) -> f64 {
        self.x0 + ix as f64 * self.dx()
    }

    pub fn y(&self, iy: usize) -> f64 {
        self.y0 + iy as f64 * self.dy()
    }

    /// Smallest nonzero wavenumber magnitude.
    pub fn k_min(&self) -> f64 {
        let two_pi = 2.0 * std::f64::consts::PI;
        (two_pi / self.lx).min(two_pi / self.ly)
    }

    fn describe(&self) -> String {
        format!("{}x{} on {}x{}", self.nx, self.ny, self.lx, self.ly)
    }
}

/// Real samples on a [`GridDescriptor`], row-major (`values[iy * nx + ix]`).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField2D {
    grid: GridDescriptor,
    values: Vec<f64>,
}

impl ScalarField2D {
    pub fn from_values(grid: GridDescriptor, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::param("values", format!("non-finite sample at index {i}")));
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: GridDescriptor, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
        }
    }

    /// Samples `f(x, y)` at the grid points.
    pub fn from_fn(grid: GridDescriptor, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for iy in 0..grid.ny {
            let y = grid.y(iy);
            for ix in 0..grid.nx {
                values.push(f(grid.x(ix), y));
            }
        }
        Self { grid, values }
    }

    pub fn grid(&self) -> &GridDescriptor {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        pairwise_sum(&self.values) / self.values.len() as f64
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_same_grid(&self.grid, &other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(Self {
            grid: self.grid,
            values,
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }
}

pub(crate) fn check_same_grid(a: &GridDescriptor, b: &GridDescriptor) -> Result<()> {
    if a != b {
        return Err(Error::GridMismatch {
            a: a.describe(),
            b: b.describe(),
        });
    }
    Ok(())
}

/// Summation in a fixed pairwise order, reproducible and accurate.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 64;
    if xs.len() <= BLOCK {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Pairwise-ordered sum of `f(i)` for `i in 0..n`.
pub(crate) fn pairwise_sum_by(n: usize, f: &impl Fn(usize) -> f64) -> f64 {
    fn go(lo: usize, hi: usize, f: &impl Fn(usize) -> f64) -> f64 {
        if hi - lo <= 64 {
            return (lo..hi).map(f).sum();
        }
        let mid = lo + (hi - lo) / 2;
        go(lo, mid, f) + go(mid, hi, f)
    }
    go(0, n, f)
}

/// Riemann-sum inner product `sum(u * v) * dx * dy`.
pub fn l2_inner(u: &ScalarField2D, v: &ScalarField2D) -> Result<f64> {
    check_same_grid(&u.grid, &v.grid)?;
    let (a, b) = (&u.values, &v.values);
    Ok(pairwise_sum_by(a.len(), &|i| a[i] * b[i]) * u.grid.cell_area())
}

pub fn l2_norm(u: &ScalarField2D) -> f64 {
    let a = &u.values;
    (pairwise_sum_by(a.len(), &|i| a[i] * a[i]) * u.grid.cell_area()).sqrt()
}

/// Squared L2 distance between raw sample vectors with quadrature weight `w`.
pub(crate) fn dist_sq(a: &[f64], b: &[f64], w: f64) -> f64 {
    pairwise_sum_by(a.len(), &|i| {
        let d = a[i] - b[i];
        d * d
    }) * w
}

pub(crate) fn inner_raw(a: &[f64], b: &[f64], w: f64) -> f64 {
    pairwise_sum_by(a.len(), &|i| a[i] * b[i]) * w
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn grid() -> GridDescriptor {
        GridDescriptor::square_2pi(32).unwrap()
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(GridDescriptor::new(3, 8, 1.0, 1.0).is_err());
        assert!(GridDescriptor::new(8, 7, 1.0, 1.0).is_err());
        assert!(GridDescriptor::new(8, 8, 0.0, 1.0).is_err());
        assert!(GridDescriptor::new(8, 8, 1.0, -2.0).is_err());
    }

    #[test]
    fn inner_of_ones_is_area() {
        let one = ScalarField2D::constant(grid(), 1.0);
        assert_relative_eq!(l2_inner(&one, &one).unwrap(), 4.0 * PI * PI, max_relative = 1e-14);
    }

    #[test]
    fn sine_cosine_orthogonal() {
        let s = ScalarField2D::from_fn(grid(), |x, _| x.sin());
        let c = ScalarField2D::from_fn(grid(), |x, _| x.cos());
        assert!(l2_inner(&s, &c).unwrap().abs() < 1e-13);
        assert_relative_eq!(l2_norm(&s), (2.0 * PI * PI).sqrt(), max_relative = 1e-13);
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let a = ScalarField2D::constant(grid(), 1.0);
        let b = ScalarField2D::constant(GridDescriptor::square_2pi(16).unwrap(), 1.0);
        assert!(matches!(l2_inner(&a, &b), Err(Error::GridMismatch { .. })));
    }

    #[test]
    fn from_values_rejects_nan() {
        let g = GridDescriptor::new(4, 4, 1.0, 1.0).unwrap();
        let mut v = vec![0.0; 16];
        v[5] = f64::NAN;
        assert!(ScalarField2D::from_values(g, v).is_err());
    }
}
