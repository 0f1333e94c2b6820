use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{check_same_grid, GridDescriptor, ScalarField2D};
use crate::{Error, Result};

/// Fourier coefficients of a real field, unnormalized forward convention
/// `u_hat(k) = sum_j u_j exp(-i k x_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField2D {
    pub grid: GridDescriptor,
    pub coefficients: Vec<Complex64>,
}

/// FFT plans and wavenumber tables for one grid.
#[derive(Clone)]
pub struct Spectral {
    grid: GridDescriptor,
    fwd_x: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
    k2: Vec<f64>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("grid", &self.grid).finish()
    }
}

/// Signed wavenumbers in FFT order; the Nyquist index maps to `-n/2`.
fn wavenumbers(n: usize, l: f64) -> Vec<f64> {
    let scale = 2.0 * PI / l;
    (0..n)
        .map(|i| {
            let m = if i < n / 2 { i as f64 } else { i as f64 - n as f64 };
            m * scale
        })
        .collect()
}

impl Spectral {
    pub fn new(grid: GridDescriptor) -> Self {
        let mut planner = FftPlanner::new();
        let kx = wavenumbers(grid.nx, grid.lx);
        let ky = wavenumbers(grid.ny, grid.ly);
        let mut k2 = Vec::with_capacity(grid.len());
        for ky in &ky {
            for kx in &kx {
                k2.push(kx * kx + ky * ky);
            }
        }
        Self {
            grid,
            fwd_x: planner.plan_fft_forward(grid.nx),
            inv_x: planner.plan_fft_inverse(grid.nx),
            fwd_y: planner.plan_fft_forward(grid.ny),
            inv_y: planner.plan_fft_inverse(grid.ny),
            k2,
        }
    }

    pub fn grid(&self) -> &GridDescriptor {
        &self.grid
    }

    /// `|k|^2` per mode, laid out like the field samples.
    pub fn k2(&self) -> &[f64] {
        &self.k2
    }

    fn transform_2d(&self, data: &mut [Complex64], inverse: bool) {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        let (fx, fy) = if inverse {
            (&self.inv_x, &self.inv_y)
        } else {
            (&self.fwd_x, &self.fwd_y)
        };
        // rows are contiguous: process all at once
        fx.process(data);
        let mut column = vec![Complex64::new(0.0, 0.0); ny];
        for ix in 0..nx {
            for iy in 0..ny {
                column[iy] = data[iy * nx + ix];
            }
            fy.process(&mut column);
            for iy in 0..ny {
                data[iy * nx + ix] = column[iy];
            }
        }
    }

    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        debug_assert_eq!(values.len(), self.grid.len());
        let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform_2d(&mut data, false);
        data
    }

    /// Inverse transform, keeping the real part.
    pub fn inverse(&self, coefficients: &[Complex64]) -> Vec<f64> {
        let mut data = coefficients.to_vec();
        self.transform_2d(&mut data, true);
        let norm = 1.0 / self.grid.len() as f64;
        data.iter().map(|c| c.re * norm).collect()
    }

    pub fn transform(&self, u: &ScalarField2D) -> Result<SpectralField2D> {
        check_same_grid(&self.grid, u.grid())?;
        Ok(SpectralField2D {
            grid: self.grid,
            coefficients: self.forward(u.values()),
        })
    }

    pub fn inverse_field(&self, s: &SpectralField2D) -> Result<ScalarField2D> {
        check_same_grid(&self.grid, &s.grid)?;
        ScalarField2D::from_values(self.grid, self.inverse(&s.coefficients))
    }

    /// Spectral Laplacian, multiplication by `-|k|^2`.
    pub fn laplacian(&self, u: &ScalarField2D) -> Result<ScalarField2D> {
        let mut c = self.transform(u)?.coefficients;
        for (c, k2) in c.iter_mut().zip(&self.k2) {
            *c *= -k2;
        }
        ScalarField2D::from_values(self.grid, self.inverse(&c))
    }

    fn check_mean(&self, v: &[f64], tol: f64) -> Result<f64> {
        let mean = super::pairwise_sum(v) / v.len() as f64;
        let norm = super::inner_raw(v, v, self.grid.cell_area()).sqrt();
        // relative to |v|, floored at a unit-amplitude field on the domain
        let limit = tol * norm.max(self.grid.area().sqrt());
        if mean.abs() > limit {
            return Err(Error::MeanTooLarge { mean, limit });
        }
        Ok(mean)
    }

    /// Solves `-lap(psi) = v - mean(v)` with `mean(psi) = 0`.
    pub fn inv_neg_laplacian_zero_mean(&self, v: &ScalarField2D, tol: f64) -> Result<ScalarField2D> {
        check_same_grid(&self.grid, v.grid())?;
        self.check_mean(v.values(), tol)?;
        let mut c = self.forward(v.values());
        c[0] = Complex64::new(0.0, 0.0);
        for (c, k2) in c.iter_mut().zip(&self.k2).skip(1) {
            *c /= k2;
        }
        ScalarField2D::from_values(self.grid, self.inverse(&c))
    }

    /// `||grad psi||` where `-lap(psi) = v`.
    pub fn hminus1_seminorm(&self, v: &ScalarField2D, tol: f64) -> Result<f64> {
        check_same_grid(&self.grid, v.grid())?;
        self.check_mean(v.values(), tol)?;
        let c = self.forward(v.values());
        Ok(self.hminus1_sq_coeffs(&c).sqrt())
    }

    pub(crate) fn hminus1_sq_coeffs(&self, c: &[Complex64]) -> f64 {
        let n = self.grid.len();
        let s = super::pairwise_sum_by(n - 1, &|i| c[i + 1].norm_sqr() / self.k2[i + 1]);
        s * self.quadrature_scale()
    }

    /// Squared H^-1 distance from cached coefficients, with the mean-check of
    /// [`Spectral::hminus1_seminorm`] applied to the zero mode.
    pub(crate) fn hminus1_dist_sq(&self, a: &[Complex64], b: &[Complex64], tol: f64) -> Result<f64> {
        let n = self.grid.len();
        let mean = (a[0].re - b[0].re) / n as f64;
        let s = super::pairwise_sum_by(n - 1, &|i| (a[i + 1] - b[i + 1]).norm_sqr() / self.k2[i + 1]);
        let l2 = super::pairwise_sum_by(n, &|i| (a[i] - b[i]).norm_sqr()) * self.quadrature_scale();
        let limit = tol * l2.sqrt().max(self.grid.area().sqrt());
        if mean.abs() > limit {
            return Err(Error::MeanTooLarge { mean, limit });
        }
        Ok(s * self.quadrature_scale())
    }

    /// `|Omega| / N^2`, maps coefficient sums to Riemann-sum integrals.
    pub(crate) fn quadrature_scale(&self) -> f64 {
        let n = self.grid.len() as f64;
        self.grid.area() / (n * n)
    }

    /// `int |grad u|^2 dx` evaluated spectrally.
    pub fn grad_sq_integral(&self, values: &[f64]) -> f64 {
        let c = self.forward(values);
        super::pairwise_sum_by(c.len(), &|i| self.k2[i] * c[i].norm_sqr()) * self.quadrature_scale()
    }

    /// Spectral-sum quadrature of `int u^2 dx` (Parseval counterpart of the
    /// Riemann sum).
    pub fn l2_norm_sq_spectral(&self, values: &[f64]) -> f64 {
        let c = self.forward(values);
        super::pairwise_sum_by(c.len(), &|i| c[i].norm_sqr()) * self.quadrature_scale()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{l2_norm, GridDescriptor};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn setup(n: usize) -> (GridDescriptor, Spectral) {
        let g = GridDescriptor::square_2pi(n).unwrap();
        (g, Spectral::new(g))
    }

    fn max_diff(a: &ScalarField2D, b: &ScalarField2D) -> f64 {
        a.values()
            .iter()
            .zip(b.values())
            .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    #[test]
    fn laplacian_of_sine() {
        let (g, sp) = setup(32);
        let u = ScalarField2D::from_fn(g, |x, _| x.sin());
        let lap = sp.laplacian(&u).unwrap();
        assert!(max_diff(&lap, &u.scale(-1.0)) < 1e-12);
    }

    #[test]
    fn laplacian_of_constant_vanishes() {
        let (g, sp) = setup(16);
        let lap = sp.laplacian(&ScalarField2D::constant(g, 3.5)).unwrap();
        assert!(lap.max_abs() < 1e-13);
    }

    #[test]
    fn laplacian_eigenvalue_13() {
        let (g, sp) = setup(32);
        let u = ScalarField2D::from_fn(g, |x, y| (2.0 * x).sin() * (3.0 * y).cos());
        let lap = sp.laplacian(&u).unwrap();
        assert!(max_diff(&lap, &u.scale(-13.0)) < 1e-11);
    }

    #[test]
    fn laplacian_on_rectangular_domain() {
        let g = GridDescriptor::with_origin(16, 8, 2.0, 1.0, -1.0, -0.5).unwrap();
        let sp = Spectral::new(g);
        let u = ScalarField2D::from_fn(g, |x, y| (PI * x).cos() * (2.0 * PI * y).sin());
        let lap = sp.laplacian(&u).unwrap();
        let expect = -(PI * PI + 4.0 * PI * PI);
        assert!(max_diff(&lap, &u.scale(expect)) < 1e-10);
    }

    #[test]
    fn inverse_laplacian_examples() {
        let (g, sp) = setup(32);
        let s1 = ScalarField2D::from_fn(g, |x, _| x.sin());
        let psi = sp.inv_neg_laplacian_zero_mean(&s1, 1e-10).unwrap();
        assert!(max_diff(&psi, &s1) < 1e-13);

        let zero = ScalarField2D::constant(g, 0.0);
        assert_eq!(sp.inv_neg_laplacian_zero_mean(&zero, 1e-10).unwrap().max_abs(), 0.0);

        let s2 = ScalarField2D::from_fn(g, |x, _| (2.0 * x).sin());
        let psi = sp.inv_neg_laplacian_zero_mean(&s2, 1e-10).unwrap();
        assert!(max_diff(&psi, &s2.scale(0.25)) < 1e-13);
    }

    #[test]
    fn inverse_laplacian_rejects_mass() {
        let (g, sp) = setup(16);
        let v = ScalarField2D::from_fn(g, |x, _| x.sin() + 0.1);
        assert!(matches!(
            sp.inv_neg_laplacian_zero_mean(&v, 1e-10),
            Err(Error::MeanTooLarge { .. })
        ));
        assert!(sp.hminus1_seminorm(&v, 1e-10).is_err());
    }

    #[test]
    fn hminus1_examples() {
        let (g, sp) = setup(32);
        let s1 = ScalarField2D::from_fn(g, |x, _| x.sin());
        assert_relative_eq!(sp.hminus1_seminorm(&s1, 1e-10).unwrap(), 2f64.sqrt() * PI, max_relative = 1e-13);
        let s2 = ScalarField2D::from_fn(g, |x, _| (2.0 * x).sin());
        assert_relative_eq!(
            sp.hminus1_seminorm(&s2, 1e-10).unwrap(),
            2f64.sqrt() * PI / 2.0,
            max_relative = 1e-13
        );
        assert_eq!(sp.hminus1_seminorm(&ScalarField2D::constant(g, 0.0), 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn hminus1_matches_gradient_of_potential() {
        // ||grad psi||^2 = <psi, v> for -lap psi = v
        let (g, sp) = setup(32);
        let v = ScalarField2D::from_fn(g, |x, y| (x + 2.0 * y).cos() - 0.5 * (3.0 * x).sin() * y.cos());
        let psi = sp.inv_neg_laplacian_zero_mean(&v, 1e-10).unwrap();
        let via_inner = crate::fields::l2_inner(&psi, &v).unwrap();
        let via_grad = sp.grad_sq_integral(psi.values());
        assert_relative_eq!(via_inner, via_grad, max_relative = 1e-12);
        assert_relative_eq!(sp.hminus1_seminorm(&v, 1e-10).unwrap().powi(2), via_grad, max_relative = 1e-12);
    }

    fn random_field(g: GridDescriptor, seed: &[f64]) -> ScalarField2D {
        ScalarField2D::from_values(g, seed.to_vec()).unwrap()
    }

    proptest! {
        #[test]
        fn roundtrip_reproduces_field(vals in proptest::collection::vec(-1.0f64..1.0, 64)) {
            let g = GridDescriptor::new(8, 8, 1.0, 3.0).unwrap();
            let sp = Spectral::new(g);
            let u = random_field(g, &vals);
            let back = sp.inverse_field(&sp.transform(&u).unwrap()).unwrap();
            let err = max_diff(&u, &back);
            prop_assert!(err <= 1e-12 * u.max_abs().max(1e-300));
        }

        #[test]
        fn parseval(vals in proptest::collection::vec(-1.0f64..1.0, 64)) {
            let g = GridDescriptor::new(8, 8, 2.0, 2.0).unwrap();
            let sp = Spectral::new(g);
            let u = random_field(g, &vals);
            let direct = l2_norm(&u).powi(2);
            let spectral = sp.l2_norm_sq_spectral(u.values());
            prop_assert!((direct - spectral).abs() <= 1e-12 * direct);
        }

        #[test]
        fn laplacian_inverse_is_identity_on_zero_mean(vals in proptest::collection::vec(-1.0f64..1.0, 256)) {
            let g = GridDescriptor::square_2pi(16).unwrap();
            let sp = Spectral::new(g);
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let v = random_field(g, &vals.iter().map(|x| x - mean).collect::<Vec<_>>());
            let psi = sp.inv_neg_laplacian_zero_mean(&v, 1e-10).unwrap();
            let back = sp.laplacian(&psi).unwrap().scale(-1.0);
            prop_assert!(l2_norm(&back.sub(&v).unwrap()) <= 1e-10 * l2_norm(&v));
            prop_assert!(psi.mean().abs() < 1e-14);
        }

        #[test]
        fn hminus1_bounded_by_l2_over_kmin(vals in proptest::collection::vec(-1.0f64..1.0, 256)) {
            let g = GridDescriptor::new(16, 16, 3.0, 5.0).unwrap();
            let sp = Spectral::new(g);
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let v = random_field(g, &vals.iter().map(|x| x - mean).collect::<Vec<_>>());
            let h = sp.hminus1_seminorm(&v, 1e-10).unwrap();
            prop_assert!(h <= l2_norm(&v) / g.k_min() * (1.0 + 1e-12));
        }
    }
}
