use num_complex::Complex64;

use crate::fields::{dist_sq, inner_raw, GridDescriptor, ScalarField2D, Spectral};
use crate::{Error, Result};

/// Which distance the pair cache stores.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairMetric {
    /// `||u^n - u^k||^2`
    L2,
    /// `||grad psi||^2` with `-lap psi = u^n - u^k`
    HMinus1,
}

/// A metric request; the H^-1 variant carries the spectral operators.
#[derive(Debug, Clone, Copy)]
pub enum Metric<'a> {
    L2,
    HMinus1(&'a Spectral),
}

#[derive(Debug, Clone)]
struct PairCache {
    metric: PairMetric,
    /// `rows[n][k] = |u^n - u^k|^2` for `k < n`.
    rows: Vec<Vec<f64>>,
    spectral: Option<(Spectral, Vec<Vec<Complex64>>)>,
    tol: f64,
}

/// Every state `u^0 .. u^n` of one trajectory on a uniform time mesh.
///
/// States are flat sample vectors; the inner product is the weighted sum
/// `weight * sum(a * b)` (the cell area for grid fields, 1 for scalar
/// histories). Optionally caches pairwise distances to the newest state as
/// states are pushed.
#[derive(Debug, Clone)]
pub struct SolveHistory {
    dt: f64,
    grid: Option<GridDescriptor>,
    weight: f64,
    states: Vec<Vec<f64>>,
    cache: Option<PairCache>,
}

impl SolveHistory {
    fn check_dt(dt: f64) -> Result<()> {
        if dt > 0.0 && dt.is_finite() {
            Ok(())
        } else {
            Err(Error::param("dt", format!("must be positive, got {dt}")))
        }
    }

    /// Starts a history of grid fields at `u0`.
    pub fn new(dt: f64, u0: ScalarField2D) -> Result<Self> {
        Self::check_dt(dt)?;
        let grid = *u0.grid();
        Ok(Self {
            dt,
            grid: Some(grid),
            weight: grid.cell_area(),
            states: vec![u0.into_values()],
            cache: None,
        })
    }

    /// History of scalars (one sample per state, unit weight).
    pub fn scalar(dt: f64, values: &[f64]) -> Result<Self> {
        Self::from_vectors(dt, 1.0, values.iter().map(|&v| vec![v]).collect())
    }

    /// History of plain vectors with quadrature weight `weight`.
    pub fn from_vectors(dt: f64, weight: f64, states: Vec<Vec<f64>>) -> Result<Self> {
        Self::check_dt(dt)?;
        let Some(first) = states.first() else {
            return Err(Error::LengthMismatch("history needs an initial state".into()));
        };
        let dim = first.len();
        if states.iter().any(|s| s.len() != dim) {
            return Err(Error::LengthMismatch("states of unequal length".into()));
        }
        Ok(Self {
            dt,
            grid: None,
            weight,
            states,
            cache: None,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn grid(&self) -> Option<&GridDescriptor> {
        self.grid.as_ref()
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// Number of stored states (`n + 1`).
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Index of the newest state.
    pub fn newest(&self) -> usize {
        self.states.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.states[0].len()
    }

    pub fn state(&self, k: usize) -> &[f64] {
        &self.states[k]
    }

    pub fn field(&self, k: usize) -> Option<ScalarField2D> {
        let grid = self.grid?;
        ScalarField2D::from_values(grid, self.states[k].clone()).ok()
    }

    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        inner_raw(a, b, self.weight)
    }

    pub fn push(&mut self, values: Vec<f64>) -> Result<()> {
        if values.len() != self.dim() {
            return Err(Error::LengthMismatch(format!(
                "state of length {} pushed onto history of dimension {}",
                values.len(),
                self.dim()
            )));
        }
        self.states.push(values);
        if self.cache.is_some() {
            self.extend_cache()?;
        }
        Ok(())
    }

    pub fn push_field(&mut self, u: ScalarField2D) -> Result<()> {
        if let Some(g) = &self.grid {
            crate::fields::check_same_grid(g, u.grid())?;
        }
        self.push(u.into_values())
    }

    /// Turns on pairwise-distance caching; existing states are processed now.
    /// `tol` is the zero-mean tolerance for the H^-1 metric.
    pub fn enable_pair_cache(&mut self, metric: PairMetric, spectral: Option<Spectral>, tol: f64) -> Result<()> {
        let spectral = match (metric, spectral) {
            (PairMetric::L2, _) => None,
            (PairMetric::HMinus1, Some(sp)) => {
                if self.grid.as_ref() != Some(sp.grid()) {
                    return Err(Error::param("spectral", "grid does not match the history"));
                }
                Some((sp, Vec::new()))
            }
            (PairMetric::HMinus1, None) => {
                return Err(Error::param("spectral", "H^-1 cache needs spectral operators"));
            }
        };
        self.cache = Some(PairCache {
            metric,
            rows: Vec::new(),
            spectral,
            tol,
        });
        while self.cache.as_ref().is_some_and(|c| c.rows.len() < self.states.len()) {
            self.extend_cache()?;
        }
        Ok(())
    }

    pub fn pair_cache_metric(&self) -> Option<PairMetric> {
        self.cache.as_ref().map(|c| c.metric)
    }

    fn extend_cache(&mut self) -> Result<()> {
        let cache = self.cache.as_mut().expect("cache enabled");
        let n = cache.rows.len();
        let un = &self.states[n];
        let row = match &mut cache.spectral {
            None => (0..n).map(|k| dist_sq(un, &self.states[k], self.weight)).collect(),
            Some((sp, coeffs)) => {
                coeffs.push(sp.forward(un));
                let cn = &coeffs[n];
                (0..n)
                    .map(|k| sp.hminus1_dist_sq(cn, &coeffs[k], cache.tol))
                    .collect::<Result<Vec<_>>>()?
            }
        };
        cache.rows.push(row);
        Ok(())
    }

    /// Cached squared distance, if the cache holds this pair.
    pub fn cached_pair_norm_sq(&self, n: usize, k: usize) -> Option<f64> {
        let c = self.cache.as_ref()?;
        c.rows.get(n).and_then(|r| r.get(k)).copied()
    }

    /// Squared distance `|u^n - u^k|^2` in the requested metric, from the
    /// cache when it matches.
    pub fn pair_norm_sq(&self, n: usize, k: usize, metric: Metric<'_>) -> Result<f64> {
        if n == k {
            return Ok(0.0);
        }
        let (hi, lo) = if n > k { (n, k) } else { (k, n) };
        let cache_kind = self.pair_cache_metric();
        match metric {
            Metric::L2 => {
                if cache_kind == Some(PairMetric::L2) {
                    if let Some(v) = self.cached_pair_norm_sq(hi, lo) {
                        return Ok(v);
                    }
                }
                Ok(dist_sq(&self.states[hi], &self.states[lo], self.weight))
            }
            Metric::HMinus1(sp) => {
                if cache_kind == Some(PairMetric::HMinus1) {
                    if let Some(v) = self.cached_pair_norm_sq(hi, lo) {
                        return Ok(v);
                    }
                }
                let grid = self
                    .grid
                    .ok_or_else(|| Error::param("history", "H^-1 distance needs a grid"))?;
                let diff: Vec<f64> = self.states[hi]
                    .iter()
                    .zip(&self.states[lo])
                    .map(|(a, b)| a - b)
                    .collect();
                let v = ScalarField2D::from_values(grid, diff)?;
                Ok(sp.hminus1_seminorm(&v, crate::energy::MEAN_TOL)?.powi(2))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::GridDescriptor;
    use approx::assert_relative_eq;

    #[test]
    fn rejects_mismatched_push() {
        let mut h = SolveHistory::scalar(0.1, &[1.0]).unwrap();
        assert!(h.push(vec![1.0, 2.0]).is_err());
        assert!(SolveHistory::scalar(0.0, &[1.0]).is_err());
        assert!(SolveHistory::from_vectors(0.1, 1.0, vec![]).is_err());
    }

    #[test]
    fn l2_cache_matches_direct() {
        let g = GridDescriptor::square_2pi(8).unwrap();
        let mut h = SolveHistory::new(0.1, ScalarField2D::from_fn(g, |x, _| x.sin())).unwrap();
        h.enable_pair_cache(PairMetric::L2, None, 1e-10).unwrap();
        for s in 1..6 {
            let s = s as f64;
            h.push_field(ScalarField2D::from_fn(g, |x, y| (x + s).sin() * (1.0 + 0.1 * s * y.cos())))
                .unwrap();
        }
        for n in 1..6 {
            for k in 0..n {
                let cached = h.cached_pair_norm_sq(n, k).unwrap();
                let direct = dist_sq(h.state(n), h.state(k), h.weight());
                assert_relative_eq!(cached, direct, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn hminus1_cache_matches_direct() {
        let g = GridDescriptor::square_2pi(16).unwrap();
        let sp = Spectral::new(g);
        let mut h = SolveHistory::new(0.1, ScalarField2D::from_fn(g, |x, y| x.cos() * y.sin())).unwrap();
        for s in 1..5 {
            let s = s as f64;
            h.push_field(ScalarField2D::from_fn(g, |x, y| (x + 0.3 * s).cos() * (2.0 * y).sin() + 0.1)).unwrap();
        }
        h.enable_pair_cache(PairMetric::HMinus1, Some(sp.clone()), 1e-10).unwrap_err();
        // shift every state to mean 0.1 so differences are zero-mean
        let mut h2 = SolveHistory::new(0.1, ScalarField2D::from_fn(g, |x, y| x.cos() * y.sin() + 0.1)).unwrap();
        for s in 1..5 {
            let s = s as f64;
            h2.push_field(ScalarField2D::from_fn(g, |x, y| (x + 0.3 * s).cos() * (2.0 * y).sin() + 0.1))
                .unwrap();
        }
        let uncached = h2.clone();
        h2.enable_pair_cache(PairMetric::HMinus1, Some(sp.clone()), 1e-10).unwrap();
        for n in 1..5 {
            for k in 0..n {
                let a = h2.pair_norm_sq(n, k, Metric::HMinus1(&sp)).unwrap();
                let b = uncached.pair_norm_sq(n, k, Metric::HMinus1(&sp)).unwrap();
                assert_relative_eq!(a, b, max_relative = 1e-12);
            }
        }
    }
}
