//! Scalar special functions shared by the coefficient and Mittag-Leffler code.

/// Gamma function.
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// Reciprocal gamma, entire: zero at the poles `0, -1, -2, ...`.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    1.0 / libm::tgamma(x)
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// `(k+1)^e - k^e` without cancellation for large `k`.
pub fn forward_power_diff(k: f64, e: f64) -> f64 {
    if k == 0.0 {
        return 1.0;
    }
    k.powf(e) * (e * (1.0 / k).ln_1p()).exp_m1()
}

/// Neumaier compensated sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}
