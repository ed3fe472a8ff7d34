//! Small statistics toolbox: normal distribution helpers, Gaussian absolute
//! moments, Wilson intervals, and mergeable running moments for deterministic
//! parallel reduction.

use crate::error::{Error, Result};

/// Standard normal density.
#[inline]
pub fn normal_pdf(x: f64) -> f64 {
    const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal CDF via the complementary error function.
#[inline]
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
}

/// E|G|^k for G standard normal and integer k >= 0, in closed form.
///
/// Even k = 2m gives the double factorial (2m-1)!!; odd k = 2m+1 gives
/// sqrt(2/pi) * 2^m * m!.
pub fn abs_gaussian_moment(k: u32) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k.is_multiple_of(2) {
        // (k-1)!! = 1 * 3 * ... * (k-1)
        let mut prod = 1.0;
        let mut i = 1u32;
        while i < k {
            prod *= i as f64;
            i += 2;
        }
        prod
    } else {
        let m = (k - 1) / 2;
        let mut prod = 1.0;
        for j in 1..=m {
            prod *= 2.0 * j as f64;
        }
        (2.0 / std::f64::consts::PI).sqrt() * prod
    }
}

/// E|G|^q for real q >= 0 via the Gamma function: 2^{q/2} Gamma((q+1)/2) / sqrt(pi).
pub fn abs_gaussian_moment_real(q: f64) -> Result<f64> {
    if !(q >= 0.0) {
        return Err(Error::ParameterDomain(format!(
            "absolute moment order must be >= 0, got {q}"
        )));
    }
    Ok(2f64.powf(q / 2.0) * libm::tgamma((q + 1.0) / 2.0) / std::f64::consts::PI.sqrt())
}

/// 95% Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    const Z: f64 = 1.959_963_984_540_054; // 97.5% normal quantile
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z * Z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Running mean/variance accumulator (Welford), mergeable so that parallel
/// blocks can be combined in a fixed order for bitwise-stable results.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunningStats {
    n: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Chan et al. pairwise merge.
    pub fn merge(&mut self, other: &RunningStats) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n1 = self.n as f64;
        let n2 = other.n as f64;
        let delta = other.mean - self.mean;
        let total = n1 + n2;
        self.mean += delta * n2 / total;
        self.m2 += other.m2 + delta * delta * n1 * n2 / total;
        self.n += other.n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; 0 for fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n as f64 - 1.0)
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }
}

/// Upper bound on sum_{j>=1} j^{-s} for s > 1: partial sum plus the integral
/// tail bound N^{1-s}/(s-1), which overshoots the true series by at most f(N)/2.
pub fn power_series_sum_upper(s: f64, terms: u64) -> Result<f64> {
    if s <= 1.0 {
        return Err(Error::DivergentEnvelope(format!(
            "series sum j^(-{s}) diverges (need exponent > 1)"
        )));
    }
    let mut sum = 0.0;
    for j in 1..=terms {
        sum += (j as f64).powf(-s);
    }
    let n = terms as f64;
    Ok(sum + n.powf(1.0 - s) / (s - 1.0))
}
