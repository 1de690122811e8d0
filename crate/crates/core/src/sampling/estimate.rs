//! Sample-mean estimates and streaming central moments.

use crate::error::{Error, Result};
use crate::specfun::q_func_inv_raw;

/// A Monte Carlo mean with a normal-theory confidence interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub ci_half_width: f64,
    pub n_samples: u64,
    pub confidence: f64,
}

impl McEstimate {
    /// Whether `value` lies inside the interval.
    pub fn covers(&self, value: f64) -> bool {
        (value - self.mean).abs() <= self.ci_half_width
    }
}

/// Pairwise (cascade) summation; the reduction tree depends only on the
/// slice length, so sums are reproducible bit-for-bit.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        let mut s = 0.0;
        for &x in xs {
            s += x;
        }
        return s;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Sample mean and normal-theory CI half-width
/// `Q⁻¹((1−confidence)/2) · s/√n`.
pub fn mc_mean_ci(samples: &[f64], confidence: f64) -> Result<McEstimate> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::domain("mc_mean_ci", format!("need at least 2 samples, got {n}")));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::domain("mc_mean_ci", format!("confidence = {confidence} must lie in (0, 1)")));
    }
    let nf = n as f64;
    let mean = pairwise_sum(samples) / nf;
    let ss: Vec<f64> = samples.iter().map(|&x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&ss) / (nf - 1.0);
    let z = q_func_inv_raw((1.0 - confidence) / 2.0);
    Ok(McEstimate {
        mean,
        ci_half_width: z * (var / nf).sqrt(),
        n_samples: n as u64,
        confidence,
    })
}

/// Streaming central moments up to order four, mergeable across streams.
///
/// The merge identities (Pébay) are exact, so combining per-stream
/// accumulators along a fixed tree yields a deterministic result.
#[derive(Debug, Clone, Copy, Default)]
pub struct MomentAccumulator {
    n: u64,
    mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

impl MomentAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        let n1 = self.n as f64;
        self.n += 1;
        let n = self.n as f64;
        let delta = x - self.mean;
        let dn = delta / n;
        let dn2 = dn * dn;
        let term1 = delta * dn * n1;
        self.mean += dn;
        self.m4 += term1 * dn2 * (n * n - 3.0 * n + 3.0) + 6.0 * dn2 * self.m2 - 4.0 * dn * self.m3;
        self.m3 += term1 * dn * (n - 2.0) - 3.0 * dn * self.m2;
        self.m2 += term1;
    }

    pub fn merge(&self, other: &Self) -> Self {
        if self.n == 0 {
            return *other;
        }
        if other.n == 0 {
            return *self;
        }
        let na = self.n as f64;
        let nb = other.n as f64;
        let n = na + nb;
        let delta = other.mean - self.mean;
        let d2 = delta * delta;
        let mean = self.mean + delta * nb / n;
        let m2 = self.m2 + other.m2 + d2 * na * nb / n;
        let m3 = self.m3
            + other.m3
            + delta * d2 * na * nb * (na - nb) / (n * n)
            + 3.0 * delta * (na * other.m2 - nb * self.m2) / n;
        let m4 = self.m4
            + other.m4
            + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
            + 6.0 * d2 * (na * na * other.m2 + nb * nb * self.m2) / (n * n)
            + 4.0 * delta * (na * other.m3 - nb * self.m3) / n;
        MomentAccumulator { n: self.n + other.n, mean, m2, m3, m4 }
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n as f64 - 1.0)
        }
    }

    /// Central sample moments `m_k = Σ(x−x̄)^k / n`.
    pub fn central2(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.m2 / self.n as f64
        }
    }

    pub fn central4(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.m4 / self.n as f64
        }
    }
}
