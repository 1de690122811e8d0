//! Deterministic sampling of the Gamma-variate channel statistics and
//! generic Monte Carlo estimation.
//!
//! Per coherence block the channel enters the densities only through two
//! independent variates `Z1 ~ Gamma(1,1)` and `Z2 ~ Gamma(T−1,1)`
//! ([`BlockPair`]); sampling one block is O(1) in the coherence interval.
//! A full `T`-dimensional vector channel sampler exists as a
//! cross-validation path ([`sample_fading_block`]).
//!
//! Estimation is organized around fixed logical streams: an operation
//! splits its samples over [`N_STREAMS`] counter-based streams, workers
//! process whole streams, and partial results merge along a fixed pairwise
//! tree. The output is bit-identical for any worker count.

mod estimate;
mod rng;

pub use estimate::{mc_mean_ci, pairwise_sum, McEstimate, MomentAccumulator};
pub use rng::RngStream;

use crate::error::{Error, Result};

/// Number of logical sample streams per Monte Carlo operation. Fixed so
/// results do not depend on how many workers happen to run them.
pub const N_STREAMS: usize = 64;

/// The per-block sufficient statistic: `z1 ~ Gamma(1,1)`, `z2 ~ Gamma(T−1,1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockPair {
    pub z1: f64,
    pub z2: f64,
}

/// Minimal complex scalar for the vector-channel validation path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cplx {
    pub re: f64,
    pub im: f64,
}

impl Cplx {
    pub fn new(re: f64, im: f64) -> Self {
        Cplx { re, im }
    }

    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }
}

/// `‖v‖²` of a complex vector.
pub fn vec_norm_sqr(v: &[Cplx]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}

/// `|y^H x|²` of two complex vectors.
pub fn inner_abs_sqr(y: &[Cplx], x: &[Cplx]) -> f64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for (a, b) in y.iter().zip(x) {
        // conj(y) * x
        re += a.re * b.re + a.im * b.im;
        im += a.re * b.im - a.im * b.re;
    }
    re * re + im * im
}

/// One draw from `Gamma(shape, 1)` for `shape ≥ 1` (Marsaglia–Tsang
/// squeeze/accept-reject).
pub fn sample_gamma(shape: f64, rng: &mut RngStream) -> Result<f64> {
    if !shape.is_finite() || shape < 1.0 {
        return Err(Error::domain("sample_gamma", format!("shape = {shape} must be >= 1")));
    }
    Ok(gamma_mt(shape, rng))
}

#[inline]
pub(crate) fn gamma_mt(shape: f64, rng: &mut RngStream) -> f64 {
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x = rng.next_normal();
        let t = 1.0 + c * x;
        if t <= 0.0 {
            continue;
        }
        let v = t * t * t;
        let u = rng.next_f64();
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 {
            return d * v;
        }
        if u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

/// Independent `(z1, z2)` for one coherence block; draws `z1` first.
pub fn sample_block_pair(t: u32, rng: &mut RngStream) -> Result<BlockPair> {
    if t <= 2 {
        return Err(Error::domain("sample_block_pair", format!("T = {t} must be > 2")));
    }
    Ok(block_pair(t, rng))
}

#[inline]
pub(crate) fn block_pair(t: u32, rng: &mut RngStream) -> BlockPair {
    let z1 = gamma_mt(1.0, rng);
    let z2 = gamma_mt(f64::from(t) - 1.0, rng);
    BlockPair { z1, z2 }
}

fn complex_gaussian(rng: &mut RngStream) -> Cplx {
    // zero mean, unit variance: each component N(0, 1/2)
    let s = 0.5f64.sqrt();
    Cplx::new(s * rng.next_normal(), s * rng.next_normal())
}

/// One vector-channel realization: input uniform on the sphere of squared
/// norm `T·alpha`, output `y = h·x + w`. Consumption order is fixed:
/// sphere direction (2T normals), fading (2), noise (2T).
pub fn sample_fading_block(
    t: u32,
    rho: f64,
    alpha: f64,
    rng: &mut RngStream,
) -> Result<(Vec<Cplx>, Vec<Cplx>)> {
    if t <= 2 {
        return Err(Error::domain("sample_fading_block", format!("T = {t} must be > 2")));
    }
    if !rho.is_finite() || rho <= 0.0 {
        return Err(Error::domain("sample_fading_block", format!("rho = {rho} must be > 0")));
    }
    if !(0.0..=rho).contains(&alpha) {
        return Err(Error::domain("sample_fading_block", format!("alpha = {alpha} must lie in [0, rho]")));
    }
    let dim = t as usize;
    let mut x: Vec<Cplx> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    let norm = vec_norm_sqr(&x).sqrt();
    let scale = (f64::from(t) * alpha).sqrt() / norm;
    for c in &mut x {
        c.re *= scale;
        c.im *= scale;
    }
    let h = complex_gaussian(rng);
    let y: Vec<Cplx> = x
        .iter()
        .map(|c| {
            let w = complex_gaussian(rng);
            Cplx::new(h.re * c.re - h.im * c.im + w.re, h.re * c.im + h.im * c.re + w.im)
        })
        .collect();
    Ok((x, y))
}

/// Splits `n_total` items over the fixed logical streams. Returns
/// `(start, count)` per stream; empty streams get `count = 0`.
pub(crate) fn stream_spans(n_total: u64) -> Vec<(u64, u64)> {
    let per = n_total.div_ceil(N_STREAMS as u64);
    (0..N_STREAMS as u64)
        .map(|s| {
            let start = s * per;
            let count = n_total.saturating_sub(start).min(per);
            (start, count)
        })
        .collect()
}

/// Runs `job(stream_index)` over all logical streams on `workers` OS
/// threads and returns results in stream order. The assignment of streams
/// to workers never influences the result, only the wall time.
pub fn map_streams<R: Send>(workers: usize, job: impl Fn(usize) -> R + Sync) -> Vec<R> {
    let workers = workers.clamp(1, N_STREAMS);
    if workers == 1 {
        return (0..N_STREAMS).map(job).collect();
    }
    let next = std::sync::atomic::AtomicUsize::new(0);
    let slots: Vec<std::sync::Mutex<Option<R>>> =
        (0..N_STREAMS).map(|_| std::sync::Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if idx >= N_STREAMS {
                    break;
                }
                let r = job(idx);
                *slots[idx].lock().unwrap() = Some(r);
            });
        }
    });
    slots.into_iter().map(|m| m.into_inner().unwrap().unwrap()).collect()
}

/// Merges per-stream values along a fixed binary tree (stream order),
/// independent of how the values were produced.
pub fn pairwise_merge<R: Clone>(items: &[R], merge: impl Fn(&R, &R) -> R + Copy) -> R {
    assert!(!items.is_empty());
    if items.len() == 1 {
        return items[0].clone();
    }
    let mid = items.len().div_ceil(2);
    let left = pairwise_merge(&items[..mid], merge);
    let right = pairwise_merge(&items[mid..], merge);
    merge(&left, &right)
}
