//! Dependence-testing achievability bound, evaluated by Monte Carlo.
//!
//! A code with `M` codewords over `L` blocks exists whenever
//! `ε(M) = P[i ≤ ln(M−1)] + (M−1)·E[e^{−i}·1{i > ln(M−1)}] ≤ ε`,
//! where `i = Σ_ℓ i_ℓ(ρ)`. The estimator of `ε(M)` treats
//! `λ = ln(M−1)` as a continuous variable; with common random numbers it
//! is nondecreasing in `λ`, so the largest admissible `λ` is found by
//! bisection, then `M` is rounded down to an integer.

use super::{BoundKind, BoundResult, McConfig, McMeta};
use crate::error::Result;
use crate::infodens::{ChannelParams, DensityEnv};
use crate::moments::{i_lower_mean_closed, stream_id, u_tilde, STREAM_CTX_DT};
use crate::sampling::{block_pair, map_streams, stream_spans, RngStream};
use crate::specfun::q_func_inv_raw;

/// Mean and standard error of the `ε(M)` estimator at `λ = ln(M−1)`.
///
/// Per sample the contribution is `1` below the threshold and
/// `e^{λ−i} ∈ (0,1)` above it, so everything stays in `[0,1]` and no
/// underflow-prone `e^{−i}` is ever formed on its own.
fn eps_estimate(sorted_sums: &[f64], lambda: f64) -> (f64, f64) {
    let n = sorted_sums.len() as f64;
    let below = sorted_sums.partition_point(|&x| x <= lambda);
    let mut tail = 0.0;
    let mut tail_sq = 0.0;
    for &x in &sorted_sums[below..] {
        let g = (lambda - x).exp();
        tail += g;
        tail_sq += g * g;
    }
    let mean = (below as f64 + tail) / n;
    let second = (below as f64 + tail_sq) / n;
    let var = (second - mean * mean).max(0.0);
    (mean, (var / n).sqrt())
}

/// Largest `λ` in `[0, λ_max]` with `ε̂(λ) ≤ target`, or `None` when even
/// `λ = 0` (i.e. `M = 2`) fails.
fn search_lambda(sorted_sums: &[f64], lambda_max: f64, target: f64) -> Option<f64> {
    if eps_estimate(sorted_sums, 0.0).0 > target {
        return None;
    }
    let (mut lo, mut hi) = (0.0f64, lambda_max);
    if eps_estimate(sorted_sums, hi).0 <= target {
        return Some(hi);
    }
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if eps_estimate(sorted_sums, mid).0 <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

/// Rate `ln M / (L·T)` after conservative integer rounding of
/// `M = ⌊e^λ⌋ + 1` (so that `ln(M−1) ≤ λ` and the bound still holds).
fn lambda_to_rate(lambda: f64, n_uses: f64) -> f64 {
    if lambda <= 0.0 {
        return 0.0;
    }
    if lambda < 30.0 {
        (lambda.exp().floor() + 1.0).ln() / n_uses
    } else {
        // ln(e^λ + 1) − λ < 1e−13 here
        lambda / n_uses
    }
}

/// Sorted draws of `i = Σ_ℓ i_ℓ(ρ)`.
fn sample_info_sums(p: &ChannelParams, mc: &McConfig) -> Vec<f64> {
    let t = p.t();
    let l = p.l();
    let env = DensityEnv::new(t, p.rho());
    let full = env.alpha_env(p.rho());
    let spans = stream_spans(mc.n_samples);
    let seed = mc.seed;
    let per_stream: Vec<Vec<f64>> = map_streams(mc.workers as usize, |idx| {
        let (_, count) = spans[idx];
        let mut rng = RngStream::new(seed, stream_id(STREAM_CTX_DT, idx));
        (0..count)
            .map(|_| {
                let mut sum = 0.0;
                for _ in 0..l {
                    sum += env.info(&full, block_pair(t, &mut rng));
                }
                sum
            })
            .collect()
    });
    let mut sums: Vec<f64> = Vec::with_capacity(mc.n_samples as usize);
    for chunk in per_stream {
        sums.extend(chunk);
    }
    sums.sort_unstable_by(f64::total_cmp);
    sums
}

/// Dependence-testing lower bound on `R*(L, ε, ρ)`, nats per channel use.
pub fn dt_lower(p: &ChannelParams, mc: &McConfig) -> Result<BoundResult> {
    mc.validate()?;
    let t = p.t();
    let l = p.l();
    let sums = sample_info_sums(p, mc);
    let seed = mc.seed;

    let lf = f64::from(l);
    let lambda_max = lf * i_lower_mean_closed(t, p.rho())? + 10.0 * (lf * u_tilde(t)?).sqrt();
    let n_uses = f64::from(p.blocklength());
    let eps = p.epsilon();

    let mut warnings = Vec::new();
    let lambda = match search_lambda(&sums, lambda_max, eps) {
        Some(v) => v,
        None => {
            warnings.push("even M = 2 exceeds the target error at this sample size".to_string());
            let meta = McMeta { n_samples: mc.n_samples, seed, warnings };
            return Ok(BoundResult {
                kind: BoundKind::Dt,
                rate: 0.0,
                ci_half_width: 0.0,
                t,
                rho: p.rho(),
                l,
                epsilon: eps,
                mc_meta: Some(meta),
            });
        }
    };
    let rate = lambda_to_rate(lambda, n_uses);

    // CI: re-run the search at ε ∓ the estimator's CI at the solution.
    let (_, se) = eps_estimate(&sums, lambda);
    let z = q_func_inv_raw((1.0 - mc.confidence) / 2.0);
    let delta = z * se;
    let rate_hi = search_lambda(&sums, lambda_max, eps + delta)
        .map_or(0.0, |lam| lambda_to_rate(lam, n_uses));
    let rate_lo = if eps - delta > 0.0 {
        search_lambda(&sums, lambda_max, eps - delta).map_or(0.0, |lam| lambda_to_rate(lam, n_uses))
    } else {
        0.0
    };
    if delta > 0.2 * eps {
        warnings.push(format!(
            "threshold crossing is CI-ambiguous: ε̂ interval ±{delta:.3e} vs target {eps:.3e}"
        ));
    }

    Ok(BoundResult {
        kind: BoundKind::Dt,
        rate,
        ci_half_width: 0.5 * (rate_hi - rate_lo),
        t,
        rho: p.rho(),
        l,
        epsilon: eps,
        mc_meta: Some(McMeta { n_samples: mc.n_samples, seed, warnings }),
    })
}

/// Achievable error probability at a fixed rate (nats per channel use):
/// the DT bound guarantees a code with `M = ⌈e^{rate·L·T}⌉` codewords and
/// error at most the returned estimate. Returns `(epsilon, ci_half_width)`.
pub fn dt_error_at_rate(p: &ChannelParams, rate: f64, mc: &McConfig) -> Result<(f64, f64)> {
    mc.validate()?;
    if !rate.is_finite() || rate <= 0.0 {
        return Err(crate::error::Error::domain(
            "dt_error_at_rate",
            format!("rate = {rate} must be > 0"),
        ));
    }
    let sums = sample_info_sums(p, mc);
    let ln_m = rate * f64::from(p.blocklength());
    let lambda = if ln_m < 30.0 {
        (ln_m.exp().ceil().max(2.0) - 1.0).ln()
    } else {
        ln_m
    };
    let (eps, se) = eps_estimate(&sums, lambda);
    let z = q_func_inv_raw((1.0 - mc.confidence) / 2.0);
    Ok((eps.min(1.0), z * se))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eps_estimate_is_monotone_in_lambda() {
        let sums: Vec<f64> = (0..1000).map(|i| 10.0 + 0.01 * i as f64).collect();
        let mut prev = 0.0;
        for k in 0..50 {
            let lam = 0.5 * k as f64;
            let (e, _) = eps_estimate(&sums, lam);
            assert!(e >= prev - 1e-15, "lam={lam}");
            prev = e;
        }
    }

    #[test]
    fn rate_increases_with_epsilon() {
        let rho = 10f64.powf(1.5);
        let mc = McConfig { n_samples: 20_000, seed: 3, workers: 2, ..McConfig::default() };
        let mut prev = 0.0;
        for &eps in &[1e-3, 1e-2, 1e-1, 0.3] {
            let p = ChannelParams::new(10, rho, 10, eps).unwrap();
            let r = dt_lower(&p, &mc).unwrap().rate;
            assert!(r >= prev, "eps={eps}: {r} < {prev}");
            prev = r;
        }
    }

    #[test]
    fn rate_is_nondecreasing_in_block_count() {
        let rho = 10f64.powf(1.5);
        let mc = McConfig { n_samples: 20_000, seed: 8, workers: 2, ..McConfig::default() };
        let mut prev = (0.0, 0.0);
        for &l in &[2u32, 5, 10, 20] {
            let p = ChannelParams::new(10, rho, l, 1e-2).unwrap();
            let r = dt_lower(&p, &mc).unwrap();
            assert!(
                r.rate >= prev.0 - 3.0 * (r.ci_half_width + prev.1),
                "L={l}: {} < {}",
                r.rate,
                prev.0
            );
            prev = (r.rate, r.ci_half_width);
        }
    }

    #[test]
    fn rate_is_deterministic_across_workers() {
        let p = ChannelParams::new(5, 31.6, 8, 1e-2).unwrap();
        let mc1 = McConfig { n_samples: 10_000, seed: 9, workers: 1, ..McConfig::default() };
        let mc4 = McConfig { workers: 4, ..mc1.clone() };
        let a = dt_lower(&p, &mc1).unwrap();
        let b = dt_lower(&p, &mc4).unwrap();
        assert_eq!(a.rate.to_bits(), b.rate.to_bits());
        assert_eq!(a.ci_half_width.to_bits(), b.ci_half_width.to_bits());
    }

    #[test]
    fn hopeless_target_gives_zero_rate() {
        // T=3, ρ tiny, one block: even M = 2 fails at ε = 1e-9.
        let p = ChannelParams::new(3, 1e-3, 1, 1e-9).unwrap();
        let mc = McConfig { n_samples: 2_000, seed: 1, workers: 1, ..McConfig::default() };
        let r = dt_lower(&p, &mc).unwrap();
        assert_eq!(r.rate, 0.0);
        assert!(!r.mc_meta.unwrap().warnings.is_empty());
    }
}
