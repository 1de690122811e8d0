//! Weakened meta-converse upper bound, evaluated by Monte Carlo.
//!
//! For every threshold `ln ξ` and power allocation `α⃗ ∈ [0, ρ]^L`,
//!
//! `R* ≤ [ln ξ − ln(1 − ε − P[Σ_ℓ j_ℓ(α_ℓ) ≥ ln ξ])]/(L·T)`
//!
//! holds whenever the log argument is positive; the code minimizes over a
//! `ln ξ` grid after maximizing the tail probability over a scalar grid of
//! homogeneous allocations `α_ℓ ≡ α ∈ [ρ/2, ρ]`. Random heterogeneous
//! allocations are probed as a stress check and only emit a warning if
//! they would tighten the optimum by more than the confidence interval —
//! the sign analysis of the power-sweep diagnostic says they should not.
//!
//! Threshold grids span the quadrature mean ± 6 standard deviations of
//! `Σ j̄_ℓ(α_ℓ)` per candidate. All candidates reuse the same underlying
//! Gamma draws (common random numbers), and tail probabilities are integer
//! sample counts, so the result is reproducible bit-for-bit.

use super::{BoundKind, BoundResult, McConfig, McMeta};
use crate::error::{Error, Result};
use crate::infodens::{AlphaEnv, ChannelParams, DensityEnv};
use crate::moments::{jbar_mean_var, stream_id, STREAM_CTX_MC, STREAM_CTX_MC_HET};
use crate::sampling::{block_pair, map_streams, stream_spans, RngStream};
use crate::specfun::q_func_inv_raw;
use std::sync::Mutex;

struct Candidate {
    /// One entry when homogeneous, `L` entries otherwise.
    alphas: Vec<f64>,
    heterogeneous: bool,
}

/// Threshold grid spanning `mean ± 6 sd` of `Σ j̄_ℓ(α_ℓ)`.
///
/// Homogeneous candidates get exact quadrature moments; heterogeneous
/// probes interpolate per-block moments from the homogeneous grid cache
/// (the moments vary slowly in α and only set grid endpoints).
fn candidate_grid(
    l: u32,
    cand: &Candidate,
    hom_alphas: &[f64],
    hom_moments: &[(f64, f64)],
    points: usize,
) -> Vec<f64> {
    let interp = |a: f64| -> (f64, f64) {
        let idx = hom_alphas.partition_point(|&x| x <= a).clamp(1, hom_alphas.len() - 1);
        let (a0, a1) = (hom_alphas[idx - 1], hom_alphas[idx]);
        let w = if a1 > a0 { ((a - a0) / (a1 - a0)).clamp(0.0, 1.0) } else { 0.0 };
        let (m0, v0) = hom_moments[idx - 1];
        let (m1, v1) = hom_moments[idx];
        (m0 + w * (m1 - m0), v0 + w * (v1 - v0))
    };
    let (mut mean, mut var) = (0.0, 0.0);
    if cand.heterogeneous {
        for &a in &cand.alphas {
            let (m, v) = interp(a);
            mean += m;
            var += v;
        }
    } else {
        // a homogeneous candidate sits exactly on a cache point
        let (m, v) = interp(cand.alphas[0]);
        mean = f64::from(l) * m;
        var = f64::from(l) * v;
    }
    let sd = var.max(0.0).sqrt();
    let lo = mean - 6.0 * sd;
    let hi = mean + 6.0 * sd;
    let step = (hi - lo) / (points - 1) as f64;
    (0..points).map(|i| lo + step * i as f64).collect()
}

/// Sampled tail counts of `Σ_ℓ j_ℓ(α_ℓ)` over the union threshold grid,
/// separately maximized over homogeneous candidates and over all probes.
struct TailScan {
    thresholds: Vec<f64>,
    sup_hom: Vec<u64>,
    sup_all: Vec<u64>,
    n_samples: u64,
    n_uses: f64,
}

fn scan(p: &ChannelParams, mc: &McConfig) -> Result<TailScan> {
    let t = p.t();
    let l = p.l() as usize;
    let rho = p.rho();
    let env = DensityEnv::new(t, rho);

    let n_hom = mc.alpha_grid_size as usize;
    let mut candidates: Vec<Candidate> = (0..n_hom)
        .map(|i| {
            let frac = if n_hom == 1 { 1.0 } else { i as f64 / (n_hom - 1) as f64 };
            Candidate { alphas: vec![rho / 2.0 + frac * rho / 2.0], heterogeneous: false }
        })
        .collect();
    let mut het_rng = RngStream::new(mc.seed, stream_id(STREAM_CTX_MC_HET, 0));
    for _ in 0..mc.heterogeneous_probes {
        let alphas = (0..l).map(|_| rho / 2.0 + het_rng.next_f64() * rho / 2.0).collect();
        candidates.push(Candidate { alphas, heterogeneous: true });
    }

    let hom_alphas: Vec<f64> =
        candidates.iter().filter(|c| !c.heterogeneous).map(|c| c.alphas[0]).collect();
    let hom_moments: Vec<(f64, f64)> = hom_alphas
        .iter()
        .map(|&a| jbar_mean_var(p.t(), p.rho(), a))
        .collect::<Result<_>>()?;

    let grid_points = mc.xi_grid_size as usize;
    let mut thresholds: Vec<f64> = Vec::with_capacity(candidates.len() * grid_points);
    for cand in &candidates {
        thresholds.extend(candidate_grid(p.l(), cand, &hom_alphas, &hom_moments, grid_points));
    }
    thresholds.sort_unstable_by(f64::total_cmp);
    thresholds.dedup();
    let n_thr = thresholds.len();

    let alpha_envs: Vec<Vec<AlphaEnv>> = candidates
        .iter()
        .map(|c| {
            if c.heterogeneous {
                c.alphas.iter().map(|&a| env.alpha_env(a)).collect()
            } else {
                vec![env.alpha_env(c.alphas[0])]
            }
        })
        .collect();

    // bucket[c][k] = samples whose sum has exactly k thresholds <= it;
    // integer accumulation commutes, so shared-mutex merging stays exact.
    let n_cand = candidates.len();
    let buckets: Mutex<Vec<Vec<u64>>> = Mutex::new(vec![vec![0u64; n_thr + 1]; n_cand]);
    let spans = stream_spans(mc.n_samples);
    let seed = mc.seed;
    map_streams(mc.workers as usize, |idx| {
        let (_, count) = spans[idx];
        if count == 0 {
            return;
        }
        let mut rng = RngStream::new(seed, stream_id(STREAM_CTX_MC, idx));
        let mut local = vec![vec![0u32; n_thr + 1]; n_cand];
        let mut pairs = Vec::with_capacity(l);
        for _ in 0..count {
            pairs.clear();
            for _ in 0..l {
                pairs.push(block_pair(t, &mut rng));
            }
            for (c, envs) in alpha_envs.iter().enumerate() {
                let mut sum = 0.0;
                if envs.len() == 1 {
                    for &b in &pairs {
                        sum += env.mismatched(&envs[0], b);
                    }
                } else {
                    for (ae, &b) in envs.iter().zip(&pairs) {
                        sum += env.mismatched(ae, b);
                    }
                }
                let pos = thresholds.partition_point(|&thr| thr <= sum);
                local[c][pos] += 1;
            }
        }
        let mut shared = buckets.lock().unwrap();
        for (dst, src) in shared.iter_mut().zip(&local) {
            for (d, &s) in dst.iter_mut().zip(src) {
                *d += u64::from(s);
            }
        }
    });

    // tail_count[c][j] = #{samples : Σ j_ℓ >= thresholds[j]}, then the
    // pointwise maximum over candidates.
    let buckets = buckets.into_inner().unwrap();
    let mut sup_hom = vec![0u64; n_thr];
    let mut sup_all = vec![0u64; n_thr];
    for (c, b) in buckets.into_iter().enumerate() {
        let mut acc = 0u64;
        for j in (0..n_thr).rev() {
            acc += b[j + 1];
            if !candidates[c].heterogeneous {
                sup_hom[j] = sup_hom[j].max(acc);
            }
            sup_all[j] = sup_all[j].max(acc);
        }
    }
    Ok(TailScan {
        thresholds,
        sup_hom,
        sup_all,
        n_samples: mc.n_samples,
        n_uses: f64::from(p.blocklength()),
    })
}

impl TailScan {
    /// `inf_ξ [ln ξ − ln(1−ε−P̂sup)]/(L·T)`, with the tail estimate shifted
    /// by `p_shift` standard errors; `None` when every grid point has
    /// `1−ε−P̂ ≤ 0`.
    fn bound_rate(&self, eps: f64, hom_only: bool, p_shift: f64) -> Option<f64> {
        let n = self.n_samples as f64;
        let counts = if hom_only { &self.sup_hom } else { &self.sup_all };
        let mut best: Option<f64> = None;
        for (j, &thr) in self.thresholds.iter().enumerate() {
            let p_hat = counts[j] as f64 / n;
            let p_adj = (p_hat + p_shift * (p_hat * (1.0 - p_hat) / n).sqrt()).clamp(0.0, 1.0);
            let margin = 1.0 - eps - p_adj;
            if margin > 0.0 {
                let rate = (thr - margin.ln()) / self.n_uses;
                if best.is_none_or(|b| rate < b) {
                    best = Some(rate);
                }
            }
        }
        best
    }
}

pub fn mc_upper(p: &ChannelParams, mc: &McConfig) -> Result<BoundResult> {
    mc.validate()?;
    let data = scan(p, mc)?;
    let eps = p.epsilon();
    let z = q_func_inv_raw((1.0 - mc.confidence) / 2.0);

    let rate = data.bound_rate(eps, true, 0.0).ok_or_else(|| {
        Error::numeric("mc_upper", "1 − ε − P̂ ≤ 0 at every threshold; enlarge the grid or sample size")
    })?;
    let rate_hi = data.bound_rate(eps, true, -z).unwrap_or(rate);
    let rate_lo = data.bound_rate(eps, true, z).unwrap_or(rate);
    let ci = 0.5 * (rate_hi - rate_lo).abs();

    let mut warnings = Vec::new();
    if mc.heterogeneous_probes > 0 {
        if let Some(rate_all) = data.bound_rate(eps, false, 0.0) {
            if rate_all < rate - ci {
                warnings.push(format!(
                    "heterogeneous allocation beats the homogeneous optimum: {rate_all} < {rate} − {ci}"
                ));
            }
        }
    }

    Ok(BoundResult {
        kind: BoundKind::Mc,
        rate,
        ci_half_width: ci,
        t: p.t(),
        rho: p.rho(),
        l: p.l(),
        epsilon: eps,
        mc_meta: Some(McMeta { n_samples: mc.n_samples, seed: mc.seed, warnings }),
    })
}

/// Converse on the error probability at a fixed rate (nats per channel
/// use): the smallest `ε` the meta-converse certifies for any code of
/// this rate. Returns `(epsilon, ci_half_width)`.
pub fn mc_error_at_rate(p: &ChannelParams, rate: f64, mc: &McConfig) -> Result<(f64, f64)> {
    mc.validate()?;
    if !rate.is_finite() || rate <= 0.0 {
        return Err(Error::domain("mc_error_at_rate", format!("rate = {rate} must be > 0")));
    }
    let data = scan(p, mc)?;
    let solve = |p_shift: f64| -> f64 {
        // bound_rate is nondecreasing in ε; find ε with bound_rate = rate
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            match data.bound_rate(mid, true, p_shift) {
                Some(r) if r >= rate => hi = mid,
                Some(_) => lo = mid,
                // margin never positive: ε too large
                None => hi = mid,
            }
        }
        0.5 * (lo + hi)
    };
    let z = q_func_inv_raw((1.0 - mc.confidence) / 2.0);
    let eps = solve(0.0);
    let eps_hi = solve(z);
    let eps_lo = solve(-z);
    Ok((eps, 0.5 * (eps_hi - eps_lo).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: u64, seed: u64, workers: u32) -> McConfig {
        McConfig { n_samples: n, seed, workers, ..McConfig::default() }
    }

    #[test]
    fn rate_weakly_increases_with_epsilon() {
        let rho = 10f64.powf(1.5);
        let mc = cfg(20_000, 4, 2);
        let mut prev = 0.0;
        for &eps in &[1e-3, 1e-2, 1e-1] {
            let p = ChannelParams::new(10, rho, 10, eps).unwrap();
            let r = mc_upper(&p, &mc).unwrap().rate;
            assert!(r >= prev - 1e-9, "eps={eps}: {r} < {prev}");
            prev = r;
        }
    }

    #[test]
    fn deterministic_across_workers() {
        let p = ChannelParams::new(5, 31.6, 6, 1e-2).unwrap();
        let a = mc_upper(&p, &cfg(8_000, 12, 1)).unwrap();
        let b = mc_upper(&p, &cfg(8_000, 12, 4)).unwrap();
        assert_eq!(a.rate.to_bits(), b.rate.to_bits());
    }

    #[test]
    fn sandwich_against_dt_at_moderate_size() {
        let p = ChannelParams::new(10, 31.6, 10, 1e-2).unwrap();
        let mc = cfg(30_000, 21, 2);
        let lower = super::super::dt_lower(&p, &mc).unwrap();
        let upper = mc_upper(&p, &mc).unwrap();
        let slack = 3.0 * (lower.ci_half_width + upper.ci_half_width);
        assert!(
            lower.rate <= upper.rate + slack,
            "dt {} > mc {} + {slack}",
            lower.rate,
            upper.rate
        );
    }

    #[test]
    fn error_inversion_is_consistent_with_the_rate_bound() {
        let p = ChannelParams::new(10, 31.6, 10, 1e-2).unwrap();
        let mc = cfg(20_000, 33, 2);
        let r = mc_upper(&p, &mc).unwrap().rate;
        // the certified ε at that exact rate should come back ≈ 1e-2
        let (eps, ci) = mc_error_at_rate(&p, r, &mc).unwrap();
        assert!((eps - 1e-2).abs() < 3.0 * ci.max(2e-3), "eps={eps} ci={ci}");
    }
}
