//! Quasistatic normal approximation: the rate `R` solving
//! `ε = E[Q((C(H) − L·R)/sqrt(V(H)/T))]` over the fading vector
//! `H = (H_1, …, H_L)` with `|H_j|² ~ Exp(1)`,
//! `C(H) = Σ_j ln(1+ρ|H_j|²)`.
//!
//! Two conditional-variance forms are available (see
//! [`QuasistaticVariance`]); draws with `V(H) ≤ 0` are discarded and
//! counted, and the run is flagged when more than 1% are dropped.

use super::{BoundKind, BoundResult, McConfig, McMeta, QuasistaticVariance};
use crate::error::{Error, Result};
use crate::infodens::ChannelParams;
use crate::moments::{stream_id, STREAM_CTX_QS};
use crate::sampling::{map_streams, stream_spans, RngStream};
use crate::specfun::{q_func_inv_raw, q_func_raw};

pub fn na_quasistatic(p: &ChannelParams, mc: &McConfig) -> Result<BoundResult> {
    mc.validate()?;
    let l = p.l() as usize;
    let rho = p.rho();
    let variance_form = mc.quasistatic_variance;
    let spans = stream_spans(mc.n_samples);
    let seed = mc.seed;

    // (C(H), V(H)) per draw; V ≤ 0 draws are dropped but counted.
    let per_stream: Vec<(Vec<(f64, f64)>, u64)> = map_streams(mc.workers as usize, |idx| {
        let (_, count) = spans[idx];
        let mut rng = RngStream::new(seed, stream_id(STREAM_CTX_QS, idx));
        let mut kept = Vec::with_capacity(count as usize);
        let mut dropped = 0u64;
        for _ in 0..count {
            let mut c = 0.0;
            let mut v = l as f64;
            for _ in 0..l {
                // |H|² ~ Exp(1) via inverse CDF
                let g = -rng.next_f64().ln();
                let lng = (rho * g).ln_1p();
                c += lng;
                v -= match variance_form {
                    QuasistaticVariance::AsWritten => 1.0 / (lng * lng),
                    QuasistaticVariance::Alternative => {
                        let d = 1.0 + rho * g;
                        1.0 / (d * d)
                    }
                };
            }
            if v > 0.0 {
                kept.push((c, v));
            } else {
                dropped += 1;
            }
        }
        (kept, dropped)
    });
    let mut samples: Vec<(f64, f64)> = Vec::with_capacity(mc.n_samples as usize);
    let mut dropped = 0u64;
    for (kept, d) in per_stream {
        samples.extend(kept);
        dropped += d;
    }
    if samples.len() < 2 {
        return Err(Error::numeric("na_quasistatic", "all draws had nonpositive conditional variance"));
    }

    let lf = f64::from(p.l());
    let tf = f64::from(p.t());
    let n_kept = samples.len() as f64;
    let eps_at = |r: f64| -> f64 {
        let mut acc = 0.0;
        for &(c, v) in &samples {
            acc += q_func_raw((c - lf * r) / (v / tf).sqrt());
        }
        acc / n_kept
    };

    // ε̂(R) is increasing in R; bracket then bisect.
    let eps = p.epsilon();
    if eps_at(0.0) >= eps {
        return Err(Error::numeric(
            "na_quasistatic",
            format!("target ε = {eps} is not bracketed: ε̂(0) = {} already exceeds it", eps_at(0.0)),
        ));
    }
    let mut hi = samples.iter().map(|&(c, _)| c).fold(f64::MIN, f64::max) / lf;
    let mut grow = 0;
    while eps_at(hi) <= eps {
        hi *= 2.0;
        grow += 1;
        if grow > 60 {
            return Err(Error::numeric("na_quasistatic", "failed to bracket the target error"));
        }
    }
    let mut lo = 0.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if eps_at(mid) <= eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let rate = 0.5 * (lo + hi);

    // CI via the per-sample spread of the Q terms at the solution.
    let mut sq = 0.0;
    for &(c, v) in &samples {
        let q = q_func_raw((c - lf * rate) / (v / tf).sqrt());
        sq += q * q;
    }
    let mean_q = eps_at(rate);
    let var_q = (sq / n_kept - mean_q * mean_q).max(0.0);
    let z = q_func_inv_raw((1.0 - mc.confidence) / 2.0);
    let delta = z * (var_q / n_kept).sqrt();
    let solve_for = |target: f64| -> f64 {
        if eps_at(0.0) >= target {
            return 0.0;
        }
        let (mut lo, mut hi) = (0.0f64, rate.max(1e-9) * 4.0 + 1.0);
        let mut grow = 0;
        while eps_at(hi) <= target {
            hi *= 2.0;
            grow += 1;
            if grow > 60 {
                break;
            }
        }
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if eps_at(mid) <= target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let rate_hi = solve_for(eps + delta);
    let rate_lo = if eps - delta > 0.0 { solve_for(eps - delta) } else { 0.0 };

    let mut warnings = Vec::new();
    let drop_frac = dropped as f64 / mc.n_samples as f64;
    if drop_frac > 0.01 {
        warnings.push(format!(
            "{:.2}% of draws had V(H) <= 0 under the as-written variance and were discarded",
            100.0 * drop_frac
        ));
    }

    Ok(BoundResult {
        kind: BoundKind::NaQuasistatic,
        rate,
        ci_half_width: 0.5 * (rate_hi - rate_lo).abs(),
        t: p.t(),
        rho,
        l: p.l(),
        epsilon: eps,
        mc_meta: Some(McMeta { n_samples: mc.n_samples, seed, warnings }),
    })
}
