//! Built-in sanity checks: a fast subset of the full test suites, meant
//! for quick installation smoke testing.

use blockfade_core::aloha::{optimize_slots, AlohaScenario, ChannelModel};
use blockfade_core::bounds::{dt_lower, na_high_snr, NaVariant};
use blockfade_core::infodens::{
    implied_block_pair, info_density, info_density_lower, mismatched_density,
    mismatched_density_upper,
};
use blockfade_core::sampling::{sample_block_pair, sample_fading_block, RngStream};
use blockfade_core::{specfun, ChannelParams, McConfig};

struct Outcome {
    passed: u32,
    failed: u32,
}

impl Outcome {
    fn check(&mut self, name: &str, ok: bool, detail: String) {
        if ok {
            self.passed += 1;
            println!("PASS {name}");
        } else {
            self.failed += 1;
            println!("FAIL {name}: {detail}");
        }
    }
}

pub fn run() -> bool {
    let mut o = Outcome { passed: 0, failed: 0 };

    let g1 = specfun::log_gamma(1.0).unwrap();
    o.check("log_gamma(1) = 0", g1 == 0.0, format!("{g1}"));

    let p_half = specfun::reg_lower_inc_gamma(1.0, 2.0f64.ln()).unwrap();
    o.check("incomplete gamma exponential identity", (p_half - 0.5).abs() < 1e-14, format!("{p_half}"));

    let x = 2.5f64;
    let rt = specfun::q_func_inv(specfun::q_func(x).unwrap()).unwrap();
    o.check("Q inverse roundtrip", (rt - x).abs() < 1e-10, format!("{rt}"));

    // density orderings and the vector/Gamma equivalence on a small draw set
    let p = ChannelParams::new(6, 31.6, 4, 1e-3).unwrap();
    let mut rng = RngStream::new(7, 0);
    let mut ordered = true;
    for _ in 0..2000 {
        let b = sample_block_pair(6, &mut rng).unwrap();
        let i = info_density(&p, b);
        let ilow = info_density_lower(&p, b);
        let j = mismatched_density(&p, 20.0, b).unwrap();
        let jbar = mismatched_density_upper(&p, 20.0, b).unwrap();
        ordered &= ilow <= i + 1e-12 && j <= jbar + 1e-12;
    }
    o.check("density orderings", ordered, "pointwise ordering violated".to_string());

    let (vx, vy) = sample_fading_block(6, 31.6, 20.0, &mut rng).unwrap();
    let direct = blockfade_core::infodens::density_from_vectors(&p, &vx, &vy).unwrap();
    let via = mismatched_density(&p, 20.0, implied_block_pair(&vx, &vy)).unwrap();
    o.check(
        "vector path equals Gamma path",
        (direct - via).abs() <= 1e-10 * direct.abs().max(1.0),
        format!("{direct} vs {via}"),
    );

    let classic = AlohaScenario::new(480, 256, 12, ChannelModel::Classic, 0, 0.0).unwrap();
    let (slots, _) = optimize_slots(&classic).unwrap();
    o.check("classic ALOHA optimum", slots == 12, format!("s={slots}"));

    let noncoh = AlohaScenario::new(480, 256, 12, ChannelModel::Noncoherent, 5, 10f64.powf(1.5)).unwrap();
    let (slots_nc, _) = optimize_slots(&noncoh).unwrap();
    o.check("noncoherent ALOHA cell (15 dB, T=5)", slots_nc == 4, format!("s={slots_nc}"));

    // determinism across worker counts
    let pp = ChannelParams::new(5, 31.6, 8, 1e-2).unwrap();
    let mc1 = McConfig { n_samples: 5000, seed: 3, workers: 1, ..McConfig::default() };
    let mc2 = McConfig { workers: 2, ..mc1.clone() };
    let r1 = dt_lower(&pp, &mc1).unwrap().rate;
    let r2 = dt_lower(&pp, &mc2).unwrap().rate;
    o.check("worker-count invariance", r1.to_bits() == r2.to_bits(), format!("{r1} vs {r2}"));

    // normal approximation at a pinned point
    let pt = ChannelParams::new(20, 10f64.powf(2.5), 25, 1e-3).unwrap();
    let na = na_high_snr(&pt, NaVariant::Simplified).unwrap().rate;
    o.check(
        "high-SNR normal approximation spot value",
        (na - 4.084242183502).abs() < 1e-9,
        format!("{na}"),
    );

    println!("selftest: {} passed, {} failed", o.passed, o.failed);
    o.failed == 0
}
