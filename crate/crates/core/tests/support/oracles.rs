//! Brute-force reference implementations used only by tests.
//!
//! Everything here is deliberately independent of the library's own
//! algorithm choices: Stirling–Bernoulli instead of Lanczos for log-gamma,
//! adaptive Simpson integration of defining integrals instead of series /
//! continued fractions, harmonic sums for digamma at integers, bisection
//! on the integral for the Gaussian tail inverse.

/// Adaptive Simpson with absolute tolerance (test-local copy).
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fb: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, fm, flm, left, tol / 2.0, depth - 1)
                + rec(f, m, b, fm, fb, frm, right, tol / 2.0, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fb, fm, whole, tol, 52)
}

/// ln Γ(a) by recurrence into the Stirling–Bernoulli series region.
pub fn ln_gamma(a: f64) -> f64 {
    let mut x = a;
    let mut shift = 0.0;
    while x < 30.0 {
        shift -= x.ln();
        x += 1.0;
    }
    let ix = 1.0 / x;
    let ix2 = ix * ix;
    // Σ B_{2n}/(2n(2n−1) x^{2n−1})
    let series = ix
        * (1.0 / 12.0
            - ix2
                * (1.0 / 360.0
                    - ix2 * (1.0 / 1260.0 - ix2 * (1.0 / 1680.0 - ix2 * (1.0 / 1188.0)))));
    shift + (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + series
}

/// Regularized lower incomplete gamma by quadrature of the defining
/// integral `∫₀^x v^{a−1} e^{−v} dv / Γ(a)`, with the integrand divided
/// by its peak so the tolerance tracks the true scale.
pub fn reg_lower_gamma(a: f64, x: f64) -> f64 {
    ln_reg_lower_gamma(a, x).exp()
}

pub fn ln_reg_lower_gamma(a: f64, x: f64) -> f64 {
    assert!(a >= 1.0 && x > 0.0, "oracle needs a >= 1");
    let peak_ln = if a > 1.0 { (a - 1.0) * ((a - 1.0).ln() - 1.0) } else { 0.0 };
    // beyond a + 60√a + 60 the integrand is below e^{−200} of its peak
    let hi = x.min(a + 60.0 * (a.sqrt() + 1.0) + 60.0);
    let f = move |v: f64| -> f64 {
        if v <= 0.0 {
            f64::from(a == 1.0)
        } else {
            ((a - 1.0) * v.ln() - v - peak_ln).exp()
        }
    };
    let v_pk = hi.min(a - 1.0).max(hi * 1e-3);
    let tol = 1e-14 * f(v_pk).max(f(hi)) * hi;
    // Panel boundaries straddling the peak, so the first samples of a
    // panel can never all miss it.
    let mut cuts = vec![0.0, 0.25 * v_pk, v_pk, (a + 10.0 * (a.sqrt() + 1.0)).min(hi), hi];
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut j = 0.0;
    for w in cuts.windows(2) {
        if w[1] > w[0] {
            j += simpson(&f, w[0], w[1], tol / 4.0);
        }
    }
    (j.ln() + peak_ln - ln_gamma(a)).min(0.0)
}

/// E1 by quadrature of `∫_x^∞ e^{−t}/t dt` (truncated; the tail beyond
/// x+90 is below e^{−90} relative).
pub fn exp1(x: f64) -> f64 {
    assert!(x > 0.0);
    let scale = (-x).exp() / x;
    simpson(&|t: f64| (-t).exp() / t, x, x + 90.0, 1e-16 * scale.min(1.0) + 1e-300)
}

/// Gaussian tail by quadrature of the density (≈1e-12 relative).
pub fn q_func(x: f64) -> f64 {
    if x < 0.0 {
        return 1.0 - q_func(-x);
    }
    let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
    let scale = norm * (-(x * x) / 2.0).exp() / (x + 1.0);
    simpson(&|t: f64| norm * (-(t * t) / 2.0).exp(), x, x + 14.0, 1e-12 * scale.min(1.0) + 1e-300)
}

/// Inverse Gaussian tail by bisection on the quadrature oracle.
pub fn q_func_inv(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0);
    let (mut lo, mut hi) = (-9.0f64, 9.0f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if q_func(mid) > p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `2F1(1, T−1; T; x)` by the Euler integral `(T−1)∫₀¹ t^{T−2}/(1−xt) dt`.
pub fn gauss_2f1(t: u32, x: f64) -> f64 {
    assert!(t >= 2 && (0.0..1.0).contains(&x));
    let tm1 = f64::from(t) - 1.0;
    // Peak at u = 1 of height 1/(1−x); tolerance scales with the result.
    let scale = 1.0 / (1.0 - x);
    tm1 * simpson(&|u: f64| u.powf(tm1 - 1.0) / (1.0 - x * u), 0.0, 1.0, 1e-14 * scale)
}

/// Lower/upper bracket of `ζ(2, q)` from a long partial sum plus integral
/// tail bounds `∫_K^∞ ≤ tail ≤ ∫_{K−1}^∞`.
pub fn hurwitz_zeta2_bracket(q: f64) -> (f64, f64) {
    let k_terms = 200_000u32;
    let mut sum = 0.0;
    // summed small-to-large for accuracy
    for k in (0..k_terms).rev() {
        let term = q + f64::from(k);
        sum += 1.0 / (term * term);
    }
    let lo = sum + 1.0 / (q + f64::from(k_terms));
    let hi = sum + 1.0 / (q + f64::from(k_terms) - 1.0);
    (lo, hi)
}

/// ψ(n) = H_{n−1} − γ for integer n, with the harmonic number summed
/// small-to-large.
pub fn digamma_integer(n: u32) -> f64 {
    const EULER_GAMMA: f64 = 0.5772156649015329;
    let mut h = 0.0;
    for k in (1..n).rev() {
        h += 1.0 / f64::from(k);
    }
    h - EULER_GAMMA
}
