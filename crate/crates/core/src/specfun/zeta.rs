//! Hurwitz zeta at s = 2: `ζ(2, q) = Σ_{k≥0} (q+k)^{−2}`.

/// Direct summation until the argument is large, then the Euler–Maclaurin
/// tail `1/m + 1/(2m²) + 1/(6m³) − 1/(30m⁵) + 1/(42m⁷)`.
pub(crate) fn hurwitz_zeta2_raw(q: f64) -> f64 {
    debug_assert!(q > 0.0);
    let mut sum = 0.0;
    let mut k = 0u32;
    while q + f64::from(k) < 25.0 {
        let term = q + f64::from(k);
        sum += 1.0 / (term * term);
        k += 1;
    }
    let m = q + f64::from(k);
    let im = 1.0 / m;
    let im2 = im * im;
    sum + im + 0.5 * im2 + im2 * im / 6.0 - im2 * im2 * im / 30.0 + im2 * im2 * im2 * im / 42.0
}
