//! The Gauss hypergeometric pattern `2F1(1, T−1; T; x)` for integer `T`.
//!
//! With these parameters the series collapses to
//! `(T−1)·Σ_{k≥0} x^k/(T−1+k)`, and for integer `T` there is the exact
//! logarithmic form
//! `(T−1)·x^{1−T}·(−ln(1−x) − Σ_{m=1}^{T−2} x^m/m)`.
//!
//! The direct series converges geometrically but needs O(1/(1−x)) terms as
//! `x → 1`, where the physical argument `Tρ/(1+Tρ)` lives at high SNR; the
//! logarithmic form is exact there but cancels catastrophically for small
//! `x`. Splitting at 0.999 keeps both branches comfortably inside their
//! accurate regions.

const SPLIT: f64 = 0.999;

pub(crate) fn hyp2f1_special_raw(t: u32, x: f64) -> f64 {
    debug_assert!(t >= 2 && (0.0..1.0).contains(&x));
    if x == 0.0 {
        return 1.0;
    }
    let tm1 = f64::from(t) - 1.0;
    if x <= SPLIT {
        // (T−1)·Σ_{k≥0} x^k/(T−1+k); tail after term k is < term_k·x/(1−x).
        let tail_guard = x / (1.0 - x);
        let mut pow = 1.0;
        let mut sum = 1.0 / tm1;
        for k in 1..200_000 {
            pow *= x;
            let term = pow / (tm1 + f64::from(k));
            sum += term;
            if term * tail_guard < sum * 1e-17 {
                break;
            }
        }
        tm1 * sum
    } else {
        let mut bracket = -(-x).ln_1p(); // −ln(1−x)
        let mut pow = 1.0;
        for m in 1..=(t - 2) {
            pow *= x;
            bracket -= pow / f64::from(m);
        }
        tm1 * (-(tm1) * x.ln()).exp() * bracket
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branches_agree_at_the_split() {
        for &t in &[3u32, 5, 10, 20, 40] {
            let tm1 = f64::from(t) - 1.0;
            let x = SPLIT;
            let mut pow = 1.0;
            let mut sum = 1.0 / tm1;
            for k in 1..2_000_000 {
                pow *= x;
                let term = pow / (tm1 + f64::from(k));
                sum += term;
                if term < sum * 1e-18 {
                    break;
                }
            }
            let series = tm1 * sum;
            let mut bracket = -(-x).ln_1p();
            let mut xp = 1.0;
            for m in 1..=(t - 2) {
                xp *= x;
                bracket -= xp / f64::from(m);
            }
            let logform = tm1 * (-(tm1) * x.ln()).exp() * bracket;
            let rel = ((series - logform) / series).abs();
            assert!(rel < 1e-11, "t={t}: series {series} vs log form {logform}");
        }
    }

    #[test]
    fn t2_identity() {
        let x = 0.5;
        let expected = -(1.0f64 - x).ln() / x;
        assert!((hyp2f1_special_raw(2, x) - expected).abs() < 1e-14);
    }
}
