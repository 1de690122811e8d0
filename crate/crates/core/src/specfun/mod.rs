//! Self-contained special-function kernel.
//!
//! Everything the density formulas and normal approximations need lives
//! here: log-gamma, the regularized lower incomplete gamma function and its
//! logarithm, the digamma function, the Hurwitz zeta value `zeta(2, q)`, the
//! exponential integral `E1`, the Gauss hypergeometric pattern
//! `2F1(1, T-1; T; x)` and the Gaussian tail `Q` with its inverse.
//!
//! All routines are pure `f64` functions with no shared state. Public entry
//! points validate their documented domain and return [`Error::Domain`]
//! outside it; `pub(crate)` `*_raw` variants skip validation for hot loops
//! that have already checked their parameters.

mod expint;
mod gamma;
mod gaussian;
mod hyp2f1;
mod zeta;

use crate::error::{Error, Result};

pub(crate) use expint::{exp1_raw, exp1_scaled_raw};
pub(crate) use gamma::{digamma_raw, ln_gamma_raw, ln_reg_lower_gamma_raw, reg_lower_gamma_raw};
pub(crate) use gaussian::{q_func_inv_raw, q_func_raw};
pub(crate) use hyp2f1::hyp2f1_special_raw;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.5772156649015329;

fn check_finite(op: &'static str, name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(op, format!("{name} = {v} is not finite")))
    }
}

/// Natural logarithm of the Gamma function, `ln Γ(a)` for `a > 0`.
pub fn log_gamma(a: f64) -> Result<f64> {
    check_finite("log_gamma", "a", a)?;
    if a <= 0.0 {
        return Err(Error::domain("log_gamma", format!("a = {a} must be > 0")));
    }
    Ok(ln_gamma_raw(a))
}

/// Regularized lower incomplete gamma function `γ̃(a, x)` for `a > 0`, `x ≥ 0`.
///
/// Power series for `x < a + 1`, modified-Lentz continued fraction of the
/// upper tail otherwise.
pub fn reg_lower_inc_gamma(a: f64, x: f64) -> Result<f64> {
    check_finite("reg_lower_inc_gamma", "a", a)?;
    check_finite("reg_lower_inc_gamma", "x", x)?;
    if a <= 0.0 {
        return Err(Error::domain("reg_lower_inc_gamma", format!("a = {a} must be > 0")));
    }
    if x < 0.0 {
        return Err(Error::domain("reg_lower_inc_gamma", format!("x = {x} must be >= 0")));
    }
    Ok(reg_lower_gamma_raw(a, x))
}

/// `ln γ̃(a, x)` computed stably for `a > 0`, `x > 0`.
///
/// For small `x` the regularized function underflows to zero while its
/// logarithm is perfectly representable, so the series branch works in
/// log space throughout. The result is always `<= 0`.
pub fn log_reg_lower_inc_gamma(a: f64, x: f64) -> Result<f64> {
    check_finite("log_reg_lower_inc_gamma", "a", a)?;
    check_finite("log_reg_lower_inc_gamma", "x", x)?;
    if a <= 0.0 {
        return Err(Error::domain("log_reg_lower_inc_gamma", format!("a = {a} must be > 0")));
    }
    if x <= 0.0 {
        return Err(Error::domain("log_reg_lower_inc_gamma", format!("x = {x} must be > 0")));
    }
    Ok(ln_reg_lower_gamma_raw(a, x))
}

/// Upper bound `(T−1)·ln(1 + Γ(T)^{1/(T−1)}/x)` on `−ln γ̃(T−1, x)`.
pub fn alzer_upper_bound(t: u32, x: f64) -> Result<f64> {
    if t <= 2 {
        return Err(Error::domain("alzer_upper_bound", format!("T = {t} must be > 2")));
    }
    check_finite("alzer_upper_bound", "x", x)?;
    if x <= 0.0 {
        return Err(Error::domain("alzer_upper_bound", format!("x = {x} must be > 0")));
    }
    Ok(alzer_upper_bound_raw(t, x))
}

pub(crate) fn alzer_upper_bound_raw(t: u32, x: f64) -> f64 {
    let tm1 = f64::from(t) - 1.0;
    let root = (ln_gamma_raw(f64::from(t)) / tm1).exp();
    tm1 * (root / x).ln_1p()
}

/// Digamma function `ψ(a)` for `a > 0`.
pub fn digamma(a: f64) -> Result<f64> {
    check_finite("digamma", "a", a)?;
    if a <= 0.0 {
        return Err(Error::domain("digamma", format!("a = {a} must be > 0")));
    }
    Ok(digamma_raw(a))
}

/// Hurwitz zeta value `ζ(2, q) = Σ_{k≥0} (q+k)^{−2}` for `q > 0`.
pub fn hurwitz_zeta2(q: f64) -> Result<f64> {
    check_finite("hurwitz_zeta2", "q", q)?;
    if q <= 0.0 {
        return Err(Error::domain("hurwitz_zeta2", format!("q = {q} must be > 0")));
    }
    Ok(zeta::hurwitz_zeta2_raw(q))
}

/// Exponential integral `E1(x)` for `x > 0`.
pub fn exp1(x: f64) -> Result<f64> {
    check_finite("exp1", "x", x)?;
    if x <= 0.0 {
        return Err(Error::domain("exp1", format!("x = {x} must be > 0")));
    }
    Ok(exp1_raw(x))
}

/// Scaled exponential integral `x·e^x·E1(x)` for `x > 0`.
///
/// Evaluates the product without forming `e^x`, so it stays finite for
/// arbitrarily large `x` (the limit is 1).
pub fn exp1_scaled(x: f64) -> Result<f64> {
    check_finite("exp1_scaled", "x", x)?;
    if x <= 0.0 {
        return Err(Error::domain("exp1_scaled", format!("x = {x} must be > 0")));
    }
    Ok(exp1_scaled_raw(x))
}

/// Gauss hypergeometric pattern `2F1(1, T−1; T; x)` for integer `T ≥ 2`
/// and `0 ≤ x < 1`.
///
/// Production code always has `T > 2`; `T = 2` is accepted so the
/// closed-form identity `2F1(1,1;2;x) = −ln(1−x)/x` can be exercised.
pub fn gauss_2f1_special(t: u32, x: f64) -> Result<f64> {
    if t < 2 {
        return Err(Error::domain("gauss_2f1_special", format!("T = {t} must be >= 2")));
    }
    check_finite("gauss_2f1_special", "x", x)?;
    if !(0.0..1.0).contains(&x) {
        return Err(Error::domain("gauss_2f1_special", format!("x = {x} must lie in [0, 1)")));
    }
    Ok(hyp2f1_special_raw(t, x))
}

/// Gaussian tail probability `Q(x) = P[N(0,1) > x]`.
pub fn q_func(x: f64) -> Result<f64> {
    check_finite("q_func", "x", x)?;
    Ok(q_func_raw(x))
}

/// Inverse of the Gaussian tail probability, for `p` strictly inside `(0, 1)`.
pub fn q_func_inv(p: f64) -> Result<f64> {
    check_finite("q_func_inv", "p", p)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain("q_func_inv", format!("p = {p} must lie in (0, 1)")));
    }
    Ok(q_func_inv_raw(p))
}
