//! Per-block information densities in the Gamma-variate representation.
//!
//! With USTM inputs the channel enters all densities only through
//! `s = (1+Tα)·Z1 + Z2`, where `T·α = ‖x‖²` is the per-block input power.
//! Four per-block quantities matter:
//!
//! * `i(ρ)` — the information density of the USTM input/output pair,
//! * `ī(ρ)` — `i(ρ)` with the incomplete-gamma correction dropped
//!   (a pointwise lower bound),
//! * `j(α)` — the mismatched density with the USTM output law in the
//!   denominator and per-block power `T·α ≤ T·ρ`; `j(ρ) = i(ρ)`,
//! * `j̄(α)` — `j(α)` with `−ln γ̃` replaced by its upper bound
//!   `(T−1)·ln(1+β(ρ)/s)` (a pointwise upper bound).
//!
//! [`density_from_vectors`] evaluates the same mismatched density straight
//! from a `(x, y)` vector pair and exists to cross-validate the scalar
//! representation. [`g_func`]/[`g_deriv`] are the power-sweep diagnostic
//! whose sign structure justifies confining the converse power search
//! near full power.

use crate::error::{Error, Result};
use crate::quad::exp_expectation_adaptive;
use crate::sampling::{inner_abs_sqr, vec_norm_sqr, BlockPair, Cplx};
use crate::specfun::{exp1_scaled_raw, ln_gamma_raw, ln_reg_lower_gamma_raw};

/// Channel and target-error parameters shared by every bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    t: u32,
    rho: f64,
    l: u32,
    epsilon: f64,
}

impl ChannelParams {
    /// `t` — coherence interval (> 2), `rho` — linear SNR (> 0),
    /// `l` — number of coherence blocks (≥ 1), `epsilon` — block error
    /// target in (0, 1/2).
    pub fn new(t: u32, rho: f64, l: u32, epsilon: f64) -> Result<Self> {
        if t <= 2 {
            return Err(Error::domain("ChannelParams", format!("T = {t} must be > 2")));
        }
        if !rho.is_finite() || rho <= 0.0 {
            return Err(Error::domain("ChannelParams", format!("rho = {rho} must be > 0 and finite")));
        }
        if l == 0 {
            return Err(Error::domain("ChannelParams", "L must be >= 1"));
        }
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(Error::domain("ChannelParams", format!("epsilon = {epsilon} must lie in (0, 1/2)")));
        }
        Ok(ChannelParams { t, rho, l, epsilon })
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn with_l(&self, l: u32) -> Result<Self> {
        ChannelParams::new(self.t, self.rho, l, self.epsilon)
    }

    /// Blocklength in channel uses, `n = L·T`.
    pub fn blocklength(&self) -> u32 {
        self.l * self.t
    }
}

/// `β(ρ) = Γ(T)^{1/(T−1)} · (1+Tρ)/(Tρ)`; strictly decreasing in ρ.
pub fn beta_snr(t: u32, rho: f64) -> Result<f64> {
    if t <= 2 {
        return Err(Error::domain("beta_snr", format!("T = {t} must be > 2")));
    }
    if !rho.is_finite() || rho <= 0.0 {
        return Err(Error::domain("beta_snr", format!("rho = {rho} must be > 0")));
    }
    Ok(beta_snr_raw(t, rho))
}

pub(crate) fn beta_snr_raw(t: u32, rho: f64) -> f64 {
    let tm1 = f64::from(t) - 1.0;
    let trho = f64::from(t) * rho;
    (ln_gamma_raw(f64::from(t)) / tm1).exp() * (1.0 + trho) / trho
}

/// Precomputed per-(T, ρ) constants for the density formulas.
#[derive(Debug, Clone, Copy)]
pub(crate) struct DensityEnv {
    pub tm1: f64,
    /// `(T−1)·ln(Tρ) − ln Γ(T)`
    base: f64,
    /// `Tρ/(1+Tρ)`
    pub snr_frac: f64,
    ln_one_plus_trho: f64,
    one_plus_trho: f64,
    pub beta: f64,
    rho: f64,
    t: u32,
}

/// Per-α constants layered on a [`DensityEnv`].
#[derive(Debug, Clone, Copy)]
pub(crate) struct AlphaEnv {
    pub one_plus_talpha: f64,
    /// `(Tρ−Tα)/(1+Tρ)`
    z1_coef: f64,
    /// `ln((1+Tρ)/(1+Tα))`
    ln_power_ratio: f64,
}

impl DensityEnv {
    pub fn new(t: u32, rho: f64) -> Self {
        debug_assert!(t > 2 && rho > 0.0);
        let tf = f64::from(t);
        let tm1 = tf - 1.0;
        let trho = tf * rho;
        DensityEnv {
            tm1,
            base: tm1 * trho.ln() - ln_gamma_raw(tf),
            snr_frac: trho / (1.0 + trho),
            ln_one_plus_trho: trho.ln_1p(),
            one_plus_trho: 1.0 + trho,
            beta: beta_snr_raw(t, rho),
            rho,
            t,
        }
    }

    pub fn alpha_env(&self, alpha: f64) -> AlphaEnv {
        debug_assert!((0.0..=self.rho).contains(&alpha));
        let tf = f64::from(self.t);
        let one_plus_talpha = 1.0 + tf * alpha;
        AlphaEnv {
            one_plus_talpha,
            z1_coef: (tf * self.rho - tf * alpha) / self.one_plus_trho,
            ln_power_ratio: self.ln_one_plus_trho - one_plus_talpha.ln(),
        }
    }

    /// Terms shared by `j` and `j̄`; everything except the incomplete-gamma
    /// correction.
    #[inline]
    fn common(&self, a: &AlphaEnv, b: BlockPair) -> (f64, f64) {
        let s = a.one_plus_talpha * b.z1 + b.z2;
        let val = self.base - a.z1_coef * b.z1 - self.snr_frac * b.z2
            + a.ln_power_ratio
            + self.tm1 * (s.ln() - self.ln_one_plus_trho);
        (val, s)
    }

    /// Mismatched density `j(α)` for one block.
    #[inline]
    pub fn mismatched(&self, a: &AlphaEnv, b: BlockPair) -> f64 {
        let (common, s) = self.common(a, b);
        common - ln_reg_lower_gamma_raw(self.tm1, self.snr_frac * s)
    }

    /// Upper-bounded density `j̄(α)` for one block.
    #[inline]
    pub fn mismatched_upper(&self, a: &AlphaEnv, b: BlockPair) -> f64 {
        let (common, s) = self.common(a, b);
        common + self.tm1 * (self.beta / s).ln_1p()
    }

    /// Information density `i(ρ)` (equals `j(ρ)`).
    #[inline]
    pub fn info(&self, full: &AlphaEnv, b: BlockPair) -> f64 {
        self.mismatched(full, b)
    }

    /// Lower-bounded density `ī(ρ)`: `i(ρ)` without the `−ln γ̃` term.
    #[inline]
    pub fn info_lower(&self, full: &AlphaEnv, b: BlockPair) -> f64 {
        let (common, _) = self.common(full, b);
        common
    }
}

/// Information density `i(ρ)` of one block, in nats.
pub fn info_density(p: &ChannelParams, b: BlockPair) -> f64 {
    let env = DensityEnv::new(p.t, p.rho);
    let full = env.alpha_env(p.rho);
    env.info(&full, b)
}

/// Lower-bounded density `ī(ρ) ≤ i(ρ)` of one block, in nats.
pub fn info_density_lower(p: &ChannelParams, b: BlockPair) -> f64 {
    let env = DensityEnv::new(p.t, p.rho);
    let full = env.alpha_env(p.rho);
    env.info_lower(&full, b)
}

/// Mismatched density `j(α)` of one block, in nats.
pub fn mismatched_density(p: &ChannelParams, alpha: f64, b: BlockPair) -> Result<f64> {
    check_alpha("mismatched_density", p.rho, alpha)?;
    let env = DensityEnv::new(p.t, p.rho);
    let ae = env.alpha_env(alpha);
    Ok(env.mismatched(&ae, b))
}

/// Upper-bounded density `j̄(α) ≥ j(α)` of one block, in nats.
pub fn mismatched_density_upper(p: &ChannelParams, alpha: f64, b: BlockPair) -> Result<f64> {
    check_alpha("mismatched_density_upper", p.rho, alpha)?;
    let env = DensityEnv::new(p.t, p.rho);
    let ae = env.alpha_env(alpha);
    Ok(env.mismatched_upper(&ae, b))
}

fn check_alpha(op: &'static str, rho: f64, alpha: f64) -> Result<()> {
    if !(0.0..=rho).contains(&alpha) || !alpha.is_finite() {
        return Err(Error::domain(op, format!("alpha = {alpha} must lie in [0, {rho}]")));
    }
    Ok(())
}

/// Mismatched density evaluated directly from a vector input/output pair,
/// used to cross-validate the Gamma-variate path.
pub fn density_from_vectors(p: &ChannelParams, x: &[Cplx], y: &[Cplx]) -> Result<f64> {
    if x.len() != p.t as usize || y.len() != p.t as usize {
        return Err(Error::domain(
            "density_from_vectors",
            format!("x and y must have length T = {}", p.t),
        ));
    }
    let x_pow = vec_norm_sqr(x);
    let trho = f64::from(p.t) * p.rho;
    if x_pow > trho * (1.0 + 1e-12) {
        return Err(Error::domain(
            "density_from_vectors",
            format!("power constraint violated: ‖x‖² = {x_pow} > Tρ = {trho}"),
        ));
    }
    let y_pow = vec_norm_sqr(y);
    if y_pow <= 0.0 {
        return Err(Error::domain("density_from_vectors", "y has zero norm"));
    }
    let tm1 = f64::from(p.t) - 1.0;
    let cross = inner_abs_sqr(y, x);
    let scaled_y = trho * y_pow / (1.0 + trho);
    Ok(trho.ln_1p() - ln_gamma_raw(f64::from(p.t)) + cross / (1.0 + x_pow)
        - trho * y_pow / (1.0 + trho)
        + tm1 * scaled_y.ln()
        - x_pow.ln_1p()
        - ln_reg_lower_gamma_raw(tm1, scaled_y))
}

/// The implied Gamma-variate pair of a vector draw with `‖x‖² = Tα`:
/// `z1 = |y^H x|²/(Tα(1+Tα))`, `z2 = ‖y‖² − (1+Tα)z1`.
pub fn implied_block_pair(x: &[Cplx], y: &[Cplx]) -> BlockPair {
    let x_pow = vec_norm_sqr(x);
    let z1 = inner_abs_sqr(y, x) / (x_pow * (1.0 + x_pow));
    let z2 = vec_norm_sqr(y) - (1.0 + x_pow) * z1;
    BlockPair { z1, z2 }
}

/// Power-sweep diagnostic
/// `g_ρ(α) = ln((1+Tα)/(1+Tρ)) + (T−1)·E[ln(((1+Tρ)Z + c)/((1+Tα)Z + c))]`
/// with `c = T−1+β(ρ₀)` and `Z ~ Exp(1)`; `g_ρ(ρ) = 0`.
///
/// The expectation goes through adaptive quadrature on the exponential
/// measure: the integrand turns on the scale `z ~ c/(1+Tα)`, which drops
/// below the resolution of a fixed Laguerre rule once `Tα` is large.
pub fn g_func(p: &ChannelParams, rho0: f64, alpha: f64) -> Result<f64> {
    check_alpha("g_func", p.rho, alpha)?;
    if !rho0.is_finite() || rho0 <= 0.0 {
        return Err(Error::domain("g_func", format!("rho0 = {rho0} must be > 0")));
    }
    let tf = f64::from(p.t);
    let c = tf - 1.0 + beta_snr_raw(p.t, rho0);
    let arho = 1.0 + tf * p.rho;
    let aalpha = 1.0 + tf * alpha;
    let expect =
        exp_expectation_adaptive(|z| ((arho * z + c) / (aalpha * z + c)).ln(), 1e-12 * (1.0 + (arho / aalpha).ln()));
    Ok((aalpha / arho).ln() + (tf - 1.0) * expect)
}

/// Closed-form derivative of `g_ρ(α)`:
/// `T/(1+Tα)·[−(T−2) + (T−1)·u·e^u·E1(u)]`, `u = (T−1+β(ρ₀))/(1+Tα)`.
/// Does not depend on ρ.
pub fn g_deriv(p: &ChannelParams, rho0: f64, alpha: f64) -> Result<f64> {
    check_alpha("g_deriv", p.rho, alpha)?;
    if !rho0.is_finite() || rho0 <= 0.0 {
        return Err(Error::domain("g_deriv", format!("rho0 = {rho0} must be > 0")));
    }
    let tf = f64::from(p.t);
    let u = (tf - 1.0 + beta_snr_raw(p.t, rho0)) / (1.0 + tf * alpha);
    Ok(tf / (1.0 + tf * alpha) * (-(tf - 2.0) + (tf - 1.0) * exp1_scaled_raw(u)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{block_pair, RngStream};

    fn params(t: u32, rho: f64) -> ChannelParams {
        ChannelParams::new(t, rho, 10, 1e-3).unwrap()
    }

    #[test]
    fn channel_params_validation() {
        assert!(ChannelParams::new(2, 1.0, 1, 0.1).is_err());
        assert!(ChannelParams::new(3, 0.0, 1, 0.1).is_err());
        assert!(ChannelParams::new(3, 1.0, 0, 0.1).is_err());
        assert!(ChannelParams::new(3, 1.0, 1, 0.5).is_err());
        assert!(ChannelParams::new(3, 1.0, 1, 0.499).is_ok());
    }

    #[test]
    fn beta_limit_and_monotonicity() {
        // T=3: Γ(3)^{1/2} = √2 as ρ → ∞
        let b = beta_snr(3, 1e12).unwrap();
        assert!((b - 2.0f64.sqrt()).abs() < 1e-9);
        assert!(beta_snr(3, 0.5).unwrap() > beta_snr(3, 1.0).unwrap());
        assert!(beta_snr(2, 1.0).is_err());
    }

    #[test]
    fn orderings_hold_pointwise() {
        let p = params(10, 100.0);
        let mut rng = RngStream::new(7, 0);
        for _ in 0..5000 {
            let b = block_pair(10, &mut rng);
            let i = info_density(&p, b);
            let ilow = info_density_lower(&p, b);
            let alpha = 37.5;
            let j = mismatched_density(&p, alpha, b).unwrap();
            let jbar = mismatched_density_upper(&p, alpha, b).unwrap();
            assert!(ilow <= i + 1e-12);
            assert!(j <= jbar + 1e-12);
            // j at α = ρ is i, exactly
            let j_full = mismatched_density(&p, p.rho(), b).unwrap();
            assert!((j_full - i).abs() <= 1e-12 * i.abs().max(1.0));
        }
    }

    #[test]
    fn density_bounds_converge_for_large_statistics() {
        // both correction terms vanish as (1+Tα)z1 + z2 grows
        let p = params(10, 100.0);
        let b = BlockPair { z1: 1e6, z2: 9.0 };
        let alpha = 50.0;
        let j = mismatched_density(&p, alpha, b).unwrap();
        let jbar = mismatched_density_upper(&p, alpha, b).unwrap();
        assert!((jbar - j).abs() <= 1e-4, "gap {}", jbar - j);
    }

    #[test]
    fn alpha_range_is_enforced() {
        let p = params(5, 2.0);
        let b = BlockPair { z1: 1.0, z2: 4.0 };
        assert!(mismatched_density(&p, 2.5, b).is_err());
        assert!(mismatched_density(&p, -0.1, b).is_err());
        assert!(mismatched_density_upper(&p, f64::NAN, b).is_err());
    }

    #[test]
    fn vector_path_matches_gamma_path() {
        let p = params(6, 8.0);
        let mut rng = RngStream::new(31, 2);
        for _ in 0..2000 {
            let alpha = 8.0 * rng.next_f64();
            let (x, y) = crate::sampling::sample_fading_block(6, 8.0, alpha, &mut rng).unwrap();
            let direct = density_from_vectors(&p, &x, &y).unwrap();
            let b = implied_block_pair(&x, &y);
            let via_pair = mismatched_density(&p, alpha, b).unwrap();
            assert!(
                (direct - via_pair).abs() <= 1e-10 * direct.abs().max(1.0),
                "direct {direct} vs pair {via_pair}"
            );
        }
    }

    #[test]
    fn vector_path_rejects_degenerate_inputs() {
        let p = params(4, 1.0);
        let zeros = vec![Cplx::new(0.0, 0.0); 4];
        let x = vec![Cplx::new(1.0, 0.0); 4];
        assert!(density_from_vectors(&p, &x, &zeros).is_err());
        let too_long = vec![Cplx::new(10.0, 0.0); 4];
        assert!(density_from_vectors(&p, &too_long, &x).is_err());
        assert!(density_from_vectors(&p, &x[..3], &x).is_err());
    }

    #[test]
    fn g_vanishes_at_full_power() {
        let p = params(10, 50.0);
        let g = g_func(&p, 50.0, 50.0).unwrap();
        assert!(g.abs() < 1e-12, "g={g}");
    }

    #[test]
    fn g_deriv_is_rho_free() {
        let p1 = params(10, 100.0);
        let p2 = params(10, 10_000.0);
        for &alpha in &[0.0, 1.0, 37.0, 99.0] {
            let d1 = g_deriv(&p1, 77.0, alpha).unwrap();
            let d2 = g_deriv(&p2, 77.0, alpha).unwrap();
            assert!((d1 - d2).abs() <= 1e-10 * d1.abs().max(1.0));
        }
    }

    #[test]
    fn g_expectation_agrees_with_gauss_laguerre_where_it_resolves() {
        // In the regime where 1+Tα is comparable to c, a 64-node Laguerre
        // rule is accurate; the adaptive path must agree with it there.
        let p = params(5, 2.0);
        let rule = crate::quad::GaussLaguerre::gamma_expectation(64, 1.0).unwrap();
        for &alpha in &[0.0, 0.5, 1.0, 2.0] {
            let tf = 5.0;
            let c = tf - 1.0 + crate::infodens::beta_snr_raw(5, 2.0);
            let arho = 1.0 + tf * 2.0;
            let aalpha = 1.0 + tf * alpha;
            let gl = (aalpha / arho).ln()
                + (tf - 1.0) * rule.integrate(|z| ((arho * z + c) / (aalpha * z + c)).ln());
            let adaptive = g_func(&p, 2.0, alpha).unwrap();
            assert!((gl - adaptive).abs() < 1e-9, "alpha={alpha}: {gl} vs {adaptive}");
        }
    }

    #[test]
    fn g_deriv_matches_finite_differences() {
        let p = ChannelParams::new(10, 1e4, 10, 1e-3).unwrap();
        for &alpha in &[1.0, 10.0, 100.0] {
            let h = alpha * 3e-6;
            let fd = (g_func(&p, 1e4, alpha + h).unwrap() - g_func(&p, 1e4, alpha - h).unwrap())
                / (2.0 * h);
            let cf = g_deriv(&p, 1e4, alpha).unwrap();
            assert!(
                ((fd - cf) / cf).abs() < 1e-6,
                "alpha={alpha}: fd {fd} vs closed {cf}"
            );
        }
    }
}
