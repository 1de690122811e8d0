//! Rate characterizations: achievability (DT), converse (weakened MC),
//! the high-SNR normal approximation, and the coherent / AWGN /
//! quasistatic comparison approximations, plus packet-error inversions.

mod dt;
mod mc;
mod quasistatic;

pub use dt::{dt_error_at_rate, dt_lower};
pub use mc::{mc_error_at_rate, mc_upper};
pub use quasistatic::na_quasistatic;

use crate::error::{Error, Result};
use crate::infodens::ChannelParams;
use crate::moments::{i_lower_mean_closed, i_lower_mean_simplified, u_tilde};
use crate::quad::exp_expectation_adaptive;
use crate::specfun::{exp1_scaled_raw, q_func_inv_raw, q_func_raw};

/// Which rate characterization produced a [`BoundResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    Dt,
    Mc,
    NaHighSnrClosed,
    NaHighSnrSimplified,
    NaCoherent,
    NaQuasistatic,
    NaAwgn,
    CapacityLower,
}

impl BoundKind {
    pub const ALL: [BoundKind; 8] = [
        BoundKind::Dt,
        BoundKind::Mc,
        BoundKind::NaHighSnrClosed,
        BoundKind::NaHighSnrSimplified,
        BoundKind::NaCoherent,
        BoundKind::NaQuasistatic,
        BoundKind::NaAwgn,
        BoundKind::CapacityLower,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            BoundKind::Dt => "dt",
            BoundKind::Mc => "mc",
            BoundKind::NaHighSnrClosed => "na_highsnr_closed",
            BoundKind::NaHighSnrSimplified => "na_highsnr_simplified",
            BoundKind::NaCoherent => "na_coherent",
            BoundKind::NaQuasistatic => "na_quasistatic",
            BoundKind::NaAwgn => "na_awgn",
            BoundKind::CapacityLower => "capacity_lower",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::domain("BoundKind::parse", format!("unknown bound kind '{s}'")))
    }
}

/// Monte Carlo metadata attached to sampled bounds.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct McMeta {
    pub n_samples: u64,
    pub seed: u64,
    pub warnings: Vec<String>,
}

/// One evaluated rate point, in nats per channel use.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    pub kind: BoundKind,
    pub rate: f64,
    pub ci_half_width: f64,
    pub t: u32,
    pub rho: f64,
    pub l: u32,
    pub epsilon: f64,
    pub mc_meta: Option<McMeta>,
}

impl BoundResult {
    fn closed_form(kind: BoundKind, rate: f64, p: &ChannelParams) -> Self {
        BoundResult {
            kind,
            rate,
            ci_half_width: 0.0,
            t: p.t(),
            rho: p.rho(),
            l: p.l(),
            epsilon: p.epsilon(),
            mc_meta: None,
        }
    }
}

/// Which form of the quasistatic conditional variance to use; the formula
/// as printed can go negative on weak fading draws, the cited source's
/// form cannot. Neither is silently corrected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuasistaticVariance {
    /// `V(H) = L − Σ 1/ln²(1+ρ|H_j|²)`
    #[default]
    AsWritten,
    /// `V(H) = L − Σ 1/(1+ρ|H_j|²)²`
    Alternative,
}

/// Configuration of a Monte Carlo bound evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    pub n_samples: u64,
    pub seed: u64,
    pub workers: u32,
    pub confidence: f64,
    /// Points in the `ln ξ` search grid of the converse.
    pub xi_grid_size: u32,
    /// Homogeneous power-allocation candidates on `[ρ/2, ρ]`.
    pub alpha_grid_size: u32,
    /// Random heterogeneous allocations probed as a stress check.
    pub heterogeneous_probes: u32,
    pub quasistatic_variance: QuasistaticVariance,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            n_samples: 100_000,
            seed: 0,
            workers: 1,
            confidence: 0.95,
            xi_grid_size: 129,
            alpha_grid_size: 65,
            heterogeneous_probes: 16,
            quasistatic_variance: QuasistaticVariance::default(),
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 1000 {
            return Err(Error::domain("McConfig", format!("n_samples = {} must be >= 1000", self.n_samples)));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::domain("McConfig", format!("confidence = {} must lie in (0, 1)", self.confidence)));
        }
        if self.workers == 0 {
            return Err(Error::domain("McConfig", "workers must be >= 1"));
        }
        if self.xi_grid_size < 3 || self.alpha_grid_size < 1 {
            return Err(Error::domain("McConfig", "grids must be non-trivial"));
        }
        Ok(())
    }
}

/// Which first-moment expression feeds the high-SNR normal approximation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NaVariant {
    Closed,
    Simplified,
}

/// High-SNR normal approximation
/// `R ≈ Ī(ρ)/T − sqrt(Ũ/(L·T²))·Q⁻¹(ε)`.
pub fn na_high_snr(p: &ChannelParams, variant: NaVariant) -> Result<BoundResult> {
    let i_lower = match variant {
        NaVariant::Closed => i_lower_mean_closed(p.t(), p.rho())?,
        NaVariant::Simplified => i_lower_mean_simplified(p.t(), p.rho())?,
    };
    let u = u_tilde(p.t())?;
    let tf = f64::from(p.t());
    let lf = f64::from(p.l());
    let rate = i_lower / tf - (u / (lf * tf * tf)).sqrt() * q_func_inv_raw(p.epsilon());
    let kind = match variant {
        NaVariant::Closed => BoundKind::NaHighSnrClosed,
        NaVariant::Simplified => BoundKind::NaHighSnrSimplified,
    };
    Ok(BoundResult::closed_form(kind, rate, p))
}

/// `Ī(ρ)/T`, the information-rate floor the normal approximation backs
/// off from.
pub fn capacity_lower(p: &ChannelParams) -> Result<BoundResult> {
    let rate = i_lower_mean_closed(p.t(), p.rho())? / f64::from(p.t());
    Ok(BoundResult::closed_form(BoundKind::CapacityLower, rate, p))
}

/// Coherent ergodic capacity `C_c(ρ) = E[ln(1+ρZ)] = e^{1/ρ}·E1(1/ρ)`,
/// nats per channel use.
pub fn coherent_capacity(rho: f64) -> Result<f64> {
    if !rho.is_finite() || rho <= 0.0 {
        return Err(Error::domain("coherent_capacity", format!("rho = {rho} must be > 0")));
    }
    // e^{1/ρ}E1(1/ρ) = ρ · (1/ρ)e^{1/ρ}E1(1/ρ)
    Ok(rho * exp1_scaled_raw(1.0 / rho))
}

/// Per-block-normalized coherent dispersion
/// `V_c(ρ) = Var[ln(1+ρZ)] + (1 − E[1/(1+ρZ)])/T`, divided by `L` in the
/// coherent normal approximation. Tends to `π²/6 + 1/T`.
pub fn coherent_dispersion(t: u32, rho: f64) -> Result<f64> {
    if t == 0 {
        return Err(Error::domain("coherent_dispersion", "T must be >= 1"));
    }
    let c = coherent_capacity(rho)?;
    // E[1/(1+ρZ)] = (1/ρ)e^{1/ρ}E1(1/ρ)
    let inv_mean = exp1_scaled_raw(1.0 / rho);
    let tol = 1e-11 * (1.0 + c * c);
    let second = exp_expectation_adaptive(|z| { let v = (rho * z).ln_1p(); v * v }, tol);
    Ok((second - c * c) + (1.0 - inv_mean) / f64::from(t))
}

/// Coherent normal approximation `C_c(ρ) − sqrt(V_c(ρ)/L)·Q⁻¹(ε)`.
pub fn na_coherent(p: &ChannelParams) -> Result<BoundResult> {
    let rate = coherent_capacity(p.rho())?
        - (coherent_dispersion(p.t(), p.rho())? / f64::from(p.l())).sqrt()
            * q_func_inv_raw(p.epsilon());
    Ok(BoundResult::closed_form(BoundKind::NaCoherent, rate, p))
}

/// AWGN normal approximation
/// `ln(1+ρ) − sqrt(V/n)·Q⁻¹(ε) + ln(n)/(2n)` with `V = ρ(2+ρ)/(1+ρ)²`.
pub fn na_awgn(n: u32, rho: f64, epsilon: f64) -> Result<BoundResult> {
    if n == 0 {
        return Err(Error::domain("na_awgn", "n must be >= 1"));
    }
    if !rho.is_finite() || rho <= 0.0 {
        return Err(Error::domain("na_awgn", format!("rho = {rho} must be > 0")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::domain("na_awgn", format!("epsilon = {epsilon} must lie in (0, 1)")));
    }
    let nf = f64::from(n);
    let v = awgn_dispersion(rho);
    let rate = rho.ln_1p() - (v / nf).sqrt() * q_func_inv_raw(epsilon) + 0.5 * nf.ln() / nf;
    Ok(BoundResult {
        kind: BoundKind::NaAwgn,
        rate,
        ci_half_width: 0.0,
        t: 1,
        rho,
        l: n,
        epsilon,
        mc_meta: None,
    })
}

pub fn awgn_dispersion(rho: f64) -> f64 {
    rho * (2.0 + rho) / ((1.0 + rho) * (1.0 + rho))
}

/// Channel model selector for packet-error approximations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorModel {
    Awgn,
    Noncoherent,
    Coherent,
}

/// Normal-approximation packet error probability for `k` payload bits in
/// `n` channel uses. Fading models require `t` with `n` divisible by it.
///
/// The noncoherent inversion uses the high-SNR simplification of `Ī(ρ)`,
/// which is the form that reproduces the published slot-count optima; see
/// [`error_prob_noncoherent_closed`] for the closed-form variant.
pub fn error_prob(model: ErrorModel, k_bits: f64, n: u32, rho: f64, t: Option<u32>) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("error_prob", "n must be >= 1"));
    }
    if !k_bits.is_finite() || k_bits < 0.0 {
        return Err(Error::domain("error_prob", format!("k_bits = {k_bits} must be >= 0")));
    }
    if !rho.is_finite() || rho <= 0.0 {
        return Err(Error::domain("error_prob", format!("rho = {rho} must be > 0")));
    }
    let nf = f64::from(n);
    let ln2 = std::f64::consts::LN_2;
    match model {
        ErrorModel::Awgn => {
            let arg = (nf * rho.ln_1p() - k_bits * ln2 + 0.5 * nf.ln())
                / (nf * awgn_dispersion(rho)).sqrt();
            Ok(q_func_raw(arg))
        }
        ErrorModel::Noncoherent => {
            let t = fading_t("error_prob", n, t)?;
            let tf = f64::from(t);
            let i_lower = i_lower_mean_simplified(t, rho)?;
            let arg = (nf * i_lower - k_bits * tf * ln2) / (nf * tf * u_tilde(t)?).sqrt();
            Ok(q_func_raw(arg))
        }
        ErrorModel::Coherent => {
            let t = fading_t("error_prob", n, t)?;
            let tf = f64::from(t);
            let arg = (nf * coherent_capacity(rho)? - k_bits * ln2)
                / (nf * tf * coherent_dispersion(t, rho)?).sqrt();
            Ok(q_func_raw(arg))
        }
    }
}

/// Noncoherent packet-error inversion with `Ī(ρ)` in closed form instead
/// of the high-SNR simplification.
pub fn error_prob_noncoherent_closed(k_bits: f64, n: u32, rho: f64, t: u32) -> Result<f64> {
    let t = fading_t("error_prob_noncoherent_closed", n, Some(t))?;
    let nf = f64::from(n);
    let tf = f64::from(t);
    let arg = (nf * i_lower_mean_closed(t, rho)? - k_bits * tf * std::f64::consts::LN_2)
        / (nf * tf * u_tilde(t)?).sqrt();
    Ok(q_func_raw(arg))
}

fn fading_t(op: &'static str, n: u32, t: Option<u32>) -> Result<u32> {
    let t = t.ok_or_else(|| Error::domain(op, "fading models require the coherence interval t"))?;
    if t <= 2 {
        return Err(Error::domain(op, format!("T = {t} must be > 2")));
    }
    if !n.is_multiple_of(t) {
        return Err(Error::domain(op, format!("n = {n} is not divisible by T = {t}")));
    }
    Ok(t)
}
