//! Slotted-ALOHA slot-count optimization.
//!
//! A frame of `n` channel uses is divided into `s` equal slots; each of
//! `d` devices picks one slot uniformly at random and transmits `k` payload
//! bits there. A packet survives when its slot holds no collision *and*
//! the channel decode succeeds, so
//!
//! `P_success(s) = (d/s)·(1−1/s)^{d−1}·(1−ε*(k, n/s, ρ))`
//!
//! with `ε*` the packet-error approximation of the selected channel model
//! (zero for the classic collision-only protocol). Admissible slot counts
//! are divisors of `n`; fading models additionally require slots that are
//! whole multiples of the coherence interval.

use crate::bounds::{error_prob, ErrorModel};
use crate::error::{Error, Result};

/// Channel model behind the per-slot decode error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelModel {
    /// Collision-only: ε* = 0.
    Classic,
    Awgn,
    Coherent,
    Noncoherent,
}

impl ChannelModel {
    pub const ALL: [ChannelModel; 4] =
        [ChannelModel::Classic, ChannelModel::Awgn, ChannelModel::Coherent, ChannelModel::Noncoherent];

    pub fn as_str(&self) -> &'static str {
        match self {
            ChannelModel::Classic => "classic",
            ChannelModel::Awgn => "awgn",
            ChannelModel::Coherent => "coherent",
            ChannelModel::Noncoherent => "noncoherent",
        }
    }

    fn is_fading(&self) -> bool {
        matches!(self, ChannelModel::Coherent | ChannelModel::Noncoherent)
    }
}

/// One uplink configuration to optimize.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlohaScenario {
    pub n: u32,
    pub k_bits: u32,
    pub d: u32,
    pub model: ChannelModel,
    /// Coherence interval; only meaningful for the fading models.
    pub t: u32,
    /// Linear SNR; ignored by the classic model.
    pub rho: f64,
}

impl AlohaScenario {
    pub fn new(n: u32, k_bits: u32, d: u32, model: ChannelModel, t: u32, rho: f64) -> Result<Self> {
        if d < 1 || n < d {
            return Err(Error::domain("AlohaScenario", format!("need n >= d >= 1, got n = {n}, d = {d}")));
        }
        if k_bits < 1 {
            return Err(Error::domain("AlohaScenario", "k_bits must be >= 1"));
        }
        if model.is_fading() && t <= 2 {
            return Err(Error::domain("AlohaScenario", format!("fading models require T > 2, got {t}")));
        }
        if model != ChannelModel::Classic && (!rho.is_finite() || rho <= 0.0) {
            return Err(Error::domain("AlohaScenario", format!("rho = {rho} must be > 0")));
        }
        Ok(AlohaScenario { n, k_bits, d, model, t, rho })
    }

    /// Slot counts `s` dividing `n` (with `n/s` a multiple of `T` for the
    /// fading models), ascending.
    pub fn admissible_slots(&self) -> Vec<u32> {
        (1..=self.n)
            .filter(|s| self.n.is_multiple_of(*s))
            .filter(|s| !self.model.is_fading() || (self.n / s).is_multiple_of(self.t))
            .collect()
    }

    fn decode_error(&self, slot_len: u32) -> Result<f64> {
        let k = f64::from(self.k_bits);
        match self.model {
            ChannelModel::Classic => Ok(0.0),
            ChannelModel::Awgn => error_prob(ErrorModel::Awgn, k, slot_len, self.rho, None),
            ChannelModel::Coherent => {
                error_prob(ErrorModel::Coherent, k, slot_len, self.rho, Some(self.t))
            }
            ChannelModel::Noncoherent => {
                error_prob(ErrorModel::Noncoherent, k, slot_len, self.rho, Some(self.t))
            }
        }
    }
}

/// Probability that a given device's packet goes through with `slots`
/// slots in the frame.
pub fn p_success(s: &AlohaScenario, slots: u32) -> Result<f64> {
    if slots < 1 || !s.n.is_multiple_of(slots) {
        return Err(Error::domain("p_success", format!("slots = {slots} must divide n = {}", s.n)));
    }
    let slot_len = s.n / slots;
    if s.model.is_fading() && !slot_len.is_multiple_of(s.t) {
        return Err(Error::domain(
            "p_success",
            format!("slot length {slot_len} is not a multiple of T = {}", s.t),
        ));
    }
    let sf = f64::from(slots);
    let df = f64::from(s.d);
    let singleton = df / sf * (1.0 - 1.0 / sf).powi(s.d as i32 - 1);
    Ok(singleton * (1.0 - s.decode_error(slot_len)?))
}

/// The admissible slot count maximizing [`p_success`]; ties break toward
/// more (shorter) slots.
pub fn optimize_slots(s: &AlohaScenario) -> Result<(u32, f64)> {
    let mut best: Option<(u32, f64)> = None;
    for slots in s.admissible_slots() {
        let p = p_success(s, slots)?;
        best = match best {
            Some((_, bp)) if p < bp => best,
            _ => Some((slots, p)),
        };
    }
    best.ok_or_else(|| Error::numeric("optimize_slots", "no admissible slot count"))
}
