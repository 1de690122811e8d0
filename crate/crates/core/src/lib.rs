//! Finite-blocklength coding-rate bounds for noncoherent single-antenna
//! Rayleigh block-fading channels.
//!
//! The crate evaluates the maximum coding rate `R*(L, eps, rho)` of a channel
//! whose fading coefficient stays constant over a coherence interval of `T`
//! channel uses and takes independent Rayleigh realizations across the `L`
//! intervals spanned by a codeword. Neither transmitter nor receiver knows
//! the fading realization.
//!
//! Five rate characterizations are provided:
//!
//! * a dependence-testing achievability bound, evaluated by Monte Carlo
//!   ([`bounds::dt_lower`]),
//! * a weakened meta-converse upper bound, evaluated by Monte Carlo
//!   ([`bounds::mc_upper`]),
//! * a high-SNR normal approximation built from the closed-form first and
//!   second moments of the information density ([`bounds::na_high_snr`]),
//! * comparison approximations: coherent fading, AWGN and quasistatic
//!   ([`bounds::na_coherent`], [`bounds::na_awgn`], [`bounds::na_quasistatic`]),
//! * packet-error inversions of the above plus a slotted-ALOHA slot-count
//!   optimizer ([`bounds::error_prob`], [`aloha`]).
//!
//! All densities are computed in a two-dimensional Gamma-variate sufficient
//! statistic per coherence block instead of simulating `T`-dimensional
//! vectors; the vector path exists for cross-validation only. Random number
//! generation is counter-based so Monte Carlo runs are replayable bit-for-bit
//! and independent of the worker count.

pub mod aloha;
pub mod bounds;
mod error;
pub mod infodens;
pub mod moments;
pub mod quad;
pub mod sampling;
pub mod specfun;

pub use aloha::{AlohaScenario, ChannelModel};
pub use bounds::{BoundKind, BoundResult, McConfig, QuasistaticVariance};
pub use error::{Error, Result};
pub use infodens::ChannelParams;
pub use moments::MomentSet;
pub use sampling::{BlockPair, Cplx, McEstimate, RngStream};
