//! Simulation and closed-form analysis of a downlink shared by two operators
//! and one intelligent reflecting surface (IRS).
//!
//! Operator X owns the IRS and configures it for whichever of its UEs is
//! scheduled. Operator Y works in a different band, has no control over the
//! surface, and only sees the configuration X picked. The crate answers how
//! much each operator gains from the surface, both by simulation and through
//! closed forms, and cross-checks the two.
//!
//! Modules, bottom up:
//!
//! - [`geometry`]: node positions, log-distance path loss, link budgets.
//! - [`channel`]: i.i.d. Rayleigh fading draws.
//! - [`irs`]: phase configurations and the resulting end-to-end channel.
//! - [`analytics`]: spectral-efficiency bounds and the SNR-offset laws.
//! - [`montecarlo`]: the round-robin engine and offset sampling.
//! - [`stats`] and [`quadrature`]: estimators and numeric oracles.
//! - [`experiment`]: experiment files, runners and CSV output.
//!
//! ```
//! use irs_oob::analytics::{jensen_se_x, jensen_se_y, OperatorParams};
//!
//! let p = OperatorParams::new(64, 1e-3, 1.0, 100.0)?;
//! assert!(jensen_se_x(&p) > jensen_se_y(&p));
//! # Ok::<(), irs_oob::Error>(())
//! ```

pub mod analytics;
pub mod channel;
mod error;
pub mod experiment;
pub mod geometry;
pub mod irs;
pub mod montecarlo;
pub mod quadrature;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};

/// Master seed used when an experiment does not name one.
pub const DEFAULT_SEED: u64 = 20_230_601;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/channel-model.md")]
    mod channel_model {}
    #[doc = include_str!("../../../book/src/beamforming.md")]
    mod beamforming {}
    #[doc = include_str!("../../../book/src/spectral-efficiency.md")]
    mod spectral_efficiency {}
    #[doc = include_str!("../../../book/src/snr-offset.md")]
    mod snr_offset {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
