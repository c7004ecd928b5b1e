//! IRS phase configurations and the end-to-end channel they produce.
//!
//! Every element applies a unit-modulus coefficient `e^{j theta_n}` with a
//! continuous phase. The end-to-end channel of a UE is
//!
//! ```text
//! h = h_d + sum_n g_n e^{j theta_n} f_n
//! ```
//!
//! The in-band operator picks `theta_n = arg(h_d) - arg(f_n) - arg(g_n)`, which
//! lines every cascaded term up with the direct path so the magnitudes add.
//! Any UE of the other operator has channels independent of those phases, so
//! for it the same configuration is statistically a uniformly random one.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;

use crate::channel::FadingDraw;
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Reflection phases in radians, normalized to `[0, 2 pi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseConfig {
    theta: Vec<f64>,
}

fn normalize(angle: f64) -> f64 {
    let a = angle.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if a >= TAU {
        0.0
    } else {
        a
    }
}

impl PhaseConfig {
    pub fn new(theta: impl IntoIterator<Item = f64>) -> Self {
        Self {
            theta: theta.into_iter().map(normalize).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn phases(&self) -> &[f64] {
        &self.theta
    }

    /// Unit-modulus reflection coefficients `e^{j theta_n}`.
    pub fn coefficients(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.theta.iter().map(|&t| Complex64::from_polar(1.0, t))
    }
}

/// End-to-end complex gain of one UE.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EffectiveChannel(pub Complex64);

impl EffectiveChannel {
    pub fn gain(&self) -> f64 {
        self.0.norm_sqr()
    }
}

/// Phases that align all cascaded paths with the direct path.
///
/// `arg(0)` is taken as 0, so a zero direct path aligns everything to angle 0.
pub fn optimal_phases(draw: &FadingDraw) -> PhaseConfig {
    let direct = if draw.h_d == Complex64::new(0.0, 0.0) {
        0.0
    } else {
        draw.h_d.arg()
    };
    PhaseConfig::new(
        draw.f
            .iter()
            .zip(&draw.g)
            .map(|(f, g)| direct - (f.arg() + g.arg())),
    )
}

pub fn random_phases(n_elements: usize, rng: &mut RngStream) -> PhaseConfig {
    PhaseConfig {
        theta: (0..n_elements)
            .map(|_| rng.random_range(0.0..TAU))
            .collect(),
    }
}

/// `h_d + sum_n g_n e^{j theta_n} f_n`.
pub fn effective_channel(draw: &FadingDraw, config: &PhaseConfig) -> Result<EffectiveChannel> {
    if config.len() != draw.n_elements() || draw.g.len() != draw.f.len() {
        return Err(Error::contract(format!(
            "phase config has {} entries but the draw has {} elements",
            config.len(),
            draw.n_elements()
        )));
    }
    let reflected: Complex64 = draw
        .f
        .iter()
        .zip(&draw.g)
        .zip(config.coefficients())
        .map(|((f, g), c)| g * c * f)
        .sum();
    Ok(EffectiveChannel(draw.h_d + reflected))
}

/// Magnitude of the coherently combined channel, `|h_d| + sum_n |f_n g_n|`.
pub fn beamformed_gain(draw: &FadingDraw) -> f64 {
    draw.h_d.norm()
        + draw
            .f
            .iter()
            .zip(&draw.g)
            .map(|(f, g)| (f * g).norm())
            .sum::<f64>()
}

/// Receive SNR `|h|^2 gamma` and rate `log2(1 + snr)` for a linear transmit SNR.
pub fn snr_and_rate(h: &EffectiveChannel, gamma: f64) -> (f64, f64) {
    let snr = h.gain() * gamma;
    (snr, snr.ln_1p() / std::f64::consts::LN_2)
}
