//! I.i.d. Rayleigh fading for the direct, BS-to-IRS and IRS-to-UE links.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::geometry::LinkBudget;
use crate::rng::RngStream;

/// Draws one `CN(0, variance)` sample as two real normals of variance `variance / 2`.
#[inline]
pub fn complex_gaussian<R: Rng + ?Sized>(variance: f64, rng: &mut R) -> Complex64 {
    let scale = (0.5 * variance).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(scale * re, scale * im)
}

/// One small-scale fading realization for a single UE.
#[derive(Clone, Debug, PartialEq)]
pub struct FadingDraw {
    /// Direct BS to UE coefficient.
    pub h_d: Complex64,
    /// BS to IRS, one entry per element.
    pub f: Vec<Complex64>,
    /// IRS to UE, one entry per element.
    pub g: Vec<Complex64>,
}

impl FadingDraw {
    pub fn n_elements(&self) -> usize {
        self.f.len()
    }

    /// Empty draw with room for `n_elements`, for use with [`FadingDraw::resample`].
    pub fn with_capacity(n_elements: usize) -> Self {
        Self {
            h_d: Complex64::new(0.0, 0.0),
            f: Vec::with_capacity(n_elements),
            g: Vec::with_capacity(n_elements),
        }
    }

    /// Redraws every coefficient in place, reusing the element buffers.
    ///
    /// Draw order is `h_d`, then all of `f`, then all of `g`; a given stream
    /// therefore yields the same draw as [`sample_fading`].
    pub fn resample(&mut self, budget: &LinkBudget, n_elements: usize, rng: &mut RngStream) {
        self.h_d = complex_gaussian(budget.beta_d, rng);
        self.f.clear();
        self.f
            .extend((0..n_elements).map(|_| complex_gaussian(budget.beta_f, rng)));
        self.g.clear();
        self.g
            .extend((0..n_elements).map(|_| complex_gaussian(budget.beta_g, rng)));
    }

    /// Multiplies every coefficient by `c`.
    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            h_d: self.h_d * c,
            f: self.f.iter().map(|v| v * c).collect(),
            g: self.g.iter().map(|v| v * c).collect(),
        }
    }
}

pub fn sample_fading(budget: &LinkBudget, n_elements: usize, rng: &mut RngStream) -> FadingDraw {
    let mut draw = FadingDraw::with_capacity(n_elements);
    draw.resample(budget, n_elements, rng);
    draw
}
