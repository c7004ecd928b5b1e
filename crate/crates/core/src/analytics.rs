//! Closed-form expressions for the two-operator system.
//!
//! The spectral-efficiency forms are Jensen upper bounds: they move the
//! expectation inside the concave `log2(1 + .)`, so they sit above the true
//! ergodic SE. They are labelled as bounds wherever they are reported.
//!
//! The offset law ([`ccdf_z`]) is the large-`N` approximation that treats the
//! gains with and without the IRS as independent exponentials with means
//! `mu1 = N beta_r + beta_d` and `mu2 = beta_d`. [`simon_cdf`] is the general
//! form for correlated gains; as its correlation parameter goes to zero it
//! collapses to [`ccdf_limit`].

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::geometry::LinkBudget;

const PI2_16: f64 = PI * PI / 16.0;

fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / LN_2
}

/// Inputs to the spectral-efficiency bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OperatorParams {
    pub n_elements: usize,
    /// Cascaded per-element gain `beta_f * beta_g`.
    pub beta_r: f64,
    pub beta_d: f64,
    /// Linear transmit SNR `P / sigma^2`.
    pub gamma: f64,
}

impl OperatorParams {
    pub fn new(n_elements: usize, beta_r: f64, beta_d: f64, gamma: f64) -> Result<Self> {
        for (name, v) in [("beta_r", beta_r), ("beta_d", beta_d), ("gamma", gamma)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self {
            n_elements,
            beta_r,
            beta_d,
            gamma,
        })
    }

    pub fn from_budget(budget: &LinkBudget, n_elements: usize, gamma: f64) -> Result<Self> {
        Self::new(n_elements, budget.beta_r, budget.beta_d, gamma)
    }
}

/// `E[(|h_d| + sum_n |f_n g_n|)^2]` under independent Rayleigh fading.
///
/// Uses `E|x| = sqrt(pi beta / 4)` for a `CN(0, beta)` entry, so each
/// cross term `E|f_n g_n| E|f_m g_m|` contributes `(pi^2 / 16) beta_r`.
pub fn mean_gain_x(n_elements: usize, beta_r: f64, beta_d: f64) -> f64 {
    let n = n_elements as f64;
    n * n * PI2_16 * beta_r
        + n * (beta_r - PI2_16 * beta_r + PI.powf(1.5) / 4.0 * (beta_d * beta_r).sqrt())
        + beta_d
}

/// `E|h_d + sum_n f_n g_n e^{j theta_n}|^2` for any phases independent of the channel.
pub fn mean_gain_y(n_elements: usize, beta_r: f64, beta_d: f64) -> f64 {
    n_elements as f64 * beta_r + beta_d
}

/// Jensen bound on the ergodic SE of a UE served by the IRS-controlling operator.
pub fn jensen_se_x(p: &OperatorParams) -> f64 {
    log2_1p(mean_gain_x(p.n_elements, p.beta_r, p.beta_d) * p.gamma)
}

/// Jensen bound on the ergodic SE of an out-of-band UE.
pub fn jensen_se_y(p: &OperatorParams) -> f64 {
    log2_1p(mean_gain_y(p.n_elements, p.beta_r, p.beta_d) * p.gamma)
}

/// Parameters of the SNR-offset law for one out-of-band UE.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CcdfParams {
    pub n_elements: usize,
    /// `beta_r / beta_d`.
    pub beta_tilde: f64,
    pub beta_d: f64,
}

impl CcdfParams {
    pub fn new(n_elements: usize, beta_tilde: f64, beta_d: f64) -> Result<Self> {
        for (name, v) in [("beta_tilde", beta_tilde), ("beta_d", beta_d)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self {
            n_elements,
            beta_tilde,
            beta_d,
        })
    }

    pub fn from_budget(budget: &LinkBudget, n_elements: usize) -> Self {
        Self {
            n_elements,
            beta_tilde: budget.beta_tilde(),
            beta_d: budget.beta_d,
        }
    }

    /// Mean gain with the IRS present, `beta_d (1 + N beta_tilde)`.
    pub fn mu1(&self) -> f64 {
        self.beta_d * (1.0 + self.n_elements as f64 * self.beta_tilde)
    }

    /// Mean gain with the IRS absent.
    pub fn mu2(&self) -> f64 {
        self.beta_d
    }
}

/// `Pr(Z_N >= z)` for the offset between the out-of-band gain with and without the IRS.
///
/// For `N = 0` the offset is just `|h_d|^2`, an exponential with mean `beta_d`.
pub fn ccdf_z(p: &CcdfParams, z: f64) -> f64 {
    if p.n_elements == 0 {
        return if z < 0.0 { 1.0 } else { (-z / p.beta_d).exp() };
    }
    let nb = p.n_elements as f64 * p.beta_tilde;
    if z < 0.0 {
        1.0 - (z / p.beta_d).exp() / (nb + 2.0)
    } else {
        (nb + 1.0) / (nb + 2.0) * (-z / (p.beta_d * (1.0 + nb))).exp()
    }
}

/// Probability that the IRS lowers the instantaneous out-of-band gain, `1 / (N beta_tilde + 2)`.
///
/// Zero when `N = 0`, where the offset is a non-negative power.
pub fn prob_offset_negative(p: &CcdfParams) -> f64 {
    if p.n_elements == 0 {
        0.0
    } else {
        1.0 / (p.n_elements as f64 * p.beta_tilde + 2.0)
    }
}

/// Correlation coefficient between `|h_1|^2` and `|h_2|^2 = |h_d|^2`.
pub fn rho12(n_elements: usize, beta_r: f64, beta_d: f64) -> f64 {
    1.0 / (1.0 + n_elements as f64 * (beta_r / beta_d))
}

/// Survival function of `E1 - E2` for independent exponentials with means `mu1`, `mu2`.
pub fn ccdf_limit(mu1: f64, mu2: f64, z: f64) -> f64 {
    if z < 0.0 {
        1.0 - mu2 / (mu1 + mu2) * (z / mu2).exp()
    } else {
        mu1 / (mu1 + mu2) * (-z / mu1).exp()
    }
}

/// Parameters of the CDF of a difference of two correlated exponential gains.
///
/// `simon_gamma` is the normalizing constant usually written gamma in this
/// CDF; it is unrelated to the transmit SNR.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimonParams {
    pub mu1: f64,
    pub mu2: f64,
    pub rho12: f64,
    pub simon_gamma: f64,
    pub alpha_plus: f64,
    pub alpha_minus: f64,
}

impl SimonParams {
    pub fn new(mu1: f64, mu2: f64, rho12: f64) -> Result<Self> {
        if !(mu2 > 0.0 && mu1 >= mu2 && mu1.is_finite()) {
            return Err(Error::domain(format!(
                "need mu1 >= mu2 > 0, got mu1 = {mu1}, mu2 = {mu2}"
            )));
        }
        if !(0.0..1.0).contains(&rho12) {
            return Err(Error::domain(format!(
                "rho12 must lie in [0, 1), got {rho12}"
            )));
        }
        let denom = mu1 * mu2 * (1.0 - rho12 * rho12);
        let simon_gamma =
            2.0 * ((mu2 - mu1).powi(2) + 4.0 * mu1 * mu2 * (1.0 - rho12 * rho12)).sqrt() / denom;
        let skew = 2.0 * (mu2 - mu1) / denom;
        let alpha_plus = simon_gamma + skew;
        let alpha_minus = simon_gamma - skew;
        if !(alpha_plus > 0.0 && alpha_minus > 0.0) {
            return Err(Error::domain(format!(
                "non-positive decay rates ({alpha_plus}, {alpha_minus})"
            )));
        }
        Ok(Self {
            mu1,
            mu2,
            rho12,
            simon_gamma,
            alpha_plus,
            alpha_minus,
        })
    }

    fn denom(&self) -> f64 {
        self.mu1 * self.mu2 * (1.0 - self.rho12 * self.rho12)
    }
}

/// CDF of the correlated-exponential difference at `z`.
pub fn simon_cdf(sp: &SimonParams, z: f64) -> f64 {
    let d = sp.denom();
    if z < 0.0 {
        8.0 / (d * sp.simon_gamma * sp.alpha_minus) * (sp.alpha_minus * z / 4.0).exp()
    } else {
        1.0 - 8.0 / (d * sp.simon_gamma * sp.alpha_plus) * (-sp.alpha_plus * z / 4.0).exp()
    }
}
