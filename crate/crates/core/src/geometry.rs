//! Node placement and distance-based path loss.

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Converts a power ratio in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Transmit SNR `P / sigma^2`, kept in both dB (for labels) and linear (for math).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransmitSnr {
    pub db: f64,
    pub linear: f64,
}

impl TransmitSnr {
    pub fn from_db(db: f64) -> Self {
        Self {
            db,
            linear: db_to_linear(db),
        }
    }
}

/// A point in the plane, in metres.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Axis-aligned rectangle given by two opposite corners.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Region {
    pub min: Position,
    pub max: Position,
}

impl Region {
    pub fn new(a: Position, b: Position) -> Result<Self> {
        let region = Self {
            min: Position::new(a.x.min(b.x), a.y.min(b.y)),
            max: Position::new(a.x.max(b.x), a.y.max(b.y)),
        };
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::domain("region corners must be finite"));
        }
        if region.max.x <= region.min.x || region.max.y <= region.min.y {
            return Err(Error::domain(format!(
                "region ({}, {})-({}, {}) has zero area",
                a.x, a.y, b.x, b.y
            )));
        }
        Ok(region)
    }

    pub fn contains(&self, p: &Position) -> bool {
        (self.min.x..=self.max.x).contains(&p.x) && (self.min.y..=self.max.y).contains(&p.y)
    }
}

/// Log-distance path loss `beta = c0 * (d0 / d)^alpha` with one exponent per link type.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathLossParams {
    /// Linear power gain at the reference distance.
    pub c0: f64,
    /// Reference distance in metres.
    pub d0: f64,
    pub alpha_bs_irs: f64,
    pub alpha_irs_ue: f64,
    pub alpha_direct: f64,
}

impl Default for PathLossParams {
    /// -30 dB at 1 m (750 MHz carrier) with exponents 1.5 / 2 / 3.
    fn default() -> Self {
        Self {
            c0: 1e-3,
            d0: 1.0,
            alpha_bs_irs: 1.5,
            alpha_irs_ue: 2.0,
            alpha_direct: 3.0,
        }
    }
}

impl PathLossParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c0 > 0.0 && self.c0.is_finite()) {
            return Err(Error::domain(format!(
                "c0 must be positive, got {}",
                self.c0
            )));
        }
        if !(self.d0 > 0.0 && self.d0.is_finite()) {
            return Err(Error::domain(format!(
                "d0 must be positive, got {}",
                self.d0
            )));
        }
        for (name, a) in [
            ("alpha_bs_irs", self.alpha_bs_irs),
            ("alpha_irs_ue", self.alpha_irs_ue),
            ("alpha_direct", self.alpha_direct),
        ] {
            if !(a >= 1.0 && a.is_finite()) {
                return Err(Error::domain(format!("{name} must be >= 1, got {a}")));
            }
        }
        Ok(())
    }
}

/// Linear gain of a link of length `d` with exponent `alpha`.
pub fn path_loss(params: &PathLossParams, alpha: f64, d: f64) -> Result<f64> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::domain(format!(
            "link distance must be positive, got {d}"
        )));
    }
    Ok(params.c0 * (params.d0 / d).powf(alpha))
}

/// Large-scale gains seen by one UE from one base station.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkBudget {
    /// Direct BS to UE.
    pub beta_d: f64,
    /// BS to IRS, per element.
    pub beta_f: f64,
    /// IRS to UE, per element.
    pub beta_g: f64,
    /// Cascaded per-element gain, always `beta_f * beta_g`.
    pub beta_r: f64,
}

impl LinkBudget {
    pub fn new(beta_d: f64, beta_f: f64, beta_g: f64) -> Result<Self> {
        for (name, b) in [("beta_d", beta_d), ("beta_f", beta_f), ("beta_g", beta_g)] {
            if !(b > 0.0 && b.is_finite()) {
                return Err(Error::domain(format!("{name} must be positive, got {b}")));
            }
        }
        Ok(Self {
            beta_d,
            beta_f,
            beta_g,
            beta_r: beta_f * beta_g,
        })
    }

    /// Cascaded-to-direct ratio `beta_r / beta_d`.
    pub fn beta_tilde(&self) -> f64 {
        self.beta_r / self.beta_d
    }
}

/// Computes the three link gains for a UE served by `bs` through `irs`.
pub fn link_budget(
    ue: &Position,
    bs: &Position,
    irs: &Position,
    params: &PathLossParams,
) -> Result<LinkBudget> {
    let beta_f = path_loss(params, params.alpha_bs_irs, bs.distance(irs))
        .map_err(|_| Error::domain("base station coincides with the IRS"))?;
    let beta_g = path_loss(params, params.alpha_irs_ue, irs.distance(ue))
        .map_err(|_| Error::domain("UE coincides with the IRS"))?;
    let beta_d = path_loss(params, params.alpha_direct, bs.distance(ue))
        .map_err(|_| Error::domain("UE coincides with the base station"))?;
    LinkBudget::new(beta_d, beta_f, beta_g)
}

/// The two operators sharing the IRS.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operator {
    /// Controls the IRS and beamforms for its scheduled UE.
    X,
    /// Out-of-band: sees whatever configuration X chose.
    Y,
}

impl Operator {
    pub const BOTH: [Operator; 2] = [Operator::X, Operator::Y];

    pub fn label(&self) -> &'static str {
        match self {
            Operator::X => "X",
            Operator::Y => "Y",
        }
    }
}

/// Positions of both base stations, the IRS and the UE drop region.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NetworkLayout {
    pub bs_x: Position,
    pub bs_y: Position,
    pub irs: Position,
    pub ue_region: Region,
}

impl Default for NetworkLayout {
    fn default() -> Self {
        Self {
            bs_x: Position::new(0.0, 200.0),
            bs_y: Position::new(200.0, 0.0),
            irs: Position::new(0.0, 0.0),
            ue_region: Region {
                min: Position::new(0.0, 0.0),
                max: Position::new(200.0, 200.0),
            },
        }
    }
}

impl NetworkLayout {
    pub fn base_station(&self, op: Operator) -> Position {
        match op {
            Operator::X => self.bs_x,
            Operator::Y => self.bs_y,
        }
    }

    pub fn budget(
        &self,
        op: Operator,
        ue: &Position,
        params: &PathLossParams,
    ) -> Result<LinkBudget> {
        link_budget(ue, &self.base_station(op), &self.irs, params)
    }
}

/// Drops `count` UEs i.i.d. uniformly over `region`.
pub fn sample_uniform_ues(
    count: usize,
    region: &Region,
    rng: &mut RngStream,
) -> Result<Vec<Position>> {
    if count == 0 {
        return Err(Error::domain("UE count must be at least 1"));
    }
    // re-validate: the fields are public
    let region = Region::new(region.min, region.max)?;
    Ok((0..count)
        .map(|_| {
            Position::new(
                rng.random_range(region.min.x..region.max.x),
                rng.random_range(region.min.y..region.max.y),
            )
        })
        .collect())
}
