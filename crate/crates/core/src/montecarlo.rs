//! Round-robin Monte Carlo engine and SNR-offset sampling.
//!
//! In slot `t` base station X serves UE `t mod K` and base station Y serves
//! UE `t mod Q`. Both scheduled UEs get fresh fading every slot. X points the
//! IRS at its UE; Y's UE sees that configuration through channels that are
//! independent of it, which is statistically the same as a uniformly random
//! configuration, so Y's channel is evaluated under fresh random phases.
//! Setting [`SimConfig::debug_phase_identity`] also evaluates Y under X's
//! actual phases and compares the two gain samples.
//!
//! Work is split by trial. Each `(trial, slot)` pair draws from its own
//! [`RngStream`], and trial results are merged in trial order, so the output
//! does not depend on the size of the rayon pool.

use rayon::prelude::*;

use crate::analytics::{jensen_se_x, jensen_se_y, OperatorParams};
use crate::channel::{complex_gaussian, sample_fading, FadingDraw};
use crate::error::{Error, Result};
use crate::geometry::{
    sample_uniform_ues, LinkBudget, NetworkLayout, Operator, PathLossParams, Position, TransmitSnr,
};
use crate::irs::{beamformed_gain, effective_channel, optimal_phases, random_phases};
use crate::rng::{stream_id, tag, RngStream};
use crate::stats::{ks_two_sample, ks_two_sample_critical, SeEstimate};

/// Where the UEs of both operators are.
#[derive(Clone, Debug, PartialEq)]
pub enum UePlacement {
    /// Dropped uniformly over the layout's UE region from the master seed.
    Uniform,
    Fixed {
        x: Vec<Position>,
        y: Vec<Position>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub k_ues: usize,
    pub q_ues: usize,
    pub n_elements: usize,
    pub slots: usize,
    pub trials: usize,
    pub gammas: Vec<TransmitSnr>,
    pub seed: u64,
    pub layout: NetworkLayout,
    pub pathloss: PathLossParams,
    pub placement: UePlacement,
    pub debug_phase_identity: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            k_ues: 10,
            q_ues: 10,
            n_elements: 64,
            slots: 1000,
            trials: 100,
            gammas: (0..=10)
                .map(|i| TransmitSnr::from_db(110.0 + 5.0 * i as f64))
                .collect(),
            seed: crate::DEFAULT_SEED,
            layout: NetworkLayout::default(),
            pathloss: PathLossParams::default(),
            placement: UePlacement::Uniform,
            debug_phase_identity: false,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_ues == 0 || self.q_ues == 0 {
            return Err(Error::domain("each operator needs at least one UE"));
        }
        if self.trials == 0 {
            return Err(Error::domain("trials must be at least 1"));
        }
        if self.slots < self.k_ues.max(self.q_ues) {
            return Err(Error::domain(format!(
                "{} slots cannot serve every one of {} UEs",
                self.slots,
                self.k_ues.max(self.q_ues)
            )));
        }
        if self.gammas.is_empty() {
            return Err(Error::domain("transmit SNR grid is empty"));
        }
        if let Some(g) = self
            .gammas
            .iter()
            .find(|g| !(g.linear > 0.0 && g.linear.is_finite()))
        {
            return Err(Error::domain(format!(
                "transmit SNR {} dB is not usable",
                g.db
            )));
        }
        self.pathloss.validate()?;
        if let UePlacement::Fixed { x, y } = &self.placement {
            if x.len() != self.k_ues || y.len() != self.q_ues {
                return Err(Error::contract("fixed UE lists must match k_ues and q_ues"));
            }
        }
        Ok(())
    }

    /// UE positions for operators X and Y.
    pub fn ue_positions(&self) -> Result<(Vec<Position>, Vec<Position>)> {
        match &self.placement {
            UePlacement::Fixed { x, y } => Ok((x.clone(), y.clone())),
            UePlacement::Uniform => {
                let region = &self.layout.ue_region;
                let mut rx = RngStream::new(self.seed, stream_id(&[tag::PLACEMENT_X]));
                let mut ry = RngStream::new(self.seed, stream_id(&[tag::PLACEMENT_Y]));
                Ok((
                    sample_uniform_ues(self.k_ues, region, &mut rx)?,
                    sample_uniform_ues(self.q_ues, region, &mut ry)?,
                ))
            }
        }
    }

    fn budgets(&self, op: Operator, ues: &[Position]) -> Result<Vec<LinkBudget>> {
        ues.iter()
            .map(|ue| self.layout.budget(op, ue, &self.pathloss))
            .collect()
    }
}

/// Outcome of the optional phase-identity cross-check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseIdentityCheck {
    /// Two-sample KS distance between Y gains under random and under X's phases.
    pub ks: f64,
    /// Critical value at level 0.001.
    pub critical: f64,
    pub n_samples: usize,
}

impl PhaseIdentityCheck {
    pub fn passed(&self) -> bool {
        self.ks <= self.critical
    }
}

/// Ergodic SE estimates for both operators, indexed by transmit SNR.
#[derive(Clone, Debug)]
pub struct RoundRobinResult {
    pub gammas: Vec<TransmitSnr>,
    pub ues_x: Vec<Position>,
    pub ues_y: Vec<Position>,
    pub budgets_x: Vec<LinkBudget>,
    pub budgets_y: Vec<LinkBudget>,
    /// Sum-SE of X per gamma.
    pub sum_x: Vec<SeEstimate>,
    pub sum_y: Vec<SeEstimate>,
    /// `per_ue_x[gamma][k]`.
    pub per_ue_x: Vec<Vec<SeEstimate>>,
    pub per_ue_y: Vec<Vec<SeEstimate>>,
    /// How many slots each UE was served in one trial.
    pub slots_per_ue_x: Vec<usize>,
    pub slots_per_ue_y: Vec<usize>,
    /// Jensen bounds averaged over the same UEs, per gamma.
    pub bound_x: Vec<f64>,
    pub bound_y: Vec<f64>,
    pub phase_identity: Option<PhaseIdentityCheck>,
}

impl RoundRobinResult {
    pub fn sum_se(&self, op: Operator) -> &[SeEstimate] {
        match op {
            Operator::X => &self.sum_x,
            Operator::Y => &self.sum_y,
        }
    }

    pub fn budgets(&self, op: Operator) -> &[LinkBudget] {
        match op {
            Operator::X => &self.budgets_x,
            Operator::Y => &self.budgets_y,
        }
    }

    pub fn bound(&self, op: Operator) -> &[f64] {
        match op {
            Operator::X => &self.bound_x,
            Operator::Y => &self.bound_y,
        }
    }
}

struct TrialOutcome {
    /// `[k * n_gamma + g]`, time-averaged rate of UE k.
    per_ue_x: Vec<f64>,
    per_ue_y: Vec<f64>,
    identity: Option<(Vec<f64>, Vec<f64>)>,
}

fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / std::f64::consts::LN_2
}

fn run_trial(
    cfg: &SimConfig,
    trial: usize,
    budgets_x: &[LinkBudget],
    budgets_y: &[LinkBudget],
    counts_x: &[usize],
    counts_y: &[usize],
) -> TrialOutcome {
    let n = cfg.n_elements;
    let ng = cfg.gammas.len();
    let mut acc_x = vec![0.0; cfg.k_ues * ng];
    let mut acc_y = vec![0.0; cfg.q_ues * ng];
    let mut draw_x = FadingDraw::with_capacity(n);
    let mut draw_y = FadingDraw::with_capacity(n);
    let mut identity = cfg
        .debug_phase_identity
        .then(|| (Vec::with_capacity(cfg.slots), Vec::with_capacity(cfg.slots)));

    for slot in 0..cfg.slots {
        let mut rng = RngStream::new(cfg.seed, stream_id(&[tag::SLOT, trial as u64, slot as u64]));
        let k = slot % cfg.k_ues;
        let q = slot % cfg.q_ues;

        draw_x.resample(&budgets_x[k], n, &mut rng);
        let gain_x = beamformed_gain(&draw_x).powi(2);

        draw_y.resample(&budgets_y[q], n, &mut rng);
        let phases = random_phases(n, &mut rng);
        let gain_y = effective_channel(&draw_y, &phases)
            .expect("draw and phases share N")
            .gain();

        if let Some((random, steered)) = identity.as_mut() {
            let in_band = optimal_phases(&draw_x);
            random.push(gain_y);
            steered.push(
                effective_channel(&draw_y, &in_band)
                    .expect("draw and phases share N")
                    .gain(),
            );
        }

        for (g, snr) in cfg.gammas.iter().enumerate() {
            acc_x[k * ng + g] += log2_1p(gain_x * snr.linear);
            acc_y[q * ng + g] += log2_1p(gain_y * snr.linear);
        }
    }

    for (k, c) in counts_x.iter().enumerate() {
        acc_x[k * ng..(k + 1) * ng]
            .iter_mut()
            .for_each(|v| *v /= *c as f64);
    }
    for (q, c) in counts_y.iter().enumerate() {
        acc_y[q * ng..(q + 1) * ng]
            .iter_mut()
            .for_each(|v| *v /= *c as f64);
    }
    TrialOutcome {
        per_ue_x: acc_x,
        per_ue_y: acc_y,
        identity,
    }
}

/// Number of slots each of `users` UEs receives under round-robin over `slots` slots.
pub fn round_robin_counts(slots: usize, users: usize) -> Vec<usize> {
    (0..users)
        .map(|u| slots / users + usize::from(u < slots % users))
        .collect()
}

fn summarize(
    outcomes: &[Vec<f64>],
    users: usize,
    ng: usize,
) -> (Vec<SeEstimate>, Vec<Vec<SeEstimate>>) {
    let sums: Vec<SeEstimate> = (0..ng)
        .map(|g| {
            let per_trial: Vec<f64> = outcomes
                .iter()
                .map(|o| (0..users).map(|u| o[u * ng + g]).sum::<f64>() / users as f64)
                .collect();
            SeEstimate::from_samples(&per_trial)
        })
        .collect();
    let per_ue = (0..ng)
        .map(|g| {
            (0..users)
                .map(|u| {
                    let xs: Vec<f64> = outcomes.iter().map(|o| o[u * ng + g]).collect();
                    SeEstimate::from_samples(&xs)
                })
                .collect()
        })
        .collect();
    (sums, per_ue)
}

/// Runs the two-operator round-robin simulation on the current rayon pool.
pub fn run_round_robin(cfg: &SimConfig) -> Result<RoundRobinResult> {
    cfg.validate()?;
    let (ues_x, ues_y) = cfg.ue_positions()?;
    let budgets_x = cfg.budgets(Operator::X, &ues_x)?;
    let budgets_y = cfg.budgets(Operator::Y, &ues_y)?;
    let counts_x = round_robin_counts(cfg.slots, cfg.k_ues);
    let counts_y = round_robin_counts(cfg.slots, cfg.q_ues);

    let outcomes: Vec<TrialOutcome> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, t, &budgets_x, &budgets_y, &counts_x, &counts_y))
        .collect();

    let ng = cfg.gammas.len();
    let xs: Vec<Vec<f64>> = outcomes.iter().map(|o| o.per_ue_x.clone()).collect();
    let ys: Vec<Vec<f64>> = outcomes.iter().map(|o| o.per_ue_y.clone()).collect();
    let (sum_x, per_ue_x) = summarize(&xs, cfg.k_ues, ng);
    let (sum_y, per_ue_y) = summarize(&ys, cfg.q_ues, ng);

    let phase_identity = if cfg.debug_phase_identity {
        let (random, steered): (Vec<f64>, Vec<f64>) = outcomes
            .into_iter()
            .filter_map(|o| o.identity)
            .fold((Vec::new(), Vec::new()), |(mut a, mut b), (r, s)| {
                a.extend(r);
                b.extend(s);
                (a, b)
            });
        Some(PhaseIdentityCheck {
            ks: ks_two_sample(&random, &steered)?,
            critical: ks_two_sample_critical(random.len(), steered.len(), 1e-3),
            n_samples: random.len(),
        })
    } else {
        None
    };

    let bound = |budgets: &[LinkBudget], f: fn(&OperatorParams) -> f64| -> Result<Vec<f64>> {
        cfg.gammas
            .iter()
            .map(|snr| {
                let total = budgets
                    .iter()
                    .map(|b| {
                        OperatorParams::from_budget(b, cfg.n_elements, snr.linear).map(|p| f(&p))
                    })
                    .sum::<Result<f64>>()?;
                Ok(total / budgets.len() as f64)
            })
            .collect()
    };
    let bound_x = bound(&budgets_x, jensen_se_x)?;
    let bound_y = bound(&budgets_y, jensen_se_y)?;

    Ok(RoundRobinResult {
        gammas: cfg.gammas.clone(),
        ues_x,
        ues_y,
        budgets_x,
        budgets_y,
        sum_x,
        sum_y,
        per_ue_x,
        per_ue_y,
        slots_per_ue_x: counts_x,
        slots_per_ue_y: counts_y,
        bound_x,
        bound_y,
        phase_identity,
    })
}

/// What the IRS-absent gain in an offset sample is compared against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OffsetPairing {
    /// The direct term of the same draw, so both gains share `h_d`.
    #[default]
    Paired,
    /// A direct term drawn independently of the IRS-present gain.
    Independent,
}

impl OffsetPairing {
    pub fn label(&self) -> &'static str {
        match self {
            OffsetPairing::Paired => "paired",
            OffsetPairing::Independent => "independent",
        }
    }
}

/// Samples of the offset `|h_1|^2 - 1{N != 0} |h_2|^2` for one out-of-band UE.
///
/// `h_1` is the effective channel of a fresh draw under fresh random phases
/// and `h_2` is the direct term of that same draw.
pub fn sample_offsets(
    budget: &LinkBudget,
    n_elements: usize,
    trials: usize,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    sample_offsets_with(budget, n_elements, trials, rng, OffsetPairing::Paired)
}

pub fn sample_offsets_with(
    budget: &LinkBudget,
    n_elements: usize,
    trials: usize,
    rng: &mut RngStream,
    pairing: OffsetPairing,
) -> Result<Vec<f64>> {
    if trials == 0 {
        return Err(Error::domain("need at least one offset sample"));
    }
    let mut draw = FadingDraw::with_capacity(n_elements);
    let mut out = Vec::with_capacity(trials);
    for _ in 0..trials {
        draw.resample(budget, n_elements, rng);
        let phases = random_phases(n_elements, rng);
        let with_irs = effective_channel(&draw, &phases)?.gain();
        let without = match pairing {
            OffsetPairing::Paired => draw.h_d.norm_sqr(),
            OffsetPairing::Independent => complex_gaussian(budget.beta_d, rng).norm_sqr(),
        };
        out.push(if n_elements == 0 {
            with_irs
        } else {
            with_irs - without
        });
    }
    Ok(out)
}

/// Paired `(|h_1|^2, |h_d|^2)` samples from the same draws.
pub fn sample_gain_pairs(
    budget: &LinkBudget,
    n_elements: usize,
    count: usize,
    rng: &mut RngStream,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut with_irs = Vec::with_capacity(count);
    let mut direct = Vec::with_capacity(count);
    for _ in 0..count {
        let draw = sample_fading(budget, n_elements, rng);
        let phases = random_phases(n_elements, rng);
        with_irs.push(effective_channel(&draw, &phases)?.gain());
        direct.push(draw.h_d.norm_sqr());
    }
    Ok((with_irs, direct))
}
