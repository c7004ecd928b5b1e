//! Self-checks of the closed forms against independent oracles.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::csv::CsvTable;
use super::spec::ExperimentSpec;
use super::Report;
use crate::analytics::{ccdf_limit, mean_gain_x, mean_gain_y, rho12, simon_cdf, SimonParams};
use crate::channel::{complex_gaussian, sample_fading};
use crate::error::Result;
use crate::geometry::{linear_to_db, LinkBudget, Operator};
use crate::irs::{beamformed_gain, effective_channel, optimal_phases, random_phases};
use crate::montecarlo::sample_gain_pairs;
use crate::quadrature::quadrature_ccdf_oracle;
use crate::rng::{stream_id, tag, RngStream};
use crate::stats::{ks_two_sample, ks_two_sample_critical, pearson_batched, SeEstimate};

const ORACLE_TOL: f64 = 1e-9;
const CHUNK: usize = 10_000;
const EXP_PAIRS: [(f64, f64); 3] = [(3.0, 1.0), (1.0, 1.0), (2.0, 0.5)];
const Z_POINTS: usize = 64;
const OPTIMALITY_DRAWS: usize = 10_000;
const OPTIMALITY_CONFIGS: usize = 100;
const IDENTITY_SAMPLES: usize = 100_000;
const RHO_N: usize = 32;
const RHO_BATCHES: usize = 100;
const ANCHOR_N: usize = 64;
const ANCHOR_GAMMA_DB: f64 = 135.0;
const ANCHOR_DB: (f64, f64) = (16.0, 10.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Reported but never fails the suite.
    Info,
}

impl CheckStatus {
    pub fn label(&self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Info => "info",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub status: CheckStatus,
    pub observed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub runtime: Duration,
}

fn judged(name: &str, observed: f64, expected: f64, tolerance: f64) -> CheckResult {
    let ok = (observed - expected).abs() <= tolerance;
    CheckResult {
        name: name.to_string(),
        status: if ok {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        observed,
        expected,
        tolerance,
        runtime: Duration::ZERO,
    }
}

fn mc_check(name: &str, est: SeEstimate, expected: f64, sigmas: f64) -> CheckResult {
    judged(name, est.mean, expected, sigmas * est.std_error)
}

fn z_grid(mu1: f64, mu2: f64) -> Vec<f64> {
    let (lo, hi) = (-8.0 * mu2, 12.0 * mu1);
    (0..Z_POINTS)
        .map(|i| lo + (hi - lo) * i as f64 / (Z_POINTS - 1) as f64)
        .collect()
}

/// Draws `total` samples in fixed-size chunks, one stream per chunk, concatenated in order.
fn chunked<T: Send>(
    seed: u64,
    check: u64,
    total: usize,
    f: impl Fn(&mut RngStream, usize) -> Vec<T> + Sync,
) -> Vec<T> {
    let chunks = total.div_ceil(CHUNK);
    let parts: Vec<Vec<T>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = RngStream::new(seed, stream_id(&[tag::VALIDATE, check, c as u64]));
            f(&mut rng, CHUNK.min(total - c * CHUNK))
        })
        .collect();
    parts.into_iter().flatten().collect()
}

fn oracle_checks() -> Vec<CheckResult> {
    vec![timed_one(quadrature_check), timed_one(simon_check)]
}

fn quadrature_check() -> CheckResult {
    let quad = EXP_PAIRS
        .iter()
        .flat_map(|&(m1, m2)| {
            z_grid(m1, m2)
                .into_iter()
                .map(move |z| (ccdf_limit(m1, m2, z) - quadrature_ccdf_oracle(m1, m2, z)).abs())
        })
        .fold(0.0, f64::max);
    judged("ccdf_limit_vs_quadrature", quad, 0.0, ORACLE_TOL)
}

fn simon_check() -> CheckResult {
    let simon = EXP_PAIRS
        .iter()
        .flat_map(|&(m1, m2)| {
            let sp = SimonParams::new(m1, m2, 1e-6).expect("valid pair");
            z_grid(m1, m2)
                .into_iter()
                .map(move |z| (simon_cdf(&sp, z) - (1.0 - ccdf_limit(m1, m2, z))).abs())
        })
        .fold(0.0, f64::max);
    judged("simon_cdf_small_rho_limit", simon, 0.0, ORACLE_TOL)
}

fn moment_checks(spec: &ExperimentSpec, b: &LinkBudget, n: usize) -> Vec<CheckResult> {
    let seed = spec.sim.seed;
    let draws = spec.validate.mc_draws;
    let sigmas = spec.validate.mc_sigmas;
    let quarter_pi = std::f64::consts::FRAC_PI_4;
    let estimate = |check: u64, sample: &(dyn Fn(&mut RngStream) -> f64 + Sync)| {
        SeEstimate::from_samples(&chunked(seed, check, draws, |rng, m| {
            (0..m).map(|_| sample(rng)).collect()
        }))
    };
    let rayleigh = |beta: f64| move |rng: &mut RngStream| complex_gaussian(beta, rng).norm();
    let rayleigh_mean = |beta: f64| (quarter_pi * beta).sqrt();
    vec![
        timed_one(|| {
            mc_check(
                "mean_abs_f",
                estimate(0, &rayleigh(b.beta_f)),
                rayleigh_mean(b.beta_f),
                sigmas,
            )
        }),
        timed_one(|| {
            mc_check(
                "mean_abs_g",
                estimate(1, &rayleigh(b.beta_g)),
                rayleigh_mean(b.beta_g),
                sigmas,
            )
        }),
        timed_one(|| {
            mc_check(
                "mean_abs_h_d",
                estimate(2, &rayleigh(b.beta_d)),
                rayleigh_mean(b.beta_d),
                sigmas,
            )
        }),
        timed_one(|| {
            let est = estimate(3, &|rng| {
                (complex_gaussian(b.beta_f, rng) * complex_gaussian(b.beta_g, rng)).norm()
            });
            mc_check(
                "mean_abs_fg",
                est,
                quarter_pi * (b.beta_f * b.beta_g).sqrt(),
                sigmas,
            )
        }),
        timed_one(|| {
            let est = estimate(4, &|rng| beamformed_gain(&sample_fading(b, n, rng)).powi(2));
            mc_check(
                "mean_beamformed_gain_squared",
                est,
                mean_gain_x(n, b.beta_r, b.beta_d),
                sigmas,
            )
        }),
        timed_one(|| {
            let est = estimate(5, &|rng| {
                let d = sample_fading(b, n, rng);
                let p = random_phases(n, rng);
                effective_channel(&d, &p).expect("matching sizes").gain()
            });
            mc_check(
                "mean_random_phase_gain",
                est,
                mean_gain_y(n, b.beta_r, b.beta_d),
                sigmas,
            )
        }),
    ]
}

fn rho_check(spec: &ExperimentSpec, b: &LinkBudget) -> Result<CheckResult> {
    let mut rng = RngStream::new(spec.sim.seed, stream_id(&[tag::VALIDATE, 6]));
    let (with_irs, direct) = sample_gain_pairs(b, RHO_N, spec.validate.mc_draws, &mut rng)?;
    let est = pearson_batched(&with_irs, &direct, RHO_BATCHES)?;
    Ok(mc_check(
        "rho12_n32",
        est,
        rho12(RHO_N, b.beta_r, b.beta_d),
        spec.validate.mc_sigmas,
    ))
}

fn optimality_check(spec: &ExperimentSpec, b: &LinkBudget, n: usize) -> CheckResult {
    let violations = chunked(spec.sim.seed, 7, OPTIMALITY_DRAWS, |rng, m| {
        (0..m)
            .map(|_| {
                let d = sample_fading(b, n, rng);
                let best = effective_channel(&d, &optimal_phases(&d))
                    .expect("sizes")
                    .gain();
                (0..OPTIMALITY_CONFIGS)
                    .filter(|_| {
                        let p = random_phases(n, rng);
                        effective_channel(&d, &p).expect("sizes").gain() > best * (1.0 + 1e-12)
                    })
                    .count()
            })
            .collect()
    });
    judged(
        "phase_optimality",
        violations.iter().sum::<usize>() as f64,
        0.0,
        0.0,
    )
}

fn identity_check(
    spec: &ExperimentSpec,
    bx: &LinkBudget,
    by: &LinkBudget,
    n: usize,
) -> Result<CheckResult> {
    let pairs = chunked(spec.sim.seed, 8, IDENTITY_SAMPLES, |rng, m| {
        (0..m)
            .map(|_| {
                let dx = sample_fading(bx, n, rng);
                let dy = sample_fading(by, n, rng);
                let aligned = effective_channel(&dy, &optimal_phases(&dx))
                    .expect("sizes")
                    .gain();
                let dz = sample_fading(by, n, rng);
                let p = random_phases(n, rng);
                let random = effective_channel(&dz, &p).expect("sizes").gain();
                (aligned, random)
            })
            .collect()
    });
    let (aligned, random): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let ks = ks_two_sample(&aligned, &random)?;
    let critical = ks_two_sample_critical(aligned.len(), random.len(), 0.001);
    Ok(judged("phase_identity_ks", ks, 0.0, critical))
}

/// Receive SNRs with and without the IRS at the out-of-band UE, in dB.
fn anchor_checks(by: &LinkBudget) -> Vec<CheckResult> {
    let gamma = crate::geometry::db_to_linear(ANCHOR_GAMMA_DB);
    let with_irs = linear_to_db(mean_gain_y(ANCHOR_N, by.beta_r, by.beta_d) * gamma);
    let without = linear_to_db(by.beta_d * gamma);
    [
        ("anchor_snr_with_irs_db", with_irs, ANCHOR_DB.0),
        ("anchor_snr_without_irs_db", without, ANCHOR_DB.1),
    ]
    .into_iter()
    .map(|(name, observed, expected)| CheckResult {
        status: CheckStatus::Info,
        ..judged(name, observed, expected, 0.0)
    })
    .collect()
}

fn timed_one(f: impl FnOnce() -> CheckResult) -> CheckResult {
    let start = Instant::now();
    let mut c = f();
    c.runtime = start.elapsed();
    c
}

fn timed_result(f: impl FnOnce() -> Result<CheckResult>) -> Result<CheckResult> {
    let start = Instant::now();
    let mut c = f()?;
    c.runtime = start.elapsed();
    Ok(c)
}

/// Runs every check. The report fails if any non-informational check fails.
///
/// Monte Carlo checks use the out-of-band UE position of the `ccdf`
/// settings and the first N of the sweep.
pub fn run_validate(spec: &ExperimentSpec) -> Result<Report> {
    let ue = &spec.ccdf.ue;
    let bx = spec
        .sim
        .layout
        .budget(Operator::X, ue, &spec.sim.pathloss)?;
    let by = spec
        .sim
        .layout
        .budget(Operator::Y, ue, &spec.sim.pathloss)?;
    let n = spec.sweep.n_elements[0];

    let mut checks = oracle_checks();
    checks.extend(moment_checks(spec, &bx, n));
    checks.push(timed_result(|| rho_check(spec, &by))?);
    checks.push(timed_one(|| optimality_check(spec, &bx, n)));
    checks.push(timed_result(|| identity_check(spec, &bx, &by, n))?);
    checks.extend(anchor_checks(&by));

    let mut table = CsvTable::new(
        spec,
        &["check", "status", "observed", "expected", "tolerance"],
    );
    let mut summary = String::new();
    for c in &checks {
        table.row(&[
            &c.name,
            &c.status.label(),
            &c.observed,
            &c.expected,
            &c.tolerance,
        ]);
        let _ = writeln!(
            summary,
            "[{:>4}] {:<30} observed {:<14.6e} expected {:<14.6e} tol {:<11.3e} {:>9.3} ms",
            c.status.label(),
            c.name,
            c.observed,
            c.expected,
            c.tolerance,
            c.runtime.as_secs_f64() * 1e3
        );
    }
    let passed = checks.iter().all(|c| c.status != CheckStatus::Fail);
    Ok(Report {
        kind: spec.kind,
        csv: table.finish(),
        summary,
        passed,
        checks,
    })
}
