//! Experiment orchestration: spec files in, CSV tables and reports out.
//!
//! | kind        | file            | columns |
//! |-------------|-----------------|---------|
//! | `se-vs-snr` | `se_vs_snr.csv` | `gamma_db,n_elements,operator,source,se_bits,std_err` |
//! | `se-vs-n`   | `se_vs_n.csv`   | same, plus slope rows with `source` = `slope_fit_mc` / `slope_fit_analytic` |
//! | `ccdf`      | `ccdf.csv`      | `n_elements,z,emp_survival,analytic_survival,abs_diff` |
//! | `validate`  | `validate.csv`  | `check,status,observed,expected,tolerance` |
//!
//! `source` is `mc` for simulated sum-SE (with its standard error across
//! trials) or `analytic` for the Jensen bound averaged over the same UEs
//! (`std_err` is 0). In slope rows `n_elements` is the smallest N of the fit
//! window, `se_bits` the slope in bits per doubling of N and `std_err` the
//! standard error of that slope.
//!
//! Every CSV starts with `# `-prefixed lines holding the resolved spec;
//! [`ExperimentSpec::from_csv_header`] reads them back. Output is identical
//! for any thread count.

mod csv;
mod plot;
pub mod spec;
mod validate;

use std::fmt::Write as _;
use std::path::PathBuf;

use rayon::prelude::*;

use crate::analytics::{ccdf_z, prob_offset_negative, CcdfParams};
use crate::error::{Error, Result};
use crate::geometry::Operator;
use crate::montecarlo::{run_round_robin, sample_offsets_with, RoundRobinResult, SimConfig};
use crate::rng::{stream_id, tag, RngStream};
use crate::stats::{
    dominance_check, empirical_ccdf, fit_slope, ks_one_sample, offset_grid, EmpiricalCcdf, Slack,
    SlopeFit,
};

pub use spec::{load_spec, CcdfSettings, ExperimentKind, ExperimentSpec, Sweep, ValidateSettings};
pub use validate::{run_validate, CheckResult, CheckStatus};

use csv::CsvTable;

/// Runtime switches that are not part of the experiment itself.
#[derive(Clone, Debug, Default)]
pub struct Runner {
    /// Worker threads; `None` uses rayon's default pool.
    pub threads: Option<usize>,
    pub debug_phase_identity: bool,
    /// Also write a gnuplot script next to the CSV.
    pub gnuplot: bool,
}

/// Everything an experiment produced.
#[derive(Clone, Debug)]
pub struct Report {
    pub kind: ExperimentKind,
    pub csv: String,
    /// Human-readable notes for the terminal.
    pub summary: String,
    /// False when a validation check or the phase-identity check failed.
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl Runner {
    /// Runs the experiment without touching the filesystem.
    pub fn compute(&self, spec: &ExperimentSpec) -> Result<Report> {
        match self.threads {
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n.max(1))
                    .build()
                    .map_err(|e| Error::domain(format!("cannot start {n} threads: {e}")))?;
                pool.install(|| self.dispatch(spec))
            }
            None => self.dispatch(spec),
        }
    }

    fn dispatch(&self, spec: &ExperimentSpec) -> Result<Report> {
        match spec.kind {
            ExperimentKind::SeVsSnr => run_se_vs_snr(spec, self.debug_phase_identity),
            ExperimentKind::SeVsN => run_se_vs_n(spec, self.debug_phase_identity),
            ExperimentKind::Ccdf => run_ccdf(spec),
            ExperimentKind::Validate => run_validate(spec),
        }
    }

    /// Runs the experiment and writes its outputs under `spec.output_dir`.
    /// Returns the report and the paths written.
    pub fn run(&self, spec: &ExperimentSpec) -> Result<(Report, Vec<PathBuf>)> {
        let report = self.compute(spec)?;
        let dir = &spec.output_dir;
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut written = Vec::new();
        let csv_path = dir.join(format!("{}.csv", spec.kind.file_stem()));
        std::fs::write(&csv_path, &report.csv).map_err(|e| Error::io(&csv_path, e))?;
        written.push(csv_path);
        if self.gnuplot {
            if let Some(script) = plot::gnuplot_script(spec) {
                let gp = dir.join(format!("{}.gp", spec.kind.file_stem()));
                std::fs::write(&gp, script).map_err(|e| Error::io(&gp, e))?;
                written.push(gp);
            }
        }
        Ok((report, written))
    }
}

fn sim_for(spec: &ExperimentSpec, n_elements: usize, debug: bool) -> SimConfig {
    SimConfig {
        n_elements,
        gammas: spec.sweep.gammas.clone(),
        debug_phase_identity: debug,
        ..spec.sim.clone()
    }
}

fn run_all_n(spec: &ExperimentSpec, debug: bool) -> Result<Vec<(usize, RoundRobinResult)>> {
    spec.sweep
        .n_elements
        .iter()
        .map(|&n| run_round_robin(&sim_for(spec, n, debug)).map(|r| (n, r)))
        .collect()
}

/// Appends phase-identity outcomes to the summary; returns false if any failed.
fn note_phase_identity(summary: &mut String, runs: &[(usize, RoundRobinResult)]) -> bool {
    let mut ok = true;
    for (n, r) in runs {
        if let Some(c) = r.phase_identity {
            let verdict = if c.passed() { "ok" } else { "FAIL" };
            ok &= c.passed();
            let _ = writeln!(
                summary,
                "phase identity N={n}: KS {:.5} vs critical {:.5} over {} slots [{verdict}]",
                c.ks, c.critical, c.n_samples
            );
        }
    }
    ok
}

fn se_rows(table: &mut CsvTable, n: usize, r: &RoundRobinResult, g: usize) {
    let db = r.gammas[g].db;
    for op in Operator::BOTH {
        let mc = r.sum_se(op)[g];
        table.row(&[&db, &n, &op.label(), &"mc", &mc.mean, &mc.std_error]);
        table.row(&[&db, &n, &op.label(), &"analytic", &r.bound(op)[g], &0]);
    }
}

fn max_relative_gap(runs: &[(usize, RoundRobinResult)]) -> f64 {
    runs.iter()
        .flat_map(|(_, r)| {
            Operator::BOTH.into_iter().flat_map(move |op| {
                r.sum_se(op)
                    .iter()
                    .zip(r.bound(op))
                    .map(|(mc, b)| ((mc.mean - b) / b).abs())
            })
        })
        .fold(0.0, f64::max)
}

/// Sum-SE of both operators against transmit SNR, for each N in the sweep.
pub fn run_se_vs_snr(spec: &ExperimentSpec, debug: bool) -> Result<Report> {
    let runs = run_all_n(spec, debug)?;
    let mut table = CsvTable::new(
        spec,
        &[
            "gamma_db",
            "n_elements",
            "operator",
            "source",
            "se_bits",
            "std_err",
        ],
    );
    for g in 0..spec.sweep.gammas.len() {
        for (n, r) in &runs {
            se_rows(&mut table, *n, r, g);
        }
    }
    let mut summary = String::new();
    let _ = writeln!(
        summary,
        "se-vs-snr: {} N values x {} SNR points; largest |mc - bound| / bound = {:.4}",
        runs.len(),
        spec.sweep.gammas.len(),
        max_relative_gap(&runs)
    );
    let passed = note_phase_identity(&mut summary, &runs);
    Ok(Report {
        kind: spec.kind,
        csv: table.finish(),
        summary,
        passed,
        checks: Vec::new(),
    })
}

/// Slope of sum-SE against `log2 N` over the largest-N half of the positive sweep values.
pub fn slope_over_upper_half(
    ns: &[usize],
    se_at: impl Fn(usize) -> f64,
) -> Result<(usize, SlopeFit)> {
    if ns.len() < 2 {
        return Err(Error::contract("a slope needs at least two N values"));
    }
    let window = &ns[ns.len() / 2..];
    let start = if window.len() < 2 {
        &ns[ns.len() - 2..]
    } else {
        window
    };
    let points: Vec<(f64, f64)> = start
        .iter()
        .map(|&n| ((n as f64).log2(), se_at(n)))
        .collect();
    Ok((start[0], fit_slope(&points)?))
}

/// Sum-SE against N at fixed transmit SNRs, with slope summaries.
pub fn run_se_vs_n(spec: &ExperimentSpec, debug: bool) -> Result<Report> {
    let runs = run_all_n(spec, debug)?;
    let mut table = CsvTable::new(
        spec,
        &[
            "gamma_db",
            "n_elements",
            "operator",
            "source",
            "se_bits",
            "std_err",
        ],
    );
    for g in 0..spec.sweep.gammas.len() {
        for (n, r) in &runs {
            se_rows(&mut table, *n, r, g);
        }
    }
    let positive = spec.distinct_positive_n();
    let lookup =
        |n: usize| -> &RoundRobinResult { &runs.iter().find(|(m, _)| *m == n).expect("swept N").1 };
    let mut summary = String::new();
    for (g, snr) in spec.sweep.gammas.iter().enumerate() {
        for op in Operator::BOTH {
            for source in ["mc", "analytic"] {
                let (first, fit) = slope_over_upper_half(&positive, |n| {
                    let r = lookup(n);
                    if source == "mc" {
                        r.sum_se(op)[g].mean
                    } else {
                        r.bound(op)[g]
                    }
                })?;
                let label = format!("slope_fit_{source}");
                table.row(&[
                    &snr.db,
                    &first,
                    &op.label(),
                    &label,
                    &fit.slope,
                    &fit.slope_std_err,
                ]);
                let _ = writeln!(
                    summary,
                    "slope {} {source} at {} dB over N >= {first}: {:.4} bits/doubling (r^2 {:.4})",
                    op.label(),
                    snr.db,
                    fit.slope,
                    fit.r_squared
                );
            }
        }
    }
    let passed = note_phase_identity(&mut summary, &runs);
    Ok(Report {
        kind: spec.kind,
        csv: table.finish(),
        summary,
        passed,
        checks: Vec::new(),
    })
}

/// Empirical and analytic offset CCDFs for one out-of-band UE.
#[derive(Clone, Debug)]
pub struct CcdfCurves {
    pub params: Vec<CcdfParams>,
    pub empirical: Vec<EmpiricalCcdf>,
    /// Fraction of strictly negative samples per N.
    pub negative_fraction: Vec<f64>,
    /// Exact KS distance of the samples from the closed-form law, per N.
    pub ks: Vec<f64>,
}

/// Samples offsets for each N on one shared grid spanning the widest curve.
pub fn ccdf_curves(spec: &ExperimentSpec) -> Result<CcdfCurves> {
    let budget = spec
        .sim
        .layout
        .budget(Operator::Y, &spec.ccdf.ue, &spec.sim.pathloss)?;
    let n_max = spec.sweep.n_elements.iter().copied().max().unwrap_or(0);
    let widest = CcdfParams::from_budget(&budget, n_max);
    let grid = offset_grid(widest.mu1(), widest.mu2(), spec.ccdf.grid_points)?;
    let per_n: Vec<(CcdfParams, EmpiricalCcdf, f64, f64)> = spec
        .sweep
        .n_elements
        .par_iter()
        .map(|&n| {
            let mut rng = RngStream::new(spec.sim.seed, stream_id(&[tag::OFFSETS, n as u64]));
            let z =
                sample_offsets_with(&budget, n, spec.ccdf.samples, &mut rng, spec.ccdf.pairing)?;
            let negative = z.iter().filter(|&&v| v < 0.0).count() as f64 / z.len() as f64;
            let p = CcdfParams::from_budget(&budget, n);
            let ks = ks_one_sample(&z, |v| ccdf_z(&p, v))?;
            Ok((p, empirical_ccdf(&z, &grid)?, negative, ks))
        })
        .collect::<Result<_>>()?;
    let mut curves = CcdfCurves {
        params: Vec::new(),
        empirical: Vec::new(),
        negative_fraction: Vec::new(),
        ks: Vec::new(),
    };
    for (p, e, neg, ks) in per_n {
        curves.params.push(p);
        curves.empirical.push(e);
        curves.negative_fraction.push(neg);
        curves.ks.push(ks);
    }
    Ok(curves)
}

/// CCDF of the out-of-band SNR offset for each N in the sweep.
pub fn run_ccdf(spec: &ExperimentSpec) -> Result<Report> {
    let curves = ccdf_curves(spec)?;
    let mut table = CsvTable::new(
        spec,
        &[
            "n_elements",
            "z",
            "emp_survival",
            "analytic_survival",
            "abs_diff",
        ],
    );
    let mut summary = format!(
        "ccdf: OOB UE at ({}, {}), {} {} samples per N\n",
        spec.ccdf.ue.x,
        spec.ccdf.ue.y,
        spec.ccdf.samples,
        spec.ccdf.pairing.label()
    );
    for (i, p) in curves.params.iter().enumerate() {
        let emp = &curves.empirical[i];
        for (z, s) in emp.grid.iter().zip(&emp.survival) {
            let a = ccdf_z(p, *z);
            table.row(&[&p.n_elements, z, s, &a, &(s - a).abs()]);
        }
        let _ = writeln!(
            summary,
            "N={:<4} KS {:.4}  Pr(Z<0) empirical {:.4} analytic {:.4}",
            p.n_elements,
            curves.ks[i],
            curves.negative_fraction[i],
            prob_offset_negative(p)
        );
    }
    let mut order: Vec<usize> = (0..curves.params.len())
        .filter(|&i| curves.params[i].n_elements > 0)
        .collect();
    order.sort_by_key(|&i| curves.params[i].n_elements);
    for w in order.windows(2) {
        let rep = dominance_check(
            &curves.empirical[w[0]],
            &curves.empirical[w[1]],
            Slack::Binomial { sigmas: 3.0 },
        )?;
        let _ = writeln!(
            summary,
            "dominance N={} over N={}: {} (max violation {:.4})",
            curves.params[w[1]].n_elements,
            curves.params[w[0]].n_elements,
            if rep.holds { "holds" } else { "violated" },
            rep.max_violation
        );
    }
    Ok(Report {
        kind: spec.kind,
        csv: table.finish(),
        summary,
        passed: true,
        checks: Vec::new(),
    })
}
