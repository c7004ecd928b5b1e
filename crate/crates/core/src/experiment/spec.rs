//! Experiment files.
//!
//! The format is flat UTF-8 `key = value` lines with dotted section names.
//! Blank lines and lines starting with `#` are ignored. Unknown or repeated
//! keys are errors. Every key is optional; absent keys take the defaults
//! below, and sweep defaults depend on `kind`.
//!
//! ```text
//! kind = se-vs-snr            # se-vs-snr | se-vs-n | ccdf | validate
//! output_dir = out
//! sim.k_ues = 10
//! sim.q_ues = 10
//! sim.n_elements = 64
//! sim.slots = 1000
//! sim.trials = 100
//! sim.seed = 20230601
//! layout.bs_x = 0,200
//! layout.bs_y = 200,0
//! layout.irs = 0,0
//! layout.ue_region = 0,0,200,200
//! pathloss.c0_db = -30
//! pathloss.d0 = 1
//! pathloss.alpha_bs_irs = 1.5
//! pathloss.alpha_irs_ue = 2
//! pathloss.alpha_direct = 3
//! sweep.gamma_db = 110:5:160  # start:step:stop, or a list: 110,135,160 / [110, 135, 160]
//! sweep.n_elements = 0,16,64
//! ccdf.ue = 100,100
//! ccdf.samples = 100000
//! ccdf.grid_points = 512
//! ccdf.pairing = paired       # paired | independent
//! validate.mc_draws = 1000000
//! validate.mc_sigmas = 3
//! ```
//!
//! Decibel values are converted to linear scale here, once.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{db_to_linear, NetworkLayout, PathLossParams, Position, Region, TransmitSnr};
use crate::montecarlo::{OffsetPairing, SimConfig, UePlacement};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKind {
    SeVsSnr,
    SeVsN,
    Ccdf,
    Validate,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::SeVsSnr => "se-vs-snr",
            ExperimentKind::SeVsN => "se-vs-n",
            ExperimentKind::Ccdf => "ccdf",
            ExperimentKind::Validate => "validate",
        }
    }

    /// Stem of the files an experiment writes.
    pub fn file_stem(&self) -> &'static str {
        match self {
            ExperimentKind::SeVsSnr => "se_vs_snr",
            ExperimentKind::SeVsN => "se_vs_n",
            ExperimentKind::Ccdf => "ccdf",
            ExperimentKind::Validate => "validate",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "se-vs-snr" => Ok(ExperimentKind::SeVsSnr),
            "se-vs-n" => Ok(ExperimentKind::SeVsN),
            "ccdf" => Ok(ExperimentKind::Ccdf),
            "validate" => Ok(ExperimentKind::Validate),
            other => Err(format!(
                "unknown kind `{other}` (expected se-vs-snr, se-vs-n, ccdf or validate)"
            )),
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Swept values; which ones a kind uses is documented on the runners.
#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub gammas: Vec<TransmitSnr>,
    pub n_elements: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CcdfSettings {
    /// The out-of-band UE whose offsets are sampled.
    pub ue: Position,
    pub samples: usize,
    pub grid_points: usize,
    pub pairing: OffsetPairing,
}

impl Default for CcdfSettings {
    fn default() -> Self {
        Self {
            ue: Position::new(100.0, 100.0),
            samples: 100_000,
            grid_points: 512,
            pairing: OffsetPairing::Paired,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidateSettings {
    pub mc_draws: usize,
    /// Monte Carlo checks pass within this many standard errors.
    pub mc_sigmas: f64,
}

impl Default for ValidateSettings {
    fn default() -> Self {
        Self {
            mc_draws: 1_000_000,
            mc_sigmas: 3.0,
        }
    }
}

/// A fully resolved experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub sim: SimConfig,
    /// Reference gain `c0` in dB, kept so the spec serializes back verbatim.
    pub c0_db: f64,
    pub output_dir: PathBuf,
    pub sweep: Sweep,
    pub ccdf: CcdfSettings,
    pub validate: ValidateSettings,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec::parse("").expect("empty spec is valid")
    }
}

fn default_sweep(kind: ExperimentKind) -> (Vec<f64>, Vec<usize>) {
    match kind {
        ExperimentKind::SeVsSnr => (range(110.0, 5.0, 160.0), vec![0, 16, 64]),
        ExperimentKind::SeVsN => (vec![130.0, 150.0], (2..=9).map(|p| 1usize << p).collect()),
        ExperimentKind::Ccdf => (vec![135.0], vec![0, 4, 8, 16, 64, 256]),
        ExperimentKind::Validate => (vec![135.0], vec![64]),
    }
}

fn range(start: f64, step: f64, stop: f64) -> Vec<f64> {
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|i| start + step * i as f64).collect()
}

const KEYS: &[&str] = &[
    "kind",
    "output_dir",
    "sim.k_ues",
    "sim.q_ues",
    "sim.n_elements",
    "sim.slots",
    "sim.trials",
    "sim.seed",
    "layout.bs_x",
    "layout.bs_y",
    "layout.irs",
    "layout.ue_region",
    "pathloss.c0_db",
    "pathloss.d0",
    "pathloss.alpha_bs_irs",
    "pathloss.alpha_irs_ue",
    "pathloss.alpha_direct",
    "sweep.gamma_db",
    "sweep.n_elements",
    "ccdf.ue",
    "ccdf.samples",
    "ccdf.grid_points",
    "ccdf.pairing",
    "validate.mc_draws",
    "validate.mc_sigmas",
];

/// Raw key/value pairs with the line each came from.
struct RawSpec {
    entries: BTreeMap<String, (usize, String)>,
}

impl RawSpec {
    fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
                line,
                message: format!("expected `key = value`, found `{content}`"),
            })?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(Error::Parse {
                    line,
                    message: format!("unknown key `{key}`"),
                });
            }
            if entries
                .insert(key.to_string(), (line, value.trim().to_string()))
                .is_some()
            {
                return Err(Error::Parse {
                    line,
                    message: format!("duplicate key `{key}`"),
                });
            }
        }
        Ok(Self { entries })
    }

    fn get<T>(&self, key: &str, default: T, conv: impl Fn(&str) -> Result<T, String>) -> Result<T> {
        match self.entries.get(key) {
            None => Ok(default),
            Some((_, v)) => conv(v).map_err(|m| Error::invalid(key, m)),
        }
    }
}

fn parse_count(s: &str) -> Result<usize, String> {
    s.parse::<usize>()
        .map_err(|_| format!("`{s}` is not a non-negative integer"))
}

fn parse_positive_count(s: &str) -> Result<usize, String> {
    match parse_count(s)? {
        0 => Err("must be at least 1".into()),
        n => Ok(n),
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v = s
        .parse::<f64>()
        .map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn parse_list<T>(s: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    let inner = s.trim();
    let inner = inner
        .strip_prefix('[')
        .and_then(|x| x.strip_suffix(']'))
        .unwrap_or(inner);
    let items: Vec<T> = inner
        .split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(item)
        .collect::<Result<_, _>>()?;
    if items.is_empty() {
        Err("list is empty".into())
    } else {
        Ok(items)
    }
}

/// `start:step:stop` or a plain list.
fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    match parts.as_slice() {
        [start, step, stop] => {
            let (start, step, stop) = (parse_f64(start)?, parse_f64(step)?, parse_f64(stop)?);
            if !(step > 0.0) || stop < start {
                return Err(format!("range `{s}` needs step > 0 and stop >= start"));
            }
            Ok(range(start, step, stop))
        }
        [_] => parse_list(s, parse_f64),
        _ => Err(format!("`{s}` is neither a list nor start:step:stop")),
    }
}

fn parse_point(s: &str) -> Result<Position, String> {
    match parse_list(s, parse_f64)?.as_slice() {
        [x, y] => Ok(Position::new(*x, *y)),
        _ => Err(format!("`{s}` is not an `x,y` pair")),
    }
}

fn parse_region(s: &str) -> Result<Region, String> {
    match parse_list(s, parse_f64)?.as_slice() {
        [x0, y0, x1, y1] => {
            Region::new(Position::new(*x0, *y0), Position::new(*x1, *y1)).map_err(|e| e.to_string())
        }
        _ => Err(format!("`{s}` is not `x0,y0,x1,y1`")),
    }
}

fn parse_pairing(s: &str) -> Result<OffsetPairing, String> {
    match s {
        "paired" => Ok(OffsetPairing::Paired),
        "independent" => Ok(OffsetPairing::Independent),
        other => Err(format!(
            "unknown pairing `{other}` (expected paired or independent)"
        )),
    }
}

impl ExperimentSpec {
    /// Parses and validates experiment text, filling in defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let raw = RawSpec::parse(text)?;
        let kind = raw.get("kind", ExperimentKind::SeVsSnr, |s| s.parse())?;
        let base = SimConfig::default();
        let base_layout = NetworkLayout::default();
        let base_pl = PathLossParams::default();
        let (default_gamma, default_n) = default_sweep(kind);

        let c0_db = raw.get("pathloss.c0_db", -30.0, parse_f64)?;
        let pathloss = PathLossParams {
            c0: db_to_linear(c0_db),
            d0: raw.get("pathloss.d0", base_pl.d0, parse_f64)?,
            alpha_bs_irs: raw.get("pathloss.alpha_bs_irs", base_pl.alpha_bs_irs, parse_f64)?,
            alpha_irs_ue: raw.get("pathloss.alpha_irs_ue", base_pl.alpha_irs_ue, parse_f64)?,
            alpha_direct: raw.get("pathloss.alpha_direct", base_pl.alpha_direct, parse_f64)?,
        };
        if !(pathloss.d0 > 0.0) {
            return Err(Error::invalid("pathloss.d0", "must be positive"));
        }
        for (key, a) in [
            ("pathloss.alpha_bs_irs", pathloss.alpha_bs_irs),
            ("pathloss.alpha_irs_ue", pathloss.alpha_irs_ue),
            ("pathloss.alpha_direct", pathloss.alpha_direct),
        ] {
            if a < 1.0 {
                return Err(Error::invalid(key, format!("exponent {a} is below 1")));
            }
        }

        let layout = NetworkLayout {
            bs_x: raw.get("layout.bs_x", base_layout.bs_x, parse_point)?,
            bs_y: raw.get("layout.bs_y", base_layout.bs_y, parse_point)?,
            irs: raw.get("layout.irs", base_layout.irs, parse_point)?,
            ue_region: raw.get("layout.ue_region", base_layout.ue_region, parse_region)?,
        };
        for (key, bs) in [("layout.bs_x", layout.bs_x), ("layout.bs_y", layout.bs_y)] {
            if bs == layout.irs {
                return Err(Error::invalid(key, "base station coincides with the IRS"));
            }
        }

        let gamma_db = raw.get("sweep.gamma_db", default_gamma, parse_grid)?;
        let sweep = Sweep {
            gammas: gamma_db
                .iter()
                .map(|&db| TransmitSnr::from_db(db))
                .collect(),
            n_elements: raw.get("sweep.n_elements", default_n, |s| {
                parse_list(s, parse_count)
            })?,
        };
        if let Some(g) = sweep
            .gammas
            .iter()
            .find(|g| !(g.linear > 0.0 && g.linear.is_finite()))
        {
            return Err(Error::invalid(
                "sweep.gamma_db",
                format!("{} dB overflows", g.db),
            ));
        }

        let sim = SimConfig {
            k_ues: raw.get("sim.k_ues", base.k_ues, parse_positive_count)?,
            q_ues: raw.get("sim.q_ues", base.q_ues, parse_positive_count)?,
            n_elements: raw.get("sim.n_elements", base.n_elements, parse_count)?,
            slots: raw.get("sim.slots", base.slots, parse_positive_count)?,
            trials: raw.get("sim.trials", base.trials, parse_positive_count)?,
            gammas: sweep.gammas.clone(),
            seed: raw.get("sim.seed", base.seed, |s| {
                s.parse::<u64>()
                    .map_err(|_| format!("`{s}` is not a 64-bit unsigned seed"))
            })?,
            layout,
            pathloss,
            placement: UePlacement::Uniform,
            debug_phase_identity: false,
        };
        if sim.slots < sim.k_ues.max(sim.q_ues) {
            return Err(Error::invalid(
                "sim.slots",
                format!(
                    "{} slots cannot serve {} UEs",
                    sim.slots,
                    sim.k_ues.max(sim.q_ues)
                ),
            ));
        }

        let ccdf = CcdfSettings {
            ue: raw.get("ccdf.ue", CcdfSettings::default().ue, parse_point)?,
            samples: raw.get("ccdf.samples", 100_000, parse_positive_count)?,
            grid_points: raw.get("ccdf.grid_points", 512, parse_count)?,
            pairing: raw.get("ccdf.pairing", OffsetPairing::Paired, parse_pairing)?,
        };
        if ccdf.grid_points < 2 {
            return Err(Error::invalid("ccdf.grid_points", "need at least 2 points"));
        }
        if ccdf.ue == layout.irs || ccdf.ue == layout.bs_y {
            return Err(Error::invalid(
                "ccdf.ue",
                "UE coincides with the IRS or BS-Y",
            ));
        }

        let validate = ValidateSettings {
            mc_draws: raw.get("validate.mc_draws", 1_000_000, |s| {
                let n = parse_count(s)?;
                if n < 200 {
                    Err("need at least 200 draws".into())
                } else {
                    Ok(n)
                }
            })?,
            mc_sigmas: raw.get("validate.mc_sigmas", 3.0, |s| {
                let v = parse_f64(s)?;
                if v > 0.0 {
                    Ok(v)
                } else {
                    Err("must be positive".into())
                }
            })?,
        };

        let spec = ExperimentSpec {
            kind,
            sim,
            c0_db,
            output_dir: PathBuf::from(
                raw.get("output_dir", "out".to_string(), |s| Ok(s.to_string()))?,
            ),
            sweep,
            ccdf,
            validate,
        };
        spec.check_sweep()?;
        Ok(spec)
    }

    fn check_sweep(&self) -> Result<()> {
        if self.kind == ExperimentKind::SeVsN {
            let positive = self.distinct_positive_n();
            if positive.len() < 2 {
                return Err(Error::invalid(
                    "sweep.n_elements",
                    "se-vs-n needs at least two distinct positive N",
                ));
            }
        }
        Ok(())
    }

    pub(crate) fn distinct_positive_n(&self) -> Vec<usize> {
        let mut ns: Vec<usize> = self
            .sweep
            .n_elements
            .iter()
            .copied()
            .filter(|&n| n > 0)
            .collect();
        ns.sort_unstable();
        ns.dedup();
        ns
    }

    /// Serializes the resolved spec back to the file format.
    ///
    /// Parsing the output yields an equal spec.
    pub fn to_config_string(&self) -> String {
        let s = &self.sim;
        let pl = &s.pathloss;
        let l = &s.layout;
        let join = |v: &mut dyn Iterator<Item = String>| v.collect::<Vec<_>>().join(",");
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("kind", self.kind.to_string());
        kv("output_dir", self.output_dir.display().to_string());
        kv("sim.k_ues", s.k_ues.to_string());
        kv("sim.q_ues", s.q_ues.to_string());
        kv("sim.n_elements", s.n_elements.to_string());
        kv("sim.slots", s.slots.to_string());
        kv("sim.trials", s.trials.to_string());
        kv("sim.seed", s.seed.to_string());
        kv("layout.bs_x", format!("{},{}", l.bs_x.x, l.bs_x.y));
        kv("layout.bs_y", format!("{},{}", l.bs_y.x, l.bs_y.y));
        kv("layout.irs", format!("{},{}", l.irs.x, l.irs.y));
        kv(
            "layout.ue_region",
            format!(
                "{},{},{},{}",
                l.ue_region.min.x, l.ue_region.min.y, l.ue_region.max.x, l.ue_region.max.y
            ),
        );
        kv("pathloss.c0_db", self.c0_db.to_string());
        kv("pathloss.d0", pl.d0.to_string());
        kv("pathloss.alpha_bs_irs", pl.alpha_bs_irs.to_string());
        kv("pathloss.alpha_irs_ue", pl.alpha_irs_ue.to_string());
        kv("pathloss.alpha_direct", pl.alpha_direct.to_string());
        kv(
            "sweep.gamma_db",
            join(&mut self.sweep.gammas.iter().map(|g| g.db.to_string())),
        );
        kv(
            "sweep.n_elements",
            join(&mut self.sweep.n_elements.iter().map(|n| n.to_string())),
        );
        kv("ccdf.ue", format!("{},{}", self.ccdf.ue.x, self.ccdf.ue.y));
        kv("ccdf.samples", self.ccdf.samples.to_string());
        kv("ccdf.grid_points", self.ccdf.grid_points.to_string());
        kv("ccdf.pairing", self.ccdf.pairing.label().to_string());
        kv("validate.mc_draws", self.validate.mc_draws.to_string());
        kv("validate.mc_sigmas", self.validate.mc_sigmas.to_string());
        out
    }

    /// Recovers the spec embedded in the `# ` header of a CSV written by this crate.
    pub fn from_csv_header(csv: &str) -> Result<Self> {
        let body: String = csv
            .lines()
            .take_while(|l| l.starts_with('#'))
            .filter_map(|l| l.strip_prefix("# "))
            .filter(|l| l.contains('='))
            .map(|l| format!("{l}\n"))
            .collect();
        Self::parse(&body)
    }
}

/// Reads and validates an experiment file.
pub fn load_spec(path: &Path) -> Result<ExperimentSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ExperimentSpec::parse(&text)
}
