//! Estimators used to compare simulation output with the closed forms.

use crate::error::{Error, Result};

/// Mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeEstimate {
    pub mean: f64,
    /// Standard error of the mean; 0 when fewer than two samples exist.
    pub std_error: f64,
    pub n_samples: usize,
}

impl SeEstimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return Self {
                mean: f64::NAN,
                std_error: f64::NAN,
                n_samples: 0,
            };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let std_error = if n > 1 {
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Self {
            mean,
            std_error,
            n_samples: n,
        }
    }

    /// Number of standard errors separating the estimate from `value`.
    pub fn z_score(&self, value: f64) -> f64 {
        (self.mean - value) / self.std_error
    }
}

/// Survival function of a sample evaluated on a fixed grid.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalCcdf {
    pub grid: Vec<f64>,
    pub survival: Vec<f64>,
    pub n_samples: usize,
}

impl EmpiricalCcdf {
    /// Binomial standard error of the survival estimate at each grid point.
    pub fn std_errors(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.n_samples as f64;
        self.survival
            .iter()
            .map(move |p| (p * (1.0 - p) / n).sqrt())
    }
}

/// `survival[i]` is the fraction of samples `>= grid[i]`.
pub fn empirical_ccdf(samples: &[f64], grid: &[f64]) -> Result<EmpiricalCcdf> {
    if samples.is_empty() || grid.is_empty() {
        return Err(Error::domain("empirical CCDF needs samples and a grid"));
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::domain("samples contain NaN"));
    }
    if grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::domain("grid must be sorted"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len();
    let survival = grid
        .iter()
        .map(|&z| (n - sorted.partition_point(|&x| x < z)) as f64 / n as f64)
        .collect();
    Ok(EmpiricalCcdf {
        grid: grid.to_vec(),
        survival,
        n_samples: n,
    })
}

/// `points` equally spaced offsets spanning `[-8 mu2, 12 mu1]`.
pub fn offset_grid(mu1: f64, mu2: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::domain("offset grid needs at least two points"));
    }
    if !(mu1 > 0.0 && mu2 > 0.0) {
        return Err(Error::domain("offset grid needs positive means"));
    }
    let (lo, hi) = (-8.0 * mu2, 12.0 * mu1);
    let step = (hi - lo) / (points - 1) as f64;
    Ok((0..points).map(|i| lo + step * i as f64).collect())
}

/// Largest absolute gap between the empirical and an analytic survival function on the grid.
pub fn ks_distance(emp: &EmpiricalCcdf, analytic: impl Fn(f64) -> f64) -> f64 {
    emp.grid
        .iter()
        .zip(&emp.survival)
        .map(|(&z, &s)| (s - analytic(z)).abs())
        .fold(0.0, f64::max)
}

/// Exact one-sample Kolmogorov-Smirnov statistic against a continuous law given by its survival function.
pub fn ks_one_sample(samples: &[f64], survival: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::domain("KS needs at least one sample"));
    }
    let mut xs = samples.to_vec();
    xs.sort_unstable_by(f64::total_cmp);
    let n = xs.len() as f64;
    Ok(xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let cdf = 1.0 - survival(x);
            (cdf - i as f64 / n).max((i + 1) as f64 / n - cdf)
        })
        .fold(0.0, f64::max))
}

/// Two-sample Kolmogorov-Smirnov statistic, evaluated at every sample point.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::domain("two-sample KS needs two non-empty samples"));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable_by(f64::total_cmp);
    b.sort_unstable_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Asymptotic critical value of the two-sample KS statistic at level `alpha`.
pub fn ks_two_sample_critical(n: usize, m: usize, alpha: f64) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    let (n, m) = (n as f64, m as f64);
    c * ((n + m) / (n * m)).sqrt()
}

/// Allowance subtracted from the smaller-N curve before comparing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Slack {
    Fixed(f64),
    /// `sigmas` times the combined binomial standard error of both curves at each point.
    Binomial {
        sigmas: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DominanceReport {
    pub holds: bool,
    /// Largest `small - large - slack` over the grid, floored at 0.
    pub max_violation: f64,
    /// Grid point of the largest violation, if any.
    pub worst_z: Option<f64>,
}

/// Checks `survival_large(z) >= survival_small(z) - slack` at every grid point.
pub fn dominance_check(
    small_n: &EmpiricalCcdf,
    large_n: &EmpiricalCcdf,
    slack: Slack,
) -> Result<DominanceReport> {
    if small_n.grid != large_n.grid {
        return Err(Error::contract(
            "dominance check needs both curves on one grid",
        ));
    }
    let slacks: Vec<f64> = match slack {
        Slack::Fixed(s) => vec![s; small_n.grid.len()],
        Slack::Binomial { sigmas } => small_n
            .std_errors()
            .zip(large_n.std_errors())
            .map(|(a, b)| sigmas * a.hypot(b))
            .collect(),
    };
    let mut report = DominanceReport {
        holds: true,
        max_violation: 0.0,
        worst_z: None,
    };
    for i in 0..small_n.grid.len() {
        let excess = small_n.survival[i] - large_n.survival[i] - slacks[i];
        if excess > 0.0 {
            report.holds = false;
            if excess > report.max_violation {
                report.max_violation = excess;
                report.worst_z = Some(small_n.grid[i]);
            }
        }
    }
    Ok(report)
}

/// Ordinary least-squares line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Standard error of the slope; 0 for two points.
    pub slope_std_err: f64,
}

pub fn fit_slope(points: &[(f64, f64)]) -> Result<SlopeFit> {
    let n = points.len();
    if n < 2 {
        return Err(Error::domain("slope fit needs at least two points"));
    }
    let nf = n as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::domain(
            "slope fit needs at least two distinct abscissae",
        ));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let r_squared = if syy > 0.0 {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let slope_std_err = if n > 2 {
        (ss_res / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(SlopeFit {
        slope,
        intercept,
        r_squared,
        slope_std_err,
    })
}

/// Sample Pearson correlation.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::contract("pearson needs paired samples"));
    }
    if xs.len() < 2 {
        return Err(Error::domain("pearson needs at least two pairs"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Pearson correlation of the full sample with a standard error from `batches` equal batches.
pub fn pearson_batched(xs: &[f64], ys: &[f64], batches: usize) -> Result<SeEstimate> {
    let full = pearson(xs, ys)?;
    if batches < 2 || xs.len() < 2 * batches {
        return Err(Error::domain("need at least two batches of two pairs"));
    }
    let size = xs.len() / batches;
    let per_batch: Vec<f64> = (0..batches)
        .map(|b| pearson(&xs[b * size..(b + 1) * size], &ys[b * size..(b + 1) * size]))
        .collect::<Result<_>>()?;
    let spread = SeEstimate::from_samples(&per_batch);
    Ok(SeEstimate {
        mean: full,
        std_error: spread.std_error,
        n_samples: xs.len(),
    })
}
