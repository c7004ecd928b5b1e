//! Monte Carlo estimates checked against closed forms and numeric oracles.

use irs_oob::analytics::{
    ccdf_limit, ccdf_z, jensen_se_x, jensen_se_y, mean_gain_x, mean_gain_y, rho12, simon_cdf,
    CcdfParams, OperatorParams, SimonParams,
};
use irs_oob::channel::sample_fading;
use irs_oob::geometry::{LinkBudget, Operator, Position, TransmitSnr};
use irs_oob::irs::{beamformed_gain, effective_channel, random_phases};
use irs_oob::montecarlo::{
    run_round_robin, sample_gain_pairs, sample_offsets, sample_offsets_with, OffsetPairing,
    SimConfig, UePlacement,
};
use irs_oob::quadrature::{integrate_to_inf, quadrature_ccdf_oracle};
use irs_oob::rng::RngStream;
use irs_oob::stats::{fit_slope, ks_one_sample, pearson_batched, SeEstimate};

const SIGMAS: f64 = 4.0;

fn strong_irs() -> LinkBudget {
    LinkBudget::new(1.0, 0.5, 0.5).unwrap()
}

/// Many weak elements, so the reflected sum is close to Gaussian.
fn many_weak_elements() -> (LinkBudget, usize) {
    (LinkBudget::new(1.0, 0.05, 0.05).unwrap(), 256)
}

fn within(est: SeEstimate, expected: f64) {
    assert!(
        (est.mean - expected).abs() <= SIGMAS * est.std_error,
        "estimate {} +- {} vs {expected}",
        est.mean,
        est.std_error
    );
}

#[test]
fn mean_gains_match_simulation() {
    let b = strong_irs();
    let n = 16;
    let mut rng = RngStream::new(1, 0);
    let (mut aligned, mut random) = (Vec::new(), Vec::new());
    for _ in 0..200_000 {
        let d = sample_fading(&b, n, &mut rng);
        aligned.push(beamformed_gain(&d).powi(2));
        random.push(
            effective_channel(&d, &random_phases(n, &mut rng))
                .unwrap()
                .gain(),
        );
    }
    within(
        SeEstimate::from_samples(&aligned),
        mean_gain_x(n, b.beta_r, b.beta_d),
    );
    within(
        SeEstimate::from_samples(&random),
        mean_gain_y(n, b.beta_r, b.beta_d),
    );
}

#[test]
fn pearson_correlation_matches_rho12() {
    let (b, n_max) = many_weak_elements();
    for (n, seed) in [(n_max / 4, 3), (n_max, 4)] {
        let (h1, h2) = sample_gain_pairs(&b, n, 200_000, &mut RngStream::new(seed, 0)).unwrap();
        let est = pearson_batched(&h1, &h2, 100).unwrap();
        within(est, rho12(n, b.beta_r, b.beta_d));
    }
}

/// `E log2(1 + a X)` for `X ~ Exp(1)`, by quadrature.
fn rayleigh_rate(a: f64) -> f64 {
    integrate_to_inf(|x| (a * x).ln_1p() * (-x).exp(), 0.0, 1e-12) / std::f64::consts::LN_2
}

#[test]
fn direct_link_rate_matches_exponential_integral() {
    let ue = Position::new(120.0, 60.0);
    let cfg = SimConfig {
        k_ues: 1,
        q_ues: 1,
        n_elements: 0,
        slots: 2000,
        trials: 50,
        gammas: vec![TransmitSnr::from_db(110.0), TransmitSnr::from_db(140.0)],
        placement: UePlacement::Fixed {
            x: vec![ue],
            y: vec![ue],
        },
        ..SimConfig::default()
    };
    let r = run_round_robin(&cfg).unwrap();
    for op in Operator::BOTH {
        let beta_d = r.budgets(op)[0].beta_d;
        for (g, snr) in cfg.gammas.iter().enumerate() {
            let exact = rayleigh_rate(beta_d * snr.linear);
            within(r.sum_se(op)[g], exact);
            let bound = jensen_se_y(&OperatorParams::new(0, 1.0, beta_d, snr.linear).unwrap());
            assert!(exact < bound);
            assert!((r.bound(op)[g] - bound).abs() < 1e-12);
        }
    }
}

#[test]
fn owner_beats_other_operator_next_to_the_surface() {
    let ue = Position::new(5.0, 5.0);
    let cfg = SimConfig {
        k_ues: 1,
        q_ues: 1,
        n_elements: 64,
        slots: 500,
        trials: 20,
        gammas: vec![TransmitSnr::from_db(120.0)],
        placement: UePlacement::Fixed {
            x: vec![ue],
            y: vec![ue],
        },
        ..SimConfig::default()
    };
    let r = run_round_robin(&cfg).unwrap();
    let (x, y) = (r.sum_x[0], r.sum_y[0]);
    assert!(x.mean - y.mean > SIGMAS * x.std_error.hypot(y.std_error));
    for op in Operator::BOTH {
        let est = r.sum_se(op)[0];
        assert!(est.mean <= r.bound(op)[0] + 3.0 * est.std_error);
    }
}

#[test]
fn offsets_average_to_the_reflected_power() {
    let b = strong_irs();
    for n in [1, 8, 32] {
        let z = sample_offsets(&b, n, 200_000, &mut RngStream::new(9, n as u64)).unwrap();
        within(SeEstimate::from_samples(&z), n as f64 * b.beta_r);
    }
}

/// With `h_1 = h_d + S`, `S ~ CN(0, s)` independent of `h_d`, the paired
/// offset is negative with probability `(1 - sqrt(x / (x + 4))) / 2`,
/// `x = s / beta_d`.
fn paired_negative_probability(x: f64) -> f64 {
    0.5 * (1.0 - (x / (x + 4.0)).sqrt())
}

#[test]
fn negative_offset_probability_depends_on_pairing() {
    let (b, n) = many_weak_elements();
    let samples = 200_000;
    let p = CcdfParams::from_budget(&b, n);
    let x = n as f64 * p.beta_tilde;
    for (pairing, expected) in [
        (OffsetPairing::Paired, paired_negative_probability(x)),
        (OffsetPairing::Independent, 1.0 / (x + 2.0)),
    ] {
        let z = sample_offsets_with(&b, n, samples, &mut RngStream::new(5, 0), pairing).unwrap();
        let frac = z.iter().filter(|&&v| v < 0.0).count() as f64 / samples as f64;
        let se = (expected * (1.0 - expected) / samples as f64).sqrt();
        assert!(
            (frac - expected).abs() <= SIGMAS * se,
            "{pairing:?}: {frac} vs {expected}"
        );
    }
}

#[test]
fn independent_offsets_follow_the_closed_form() {
    let b = LinkBudget::new(1.0, 0.05, 0.05).unwrap();
    let n = 64;
    let p = CcdfParams::from_budget(&b, n);
    let z = sample_offsets_with(
        &b,
        n,
        100_000,
        &mut RngStream::new(6, 0),
        OffsetPairing::Independent,
    )
    .unwrap();
    let ks = ks_one_sample(&z, |v| ccdf_z(&p, v)).unwrap();
    assert!(ks < 0.01, "KS {ks}");
}

#[test]
fn paired_offsets_follow_the_correlated_law() {
    let b = LinkBudget::new(1.0, 0.05, 0.05).unwrap();
    let n = 64;
    let p = CcdfParams::from_budget(&b, n);
    let rho = rho12(n, b.beta_r, b.beta_d).sqrt();
    let sp = SimonParams::new(p.mu1(), p.mu2(), rho).unwrap();
    let z = sample_offsets(&b, n, 100_000, &mut RngStream::new(7, 0)).unwrap();
    let ks = ks_one_sample(&z, |v| 1.0 - simon_cdf(&sp, v)).unwrap();
    assert!(ks < 0.01, "KS {ks}");
    let naive = ks_one_sample(&z, |v| ccdf_z(&p, v)).unwrap();
    assert!(naive > ks);
}

#[test]
fn quadrature_agrees_with_closed_form() {
    for (m1, m2) in [(3.0, 1.0), (1.0, 1.0), (0.2, 5.0)] {
        for i in 0..64 {
            let z = -8.0 * m2 + (12.0 * m1 + 8.0 * m2) * i as f64 / 63.0;
            let d = (quadrature_ccdf_oracle(m1, m2, z) - ccdf_limit(m1, m2, z)).abs();
            assert!(d < 1e-9, "({m1}, {m2}) at {z}: {d}");
        }
    }
}

#[test]
fn bounds_scale_quadratically_and_linearly() {
    let (br, bd, g) = (1.0, 1e-6, 1e3);
    let pts = |f: fn(&OperatorParams) -> f64| -> Vec<(f64, f64)> {
        [256usize, 512, 1024, 2048]
            .iter()
            .map(|&n| {
                (
                    (n as f64).log2(),
                    f(&OperatorParams::new(n, br, bd, g).unwrap()),
                )
            })
            .collect()
    };
    let x = fit_slope(&pts(jensen_se_x)).unwrap();
    let y = fit_slope(&pts(jensen_se_y)).unwrap();
    assert!((x.slope - 2.0).abs() < 0.01, "{}", x.slope);
    assert!((y.slope - 1.0).abs() < 0.01, "{}", y.slope);
}
