use irs_oob::analytics::{
    ccdf_z, jensen_se_x, jensen_se_y, simon_cdf, CcdfParams, OperatorParams, SimonParams,
};
use irs_oob::channel::sample_fading;
use irs_oob::geometry::{path_loss, LinkBudget, PathLossParams};
use irs_oob::irs::{
    beamformed_gain, effective_channel, optimal_phases, random_phases, snr_and_rate, PhaseConfig,
};
use irs_oob::montecarlo::round_robin_counts;
use irs_oob::rng::{stream_id, RngStream};
use irs_oob::stats::empirical_ccdf;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn budget() -> impl Strategy<Value = LinkBudget> {
    (1e-12f64..1.0, 1e-12f64..1.0, 1e-12f64..1.0)
        .prop_map(|(d, f, g)| LinkBudget::new(d, f, g).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn path_loss_decreases_with_distance(alpha in 0.5f64..5.0, d in 1e-3f64..1e4, k in 1.001f64..10.0) {
        let p = PathLossParams::default();
        prop_assert!(path_loss(&p, alpha, d * k).unwrap() < path_loss(&p, alpha, d).unwrap());
    }

    #[test]
    fn aligned_phases_are_never_beaten(b in budget(), n in 0usize..48, seed: u64) {
        let mut rng = RngStream::new(seed, 0);
        let draw = sample_fading(&b, n, &mut rng);
        let best = effective_channel(&draw, &optimal_phases(&draw)).unwrap().gain();
        prop_assert!((best.sqrt() - beamformed_gain(&draw)).abs() <= 1e-9 * best.sqrt());
        for _ in 0..20 {
            let other = effective_channel(&draw, &random_phases(n, &mut rng)).unwrap().gain();
            prop_assert!(other <= best * (1.0 + 1e-12));
        }
    }

    #[test]
    fn effective_channel_is_the_reflected_sum(b in budget(), n in 0usize..32, seed: u64) {
        let mut rng = RngStream::new(seed, 1);
        let draw = sample_fading(&b, n, &mut rng);
        let theta: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 20.0 - 10.0).collect();
        let h = effective_channel(&draw, &PhaseConfig::new(theta.clone())).unwrap().0;
        let direct = theta.iter().enumerate().fold(draw.h_d, |acc, (i, t)| {
            acc + draw.f[i] * draw.g[i] * Complex64::from_polar(1.0, *t)
        });
        prop_assert!((h - direct).norm() <= 1e-9 * (direct.norm() + draw.h_d.norm() + 1e-300));
    }

    #[test]
    fn beamformed_gain_ignores_a_common_rotation(b in budget(), n in 1usize..32, phi in -10.0f64..10.0, seed: u64) {
        let draw = sample_fading(&b, n, &mut RngStream::new(seed, 2));
        let rotated = draw.scaled(Complex64::from_polar(1.0, phi));
        let (a, r) = (beamformed_gain(&draw), beamformed_gain(&rotated));
        prop_assert!((a - r).abs() <= 1e-12 * a);
    }

    #[test]
    fn rate_grows_with_snr(re in -1e3f64..1e3, im in -1e3f64..1e3, g in 1e-6f64..1e12, k in 1.01f64..100.0) {
        let h = irs_oob::irs::EffectiveChannel(Complex64::new(re, im));
        prop_assume!(h.gain() > 0.0);
        let (s1, r1) = snr_and_rate(&h, g);
        let (s2, r2) = snr_and_rate(&h, g * k);
        prop_assert!(s2 > s1 && r2 >= r1);
    }

    #[test]
    fn empirical_ccdf_never_increases(xs in prop::collection::vec(-1e3f64..1e3, 1..300), lo in -2e3f64..0.0, width in 1.0f64..4e3) {
        let grid: Vec<f64> = (0..64).map(|i| lo + width * i as f64 / 63.0).collect();
        let e = empirical_ccdf(&xs, &grid).unwrap();
        prop_assert!(e.survival.windows(2).all(|w| w[1] <= w[0]));
        prop_assert!(e.survival.iter().all(|s| (0.0..=1.0).contains(s)));
    }

    #[test]
    fn offset_law_is_monotone_in_z_and_n(bt in 1e-6f64..10.0, bd in 1e-12f64..1.0, n in 1usize..512, z1 in -20.0f64..20.0, dz in 0.0f64..20.0) {
        let small = CcdfParams::new(n, bt, bd).unwrap();
        let large = CcdfParams::new(n + 1, bt, bd).unwrap();
        let (a, b) = (z1 * bd, (z1 + dz) * bd);
        prop_assert!(ccdf_z(&small, b) <= ccdf_z(&small, a) + 1e-15);
        prop_assert!(ccdf_z(&large, a) >= ccdf_z(&small, a) - 1e-15);
    }

    #[test]
    fn simon_cdf_is_a_cdf(mu2 in 0.1f64..10.0, ratio in 1.0f64..50.0, rho in 0.0f64..0.99, z1 in -50.0f64..50.0, dz in 0.0f64..50.0) {
        let sp = SimonParams::new(mu2 * ratio, mu2, rho).unwrap();
        let (a, b) = (simon_cdf(&sp, z1), simon_cdf(&sp, z1 + dz));
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&a));
        prop_assert!(b >= a - 1e-12);
    }

    #[test]
    fn owner_bound_dominates_other_operator(n in 0usize..1024, br in 1e-15f64..1.0, bd in 1e-15f64..1.0, g in 1.0f64..1e16) {
        let p = OperatorParams::new(n, br, bd, g).unwrap();
        prop_assert!(jensen_se_x(&p) >= jensen_se_y(&p) - 1e-12);
    }

    #[test]
    fn round_robin_is_fair(slots in 1usize..5000, users in 1usize..64) {
        prop_assume!(slots >= users);
        let c = round_robin_counts(slots, users);
        prop_assert_eq!(c.iter().sum::<usize>(), slots);
        prop_assert!(c.iter().all(|&k| k == slots / users || k == slots.div_ceil(users)));
    }

    #[test]
    fn streams_are_reproducible_and_distinct(seed: u64, a in 0u64..1000, b in 0u64..1000) {
        let draw = |s: u64| -> [u64; 4] {
            let mut r = RngStream::new(seed, s);
            [r.random(), r.random(), r.random(), r.random()]
        };
        prop_assert_eq!(draw(stream_id(&[a, b])), draw(stream_id(&[a, b])));
        if a != b {
            prop_assert_ne!(draw(stream_id(&[a, b])), draw(stream_id(&[b, a])));
        }
    }
}
