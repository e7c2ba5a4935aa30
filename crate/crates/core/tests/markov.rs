use failover_lab::markov::{
    aggregate_check, aggregate_scale, calibrate_constant, run_chains, simulate_chain, ChainParams, MIN_HORIZON,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn binomial_pmf(n: u64, p: f64, k: u64) -> f64 {
    let coeff = (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
    coeff * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
}

#[test]
fn zero_stays_zero() {
    let p = ChainParams { trials: 200, ..ChainParams::new(1.5, 0.5, 0, 100) };
    let xs = simulate_chain(&p, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
    assert_eq!(xs.len(), 101);
    assert!(xs.iter().all(|&x| x == 0));
    let check = aggregate_check(&p, 0.01).unwrap();
    assert_eq!((check.exceedance, check.max_sum), (0.0, 0));
}

#[test]
fn parameter_errors() {
    assert!(ChainParams::new(2.0, 0.5, 1, 100).validate().is_err());
    assert!(ChainParams::new(1.5, 0.7, 1, 100).validate().is_err());
    assert!(ChainParams::new(0.0, 0.5, 1, 100).validate().is_err());
    assert!(ChainParams { pool_multiplier: 1, ..ChainParams::new(1.5, 0.5, 1, 100) }.validate().is_err());
    assert!(simulate_chain(&ChainParams::new(3.0, 0.5, 1, 10), &mut ChaCha8Rng::seed_from_u64(0)).is_err());
    let p = ChainParams::new(1.5, 0.5, 1, 100);
    assert!((p.gamma() - 1.0 / 0.75f64.sqrt()).abs() < 1e-12);
    assert_eq!((p.factor(1), p.factor(2)), (1.5, 0.5));
}

#[test]
fn short_horizons_are_out_of_range() {
    let check = aggregate_check(&ChainParams { trials: 10, ..ChainParams::new(1.5, 0.5, 1, MIN_HORIZON) }, 1.0).unwrap();
    assert!(!check.in_range);
    let check = aggregate_check(&ChainParams { trials: 10, ..ChainParams::new(1.5, 0.5, 1, MIN_HORIZON + 1) }, 1.0).unwrap();
    assert!(check.in_range);
}

#[test]
fn first_step_law_matches_the_pool_expansion() {
    // X_0 = 4 under φ = 3/2 with a pool of 3: X_1 ~ Bin(12, 1/2)
    let trials = 40_000;
    let p = ChainParams::new(1.5, 0.5, 4, 1);
    let mut counts = [0u64; 13];
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..trials {
        counts[simulate_chain(&p, &mut rng).unwrap()[1] as usize] += 1;
    }
    // chi-square over cells with expectation >= 5
    let mut chi2 = 0.0;
    let mut cells = 0;
    for (k, &c) in counts.iter().enumerate() {
        let e = trials as f64 * binomial_pmf(12, 0.5, k as u64);
        if e >= 5.0 {
            chi2 += (c as f64 - e).powi(2) / e;
            cells += 1;
        }
    }
    // 99.9% quantile of chi-square with 10 degrees of freedom is 29.6
    assert!(cells >= 11);
    assert!(chi2 < 29.6, "chi2 = {chi2}");

    // X_1 = 6 under ψ = 1/2: X_2 ~ Bin(6, 1/2) directly, never above 6
    let p = ChainParams::new(1.5, 0.5, 4, 2);
    for _ in 0..2000 {
        let xs = simulate_chain(&p, &mut rng).unwrap();
        assert!(xs[1] <= 12 && xs[2] <= xs[1]);
    }
}

#[test]
fn drift_per_parity() {
    let p = ChainParams { trials: 20_000, seed: 32, ..ChainParams::new(1.5, 0.5, 50, 6) };
    let run = run_chains(&p).unwrap();
    assert!((run.odd_ratio / 1.5 - 1.0).abs() < 0.02, "odd {}", run.odd_ratio);
    assert!((run.even_ratio / 0.5 - 1.0).abs() < 0.02, "even {}", run.even_ratio);
}

#[test]
fn runs_are_reproducible_across_pool_sizes() {
    let p = ChainParams { trials: 500, seed: 33, ..ChainParams::new(1.5, 0.5, 1, 100) };
    let a = run_chains(&p).unwrap();
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = single.install(|| run_chains(&p).unwrap());
    assert_eq!(a, b);
    let c = run_chains(&ChainParams { seed: 34, ..p }).unwrap();
    assert_ne!(a.sums, c.sums);
}

#[test]
fn calibration_arithmetic() {
    let run = run_chains(&ChainParams { trials: 100, seed: 35, ..ChainParams::new(1.5, 0.5, 1, 64) }).unwrap();
    let max = *run.sums.iter().max().unwrap() as f64;
    assert_eq!(aggregate_scale(64), 64.0 * 6.0);
    let c = calibrate_constant(&run, 64, 2.0);
    assert!((c * aggregate_scale(64) - 2.0 * max).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chains_never_jump_past_their_pool(seed in any::<u64>(), x0 in 0u64..50, r in 1u32..40) {
        let p = ChainParams::new(1.5, 0.5, x0, r);
        let xs = simulate_chain(&p, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(xs.len(), r as usize + 1);
        prop_assert_eq!(xs[0], x0);
        for i in 1..xs.len() {
            let cap = if i % 2 == 1 { 3 * xs[i - 1] } else { xs[i - 1] };
            prop_assert!(xs[i] <= cap);
        }
    }
}
