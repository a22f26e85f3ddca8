//! Solver-versus-oracle agreement for the ball adversary. The grid oracle
//! is the independent route; tolerances follow the oracle's lattice gap.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rmdp_core::lp::transport_ball_max;
use rmdp_core::testutil::{random_distribution, random_metric, random_payoff};
use rmdp_core::{
    brute_force_worst_case, worst_case_expectation, AmbiguitySpec, DistanceKind,
};

/// Per-kind radius sampler: keeps the ball well inside the regime where the
/// lattice oracle is sharp.
fn sample_radius<R: Rng>(rng: &mut R, kind: DistanceKind) -> f64 {
    let u: f64 = rng.gen();
    match kind {
        DistanceKind::Kl | DistanceKind::ChiSquared => 0.01 + 0.3 * u,
        DistanceKind::Hellinger => 0.02 + 0.5 * u,
        _ => 0.02 + 0.4 * u,
    }
}

#[test]
fn solvers_match_grid_oracle_on_random_triples() {
    let resolution = 2e-3;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for kind in DistanceKind::ALL {
        for case in 0..30 {
            let metric = random_metric(&mut rng, 3);
            let center = random_distribution(&mut rng, 3, 0.05);
            let payoff = random_payoff(&mut rng, 3, 1.0);
            let eps = sample_radius(&mut rng, kind);
            let spec =
                AmbiguitySpec::new(kind, center, eps, Some(metric)).unwrap();
            let solved = worst_case_expectation(&spec, &payoff).unwrap();
            let oracle = brute_force_worst_case(&spec, &payoff, resolution).unwrap();
            let range = payoff.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
                - payoff.iter().fold(f64::INFINITY, |m, &v| m.min(v));
            let tol = 3.0 * resolution * range + 1e-6;
            assert!(
                (solved.value - oracle).abs() <= tol,
                "{kind} case {case}: solver {} oracle {oracle} tol {tol}",
                solved.value
            );
        }
    }
}

#[test]
fn wasserstein_dual_value_matches_primal_lp() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..60 {
        let n = 2 + (rng.gen::<u32>() % 4) as usize; // 2..=5
        let metric = random_metric(&mut rng, n);
        let center = random_distribution(&mut rng, n, 0.0);
        let payoff = random_payoff(&mut rng, n, 2.0);
        let eps = 0.5 * rng.gen::<f64>();
        let spec = AmbiguitySpec::new(
            DistanceKind::Wasserstein,
            center.clone(),
            eps,
            Some(metric.clone()),
        )
        .unwrap();
        let dual = worst_case_expectation(&spec, &payoff).unwrap().value;
        let (primal, _) = transport_ball_max(&center, &metric, &payoff, eps).unwrap();
        assert!(
            (dual - primal).abs() <= 1e-8,
            "dual {dual} vs primal {primal}"
        );
    }
}

#[test]
fn kl_duality_sandwich() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..60 {
        let center = random_distribution(&mut rng, 4, 0.03);
        let payoff = random_payoff(&mut rng, 4, 3.0);
        let eps = 0.005 + 0.4 * rng.gen::<f64>();
        let spec = AmbiguitySpec::new(DistanceKind::Kl, center, eps, None).unwrap();
        let solved = worst_case_expectation(&spec, &payoff).unwrap();
        let primal = solved.witness.expectation(&payoff);
        assert!(primal <= solved.value + 1e-8);
        assert!(solved.value <= primal + 1e-8);
    }
}

#[test]
fn oracle_matches_tv_closed_form_example() {
    let spec = AmbiguitySpec::new(
        DistanceKind::Tv,
        rmdp_core::Distribution::new(vec![0.5, 0.5]).unwrap(),
        0.2,
        None,
    )
    .unwrap();
    let oracle = brute_force_worst_case(&spec, &[0.0, 1.0], 1e-3).unwrap();
    assert!((oracle - 0.7).abs() <= 2e-3);
}

#[test]
fn oracle_zero_radius_with_lattice_center() {
    let spec = AmbiguitySpec::new(
        DistanceKind::Tv,
        rmdp_core::Distribution::new(vec![0.25, 0.75]).unwrap(),
        0.0,
        None,
    )
    .unwrap();
    let g = [2.0, 1.0];
    let oracle = brute_force_worst_case(&spec, &g, 0.05).unwrap();
    assert!((oracle - 1.25).abs() <= 1e-12);
}
