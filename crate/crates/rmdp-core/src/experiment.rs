//! Monte-Carlo harness that checks the probabilistic guarantees end to end:
//! coverage of the out-of-sample value by the robust value, convergence of
//! both to the true optimum, the conditional rate bound, and the
//! out-of-distribution bound. Every trial is reproducible from
//! `(seed, schedule index, trial index)`.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adversary::AmbiguitySpec;
use crate::distance::{distance, DistanceKind, Metric};
use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::guarantees::{ood_bound, rate_bound, LipschitzProfile};
use crate::model::{evaluate_policy, value_iterate, EvalMode, MdpModel, ValueFunction};
use crate::radius::{
    bl_radius, calibrate_radius_mc, concentration_eta, prokhorov_radius, wasserstein_radius,
    ConcentrationParams,
};
use crate::robust::robust_value_iterate;

/// Slack for the deterministic coverage implication.
pub const COVERAGE_SLACK: f64 = 1e-8;

/// How the ambiguity radius is chosen per sample size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RadiusMode {
    /// A fixed radius, used for every sample size.
    Fixed(f64),
    /// Closed-form concentration radius (Wasserstein, bounded Lipschitz,
    /// and Prokhorov only).
    Formula(ConcentrationParams),
    /// Monte-Carlo quantile calibration with this many resampling trials.
    Calibrated { trials: u32 },
}

impl RadiusMode {
    fn describe(&self) -> String {
        match self {
            RadiusMode::Fixed(e) => format!("fixed({e})"),
            RadiusMode::Formula(p) => {
                format!("formula(m={}, a={}, c1={}, c2={})", p.m, p.a, p.c1, p.c2)
            }
            RadiusMode::Calibrated { trials } => format!("calibrated({trials})"),
        }
    }
}

/// Configuration of one experiment run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: DistanceKind,
    /// Distribution the disturbance samples are drawn from.
    pub true_dist: Distribution,
    pub radius_mode: RadiusMode,
    /// Schedule of sample sizes; single-entry for non-convergence runs.
    pub sample_sizes: Vec<u64>,
    /// Trials per sample size.
    pub trials: u32,
    pub gamma: f64,
    pub seed: u64,
    /// Solver tolerance for the robust and reference solves.
    pub tol: f64,
    /// Diagnostic override: use this center instead of the empirical
    /// distribution, isolating the statistical error (`None` in normal use).
    pub center_override: Option<Distribution>,
}

impl ExperimentConfig {
    fn validate(&self, model: &MdpModel) -> Result<()> {
        if self.true_dist.len() != model.n_disturbances() {
            return Err(Error::DimensionMismatch {
                expected: model.n_disturbances(),
                got: self.true_dist.len(),
            });
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter {
                reason: "at least one trial required".into(),
            });
        }
        if self.sample_sizes.is_empty() || self.sample_sizes.contains(&0) {
            return Err(Error::InvalidParameter {
                reason: "sample sizes must be nonempty and positive".into(),
            });
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::InvalidGamma { value: self.gamma });
        }
        if self.tol <= 0.0 {
            return Err(Error::InvalidTolerance { value: self.tol });
        }
        Ok(())
    }
}

/// One solved trial.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u32,
    pub n: u64,
    pub epsilon: f64,
    /// Distance from the sampling distribution to the empirical one.
    pub dist_mu_muhat: f64,
    /// Whether `d(μ, μ̂) ≤ ε`.
    pub premise: bool,
    /// Whether `J(π̂, x) ≤ J̃(x) + 1e-8` at every state.
    pub coverage_ok: bool,
    pub sup_gap_robust: f64,
    pub sup_gap_oos: f64,
    /// Rate or out-of-distribution bound, when the experiment asserts one.
    pub bound: Option<f64>,
    /// Whether the bound held; only evaluated on premise trials.
    pub bound_ok: Option<bool>,
    /// Per-atom sample counts of the drawn batch.
    pub sample_counts: Vec<u64>,
    pub wall_ms: f64,
}

/// Per-sample-size summary statistics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScheduleStat {
    pub n: u64,
    pub epsilon: f64,
    pub median_gap_robust: f64,
    pub median_gap_oos: f64,
}

/// Aggregated outcome of an experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Aggregate {
    pub trials_total: u32,
    pub coverage_rate: f64,
    pub premise_rate: f64,
    /// Premise-satisfying trials whose coverage failed; zero in every run
    /// unless the deterministic implication is broken.
    pub premise_coverage_violations: u32,
    /// Premise-satisfying trials whose asserted bound failed.
    pub bound_violations: u32,
    pub mean_gap_robust: f64,
    pub max_gap_robust: f64,
    pub mean_gap_oos: f64,
    pub max_gap_oos: f64,
    pub per_n: Vec<ScheduleStat>,
    /// `η(n, ε)` reference when the radius came from the formula.
    pub eta_reference: Option<f64>,
}

/// Full report: config echo, per-trial records, aggregates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub kind: String,
    pub radius_mode: String,
    pub sample_sizes: Vec<u64>,
    pub trials: u32,
    pub gamma: f64,
    pub seed: u64,
    pub tol: f64,
    pub records: Vec<TrialRecord>,
    pub aggregate: Aggregate,
    pub wall_ms_total: f64,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn metric_for(model: &MdpModel, kind: DistanceKind) -> Option<Metric> {
    kind.requires_metric().then(|| model.w_metric().clone())
}

fn radius_for(
    model: &MdpModel,
    config: &ExperimentConfig,
    n: u64,
    schedule_idx: usize,
) -> Result<f64> {
    match &config.radius_mode {
        RadiusMode::Fixed(eps) => {
            if *eps < 0.0 {
                return Err(Error::InvalidRadius { value: *eps });
            }
            Ok(*eps)
        }
        RadiusMode::Formula(params) => match config.kind {
            DistanceKind::Wasserstein => wasserstein_radius(n, config.gamma, params),
            DistanceKind::BoundedLipschitz => bl_radius(n, config.gamma, params),
            DistanceKind::Prokhorov => prokhorov_radius(n, config.gamma, params),
            other => Err(Error::InvalidParameter {
                reason: format!(
                    "no closed-form radius for `{other}`; use calibrated mode"
                ),
            }),
        },
        RadiusMode::Calibrated { trials } => {
            let cal_seed = splitmix64(config.seed ^ 0xC0C0_0000_0000_0001 ^ schedule_idx as u64);
            calibrate_radius_mc(
                config.kind,
                &config.true_dist,
                n,
                config.gamma,
                *trials,
                cal_seed,
                metric_for(model, config.kind).as_ref(),
            )
        }
    }
}

/// Reference optimum under `dist`: value iteration followed by exact
/// evaluation of the greedy policy, removing iteration error.
fn reference_optimum(model: &MdpModel, dist: &Distribution, tol: f64) -> Result<ValueFunction> {
    let solved = value_iterate(model, dist, tol.min(1e-10))?;
    evaluate_policy(model, dist, &solved.policy, EvalMode::Exact)
}

/// Bound asserted per trial, as a function of the radius.
enum BoundRule<'a> {
    None,
    Rate {
        profile: &'a LipschitzProfile,
    },
    Ood {
        profile: &'a LipschitzProfile,
        beta_gap: f64,
    },
}

fn run_experiment(
    name: &str,
    model: &MdpModel,
    config: &ExperimentConfig,
    eval_dist: &Distribution,
    bound_rule: BoundRule<'_>,
) -> Result<ExperimentReport> {
    config.validate(model)?;
    if eval_dist.len() != model.n_disturbances() {
        return Err(Error::DimensionMismatch {
            expected: model.n_disturbances(),
            got: eval_dist.len(),
        });
    }
    let start = Instant::now();
    let metric = metric_for(model, config.kind);
    let j_star = reference_optimum(model, eval_dist, config.tol)?;
    let mut records: Vec<TrialRecord> = Vec::new();
    let mut per_n: Vec<ScheduleStat> = Vec::new();
    let mut eta_reference = None;

    for (s, &n) in config.sample_sizes.iter().enumerate() {
        let epsilon = radius_for(model, config, n, s)?;
        if let RadiusMode::Formula(params) = &config.radius_mode {
            eta_reference = Some(concentration_eta(n, epsilon, params));
        }
        let mut gaps_robust = Vec::with_capacity(config.trials as usize);
        let mut gaps_oos = Vec::with_capacity(config.trials as usize);
        for t in 0..config.trials {
            let t_start = Instant::now();
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(((s as u64) << 32) | (t as u64 + 1));
            let samples = config.true_dist.sample_many(&mut rng, n as usize);
            let mut sample_counts = vec![0u64; model.n_disturbances()];
            for &w in &samples {
                sample_counts[w] += 1;
            }
            let empirical = Distribution::from_samples(&samples, model.n_disturbances())?;
            let center = config.center_override.clone().unwrap_or(empirical);
            let d = distance(config.kind, &config.true_dist, &center, metric.as_ref()).map_err(
                |e| Error::SolverFailure {
                    reason: format!("trial {t}: {e}"),
                },
            )?;
            let premise = d <= epsilon;
            let spec = AmbiguitySpec::new(config.kind, center, epsilon, metric.clone())?;
            let solved = robust_value_iterate(model, &spec, config.tol).map_err(|e| {
                Error::SolverFailure {
                    reason: format!("trial {t}: {e}"),
                }
            })?;
            let oos = evaluate_policy(model, eval_dist, &solved.policy, EvalMode::Exact)?;
            let coverage_ok = (0..model.n_states())
                .all(|x| oos.get(x) <= solved.value.get(x) + COVERAGE_SLACK);
            let sup_gap_robust = solved.value.sup_distance(&j_star);
            let sup_gap_oos = oos.sup_distance(&j_star);
            let (bound, bound_ok) = match &bound_rule {
                BoundRule::None => (None, None),
                BoundRule::Rate { profile } => {
                    let b = rate_bound(config.kind, epsilon, profile.delta_constant()?);
                    let ok = premise.then(|| {
                        coverage_ok
                            && (0..model.n_states())
                                .all(|x| solved.value.get(x) - j_star.get(x) <= b + COVERAGE_SLACK)
                    });
                    (Some(b), ok)
                }
                BoundRule::Ood { profile, beta_gap } => {
                    let b = ood_bound(config.kind, epsilon, *beta_gap, profile)?.total;
                    let ok = premise.then(|| {
                        (0..model.n_states())
                            .all(|x| oos.get(x) - j_star.get(x) <= b + COVERAGE_SLACK)
                    });
                    (Some(b), ok)
                }
            };
            gaps_robust.push(sup_gap_robust);
            gaps_oos.push(sup_gap_oos);
            records.push(TrialRecord {
                trial: t,
                n,
                epsilon,
                dist_mu_muhat: d,
                premise,
                coverage_ok,
                sup_gap_robust,
                sup_gap_oos,
                bound,
                bound_ok,
                sample_counts,
                wall_ms: t_start.elapsed().as_secs_f64() * 1e3,
            });
        }
        per_n.push(ScheduleStat {
            n,
            epsilon,
            median_gap_robust: median(&mut gaps_robust),
            median_gap_oos: median(&mut gaps_oos),
        });
    }

    let aggregate = aggregate(&records, per_n, eta_reference);
    Ok(ExperimentReport {
        experiment: name.to_string(),
        kind: config.kind.name().to_string(),
        radius_mode: config.radius_mode.describe(),
        sample_sizes: config.sample_sizes.clone(),
        trials: config.trials,
        gamma: config.gamma,
        seed: config.seed,
        tol: config.tol,
        records,
        aggregate,
        wall_ms_total: start.elapsed().as_secs_f64() * 1e3,
    })
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = values.len();
    if k == 0 {
        return f64::NAN;
    }
    if k % 2 == 1 {
        values[k / 2]
    } else {
        0.5 * (values[k / 2 - 1] + values[k / 2])
    }
}

fn aggregate(
    records: &[TrialRecord],
    per_n: Vec<ScheduleStat>,
    eta_reference: Option<f64>,
) -> Aggregate {
    let total = records.len() as u32;
    let covered = records.iter().filter(|r| r.coverage_ok).count();
    let premises = records.iter().filter(|r| r.premise).count();
    let violations = records
        .iter()
        .filter(|r| r.premise && !r.coverage_ok)
        .count() as u32;
    let bound_violations = records
        .iter()
        .filter(|r| r.bound_ok == Some(false))
        .count() as u32;
    let mean = |f: fn(&TrialRecord) -> f64| {
        records.iter().map(f).sum::<f64>() / total.max(1) as f64
    };
    let max = |f: fn(&TrialRecord) -> f64| records.iter().map(f).fold(0.0, f64::max);
    Aggregate {
        trials_total: total,
        coverage_rate: covered as f64 / total.max(1) as f64,
        premise_rate: premises as f64 / total.max(1) as f64,
        premise_coverage_violations: violations,
        bound_violations,
        mean_gap_robust: mean(|r| r.sup_gap_robust),
        max_gap_robust: max(|r| r.sup_gap_robust),
        mean_gap_oos: mean(|r| r.sup_gap_oos),
        max_gap_oos: max(|r| r.sup_gap_oos),
        per_n,
        eta_reference,
    }
}

/// Coverage experiment: estimates `P[J(π̂, x) ≤ J̃(x) ∀x]` by resampling,
/// recording the deterministic premise `d(μ, μ̂) ≤ ε` per trial.
pub fn coverage_experiment(model: &MdpModel, config: &ExperimentConfig) -> Result<ExperimentReport> {
    run_experiment("coverage", model, config, &config.true_dist, BoundRule::None)
}

/// Convergence experiment over a schedule of sample sizes with vanishing
/// radii; reports per-size medians of both sup-norm gaps.
pub fn convergence_experiment(
    model: &MdpModel,
    config: &ExperimentConfig,
) -> Result<ExperimentReport> {
    if config.sample_sizes.len() < 2 {
        return Err(Error::InvalidParameter {
            reason: "convergence experiment needs a schedule of at least two sample sizes".into(),
        });
    }
    // The trend statement needs radii that vanish along the schedule;
    // formula and calibrated radii do, a fixed positive radius does not.
    if let RadiusMode::Fixed(eps) = config.radius_mode {
        if eps > 0.0 {
            return Err(Error::InvalidParameter {
                reason: "convergence experiment requires a vanishing radius schedule".into(),
            });
        }
    }
    run_experiment(
        "convergence",
        model,
        config,
        &config.true_dist,
        BoundRule::None,
    )
}

/// Rate experiment: asserts the conditional bound
/// `J(π̂,x) − J*(x) ≤ J̃(x) − J*(x) ≤ 2ψ(ε)Δ` on every premise trial.
pub fn rate_experiment(
    model: &MdpModel,
    config: &ExperimentConfig,
    profile: &LipschitzProfile,
) -> Result<ExperimentReport> {
    profile.delta_constant()?;
    run_experiment(
        "rate",
        model,
        config,
        &config.true_dist,
        BoundRule::Rate { profile },
    )
}

/// Out-of-distribution experiment: samples come from the proxy
/// (`config.true_dist`), the policy is deployed under `deploy_dist`, and the
/// per-trial assertion is
/// `J_deploy(π̂,x) − J*_deploy(x) ≤ (2ψ(ε) + β(deploy, proxy))·Δ/(1−α)`.
pub fn ood_experiment(
    model: &MdpModel,
    config: &ExperimentConfig,
    deploy_dist: &Distribution,
    profile: &LipschitzProfile,
) -> Result<ExperimentReport> {
    let beta_gap = distance(
        DistanceKind::BoundedLipschitz,
        deploy_dist,
        &config.true_dist,
        Some(model.w_metric()),
    )?;
    run_experiment(
        "ood",
        model,
        config,
        deploy_dist,
        BoundRule::Ood { profile, beta_gap },
    )
}

/// Parameters of the inventory benchmark instance.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct InventoryParams {
    pub capacity: u32,
    pub demand_levels: u32,
    pub order_cost: f64,
    pub holding_cost: f64,
    pub shortage_cost: f64,
    pub alpha: f64,
}

/// Inventory control instance: stock levels `0..=capacity` as states,
/// order quantities as actions (admissible while the stock fits), demand
/// levels as disturbances, `F = clamp(x + a − w, 0, capacity)`, and
/// `c = order·a + holding·(x+a−w)⁺ + shortage·(w−x−a)⁺`. Both metrics are
/// absolute differences of indices, which makes the instance Lipschitz with
/// `L_F = 1`, so `α L_F < 1` holds for every discount.
pub fn inventory_instance(params: &InventoryParams) -> Result<MdpModel> {
    if params.capacity == 0 || params.demand_levels == 0 {
        return Err(Error::InvalidParameter {
            reason: "capacity and demand levels must be positive".into(),
        });
    }
    for (name, v) in [
        ("order_cost", params.order_cost),
        ("holding_cost", params.holding_cost),
        ("shortage_cost", params.shortage_cost),
    ] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter {
                reason: format!("{name} must be nonnegative, got {v}"),
            });
        }
    }
    let capacity = params.capacity as usize;
    let states: Vec<String> = (0..=capacity).map(|i| i.to_string()).collect();
    let actions: Vec<String> = (0..=capacity).map(|i| i.to_string()).collect();
    let admissible: Vec<Vec<usize>> = (0..=capacity)
        .map(|x| (0..=(capacity - x)).collect())
        .collect();
    let disturbances: Vec<String> = (0..params.demand_levels).map(|i| i.to_string()).collect();
    let order_cost = params.order_cost;
    let holding = params.holding_cost;
    let shortage = params.shortage_cost;
    MdpModel::from_fn(
        states,
        actions,
        admissible,
        disturbances,
        Metric::absolute_difference(params.demand_levels as usize),
        Some(Metric::absolute_difference(capacity + 1)),
        params.alpha,
        move |x, a, w| {
            let on_hand = (x + a) as f64 - w as f64;
            let next = on_hand.clamp(0.0, capacity as f64) as usize;
            let cost = order_cost * a as f64
                + holding * on_hand.max(0.0)
                + shortage * (-on_hand).max(0.0);
            (next, cost)
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::empirical::counterexample_model;
    use crate::guarantees::lipschitz_estimate;
    use crate::model::Policy;

    fn base_config(kind: DistanceKind, mode: RadiusMode) -> ExperimentConfig {
        ExperimentConfig {
            kind,
            true_dist: Distribution::bernoulli(0.5).unwrap(),
            radius_mode: mode,
            sample_sizes: vec![20],
            trials: 40,
            gamma: 0.1,
            seed: 77,
            tol: 1e-9,
            center_override: None,
        }
    }

    #[test]
    fn reports_are_seed_reproducible() {
        let model = counterexample_model(0.9).unwrap();
        let config = base_config(DistanceKind::Tv, RadiusMode::Calibrated { trials: 200 });
        let a = coverage_experiment(&model, &config).unwrap();
        let b = coverage_experiment(&model, &config).unwrap();
        assert_eq!(a.records.len(), b.records.len());
        for (ra, rb) in a.records.iter().zip(&b.records) {
            assert_eq!(ra.epsilon, rb.epsilon);
            assert_eq!(ra.dist_mu_muhat, rb.dist_mu_muhat);
            assert_eq!(ra.sup_gap_robust, rb.sup_gap_robust);
            assert_eq!(ra.sup_gap_oos, rb.sup_gap_oos);
            assert_eq!(ra.sample_counts, rb.sample_counts);
        }
    }

    #[test]
    fn huge_radius_gives_full_coverage() {
        let model = counterexample_model(0.9).unwrap();
        let config = base_config(DistanceKind::Tv, RadiusMode::Fixed(5.0));
        let report = coverage_experiment(&model, &config).unwrap();
        assert_eq!(report.aggregate.coverage_rate, 1.0);
        assert_eq!(report.aggregate.premise_coverage_violations, 0);
    }

    #[test]
    fn premise_always_implies_coverage() {
        let model = counterexample_model(0.9).unwrap();
        for kind in [DistanceKind::Tv, DistanceKind::Wasserstein] {
            let mut config = base_config(kind, RadiusMode::Calibrated { trials: 150 });
            config.trials = 60;
            let report = coverage_experiment(&model, &config).unwrap();
            assert_eq!(report.aggregate.premise_coverage_violations, 0, "{kind}");
        }
    }

    #[test]
    fn center_override_with_zero_radius_has_zero_gap() {
        let model = counterexample_model(0.9).unwrap();
        let mut config = base_config(DistanceKind::Tv, RadiusMode::Fixed(0.0));
        config.center_override = Some(config.true_dist.clone());
        config.sample_sizes = vec![5, 10];
        config.trials = 5;
        let report = convergence_experiment(&model, &config).unwrap();
        for stat in &report.aggregate.per_n {
            assert!(stat.median_gap_robust < 1e-8);
            assert!(stat.median_gap_oos < 1e-8);
        }
    }

    #[test]
    fn zero_radius_coverage_matches_exact_enumeration() {
        // With ε = 0 the ball is the singleton {μ̂}; on a generic model the
        // coverage event then requires μ̂ to reproduce μ well enough, and at
        // n = 2 the four equally weighted sample paths can be enumerated.
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let (model, _) = crate::testutil::random_model(&mut rng, 3, 2, 2);
        let mu = Distribution::bernoulli(0.5).unwrap();
        let mut expected: f64 = 0.0;
        let mut any_violation = false;
        for outcome in [[0usize, 0], [0, 1], [1, 0], [1, 1]] {
            let empirical = Distribution::from_samples(&outcome, 2).unwrap();
            let spec = AmbiguitySpec::new(DistanceKind::Tv, empirical.clone(), 0.0, None).unwrap();
            let solved = robust_value_iterate(&model, &spec, 1e-11).unwrap();
            let oos = evaluate_policy(&model, &mu, &solved.policy, EvalMode::Exact).unwrap();
            let covered =
                (0..3).all(|x| oos.get(x) <= solved.value.get(x) + COVERAGE_SLACK);
            if covered {
                expected += 0.25;
            } else {
                any_violation = true;
            }
            if crate::distance::total_variation(&mu, &empirical) == 0.0 {
                assert!(covered, "premise outcome must be covered");
            }
        }
        assert!(any_violation, "model too degenerate for this check");
        let config = ExperimentConfig {
            kind: DistanceKind::Tv,
            true_dist: mu,
            radius_mode: RadiusMode::Fixed(0.0),
            sample_sizes: vec![2],
            trials: 400,
            gamma: 0.1,
            seed: 62,
            tol: 1e-11,
            center_override: None,
        };
        let report = coverage_experiment(&model, &config).unwrap();
        let sigma = (expected * (1.0 - expected) / 400.0).sqrt();
        assert!(
            (report.aggregate.coverage_rate - expected).abs() <= 3.0 * sigma + 1e-9,
            "empirical {} vs enumerated {expected}",
            report.aggregate.coverage_rate
        );
        assert_eq!(report.aggregate.premise_coverage_violations, 0);
    }

    #[test]
    fn formula_mode_rejects_divergence_kinds() {
        let model = counterexample_model(0.9).unwrap();
        let params = ConcentrationParams::new(3, 3.0, 2.0, 1.0).unwrap();
        let config = base_config(DistanceKind::Kl, RadiusMode::Formula(params));
        assert!(coverage_experiment(&model, &config).is_err());
    }

    #[test]
    fn formula_mode_reports_eta_reference() {
        let model = counterexample_model(0.9).unwrap();
        let params = ConcentrationParams::new(3, 3.0, 2.0, 1.0).unwrap();
        let mut config = base_config(DistanceKind::Wasserstein, RadiusMode::Formula(params));
        config.trials = 30;
        let report = coverage_experiment(&model, &config).unwrap();
        let eps = report.records[0].epsilon;
        let eta = report.aggregate.eta_reference.unwrap();
        assert_eq!(eta, crate::radius::concentration_eta(20, eps, &params));
        // the formula radius at these defaults is generous on a two-point
        // support, so the premise holds in every trial
        assert_eq!(report.aggregate.premise_rate, 1.0);
        assert_eq!(report.aggregate.premise_coverage_violations, 0);
    }

    #[test]
    fn convergence_rejects_fixed_positive_radius() {
        let model = counterexample_model(0.9).unwrap();
        let mut config = base_config(DistanceKind::Tv, RadiusMode::Fixed(0.2));
        config.sample_sizes = vec![10, 100];
        assert!(convergence_experiment(&model, &config).is_err());
    }

    #[test]
    fn rate_experiment_has_zero_violations_on_inventory() {
        let model = inventory_instance(&InventoryParams {
            capacity: 3,
            demand_levels: 3,
            order_cost: 1.0,
            holding_cost: 0.5,
            shortage_cost: 2.0,
            alpha: 0.5,
        })
        .unwrap();
        let profile = lipschitz_estimate(&model).unwrap();
        let mut config = base_config(DistanceKind::Wasserstein, RadiusMode::Calibrated {
            trials: 150,
        });
        config.true_dist = Distribution::new(vec![0.5, 0.3, 0.2]).unwrap();
        config.trials = 25;
        let report = rate_experiment(&model, &config, &profile).unwrap();
        assert_eq!(report.aggregate.bound_violations, 0);
        assert!(report.aggregate.premise_rate > 0.5);
    }

    #[test]
    fn rate_with_forced_true_center_and_zero_radius() {
        // With the center pinned to μ and ε = 0, the premise holds with
        // distance exactly zero and both gaps vanish, so the zero bound is
        // met with equality. An inflated Lipschitz profile only loosens it.
        let model = inventory_instance(&InventoryParams {
            capacity: 2,
            demand_levels: 2,
            order_cost: 1.0,
            holding_cost: 0.5,
            shortage_cost: 2.0,
            alpha: 0.5,
        })
        .unwrap();
        let mut config = base_config(DistanceKind::Wasserstein, RadiusMode::Fixed(0.0));
        config.true_dist = Distribution::uniform(2);
        config.center_override = Some(config.true_dist.clone());
        config.trials = 10;
        let profile = lipschitz_estimate(&model).unwrap();
        let report = rate_experiment(&model, &config, &profile).unwrap();
        assert_eq!(report.aggregate.premise_rate, 1.0);
        assert_eq!(report.aggregate.bound_violations, 0);
        assert!(report.aggregate.max_gap_oos <= 1e-9);

        let inflated = crate::guarantees::LipschitzProfile::new(
            profile.c_sup,
            2.0 * profile.l_c + 1.0,
            profile.l_f,
            profile.alpha,
        )
        .unwrap();
        let report = rate_experiment(&model, &config, &inflated).unwrap();
        assert_eq!(report.aggregate.bound_violations, 0);
    }

    #[test]
    fn ood_on_counterexample_with_shifted_deployment() {
        let model = counterexample_model(0.9).unwrap();
        let profile = lipschitz_estimate(&model).unwrap();
        let mut config = base_config(DistanceKind::Tv, RadiusMode::Calibrated { trials: 200 });
        config.trials = 200;
        config.sample_sizes = vec![30];
        let deploy = Distribution::bernoulli(0.6).unwrap();
        let report = ood_experiment(&model, &config, &deploy, &profile).unwrap();
        assert_eq!(report.aggregate.bound_violations, 0);
        assert_eq!(report.aggregate.premise_coverage_violations, 0);
        // the reported bound decomposes through the bounded-Lipschitz gap
        // between deployment and proxy distributions
        let beta_gap = distance(
            DistanceKind::BoundedLipschitz,
            &deploy,
            &config.true_dist,
            Some(model.w_metric()),
        )
        .unwrap();
        let eps = report.records[0].epsilon;
        let expected = crate::guarantees::ood_bound(DistanceKind::Tv, eps, beta_gap, &profile)
            .unwrap()
            .total;
        assert!((report.records[0].bound.unwrap() - expected).abs() <= 1e-12);
    }

    #[test]
    fn ood_with_matching_distributions_reduces_to_rate() {
        let model = counterexample_model(0.5).unwrap();
        let profile = lipschitz_estimate(&model).unwrap();
        let config = base_config(DistanceKind::Tv, RadiusMode::Calibrated { trials: 150 });
        let deploy = config.true_dist.clone();
        let report = ood_experiment(&model, &config, &deploy, &profile).unwrap();
        assert_eq!(report.aggregate.bound_violations, 0);
        // β gap of identical distributions vanishes, so the bound matches
        // the rate bound scaled by 1/(1−α).
        let eps = report.records[0].epsilon;
        let expected =
            rate_bound(DistanceKind::Tv, eps, profile.delta_constant().unwrap()) / (1.0 - 0.5);
        assert!((report.records[0].bound.unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn inventory_zero_costs_solve_to_zero() {
        let model = inventory_instance(&InventoryParams {
            capacity: 2,
            demand_levels: 2,
            order_cost: 0.0,
            holding_cost: 0.0,
            shortage_cost: 0.0,
            alpha: 0.6,
        })
        .unwrap();
        let solved = value_iterate(&model, &Distribution::uniform(2), 1e-10).unwrap();
        assert!(solved.value.sup_norm() < 1e-12);
    }

    #[test]
    fn inventory_avoids_ordering_when_holding_dominates() {
        let model = inventory_instance(&InventoryParams {
            capacity: 3,
            demand_levels: 1, // demand is always zero
            order_cost: 1.0,
            holding_cost: 2.0,
            shortage_cost: 0.0,
            alpha: 0.9,
        })
        .unwrap();
        let dist = Distribution::new(vec![1.0]).unwrap();
        let solved = value_iterate(&model, &dist, 1e-10).unwrap();
        // With zero demand and positive holding cost, never order.
        for x in 0..model.n_states() {
            assert_eq!(solved.policy.action(x), 0);
        }
        assert!(solved.value.get(0) < 1e-9);
    }

    #[test]
    fn inventory_small_instance_matches_policy_enumeration() {
        let model = inventory_instance(&InventoryParams {
            capacity: 2,
            demand_levels: 2,
            order_cost: 1.0,
            holding_cost: 0.5,
            shortage_cost: 3.0,
            alpha: 0.8,
        })
        .unwrap();
        let dist = Distribution::uniform(2);
        let solved = value_iterate(&model, &dist, 1e-11).unwrap();
        // brute force over all deterministic policies (3 * 2 * 1 = 6)
        let mut best = vec![f64::INFINITY; model.n_states()];
        for a0 in model.admissible(0) {
            for a1 in model.admissible(1) {
                for a2 in model.admissible(2) {
                    let policy = Policy::new(vec![*a0, *a1, *a2], &model).unwrap();
                    let value = evaluate_policy(&model, &dist, &policy, EvalMode::Exact).unwrap();
                    for x in 0..3 {
                        best[x] = best[x].min(value.get(x));
                    }
                }
            }
        }
        for x in 0..3 {
            assert!((solved.value.get(x) - best[x]).abs() < 1e-9);
        }
    }
}
