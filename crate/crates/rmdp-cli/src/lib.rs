//! Command-line front end: solve and robust-solve models, evaluate policies,
//! query distances and worst cases, compute radii and guarantee bounds, and
//! run the seeded Monte-Carlo experiments with JSON/CSV report output.
//!
//! Exit codes: 0 success, 1 validation/usage error, 2 solver failure.
//! All numeric output is printed with 12 significant digits. Experiment
//! subcommands require an explicit `--seed`; reruns with identical flags and
//! seed produce identical reports (wall times aside).

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use rmdp_core::io::{self, sig12, ModelDocument};
use rmdp_core::{
    brute_force_worst_case, convergence_experiment, counterexample_coverage_exact,
    counterexample_model, coverage_experiment, distance, evaluate_policy, inventory_instance,
    lipschitz_estimate, ood_bound, ood_experiment, radius_window, rate_bound, rate_experiment,
    robust_value_iterate, sample_complexity, value_iterate, verify_robust_optimal, AmbiguitySpec,
    ConcentrationParams, DistanceKind, Distribution, Error, EvalMode, ExperimentConfig,
    ExperimentReport, InventoryParams, MdpModel, Policy, RadiusMode,
};

#[derive(Parser)]
#[command(
    name = "rmdp",
    about = "Data-driven distance-based robust MDPs on finite spaces",
    long_about = None,
    disable_help_subcommand = true
)]
struct Cli {
    /// Model file (JSON).
    #[arg(long, global = true)]
    model: Option<PathBuf>,
    /// Output path; experiments write <out>.json and <out>.csv.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// RNG seed; mandatory for experiment subcommands.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Solver tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct DistanceArgs {
    /// Distance kind: tv, hellinger, kl, chi2, wasserstein, bl, prokhorov.
    /// Prokhorov values are resolved by bisection to 1e-9 absolute.
    #[arg(long)]
    distance: String,
    /// Ambiguity radius (fixed radius mode).
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Args, Clone)]
struct ExperimentArgs {
    /// Sample size(s), comma separated for schedules.
    #[arg(long)]
    samples: String,
    /// Monte-Carlo trials per sample size.
    #[arg(long)]
    trials: u32,
    /// Confidence parameter in (0,1).
    #[arg(long, default_value_t = 0.1)]
    gamma: f64,
    /// Radius selection: fixed, formula, or calibrated.
    #[arg(long, default_value = "calibrated")]
    radius_mode: String,
    /// Calibration resamplings (calibrated mode).
    #[arg(long, default_value_t = 1000)]
    cal_trials: u32,
    /// Concentration constant c1 (formula mode).
    #[arg(long, default_value_t = 2.0)]
    c1: f64,
    /// Concentration constant c2 (formula mode).
    #[arg(long, default_value_t = 1.0)]
    c2: f64,
    /// Disturbance dimension m (formula mode).
    #[arg(long, default_value_t = 3)]
    dim_m: u32,
    /// Light-tail exponent a (formula mode).
    #[arg(long, default_value_t = 3.0)]
    tail_a: f64,
    /// Override of the sampling distribution (defaults to the model file's
    /// true_dist).
    #[arg(long)]
    true_dist: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the MDP under its stored true distribution.
    Solve,
    /// Solve the robust MDP with the ball centered at the stored true
    /// distribution.
    RobustSolve {
        #[command(flatten)]
        dist: DistanceArgs,
    },
    /// Evaluate a stationary policy under the stored true distribution.
    Evaluate {
        /// Comma-separated action indices, one per state.
        #[arg(long)]
        policy: String,
        /// exact (linear solve) or iterative.
        #[arg(long, default_value = "exact")]
        mode: String,
    },
    /// Distance between two distributions.
    Distance {
        #[command(flatten)]
        dist: DistanceArgs,
        /// First distribution, comma separated.
        #[arg(long)]
        nu: String,
        /// Second distribution (reference for kl/chi2).
        #[arg(long)]
        rho: String,
    },
    /// Worst-case expectation of a payoff vector over an ambiguity ball.
    WorstCase {
        #[command(flatten)]
        dist: DistanceArgs,
        /// Ball center, comma separated.
        #[arg(long)]
        center: String,
        /// Payoff vector, comma separated.
        #[arg(long)]
        payoff: String,
        /// Also run the grid oracle at this resolution.
        #[arg(long)]
        oracle_resolution: Option<f64>,
    },
    /// Ambiguity radius from the concentration formula or calibration.
    Radius {
        #[command(flatten)]
        dist: DistanceArgs,
        #[arg(long)]
        samples: u64,
        #[arg(long, default_value_t = 0.1)]
        gamma: f64,
        #[arg(long, default_value = "formula")]
        radius_mode: String,
        #[arg(long, default_value_t = 1000)]
        cal_trials: u32,
        #[arg(long, default_value_t = 2.0)]
        c1: f64,
        #[arg(long, default_value_t = 1.0)]
        c2: f64,
        #[arg(long, default_value_t = 3)]
        dim_m: u32,
        #[arg(long, default_value_t = 3.0)]
        tail_a: f64,
    },
    /// Lipschitz profile, Δ constant, rate bound, radius window, sample
    /// complexity, and out-of-distribution bound for a model.
    Guarantees {
        #[command(flatten)]
        dist: DistanceArgs,
        /// Target suboptimality gap δ.
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        #[arg(long, default_value_t = 0.1)]
        gamma: f64,
        /// Sample size for the radius window.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 2.0)]
        c1: f64,
        #[arg(long, default_value_t = 1.0)]
        c2: f64,
        #[arg(long, default_value_t = 3)]
        dim_m: u32,
        #[arg(long, default_value_t = 3.0)]
        tail_a: f64,
        /// β gap for the out-of-distribution bound.
        #[arg(long)]
        beta_gap: Option<f64>,
    },
    /// Coverage experiment: P[J(π̂,x) ≤ J̃(x) ∀x] by resampling.
    Coverage {
        #[command(flatten)]
        dist: DistanceArgs,
        #[command(flatten)]
        exp: ExperimentArgs,
    },
    /// Convergence experiment over a schedule of sample sizes.
    Convergence {
        #[command(flatten)]
        dist: DistanceArgs,
        #[command(flatten)]
        exp: ExperimentArgs,
    },
    /// Rate experiment: conditional bound 2ψ(ε)Δ per premise trial.
    Rate {
        #[command(flatten)]
        dist: DistanceArgs,
        #[command(flatten)]
        exp: ExperimentArgs,
    },
    /// Out-of-distribution experiment: samples from the proxy, deployment
    /// under --deploy.
    Ood {
        #[command(flatten)]
        dist: DistanceArgs,
        #[command(flatten)]
        exp: ExperimentArgs,
        /// Deployment distribution, comma separated.
        #[arg(long)]
        deploy: String,
    },
    /// Exact empirical-MDP coverage probabilities on the counterexample.
    Counterexample {
        /// Print rows for N = 1..=max_n.
        #[arg(long, default_value_t = 12)]
        max_n: u32,
        /// Write the counterexample model file here.
        #[arg(long)]
        emit_model: Option<PathBuf>,
        /// Discount for the emitted model.
        #[arg(long, default_value_t = 0.9)]
        alpha: f64,
    },
    /// Write an inventory-control benchmark model.
    GenerateInventory {
        #[arg(long)]
        capacity: u32,
        #[arg(long)]
        demand_levels: u32,
        #[arg(long, default_value_t = 1.0)]
        order_cost: f64,
        #[arg(long, default_value_t = 0.5)]
        holding_cost: f64,
        #[arg(long, default_value_t = 2.0)]
        shortage_cost: f64,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        /// Stored sampling distribution over the demand levels.
        #[arg(long)]
        true_dist: Option<String>,
    },
}

/// Entry point used by both `main` and the test suites.
pub fn run_cli(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            // help/version requests are successful exits
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::SolverFailure { .. } => 2,
                _ => 1,
            }
        }
    }
}

fn parse_f64_list(text: &str, what: &str) -> Result<Vec<f64>, Error> {
    text.split(',')
        .map(|s| {
            s.trim().parse::<f64>().map_err(|_| Error::InvalidParameter {
                reason: format!("{what}: cannot parse `{s}` as a number"),
            })
        })
        .collect()
}

fn parse_u64_list(text: &str, what: &str) -> Result<Vec<u64>, Error> {
    text.split(',')
        .map(|s| {
            s.trim().parse::<u64>().map_err(|_| Error::InvalidParameter {
                reason: format!("{what}: cannot parse `{s}` as an integer"),
            })
        })
        .collect()
}

fn parse_dist(text: &str, what: &str) -> Result<Distribution, Error> {
    Distribution::new(parse_f64_list(text, what)?)
}

struct LoadedModel {
    model: MdpModel,
    true_dist: Option<Distribution>,
}

fn require_model(path: &Option<PathBuf>) -> Result<LoadedModel, Error> {
    let path = path.as_ref().ok_or(Error::InvalidParameter {
        reason: "--model is required for this subcommand".into(),
    })?;
    let ModelDocument { model, true_dist } = io::load_model(path)?;
    Ok(LoadedModel { model, true_dist })
}

fn require_true_dist(loaded: &LoadedModel, override_text: Option<&str>) -> Result<Distribution, Error> {
    if let Some(text) = override_text {
        let d = parse_dist(text, "--true-dist")?;
        if d.len() != loaded.model.n_disturbances() {
            return Err(Error::DimensionMismatch {
                expected: loaded.model.n_disturbances(),
                got: d.len(),
            });
        }
        return Ok(d);
    }
    loaded.true_dist.clone().ok_or(Error::ModelFile {
        field: "true_dist",
        reason: "missing (required by this subcommand; pass --true-dist to override)".into(),
    })
}

fn require_seed(seed: Option<u64>) -> Result<u64, Error> {
    seed.ok_or(Error::InvalidParameter {
        reason: "--seed is mandatory for experiment subcommands".into(),
    })
}

fn ambiguity_for(
    model: &MdpModel,
    kind: DistanceKind,
    center: Distribution,
    epsilon: f64,
) -> Result<AmbiguitySpec, Error> {
    let metric = kind.requires_metric().then(|| model.w_metric().clone());
    AmbiguitySpec::new(kind, center, epsilon, metric)
}

fn radius_mode_from(exp: &ExperimentArgs, dist: &DistanceArgs) -> Result<RadiusMode, Error> {
    match exp.radius_mode.as_str() {
        "fixed" => {
            let eps = dist.epsilon.ok_or(Error::InvalidParameter {
                reason: "--epsilon is required with --radius-mode fixed".into(),
            })?;
            Ok(RadiusMode::Fixed(eps))
        }
        "formula" => Ok(RadiusMode::Formula(ConcentrationParams::new(
            exp.dim_m, exp.tail_a, exp.c1, exp.c2,
        )?)),
        "calibrated" => Ok(RadiusMode::Calibrated {
            trials: exp.cal_trials,
        }),
        other => Err(Error::InvalidParameter {
            reason: format!("unknown radius mode `{other}`"),
        }),
    }
}

fn experiment_config(
    loaded: &LoadedModel,
    dist: &DistanceArgs,
    exp: &ExperimentArgs,
    seed: Option<u64>,
    tol: f64,
) -> Result<ExperimentConfig, Error> {
    Ok(ExperimentConfig {
        kind: DistanceKind::parse(&dist.distance)?,
        true_dist: require_true_dist(loaded, exp.true_dist.as_deref())?,
        radius_mode: radius_mode_from(exp, dist)?,
        sample_sizes: parse_u64_list(&exp.samples, "--samples")?,
        trials: exp.trials,
        gamma: exp.gamma,
        seed: require_seed(seed)?,
        tol,
        center_override: None,
    })
}

fn print_solution(
    out: &mut dyn Write,
    model: &MdpModel,
    value: &rmdp_core::ValueFunction,
    policy: &Policy,
    iterations: usize,
) -> std::io::Result<()> {
    for x in 0..model.n_states() {
        writeln!(
            out,
            "state {}: value {} action {}",
            model.state_labels()[x],
            sig12(value.get(x)),
            model.action_labels()[policy.action(x)],
        )?;
    }
    writeln!(out, "iterations {iterations}")
}

fn print_report_summary(out: &mut dyn Write, report: &ExperimentReport) -> std::io::Result<()> {
    let agg = &report.aggregate;
    writeln!(out, "experiment {}", report.experiment)?;
    writeln!(out, "trials {}", agg.trials_total)?;
    writeln!(out, "coverage_rate {}", sig12(agg.coverage_rate))?;
    writeln!(out, "premise_rate {}", sig12(agg.premise_rate))?;
    writeln!(
        out,
        "premise_coverage_violations {}",
        agg.premise_coverage_violations
    )?;
    writeln!(out, "bound_violations {}", agg.bound_violations)?;
    writeln!(out, "mean_gap_robust {}", sig12(agg.mean_gap_robust))?;
    writeln!(out, "mean_gap_oos {}", sig12(agg.mean_gap_oos))?;
    for stat in &agg.per_n {
        writeln!(
            out,
            "n {} epsilon {} median_gap_robust {} median_gap_oos {}",
            stat.n,
            sig12(stat.epsilon),
            sig12(stat.median_gap_robust),
            sig12(stat.median_gap_oos),
        )?;
    }
    Ok(())
}

fn persist_report(report: &ExperimentReport, out_path: &Option<PathBuf>) -> Result<(), Error> {
    if let Some(prefix) = out_path {
        io::save_report(report, prefix)?;
    }
    Ok(())
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<(), Error> {
    match cli.command {
        Command::Solve => {
            let loaded = require_model(&cli.model)?;
            let dist = require_true_dist(&loaded, None)?;
            let solved = value_iterate(&loaded.model, &dist, cli.tol)?;
            print_solution(out, &loaded.model, &solved.value, &solved.policy, solved.iterations)?;
            Ok(())
        }
        Command::RobustSolve { dist } => {
            let loaded = require_model(&cli.model)?;
            let kind = DistanceKind::parse(&dist.distance)?;
            let eps = dist.epsilon.ok_or(Error::InvalidParameter {
                reason: "--epsilon is required".into(),
            })?;
            let center = require_true_dist(&loaded, None)?;
            let spec = ambiguity_for(&loaded.model, kind, center, eps)?;
            let solved = robust_value_iterate(&loaded.model, &spec, cli.tol)?;
            let check = verify_robust_optimal(
                &loaded.model,
                &spec,
                &solved.policy,
                &solved.value,
                10.0 * cli.tol,
            )?;
            print_solution(out, &loaded.model, &solved.value, &solved.policy, solved.iterations)?;
            writeln!(out, "fixed_point_residual {}", sig12(check.max_violation))?;
            Ok(())
        }
        Command::Evaluate { policy, mode } => {
            let loaded = require_model(&cli.model)?;
            let dist = require_true_dist(&loaded, None)?;
            let actions = parse_u64_list(&policy, "--policy")?
                .into_iter()
                .map(|a| a as usize)
                .collect();
            let policy = Policy::new(actions, &loaded.model)?;
            let mode = match mode.as_str() {
                "exact" => EvalMode::Exact,
                "iterative" => EvalMode::Iterative { tol: cli.tol },
                other => {
                    return Err(Error::InvalidParameter {
                        reason: format!("unknown evaluation mode `{other}`"),
                    })
                }
            };
            let value = evaluate_policy(&loaded.model, &dist, &policy, mode)?;
            for x in 0..loaded.model.n_states() {
                writeln!(
                    out,
                    "state {}: value {}",
                    loaded.model.state_labels()[x],
                    sig12(value.get(x))
                )?;
            }
            Ok(())
        }
        Command::Distance { dist, nu, rho } => {
            let kind = DistanceKind::parse(&dist.distance)?;
            let nu = parse_dist(&nu, "--nu")?;
            let rho = parse_dist(&rho, "--rho")?;
            let metric = if kind.requires_metric() {
                Some(require_model(&cli.model)?.model.w_metric().clone())
            } else {
                None
            };
            let d = distance(kind, &nu, &rho, metric.as_ref())?;
            writeln!(out, "{} {}", kind, sig12(d))?;
            Ok(())
        }
        Command::WorstCase {
            dist,
            center,
            payoff,
            oracle_resolution,
        } => {
            let kind = DistanceKind::parse(&dist.distance)?;
            let eps = dist.epsilon.ok_or(Error::InvalidParameter {
                reason: "--epsilon is required".into(),
            })?;
            let center = parse_dist(&center, "--center")?;
            let payoff = parse_f64_list(&payoff, "--payoff")?;
            let metric = if kind.requires_metric() {
                Some(require_model(&cli.model)?.model.w_metric().clone())
            } else {
                None
            };
            let spec = AmbiguitySpec::new(kind, center, eps, metric)?;
            let solved = rmdp_core::worst_case_expectation(&spec, &payoff)?;
            writeln!(out, "value {}", sig12(solved.value))?;
            let witness: Vec<String> =
                solved.witness.mass().iter().map(|&v| sig12(v)).collect();
            writeln!(out, "witness {}", witness.join(","))?;
            if let Some(resolution) = oracle_resolution {
                let oracle = brute_force_worst_case(&spec, &payoff, resolution)?;
                writeln!(out, "oracle {}", sig12(oracle))?;
            }
            Ok(())
        }
        Command::Radius {
            dist,
            samples,
            gamma,
            radius_mode,
            cal_trials,
            c1,
            c2,
            dim_m,
            tail_a,
        } => {
            let kind = DistanceKind::parse(&dist.distance)?;
            let eps = match radius_mode.as_str() {
                "formula" => {
                    let params = ConcentrationParams::new(dim_m, tail_a, c1, c2)?;
                    match kind {
                        DistanceKind::Wasserstein => {
                            rmdp_core::wasserstein_radius(samples, gamma, &params)?
                        }
                        DistanceKind::BoundedLipschitz => {
                            rmdp_core::bl_radius(samples, gamma, &params)?
                        }
                        DistanceKind::Prokhorov => {
                            rmdp_core::prokhorov_radius(samples, gamma, &params)?
                        }
                        other => {
                            return Err(Error::InvalidParameter {
                                reason: format!(
                                    "no closed-form radius for `{other}`; use --radius-mode calibrated"
                                ),
                            })
                        }
                    }
                }
                "calibrated" => {
                    let loaded = require_model(&cli.model)?;
                    let true_dist = require_true_dist(&loaded, None)?;
                    let metric = kind
                        .requires_metric()
                        .then(|| loaded.model.w_metric().clone());
                    rmdp_core::calibrate_radius_mc(
                        kind,
                        &true_dist,
                        samples,
                        gamma,
                        cal_trials,
                        require_seed(cli.seed)?,
                        metric.as_ref(),
                    )?
                }
                other => {
                    return Err(Error::InvalidParameter {
                        reason: format!("radius subcommand supports formula/calibrated, got `{other}`"),
                    })
                }
            };
            writeln!(out, "{}", sig12(eps))?;
            Ok(())
        }
        Command::Guarantees {
            dist,
            delta,
            gamma,
            samples,
            c1,
            c2,
            dim_m,
            tail_a,
            beta_gap,
        } => {
            let kind = DistanceKind::parse(&dist.distance)?;
            let loaded = require_model(&cli.model)?;
            let profile = lipschitz_estimate(&loaded.model)?;
            writeln!(out, "c_sup {}", sig12(profile.c_sup))?;
            writeln!(out, "l_c {}", sig12(profile.l_c))?;
            writeln!(out, "l_f {}", sig12(profile.l_f))?;
            writeln!(out, "alpha {}", sig12(profile.alpha))?;
            let delta_const = profile.delta_constant()?;
            writeln!(out, "delta_constant {}", sig12(delta_const))?;
            if let Some(eps) = dist.epsilon {
                writeln!(out, "rate_bound {}", sig12(rate_bound(kind, eps, delta_const)))?;
            }
            let params = ConcentrationParams::new(dim_m, tail_a, c1, c2)?;
            if let Some(n) = samples {
                let window = radius_window(kind, delta, gamma, n, &profile, &params)?;
                writeln!(out, "epsilon_lb {}", sig12(window.lower))?;
                writeln!(out, "epsilon_ub {}", sig12(window.upper))?;
                writeln!(out, "window_empty {}", window.is_empty())?;
            }
            let n_star = sample_complexity(delta, gamma, &profile, &params)?;
            writeln!(out, "sample_complexity {n_star}")?;
            if let Some(gap) = beta_gap {
                let eps = dist.epsilon.unwrap_or(0.0);
                let b = ood_bound(kind, eps, gap, &profile)?;
                writeln!(out, "ood_bound {}", sig12(b.total))?;
                writeln!(out, "ood_statistical {}", sig12(b.statistical))?;
                writeln!(out, "ood_nonstatistical {}", sig12(b.nonstatistical))?;
            }
            Ok(())
        }
        Command::Coverage { dist, exp } => {
            let loaded = require_model(&cli.model)?;
            let config = experiment_config(&loaded, &dist, &exp, cli.seed, cli.tol)?;
            let report = coverage_experiment(&loaded.model, &config)?;
            print_report_summary(out, &report)?;
            persist_report(&report, &cli.out)
        }
        Command::Convergence { dist, exp } => {
            let loaded = require_model(&cli.model)?;
            let config = experiment_config(&loaded, &dist, &exp, cli.seed, cli.tol)?;
            let report = convergence_experiment(&loaded.model, &config)?;
            print_report_summary(out, &report)?;
            persist_report(&report, &cli.out)
        }
        Command::Rate { dist, exp } => {
            let loaded = require_model(&cli.model)?;
            let config = experiment_config(&loaded, &dist, &exp, cli.seed, cli.tol)?;
            let profile = lipschitz_estimate(&loaded.model)?;
            let report = rate_experiment(&loaded.model, &config, &profile)?;
            print_report_summary(out, &report)?;
            persist_report(&report, &cli.out)
        }
        Command::Ood { dist, exp, deploy } => {
            let loaded = require_model(&cli.model)?;
            let config = experiment_config(&loaded, &dist, &exp, cli.seed, cli.tol)?;
            let deploy = parse_dist(&deploy, "--deploy")?;
            let profile = lipschitz_estimate(&loaded.model)?;
            let report = ood_experiment(&loaded.model, &config, &deploy, &profile)?;
            print_report_summary(out, &report)?;
            persist_report(&report, &cli.out)
        }
        Command::Counterexample {
            max_n,
            emit_model,
            alpha,
        } => {
            for n in 1..=max_n {
                let p = counterexample_coverage_exact(n)?;
                let (num, den) = p.reduced();
                writeln!(out, "N {n}: {num}/{den} = {}", sig12(p.to_f64()))?;
            }
            if let Some(path) = emit_model {
                let doc = ModelDocument {
                    model: counterexample_model(alpha)?,
                    true_dist: Some(Distribution::bernoulli(0.5)?),
                };
                io::save_model(&doc, path)?;
            }
            Ok(())
        }
        Command::GenerateInventory {
            capacity,
            demand_levels,
            order_cost,
            holding_cost,
            shortage_cost,
            alpha,
            true_dist,
        } => {
            let model = inventory_instance(&InventoryParams {
                capacity,
                demand_levels,
                order_cost,
                holding_cost,
                shortage_cost,
                alpha,
            })?;
            let true_dist = match true_dist {
                Some(text) => {
                    let d = parse_dist(&text, "--true-dist")?;
                    if d.len() != model.n_disturbances() {
                        return Err(Error::DimensionMismatch {
                            expected: model.n_disturbances(),
                            got: d.len(),
                        });
                    }
                    Some(d)
                }
                None => Some(Distribution::uniform(demand_levels as usize)),
            };
            let path = cli.out.ok_or(Error::InvalidParameter {
                reason: "--out is required to write the model".into(),
            })?;
            io::save_model(&ModelDocument { model, true_dist }, &path)?;
            writeln!(out, "wrote {}", path.display())?;
            Ok(())
        }
    }
}
