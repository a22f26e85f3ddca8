//! Data-driven distance-based robust MDPs on finite spaces.
//!
//! The crate solves the robust Bellman recursion over seven ambiguity-set
//! geometries (total variation, Hellinger, KL, χ², Wasserstein, bounded
//! Lipschitz, Prokhorov), computes ambiguity radii and suboptimality bounds
//! from concentration constants, and ships a seeded Monte-Carlo harness that
//! verifies the coverage, convergence, rate, and out-of-distribution
//! guarantees empirically.
//!
//! Everything is a pure function of immutable inputs; models, distributions,
//! and specs can be shared freely across threads.

pub mod adversary;
pub mod distance;
pub mod distribution;
pub mod empirical;
mod error;
pub mod experiment;
pub mod guarantees;
pub mod io;
pub mod lp;
pub mod model;
mod polytope;
pub mod radius;
pub mod robust;
#[cfg(any(test, feature = "testutil"))]
pub mod testutil;

pub use adversary::{brute_force_worst_case, worst_case_expectation, AmbiguitySpec, WorstCase};
pub use distance::{distance, psi, psi_inverse, DistanceKind, Metric};
pub use distribution::Distribution;
pub use empirical::{counterexample_coverage_exact, counterexample_model, solve_empirical};
pub use error::{Error, Result};
pub use experiment::{
    convergence_experiment, coverage_experiment, inventory_instance, ood_experiment,
    rate_experiment, ExperimentConfig, ExperimentReport, InventoryParams, RadiusMode,
};
pub use guarantees::{
    lipschitz_estimate, ood_bound, radius_window, rate_bound, sample_complexity,
    LipschitzProfile, OodBound, RadiusWindow,
};
pub use model::{
    bellman_apply, evaluate_policy, greedy_policy, value_iterate, EvalMode, MdpModel, Policy,
    SolveResult, ValueFunction,
};
pub use radius::{
    bl_radius, calibrate_radius_mc, concentration_eta, prokhorov_radius, wasserstein_radius,
    ConcentrationParams,
};
pub use robust::{
    robust_bellman_apply, robust_greedy_policy, robust_value_iterate, verify_robust_optimal,
    RobustCheck,
};
