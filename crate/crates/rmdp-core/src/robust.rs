//! Robust Bellman operator and robust value iteration:
//! `(Φ̃v)(x) = min_{a ∈ A(x)} sup_{ν : d(ν, μ̂) ≤ ε} Σ_w ν(w)[c(x,a,w) + α v(F(x,a,w))]`.
//!
//! The inner sup is delegated to the ball adversary; the outer min keeps the
//! same lowest-index tie-break as the classical operator, so at ε = 0 the two
//! solvers coincide bit for bit.

use crate::adversary::{worst_case_expectation, AmbiguitySpec};
use crate::error::{Error, Result};
use crate::model::{MdpModel, Policy, SolveResult, ValueFunction};

const MAX_SWEEPS: usize = 5_000_000;

fn check_spec(model: &MdpModel, spec: &AmbiguitySpec) -> Result<()> {
    if spec.center.len() != model.n_disturbances() {
        return Err(Error::DimensionMismatch {
            expected: model.n_disturbances(),
            got: spec.center.len(),
        });
    }
    Ok(())
}

/// One application of the robust Bellman operator.
pub fn robust_bellman_apply(
    model: &MdpModel,
    spec: &AmbiguitySpec,
    v: &ValueFunction,
) -> Result<ValueFunction> {
    check_spec(model, spec)?;
    let mut out = Vec::with_capacity(model.n_states());
    let mut payoff = Vec::with_capacity(model.n_disturbances());
    for x in 0..model.n_states() {
        let mut best = f64::INFINITY;
        for pos in 0..model.admissible(x).len() {
            model.payoff_vector(x, pos, v.as_slice(), &mut payoff);
            let q = worst_case_expectation(spec, &payoff)?.value;
            if q < best {
                best = q;
            }
        }
        out.push(best);
    }
    ValueFunction::new(out)
}

/// Robust-greedy policy with respect to `v`, lowest action index on ties.
pub fn robust_greedy_policy(
    model: &MdpModel,
    spec: &AmbiguitySpec,
    v: &ValueFunction,
) -> Result<Policy> {
    check_spec(model, spec)?;
    let mut actions = Vec::with_capacity(model.n_states());
    let mut payoff = Vec::with_capacity(model.n_disturbances());
    for x in 0..model.n_states() {
        let mut best = f64::INFINITY;
        let mut best_action = model.admissible(x)[0];
        for (pos, &a) in model.admissible(x).iter().enumerate() {
            model.payoff_vector(x, pos, v.as_slice(), &mut payoff);
            let q = worst_case_expectation(spec, &payoff)?.value;
            if q < best {
                best = q;
                best_action = a;
            }
        }
        actions.push(best_action);
    }
    Policy::new(actions, model)
}

/// Robust value iteration from zero with the contraction stopping rule
/// `α‖v_{t+1} − v_t‖∞/(1−α) ≤ tol`; the policy is robust-greedy for the
/// returned value.
pub fn robust_value_iterate(
    model: &MdpModel,
    spec: &AmbiguitySpec,
    tol: f64,
) -> Result<SolveResult> {
    if tol <= 0.0 {
        return Err(Error::InvalidTolerance { value: tol });
    }
    let alpha = model.discount();
    let shrink = alpha / (1.0 - alpha);
    let mut v = ValueFunction::zeros(model.n_states());
    for it in 1..=MAX_SWEEPS {
        let next = robust_bellman_apply(model, spec, &v)?;
        let delta = next.sup_distance(&v);
        v = next;
        if shrink * delta <= tol {
            let policy = robust_greedy_policy(model, spec, &v)?;
            return Ok(SolveResult {
                value: v,
                policy,
                iterations: it,
            });
        }
    }
    Err(Error::SolverFailure {
        reason: "robust value iteration did not converge".into(),
    })
}

/// Residual of the robust policy Bellman equation.
#[derive(Debug, Clone, Copy)]
pub struct RobustCheck {
    /// `max_x |J̃(x) − sup_ν ∫ (c + α J̃∘F) dν|` at the policy's actions.
    pub max_violation: f64,
    /// Whether the residual is within the requested tolerance.
    pub ok: bool,
}

/// Verifies the fixed-point characterization of a robust optimal policy:
/// for each state, the worst-case one-step value of the policy's action must
/// reproduce the claimed value.
pub fn verify_robust_optimal(
    model: &MdpModel,
    spec: &AmbiguitySpec,
    policy: &Policy,
    value: &ValueFunction,
    tol: f64,
) -> Result<RobustCheck> {
    check_spec(model, spec)?;
    Policy::new(policy.actions().to_vec(), model)?;
    if value.len() != model.n_states() {
        return Err(Error::DimensionMismatch {
            expected: model.n_states(),
            got: value.len(),
        });
    }
    let mut payoff = Vec::with_capacity(model.n_disturbances());
    let mut worst = 0.0f64;
    for x in 0..model.n_states() {
        let pos = model
            .admissible(x)
            .iter()
            .position(|&a| a == policy.action(x))
            .expect("policy validated above");
        model.payoff_vector(x, pos, value.as_slice(), &mut payoff);
        let rhs = worst_case_expectation(spec, &payoff)?.value;
        worst = worst.max((value.get(x) - rhs).abs());
    }
    Ok(RobustCheck {
        max_violation: worst,
        ok: worst <= tol,
    })
}
