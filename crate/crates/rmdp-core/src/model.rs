//! Finite MDP data model and classical dynamic programming.
//!
//! A model is a finite state space X, action space A with per-state
//! admissible subsets A(x), disturbance space W with a metric, an evolution
//! table `F(x,a,w) -> x'`, a nonnegative cost table `c(x,a,w)`, and a
//! discount in (0,1). The cost-to-go of a stationary policy is the fixed
//! point of the evaluation operator; the optimal value is the fixed point of
//! the Bellman operator, both α-contractions in the sup norm.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::distance::Metric;
use crate::distribution::Distribution;
use crate::error::{Error, Result};

/// Iteration cap for the contraction loops; the stopping rule always fires
/// long before this for discounts bounded away from 1.
const MAX_SWEEPS: usize = 5_000_000;

/// Finite MDP with explicit disturbance dynamics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MdpModel {
    states: Vec<String>,
    actions: Vec<String>,
    /// Admissible action indices per state, sorted ascending.
    admissible: Vec<Vec<usize>>,
    disturbances: Vec<String>,
    w_metric: Metric,
    x_metric: Option<Metric>,
    /// `evolution[x][pos][w]` with `pos` indexing `admissible[x]`.
    evolution: Vec<Vec<Vec<usize>>>,
    /// `cost[x][pos][w]`, aligned with `evolution`.
    cost: Vec<Vec<Vec<f64>>>,
    discount: f64,
}

impl MdpModel {
    /// Builds a model from per-(x,a,w) closures; `dynamics(x, a, w)` returns
    /// `(next_state, cost)` for every admissible `(x, a)`.
    #[allow(clippy::too_many_arguments)]
    pub fn from_fn(
        states: Vec<String>,
        actions: Vec<String>,
        admissible: Vec<Vec<usize>>,
        disturbances: Vec<String>,
        w_metric: Metric,
        x_metric: Option<Metric>,
        discount: f64,
        mut dynamics: impl FnMut(usize, usize, usize) -> (usize, f64),
    ) -> Result<Self> {
        let n_w = disturbances.len();
        let mut evolution = Vec::with_capacity(states.len());
        let mut cost = Vec::with_capacity(states.len());
        for (x, acts) in admissible.iter().enumerate() {
            let mut ev_x = Vec::with_capacity(acts.len());
            let mut c_x = Vec::with_capacity(acts.len());
            for &a in acts {
                let mut ev = Vec::with_capacity(n_w);
                let mut c = Vec::with_capacity(n_w);
                for w in 0..n_w {
                    let (next, stage_cost) = dynamics(x, a, w);
                    ev.push(next);
                    c.push(stage_cost);
                }
                ev_x.push(ev);
                c_x.push(c);
            }
            evolution.push(ev_x);
            cost.push(c_x);
        }
        let model = Self {
            states,
            actions,
            admissible,
            disturbances,
            w_metric,
            x_metric,
            evolution,
            cost,
            discount,
        };
        model.validate()?;
        Ok(model)
    }

    /// Builds a model from sparse `(x, a, w, x')` / `(x, a, w, c)` tuples;
    /// entries must exist exactly for admissible `(x, a)` and every `w`.
    #[allow(clippy::too_many_arguments)]
    pub fn from_tables(
        states: Vec<String>,
        actions: Vec<String>,
        admissible: Vec<Vec<usize>>,
        disturbances: Vec<String>,
        w_metric: Metric,
        x_metric: Option<Metric>,
        discount: f64,
        transitions: &[(usize, usize, usize, usize)],
        costs: &[(usize, usize, usize, f64)],
    ) -> Result<Self> {
        let n_x = states.len();
        let n_a = actions.len();
        let n_w = disturbances.len();
        let mut sorted_adm = admissible;
        for acts in sorted_adm.iter_mut() {
            acts.sort_unstable();
            acts.dedup();
        }
        let pos = |x: usize, a: usize| -> Option<usize> {
            sorted_adm.get(x).and_then(|acts| acts.iter().position(|&b| b == a))
        };
        let mut evolution: Vec<Vec<Vec<Option<usize>>>> = sorted_adm
            .iter()
            .map(|acts| vec![vec![None; n_w]; acts.len()])
            .collect();
        let mut cost: Vec<Vec<Vec<Option<f64>>>> = sorted_adm
            .iter()
            .map(|acts| vec![vec![None; n_w]; acts.len()])
            .collect();
        for &(x, a, w, next) in transitions {
            if x >= n_x || a >= n_a || w >= n_w || next >= n_x {
                return Err(Error::IndexOutOfRange {
                    index: x.max(a).max(w).max(next),
                    size: n_x.max(n_a).max(n_w),
                });
            }
            let p = pos(x, a).ok_or(Error::InadmissibleTableEntry {
                state: x,
                action: a,
                disturbance: w,
            })?;
            if evolution[x][p][w].replace(next).is_some() {
                return Err(Error::DuplicateTableEntry {
                    state: x,
                    action: a,
                    disturbance: w,
                });
            }
        }
        for &(x, a, w, c) in costs {
            if x >= n_x || a >= n_a || w >= n_w {
                return Err(Error::IndexOutOfRange {
                    index: x.max(a).max(w),
                    size: n_x.max(n_a).max(n_w),
                });
            }
            let p = pos(x, a).ok_or(Error::InadmissibleTableEntry {
                state: x,
                action: a,
                disturbance: w,
            })?;
            if cost[x][p][w].replace(c).is_some() {
                return Err(Error::DuplicateTableEntry {
                    state: x,
                    action: a,
                    disturbance: w,
                });
            }
        }
        let mut evolution_full = Vec::with_capacity(n_x);
        let mut cost_full = Vec::with_capacity(n_x);
        for x in 0..n_x {
            let mut ev_x = Vec::new();
            let mut c_x = Vec::new();
            for (p, &a) in sorted_adm[x].iter().enumerate() {
                let mut ev = Vec::with_capacity(n_w);
                let mut c = Vec::with_capacity(n_w);
                for w in 0..n_w {
                    ev.push(evolution[x][p][w].ok_or(Error::MissingTableEntry {
                        state: x,
                        action: a,
                        disturbance: w,
                    })?);
                    c.push(cost[x][p][w].ok_or(Error::MissingTableEntry {
                        state: x,
                        action: a,
                        disturbance: w,
                    })?);
                }
                ev_x.push(ev);
                c_x.push(c);
            }
            evolution_full.push(ev_x);
            cost_full.push(c_x);
        }
        let model = Self {
            states,
            actions,
            admissible: sorted_adm,
            disturbances,
            w_metric,
            x_metric,
            evolution: evolution_full,
            cost: cost_full,
            discount,
        };
        model.validate()?;
        Ok(model)
    }

    /// Checks every structural invariant, reporting the first violation.
    pub fn validate(&self) -> Result<()> {
        let n_x = self.states.len();
        let n_a = self.actions.len();
        let n_w = self.disturbances.len();
        if n_x == 0 || n_a == 0 || n_w == 0 {
            return Err(Error::InvalidParameter {
                reason: "states, actions, and disturbances must be nonempty".into(),
            });
        }
        if !(self.discount > 0.0 && self.discount < 1.0) {
            return Err(Error::DiscountOutOfRange {
                value: self.discount,
            });
        }
        if self.admissible.len() != n_x {
            return Err(Error::DimensionMismatch {
                expected: n_x,
                got: self.admissible.len(),
            });
        }
        for (x, acts) in self.admissible.iter().enumerate() {
            if acts.is_empty() {
                return Err(Error::EmptyActionSet { state: x });
            }
            for &a in acts {
                if a >= n_a {
                    return Err(Error::IndexOutOfRange { index: a, size: n_a });
                }
            }
        }
        if self.w_metric.size() != n_w {
            return Err(Error::MetricShape {
                expected: n_w,
                got: self.w_metric.size(),
            });
        }
        if let Some(xm) = &self.x_metric {
            if xm.size() != n_x {
                return Err(Error::MetricShape {
                    expected: n_x,
                    got: xm.size(),
                });
            }
        }
        for x in 0..n_x {
            for (pos, &a) in self.admissible[x].iter().enumerate() {
                for w in 0..n_w {
                    let next = self.evolution[x][pos][w];
                    if next >= n_x {
                        return Err(Error::IndexOutOfRange {
                            index: next,
                            size: n_x,
                        });
                    }
                    let c = self.cost[x][pos][w];
                    if !c.is_finite() {
                        return Err(Error::NonFiniteCost {
                            state: x,
                            action: a,
                            disturbance: w,
                        });
                    }
                    if c < 0.0 {
                        return Err(Error::NegativeCost {
                            state: x,
                            action: a,
                            disturbance: w,
                            value: c,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn n_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn n_disturbances(&self) -> usize {
        self.disturbances.len()
    }

    pub fn state_labels(&self) -> &[String] {
        &self.states
    }

    pub fn action_labels(&self) -> &[String] {
        &self.actions
    }

    pub fn disturbance_labels(&self) -> &[String] {
        &self.disturbances
    }

    pub fn admissible(&self, state: usize) -> &[usize] {
        &self.admissible[state]
    }

    pub fn admissible_sets(&self) -> &[Vec<usize>] {
        &self.admissible
    }

    pub fn w_metric(&self) -> &Metric {
        &self.w_metric
    }

    pub fn x_metric(&self) -> Option<&Metric> {
        self.x_metric.as_ref()
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    fn action_pos(&self, state: usize, action: usize) -> Result<usize> {
        self.admissible[state]
            .iter()
            .position(|&a| a == action)
            .ok_or(Error::PolicyActionInadmissible { state, action })
    }

    /// Successor state `F(x, a, w)`; errors if `a` is inadmissible in `x`.
    pub fn next_state(&self, state: usize, action: usize, w: usize) -> Result<usize> {
        Ok(self.evolution[state][self.action_pos(state, action)?][w])
    }

    /// Stage cost `c(x, a, w)`; errors if `a` is inadmissible in `x`.
    pub fn stage_cost(&self, state: usize, action: usize, w: usize) -> Result<f64> {
        Ok(self.cost[state][self.action_pos(state, action)?][w])
    }

    pub(crate) fn row(&self, state: usize, pos: usize) -> (&[usize], &[f64]) {
        (&self.evolution[state][pos], &self.cost[state][pos])
    }

    /// Sup norm of the cost table.
    pub fn cost_sup(&self) -> f64 {
        self.cost
            .iter()
            .flatten()
            .flatten()
            .cloned()
            .fold(0.0, f64::max)
    }

    /// Upper bound `‖c‖∞ / (1 − α)` on any value function of this model.
    pub fn value_bound(&self) -> f64 {
        self.cost_sup() / (1.0 - self.discount)
    }

    /// Payoff vector `w ↦ c(x,a,w) + α·v(F(x,a,w))` for an admissible pair,
    /// addressed by position within `admissible(x)`.
    pub(crate) fn payoff_vector(&self, state: usize, pos: usize, v: &[f64], out: &mut Vec<f64>) {
        let (next, cost) = self.row(state, pos);
        out.clear();
        out.extend(
            next.iter()
                .zip(cost)
                .map(|(&x2, &c)| c + self.discount * v[x2]),
        );
    }
}

/// Per-state values, indexed like the model's state list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ValueFunction {
    values: Vec<f64>,
}

impl ValueFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                reason: format!("value at state {i} is not finite"),
            });
        }
        Ok(Self { values })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            values: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, state: usize) -> f64 {
        self.values[state]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn sup_distance(&self, other: &ValueFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Deterministic stationary policy: one admissible action index per state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Policy {
    actions: Vec<usize>,
}

impl Policy {
    pub fn new(actions: Vec<usize>, model: &MdpModel) -> Result<Self> {
        if actions.len() != model.n_states() {
            return Err(Error::DimensionMismatch {
                expected: model.n_states(),
                got: actions.len(),
            });
        }
        for (x, &a) in actions.iter().enumerate() {
            if !model.admissible(x).contains(&a) {
                return Err(Error::PolicyActionInadmissible { state: x, action: a });
            }
        }
        Ok(Self { actions })
    }

    pub fn action(&self, state: usize) -> usize {
        self.actions[state]
    }

    pub fn actions(&self) -> &[usize] {
        &self.actions
    }
}

/// How a policy's fixed point is computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EvalMode {
    /// Successive approximation with the geometric stopping rule; sup-norm
    /// error at most `tol`.
    Iterative { tol: f64 },
    /// Direct linear solve of `(I − α P_π) J = c_π`.
    Exact,
}

/// Output of a value-iteration style solve.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub value: ValueFunction,
    pub policy: Policy,
    pub iterations: usize,
}

/// One application of the Bellman operator:
/// `(Φv)(x) = min_{a ∈ A(x)} Σ_w dist(w) [c(x,a,w) + α v(F(x,a,w))]`.
/// Ties in the minimum resolve to the lowest action index.
pub fn bellman_apply(
    model: &MdpModel,
    dist: &Distribution,
    v: &ValueFunction,
) -> Result<ValueFunction> {
    check_dist_and_value(model, dist, v)?;
    let mut out = Vec::with_capacity(model.n_states());
    let mut payoff = Vec::with_capacity(model.n_disturbances());
    for x in 0..model.n_states() {
        let mut best = f64::INFINITY;
        for pos in 0..model.admissible(x).len() {
            model.payoff_vector(x, pos, v.as_slice(), &mut payoff);
            let q = dist.expectation(&payoff);
            if q < best {
                best = q;
            }
        }
        out.push(best);
    }
    ValueFunction::new(out)
}

/// Greedy policy with respect to `v`, lowest action index on ties.
pub fn greedy_policy(model: &MdpModel, dist: &Distribution, v: &ValueFunction) -> Result<Policy> {
    check_dist_and_value(model, dist, v)?;
    let mut actions = Vec::with_capacity(model.n_states());
    let mut payoff = Vec::with_capacity(model.n_disturbances());
    for x in 0..model.n_states() {
        let mut best = f64::INFINITY;
        let mut best_action = model.admissible(x)[0];
        for (pos, &a) in model.admissible(x).iter().enumerate() {
            model.payoff_vector(x, pos, v.as_slice(), &mut payoff);
            let q = dist.expectation(&payoff);
            if q < best {
                best = q;
                best_action = a;
            }
        }
        actions.push(best_action);
    }
    Policy::new(actions, model)
}

/// Value of a stationary policy, `J(π, ·)`.
pub fn evaluate_policy(
    model: &MdpModel,
    dist: &Distribution,
    policy: &Policy,
    mode: EvalMode,
) -> Result<ValueFunction> {
    check_dist_and_value(model, dist, &ValueFunction::zeros(model.n_states()))?;
    Policy::new(policy.actions().to_vec(), model)?;
    match mode {
        EvalMode::Exact => evaluate_policy_exact(model, dist, policy),
        EvalMode::Iterative { tol } => evaluate_policy_iterative(model, dist, policy, tol),
    }
}

fn evaluate_policy_exact(
    model: &MdpModel,
    dist: &Distribution,
    policy: &Policy,
) -> Result<ValueFunction> {
    let n = model.n_states();
    let alpha = model.discount();
    // A = I - α P_π, b = expected stage cost under π.
    let mut a = DMatrix::<f64>::identity(n, n);
    let mut b = DVector::<f64>::zeros(n);
    for x in 0..n {
        let pos = model
            .admissible(x)
            .iter()
            .position(|&act| act == policy.action(x))
            .expect("policy validated above");
        let (next, cost) = model.row(x, pos);
        for (w, (&x2, &c)) in next.iter().zip(cost).enumerate() {
            let p = dist.get(w);
            a[(x, x2)] -= alpha * p;
            b[x] += p * c;
        }
    }
    let lu = a.lu();
    let sol = lu.solve(&b).ok_or(Error::SolverFailure {
        reason: "singular policy-evaluation system".into(),
    })?;
    ValueFunction::new(sol.iter().cloned().collect())
}

fn evaluate_policy_iterative(
    model: &MdpModel,
    dist: &Distribution,
    policy: &Policy,
    tol: f64,
) -> Result<ValueFunction> {
    if tol <= 0.0 {
        return Err(Error::InvalidTolerance { value: tol });
    }
    let alpha = model.discount();
    let shrink = alpha / (1.0 - alpha);
    let mut v = ValueFunction::zeros(model.n_states());
    let mut payoff = Vec::with_capacity(model.n_disturbances());
    for _ in 0..MAX_SWEEPS {
        let mut next = Vec::with_capacity(model.n_states());
        for x in 0..model.n_states() {
            let pos = model
                .admissible(x)
                .iter()
                .position(|&act| act == policy.action(x))
                .expect("policy validated by caller");
            model.payoff_vector(x, pos, v.as_slice(), &mut payoff);
            next.push(dist.expectation(&payoff));
        }
        let next = ValueFunction::new(next)?;
        let delta = next.sup_distance(&v);
        v = next;
        if shrink * delta <= tol {
            return Ok(v);
        }
    }
    Err(Error::SolverFailure {
        reason: "policy evaluation did not converge".into(),
    })
}

/// Value iteration from zero. Stops once `α‖v_{t+1} − v_t‖∞/(1−α) ≤ tol`,
/// which bounds `‖v − J*‖∞ ≤ tol`; the returned policy is greedy with
/// respect to the returned value.
pub fn value_iterate(model: &MdpModel, dist: &Distribution, tol: f64) -> Result<SolveResult> {
    if tol <= 0.0 {
        return Err(Error::InvalidTolerance { value: tol });
    }
    let alpha = model.discount();
    let shrink = alpha / (1.0 - alpha);
    let mut v = ValueFunction::zeros(model.n_states());
    for it in 1..=MAX_SWEEPS {
        let next = bellman_apply(model, dist, &v)?;
        let delta = next.sup_distance(&v);
        v = next;
        if shrink * delta <= tol {
            let policy = greedy_policy(model, dist, &v)?;
            return Ok(SolveResult {
                value: v,
                policy,
                iterations: it,
            });
        }
    }
    Err(Error::SolverFailure {
        reason: "value iteration did not converge".into(),
    })
}

fn check_dist_and_value(model: &MdpModel, dist: &Distribution, v: &ValueFunction) -> Result<()> {
    if dist.len() != model.n_disturbances() {
        return Err(Error::DimensionMismatch {
            expected: model.n_disturbances(),
            got: dist.len(),
        });
    }
    if v.len() != model.n_states() {
        return Err(Error::DimensionMismatch {
            expected: model.n_states(),
            got: v.len(),
        });
    }
    Ok(())
}
