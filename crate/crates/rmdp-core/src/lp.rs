//! Small linear programs backing the metric-type distances and the
//! transport-ball adversary, built on the `minilp` simplex solver.

use minilp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem, Variable};

use crate::distance::Metric;
use crate::distribution::Distribution;
use crate::error::{Error, Result};

fn solve(problem: Problem) -> Result<minilp::Solution> {
    problem.solve().map_err(|e| Error::SolverFailure {
        reason: format!("lp: {e}"),
    })
}

/// Minimum-cost transport value between `nu` and `rho` under `metric`
/// (the 1-Wasserstein distance on a finite support).
pub fn transport_value(nu: &Distribution, rho: &Distribution, metric: &Metric) -> Result<f64> {
    let n = nu.len();
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let mut rows: Vec<LinearExpr> = (0..n).map(|_| LinearExpr::empty()).collect();
    let mut cols: Vec<LinearExpr> = (0..n).map(|_| LinearExpr::empty()).collect();
    for i in 0..n {
        for j in 0..n {
            let v = problem.add_var(metric.get(i, j), (0.0, 1.0));
            rows[i].add(v, 1.0);
            cols[j].add(v, 1.0);
        }
    }
    for (i, expr) in rows.into_iter().enumerate() {
        problem.add_constraint(expr, ComparisonOp::Eq, nu.get(i));
    }
    for (j, expr) in cols.into_iter().enumerate() {
        problem.add_constraint(expr, ComparisonOp::Eq, rho.get(j));
    }
    Ok(solve(problem)?.objective())
}

/// Kantorovich dual of the transport problem: max `⟨f, nu - rho⟩` over
/// 1-Lipschitz `f` (with `f_0 = 0`). Used as an independent route for
/// cross-checking [`transport_value`].
pub fn kantorovich_dual_value(
    nu: &Distribution,
    rho: &Distribution,
    metric: &Metric,
) -> Result<f64> {
    let n = nu.len();
    let bound = metric.max_entry().max(1.0);
    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let f: Vec<Variable> = (0..n)
        .map(|i| {
            let range = if i == 0 { (0.0, 0.0) } else { (-bound, bound) };
            problem.add_var(nu.get(i) - rho.get(i), range)
        })
        .collect();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut expr = LinearExpr::empty();
            expr.add(f[i], 1.0);
            expr.add(f[j], -1.0);
            problem.add_constraint(expr, ComparisonOp::Le, metric.get(i, j));
        }
    }
    Ok(solve(problem)?.objective())
}

/// Bounded-Lipschitz metric as a finite LP:
/// max `⟨f, diff⟩` subject to `|f_i| ≤ s`, `|f_i - f_j| ≤ r·ρ(i,j)`, `s + r ≤ 1`.
///
/// Returns the optimal value together with the maximizing `f`, which acts as
/// a separating cut in the ball adversary.
pub fn bounded_lipschitz_lp(diff: &[f64], metric: &Metric) -> Result<(f64, Vec<f64>)> {
    let n = diff.len();
    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let f: Vec<Variable> = diff.iter().map(|&d| problem.add_var(d, (-1.0, 1.0))).collect();
    let s = problem.add_var(0.0, (0.0, 1.0));
    let r = problem.add_var(0.0, (0.0, 1.0));
    for i in 0..n {
        let mut hi = LinearExpr::empty();
        hi.add(f[i], 1.0);
        hi.add(s, -1.0);
        problem.add_constraint(hi, ComparisonOp::Le, 0.0);
        let mut lo = LinearExpr::empty();
        lo.add(f[i], -1.0);
        lo.add(s, -1.0);
        problem.add_constraint(lo, ComparisonOp::Le, 0.0);
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut expr = LinearExpr::empty();
            expr.add(f[i], 1.0);
            expr.add(f[j], -1.0);
            expr.add(r, -metric.get(i, j));
            problem.add_constraint(expr, ComparisonOp::Le, 0.0);
        }
    }
    let mut budget = LinearExpr::empty();
    budget.add(s, 1.0);
    budget.add(r, 1.0);
    problem.add_constraint(budget, ComparisonOp::Le, 1.0);
    let solution = solve(problem)?;
    let witness = f.iter().map(|&v| solution[v]).collect();
    Ok((solution.objective(), witness))
}

/// Maximum of `⟨g, nu⟩` over distributions reachable from `center` by a
/// transport plan of cost at most `eps`. Returns the value and the witness
/// marginal.
pub fn transport_ball_max(
    center: &Distribution,
    metric: &Metric,
    payoff: &[f64],
    eps: f64,
) -> Result<(f64, Distribution)> {
    let n = center.len();
    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let mut rows: Vec<LinearExpr> = (0..n).map(|_| LinearExpr::empty()).collect();
    let mut cost = LinearExpr::empty();
    let mut plan = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let v = problem.add_var(payoff[j], (0.0, 1.0));
            rows[i].add(v, 1.0);
            cost.add(v, metric.get(i, j));
            plan.push(v);
        }
    }
    for (i, expr) in rows.into_iter().enumerate() {
        problem.add_constraint(expr, ComparisonOp::Eq, center.get(i));
    }
    problem.add_constraint(cost, ComparisonOp::Le, eps);
    let solution = solve(problem)?;
    let mut marginal = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            marginal[j] += solution[plan[i * n + j]];
        }
    }
    Ok((solution.objective(), Distribution::from_unnormalized(marginal)?))
}

/// Maximum of `⟨g, nu⟩` over the simplex intersected with half-spaces
/// `⟨cut, nu⟩ ≤ bound`. Master problem of the cutting-plane adversary.
pub fn simplex_max_with_cuts(
    payoff: &[f64],
    cuts: &[(Vec<f64>, f64)],
) -> Result<(f64, Distribution)> {
    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let nu: Vec<Variable> = payoff.iter().map(|&g| problem.add_var(g, (0.0, 1.0))).collect();
    let mut total = LinearExpr::empty();
    for &v in &nu {
        total.add(v, 1.0);
    }
    problem.add_constraint(total, ComparisonOp::Eq, 1.0);
    for (cut, bound) in cuts {
        let mut expr = LinearExpr::empty();
        for (v, &c) in nu.iter().zip(cut) {
            expr.add(*v, c);
        }
        problem.add_constraint(expr, ComparisonOp::Le, *bound);
    }
    let solution = solve(problem)?;
    let mass: Vec<f64> = nu.iter().map(|&v| solution[v]).collect();
    Ok((solution.objective(), Distribution::from_unnormalized(mass)?))
}
