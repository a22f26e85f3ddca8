//! Empirical-MDP baseline: solve the MDP with the unknown disturbance
//! distribution replaced by its empirical estimate, plus the five-state
//! instance on which the empirical optimal value fails to cover the
//! out-of-sample value for every sample size.

use crate::distance::Metric;
use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::model::{value_iterate, MdpModel, SolveResult};

/// Solves the empirical MDP induced by the samples.
pub fn solve_empirical(model: &MdpModel, samples: &[usize], tol: f64) -> Result<SolveResult> {
    let empirical = Distribution::from_samples(samples, model.n_disturbances())?;
    value_iterate(model, &empirical, tol)
}

/// The five-state counterexample instance.
///
/// States {0,1,2,3,4}; actions labelled "1" and "3", both admissible only in
/// state 0; disturbances {0,1} with a fair coin as the true distribution.
/// From state 0 action `a` moves to `a + w`; all other states absorb.
/// Costs: c(0,"1",0) = 12, c(0,"1",1) = 2, c(0,"3",0) = 8, c(0,"3",1) = 4,
/// zero elsewhere. The state-0 values are independent of the discount since
/// every successor is absorbing with zero cost.
pub fn counterexample_model(alpha: f64) -> Result<MdpModel> {
    let states = (0..5).map(|i| i.to_string()).collect();
    let actions = vec!["1".to_string(), "3".to_string()];
    let mut admissible = vec![vec![0usize]; 5];
    admissible[0] = vec![0, 1];
    let disturbances = vec!["0".to_string(), "1".to_string()];
    MdpModel::from_fn(
        states,
        actions,
        admissible,
        disturbances,
        Metric::absolute_difference(2),
        Some(Metric::absolute_difference(5)),
        alpha,
        |x, a, w| {
            if x == 0 {
                let action_value = if a == 0 { 1 } else { 3 };
                let cost = match (a, w) {
                    (0, 0) => 12.0,
                    (0, 1) => 2.0,
                    (1, 0) => 8.0,
                    _ => 4.0,
                };
                (action_value + w, cost)
            } else {
                (x, 0.0)
            }
        },
    )
}

/// Exact rational probability, reported as `numerator / 2^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverageProbability {
    pub numerator: u128,
    pub denominator: u128,
}

impl CoverageProbability {
    pub fn to_f64(self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    /// Reduced fraction.
    pub fn reduced(self) -> (u128, u128) {
        let g = gcd(self.numerator, self.denominator);
        (self.numerator / g, self.denominator / g)
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

fn binomial(n: u32, k: u32) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc * (n as u128 - i) / (i + 1);
    }
    acc
}

/// Probability that the empirical optimal value at state 0 covers the
/// out-of-sample value of the empirical optimal policy on the
/// counterexample instance:
/// `P = 2^{-n} Σ_{i=0}^{⌊n/2⌋} C(n, i)`, exactly in integers for n ≤ 60.
pub fn counterexample_coverage_exact(n: u32) -> Result<CoverageProbability> {
    if !(1..=60).contains(&n) {
        return Err(Error::InvalidParameter {
            reason: format!("exact coverage requires 1 <= n <= 60, got {n}"),
        });
    }
    let numerator: u128 = (0..=n / 2).map(|i| binomial(n, i)).sum();
    Ok(CoverageProbability {
        numerator,
        denominator: 1u128 << n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{evaluate_policy, EvalMode, Policy};

    #[test]
    fn counterexample_values_are_discount_independent() {
        for &alpha in &[0.1, 0.5, 0.9] {
            let model = counterexample_model(alpha).unwrap();
            let dist = Distribution::bernoulli(0.5).unwrap();
            let pi1 = Policy::new(vec![0; 5], &model).unwrap();
            let pi2 = Policy::new(vec![1, 0, 0, 0, 0], &model).unwrap();
            let j1 = evaluate_policy(&model, &dist, &pi1, EvalMode::Exact).unwrap();
            let j2 = evaluate_policy(&model, &dist, &pi2, EvalMode::Exact).unwrap();
            assert!((j1.get(0) - 7.0).abs() < 1e-12);
            assert!((j2.get(0) - 6.0).abs() < 1e-12);
        }
    }

    #[test]
    fn empirical_solve_all_ones() {
        // p̂ = 1 gives empirical values 12 − 10p̂ = 2 and 8 − 4p̂ = 4, so the
        // empirical optimum prefers the first action.
        let model = counterexample_model(0.9).unwrap();
        let solved = solve_empirical(&model, &[1], 1e-10).unwrap();
        assert!((solved.value.get(0) - 2.0).abs() < 1e-9);
        assert_eq!(solved.policy.action(0), 0);
    }

    #[test]
    fn empirical_solve_even_split() {
        let model = counterexample_model(0.9).unwrap();
        let solved = solve_empirical(&model, &[0, 1], 1e-10).unwrap();
        assert!((solved.value.get(0) - 6.0).abs() < 1e-9);
        assert_eq!(solved.policy.action(0), 1);
    }

    #[test]
    fn empirical_solve_all_zeros() {
        // p̂ = 0: min(12, 8) = 8 under the second action.
        let model = counterexample_model(0.9).unwrap();
        let solved = solve_empirical(&model, &[0, 0, 0], 1e-10).unwrap();
        assert!((solved.value.get(0) - 8.0).abs() < 1e-9);
        assert_eq!(solved.policy.action(0), 1);
    }

    #[test]
    fn coverage_exact_small_cases() {
        for n in [1u32, 3, 5, 7, 19] {
            let p = counterexample_coverage_exact(n).unwrap();
            assert_eq!(p.reduced(), (1, 2), "n = {n}");
        }
        assert_eq!(counterexample_coverage_exact(2).unwrap().reduced(), (3, 4));
        assert_eq!(
            counterexample_coverage_exact(4).unwrap().reduced(),
            (11, 16)
        );
    }

    #[test]
    fn coverage_decreasing_over_even_sizes() {
        let mut prev = 1.0;
        for n in (2..=40).step_by(2) {
            let p = counterexample_coverage_exact(n).unwrap().to_f64();
            assert!(p < prev, "n = {n}");
            assert!(p > 0.5 && p <= 0.75);
            prev = p;
        }
    }

    #[test]
    fn coverage_rejects_out_of_range() {
        assert!(counterexample_coverage_exact(0).is_err());
        assert!(counterexample_coverage_exact(61).is_err());
    }
}
