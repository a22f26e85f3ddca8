//! Seeded random instances shared across the test suites.
//!
//! Compiled only for tests or under the `testutil` feature.

use rand::Rng;

use crate::distance::Metric;
use crate::distribution::Distribution;
use crate::model::{MdpModel, ValueFunction};

/// Random distribution with every atom at least `floor` away from zero,
/// keeping divergence-based distances finite and smooth.
pub fn random_distribution<R: Rng>(rng: &mut R, n: usize, floor: f64) -> Distribution {
    let raw: Vec<f64> = (0..n).map(|_| floor + rng.gen::<f64>()).collect();
    let sum: f64 = raw.iter().sum();
    Distribution::new(raw.iter().map(|v| v / sum).collect()).unwrap()
}

/// Random metric realized as Euclidean distances of random points in the
/// plane, so symmetry and the triangle inequality hold by construction.
pub fn random_metric<R: Rng>(rng: &mut R, n: usize) -> Metric {
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen(), rng.gen())).collect();
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        0.0
                    } else {
                        let dx = pts[i].0 - pts[j].0;
                        let dy = pts[i].1 - pts[j].1;
                        (dx * dx + dy * dy).sqrt()
                    }
                })
                .collect()
        })
        .collect();
    Metric::new(rows).unwrap()
}

/// Random payoff vector with entries in `[0, scale]`.
pub fn random_payoff<R: Rng>(rng: &mut R, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| scale * rng.gen::<f64>()).collect()
}

/// Random finite value function with entries in `[0, scale]`.
pub fn random_value<R: Rng>(rng: &mut R, n: usize, scale: f64) -> ValueFunction {
    ValueFunction::new((0..n).map(|_| scale * rng.gen::<f64>()).collect()).unwrap()
}

/// Random MDP with full action sets, random dynamics and costs in `[0,1]`,
/// a random discount in `[0.3, 0.9]`, and a random disturbance distribution.
pub fn random_model<R: Rng>(
    rng: &mut R,
    n_states: usize,
    n_actions: usize,
    n_disturbances: usize,
) -> (MdpModel, Distribution) {
    let states = (0..n_states).map(|i| format!("s{i}")).collect();
    let actions = (0..n_actions).map(|i| format!("a{i}")).collect();
    let admissible = vec![(0..n_actions).collect::<Vec<_>>(); n_states];
    let disturbances = (0..n_disturbances).map(|i| format!("w{i}")).collect();
    let w_metric = random_metric(rng, n_disturbances);
    let x_metric = random_metric(rng, n_states);
    let discount = 0.3 + 0.6 * rng.gen::<f64>();
    let mut table = vec![vec![vec![(0usize, 0.0f64); n_disturbances]; n_actions]; n_states];
    for row in table.iter_mut() {
        for entry in row.iter_mut() {
            for cell in entry.iter_mut() {
                *cell = (rng.gen_range(0..n_states), rng.gen::<f64>());
            }
        }
    }
    let model = MdpModel::from_fn(
        states,
        actions,
        admissible,
        disturbances,
        w_metric,
        Some(x_metric),
        discount,
        |x, a, w| table[x][a][w],
    )
    .unwrap();
    let dist = random_distribution(rng, n_disturbances, 0.05);
    (model, dist)
}
