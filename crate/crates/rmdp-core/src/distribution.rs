//! Probability distributions on a finite disturbance support.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the total-mass invariant.
pub const MASS_TOL: f64 = 1e-12;

/// A probability vector over a finite support `{0, .., n-1}`.
///
/// Entries are nonnegative and sum to one within [`MASS_TOL`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Distribution {
    mass: Vec<f64>,
}

impl Distribution {
    /// Validates and wraps a probability vector.
    pub fn new(mass: Vec<f64>) -> Result<Self> {
        if mass.is_empty() {
            return Err(Error::InvalidDistribution {
                reason: "empty support".into(),
            });
        }
        for (i, &p) in mass.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidDistribution {
                    reason: format!("entry {i} is {p}"),
                });
            }
        }
        let sum: f64 = mass.iter().sum();
        if (sum - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidDistribution {
                reason: format!("mass sums to {sum}"),
            });
        }
        Ok(Self { mass })
    }

    /// Builds a distribution from raw solver output: clamps tiny negative
    /// entries to zero and renormalizes. Rejects vectors that are not close
    /// to a probability vector to begin with.
    pub fn from_unnormalized(mass: Vec<f64>) -> Result<Self> {
        let mut mass = mass;
        for (i, p) in mass.iter_mut().enumerate() {
            if !p.is_finite() || *p < -1e-7 {
                return Err(Error::InvalidDistribution {
                    reason: format!("entry {i} is {p}"),
                });
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let sum: f64 = mass.iter().sum();
        if (sum - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidDistribution {
                reason: format!("mass sums to {sum}"),
            });
        }
        for p in mass.iter_mut() {
            *p /= sum;
        }
        Ok(Self { mass })
    }

    /// Uniform distribution on `n` atoms.
    pub fn uniform(n: usize) -> Self {
        Self {
            mass: vec![1.0 / n as f64; n],
        }
    }

    /// Point mass at `atom` on a support of size `n`.
    pub fn dirac(atom: usize, n: usize) -> Result<Self> {
        if atom >= n {
            return Err(Error::IndexOutOfRange {
                index: atom,
                size: n,
            });
        }
        let mut mass = vec![0.0; n];
        mass[atom] = 1.0;
        Ok(Self { mass })
    }

    /// Two-point distribution on `{0,1}` with `P[w = 1] = p`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidDistribution {
                reason: format!("bernoulli parameter {p}"),
            });
        }
        Ok(Self {
            mass: vec![1.0 - p, p],
        })
    }

    /// Empirical distribution of `samples` over a support of size `n`:
    /// `mass(w) = count(w) / N`, renormalized to kill division rounding.
    pub fn from_samples(samples: &[usize], n: usize) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySamples);
        }
        let mut counts = vec![0u64; n];
        for &s in samples {
            if s >= n {
                return Err(Error::IndexOutOfRange { index: s, size: n });
            }
            counts[s] += 1;
        }
        let total = samples.len() as f64;
        let mut mass: Vec<f64> = counts.iter().map(|&c| c as f64 / total).collect();
        let sum: f64 = mass.iter().sum();
        for p in mass.iter_mut() {
            *p /= sum;
        }
        Ok(Self { mass })
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn get(&self, atom: usize) -> f64 {
        self.mass[atom]
    }

    /// Indices carrying strictly positive mass.
    pub fn support(&self) -> Vec<usize> {
        (0..self.mass.len()).filter(|&i| self.mass[i] > 0.0).collect()
    }

    /// Expectation of a payoff vector under this distribution.
    ///
    /// Plain left-to-right accumulation; every expectation in the crate goes
    /// through here so identical inputs produce bit-identical sums.
    pub fn expectation(&self, payoff: &[f64]) -> f64 {
        debug_assert_eq!(payoff.len(), self.mass.len());
        let mut acc = 0.0;
        for (p, g) in self.mass.iter().zip(payoff) {
            acc += p * g;
        }
        acc
    }

    /// Draws one atom index by inverse-CDF sampling.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen::<f64>();
        let mut acc = 0.0;
        for (i, &p) in self.mass.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        self.mass.len() - 1
    }

    /// Draws `n` iid atom indices.
    pub fn sample_many<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<usize> {
        (0..n).map(|_| self.sample(rng)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empirical_two_atoms() {
        let d = Distribution::from_samples(&[0, 1], 2).unwrap();
        assert_eq!(d.mass(), &[0.5, 0.5]);
    }

    #[test]
    fn empirical_concentrated() {
        let d = Distribution::from_samples(&[1, 1, 1], 2).unwrap();
        assert_eq!(d.mass(), &[0.0, 1.0]);
    }

    #[test]
    fn empirical_counting() {
        let d = Distribution::from_samples(&[0, 0, 1, 2], 3).unwrap();
        assert_eq!(d.mass(), &[0.5, 0.25, 0.25]);
    }

    #[test]
    fn empirical_rejects_empty() {
        assert!(matches!(
            Distribution::from_samples(&[], 2),
            Err(Error::EmptySamples)
        ));
    }

    #[test]
    fn empirical_rejects_out_of_range() {
        assert!(Distribution::from_samples(&[2], 2).is_err());
    }

    #[test]
    fn new_rejects_bad_mass() {
        assert!(Distribution::new(vec![0.5, 0.6]).is_err());
        assert!(Distribution::new(vec![-0.1, 1.1]).is_err());
        assert!(Distribution::new(vec![]).is_err());
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let d = Distribution::new(vec![0.2, 0.3, 0.5]).unwrap();
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        assert_eq!(d.sample_many(&mut a, 100), d.sample_many(&mut b, 100));
    }

    #[test]
    fn sample_frequencies_track_mass() {
        let d = Distribution::new(vec![0.1, 0.9]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let samples = d.sample_many(&mut rng, 20_000);
        let ones = samples.iter().filter(|&&s| s == 1).count() as f64 / 20_000.0;
        assert!((ones - 0.9).abs() < 0.02);
    }
}
