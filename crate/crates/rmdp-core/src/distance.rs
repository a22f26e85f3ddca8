//! Distances between distributions on a finite support, and the ψ moduli
//! that relate each distance to the bounded-Lipschitz metric (β ≤ ψ∘d).
//!
//! Catalog:
//! - total variation: `(1/2)Σ|ν−ρ|`, ψ(t) = 2t
//! - Hellinger (squared form): `Σ(√ν−√ρ)²`, ψ(t) = 2√t
//! - Kullback-Leibler: `Σ ν log(ν/ρ)` (∞ off the support of ρ), ψ(t) = √(2t)
//! - χ²: `Σ (ν−ρ)²/ρ` (same convention), ψ(t) = √t
//! - 1-Wasserstein: transport LP under the support metric, ψ(t) = t
//! - bounded Lipschitz: finite LP over `‖f‖∞ + ‖f‖_L ≤ 1`, ψ(t) = t
//! - Prokhorov (one-sided): `inf {δ : ν(T) ≤ ρ(T^δ) + δ ∀T}`, ψ(t) = 2t

use serde::{Deserialize, Serialize};

use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::lp;

/// Largest support for which subset enumeration (Prokhorov) is allowed.
pub const MAX_ENUMERATION_SUPPORT: usize = 16;

/// Absolute tolerance of the Prokhorov bisection. The implementation
/// bisects to 1e-11; 1e-9 is the documented contract.
pub const PROKHOROV_TOL: f64 = 1e-9;

const METRIC_TRIANGLE_TOL: f64 = 1e-12;

/// A finite metric: symmetric, zero-diagonal, nonnegative, triangle
/// inequality within 1e-12.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Metric {
    rows: Vec<Vec<f64>>,
}

impl Metric {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::MetricShape {
                    expected: n,
                    got: row.len(),
                });
            }
            if rows[i][i] != 0.0 {
                return Err(Error::MetricNonzeroDiagonal { i });
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::MetricNegative { i, j });
                }
                if (v - rows[j][i]).abs() > 0.0 {
                    return Err(Error::MetricAsymmetric { i, j });
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if rows[i][j] > rows[i][k] + rows[k][j] + METRIC_TRIANGLE_TOL {
                        return Err(Error::MetricTriangle { i, j, k });
                    }
                }
            }
        }
        Ok(Self { rows })
    }

    /// Metric with `ρ(i,j) = |i - j|` on `{0,..,n-1}`.
    pub fn absolute_difference(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| (i as f64 - j as f64).abs()).collect())
            .collect();
        Self { rows }
    }

    /// Metric with `ρ(i,j) = 1` for `i ≠ j`.
    pub fn discrete(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
            .collect();
        Self { rows }
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn max_entry(&self) -> f64 {
        self.rows
            .iter()
            .flatten()
            .cloned()
            .fold(0.0, f64::max)
    }
}

/// The supported distance functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceKind {
    Tv,
    Hellinger,
    Kl,
    ChiSquared,
    Wasserstein,
    BoundedLipschitz,
    Prokhorov,
}

impl DistanceKind {
    pub const ALL: [DistanceKind; 7] = [
        DistanceKind::Tv,
        DistanceKind::Hellinger,
        DistanceKind::Kl,
        DistanceKind::ChiSquared,
        DistanceKind::Wasserstein,
        DistanceKind::BoundedLipschitz,
        DistanceKind::Prokhorov,
    ];

    /// Whether this distance is defined through the support metric.
    pub fn requires_metric(self) -> bool {
        matches!(
            self,
            DistanceKind::Wasserstein | DistanceKind::BoundedLipschitz | DistanceKind::Prokhorov
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            DistanceKind::Tv => "tv",
            DistanceKind::Hellinger => "hellinger",
            DistanceKind::Kl => "kl",
            DistanceKind::ChiSquared => "chi2",
            DistanceKind::Wasserstein => "wasserstein",
            DistanceKind::BoundedLipschitz => "bl",
            DistanceKind::Prokhorov => "prokhorov",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "tv" => Ok(DistanceKind::Tv),
            "hellinger" => Ok(DistanceKind::Hellinger),
            "kl" => Ok(DistanceKind::Kl),
            "chi2" => Ok(DistanceKind::ChiSquared),
            "wasserstein" => Ok(DistanceKind::Wasserstein),
            "bl" => Ok(DistanceKind::BoundedLipschitz),
            "prokhorov" => Ok(DistanceKind::Prokhorov),
            other => Err(Error::InvalidParameter {
                reason: format!("unknown distance `{other}`"),
            }),
        }
    }
}

impl std::fmt::Display for DistanceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

fn check_pair(
    kind: DistanceKind,
    nu: &Distribution,
    rho: &Distribution,
    metric: Option<&Metric>,
) -> Result<()> {
    if nu.len() != rho.len() {
        return Err(Error::DimensionMismatch {
            expected: nu.len(),
            got: rho.len(),
        });
    }
    if kind.requires_metric() {
        let m = metric.ok_or(Error::MissingMetric { kind: kind.name() })?;
        if m.size() != nu.len() {
            return Err(Error::DimensionMismatch {
                expected: nu.len(),
                got: m.size(),
            });
        }
    }
    Ok(())
}

/// Distance of the given kind between `nu` and `rho` (possibly `+∞` for the
/// divergences). Order matters for KL and χ²: the first argument is the
/// candidate, the second the reference.
pub fn distance(
    kind: DistanceKind,
    nu: &Distribution,
    rho: &Distribution,
    metric: Option<&Metric>,
) -> Result<f64> {
    check_pair(kind, nu, rho, metric)?;
    match kind {
        DistanceKind::Tv => Ok(total_variation(nu, rho)),
        DistanceKind::Hellinger => Ok(hellinger(nu, rho)),
        DistanceKind::Kl => Ok(kl_divergence(nu, rho)),
        DistanceKind::ChiSquared => Ok(chi_squared(nu, rho)),
        DistanceKind::Wasserstein => lp::transport_value(nu, rho, metric.unwrap()),
        DistanceKind::BoundedLipschitz => bounded_lipschitz(nu, rho, metric.unwrap()),
        DistanceKind::Prokhorov => prokhorov(nu, rho, metric.unwrap()),
    }
}

pub fn total_variation(nu: &Distribution, rho: &Distribution) -> f64 {
    0.5 * nu
        .mass()
        .iter()
        .zip(rho.mass())
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
}

/// Squared-form Hellinger distance `Σ(√ν−√ρ)²`, with values in `[0, 2]`.
pub fn hellinger(nu: &Distribution, rho: &Distribution) -> f64 {
    nu.mass()
        .iter()
        .zip(rho.mass())
        .map(|(a, b)| {
            let d = a.sqrt() - b.sqrt();
            d * d
        })
        .sum()
}

/// `Σ ν log(ν/ρ)` with `0·log(0/·) = 0`; `+∞` when `ν` puts mass outside
/// the support of `ρ`.
pub fn kl_divergence(nu: &Distribution, rho: &Distribution) -> f64 {
    let mut acc = 0.0;
    for (&a, &b) in nu.mass().iter().zip(rho.mass()) {
        if a == 0.0 {
            continue;
        }
        if b == 0.0 {
            return f64::INFINITY;
        }
        acc += a * (a / b).ln();
    }
    acc.max(0.0)
}

/// `Σ ρ (ν/ρ − 1)²` with the same absolute-continuity convention as KL.
pub fn chi_squared(nu: &Distribution, rho: &Distribution) -> f64 {
    let mut acc = 0.0;
    for (&a, &b) in nu.mass().iter().zip(rho.mass()) {
        if b == 0.0 {
            if a > 0.0 {
                return f64::INFINITY;
            }
            continue;
        }
        let d = a - b;
        acc += d * d / b;
    }
    acc
}

/// Bounded-Lipschitz metric via the finite LP.
pub fn bounded_lipschitz(nu: &Distribution, rho: &Distribution, metric: &Metric) -> Result<f64> {
    let diff: Vec<f64> = nu
        .mass()
        .iter()
        .zip(rho.mass())
        .map(|(a, b)| a - b)
        .collect();
    Ok(lp::bounded_lipschitz_lp(&diff, metric)?.0)
}

/// Dilation of the atom set `t_mask` by radius `delta`; `strict` selects
/// `ρ < δ` (the distance definition) versus `ρ ≤ δ` (ball membership).
pub(crate) fn dilate(metric: &Metric, t_mask: u32, delta: f64, strict: bool) -> u32 {
    let n = metric.size();
    let mut out = 0u32;
    for z in 0..n {
        for y in 0..n {
            if t_mask >> y & 1 == 0 {
                continue;
            }
            let d = metric.get(z, y);
            if (strict && d < delta) || (!strict && d <= delta) {
                out |= 1 << z;
                break;
            }
        }
    }
    out
}

pub(crate) fn mask_mass(mass: &[f64], mask: u32) -> f64 {
    let mut acc = 0.0;
    for (i, &p) in mass.iter().enumerate() {
        if mask >> i & 1 == 1 {
            acc += p;
        }
    }
    acc
}

/// One-sided Prokhorov distance
/// `inf {δ > 0 : ν(T) ≤ ρ(T^δ) + δ for all T}` with `T^δ = {z : ρ(z,T) < δ}`,
/// computed by bisection with subset enumeration. Supports of size at most
/// [`MAX_ENUMERATION_SUPPORT`].
pub fn prokhorov(nu: &Distribution, rho: &Distribution, metric: &Metric) -> Result<f64> {
    let n = nu.len();
    if n > MAX_ENUMERATION_SUPPORT {
        return Err(Error::SupportTooLarge {
            kind: "prokhorov",
            size: n,
            max: MAX_ENUMERATION_SUPPORT,
        });
    }
    let holds = |delta: f64| -> bool {
        for t in 1u32..(1 << n) {
            let dilated = dilate(metric, t, delta, true);
            if mask_mass(nu.mass(), t) > mask_mass(rho.mass(), dilated) + delta {
                return false;
            }
        }
        true
    };
    // ν(T) ≤ 1 ≤ ρ(T^δ) + δ at δ = 1, so the distance never exceeds 1.
    let mut lo = 0.0;
    let mut hi = 1.0;
    // The infimum is over δ > 0; if the condition already holds for
    // arbitrarily small δ (T^δ shrinks to the zero-distance closure of T),
    // the distance is exactly zero.
    if holds(f64::MIN_POSITIVE) {
        return Ok(0.0);
    }
    while hi - lo > 1e-11 {
        let mid = 0.5 * (lo + hi);
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// The modulus ψ relating each distance to the bounded-Lipschitz metric.
pub fn psi(kind: DistanceKind, t: f64) -> f64 {
    debug_assert!(t >= 0.0);
    match kind {
        DistanceKind::Tv => 2.0 * t,
        DistanceKind::Hellinger => 2.0 * t.sqrt(),
        DistanceKind::Kl => (2.0 * t).sqrt(),
        DistanceKind::ChiSquared => t.sqrt(),
        DistanceKind::Wasserstein => t,
        DistanceKind::BoundedLipschitz => t,
        DistanceKind::Prokhorov => 2.0 * t,
    }
}

/// Inverse of [`psi`]; every ψ in the catalog is strictly increasing.
pub fn psi_inverse(kind: DistanceKind, y: f64) -> f64 {
    debug_assert!(y >= 0.0);
    match kind {
        DistanceKind::Tv => y / 2.0,
        DistanceKind::Hellinger => {
            let h = y / 2.0;
            h * h
        }
        DistanceKind::Kl => y * y / 2.0,
        DistanceKind::ChiSquared => y * y,
        DistanceKind::Wasserstein => y,
        DistanceKind::BoundedLipschitz => y,
        DistanceKind::Prokhorov => y / 2.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(mass: &[f64]) -> Distribution {
        Distribution::new(mass.to_vec()).unwrap()
    }

    #[test]
    fn tv_disjoint_masses() {
        let nu = dist(&[1.0, 0.0]);
        let rho = dist(&[0.0, 1.0]);
        assert_eq!(total_variation(&nu, &rho), 1.0);
    }

    #[test]
    fn kl_of_identical_is_zero() {
        let nu = dist(&[0.3, 0.7]);
        assert_eq!(kl_divergence(&nu, &nu), 0.0);
    }

    #[test]
    fn kl_infinite_off_support() {
        let nu = dist(&[0.5, 0.5]);
        let rho = dist(&[1.0, 0.0]);
        assert!(kl_divergence(&nu, &rho).is_infinite());
        assert!(chi_squared(&nu, &rho).is_infinite());
    }

    #[test]
    fn chi_squared_example() {
        let nu = dist(&[0.6, 0.4]);
        let rho = dist(&[0.5, 0.5]);
        assert!((chi_squared(&nu, &rho) - 0.04).abs() < 1e-15);
    }

    #[test]
    fn hellinger_squared_form_range() {
        let nu = dist(&[1.0, 0.0]);
        let rho = dist(&[0.0, 1.0]);
        assert!((hellinger(&nu, &rho) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn wasserstein_single_transport_plan() {
        let metric = Metric::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let nu = dist(&[1.0, 0.0]);
        let rho = dist(&[0.0, 1.0]);
        let w = distance(DistanceKind::Wasserstein, &nu, &rho, Some(&metric)).unwrap();
        assert!((w - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bounded_lipschitz_dirac_pair() {
        // optimum at f = (1/3, -1/3), s = 1/3, r = 2/3
        let metric = Metric::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let nu = dist(&[1.0, 0.0]);
        let rho = dist(&[0.0, 1.0]);
        let b = distance(DistanceKind::BoundedLipschitz, &nu, &rho, Some(&metric)).unwrap();
        assert!((b - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn prokhorov_dirac_pair() {
        let metric = Metric::new(vec![vec![0.0, 0.5], vec![0.5, 0.0]]).unwrap();
        let nu = dist(&[1.0, 0.0]);
        let rho = dist(&[0.0, 1.0]);
        let p = distance(DistanceKind::Prokhorov, &nu, &rho, Some(&metric)).unwrap();
        assert!((p - 0.5).abs() < 1e-9);
    }

    #[test]
    fn prokhorov_self_distance_zero() {
        let metric = Metric::absolute_difference(3);
        let nu = dist(&[0.2, 0.5, 0.3]);
        assert_eq!(prokhorov(&nu, &nu, &metric).unwrap(), 0.0);
    }

    #[test]
    fn missing_metric_is_an_error() {
        let nu = dist(&[0.5, 0.5]);
        assert!(matches!(
            distance(DistanceKind::Wasserstein, &nu, &nu, None),
            Err(Error::MissingMetric { .. })
        ));
    }

    #[test]
    fn psi_table_values() {
        assert!((psi(DistanceKind::Kl, 0.02) - 0.2).abs() < 1e-15);
        assert_eq!(psi(DistanceKind::Wasserstein, 0.37), 0.37);
        for kind in DistanceKind::ALL {
            assert_eq!(psi(kind, 0.0), 0.0);
        }
    }

    #[test]
    fn psi_inverse_examples() {
        assert!((psi_inverse(DistanceKind::Tv, 0.4) - 0.2).abs() < 1e-15);
        assert!((psi_inverse(DistanceKind::Kl, 0.2) - 0.02).abs() < 1e-15);
        assert!((psi_inverse(DistanceKind::Hellinger, 1.0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn metric_validation_errors() {
        assert!(matches!(
            Metric::new(vec![vec![0.0, 1.0], vec![2.0, 0.0]]),
            Err(Error::MetricAsymmetric { .. })
        ));
        assert!(matches!(
            Metric::new(vec![vec![0.5, 1.0], vec![1.0, 0.0]]),
            Err(Error::MetricNonzeroDiagonal { .. })
        ));
        // 0 -- 1 -- 2 with a long direct edge violates the triangle inequality
        assert!(matches!(
            Metric::new(vec![
                vec![0.0, 1.0, 5.0],
                vec![1.0, 0.0, 1.0],
                vec![5.0, 1.0, 0.0],
            ]),
            Err(Error::MetricTriangle { .. })
        ));
    }
}
