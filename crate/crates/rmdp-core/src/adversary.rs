//! Worst-case expectation over a distance ball around a center distribution:
//! `sup { ⟨g, ν⟩ : d(ν, center) ≤ ε }`, the adversary's single-stage problem
//! inside the robust Bellman operator.
//!
//! Each distance kind gets a dedicated solver:
//! - TV: closed-form greedy mass transfer onto the best atom
//! - KL: one-dimensional convex dual `min_λ λε + λ log Σ μ̂ e^{g/λ}`
//! - χ²: exact active-set sweep over the sorted payoff structure
//! - Wasserstein: piecewise-linear dual minimized over its breakpoints,
//!   witness recovered from the transport LP
//! - Hellinger: Bhattacharyya reformulation solved by nested line searches
//! - bounded Lipschitz: cutting planes separated by the β LP
//! - Prokhorov: polymatroid greedy over submodular subset caps
//!
//! A simplex-grid oracle ([`brute_force_worst_case`]) provides the
//! independent route used to validate every solver.

use serde::{Deserialize, Serialize};

use crate::distance::{dilate, mask_mass, DistanceKind, Metric, MAX_ENUMERATION_SUPPORT};
use crate::distribution::Distribution;
use crate::error::{Error, Result};
use crate::lp;
use crate::polytope::enumerate_vertices;

/// The ambiguity ball `{ν : d(ν, center) ≤ radius}`.
///
/// Membership uses the non-strict inequality, so the center always belongs
/// (`d(ν,ν) = 0`) and the set is closed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AmbiguitySpec {
    pub kind: DistanceKind,
    pub center: Distribution,
    pub radius: f64,
    pub w_metric: Option<Metric>,
}

impl AmbiguitySpec {
    pub fn new(
        kind: DistanceKind,
        center: Distribution,
        radius: f64,
        w_metric: Option<Metric>,
    ) -> Result<Self> {
        if radius.is_nan() || radius < 0.0 {
            return Err(Error::InvalidRadius { value: radius });
        }
        if kind.requires_metric() {
            let m = w_metric
                .as_ref()
                .ok_or(Error::MissingMetric { kind: kind.name() })?;
            if m.size() != center.len() {
                return Err(Error::DimensionMismatch {
                    expected: center.len(),
                    got: m.size(),
                });
            }
        }
        Ok(Self {
            kind,
            center,
            radius,
            w_metric,
        })
    }

    fn metric(&self) -> &Metric {
        self.w_metric.as_ref().expect("validated at construction")
    }
}

/// Value and attaining distribution of a worst-case expectation.
#[derive(Debug, Clone)]
pub struct WorstCase {
    pub value: f64,
    pub witness: Distribution,
}

fn check_payoff(spec: &AmbiguitySpec, payoff: &[f64]) -> Result<()> {
    if payoff.len() != spec.center.len() {
        return Err(Error::DimensionMismatch {
            expected: spec.center.len(),
            got: payoff.len(),
        });
    }
    if let Some(i) = payoff.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinitePayoff { index: i });
    }
    Ok(())
}

fn argmax_lowest(payoff: &[f64]) -> usize {
    let mut best = 0;
    for (i, &g) in payoff.iter().enumerate() {
        if g > payoff[best] {
            best = i;
        }
    }
    best
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves `sup ⟨g, ν⟩` over the ball, returning the value and a feasible
/// witness attaining it within solver tolerance (1e-8).
pub fn worst_case_expectation(spec: &AmbiguitySpec, payoff: &[f64]) -> Result<WorstCase> {
    check_payoff(spec, payoff)?;
    // ε = 0: the ball is the singleton {center} since d(ν,ν) = 0.
    if spec.radius == 0.0 {
        return Ok(WorstCase {
            value: spec.center.expectation(payoff),
            witness: spec.center.clone(),
        });
    }
    // ε = ∞: every distribution is within distance ∞, whole simplex.
    if spec.radius.is_infinite() {
        let best = argmax_lowest(payoff);
        return Ok(WorstCase {
            value: payoff[best],
            witness: Distribution::dirac(best, payoff.len())?,
        });
    }
    match spec.kind {
        DistanceKind::Tv => tv_worst_case(&spec.center, spec.radius, payoff),
        DistanceKind::Kl => kl_worst_case(&spec.center, spec.radius, payoff),
        DistanceKind::ChiSquared => chi2_worst_case(&spec.center, spec.radius, payoff),
        DistanceKind::Wasserstein => {
            wasserstein_worst_case(&spec.center, spec.metric(), spec.radius, payoff)
        }
        DistanceKind::Hellinger => hellinger_worst_case(&spec.center, spec.radius, payoff),
        DistanceKind::BoundedLipschitz => {
            bl_worst_case(&spec.center, spec.metric(), spec.radius, payoff)
        }
        DistanceKind::Prokhorov => {
            prokhorov_worst_case(&spec.center, spec.metric(), spec.radius, payoff)
        }
    }
}

/// TV ball `{ν : (1/2)Σ|ν−μ̂| ≤ ε}`: move up to ε of mass from the
/// lowest-payoff atoms onto the best atom.
fn tv_worst_case(center: &Distribution, eps: f64, payoff: &[f64]) -> Result<WorstCase> {
    let n = payoff.len();
    let target = argmax_lowest(payoff);
    let mut nu = center.mass().to_vec();
    let mut order: Vec<usize> = (0..n).filter(|&i| i != target).collect();
    order.sort_by(|&i, &j| payoff[i].partial_cmp(&payoff[j]).unwrap().then(i.cmp(&j)));
    let mut budget = eps;
    for i in order {
        if budget <= 0.0 || payoff[i] >= payoff[target] {
            break;
        }
        let take = budget.min(nu[i]);
        nu[i] -= take;
        nu[target] += take;
        budget -= take;
    }
    Ok(WorstCase {
        value: dot(payoff, &nu),
        witness: Distribution::from_unnormalized(nu)?,
    })
}

/// KL ball: dual `min_{λ>0} λε + λ log Σ_supp μ̂ e^{g/λ}`, with the λ→0
/// limit `max_{supp} g` taken explicitly once the point mass on the best
/// atoms is itself feasible.
fn kl_worst_case(center: &Distribution, eps: f64, payoff: &[f64]) -> Result<WorstCase> {
    let supp = center.support();
    let g_max = supp
        .iter()
        .map(|&i| payoff[i])
        .fold(f64::NEG_INFINITY, f64::max);
    let mass_at_max: f64 = supp
        .iter()
        .filter(|&&i| payoff[i] >= g_max)
        .map(|&i| center.get(i))
        .sum();
    // Concentrating on the argmax set costs KL = -log(mass there).
    if eps >= -mass_at_max.ln() {
        let mut nu = vec![0.0; payoff.len()];
        for &i in &supp {
            if payoff[i] >= g_max {
                nu[i] = center.get(i) / mass_at_max;
            }
        }
        return Ok(WorstCase {
            value: g_max,
            witness: Distribution::from_unnormalized(nu)?,
        });
    }
    let dual = |lambda: f64| -> f64 {
        let z: f64 = supp
            .iter()
            .map(|&i| center.get(i) * ((payoff[i] - g_max) / lambda).exp())
            .sum();
        lambda * eps + g_max + lambda * z.ln()
    };
    // The dual derivative is ε − KL(tilt_λ ‖ μ̂), increasing in λ, so the
    // minimizer is the root of KL(tilt_λ) = ε; locate it by bisection.
    let tilt_kl = |lambda: f64| -> f64 {
        let mut z = 0.0;
        let mut mean_shift = 0.0;
        for &i in &supp {
            let e = center.get(i) * ((payoff[i] - g_max) / lambda).exp();
            z += e;
            mean_shift += e * (payoff[i] - g_max);
        }
        mean_shift / (z * lambda) - z.ln()
    };
    let spread = supp
        .iter()
        .map(|&i| g_max - payoff[i])
        .fold(0.0, f64::max)
        .max(1.0);
    let mut lo = 1e-12;
    let mut hi = spread;
    while tilt_kl(hi) > eps {
        hi *= 2.0;
        if hi > 1e15 {
            break;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if tilt_kl(mid) > eps {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    let lambda = 0.5 * (lo + hi);
    let mut nu = vec![0.0; payoff.len()];
    let mut z = 0.0;
    for &i in &supp {
        nu[i] = center.get(i) * ((payoff[i] - g_max) / lambda).exp();
        z += nu[i];
    }
    for v in nu.iter_mut() {
        *v /= z;
    }
    Ok(WorstCase {
        value: dual(lambda),
        witness: Distribution::from_unnormalized(nu)?,
    })
}

/// χ² ball: enumerate active sets in ascending payoff order. Zeroing a set
/// Z of support atoms costs `μ̂(Z) + μ̂(Z)²/μ̂(C)` of the budget; on the
/// complement the optimizer is the parametric tilt
/// `ν_i = μ̂_i (1 + t (g_i − θ))`.
fn chi2_worst_case(center: &Distribution, eps: f64, payoff: &[f64]) -> Result<WorstCase> {
    let mut supp = center.support();
    supp.sort_by(|&i, &j| payoff[i].partial_cmp(&payoff[j]).unwrap().then(i.cmp(&j)));
    let mut best: Option<(f64, Vec<f64>)> = None;
    for k in 0..supp.len() {
        let zeroed = &supp[..k];
        let active = &supp[k..];
        let m_s: f64 = zeroed.iter().map(|&i| center.get(i)).sum();
        let budget = eps - m_s;
        if budget < -1e-15 {
            break;
        }
        let m1: f64 = active.iter().map(|&i| center.get(i)).sum();
        let mg: f64 = active.iter().map(|&i| center.get(i) * payoff[i]).sum();
        let q: f64 = active
            .iter()
            .map(|&i| center.get(i) * payoff[i] * payoff[i])
            .sum();
        let var_term = (q - mg * mg / m1).max(0.0);
        let needed = m_s * m_s / m1;
        if budget + 1e-15 < needed {
            continue;
        }
        let mut nu = vec![0.0; payoff.len()];
        let t = if var_term > 1e-14 {
            ((budget - needed).max(0.0) / var_term).sqrt()
        } else {
            0.0
        };
        if t < 1e-13 {
            // Proportional redistribution; also the t→0 limit of the tilt.
            for &i in active {
                nu[i] = center.get(i) / m1;
            }
        } else {
            let theta = (mg - m_s / t) / m1;
            let mut ok = true;
            for &i in active {
                let v = center.get(i) * (1.0 + t * (payoff[i] - theta));
                if v < -1e-12 {
                    ok = false;
                    break;
                }
                nu[i] = v.max(0.0);
            }
            if !ok {
                continue;
            }
        }
        let value = dot(payoff, &nu);
        if best.as_ref().is_none_or(|(v, _)| value > *v) {
            best = Some((value, nu));
        }
    }
    let (value, nu) = best.expect("k = 0 is always feasible");
    Ok(WorstCase {
        value,
        witness: Distribution::from_unnormalized(nu)?,
    })
}

/// Wasserstein ball: exact dual
/// `min_{λ≥0} λε + Σ_i μ̂_i max_j (g_j − λ ρ(i,j))`,
/// piecewise linear in λ, minimized over the breakpoint set.
/// The witness marginal comes from the transport LP.
fn wasserstein_worst_case(
    center: &Distribution,
    metric: &Metric,
    eps: f64,
    payoff: &[f64],
) -> Result<WorstCase> {
    let n = payoff.len();
    let dual = |lambda: f64| -> f64 {
        let mut acc = lambda * eps;
        for i in 0..n {
            let w = center.get(i);
            if w == 0.0 {
                continue;
            }
            let mut best = f64::NEG_INFINITY;
            for j in 0..n {
                best = best.max(payoff[j] - lambda * metric.get(i, j));
            }
            acc += w * best;
        }
        acc
    };
    let mut value = dual(0.0);
    for i in 0..n {
        if center.get(i) == 0.0 {
            continue;
        }
        for j in 0..n {
            for k in j + 1..n {
                let dr = metric.get(i, j) - metric.get(i, k);
                if dr == 0.0 {
                    continue;
                }
                let lambda = (payoff[j] - payoff[k]) / dr;
                if lambda > 0.0 && lambda.is_finite() {
                    value = value.min(dual(lambda));
                }
            }
        }
    }
    let (_, witness) = lp::transport_ball_max(center, metric, payoff, eps)?;
    Ok(WorstCase { value, witness })
}

/// Hellinger ball in Bhattacharyya form: `Σ(√ν−√μ̂)² ≤ ε` is
/// `BC(ν, μ̂) ≥ 1 − ε/2`. Mass may leave the support of the center (BC drops
/// by exactly the amount moved); the best placement off-support is the
/// single highest-payoff atom. A nested line search solves the two levels:
/// off-support mass outside, multiplier θ of the in-support tilt
/// `ν_i ∝ μ̂_i/(θ−g_i)²` inside.
fn hellinger_worst_case(center: &Distribution, eps: f64, payoff: &[f64]) -> Result<WorstCase> {
    let n = payoff.len();
    if n > MAX_ENUMERATION_SUPPORT {
        return Err(Error::SupportTooLarge {
            kind: "hellinger",
            size: n,
            max: MAX_ENUMERATION_SUPPORT,
        });
    }
    let best_any = argmax_lowest(payoff);
    let rho0 = 1.0 - eps / 2.0;
    if rho0 <= 0.0 {
        // Ball is the whole simplex: Hellinger never exceeds 2.
        return Ok(WorstCase {
            value: payoff[best_any],
            witness: Distribution::dirac(best_any, n)?,
        });
    }
    let supp = center.support();
    let best_off = (0..n)
        .filter(|&i| center.get(i) == 0.0)
        .max_by(|&i, &j| payoff[i].partial_cmp(&payoff[j]).unwrap().then(j.cmp(&i)));

    // Maximizes the in-support part at total mass `m`, subject to
    // BC(ν, μ̂) ≥ rho0. Requires m ≥ rho0².
    let inner = |m: f64| -> (f64, Vec<f64>) {
        let g_max = supp
            .iter()
            .map(|&i| payoff[i])
            .fold(f64::NEG_INFINITY, f64::max);
        let g_min = supp
            .iter()
            .map(|&i| payoff[i])
            .fold(f64::INFINITY, f64::min);
        let mass_at_max: f64 = supp
            .iter()
            .filter(|&&i| payoff[i] >= g_max)
            .map(|&i| center.get(i))
            .sum();
        let mut nu = vec![0.0; n];
        // Concentrating mass m on the argmax set has BC = √(m·μ̂(argmax)).
        if (m * mass_at_max).sqrt() >= rho0 {
            for &i in &supp {
                if payoff[i] >= g_max {
                    nu[i] = m * center.get(i) / mass_at_max;
                }
            }
            return (m * g_max, nu);
        }
        let target = rho0 / m.sqrt();
        if g_max - g_min < 1e-14 || target >= 1.0 - 1e-12 {
            // Constant payoff, or the tilt-free profile is already extremal.
            for &i in &supp {
                nu[i] = m * center.get(i);
            }
            return (m * supp.iter().map(|&i| center.get(i) * payoff[i]).sum::<f64>(), nu);
        }
        // BC along the tilt family is increasing in θ; bisect on
        // h(θ) = A/√B with A = Σ μ̂/(θ−g), B = Σ μ̂/(θ−g)².
        let h = |theta: f64| -> f64 {
            let mut a = 0.0;
            let mut b = 0.0;
            for &i in &supp {
                let d = theta - payoff[i];
                a += center.get(i) / d;
                b += center.get(i) / (d * d);
            }
            a / b.sqrt()
        };
        let spread = (g_max - g_min).max(1.0);
        let mut lo = g_max + 1e-13 * spread;
        let mut hi = g_max + spread;
        while h(hi) < target {
            hi = g_max + 2.0 * (hi - g_max);
            if hi - g_max > 1e16 {
                break;
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if h(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let theta = 0.5 * (lo + hi);
        let mut b = 0.0;
        let mut vg = 0.0;
        for &i in &supp {
            let d = theta - payoff[i];
            b += center.get(i) / (d * d);
            vg += center.get(i) * payoff[i] / (d * d);
        }
        for &i in &supp {
            let d = theta - payoff[i];
            nu[i] = m * (center.get(i) / (d * d)) / b;
        }
        (m * vg / b, nu)
    };

    let assemble = |m: f64| -> (f64, Vec<f64>) {
        let (val_in, mut nu) = inner(m);
        let total = match best_off {
            Some(j) => {
                nu[j] = 1.0 - m;
                val_in + (1.0 - m) * payoff[j]
            }
            None => val_in,
        };
        (total, nu)
    };

    let (value, nu) = match best_off {
        None => assemble(1.0),
        Some(_) => {
            // Outer concave maximization over the in-support mass.
            let m_lo = (rho0 * rho0).min(1.0);
            let (mut a, mut b) = (m_lo, 1.0);
            let phi = 0.5 * (5f64.sqrt() - 1.0);
            let mut x1 = b - phi * (b - a);
            let mut x2 = a + phi * (b - a);
            let (mut f1, mut f2) = (assemble(x1).0, assemble(x2).0);
            for _ in 0..160 {
                if f1 >= f2 {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - phi * (b - a);
                    f1 = assemble(x1).0;
                } else {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + phi * (b - a);
                    f2 = assemble(x2).0;
                }
            }
            let mid = 0.5 * (a + b);
            let cand = [assemble(mid), assemble(m_lo), assemble(1.0)];
            cand.into_iter()
                .max_by(|x, y| x.0.partial_cmp(&y.0).unwrap())
                .unwrap()
        }
    };
    Ok(WorstCase {
        value,
        witness: Distribution::from_unnormalized(nu)?,
    })
}

/// Bounded-Lipschitz ball by cutting planes: maximize over the simplex,
/// separating violated constraints `⟨f, ν − μ̂⟩ ≤ ε` with the β LP until the
/// iterate is feasible to 1e-9.
fn bl_worst_case(
    center: &Distribution,
    metric: &Metric,
    eps: f64,
    payoff: &[f64],
) -> Result<WorstCase> {
    let mut cuts: Vec<(Vec<f64>, f64)> = Vec::new();
    for _ in 0..500 {
        let (value, nu) = lp::simplex_max_with_cuts(payoff, &cuts)?;
        let diff: Vec<f64> = nu
            .mass()
            .iter()
            .zip(center.mass())
            .map(|(a, b)| a - b)
            .collect();
        let (beta, f) = lp::bounded_lipschitz_lp(&diff, metric)?;
        if beta <= eps + 1e-9 {
            return Ok(WorstCase { value, witness: nu });
        }
        let bound = dot(&f, center.mass()) + eps;
        cuts.push((f, bound));
    }
    Err(Error::SolverFailure {
        reason: "cutting-plane loop did not reach feasibility".into(),
    })
}

/// Prokhorov ball `{ν : ν(T) ≤ μ̂(T^ε) + ε ∀ T}` (closed dilation, which on
/// a finite support is exactly the sublevel set of the one-sided distance).
/// The caps are monotone submodular, so the descending-payoff greedy fill is
/// an exact maximizer.
fn prokhorov_worst_case(
    center: &Distribution,
    metric: &Metric,
    eps: f64,
    payoff: &[f64],
) -> Result<WorstCase> {
    let n = payoff.len();
    if n > MAX_ENUMERATION_SUPPORT {
        return Err(Error::SupportTooLarge {
            kind: "prokhorov",
            size: n,
            max: MAX_ENUMERATION_SUPPORT,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| payoff[j].partial_cmp(&payoff[i]).unwrap().then(i.cmp(&j)));
    let mut nu = vec![0.0; n];
    let mut dilated = 0u32;
    let mut prev_cap = 0.0;
    for &j in &order {
        dilated |= dilate(metric, 1 << j, eps, false);
        let cap = (mask_mass(center.mass(), dilated) + eps).min(1.0);
        nu[j] = (cap - prev_cap).max(0.0);
        prev_cap = cap;
    }
    Ok(WorstCase {
        value: dot(payoff, &nu),
        witness: Distribution::from_unnormalized(nu)?,
    })
}

/// Fast ball-membership tests used by the grid oracle.
enum BallTest {
    Tv {
        center: Vec<f64>,
        eps2: f64,
    },
    Hellinger {
        sqrt_center: Vec<f64>,
        bc_min: f64,
    },
    Kl {
        center: Vec<f64>,
        eps: f64,
    },
    ChiSquared {
        center: Vec<f64>,
        eps: f64,
    },
    /// Wasserstein and bounded Lipschitz: the distance is the support
    /// function of a fixed payoff polytope, evaluated over its vertices.
    Polytope {
        center: Vec<f64>,
        vertices: Vec<Vec<f64>>,
        eps: f64,
    },
    Prokhorov {
        caps: Vec<f64>,
        n_atoms: usize,
    },
}

impl BallTest {
    fn prepare(spec: &AmbiguitySpec) -> Result<Self> {
        let center = spec.center.mass().to_vec();
        let n = center.len();
        let eps = spec.radius;
        Ok(match spec.kind {
            DistanceKind::Tv => BallTest::Tv {
                center,
                eps2: 2.0 * eps + 1e-12,
            },
            DistanceKind::Hellinger => BallTest::Hellinger {
                sqrt_center: center.iter().map(|c| c.sqrt()).collect(),
                bc_min: 1.0 - eps / 2.0 - 1e-12,
            },
            DistanceKind::Kl => BallTest::Kl {
                center,
                eps: eps + 1e-12,
            },
            DistanceKind::ChiSquared => BallTest::ChiSquared {
                center,
                eps: eps + 1e-12,
            },
            DistanceKind::Wasserstein => {
                let metric = spec.metric();
                // Kantorovich polytope {f : f_0 = 0, f_i − f_j ≤ ρ(i,j)}.
                let dim = n - 1;
                let mut rows = Vec::new();
                let mut rhs = Vec::new();
                for i in 0..n {
                    for j in 0..n {
                        if i == j {
                            continue;
                        }
                        let mut row = vec![0.0; dim];
                        if i > 0 {
                            row[i - 1] += 1.0;
                        }
                        if j > 0 {
                            row[j - 1] -= 1.0;
                        }
                        rows.push(row);
                        rhs.push(metric.get(i, j));
                    }
                }
                let vertices = enumerate_vertices(&rows, &rhs, dim)
                    .into_iter()
                    .map(|v| {
                        let mut f = vec![0.0];
                        f.extend(v);
                        f
                    })
                    .collect();
                BallTest::Polytope {
                    center,
                    vertices,
                    eps: eps + 1e-12,
                }
            }
            DistanceKind::BoundedLipschitz => {
                let metric = spec.metric();
                // (f, s, r) with |f_i| ≤ s, f_i − f_j ≤ r ρ(i,j), s + r ≤ 1.
                let dim = n + 2;
                let mut rows = Vec::new();
                let mut rhs = Vec::new();
                for i in 0..n {
                    for sign in [1.0, -1.0] {
                        let mut row = vec![0.0; dim];
                        row[i] = sign;
                        row[n] = -1.0;
                        rows.push(row);
                        rhs.push(0.0);
                    }
                }
                for i in 0..n {
                    for j in 0..n {
                        if i == j {
                            continue;
                        }
                        let mut row = vec![0.0; dim];
                        row[i] = 1.0;
                        row[j] = -1.0;
                        row[n + 1] = -metric.get(i, j);
                        rows.push(row);
                        rhs.push(0.0);
                    }
                }
                let mut budget = vec![0.0; dim];
                budget[n] = 1.0;
                budget[n + 1] = 1.0;
                rows.push(budget);
                rhs.push(1.0);
                for aux in [n, n + 1] {
                    let mut row = vec![0.0; dim];
                    row[aux] = -1.0;
                    rows.push(row);
                    rhs.push(0.0);
                }
                let vertices = enumerate_vertices(&rows, &rhs, dim)
                    .into_iter()
                    .map(|v| v[..n].to_vec())
                    .collect();
                BallTest::Polytope {
                    center,
                    vertices,
                    eps: eps + 1e-12,
                }
            }
            DistanceKind::Prokhorov => {
                let metric = spec.metric();
                let mut caps = vec![0.0; 1 << n];
                for mask in 1u32..(1 << n) {
                    let dilated = dilate(metric, mask, eps, false);
                    caps[mask as usize] = mask_mass(&center, dilated) + eps + 1e-12;
                }
                BallTest::Prokhorov { caps, n_atoms: n }
            }
        })
    }

    #[inline]
    fn contains(&self, nu: &[f64]) -> bool {
        match self {
            BallTest::Tv { center, eps2 } => {
                let mut acc = 0.0;
                for (a, b) in nu.iter().zip(center) {
                    acc += (a - b).abs();
                }
                acc <= *eps2
            }
            BallTest::Hellinger { sqrt_center, bc_min } => {
                let mut bc = 0.0;
                for (a, s) in nu.iter().zip(sqrt_center) {
                    bc += a.sqrt() * s;
                }
                bc >= *bc_min
            }
            BallTest::Kl { center, eps } => {
                let mut acc = 0.0;
                for (a, b) in nu.iter().zip(center) {
                    if *a == 0.0 {
                        continue;
                    }
                    if *b == 0.0 {
                        return false;
                    }
                    acc += a * (a / b).ln();
                }
                acc <= *eps
            }
            BallTest::ChiSquared { center, eps } => {
                let mut acc = 0.0;
                for (a, b) in nu.iter().zip(center) {
                    if *b == 0.0 {
                        if *a > 0.0 {
                            return false;
                        }
                        continue;
                    }
                    let d = a - b;
                    acc += d * d / b;
                }
                acc <= *eps
            }
            BallTest::Polytope {
                center,
                vertices,
                eps,
            } => {
                for f in vertices {
                    let mut acc = 0.0;
                    for ((a, b), fi) in nu.iter().zip(center).zip(f) {
                        acc += (a - b) * fi;
                    }
                    if acc > *eps {
                        return false;
                    }
                }
                true
            }
            BallTest::Prokhorov { caps, n_atoms } => {
                let n = *n_atoms;
                for mask in 1usize..(1 << n) {
                    let mut acc = 0.0;
                    for (i, v) in nu.iter().enumerate().take(n) {
                        if mask >> i & 1 == 1 {
                            acc += v;
                        }
                    }
                    if acc > caps[mask] {
                        return false;
                    }
                }
                true
            }
        }
    }
}

/// Independent oracle: maximum of `⟨g, ν⟩` over the simplex lattice of the
/// given spacing intersected with the ball. Supports of size at most 4.
/// If no lattice point falls inside the ball (possible for tiny radii when
/// the center is off-lattice), the expectation at the center is returned.
pub fn brute_force_worst_case(
    spec: &AmbiguitySpec,
    payoff: &[f64],
    resolution: f64,
) -> Result<f64> {
    check_payoff(spec, payoff)?;
    let n = payoff.len();
    if n > 4 {
        return Err(Error::SupportTooLarge {
            kind: "grid oracle",
            size: n,
            max: 4,
        });
    }
    if !(resolution > 0.0 && resolution <= 0.1) {
        return Err(Error::InvalidParameter {
            reason: format!("oracle resolution {resolution} outside (0, 0.1]"),
        });
    }
    let test = BallTest::prepare(spec)?;
    let k = (1.0 / resolution).round() as usize;
    let inv = 1.0 / k as f64;
    let mut best = f64::NEG_INFINITY;
    let mut point = [0.0f64; 4];
    let mut visit = |point: &[f64]| {
        if test.contains(point) {
            let mut v = 0.0;
            for (p, g) in point.iter().zip(payoff) {
                v += p * g;
            }
            if v > best {
                best = v;
            }
        }
    };
    match n {
        1 => {
            point[0] = 1.0;
            visit(&point[..1]);
        }
        2 => {
            for i in 0..=k {
                point[0] = i as f64 * inv;
                point[1] = (k - i) as f64 * inv;
                visit(&point[..2]);
            }
        }
        3 => {
            for i in 0..=k {
                point[0] = i as f64 * inv;
                for j in 0..=(k - i) {
                    point[1] = j as f64 * inv;
                    point[2] = (k - i - j) as f64 * inv;
                    visit(&point[..3]);
                }
            }
        }
        _ => {
            for i in 0..=k {
                point[0] = i as f64 * inv;
                for j in 0..=(k - i) {
                    point[1] = j as f64 * inv;
                    for l in 0..=(k - i - j) {
                        point[2] = l as f64 * inv;
                        point[3] = (k - i - j - l) as f64 * inv;
                        visit(&point[..4]);
                    }
                }
            }
        }
    }
    if best == f64::NEG_INFINITY {
        return Ok(spec.center.expectation(payoff));
    }
    Ok(best)
}
