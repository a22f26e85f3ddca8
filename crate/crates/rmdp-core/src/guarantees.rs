//! Closed-form guarantee calculators: the Δ constant, the rate bound
//! `2ψ(ε)Δ`, the admissible radius window, the sample-complexity lower
//! bound, and the out-of-distribution bound.

use serde::{Deserialize, Serialize};

use crate::distance::{psi, psi_inverse, DistanceKind, Metric};
use crate::error::{Error, Result};
use crate::model::MdpModel;
use crate::radius::ConcentrationParams;

/// Lipschitz profile of an MDP: `L_c` for the stage cost, `L_F` for the
/// evolution map (both in state and disturbance), `‖c‖∞`, and the discount.
/// The rate formulas require `α·L_F < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipschitzProfile {
    pub c_sup: f64,
    pub l_c: f64,
    pub l_f: f64,
    pub alpha: f64,
}

impl LipschitzProfile {
    pub fn new(c_sup: f64, l_c: f64, l_f: f64, alpha: f64) -> Result<Self> {
        if !(c_sup >= 0.0 && l_c >= 0.0 && l_f >= 0.0) {
            return Err(Error::InvalidParameter {
                reason: "Lipschitz constants must be nonnegative".into(),
            });
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::DiscountOutOfRange { value: alpha });
        }
        Ok(Self {
            c_sup,
            l_c,
            l_f,
            alpha,
        })
    }

    fn check_regime(&self) -> Result<()> {
        let alpha_lf = self.alpha * self.l_f;
        if alpha_lf >= 1.0 {
            return Err(Error::RegimeViolation { alpha_lf });
        }
        Ok(())
    }

    /// The rate constant
    /// `Δ = ‖c‖∞/(1−α)² + L_c/(1−α) + α L_c L_F / ((1−α)(1−α L_F))`.
    pub fn delta_constant(&self) -> Result<f64> {
        self.check_regime()?;
        let one_minus = 1.0 - self.alpha;
        Ok(self.c_sup / (one_minus * one_minus)
            + self.l_c / one_minus
            + self.alpha * self.l_c * self.l_f / (one_minus * (1.0 - self.alpha * self.l_f)))
    }
}

/// Exact Lipschitz constants of a finite model as maxima of difference
/// quotients over the state and disturbance metrics. State pairs are
/// compared over their common admissible actions.
pub fn lipschitz_estimate(model: &MdpModel) -> Result<LipschitzProfile> {
    let x_metric = model.x_metric().ok_or(Error::MissingMetric {
        kind: "lipschitz estimate (state metric)",
    })?;
    let w_metric = model.w_metric();
    let n_x = model.n_states();
    let n_w = model.n_disturbances();
    let mut l_c = 0.0f64;
    let mut l_f = 0.0f64;
    let quotient = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
    // variation in the state argument
    for x1 in 0..n_x {
        for x2 in x1 + 1..n_x {
            let dx = x_metric.get(x1, x2);
            for &a in model.admissible(x1) {
                if !model.admissible(x2).contains(&a) {
                    continue;
                }
                for w in 0..n_w {
                    let dc =
                        (model.stage_cost(x1, a, w)? - model.stage_cost(x2, a, w)?).abs();
                    let df = x_metric.get(model.next_state(x1, a, w)?, model.next_state(x2, a, w)?);
                    l_c = l_c.max(quotient(dc, dx));
                    l_f = l_f.max(quotient(df, dx));
                }
            }
        }
    }
    // variation in the disturbance argument
    for x in 0..n_x {
        for &a in model.admissible(x) {
            for w1 in 0..n_w {
                for w2 in w1 + 1..n_w {
                    let dw = w_metric.get(w1, w2);
                    let dc =
                        (model.stage_cost(x, a, w1)? - model.stage_cost(x, a, w2)?).abs();
                    let df =
                        x_metric.get(model.next_state(x, a, w1)?, model.next_state(x, a, w2)?);
                    l_c = l_c.max(quotient(dc, dw));
                    l_f = l_f.max(quotient(df, dw));
                }
            }
        }
    }
    LipschitzProfile::new(model.cost_sup(), l_c, l_f, model.discount())
}

/// Rate bound `2·ψ(kind, ε)·Δ` on the robust and out-of-sample
/// suboptimality gaps, valid on the event `d(μ, μ̂) ≤ ε`.
pub fn rate_bound(kind: DistanceKind, eps: f64, delta_constant: f64) -> f64 {
    2.0 * psi(kind, eps) * delta_constant
}

/// Admissible radius window for a target suboptimality `δ` at confidence
/// `1−γ`; may be empty (`lower > upper`), which is a reportable outcome,
/// not an error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusWindow {
    pub lower: f64,
    pub upper: f64,
}

impl RadiusWindow {
    pub fn is_empty(&self) -> bool {
        self.lower > self.upper
    }
}

fn check_lb_params(params: &ConcentrationParams) -> Result<()> {
    // The radius lower bound and the sample complexity are derived on the
    // m ≥ 3, a ≥ m concentration branch only.
    if params.m < 3 {
        return Err(Error::InvalidParameter {
            reason: format!(
                "radius lower bound and sample complexity require dimension m >= 3, got {}",
                params.m
            ),
        });
    }
    if params.a < params.m as f64 {
        return Err(Error::InvalidParameter {
            reason: format!(
                "radius lower bound and sample complexity require a >= m, got a = {}, m = {}",
                params.a, params.m
            ),
        });
    }
    Ok(())
}

/// Radius window `(ε_lb, ε_ub)` for sample size `n`:
/// `ε_ub = ψ⁻¹(δ/(2Δ))` (which for the Wasserstein distance reduces to the
/// closed form `δ(1−α)²(1−αL_F) / (2(‖c‖∞(1−αL_F) + L_c(1−α)))`), and
/// `ε_lb = (log(2c1/γ)/(n c2))^{1/m}`.
pub fn radius_window(
    kind: DistanceKind,
    delta_target: f64,
    gamma: f64,
    n: u64,
    profile: &LipschitzProfile,
    params: &ConcentrationParams,
) -> Result<RadiusWindow> {
    if !(delta_target > 0.0) {
        return Err(Error::InvalidParameter {
            reason: format!("target gap must be positive, got {delta_target}"),
        });
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidGamma { value: gamma });
    }
    if n == 0 {
        return Err(Error::InvalidParameter {
            reason: "sample size must be at least 1".into(),
        });
    }
    check_lb_params(params)?;
    let delta = profile.delta_constant()?;
    let upper = psi_inverse(kind, delta_target / (2.0 * delta));
    let lower = ((2.0 * params.c1 / gamma).ln() / (n as f64 * params.c2))
        .powf(1.0 / params.m as f64);
    Ok(RadiusWindow { lower, upper })
}

/// Smallest sample size for which the radius window is nonempty:
/// `N ≥ 2^m log(2c1/γ) (‖c‖∞(1−αL_F) + L_c(1−α))^m /
///      (c2 δ^m (1−α)^{2m} (1−αL_F)^m)`.
/// Derived for the Wasserstein distance (ψ(ε) = ε).
pub fn sample_complexity(
    delta_target: f64,
    gamma: f64,
    profile: &LipschitzProfile,
    params: &ConcentrationParams,
) -> Result<u64> {
    if !(delta_target > 0.0) {
        return Err(Error::InvalidParameter {
            reason: format!("target gap must be positive, got {delta_target}"),
        });
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidGamma { value: gamma });
    }
    check_lb_params(params)?;
    profile.check_regime()?;
    let m = params.m as f64;
    let one_minus = 1.0 - profile.alpha;
    let one_minus_lf = 1.0 - profile.alpha * profile.l_f;
    let numerator = 2f64.powf(m)
        * (2.0 * params.c1 / gamma).ln()
        * (profile.c_sup * one_minus_lf + profile.l_c * one_minus).powf(m);
    let denominator = params.c2
        * delta_target.powf(m)
        * one_minus.powf(2.0 * m)
        * one_minus_lf.powf(m);
    Ok((numerator / denominator).ceil().max(1.0) as u64)
}

/// Out-of-distribution bound `(2ψ(ε) + β_gap)·Δ/(1−α)` together with its
/// statistical / nonstatistical split. `β_gap` is the bounded-Lipschitz
/// distance between the deployment and sampling distributions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OodBound {
    pub total: f64,
    pub statistical: f64,
    pub nonstatistical: f64,
}

pub fn ood_bound(
    kind: DistanceKind,
    eps: f64,
    beta_gap: f64,
    profile: &LipschitzProfile,
) -> Result<OodBound> {
    if !(beta_gap >= 0.0) {
        return Err(Error::InvalidParameter {
            reason: format!("beta gap must be nonnegative, got {beta_gap}"),
        });
    }
    let delta = profile.delta_constant()?;
    let scale = delta / (1.0 - profile.alpha);
    let statistical = 2.0 * psi(kind, eps) * scale;
    let nonstatistical = beta_gap * scale;
    Ok(OodBound {
        total: statistical + nonstatistical,
        statistical,
        nonstatistical,
    })
}

/// Helpers for models that carry metrics on both spaces.
pub fn profile_with_metrics(model: &MdpModel) -> Result<(LipschitzProfile, &Metric)> {
    Ok((lipschitz_estimate(model)?, model.w_metric()))
}
