//! State functions of a likelihood-ratio graph: entropy `S`, volume `V` and
//! the Van der Waals style correction `b` used for nested contrasts.

use serde::{Deserialize, Serialize};

use crate::binomial::{denominator_mle, log_likelihood, unconstrained_mle, xlogy, HypothesisContrast, Observation};
use crate::error::{EvidenceError, Result};
use crate::quadrature::{integrate, QuadratureConfig};

/// How the correction `b` is evaluated inside `Θ2`.
///
/// The in-region value is `r1·V − r2·κ/√MinFI(n)`; the variants differ in the
/// numerator `κ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CorrectionRule {
    /// `κ = ln 4`. Produces two transition points for both nested classes
    /// and reproduces the reported `n = 50`, `Θ2 = [0.4, 0.6]` values
    /// (E = 2.78 at x/n = 1/2, 2.75 at x/n = 0.4).
    #[default]
    Ln4,
    /// `κ = √(2π)`, the Laplace width at `θ = 1/2`. Leaves `b(1/2) < 0`, and
    /// the point-null contrast then keeps a single minimum at `x/n = 1/2`.
    Sqrt2Pi,
    /// `b ≡ 0`: the ideal-gas form for every class.
    Off,
}

impl CorrectionRule {
    fn numerator(self) -> Option<f64> {
        match self {
            Self::Ln4 => Some(4f64.ln()),
            Self::Sqrt2Pi => Some((2.0 * std::f64::consts::PI).sqrt()),
            Self::Off => None,
        }
    }
}

/// `(S, V, b)` for one contrast and observation, plus the constants that
/// went into `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateFunctions {
    /// Evidential entropy in nats.
    pub s: f64,
    /// `ln V`; `V` itself overflows for large `n` far from `Θ2`.
    pub log_v: f64,
    pub b: f64,
    pub min_fisher_info: f64,
    /// Rate constants `(r1, r2)`; `None` for non-nested contrasts.
    pub rates: Option<(f64, f64)>,
}

impl StateFunctions {
    pub fn v(&self) -> f64 {
        self.log_v.exp()
    }

    /// `ln(V - b)`, evaluated without forming `V` when it is huge.
    pub fn log_v_minus_b(&self) -> Result<f64> {
        let rel = self.b * (-self.log_v).exp();
        if rel >= 1.0 || rel.is_nan() {
            return Err(EvidenceError::NonPositiveDenominator(self.v() - self.b));
        }
        Ok(self.log_v + (-rel).ln_1p())
    }
}

/// `S = ln L(θ̂) − ln L(θ̂ᵢ)`, where `θ̂` maximizes over `Θ1 ∪ Θ2` and `θ̂ᵢ`
/// over the denominator hypothesis.
pub fn entropy_s(hc: &HypothesisContrast, obs: &Observation) -> f64 {
    let top = unconstrained_mle(hc, obs);
    let den = denominator_mle(hc, obs);
    log_likelihood(top, obs) - log_likelihood(den, obs)
}

/// `ln V`, with `V = ∫ L(θ)/L(θ̂ᵢ) dθ` over the parameter space.
///
/// The integrand is shifted by its peak at the clamped mode and the domain
/// is split there, so the quadrature only ever sees values in `[0, 1]`.
pub fn log_volume(hc: &HypothesisContrast, obs: &Observation, cfg: &QuadratureConfig) -> Result<f64> {
    let domain = hc.parameter_space();
    let mode = domain.clamp(obs.ratio());
    let log_peak = log_likelihood(mode, obs) - log_likelihood(denominator_mle(hc, obs), obs);
    let (x, t) = (obs.x(), obs.tails());
    let shifted = |theta: f64| (xlogy(x, theta / mode) + xlogy(t, (1.0 - theta) / (1.0 - mode))).exp();

    // Breaks at geometric multiples of the peak width keep every Kronrod
    // rule close enough to the peak to see it.
    let width = (mode * (1.0 - mode) / obs.n()).sqrt() + 1.0 / obs.n();
    let mut points = vec![domain.lo, mode, domain.hi];
    for k in 0..12 {
        let d = width * f64::from(1u32 << k);
        points.extend([mode - d, mode + d]);
    }
    points.retain(|p| (domain.lo..=domain.hi).contains(p));
    points.sort_by(f64::total_cmp);
    points.dedup();
    let area = integrate(shifted, &points, cfg)?;
    Ok(log_peak + area.value.ln())
}

pub fn volume_v(hc: &HypothesisContrast, obs: &Observation, cfg: &QuadratureConfig) -> Result<f64> {
    log_volume(hc, obs, cfg).map(f64::exp)
}

/// Minimum over `θ` of the binomial Fisher information `n/(θ(1−θ))`.
pub fn min_fisher_info(n: f64) -> f64 {
    4.0 * n
}

/// `(r1, r2)` with `r1 = 2 − w` and `r2 = 2·r1 − (2 + w)/2`, `w` the width of `Θ2`.
pub fn rate_constants(hc: &HypothesisContrast) -> Result<(f64, f64)> {
    if !hc.is_nested() {
        return Err(EvidenceError::InvalidClass);
    }
    let w = hc.width();
    let r1 = 2.0 - w;
    Ok((r1, 2.0 * r1 - 0.5 * (2.0 + w)))
}

fn in_region_b(rates: (f64, f64), v: f64, n: f64, kappa: f64) -> f64 {
    rates.0 * v - rates.1 * kappa / min_fisher_info(n).sqrt()
}

/// Correction `b` using the observation's own `V` when `x/n ∈ Θ2`.
fn correction_with_volume(
    hc: &HypothesisContrast,
    obs: &Observation,
    log_v: f64,
    rule: CorrectionRule,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let Some(kappa) = rule.numerator() else {
        return Ok(0.0);
    };
    if !hc.is_nested() {
        return Ok(0.0);
    }
    let rates = rate_constants(hc)?;
    let n = obs.n();
    let r = obs.ratio();
    let theta2 = hc.theta2();
    if theta2.contains(r) {
        return Ok(in_region_b(rates, log_v.exp(), n, kappa));
    }

    // Linear in x/n between the boundary anchor and zero at the nearer end
    // of [0, 1]. The anchor is the in-region value at x = n·θ2j.
    let (edge, weight) = if r < theta2.lo {
        (theta2.lo, r / theta2.lo)
    } else {
        (theta2.hi, (1.0 - r) / (1.0 - theta2.hi))
    };
    if weight == 0.0 {
        return Ok(0.0);
    }
    let anchor = Observation::new(n, (n * edge).min(n))?;
    let anchor_v = volume_v(hc, &anchor, cfg)?;
    Ok(weight * in_region_b(rates, anchor_v, n, kappa))
}

/// Correction `b`; zero for non-nested contrasts.
pub fn correction_b(
    hc: &HypothesisContrast,
    obs: &Observation,
    rule: CorrectionRule,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let log_v = if hc.is_nested() && hc.theta2().contains(obs.ratio()) {
        log_volume(hc, obs, cfg)?
    } else {
        f64::NAN
    };
    correction_with_volume(hc, obs, log_v, rule, cfg)
}

/// All state functions for `(hc, obs)`, sharing one volume evaluation.
pub fn state_functions(
    hc: &HypothesisContrast,
    obs: &Observation,
    rule: CorrectionRule,
    cfg: &QuadratureConfig,
) -> Result<StateFunctions> {
    let s = entropy_s(hc, obs);
    let log_v = log_volume(hc, obs, cfg)?;
    let b = correction_with_volume(hc, obs, log_v, rule, cfg)?;
    Ok(StateFunctions {
        s,
        log_v,
        b,
        min_fisher_info: min_fisher_info(obs.n()),
        rates: rate_constants(hc).ok(),
    })
}
