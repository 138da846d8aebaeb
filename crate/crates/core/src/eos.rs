//! Equations of state: `E = (exp(S) / (V − b)^c2)^(1/c1)`.
//!
//! Non-nested contrasts use the ideal-gas form (`b = 0`); nested contrasts
//! subtract the correction `b`. `c1` is the degrees-of-freedom constant.

use serde::{Deserialize, Serialize};

use crate::analysis::{favored, find_trp, Favored};
use crate::binomial::{ContrastClass, HypothesisContrast, Observation};
use crate::error::{EvidenceError, Result};
use crate::quadrature::QuadratureConfig;
use crate::state::{state_functions, CorrectionRule, StateFunctions};

/// Everything that parameterizes an evidence evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvidenceConfig {
    pub quadrature: QuadratureConfig,
    pub correction: CorrectionRule,
    /// Exponent on `V − b`. Must stay 1 for the behavior patterns to hold.
    pub c2: f64,
    /// Replace the degrees-of-freedom rule; only for sensitivity controls.
    pub c1_override: Option<f64>,
}

impl Default for EvidenceConfig {
    fn default() -> Self {
        Self {
            quadrature: QuadratureConfig::default(),
            correction: CorrectionRule::default(),
            c2: 1.0,
            c1_override: None,
        }
    }
}

impl EvidenceConfig {
    pub fn with_quadrature(quadrature: QuadratureConfig) -> Self {
        Self {
            quadrature,
            ..Self::default()
        }
    }

    pub fn c1(&self, hc: &HypothesisContrast) -> f64 {
        self.c1_override.unwrap_or_else(|| dof_c1(hc))
    }
}

/// Degrees-of-freedom constant.
///
/// Baseline 1; nested contrasts add `|Θ1| + |Θ2|`, non-nested ones add
/// `|Θ1| − |Θ2|`. Gives 1.5, 1, 2 and `2 + w` for the four classes.
pub fn dof_c1(hc: &HypothesisContrast) -> f64 {
    let (l1, l2) = (hc.theta1().len(), hc.theta2().len());
    match hc.class() {
        ContrastClass::Ia | ContrastClass::Ib => 1.0 + (l1 - l2),
        ContrastClass::IIa | ContrastClass::IIb => 1.0 + (l1 + l2),
    }
}

/// Evidence value with its state functions, without the favored side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub e: f64,
    pub log_e: f64,
    pub state: StateFunctions,
    pub c1: f64,
    pub c2: f64,
}

/// Evaluate the equation of state for one observation.
pub fn evaluate(hc: &HypothesisContrast, obs: &Observation, cfg: &EvidenceConfig) -> Result<Evidence> {
    let state = state_functions(hc, obs, cfg.correction, &cfg.quadrature)?;
    let c1 = cfg.c1(hc);
    if c1.is_nan() || c1 <= 0.0 {
        return Err(EvidenceError::InvalidConfig(format!("c1 must be positive, got {c1}")));
    }
    let log_e = (state.s - cfg.c2 * state.log_v_minus_b()?) / c1;
    Ok(Evidence {
        e: log_e.exp(),
        log_e,
        state,
        c1,
        c2: cfg.c2,
    })
}

/// Full evidence report for one observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvidenceResult {
    pub hc: HypothesisContrast,
    pub obs: Observation,
    pub e: f64,
    pub log_e: f64,
    pub s: f64,
    pub v: f64,
    pub log_v: f64,
    pub b: f64,
    pub c1: f64,
    pub c2: f64,
    pub favored: Favored,
    /// Transition points (x/n) at this `n`.
    pub transition_points: Vec<f64>,
}

impl EvidenceResult {
    pub(crate) fn assemble(
        hc: &HypothesisContrast,
        obs: &Observation,
        ev: Evidence,
        transition_points: Vec<f64>,
    ) -> Self {
        Self {
            hc: *hc,
            obs: *obs,
            e: ev.e,
            log_e: ev.log_e,
            s: ev.state.s,
            v: ev.state.v(),
            log_v: ev.state.log_v,
            b: ev.state.b,
            c1: ev.c1,
            c2: ev.c2,
            favored: favored(hc, obs, &transition_points),
            transition_points,
        }
    }

    /// `ln E` rebuilt from the stored `S`, `V`, `b`, `c1`, `c2`.
    pub fn recomputed_log_e(&self) -> f64 {
        let log_vb = self.log_v + (-self.b * (-self.log_v).exp()).ln_1p();
        (self.s - self.c2 * log_vb) / self.c1
    }
}

/// Evidence for `(hc, obs)`, including the favored hypothesis from the
/// transition points at the same `n`.
pub fn evidence_e(hc: &HypothesisContrast, obs: &Observation, cfg: &EvidenceConfig) -> Result<EvidenceResult> {
    let ev = evaluate(hc, obs, cfg)?;
    let trp = find_trp(hc, obs.n(), cfg)?;
    Ok(EvidenceResult::assemble(hc, obs, ev, trp.ratios()))
}
