//! Globally adaptive Gauss-Kronrod (7/15) quadrature.
//!
//! Intervals are kept in a max-heap keyed on their error estimate; the worst
//! one is bisected until the summed error estimate drops below
//! `rel_tol * |I|`. Error estimates follow the QUADPACK rescaling of
//! `|K15 - G7|`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{EvidenceError, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for XGK[1], XGK[3], XGK[5] and the center.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerance settings for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureConfig {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(EvidenceError::InvalidConfig(format!(
                "quadrature tolerance must be positive, got {}",
                self.rel_tol
            )));
        }
        if self.max_subdivisions < 16 {
            return Err(EvidenceError::InvalidConfig(format!(
                "need at least 16 subdivisions, got {}",
                self.max_subdivisions
            )));
        }
        Ok(())
    }
}

/// Value and error estimate of an integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = kronrod.abs();
    let mut f1 = [0.0; 7];
    let mut f2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let lo = f(center - dx);
        let hi = f(center + dx);
        f1[j] = lo;
        f2[j] = hi;
        kronrod += WGK[j] * (lo + hi);
        abs_sum += WGK[j] * (lo.abs() + hi.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (lo + hi);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((f1[j] - mean).abs() + (f2[j] - mean).abs());
    }

    let value = kronrod * half;
    let abs_value = abs_sum * half.abs();
    let asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if abs_value > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs_value);
    }
    Segment { a, b, value, error }
}

/// Integrate `f` over `[points[0], points[last]]`, with the interior points
/// as fixed initial breaks.
pub fn integrate<F: Fn(f64) -> f64>(f: F, points: &[f64], cfg: &QuadratureConfig) -> Result<Integral> {
    cfg.validate()?;
    if points.len() < 2 {
        return Err(EvidenceError::InvalidConfig(
            "integration needs at least two break points".into(),
        ));
    }

    let mut heap = BinaryHeap::new();
    let (mut value, mut error) = (0.0, 0.0);
    for w in points.windows(2) {
        if w[1] > w[0] {
            let seg = gauss_kronrod(&f, w[0], w[1]);
            value += seg.value;
            error += seg.error;
            heap.push(seg);
        }
    }

    loop {
        let tolerance = (cfg.rel_tol * value.abs()).max(f64::MIN_POSITIVE);
        if error <= tolerance {
            break;
        }
        if heap.len() >= cfg.max_subdivisions {
            return Err(EvidenceError::NonConvergence {
                error,
                tolerance,
                subdivisions: heap.len(),
            });
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval at floating-point resolution; nothing left to refine
            heap.push(worst);
            return Err(EvidenceError::NonConvergence {
                error,
                tolerance,
                subdivisions: heap.len(),
            });
        }
        let left = gauss_kronrod(&f, worst.a, mid);
        let right = gauss_kronrod(&f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // re-sum to shed drift from the running updates
    let (value, error) = heap.iter().fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
    Ok(Integral {
        value,
        error,
        subdivisions: heap.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(|x| 3.0 * x * x, &[0.0, 2.0], &QuadratureConfig::default()).unwrap();
        assert!((r.value - 8.0).abs() < 1e-13);
        assert_eq!(r.subdivisions, 1);
    }

    #[test]
    fn sharp_peak_with_break_point() {
        // Gaussian of width 1e-3 centered at 0.3
        let s = 1e-3;
        let f = |x: f64| (-(x - 0.3) * (x - 0.3) / (2.0 * s * s)).exp();
        let r = integrate(f, &[0.0, 0.3, 1.0], &QuadratureConfig::default()).unwrap();
        let exact = s * (2.0 * std::f64::consts::PI).sqrt();
        assert!(((r.value - exact) / exact).abs() < 1e-10, "{} vs {}", r.value, exact);
    }

    #[test]
    fn endpoint_root_singularity() {
        let r = integrate(f64::sqrt, &[0.0, 1.0], &QuadratureConfig::default()).unwrap();
        assert!((r.value - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn config_validation() {
        assert!(QuadratureConfig::with_rel_tol(0.0).validate().is_err());
        let cfg = QuadratureConfig {
            rel_tol: 1e-8,
            max_subdivisions: 8,
        };
        assert!(cfg.validate().is_err());
        assert!(integrate(|x| x, &[0.0], &QuadratureConfig::default()).is_err());
    }

    #[test]
    fn non_convergence_is_reported() {
        let cfg = QuadratureConfig {
            rel_tol: 1e-15,
            max_subdivisions: 16,
        };
        let err = integrate(|x: f64| (1.0 / x).sin(), &[1e-6, 1.0], &cfg).unwrap_err();
        assert!(matches!(err, EvidenceError::NonConvergence { .. }));
    }
}
