//! Transition points, favored-hypothesis classification, iso-evidence
//! inversion and grid sweeps.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binomial::{ContrastClass, HypothesisContrast, Observation};
use crate::eos::{evaluate, EvidenceConfig, EvidenceResult};
use crate::error::{EvidenceError, Result};
use crate::optimize::{bisect_increasing, golden_section_min};

/// Points in the transition-point scan; `2^9 + 1` puts `x/n = 1/2` on the grid.
pub const TRP_SCAN_POINTS: usize = 513;
/// Golden-section stopping width in `x/n`.
pub const TRP_TOL: f64 = 1e-7;
/// `|x/n − TrP|` below which the observation sits on the boundary.
pub const TIE_TOL: f64 = 1e-9;

/// Which hypothesis the evidence favors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Favored {
    H1,
    H2,
    Boundary,
}

impl Favored {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::H1 => "H1",
            Self::H2 => "H2",
            Self::Boundary => "boundary",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionPoint {
    pub ratio: f64,
    /// Minimum evidence reached at the point.
    pub e: f64,
}

/// Local minimizers of `x/n ↦ E` at a fixed `n`, in increasing `x/n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionPoints {
    pub n: f64,
    pub points: Vec<TransitionPoint>,
}

impl TransitionPoints {
    pub fn ratios(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.ratio).collect()
    }
}

fn raw_e(hc: &HypothesisContrast, n: f64, ratio: f64, cfg: &EvidenceConfig) -> Result<f64> {
    Ok(evaluate(hc, &Observation::from_ratio(n, ratio)?, cfg)?.e)
}

/// Locate the transition points at sample size `n`.
///
/// A uniform scan over the search range brackets every interior local
/// minimum of `E`; each bracket is then refined by golden-section search.
/// `Ia` is searched on `[0, 1/2]`, everything else on `[0, 1]`.
pub fn find_trp(hc: &HypothesisContrast, n: f64, cfg: &EvidenceConfig) -> Result<TransitionPoints> {
    if !(n > 0.0 && n.is_finite()) {
        return Err(EvidenceError::InvalidObservation { n, x: 0.0 });
    }
    let hi = match hc.class() {
        ContrastClass::Ia => 0.5,
        _ => 1.0,
    };
    let last = (TRP_SCAN_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..TRP_SCAN_POINTS).map(|i| hi * i as f64 / last).collect();
    let values = grid
        .par_iter()
        .map(|&r| raw_e(hc, n, r, cfg))
        .collect::<Result<Vec<f64>>>()?;

    let mut points = Vec::new();
    for i in 1..grid.len() - 1 {
        if values[i] < values[i - 1] && values[i] <= values[i + 1] {
            let (ratio, e) = golden_section_min(|r| raw_e(hc, n, r, cfg), grid[i - 1], grid[i + 1], TRP_TOL)?;
            points.push(TransitionPoint { ratio, e });
        }
    }
    if points.is_empty() {
        return Err(EvidenceError::DegenerateMinimum { n });
    }
    Ok(TransitionPoints { n, points })
}

/// Classify an observation against the transition points at its `n`.
///
/// `Ia`: H1 below the TrP. `Ib`: H1 below 1/2 (its TrP by symmetry).
/// Nested: H2 strictly between the outermost two TrPs, H1 outside.
pub fn favored(hc: &HypothesisContrast, obs: &Observation, trp: &[f64]) -> Favored {
    let r = obs.ratio();
    let cuts: Vec<f64> = match hc.class() {
        ContrastClass::Ib => vec![0.5],
        _ => trp.to_vec(),
    };
    if cuts.iter().any(|t| (r - t).abs() < TIE_TOL) {
        return Favored::Boundary;
    }
    match hc.class() {
        ContrastClass::Ia | ContrastClass::Ib => match cuts.first() {
            Some(&t) if r > t => Favored::H2,
            _ => Favored::H1,
        },
        ContrastClass::IIa | ContrastClass::IIb => match (cuts.first(), cuts.last()) {
            (Some(&lo), Some(&hi)) if cuts.len() >= 2 && r > lo && r < hi => Favored::H2,
            _ => Favored::H1,
        },
    }
}

/// Search bracket and tolerance for iso-evidence inversion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsoOptions {
    pub n_min: f64,
    pub n_max: f64,
    /// Relative tolerance in `n`.
    pub rel_tol: f64,
}

impl Default for IsoOptions {
    fn default() -> Self {
        Self {
            n_min: 1e-3,
            n_max: 1e7,
            rel_tol: 1e-8,
        }
    }
}

/// Sample size at which `E(hc, n, ratio·n) = target`.
///
/// Doubles `n` from `opts.n_min` until `E` reaches the target, then bisects.
/// Relies on `E` increasing in `n` at fixed `x/n`.
pub fn iso_sample_size(
    hc: &HypothesisContrast,
    ratio: f64,
    target: f64,
    opts: &IsoOptions,
    cfg: &EvidenceConfig,
) -> Result<f64> {
    let not_bracketable = || EvidenceError::NotBracketable {
        target,
        n_min: opts.n_min,
        n_max: opts.n_max,
    };
    let gap = |n: f64| raw_e(hc, n, ratio, cfg).map(|e| e - target);
    if target.is_nan() || target <= 0.0 || gap(opts.n_min)? >= 0.0 {
        return Err(not_bracketable());
    }
    let mut lo = opts.n_min;
    let mut hi = opts.n_min;
    loop {
        hi = (hi * 2.0).min(opts.n_max);
        if gap(hi)? >= 0.0 {
            break;
        }
        if hi >= opts.n_max {
            return Err(not_bracketable());
        }
        lo = hi;
    }
    bisect_increasing(gap, lo, hi, opts.rel_tol)
}

/// An iso-evidence contour request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub target: f64,
    pub ratios: Vec<f64>,
    pub options: IsoOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContourPoint {
    pub ratio: f64,
    pub n: std::result::Result<f64, EvidenceError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsoContour {
    pub target: f64,
    pub points: Vec<ContourPoint>,
    /// Largest `n` along the contour, refined between grid points; it sits
    /// at the transition point of that `n`.
    pub apex: Option<(f64, f64)>,
}

// Tighter than the per-point solve: the apex location is read off a flat
// maximum, so solver noise in n turns into much larger noise in x/n.
const APEX_REL_TOL: f64 = 1e-13;
const APEX_RATIO_TOL: f64 = 1e-7;

/// Solve the contour at every grid ratio and refine its apex.
pub fn iso_contour(hc: &HypothesisContrast, spec: &ContourSpec, cfg: &EvidenceConfig) -> IsoContour {
    let points: Vec<ContourPoint> = spec
        .ratios
        .par_iter()
        .map(|&ratio| ContourPoint {
            ratio,
            n: iso_sample_size(hc, ratio, spec.target, &spec.options, cfg),
        })
        .collect();

    let best = points
        .iter()
        .enumerate()
        .filter_map(|(i, p)| p.n.as_ref().ok().map(|&n| (i, n)))
        .max_by(|a, b| a.1.total_cmp(&b.1));

    let apex = best.map(|(i, n_grid)| {
        let lo = points[i.saturating_sub(1)].ratio;
        let hi = points[(i + 1).min(points.len() - 1)].ratio;
        let tight = IsoOptions {
            rel_tol: APEX_REL_TOL,
            ..spec.options
        };
        let refined = golden_section_min(
            |r| iso_sample_size(hc, r, spec.target, &tight, cfg).map(|n| -n),
            lo.min(hi),
            lo.max(hi),
            APEX_RATIO_TOL,
        );
        match refined {
            Ok((r, neg_n)) if -neg_n >= n_grid => (r, -neg_n),
            _ => (points[i].ratio, n_grid),
        }
    });

    IsoContour {
        target: spec.target,
        points,
        apex,
    }
}

/// Cartesian `(n, x/n)` grid, `n`-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub n_values: Vec<f64>,
    pub ratios: Vec<f64>,
}

impl SweepGrid {
    pub fn observations(&self) -> Vec<Result<Observation>> {
        self.n_values
            .iter()
            .flat_map(|&n| self.ratios.iter().map(move |&r| Observation::from_ratio(n, r)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: f64,
    pub x: f64,
    pub result: std::result::Result<EvidenceResult, EvidenceError>,
}

/// Evaluate `E` at every observation, in input order. Transition points are
/// computed once per distinct `n`.
pub fn sweep_evidence(hc: &HypothesisContrast, observations: &[Observation], cfg: &EvidenceConfig) -> Vec<SweepRow> {
    let mut distinct: Vec<f64> = observations.iter().map(|o| o.n()).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let trps: HashMap<u64, Result<Vec<f64>>> = distinct
        .par_iter()
        .map(|&n| (n.to_bits(), find_trp(hc, n, cfg).map(|t| t.ratios())))
        .collect();

    observations
        .par_iter()
        .map(|obs| {
            let result = evaluate(hc, obs, cfg).and_then(|ev| {
                let trp = trps[&obs.n().to_bits()].clone()?;
                Ok(EvidenceResult::assemble(hc, obs, ev, trp))
            });
            SweepRow {
                n: obs.n(),
                x: obs.x(),
                result,
            }
        })
        .collect()
}

/// Sweep over a cartesian grid; invalid grid cells become error rows.
pub fn sweep_grid(hc: &HypothesisContrast, grid: &SweepGrid, cfg: &EvidenceConfig) -> Vec<SweepRow> {
    let cells: Vec<(f64, f64, Result<Observation>)> = grid
        .n_values
        .iter()
        .flat_map(|&n| grid.ratios.iter().map(move |&r| (n, r)))
        .map(|(n, r)| (n, r * n, Observation::from_ratio(n, r)))
        .collect();
    let valid: Vec<Observation> = cells.iter().filter_map(|c| c.2.as_ref().ok().copied()).collect();
    let mut evaluated = sweep_evidence(hc, &valid, cfg).into_iter();
    cells
        .into_iter()
        .map(|(n, x, obs)| match obs {
            Ok(_) => evaluated.next().expect("one row per valid cell"),
            Err(e) => SweepRow { n, x, result: Err(e) },
        })
        .collect()
}
