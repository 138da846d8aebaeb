//! Independent oracles, negative controls and the behavior-pattern suite.
//!
//! Every check returns a [`VerificationReport`]; nothing here panics or
//! short-circuits on a failed assertion.

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{find_trp, iso_contour, ContourSpec, IsoOptions};
use crate::binomial::{denominator_mle, kld, kld_obs, xlogy, ContrastClass, HypothesisContrast, Observation};
use crate::eos::{evaluate, evidence_e, EvidenceConfig};
use crate::error::{EvidenceError, Result};
use crate::state::{entropy_s, volume_v, CorrectionRule};

pub const BBP_I: &str = "bbp_i_monotone_n";
pub const BBP_II_STRUCTURE: &str = "bbp_ii_trp_structure";
pub const BBP_II_DRIFT: &str = "bbp_ii_trp_drift";
pub const BBP_III: &str = "bbp_iii_iso_unimodal";
pub const BBP_IV: &str = "bbp_iv_diminishing_increments";
pub const SYMMETRY: &str = "symmetry";
pub const RECOMPUTE: &str = "recompute_identity";
pub const CLASS_ORDERING: &str = "class_ordering";
pub const NESTED_CONTINUITY: &str = "nested_continuity";
pub const TRP_ORDERING: &str = "trp_ordering";
pub const CLOSED_FORMS: &str = "closed_forms_x0";

pub const BBP_I_NS: [f64; 6] = [5.0, 10.0, 20.0, 50.0, 100.0, 200.0];
pub const BBP_II_NS: [f64; 5] = [25.0, 50.0, 100.0, 200.0, 400.0];
pub const BBP_IV_NS: [f64; 5] = [10.0, 20.0, 40.0, 80.0, 160.0];
pub const BBP_IV_STEP: f64 = 5.0;
pub const ORACLE_MAX_N: u32 = 60;

/// Outcome of one check family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub check: String,
    pub passed: bool,
    /// Worst value of the family's deviation measure: the largest error for
    /// tolerance checks, the largest signed slack for strict inequalities
    /// (positive means violated). `None` when nothing was measured.
    pub max_deviation: Option<f64>,
    pub grid: String,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn line(&self) -> String {
        let dev = self.max_deviation.map_or("n/a".to_string(), |d| format!("{d:.3e}"));
        format!(
            "{} {}: max deviation {} on {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.check,
            dev,
            self.grid
        )
    }
}

const MAX_NOTES: usize = 8;

struct Tally {
    check: String,
    grid: String,
    max_dev: Option<f64>,
    failures: usize,
    notes: Vec<String>,
}

impl Tally {
    fn new(check: &str, grid: impl Into<String>) -> Self {
        Self {
            check: check.to_string(),
            grid: grid.into(),
            max_dev: None,
            failures: 0,
            notes: Vec::new(),
        }
    }

    fn observe(&mut self, dev: f64, ok: bool, what: impl FnOnce() -> String) {
        self.max_dev = Some(match self.max_dev {
            Some(d) if dev.is_nan() || dev <= d => d,
            _ => dev,
        });
        if !ok {
            self.fail(what());
        }
    }

    /// Deviation must stay within `tol`.
    fn within(&mut self, dev: f64, tol: f64, what: impl FnOnce() -> String) {
        self.observe(dev, dev <= tol, || {
            format!("{}: deviation {dev:.3e} > {tol:.0e}", what())
        });
    }

    /// Slack must be strictly negative.
    fn strict(&mut self, slack: f64, what: impl FnOnce() -> String) {
        self.observe(slack, slack < 0.0, || format!("{}: slack {slack:.3e}", what()));
    }

    fn error(&mut self, what: impl FnOnce() -> String, err: &EvidenceError) {
        self.fail(format!("{}: {err}", what()));
    }

    fn fail(&mut self, note: String) {
        self.failures += 1;
        if self.notes.len() < MAX_NOTES {
            self.notes.push(note);
        }
    }

    fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    fn finish(mut self) -> VerificationReport {
        if self.failures > MAX_NOTES {
            self.notes
                .push(format!("{} further failures omitted", self.failures - MAX_NOTES));
        }
        VerificationReport {
            check: self.check,
            passed: self.failures == 0,
            max_deviation: self.max_dev,
            grid: self.grid,
            notes: self.notes,
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        ((a - b) / b).abs()
    }
}

fn e_at(hc: &HypothesisContrast, n: f64, ratio: f64, cfg: &EvidenceConfig) -> Result<f64> {
    Ok(evaluate(hc, &Observation::from_ratio(n, ratio)?, cfg)?.e)
}

fn linspace(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    (0..k).map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64).collect()
}

fn log_spaced(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    linspace(lo.ln(), hi.ln(), k).into_iter().map(f64::exp).collect()
}

fn fmt_list(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
    format!("{{{}}}", parts.join(", "))
}

/// The four contrasts the suite runs on by default; II_b uses `[0.4, 0.6]`.
pub fn default_contrasts() -> Vec<HypothesisContrast> {
    vec![
        HypothesisContrast::one_sided(),
        HypothesisContrast::halves(),
        HypothesisContrast::point_null(),
        HypothesisContrast::interval_null(0.4, 0.6).expect("valid interval"),
    ]
}

// ---------------------------------------------------------------- oracles

fn binom_u128(n: u32, k: u32) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |c, i| c * u128::from(n - i) / u128::from(i + 1))
}

/// `∫₀^upper θˣ(1−θ)ⁿ⁻ˣ dθ / L(θ_den)` from exact integer binomial sums.
///
/// Uses `∫₀^p θˣ(1−θ)ⁿ⁻ˣ dθ = P(Bin(n+1, p) > x) / ((n+1)·C(n,x))` with
/// `p ∈ {1/2, 1}`.
pub fn v_oracle(n: u32, x: u32, upper: f64, theta_den: f64) -> Result<f64> {
    if n > ORACLE_MAX_N {
        return Err(EvidenceError::OutOfRange(format!("n = {n} exceeds {ORACLE_MAX_N}")));
    }
    if x > n {
        return Err(EvidenceError::OutOfRange(format!("x = {x} exceeds n = {n}")));
    }
    let scale = u128::from(n + 1) * binom_u128(n, x);
    let log_integral = if upper == 1.0 {
        -(scale as f64).ln()
    } else if upper == 0.5 {
        let tail: u128 = (x + 1..=n + 1).map(|j| binom_u128(n + 1, j)).sum();
        (tail as f64).ln() - ((scale << (n + 1)) as f64).ln()
    } else {
        return Err(EvidenceError::OutOfRange(format!(
            "upper limit {upper} not in {{0.5, 1}}"
        )));
    };
    let (xf, tf) = (f64::from(x), f64::from(n - x));
    let log_l = xlogy(xf, theta_den) + xlogy(tf, 1.0 - theta_den);
    if !log_l.is_finite() {
        return Err(EvidenceError::OutOfRange(format!("L({theta_den}) = 0")));
    }
    Ok((log_integral - log_l).exp())
}

/// Quadrature `V` against [`v_oracle`] on every integer cell `1 ≤ n ≤ n_max`.
pub fn check_v_oracle(hcs: &[HypothesisContrast], cfg: &EvidenceConfig, n_max: u32) -> VerificationReport {
    const TOL: f64 = 1e-8;
    let mut tally = Tally::new(
        "v_oracle_agreement",
        format!("{} contrasts × integer 1 ≤ n ≤ {n_max}, 0 ≤ x ≤ n", hcs.len()),
    );
    for hc in hcs {
        let upper = hc.parameter_space().hi;
        let cells: Vec<(u32, u32)> = (1..=n_max).flat_map(|n| (0..=n).map(move |x| (n, x))).collect();
        type Cell = ((u32, u32), Result<(f64, f64)>);
        let results: Vec<Cell> = cells
            .par_iter()
            .map(|&(n, x)| {
                let r = Observation::new(f64::from(n), f64::from(x)).and_then(|obs| {
                    let quad = volume_v(hc, &obs, &cfg.quadrature)?;
                    let oracle = v_oracle(n, x, upper, denominator_mle(hc, &obs))?;
                    Ok((quad, oracle))
                });
                ((n, x), r)
            })
            .collect();
        for ((n, x), r) in results {
            match r {
                Ok((quad, oracle)) => tally.within(rel(quad, oracle), TOL, || format!("{hc} n={n} x={x}")),
                Err(e) => tally.error(|| format!("{hc} n={n} x={x}"), &e),
            }
        }
    }
    tally.finish()
}

/// `KL(Bin(n, t1) ‖ Bin(n, t2))` by explicit summation over outcomes.
pub fn kld_brute_force(t1: f64, t2: f64, n: u32) -> f64 {
    (0..=n)
        .map(|k| {
            let c = binom_u128(n, k) as f64;
            let p = c * t1.powi(k as i32) * (1.0 - t1).powi((n - k) as i32);
            if p == 0.0 {
                return 0.0;
            }
            let q = c * t2.powi(k as i32) * (1.0 - t2).powi((n - k) as i32);
            p * (p / q).ln()
        })
        .sum()
}

/// 200 `(hc, obs)` points: 50 per default contrast. For I_a only `x/n ≤ 1/2`
/// is used, since above that both MLEs clamp to 1/2.
pub fn default_kld_grid() -> Vec<(HypothesisContrast, Observation)> {
    let ns = [3.5, 9.0, 12.0, 40.0, 150.0];
    let mut grid = Vec::new();
    for hc in default_contrasts() {
        let hi = if hc.class() == ContrastClass::Ia { 0.5 } else { 1.0 };
        for &n in &ns {
            for r in linspace(0.0, hi, 10) {
                grid.push((hc, Observation::from_ratio(n, r).expect("valid grid")));
            }
        }
    }
    grid
}

/// `S` equals the observed KL divergence between `x/n` and the denominator
/// MLE; integer `n ≤ 12` is also checked against explicit summation.
pub fn check_kld_identity(grid: &[(HypothesisContrast, Observation)]) -> VerificationReport {
    const TOL: f64 = 1e-12;
    let mut tally = Tally::new("kld_identity", format!("{} (hc, n, x) points", grid.len()));
    for (hc, obs) in grid {
        let theta_i = denominator_mle(hc, obs);
        let s = entropy_s(hc, obs);
        let d = kld_obs(obs, theta_i);
        tally.within((s - d).abs(), TOL, || format!("{hc} n={} x={}", obs.n(), obs.x()));
        let n = obs.n();
        if n.fract() == 0.0 && n <= 12.0 {
            let brute = kld_brute_force(obs.ratio(), theta_i, n as u32);
            tally.within((brute - d).abs(), TOL.max(1e-14 * brute.abs()), || {
                format!("brute force {hc} n={n} x={}", obs.x())
            });
        }
    }
    tally.finish()
}

/// Closed-form binomial KLD against explicit summation for all integer
/// `n ≤ n_max`, `t1 = x/n`, and a spread of `t2`.
pub fn check_kld_closed_form(n_max: u32) -> VerificationReport {
    const TOL: f64 = 1e-10;
    let t2s = [0.05, 0.3, 0.5, 0.77, 0.95];
    let mut tally = Tally::new(
        "kld_closed_form",
        format!("integer 1 ≤ n ≤ {n_max}, t1 = x/n, t2 ∈ {}", fmt_list(&t2s)),
    );
    for n in 1..=n_max {
        for x in 0..=n {
            let t1 = f64::from(x) / f64::from(n);
            for &t2 in &t2s {
                let closed = kld(t1, t2, f64::from(n));
                let brute = kld_brute_force(t1, t2, n);
                tally.within((closed - brute).abs() / closed.abs().max(1.0), TOL, || {
                    format!("n={n} t1={t1} t2={t2}")
                });
            }
        }
    }
    tally.finish()
}

/// The maximum likelihood ratio grows linearly in `n` at a fixed ratio, so
/// its log increments are constant, while `E` increments shrink.
///
/// Passes when both hold on the (equally spaced) `ns` grid.
pub fn mlr_negative_control(
    hc: &HypothesisContrast,
    ratio: f64,
    ns: &[f64],
    cfg: &EvidenceConfig,
) -> VerificationReport {
    const TOL: f64 = 1e-9;
    let mut tally = Tally::new(
        "mlr_negative_control",
        format!("{hc}, x/n = {ratio}, n ∈ {}", fmt_list(ns)),
    );
    let rows: Result<Vec<(f64, f64)>> = ns
        .iter()
        .map(|&n| {
            let obs = Observation::from_ratio(n, ratio)?;
            Ok((entropy_s(hc, &obs), evaluate(hc, &obs, cfg)?.e))
        })
        .collect();
    let rows = match rows {
        Ok(r) if r.len() >= 3 => r,
        Ok(_) => {
            tally.fail("need at least three sample sizes".into());
            return tally.finish();
        }
        Err(e) => {
            tally.error(|| "evaluation".into(), &e);
            return tally.finish();
        }
    };
    let mlr_steps: Vec<f64> = rows.windows(2).map(|w| w[1].0 - w[0].0).collect();
    for (i, d) in mlr_steps.iter().enumerate().skip(1) {
        tally.within(rel(*d, mlr_steps[0]), TOL, || format!("log MLR increment {i}"));
    }
    let e_steps: Vec<f64> = rows.windows(2).map(|w| w[1].1 - w[0].1).collect();
    let mut shrinking = true;
    for w in e_steps.windows(2) {
        shrinking &= w[1] < w[0];
    }
    if !shrinking {
        tally.fail(format!("E increments not strictly decreasing: {e_steps:?}"));
    }
    tally.note(format!("log MLR increments {mlr_steps:?}; E increments {e_steps:?}"));
    tally.finish()
}

// ---------------------------------------------------------------- BBP suite

fn bbp_i(hcs: &[HypothesisContrast], cfg: &EvidenceConfig) -> VerificationReport {
    let mut tally = Tally::new(
        BBP_I,
        format!("x/n ∈ {{0, 0.1, 0.25, TrP(50) ± 0.05}}, n ∈ {}", fmt_list(&BBP_I_NS)),
    );
    for hc in hcs {
        let mut ratios = vec![0.0, 0.1, 0.25];
        match find_trp(hc, 50.0, cfg) {
            Ok(t) => {
                let t0 = t.points[0].ratio;
                ratios.extend([t0 - 0.05, t0 + 0.05]);
            }
            Err(e) => tally.error(|| format!("{hc} TrP at n=50"), &e),
        }
        for r in ratios {
            let es: Result<Vec<f64>> = BBP_I_NS.iter().map(|&n| e_at(hc, n, r, cfg)).collect();
            match es {
                Ok(es) => {
                    for (i, w) in es.windows(2).enumerate() {
                        tally.strict((w[0] - w[1]) / w[0], || {
                            format!("{hc} x/n={r} n={}→{}", BBP_I_NS[i], BBP_I_NS[i + 1])
                        });
                    }
                }
                Err(e) => tally.error(|| format!("{hc} x/n={r}"), &e),
            }
        }
    }
    tally.finish()
}

fn bbp_ii_structure(hcs: &[HypothesisContrast], cfg: &EvidenceConfig) -> VerificationReport {
    const DELTA: f64 = 0.01;
    let mut tally = Tally::new(
        BBP_II_STRUCTURE,
        format!(
            "n ∈ {}: TrP count, symmetry, local minimum at ±{DELTA}",
            fmt_list(&BBP_II_NS)
        ),
    );
    for hc in hcs {
        let expected = if hc.is_nested() { 2 } else { 1 };
        for &n in &BBP_II_NS {
            let t = match find_trp(hc, n, cfg) {
                Ok(t) => t,
                Err(e) => {
                    tally.error(|| format!("{hc} n={n}"), &e);
                    continue;
                }
            };
            let count = t.points.len();
            if count != expected {
                tally.fail(format!(
                    "{hc} n={n}: {count} TrPs at {:?}, expected {expected}",
                    t.ratios()
                ));
                continue;
            }
            if hc.is_nested() {
                let sum = t.points[0].ratio + t.points[1].ratio;
                tally.within((sum - 1.0).abs(), 1e-6, || format!("{hc} n={n} TrP symmetry"));
            } else {
                let r = t.points[0].ratio;
                if !(r > 0.0 && r <= 0.5 + 1e-6) {
                    tally.fail(format!("{hc} n={n}: TrP {r} outside (0, 1/2]"));
                }
            }
            for p in &t.points {
                for side in [-DELTA, DELTA] {
                    match e_at(hc, n, p.ratio + side, cfg) {
                        Ok(e) => tally.strict((p.e - e) / e, || format!("{hc} n={n} TrP {} side {side}", p.ratio)),
                        Err(err) => tally.error(|| format!("{hc} n={n}"), &err),
                    }
                }
            }
        }
    }
    tally.finish()
}

fn bbp_ii_drift(hcs: &[HypothesisContrast], cfg: &EvidenceConfig) -> VerificationReport {
    let mut tally = Tally::new(BBP_II_DRIFT, format!("left TrP over n ∈ {}", fmt_list(&BBP_II_NS)));
    for hc in hcs {
        let target = match hc.class() {
            ContrastClass::Ib => {
                tally.note(format!("{hc}: TrP fixed at 1/2 by symmetry, no drift to check"));
                continue;
            }
            ContrastClass::Ia | ContrastClass::IIa => 0.5,
            ContrastClass::IIb => hc.theta2_left(),
        };
        let gaps: Result<Vec<f64>> = BBP_II_NS
            .iter()
            .map(|&n| find_trp(hc, n, cfg).map(|t| (target - t.points[0].ratio).abs()))
            .collect();
        match gaps {
            Ok(g) => {
                for (i, w) in g.windows(2).enumerate() {
                    tally.strict(w[1] - w[0], || {
                        format!("{hc} n={}→{} gap to {target}", BBP_II_NS[i], BBP_II_NS[i + 1])
                    });
                }
            }
            Err(e) => tally.error(|| format!("{hc}"), &e),
        }
    }
    tally.finish()
}

fn bbp_iii(hcs: &[HypothesisContrast], cfg: &EvidenceConfig) -> VerificationReport {
    let ratios = linspace(0.0, 0.5, 51);
    let targets = [2.0, 4.0];
    let mut tally = Tally::new(BBP_III, format!("E ∈ {}, 51 ratios on [0, 1/2]", fmt_list(&targets)));
    for hc in hcs {
        let mut contours = Vec::new();
        for &target in &targets {
            let spec = ContourSpec {
                target,
                ratios: ratios.clone(),
                options: IsoOptions::default(),
            };
            let c = iso_contour(hc, &spec, cfg);
            let ns: std::result::Result<Vec<f64>, EvidenceError> = c.points.iter().map(|p| p.n.clone()).collect();
            let ns = match ns {
                Ok(ns) => ns,
                Err(e) => {
                    tally.error(|| format!("{hc} E={target}"), &e);
                    continue;
                }
            };
            let peak = ns
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .map(|(i, _)| i)
                .unwrap_or(0);
            for i in 1..ns.len() {
                let slack = if i <= peak {
                    (ns[i - 1] - ns[i]) / ns[i]
                } else {
                    (ns[i] - ns[i - 1]) / ns[i - 1]
                };
                tally.strict(slack, || format!("{hc} E={target} at x/n={}", ratios[i]));
            }
            contours.push(ns);
        }
        if let [low, high] = contours.as_slice() {
            for (i, (a, b)) in low.iter().zip(high).enumerate() {
                tally.strict((a - b) / b, || format!("{hc} contour nesting at x/n={}", ratios[i]));
            }
        }
    }
    tally.finish()
}

fn bbp_iv_ratios(hc: &HypothesisContrast) -> Vec<f64> {
    match hc.class() {
        ContrastClass::Ia => vec![0.1, 0.25, 0.45],
        _ => vec![0.1, 0.25, 0.45, 0.55, 0.75, 0.9],
    }
}

fn bbp_iv(hcs: &[HypothesisContrast], cfg: &EvidenceConfig) -> VerificationReport {
    let mut tally = Tally::new(
        BBP_IV,
        format!(
            "E(n+{BBP_IV_STEP}) − E(n) over n ∈ {} at interior x/n",
            fmt_list(&BBP_IV_NS)
        ),
    );
    for hc in hcs {
        for r in bbp_iv_ratios(hc) {
            let steps: Result<Vec<f64>> = BBP_IV_NS
                .iter()
                .map(|&n| Ok(e_at(hc, n + BBP_IV_STEP, r, cfg)? - e_at(hc, n, r, cfg)?))
                .collect();
            match steps {
                Ok(d) => {
                    for (i, w) in d.windows(2).enumerate() {
                        tally.strict((w[1] - w[0]) / w[0].abs(), || {
                            format!("{hc} x/n={r} n={}→{}", BBP_IV_NS[i], BBP_IV_NS[i + 1])
                        });
                    }
                }
                Err(e) => tally.error(|| format!("{hc} x/n={r}"), &e),
            }
        }
    }
    tally.finish()
}

fn symmetry(hcs: &[HypothesisContrast], cfg: &EvidenceConfig) -> VerificationReport {
    const TOL: f64 = 1e-9;
    let ns = [5.0, 17.5, 50.0, 200.0];
    let ratios = linspace(0.0, 0.5, 11);
    let mut tally = Tally::new(
        SYMMETRY,
        format!("E(n,x) vs E(n,n−x), n ∈ {}, x/n ∈ [0, 1/2]", fmt_list(&ns)),
    );
    for hc in hcs.iter().filter(|h| h.class() != ContrastClass::Ia) {
        for &n in &ns {
            for &r in &ratios {
                let pair = Observation::from_ratio(n, r)
                    .and_then(|o| Ok((evaluate(hc, &o, cfg)?.e, evaluate(hc, &o.mirrored(), cfg)?.e)));
                match pair {
                    Ok((a, b)) => tally.within(rel(a, b), TOL, || format!("{hc} n={n} x/n={r}")),
                    Err(e) => tally.error(|| format!("{hc} n={n} x/n={r}"), &e),
                }
            }
        }
    }
    tally.finish()
}

fn recompute(hcs: &[HypothesisContrast], cfg: &EvidenceConfig) -> VerificationReport {
    const TOL: f64 = 1e-10;
    let ns = [5.0, 50.0, 200.0];
    let ratios = linspace(0.0, 1.0, 11);
    let mut tally = Tally::new(
        RECOMPUTE,
        format!("E^c1·(V−b)^c2 vs exp(S), n ∈ {}, 11 ratios", fmt_list(&ns)),
    );
    for hc in hcs {
        for &n in &ns {
            for &r in &ratios {
                let res = Observation::from_ratio(n, r).and_then(|o| evidence_e(hc, &o, cfg));
                match res {
                    Ok(res) => {
                        let lhs = res.e.powf(res.c1) * (res.v - res.b).powf(res.c2);
                        tally.within(rel(lhs, res.s.exp()), TOL, || format!("{hc} n={n} x/n={r}"));
                    }
                    Err(e) => tally.error(|| format!("{hc} n={n} x/n={r}"), &e),
                }
            }
        }
    }
    tally.finish()
}

fn class_ordering(hcs: &[HypothesisContrast], cfg: &EvidenceConfig) -> VerificationReport {
    let ratios = linspace(0.0, 0.5, 11);
    let mut tally = Tally::new(
        CLASS_ORDERING,
        format!(
            "E(I_a) > E(II_a), E(I_b) > E(II_b); n ∈ {}, x/n ∈ [0, 1/2]",
            fmt_list(&BBP_I_NS)
        ),
    );
    let of = |c: ContrastClass| hcs.iter().filter(move |h| h.class() == c);
    let pairs: Vec<(&HypothesisContrast, &HypothesisContrast)> = of(ContrastClass::Ia)
        .flat_map(|a| of(ContrastClass::IIa).map(move |b| (a, b)))
        .chain(of(ContrastClass::Ib).flat_map(|a| of(ContrastClass::IIb).map(move |b| (a, b))))
        .collect();
    if pairs.is_empty() {
        tally.note("no class pairs present");
    }
    for (one, two) in pairs {
        for &n in &BBP_I_NS {
            for &r in &ratios {
                match (e_at(one, n, r, cfg), e_at(two, n, r, cfg)) {
                    (Ok(a), Ok(b)) => tally.strict((b - a) / a, || format!("{one} vs {two} n={n} x/n={r}")),
                    (Err(e), _) | (_, Err(e)) => tally.error(|| format!("{one} vs {two} n={n} x/n={r}"), &e),
                }
            }
        }
    }
    tally.finish()
}

/// `(n, x/n)` grid for the II_b → II_a continuity check: 10 log-spaced `n`
/// on `[5, 500]` × 10 ratios on `[0, 1]`.
pub fn continuity_grid() -> (Vec<f64>, Vec<f64>) {
    (log_spaced(5.0, 500.0, 10), linspace(0.0, 1.0, 10))
}

fn nested_continuity(hcs: &[HypothesisContrast], cfg: &EvidenceConfig) -> VerificationReport {
    const TOL: f64 = 0.05;
    let (ns, ratios) = continuity_grid();
    let mut tally = Tally::new(
        NESTED_CONTINUITY,
        "II_b(w = 0.02) vs II_a, 10 log-spaced n on [5, 500] × 10 ratios on [0, 1]",
    );
    let Some(iia) = hcs.iter().find(|h| h.class() == ContrastClass::IIa) else {
        tally.note("II_a not present");
        return tally.finish();
    };
    let narrow = HypothesisContrast::interval_null_width(0.02).expect("valid width");
    for &n in &ns {
        for &r in &ratios {
            match (e_at(&narrow, n, r, cfg), e_at(iia, n, r, cfg)) {
                (Ok(a), Ok(b)) => tally.within(rel(a, b), TOL, || format!("n={n:.3} x/n={r:.3}")),
                (Err(e), _) | (_, Err(e)) => tally.error(|| format!("n={n:.3} x/n={r:.3}"), &e),
            }
        }
    }
    tally.finish()
}

fn trp_ordering(hcs: &[HypothesisContrast], cfg: &EvidenceConfig) -> VerificationReport {
    const N: f64 = 50.0;
    let mut tally = Tally::new(TRP_ORDERING, "II_b TrPs outside II_a TrPs at n = 50");
    let Some(iia) = hcs.iter().find(|h| h.class() == ContrastClass::IIa) else {
        tally.note("II_a not present");
        return tally.finish();
    };
    let inner = match find_trp(iia, N, cfg) {
        Ok(t) => t.ratios(),
        Err(e) => {
            tally.error(|| format!("{iia}"), &e);
            return tally.finish();
        }
    };
    for hc in hcs.iter().filter(|h| h.class() == ContrastClass::IIb) {
        match find_trp(hc, N, cfg) {
            Ok(t) => {
                let outer = t.ratios();
                if outer.len() != 2 || inner.len() != 2 {
                    tally.fail(format!("{hc}: TrPs {outer:?} vs {inner:?}"));
                    continue;
                }
                tally.strict(outer[0] - inner[0], || format!("{hc} left"));
                tally.strict(inner[1] - outer[1], || format!("{hc} right"));
            }
            Err(e) => tally.error(|| format!("{hc}"), &e),
        }
    }
    tally.finish()
}

/// `E` at `x = 0` in closed form.
pub fn closed_form_e0(hc: &HypothesisContrast, n: f64) -> f64 {
    match hc.class() {
        ContrastClass::Ia => {
            let p = 2f64.powf(n);
            ((n + 1.0) * p / (p - 0.5)).powf(2.0 / 3.0)
        }
        ContrastClass::Ib => n + 1.0,
        ContrastClass::IIa => (n + 1.0).sqrt(),
        ContrastClass::IIb => (n + 1.0).powf(1.0 / (2.0 + hc.width())),
    }
}

pub const CLOSED_FORM_NS: [f64; 5] = [1.0, 3.0, 7.0, 15.0, 63.0];

fn closed_forms(hcs: &[HypothesisContrast], cfg: &EvidenceConfig) -> VerificationReport {
    const TOL: f64 = 1e-8;
    let mut tally = Tally::new(CLOSED_FORMS, format!("x = 0, n ∈ {}", fmt_list(&CLOSED_FORM_NS)));
    for hc in hcs {
        for &n in &CLOSED_FORM_NS {
            match e_at(hc, n, 0.0, cfg) {
                Ok(e) => tally.within(rel(e, closed_form_e0(hc, n)), TOL, || format!("{hc} n={n}")),
                Err(err) => tally.error(|| format!("{hc} n={n}"), &err),
            }
        }
    }
    tally.finish()
}

type Family = fn(&[HypothesisContrast], &EvidenceConfig) -> VerificationReport;

const FAMILIES: [Family; 11] = [
    bbp_i,
    bbp_ii_structure,
    bbp_ii_drift,
    bbp_iii,
    bbp_iv,
    symmetry,
    recompute,
    class_ordering,
    nested_continuity,
    trp_ordering,
    closed_forms,
];

/// Behavior-pattern families plus the cross-class properties, one report
/// per family, in a fixed order.
pub fn run_bbp_suite(hcs: &[HypothesisContrast], cfg: &EvidenceConfig) -> Vec<VerificationReport> {
    FAMILIES.par_iter().map(|f| f(hcs, cfg)).collect()
}

/// Sensitivity controls: a deliberately broken configuration must make the
/// named family fail. Each report passes when that failure is observed.
pub fn forced_failure_controls(cfg: &EvidenceConfig) -> Vec<VerificationReport> {
    let low_c1 = EvidenceConfig {
        c1_override: Some(0.4),
        ..*cfg
    };
    let no_b = EvidenceConfig {
        correction: CorrectionRule::Off,
        ..*cfg
    };
    let cases: [(&str, Family, Vec<HypothesisContrast>, EvidenceConfig); 2] = [
        ("control_c1_0.4", bbp_iv, default_contrasts(), low_c1),
        (
            "control_b_off_2a",
            bbp_ii_structure,
            vec![HypothesisContrast::point_null()],
            no_b,
        ),
    ];
    cases
        .into_par_iter()
        .map(|(name, family, hcs, broken)| {
            let inner = family(&hcs, &broken);
            let mut tally = Tally::new(name, format!("{} must fail; {}", inner.check, inner.grid));
            if inner.passed {
                tally.fail(format!("{} passed under the broken configuration", inner.check));
            } else {
                tally.notes = inner.notes;
            }
            tally.max_dev = inner.max_deviation;
            tally.finish()
        })
        .collect()
}

/// Everything: the suite on the default contrasts, the oracles, the
/// closed-form identities, the MLR control and the forced-failure controls.
pub fn run_all(cfg: &EvidenceConfig) -> Vec<VerificationReport> {
    let hcs = default_contrasts();
    let ia = HypothesisContrast::one_sided();
    let mut reports = run_bbp_suite(&hcs, cfg);
    reports.push(check_v_oracle(&hcs, cfg, ORACLE_MAX_N));
    reports.push(check_kld_identity(&default_kld_grid()));
    reports.push(check_kld_closed_form(12));
    reports.push(mlr_negative_control(&ia, 0.0, &[10.0, 20.0, 30.0], cfg));
    reports.push(mlr_negative_control(&ia, 0.1, &[20.0, 40.0, 60.0], cfg));
    reports.extend(forced_failure_controls(cfg));
    reports
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> EvidenceConfig {
        EvidenceConfig::default()
    }

    #[test]
    fn oracle_examples() {
        assert!(rel(v_oracle(7, 0, 0.5, 0.5).unwrap(), 15.9375) < 1e-14);
        assert!(rel(v_oracle(3, 0, 1.0, 0.5).unwrap(), 2.0) < 1e-14);
        // √π·Γ(26)/(2Γ(26.5)) = 25!/(2·∏(k+1/2)), k = 0..25
        let prod: f64 = (0..=25).map(|k| k as f64 + 0.5).product();
        let fact: f64 = (1..=25).map(f64::from).product();
        let expected = fact / (2.0 * prod);
        let v = v_oracle(50, 25, 1.0, 0.5).unwrap();
        assert!(rel(v, expected) < 1e-12, "{v} vs {expected}");
        assert!((v - 0.17464).abs() < 1e-5);
    }

    #[test]
    fn oracle_rejects_bad_input() {
        assert!(matches!(v_oracle(61, 3, 1.0, 0.5), Err(EvidenceError::OutOfRange(_))));
        assert!(matches!(v_oracle(10, 3, 0.7, 0.5), Err(EvidenceError::OutOfRange(_))));
        assert!(matches!(v_oracle(10, 11, 1.0, 0.5), Err(EvidenceError::OutOfRange(_))));
        assert!(matches!(v_oracle(10, 3, 1.0, 0.0), Err(EvidenceError::OutOfRange(_))));
    }

    #[test]
    fn oracle_matches_quadrature_spot() {
        let r = check_v_oracle(&default_contrasts(), &cfg(), 20);
        assert!(r.passed, "{:?}", r.notes);
    }

    #[test]
    fn kld_identity_examples() {
        let grid = vec![
            (HypothesisContrast::one_sided(), Observation::new(10.0, 3.0).unwrap()),
            (HypothesisContrast::point_null(), Observation::new(12.0, 6.0).unwrap()),
            (HypothesisContrast::halves(), Observation::new(9.0, 7.0).unwrap()),
        ];
        let r = check_kld_identity(&grid);
        assert!(r.passed, "{:?}", r.notes);
        assert!(r.max_deviation.unwrap() < 1e-12);
        assert_eq!(default_kld_grid().len(), 200);
    }

    #[test]
    fn mlr_examples() {
        let ia = HypothesisContrast::one_sided();
        let r = mlr_negative_control(&ia, 0.0, &[10.0, 20.0, 30.0], &cfg());
        assert!(r.passed, "{:?}", r.notes);
        let s10 = entropy_s(&ia, &Observation::new(10.0, 0.0).unwrap());
        assert!(rel(s10, 10.0 * 2f64.ln()) < 1e-14);
        let r = mlr_negative_control(&ia, 0.1, &[20.0, 40.0, 60.0], &cfg());
        assert!(r.passed, "{:?}", r.notes);
        let s20 = entropy_s(&ia, &Observation::new(20.0, 2.0).unwrap());
        assert!(rel(s20, kld(0.1, 0.5, 20.0)) < 1e-12);
    }

    #[test]
    fn tally_records_deviation_on_pass() {
        let mut t = Tally::new("x", "g");
        t.within(1e-13, 1e-12, || "a".into());
        t.within(5e-13, 1e-12, || "b".into());
        let r = t.finish();
        assert!(r.passed);
        assert_eq!(r.max_deviation, Some(5e-13));
        let mut t = Tally::new("x", "g");
        t.strict(0.1, || "bad".into());
        assert!(!t.finish().passed);
    }

    #[test]
    fn closed_form_helper() {
        assert_eq!(closed_form_e0(&HypothesisContrast::halves(), 3.0), 4.0);
        assert_eq!(closed_form_e0(&HypothesisContrast::point_null(), 3.0), 2.0);
    }
}
