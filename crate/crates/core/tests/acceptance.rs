//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line (written
//! straight to stderr so it shows without `--nocapture`) and then asserts.

use std::io::Write;
use std::sync::OnceLock;

use evidence_core::verification::{self, VerificationReport};
use evidence_core::{evaluate, find_trp, iso_sample_size, EvidenceConfig, HypothesisContrast, IsoOptions, Observation};

fn cfg() -> EvidenceConfig {
    EvidenceConfig::default()
}

fn report(id: &str, passed: bool, detail: &str) {
    let verdict = if passed { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "\n[acceptance] {verdict} criterion {id}: {detail}");
}

fn e_at(hc: &HypothesisContrast, n: f64, ratio: f64) -> f64 {
    evaluate(hc, &Observation::from_ratio(n, ratio).unwrap(), &cfg())
        .unwrap()
        .e
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn suite() -> &'static [VerificationReport] {
    static SUITE: OnceLock<Vec<VerificationReport>> = OnceLock::new();
    SUITE.get_or_init(|| verification::run_bbp_suite(&verification::default_contrasts(), &cfg()))
}

fn family(name: &str) -> &'static VerificationReport {
    suite().iter().find(|r| r.check == name).expect("family present")
}

fn summarize(reports: &[&VerificationReport]) -> (bool, String) {
    let passed = reports.iter().all(|r| r.passed);
    let parts: Vec<String> = reports
        .iter()
        .map(|r| {
            let mut s = r.line();
            if !r.passed {
                s.push_str(&format!(" [{}]", r.notes.join("; ")));
            }
            s
        })
        .collect();
    (passed, parts.join(" | "))
}

#[test]
fn criterion_1_iso_table_at_zero_ratio() {
    let hcs = verification::default_contrasts();
    // (target E, expected n per contrast, tight-tolerance flags)
    let table: [(f64, [f64; 4], [bool; 4]); 3] = [
        (2.0, [1.5, 1.1, 3.0, 3.6], [false, true, true, true]),
        (4.0, [7.0, 3.0, 15.2, 20.5], [true, true, false, false]),
        (8.0, [21.8, 7.0, 67.3, 106.6], [true, true, false, false]),
    ];
    let mut passed = true;
    let mut cells = Vec::new();
    for (target, expected, tight) in table {
        for (i, hc) in hcs.iter().enumerate() {
            let n = iso_sample_size(hc, 0.0, target, &IsoOptions::default(), &cfg()).unwrap();
            let tol = if tight[i] { 0.03 } else { 0.15 };
            let dev = (n - expected[i]) / expected[i];
            let ok = dev.abs() <= tol;
            passed &= ok;
            cells.push(format!(
                "{hc} E={target}: n={n:.4} vs {} ({:+.1}%, ±{:.0}%){}",
                expected[i],
                100.0 * dev,
                100.0 * tol,
                if ok { "" } else { " MISS" }
            ));
        }
    }
    report("1", passed, &cells.join("; "));
    assert!(passed, "{}", cells.join("\n"));
}

#[test]
fn criterion_2_interval_width_claims_at_n50() {
    let hc = |w: f64| HypothesisContrast::interval_null_width(w).unwrap();
    let reference = [(0.02, 6.2), (0.2, 5.4), (0.4, 4.6)];
    let es: Vec<f64> = reference.iter().map(|&(w, _)| e_at(&hc(w), 50.0, 0.01)).collect();
    let ordered = es[0] > es[1] && es[1] > es[2];
    let mut bands_ok = true;
    let mut parts = Vec::new();
    for (&(w, p), &e) in reference.iter().zip(&es) {
        let ok = e >= 0.8 * p && e <= 1.3 * p;
        bands_ok &= ok;
        parts.push(format!(
            "w={w}: E={e:.4} in [{:.2}, {:.2}]{}",
            0.8 * p,
            1.3 * p,
            if ok { "" } else { " MISS" }
        ));
    }
    let narrow = hc(0.2);
    let (mid, off) = (e_at(&narrow, 50.0, 0.5), e_at(&narrow, 50.0, 0.4));
    let b_ok = mid > off && rel(mid, 2.78) <= 0.6 && rel(off, 2.75) <= 0.6;
    parts.push(format!(
        "(b) E(0.5)={mid:.4} > E(0.4)={off:.4}{}",
        if b_ok { "" } else { " MISS" }
    ));
    let passed = ordered && bands_ok && b_ok;
    report(
        "2",
        passed,
        &format!(
            "(a) ordering {}; {}",
            if ordered { "holds" } else { "violated" },
            parts.join("; ")
        ),
    );
    assert!(passed, "{}", parts.join("\n"));
}

#[test]
fn criterion_3_closed_forms_at_zero_heads() {
    let hcs = verification::default_contrasts();
    let mut worst: f64 = 0.0;
    for hc in &hcs {
        for &n in &verification::CLOSED_FORM_NS {
            worst = worst.max(rel(e_at(hc, n, 0.0), verification::closed_form_e0(hc, n)));
        }
    }
    let passed = worst < 1e-8;
    report("3", passed, &format!("max relative deviation {worst:.3e} (tol 1e-8)"));
    assert!(passed);
}

#[test]
fn criterion_4_behavior_pattern_suite() {
    let families = [
        verification::BBP_I,
        verification::BBP_II_STRUCTURE,
        verification::BBP_II_DRIFT,
        verification::BBP_III,
        verification::BBP_IV,
    ];
    let mut reports: Vec<&VerificationReport> = families.iter().map(|f| family(f)).collect();
    let controls = verification::forced_failure_controls(&cfg());
    reports.extend(controls.iter());
    let (passed, detail) = summarize(&reports);
    report("4", passed, &detail);
    assert!(passed, "{detail}");
}

#[test]
fn criterion_5_closed_form_identities() {
    let ia = HypothesisContrast::one_sided();
    let reports = [
        verification::check_kld_identity(&verification::default_kld_grid()),
        verification::check_kld_closed_form(12),
        verification::mlr_negative_control(&ia, 0.0, &[10.0, 20.0, 30.0], &cfg()),
        verification::mlr_negative_control(&ia, 0.1, &[20.0, 40.0, 60.0], &cfg()),
    ];
    let (passed, detail) = summarize(&reports.iter().collect::<Vec<_>>());
    report("5", passed, &detail);
    assert!(passed, "{detail}");
}

#[test]
fn criterion_6_volume_oracle_agreement() {
    let r = verification::check_v_oracle(&verification::default_contrasts(), &cfg(), verification::ORACLE_MAX_N);
    let (passed, detail) = summarize(&[&r]);
    report("6", passed, &detail);
    assert!(passed, "{detail}");
}

#[test]
fn criterion_7_narrow_interval_matches_point_null() {
    let narrow = HypothesisContrast::interval_null_width(0.02).unwrap();
    let point = HypothesisContrast::point_null();
    let (ns, ratios) = verification::continuity_grid();
    let mut worst: f64 = 0.0;
    let mut cells = 0;
    for &n in &ns {
        for &r in &ratios {
            worst = worst.max(rel(e_at(&narrow, n, r), e_at(&point, n, r)));
            cells += 1;
        }
    }
    let passed = worst < 0.05;
    report(
        "7",
        passed,
        &format!("max relative difference {worst:.4} over {cells} cells (tol 0.05)"),
    );
    assert!(passed);
}

#[test]
fn criterion_8_symmetry_and_ordering() {
    let reports = [
        family(verification::SYMMETRY),
        family(verification::CLASS_ORDERING),
        family(verification::TRP_ORDERING),
    ];
    let (mut passed, mut detail) = summarize(&reports);
    let iia = find_trp(&HypothesisContrast::point_null(), 50.0, &cfg())
        .unwrap()
        .ratios();
    let iib = find_trp(&HypothesisContrast::interval_null(0.4, 0.6).unwrap(), 50.0, &cfg())
        .unwrap()
        .ratios();
    passed &= iib[0] < iia[0] && iib[1] > iia[1];
    detail.push_str(&format!(" | TrPs at n=50: II_b {iib:.4?} vs II_a {iia:.4?}"));
    report("8", passed, &detail);
    assert!(passed, "{detail}");
}
