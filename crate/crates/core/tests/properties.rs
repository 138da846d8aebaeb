use evidence_core::binomial::{constrained_mle, denominator_mle, denominator_side};
use evidence_core::*;
use proptest::prelude::*;

fn contrast() -> impl Strategy<Value = HypothesisContrast> {
    prop_oneof![
        Just(HypothesisContrast::one_sided()),
        Just(HypothesisContrast::halves()),
        Just(HypothesisContrast::point_null()),
        (0.01f64..0.45).prop_map(|w| HypothesisContrast::interval_null_width(w).unwrap()),
    ]
}

fn observation() -> impl Strategy<Value = Observation> {
    (0.5f64..400.0, 0.0f64..=1.0).prop_map(|(n, r)| Observation::from_ratio(n, r).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn kld_is_non_negative(t1 in 0.0f64..=1.0, t2 in 0.001f64..0.999, n in 0.1f64..1e4) {
        prop_assert!(kld(t1, t2, n) >= 0.0);
        prop_assert!(kld(t1, t1, n).abs() < 1e-9);
    }

    #[test]
    fn entropy_is_observed_kld(hc in contrast(), obs in observation()) {
        let s = entropy_s(&hc, &obs);
        let d = kld_obs(&obs, denominator_mle(&hc, &obs));
        prop_assume!(hc.class() != ContrastClass::Ia || obs.ratio() <= 0.5);
        prop_assert!((s - d).abs() <= 1e-12 * s.abs().max(1.0), "S={s} kld={d}");
        prop_assert!(s >= 0.0);
    }

    #[test]
    fn constrained_mle_stays_in_its_interval(hc in contrast(), obs in observation()) {
        for side in [Side::H1, Side::H2] {
            let t = constrained_mle(&hc, side, &obs);
            prop_assert!(hc.interval(side).contains(t));
        }
        let side = denominator_side(&hc, &obs);
        prop_assert!(hc.interval(side).contains(denominator_mle(&hc, &obs)));
    }

    #[test]
    fn mirror_symmetry(hc in contrast(), obs in observation()) {
        prop_assume!(hc.class() != ContrastClass::Ia);
        let cfg = QuadratureConfig::default();
        let m = obs.mirrored();
        let (s, sm) = (entropy_s(&hc, &obs), entropy_s(&hc, &m));
        prop_assert!((s - sm).abs() <= 1e-10 * s.max(1.0));
        let (v, vm) = (log_volume(&hc, &obs, &cfg).unwrap(), log_volume(&hc, &m, &cfg).unwrap());
        prop_assert!((v - vm).abs() <= 1e-9 * v.abs().max(1.0), "{v} vs {vm}");
    }

    #[test]
    fn denominator_stays_positive(hc in contrast(), obs in observation()) {
        let st = state_functions(&hc, &obs, CorrectionRule::default(), &QuadratureConfig::default()).unwrap();
        let lvb = st.log_v_minus_b().unwrap();
        prop_assert!(lvb.is_finite());
        if !hc.is_nested() {
            prop_assert_eq!(st.b, 0.0);
        }
    }

    #[test]
    fn evidence_is_positive_and_recomputable(hc in contrast(), obs in observation()) {
        let ev = evaluate(&hc, &obs, &EvidenceConfig::default()).unwrap();
        prop_assert!(ev.e > 0.0);
        let lhs = ev.c1 * ev.log_e + ev.c2 * ev.state.log_v_minus_b().unwrap();
        prop_assert!((lhs - ev.state.s).abs() <= 1e-10 * ev.state.s.abs().max(1.0));
    }

    #[test]
    fn evidence_grows_with_n(hc in contrast(), r in 0.0f64..=1.0, n in 5.0f64..200.0) {
        let cfg = EvidenceConfig::default();
        let at = |n: f64| evaluate(&hc, &Observation::from_ratio(n, r).unwrap(), &cfg).unwrap().e;
        prop_assume!(hc.class() != ContrastClass::Ia || r <= 0.5);
        // away from the transition points, where E dips to its minimum
        let t = find_trp(&hc, n, &cfg).unwrap();
        prop_assume!(t.ratios().iter().all(|p| (p - r).abs() > 0.05));
        prop_assert!(at(2.0 * n) > at(n));
    }
}
