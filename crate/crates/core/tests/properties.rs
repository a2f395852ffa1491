use proptest::prelude::*;

use geoconvex_core::applications::{proposition31, proposition32, PowerFamilySpec};
use geoconvex_core::bounds::{geometric_chain, theorem21_bounds, theorem22_bounds};
use geoconvex_core::expr::{parse, Bindings};
use geoconvex_core::kernels::{case_weights, theta_set};
use geoconvex_core::{CaseRegion, FunctionHandle, Interval, Tolerance};

fn power(p: f64) -> FunctionHandle {
    let mut b = Bindings::new();
    b.insert("p".into(), p);
    FunctionHandle::parse("x^p", &b).unwrap()
}

fn power_family(s: f64) -> FunctionHandle {
    let mut b = Bindings::new();
    b.insert("s".into(), s);
    FunctionHandle::parse("x^s/s", &b).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn power_family_bounds_hold(s in 0.05f64..0.95, a in 0.01f64..0.9, frac in 0.05f64..1.0, q in 1.0f64..6.0) {
        let b = a + (1.0 - a) * frac;
        let f = power_family(s);
        let iv = Interval::positive(a, b).unwrap();
        let tol = Tolerance::default();
        let r = theorem21_bounds(&f, &iv, s, q, &tol).unwrap();
        prop_assert!(r.holds(1e-12), "{:?}", r);
        prop_assert_eq!(r.region, CaseRegion::BothAboveOne);
        if q > 1.0 {
            let r = theorem22_bounds(&f, &iv, s, q, &tol).unwrap();
            prop_assert!(r.holds(1e-12), "{:?}", r);
        }
    }

    #[test]
    fn mean_forms_agree_with_bound_pipeline(s in 0.05f64..0.95, a in 0.01f64..0.9, frac in 0.05f64..1.0, q in 1.01f64..6.0) {
        let b = a + (1.0 - a) * frac;
        let spec = PowerFamilySpec::new(s, q, a, b).unwrap();
        for (t, m) in [proposition31(&spec).unwrap(), proposition32(&spec).unwrap()] {
            for r in [t, m] {
                prop_assert!(r.margin >= -1e-12);
                prop_assert!(r.gap <= 1e-12 * r.rhs_closed.abs().max(1.0), "{:?}", r);
                prop_assert_eq!(r.region, CaseRegion::BothAboveOne);
            }
        }
    }

    #[test]
    fn power_chain_collapses(p in -3.0f64..4.0, a in 0.1f64..3.0, ratio in 1.1f64..10.0) {
        let r = geometric_chain(&power(p), &Interval::positive(a, a * ratio).unwrap(), &Tolerance::default()).unwrap();
        prop_assert!(r.is_ordered(1e-12));
        let scale = r.t5.abs().max(1.0);
        prop_assert!((r.t1 - r.t2).abs() <= 1e-10 * scale);
        prop_assert!((r.t3 - r.t4).abs() <= 1e-10 * scale);
    }

    #[test]
    fn theta_swap_symmetry(a in 0.1f64..5.0, w in 0.1f64..5.0, da in 0.01f64..10.0, db in 0.01f64..10.0,
                           s in 0.01f64..1.0, q in 1.0f64..8.0) {
        let b = a + w;
        let fwd = theta_set(a, b, da, db, s, q).unwrap();
        prop_assert!((fwd.theta1 * fwd.theta2 - 1.0).abs() <= 4.0 * f64::EPSILON);
        let (region, weights) = case_weights(a, b, da, db, s).unwrap();
        prop_assert!(region.contains(da, db));
        prop_assert!(weights.wa > 0.0 && weights.wb > 0.0);
    }

    #[test]
    fn tighter_tolerance_stays_within_estimate(p in 1.5f64..4.0, a in 0.2f64..2.0, ratio in 1.2f64..5.0) {
        let mut b = Bindings::new();
        b.insert("p".into(), p);
        let f = FunctionHandle::parse("exp(x) * x^p", &b).unwrap();
        let iv = Interval::positive(a, a * ratio).unwrap();
        let loose = Tolerance::uniform(1e-7).unwrap();
        let r1 = theorem21_bounds(&f, &iv, 1.0, 2.0, &loose).unwrap();
        let r2 = theorem21_bounds(&f, &iv, 1.0, 2.0, &loose.tightened(100.0)).unwrap();
        prop_assert!((r1.trapezoid_lhs - r2.trapezoid_lhs).abs() <= r1.quadrature_error);
        prop_assert!((r1.midpoint_lhs - r2.midpoint_lhs).abs() <= r1.quadrature_error);
    }
}

fn arb_source() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("x".to_string()),
        Just("c".to_string()),
        (0u32..100).prop_map(|n| format!("{}", n as f64 / 4.0)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (
                inner.clone(),
                inner.clone(),
                prop_oneof![Just("+"), Just("-"), Just("*"), Just("/"), Just("^")]
            )
                .prop_map(|(l, r, op)| format!("({l}) {op} ({r})")),
            inner.clone().prop_map(|e| format!("-({e})")),
            (
                inner,
                prop_oneof![Just("ln"), Just("exp"), Just("sqrt"), Just("abs")]
            )
                .prop_map(|(e, f)| format!("{f}({e})")),
        ]
    })
}

proptest! {
    #[test]
    fn printing_round_trips(src in arb_source()) {
        let e = parse(&src).unwrap();
        let printed = e.to_string();
        let reparsed = parse(&printed).unwrap();
        prop_assert_eq!(&reparsed, &e, "{} printed as {}", src, printed);
    }
}
