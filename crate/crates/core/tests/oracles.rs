//! Library results against independent brute-force evaluations.

#![allow(clippy::excessive_precision)]

use geoconvex_core::bounds::{
    bound_lhs, bound_rhs, lemma_identity_residuals, weighted_log_integral, Theorem,
};
use geoconvex_core::expr::Bindings;
use geoconvex_core::{kernel_g, FunctionHandle, Interval, KernelFunction, Tolerance};

fn handle(src: &str, params: &[(&str, f64)]) -> FunctionHandle {
    let b: Bindings = params.iter().map(|(k, v)| (k.to_string(), *v)).collect();
    FunctionHandle::parse(src, &b).unwrap()
}

/// Composite Simpson rule with `n` (even) panels.
fn simpson<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> f64 {
    let h = (hi - lo) / n as f64;
    let mut sum = f(lo) + f(hi);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(lo + i as f64 * h);
    }
    sum * h / 3.0
}

#[test]
fn kernels_match_simpson() {
    for u in [1e-3, 0.1, 0.5, 0.9999, 1.0001, 3.0, 50.0, 1e3] {
        let ln_u: f64 = f64::ln(u);
        let g1 = simpson(|t| t * (t * ln_u).exp(), 0.0, 1.0, 20_000);
        let g2 = simpson(|t| (t * ln_u).exp(), 0.0, 1.0, 20_000);
        let k1 = kernel_g(KernelFunction::G1, u).unwrap();
        let k2 = kernel_g(KernelFunction::G2, u).unwrap();
        assert!(((k1 - g1) / g1).abs() < 1e-11, "g1({u}): {k1} vs {g1}");
        assert!(((k2 - g2) / g2).abs() < 1e-11, "g2({u}): {k2} vs {g2}");
    }
}

#[test]
fn weighted_integral_matches_direct_form() {
    // (1/ln(b/a)) ∫_a^b f(x)/x dx evaluated on x directly, no substitution
    let cases = [
        ("exp(x)", 0.2, 3.0),
        ("x^3", 0.5, 2.0),
        ("ln(1 + x)", 0.1, 4.0),
        ("1/(1 + x^2)", 1.0, 2.5),
    ];
    for (src, a, b) in cases {
        let f = handle(src, &[]);
        let direct = simpson(|x| f.value(x).unwrap() / x, a, b, 200_000) / (b / a).ln();
        let (w, _) = weighted_log_integral(
            &f,
            &Interval::positive(a, b).unwrap(),
            &Tolerance::default(),
        )
        .unwrap();
        assert!(
            ((w - direct) / direct).abs() < 1e-10,
            "{src}: {w} vs {direct}"
        );
    }
}

#[test]
fn identities_hold_for_assorted_functions() {
    let tol = Tolerance::default();
    for (src, a, b) in [
        ("x^4 - x", 0.3, 2.0),
        ("exp(-x) * x", 0.5, 3.5),
        ("ln(x)^2", 0.2, 1.7),
        ("x^x", 0.5, 2.0),
    ] {
        let r =
            lemma_identity_residuals(&handle(src, &[]), &Interval::positive(a, b).unwrap(), &tol)
                .unwrap();
        assert!(r.midpoint <= 1e-8 && r.trapezoid <= 1e-8, "{src}: {r:?}");
    }
}

/// Independent recomputation of the power-mean bound straight from its
/// definition: the θ's as plain quotients and weights from the table.
fn naive_power_mean_rhs(a: f64, b: f64, da: f64, db: f64, s: f64, q: f64) -> (f64, f64) {
    let g1 = |u: f64| {
        let l = u.ln();
        (u * l - u + 1.0) / (l * l)
    };
    let theta1 = ((b * db.powf(s)) / (a * da.powf(s))).powf(q);
    let theta2 = 1.0 / theta1;
    let (wa, wb) = if da <= 1.0 && db <= 1.0 {
        (a * da.powf(s), b * db.powf(s))
    } else if da >= 1.0 && db >= 1.0 {
        (a * da * db.powf(1.0 - s), b * db * da.powf(1.0 - s))
    } else if da < 1.0 {
        (a * da.powf(s) * db.powf(1.0 - s), b * db)
    } else {
        (a * da, b * db.powf(s) * da.powf(1.0 - s))
    };
    let h = |ti: f64, tj: f64| wa * g1(ti).powf(1.0 / q) + wb * g1(tj).powf(1.0 / q);
    let lr = (b / a).ln();
    (
        lr * 0.5f64.powf(2.0 - 1.0 / q) * h(theta1, theta2),
        lr * 0.5f64.powf(3.0 - 1.0 / q) * h(theta1.sqrt(), theta2.sqrt()),
    )
}

#[test]
fn power_mean_rhs_matches_naive_formula_in_every_region() {
    // (f, interval) chosen so each of the four derivative regions occurs
    let cases = [
        ("x^2/10", 0.5, 2.0),    // both below one
        ("x^3", 1.0, 2.0),       // both above one
        ("x^3/3", 0.5, 1.5),     // a below, b above
        ("2*sqrt(x)", 0.5, 3.0), // b below, a above
    ];
    for (src, a, b) in cases {
        let f = handle(src, &[]);
        let da = f.derivative(a).unwrap().abs();
        let db = f.derivative(b).unwrap().abs();
        for s in [0.3, 1.0] {
            for q in [1.0, 2.5] {
                let r = bound_rhs(
                    Theorem::PowerMean,
                    &f,
                    &Interval::positive(a, b).unwrap(),
                    s,
                    q,
                )
                .unwrap();
                let (t, m) = naive_power_mean_rhs(a, b, da, db, s, q);
                assert!(
                    ((r.trapezoid - t) / t).abs() < 1e-13,
                    "{src} s={s} q={q}: {} vs {t}",
                    r.trapezoid
                );
                assert!(
                    ((r.midpoint - m) / m).abs() < 1e-13,
                    "{src} s={s} q={q}: {} vs {m}",
                    r.midpoint
                );
            }
        }
    }
}

#[test]
fn lhs_matches_simpson() {
    let f = handle("x^s/s", &[("s", 0.5)]);
    let lhs = bound_lhs(
        &f,
        &Interval::positive(0.25, 1.0).unwrap(),
        &Tolerance::default(),
    )
    .unwrap();
    let w = simpson(|x| f.value(x).unwrap() / x, 0.25, 1.0, 100_000) / 4f64.ln();
    let trap = (0.5 * (f.value(0.25).unwrap() + f.value(1.0).unwrap()) - w).abs();
    assert!((lhs.trapezoid - trap).abs() < 1e-12);
    assert!((lhs.trapezoid - 0.057_304_959_111_036_593).abs() < 1e-12);
}

#[test]
fn symbolic_derivatives_match_finite_differences() {
    let sources = [
        "x^3 - 2*x",
        "exp(x)*sqrt(x)",
        "ln(1 + x^2)",
        "x^x",
        "1/(x + 2)",
        "abs(x - 3)",
        "2^x / x",
    ];
    for src in sources {
        let f = handle(src, &[]);
        for x in [0.4, 1.1, 2.2, 3.7] {
            let h = 1e-5 * x;
            let fd = (f.value(x + h).unwrap() - f.value(x - h).unwrap()) / (2.0 * h);
            let d = f.derivative(x).unwrap();
            assert!(
                (d - fd).abs() <= 1e-7 * d.abs().max(1.0),
                "{src} at {x}: {d} vs {fd}"
            );
        }
    }
}
