//! Special means of two positive numbers.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MeanKind {
    Arithmetic,
    Geometric,
    Logarithmic,
    /// `p ∉ {-1, 0}`
    PLogarithmic(f64),
}

/// Arithmetic mean `(a+b)/2`.
pub fn arithmetic(a: f64, b: f64) -> f64 {
    0.5 * (a + b)
}

/// Geometric mean `√(ab)`.
pub fn geometric(a: f64, b: f64) -> f64 {
    (a * b).sqrt()
}

/// Logarithmic mean `(b−a)/(ln b − ln a)`, extended by `L(a, a) = a`.
///
/// Arguments must be positive; order does not matter.
pub fn logarithmic(a: f64, b: f64) -> f64 {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    if lo == hi {
        return lo;
    }
    let rel = (hi - lo) / lo;
    // ln(hi/lo) without the cancellation of ln hi − ln lo
    (hi - lo) / rel.ln_1p()
}

/// p-logarithmic mean `((b^{p+1} − a^{p+1}) / ((p+1)(b−a)))^{1/p}`,
/// extended by `L_p(a, a) = a`.
pub fn p_logarithmic(a: f64, b: f64, p: f64) -> f64 {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    if lo == hi {
        return lo;
    }
    // b^{p+1} − a^{p+1} = a^{p+1} · expm1((p+1) ln(b/a))
    let log_ratio = ((hi - lo) / lo).ln_1p();
    let diff = lo.powf(p + 1.0) * ((p + 1.0) * log_ratio).exp_m1();
    (diff / ((p + 1.0) * (hi - lo))).powf(1.0 / p)
}

/// Evaluates `kind` at `(a, b)` after validating the inputs.
pub fn mean(kind: MeanKind, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "means need positive finite arguments, got a={a}, b={b}"
        )));
    }
    Ok(match kind {
        MeanKind::Arithmetic => arithmetic(a, b),
        MeanKind::Geometric => geometric(a, b),
        MeanKind::Logarithmic => logarithmic(a, b),
        MeanKind::PLogarithmic(p) => {
            if p == 0.0 || p == -1.0 || !p.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "p-logarithmic mean needs p not in {{-1, 0}}, got {p}"
                )));
            }
            p_logarithmic(a, b, p)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::E;

    fn ulps(x: f64, y: f64) -> u64 {
        (x.to_bits() as i64 - y.to_bits() as i64).unsigned_abs()
    }

    #[test]
    fn examples() {
        assert_eq!(mean(MeanKind::Arithmetic, 1.0, 3.0).unwrap(), 2.0);
        assert_eq!(mean(MeanKind::Geometric, 4.0, 9.0).unwrap(), 6.0);
        let l = mean(MeanKind::Logarithmic, 1.0, E).unwrap();
        assert!((l - (E - 1.0)).abs() < 1e-15);
        let l1 = mean(MeanKind::PLogarithmic(1.0), 2.0, 5.0).unwrap();
        assert!((l1 - 3.5).abs() < 1e-15);
        // L(0.25^0.5, 1^0.5) = 0.5 / ln 2
        let l = mean(MeanKind::Logarithmic, 0.25f64.sqrt(), 1.0).unwrap();
        assert!((l - 0.721_347_520_444_481_7).abs() < 1e-15);
    }

    #[test]
    fn diagonal_extension() {
        for kind in [
            MeanKind::Arithmetic,
            MeanKind::Geometric,
            MeanKind::Logarithmic,
            MeanKind::PLogarithmic(2.5),
            MeanKind::PLogarithmic(-3.0),
        ] {
            assert_eq!(mean(kind, 1.7, 1.7).unwrap(), 1.7, "{kind:?}");
        }
    }

    #[test]
    fn logarithmic_near_diagonal() {
        let a = 0.8;
        let l = logarithmic(a, a + 1e-8);
        assert!(((l - a) / a).abs() <= 1e-6);
        // second order: L(a, a+ε) ≈ a + ε/2
        assert!((l - (a + 0.5e-8)).abs() < 1e-15);
    }

    #[test]
    fn p_logarithmic_known_values() {
        // p = -2 gives the geometric mean
        let v = p_logarithmic(2.0, 8.0, -2.0);
        assert!((v - 4.0).abs() < 1e-14);
        // p = 2: sqrt((b^3 - a^3)/(3(b-a))) = sqrt((a^2+ab+b^2)/3)
        let v = p_logarithmic(1.0, 2.0, 2.0);
        assert!((v - (7.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid() {
        assert!(mean(MeanKind::Arithmetic, 0.0, 1.0).is_err());
        assert!(mean(MeanKind::Logarithmic, -1.0, 1.0).is_err());
        assert!(mean(MeanKind::PLogarithmic(0.0), 1.0, 2.0).is_err());
        assert!(mean(MeanKind::PLogarithmic(-1.0), 1.0, 2.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn classical_chain(a in 1e-3f64..1e3, ratio in 1.0f64..1e3) {
            let b = a * ratio;
            prop_assume!(b > a);
            let g = geometric(a, b);
            let l = logarithmic(a, b);
            let m = arithmetic(a, b);
            let slack = 1e-12 * m;
            prop_assert!(g <= l + slack, "G={g} L={l}");
            prop_assert!(l <= m + slack, "L={l} A={m}");
        }
    }

    proptest! {
        #[test]
        fn symmetric(a in 1e-3f64..1e3, b in 1e-3f64..1e3, p in -4.0f64..4.0) {
            prop_assume!(p.abs() > 1e-3 && (p + 1.0).abs() > 1e-3);
            for kind in [MeanKind::Arithmetic, MeanKind::Geometric, MeanKind::Logarithmic, MeanKind::PLogarithmic(p)] {
                prop_assert_eq!(mean(kind, a, b).unwrap(), mean(kind, b, a).unwrap());
            }
        }

        #[test]
        fn homogeneous_power_of_two_scale(a in 1e-3f64..1e3, ratio in 1.01f64..100.0, k in -20i32..20) {
            let b = a * ratio;
            let lambda = 2f64.powi(k);
            for kind in [MeanKind::Arithmetic, MeanKind::Geometric, MeanKind::Logarithmic] {
                let scaled = mean(kind, lambda * a, lambda * b).unwrap();
                let base = lambda * mean(kind, a, b).unwrap();
                prop_assert!(ulps(scaled, base) <= 4, "{:?}: {} vs {}", kind, scaled, base);
            }
        }

        #[test]
        fn homogeneous_general_scale(a in 1e-3f64..1e3, ratio in 1.5f64..100.0, lambda in 1e-3f64..1e3) {
            let b = a * ratio;
            for kind in [MeanKind::Arithmetic, MeanKind::Geometric, MeanKind::Logarithmic] {
                let scaled = mean(kind, lambda * a, lambda * b).unwrap();
                let base = lambda * mean(kind, a, b).unwrap();
                prop_assert!(((scaled - base) / base).abs() <= 1e-14);
            }
        }
    }
}
