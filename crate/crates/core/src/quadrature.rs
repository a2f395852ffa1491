//! Adaptive Gauss–Kronrod quadrature on finite intervals.
//!
//! Each panel is integrated with the 15-point Kronrod rule and its embedded
//! 7-point Gauss rule; `|K15 - G7|` is the local error estimate. Panels are
//! bisected depth-first, left half first, until every panel's estimate is
//! below the tolerance prorated by its share of the interval width. The
//! accepted panels therefore come out in ascending order and are summed
//! pairwise in that order, so results are reproducible bit for bit.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

// 15-point Kronrod abscissae on [-1, 1] (non-negative half, descending).
// Odd indices are the 7-point Gauss abscissae.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// weights of the 7-point Gauss rule at XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_subdivisions: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-10,
            rel: 1e-10,
            max_subdivisions: 1 << 20,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64, max_subdivisions: usize) -> Result<Self> {
        let tol = Tolerance {
            abs,
            rel,
            max_subdivisions,
        };
        tol.validate()?;
        Ok(tol)
    }

    /// Same tolerance for the absolute and relative parts.
    pub fn uniform(tol: f64) -> Result<Self> {
        Self::new(tol, tol, Tolerance::default().max_subdivisions)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |t: f64| t > 0.0 && t.is_finite();
        if !ok(self.abs) || !ok(self.rel) {
            return Err(Error::InvalidInput(format!(
                "tolerances must be positive and finite, got abs {} rel {}",
                self.abs, self.rel
            )));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidInput("max subdivisions must be >= 1".into()));
        }
        Ok(())
    }

    /// Both tolerances divided by `factor`.
    pub fn tightened(&self, factor: f64) -> Self {
        Tolerance {
            abs: self.abs / factor,
            rel: self.rel / factor,
            max_subdivisions: self.max_subdivisions,
        }
    }

    /// Error target for an integral of magnitude `value`.
    pub fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    /// Absolute error estimate.
    pub error: f64,
    pub subdivisions: usize,
    pub converged: bool,
}

impl QuadratureResult {
    /// Turns a non-converged result into [`Error::NonConvergence`].
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NonConvergence {
                value: self.value,
                error: self.error,
                subdivisions: self.subdivisions,
            })
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

fn kronrod<F>(f: &mut F, lo: f64, hi: f64) -> Result<Panel>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut eval = |x: f64| -> Result<f64> {
        let v = f(x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain(format!("integrand is not finite at {x}")))
        }
    };
    let fc = eval(center)?;
    let mut kronrod_sum = WGK[7] * fc;
    let mut gauss_sum = WG[3] * fc;
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = eval(center - dx)? + eval(center + dx)?;
        kronrod_sum += w * pair;
        if j % 2 == 1 {
            gauss_sum += WG[j / 2] * pair;
        }
    }
    Ok(Panel {
        lo,
        hi,
        value: kronrod_sum * half,
        error: ((kronrod_sum - gauss_sum) * half).abs(),
    })
}

fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n => {
            let (l, r) = values.split_at(n / 2);
            pairwise_sum(l) + pairwise_sum(r)
        }
    }
}

/// Integrates `f` over `[lo, hi]`.
///
/// Evaluation errors from `f` (and non-finite integrand values) abort the
/// integration. Running out of subdivisions does not: the result is
/// returned with `converged = false`.
pub fn integrate<F>(mut f: F, lo: f64, hi: f64, tol: &Tolerance) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    tol.validate()?;
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
        return Err(Error::InvalidInput(format!(
            "integration needs finite lo < hi, got [{lo}, {hi}]"
        )));
    }
    let width = hi - lo;
    let whole = kronrod(&mut f, lo, hi)?;
    let target = tol.target(whole.value);

    let mut accepted: Vec<Panel> = Vec::new();
    let mut stack = vec![whole];
    let mut subdivisions = 0usize;
    let mut all_met = true;
    while let Some(panel) = stack.pop() {
        let share = target * ((panel.hi - panel.lo) / width);
        if panel.error <= share {
            accepted.push(panel);
            continue;
        }
        let mid = 0.5 * (panel.lo + panel.hi);
        let splittable = mid > panel.lo && mid < panel.hi;
        if subdivisions >= tol.max_subdivisions || !splittable {
            all_met = false;
            accepted.push(panel);
            continue;
        }
        subdivisions += 1;
        let left = kronrod(&mut f, panel.lo, mid)?;
        let right = kronrod(&mut f, mid, panel.hi)?;
        stack.push(right);
        stack.push(left);
    }

    let values: Vec<f64> = accepted.iter().map(|p| p.value).collect();
    let errors: Vec<f64> = accepted.iter().map(|p| p.error).collect();
    let value = pairwise_sum(&values);
    let error = pairwise_sum(&errors);
    Ok(QuadratureResult {
        value,
        error,
        subdivisions,
        converged: all_met && error <= tol.target(value),
    })
}

/// [`integrate`] for integrands that cannot fail.
pub fn integrate_fn<F>(mut f: F, lo: f64, hi: f64, tol: &Tolerance) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> f64,
{
    integrate(|x| Ok(f(x)), lo, hi, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn reciprocal_on_one_to_e() {
        let r = integrate_fn(|x| 1.0 / x, 1.0, std::f64::consts::E, &tol()).unwrap();
        assert!(r.converged);
        assert!((r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_on_unit_interval() {
        let r = integrate_fn(|t| t, 0.0, 1.0, &tol()).unwrap();
        assert!((r.value - 0.5).abs() < 1e-15);
        assert_eq!(r.subdivisions, 0);
    }

    #[test]
    fn t_times_two_to_t() {
        // midpoint rule with 10^6 panels gave 0.8040211007722194; closed
        // form (2 ln 2 - 1)/(ln 2)^2 = 0.80402110077231901685...
        let r = integrate_fn(|t| t * 2f64.powf(t), 0.0, 1.0, &tol()).unwrap();
        assert!((r.value - 0.804_021_100_772_319_0).abs() < 1e-14);
        let ln2 = 2f64.ln();
        assert!((r.value - (2.0 * ln2 - 1.0) / (ln2 * ln2)).abs() < 1e-14);
    }

    #[test]
    fn polynomial_error_estimate_is_tiny() {
        // G7 is exact through degree 13
        for degree in 0..=13 {
            let r = integrate_fn(|x| x.powi(degree), 0.0, 1.0, &tol()).unwrap();
            assert_eq!(r.subdivisions, 0);
            assert!(r.error <= 1e-13 * r.value.abs(), "degree {degree}: {r:?}");
            assert!((r.value - 1.0 / (degree as f64 + 1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn non_convergence_is_flagged() {
        let tight = Tolerance::new(1e-14, 1e-14, 3).unwrap();
        let r = integrate_fn(|x| x.sqrt(), 0.0, 1.0, &tight).unwrap();
        assert!(!r.converged);
        assert_eq!(r.subdivisions, 3);
        assert!(matches!(
            r.require_converged(),
            Err(Error::NonConvergence { .. })
        ));
    }

    #[test]
    fn evaluation_errors_propagate() {
        let r = integrate(
            |x| {
                if x > 0.5 {
                    Err(Error::Domain("boom".into()))
                } else {
                    Ok(x)
                }
            },
            0.0,
            1.0,
            &tol(),
        );
        assert_eq!(r.unwrap_err(), Error::Domain("boom".into()));
        let r = integrate_fn(|x| 1.0 / (x - 0.5), 0.0, 1.0, &tol());
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(integrate_fn(|x| x, 1.0, 1.0, &tol()).is_err());
        assert!(integrate_fn(|x| x, 0.0, f64::INFINITY, &tol()).is_err());
        assert!(Tolerance::new(0.0, 1e-10, 10).is_err());
        assert!(Tolerance::new(1e-10, -1.0, 10).is_err());
        assert!(Tolerance::new(1e-10, 1e-10, 0).is_err());
    }

    #[test]
    fn deterministic_bits() {
        let f = |x: f64| (x * 3.0).sin().exp() / (1.0 + x * x);
        let a = integrate_fn(f, 0.0, 7.0, &tol()).unwrap();
        let b = integrate_fn(f, 0.0, 7.0, &tol()).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.error.to_bits(), b.error.to_bits());
        assert!(a.subdivisions > 0);
    }

    fn poly(c: &[f64], x: f64) -> f64 {
        c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
    }

    proptest! {
        #[test]
        fn linearity(
            p in proptest::collection::vec(-5.0f64..5.0, 1..20),
            q in proptest::collection::vec(-5.0f64..5.0, 1..20),
            alpha in -3.0f64..3.0,
            beta in -3.0f64..3.0,
            lo in -2.0f64..0.0,
            width in 0.1f64..3.0,
        ) {
            let t = tol();
            let hi = lo + width;
            let fp = integrate_fn(|x| poly(&p, x), lo, hi, &t).unwrap();
            let fq = integrate_fn(|x| poly(&q, x), lo, hi, &t).unwrap();
            let combined = integrate_fn(|x| alpha * poly(&p, x) + beta * poly(&q, x), lo, hi, &t).unwrap();
            let expected = alpha * fp.value + beta * fq.value;
            prop_assert!((combined.value - expected).abs() <= 2.0 * t.target(expected));
        }

        #[test]
        fn interval_additivity(split in 0.01f64..0.99, k in 0.1f64..4.0) {
            let t = tol();
            let f = |x: f64| (k * x).exp() * (1.0 + x).ln();
            let (a, c) = (0.0, 2.0);
            let b = a + split * (c - a);
            let whole = integrate_fn(f, a, c, &t).unwrap();
            let left = integrate_fn(f, a, b, &t).unwrap();
            let right = integrate_fn(f, b, c, &t).unwrap();
            prop_assert!((whole.value - left.value - right.value).abs() <= 2.0 * t.target(whole.value));
        }
    }
}
