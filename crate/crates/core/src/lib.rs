//! Numerical verification of Hermite–Hadamard type inequalities for
//! s-geometrically convex functions.
//!
//! The crate is organised bottom-up:
//!
//! * [`expr`] parses user functions, evaluates them and differentiates them
//!   symbolically, producing a [`FunctionHandle`] carrying `f` and `f'`.
//! * [`quadrature`] is the adaptive Gauss–Kronrod integrator used for every
//!   integral.
//! * [`kernels`] holds the closed-form bound ingredients `g1`, `g2`, the
//!   θ-parameters and the four-region weight table.
//! * [`means`] implements the arithmetic, geometric, logarithmic and
//!   p-logarithmic means.
//! * [`convexity`] classifies functions on sample grids.
//! * [`bounds`] evaluates both sides of every inequality and identity.
//! * [`applications`] derives closed-form mean inequalities from the
//!   `x^s/s` family.

// NaN inputs are rejected with `!(x > 0.0)` style tests throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Reference values are kept at the precision they were computed to.
#![allow(clippy::excessive_precision)]

pub mod applications;
pub mod bounds;
pub mod convexity;
mod error;
pub mod expr;
pub mod kernels;
pub mod means;
pub mod quadrature;

pub use error::{Error, Result};
pub use expr::{Expr, FunctionHandle};
pub use kernels::{kernel_g, CaseRegion, KernelFunction, ThetaSet, WeightPair};
pub use quadrature::{integrate, QuadratureResult, Tolerance};

/// A finite closed interval `[a, b]` with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidInput(format!(
                "interval endpoints must be finite, got [{a}, {b}]"
            )));
        }
        if a >= b {
            return Err(Error::InvalidInput(format!(
                "interval requires a < b, got [{a}, {b}]"
            )));
        }
        Ok(Interval { a, b })
    }

    /// Interval inside the positive half line, as required by the geometric
    /// constructions (`ln a`, `√(ab)`, `a^{1-t} b^t`).
    pub fn positive(a: f64, b: f64) -> Result<Self> {
        let iv = Self::new(a, b)?;
        iv.require_positive()?;
        Ok(iv)
    }

    pub fn require_positive(&self) -> Result<()> {
        if self.a > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "interval must lie in (0, inf), got [{}, {}]",
                self.a, self.b
            )))
        }
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    /// `ln(b/a)`, computed as `ln_1p((b-a)/a)` so that narrow intervals keep
    /// their relative accuracy.
    pub fn log_ratio(&self) -> f64 {
        ((self.b - self.a) / self.a).ln_1p()
    }

    pub fn geometric_midpoint(&self) -> f64 {
        (self.a * self.b).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_validation() {
        assert!(Interval::new(1.0, 1.0).is_err());
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(0.0, f64::INFINITY).is_err());
        assert!(Interval::new(0.0, 1.0).is_ok());
        assert!(Interval::positive(0.0, 1.0).is_err());
        assert!(Interval::positive(-1.0, 1.0).is_err());
        let iv = Interval::positive(1.0, std::f64::consts::E).unwrap();
        assert!((iv.log_ratio() - 1.0).abs() < 1e-15);
    }
}
