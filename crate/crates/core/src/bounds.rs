//! Both sides of every inequality and identity for a concrete `f`.
//!
//! Integrals of the form `(1/ln(b/a)) ∫_a^b f(x)/x dx` are evaluated after
//! the substitution `x = a^{1-t} b^t`, which turns them into `∫₀¹
//! f(a^{1-t} b^t) dt` with no `1/x` weight and no prefactor.

use serde::{Deserialize, Serialize};

use crate::expr::FunctionHandle;
use crate::kernels::{case_weights, h_dispatch, kernel_g, theta_set};
use crate::kernels::{CaseRegion, KernelFunction, ThetaSet, WeightPair};
use crate::means;
use crate::quadrature::{integrate, QuadratureResult, Tolerance};
use crate::{Error, Interval, Result};

fn converged(r: QuadratureResult) -> Result<QuadratureResult> {
    r.require_converged()
}

/// `a · (b/a)^t`, i.e. `a^{1-t} b^t`, through the log ratio.
fn geometric_point(a: f64, log_ratio: f64, t: f64) -> f64 {
    a * (t * log_ratio).exp()
}

/// `(1/ln(b/a)) ∫_a^b f(x)/x dx` and its quadrature error estimate.
pub fn weighted_log_integral(
    f: &FunctionHandle,
    iv: &Interval,
    tol: &Tolerance,
) -> Result<(f64, f64)> {
    iv.require_positive()?;
    let lr = iv.log_ratio();
    let r = integrate(|t| f.value(geometric_point(iv.a, lr, t)), 0.0, 1.0, tol)?;
    let r = converged(r)?;
    Ok((r.value, r.error))
}

/// The three terms of the classical Hermite–Hadamard inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalReport {
    /// `f((a+b)/2)`
    pub midpoint: f64,
    /// `(1/(b-a)) ∫_a^b f`
    pub average: f64,
    /// `(f(a)+f(b))/2`
    pub endpoints: f64,
    pub quadrature_error: f64,
}

pub fn hh_classical(f: &FunctionHandle, iv: &Interval, tol: &Tolerance) -> Result<ClassicalReport> {
    let r = converged(integrate(|x| f.value(x), iv.a, iv.b, tol)?)?;
    let width = iv.width();
    Ok(ClassicalReport {
        midpoint: f.value(0.5 * (iv.a + iv.b))?,
        average: r.value / width,
        endpoints: 0.5 * (f.value(iv.a)? + f.value(iv.b)?),
        quadrature_error: r.error / width,
    })
}

/// Terms of the geometric Hermite–Hadamard chain
/// `t1 ≤ t2 ≤ t3 ≤ t4 ≤ t5`, valid for geometrically convex `f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    /// `f(√(ab))`
    pub t1: f64,
    /// weighted log-integral of `√(f(x) f(ab/x))`
    pub t2: f64,
    /// weighted log-integral of `f`
    pub t3: f64,
    /// `L(f(a), f(b))`
    pub t4: f64,
    /// `(f(a)+f(b))/2`
    pub t5: f64,
    pub t2_error: f64,
    pub t3_error: f64,
}

impl ChainReport {
    pub fn terms(&self) -> [f64; 5] {
        [self.t1, self.t2, self.t3, self.t4, self.t5]
    }

    fn errors(&self) -> [f64; 5] {
        [0.0, self.t2_error, self.t3_error, 0.0, 0.0]
    }

    /// `t_{i+1} − t_i` for the four links, with the quadrature error
    /// estimates of both terms of each link.
    pub fn link_margins(&self) -> [(f64, f64); 4] {
        let t = self.terms();
        let e = self.errors();
        std::array::from_fn(|i| (t[i + 1] - t[i], e[i] + e[i + 1]))
    }

    /// True when every link holds within `slack` plus the quadrature error.
    pub fn is_ordered(&self, slack: f64) -> bool {
        self.link_margins()
            .iter()
            .all(|(m, err)| *m >= -(slack + err))
    }
}

pub fn geometric_chain(f: &FunctionHandle, iv: &Interval, tol: &Tolerance) -> Result<ChainReport> {
    iv.require_positive()?;
    let (a, b) = (iv.a, iv.b);
    let (fa, fb) = (f.value(a)?, f.value(b)?);
    if fa <= 0.0 || fb <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "geometric chain needs a positive function, f(a) = {fa}, f(b) = {fb}"
        )));
    }
    let lr = iv.log_ratio();
    let ab = a * b;
    let t2 = integrate(
        |t| {
            let x = geometric_point(a, lr, t);
            let product = f.value(x)? * f.value(ab / x)?;
            if product < 0.0 {
                return Err(Error::Domain(format!("f is not positive near {x}")));
            }
            Ok(product.sqrt())
        },
        0.0,
        1.0,
        tol,
    )?;
    let t2 = converged(t2)?;
    let (t3, t3_error) = weighted_log_integral(f, iv, tol)?;
    Ok(ChainReport {
        t1: f.value(iv.geometric_midpoint())?,
        t2: t2.value,
        t3,
        t4: means::logarithmic(fa, fb),
        t5: 0.5 * (fa + fb),
        t2_error: t2.error,
        t3_error,
    })
}

/// Absolute differences between the two sides of the midpoint and
/// trapezoid integral identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityResidual {
    pub midpoint: f64,
    pub trapezoid: f64,
    pub midpoint_lhs: f64,
    pub midpoint_rhs: f64,
    pub trapezoid_lhs: f64,
    pub trapezoid_rhs: f64,
    /// Bound on the residual attributable to quadrature.
    pub quadrature_error: f64,
}

pub fn lemma_identity_residuals(
    f: &FunctionHandle,
    iv: &Interval,
    tol: &Tolerance,
) -> Result<IdentityResidual> {
    iv.require_positive()?;
    let (a, b) = (iv.a, iv.b);
    let lr = iv.log_ratio();
    let (w, w_err) = weighted_log_integral(f, iv, tol)?;

    // ∫₀¹ t·r^t·f'(c·r^t) dt with r^t = exp(±scale·t·ln(b/a))
    let kernel = |c: f64, scale: f64| -> Result<QuadratureResult> {
        let r = integrate(
            |t| {
                let growth = (scale * t * lr).exp();
                Ok(t * growth * f.derivative(c * growth)?)
            },
            0.0,
            1.0,
            tol,
        )?;
        converged(r)
    };

    let mid_a = kernel(a, 0.5)?;
    let mid_b = kernel(b, -0.5)?;
    let midpoint_lhs = f.value(iv.geometric_midpoint())? - w;
    let midpoint_rhs = 0.25 * lr * (a * mid_a.value - b * mid_b.value);

    let trap_a = kernel(a, 1.0)?;
    let trap_b = kernel(b, -1.0)?;
    let trapezoid_lhs = 0.5 * (f.value(a)? + f.value(b)?) - w;
    let trapezoid_rhs = 0.5 * lr * (a * trap_a.value - b * trap_b.value);

    let error = w_err
        + 0.25 * lr * (a * mid_a.error + b * mid_b.error)
        + 0.5 * lr * (a * trap_a.error + b * trap_b.error);
    Ok(IdentityResidual {
        midpoint: (midpoint_lhs - midpoint_rhs).abs(),
        trapezoid: (trapezoid_lhs - trapezoid_rhs).abs(),
        midpoint_lhs,
        midpoint_rhs,
        trapezoid_lhs,
        trapezoid_rhs,
        quadrature_error: error,
    })
}

/// Which bound family a [`BoundReport`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Theorem {
    /// power-mean bound with `g1`, `q ≥ 1`
    PowerMean,
    /// Hölder bound with `g2`, `q > 1`
    Holder,
}

impl Theorem {
    pub fn kernel(self) -> KernelFunction {
        match self {
            Theorem::PowerMean => KernelFunction::G1,
            Theorem::Holder => KernelFunction::G2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Theorem::PowerMean => "thm21",
            Theorem::Holder => "thm22",
        }
    }
}

/// Right-hand sides of a trapezoid/midpoint bound pair, without the
/// integral on the left.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundRhs {
    pub trapezoid: f64,
    pub midpoint: f64,
    pub region: CaseRegion,
    pub weights: WeightPair,
    pub theta: ThetaSet,
}

fn check_sq(theorem: Theorem, s: f64, q: f64) -> Result<()> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "s must lie in (0, 1], got {s}"
        )));
    }
    let q_ok = match theorem {
        Theorem::PowerMean => q >= 1.0,
        Theorem::Holder => q > 1.0,
    };
    if !q_ok || !q.is_finite() {
        let want = match theorem {
            Theorem::PowerMean => "q >= 1",
            Theorem::Holder => "q > 1",
        };
        return Err(Error::InvalidInput(format!(
            "{} needs {want}, got q = {q}",
            theorem.label()
        )));
    }
    Ok(())
}

/// Evaluates the right-hand sides from `|f'(a)|` and `|f'(b)|` alone.
pub fn bound_rhs(
    theorem: Theorem,
    f: &FunctionHandle,
    iv: &Interval,
    s: f64,
    q: f64,
) -> Result<BoundRhs> {
    check_sq(theorem, s, q)?;
    iv.require_positive()?;
    let (a, b) = (iv.a, iv.b);
    let da = f.derivative(a)?.abs();
    let db = f.derivative(b)?.abs();
    let theta = theta_set(a, b, da, db, s, q)?;
    let (region, weights) = case_weights(a, b, da, db, s)?;
    let kind = theorem.kernel();
    let h_trap = h_dispatch(kind, weights, theta.theta1, theta.theta2, q)?;
    let h_mid = h_dispatch(kind, weights, theta.theta3, theta.theta4, q)?;
    let lr = iv.log_ratio();
    let inv_q = 1.0 / q;
    let (trapezoid, midpoint) = match theorem {
        Theorem::PowerMean => {
            let ln_half = -std::f64::consts::LN_2;
            (
                lr * ((2.0 - inv_q) * ln_half).exp() * h_trap,
                lr * ((3.0 - inv_q) * ln_half).exp() * h_mid,
            )
        }
        Theorem::Holder => {
            let c = ((1.0 - inv_q) * ((q - 1.0) / (2.0 * q - 1.0)).ln()).exp();
            (0.5 * lr * c * h_trap, 0.25 * lr * c * h_mid)
        }
    };
    Ok(BoundRhs {
        trapezoid,
        midpoint,
        region,
        weights,
        theta,
    })
}

/// Left-hand sides shared by both theorems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundLhs {
    /// `|(f(a)+f(b))/2 − W|`
    pub trapezoid: f64,
    /// `|f(√(ab)) − W|`
    pub midpoint: f64,
    pub weighted_integral: f64,
    pub quadrature_error: f64,
}

pub fn bound_lhs(f: &FunctionHandle, iv: &Interval, tol: &Tolerance) -> Result<BoundLhs> {
    let (w, err) = weighted_log_integral(f, iv, tol)?;
    Ok(BoundLhs {
        trapezoid: (0.5 * (f.value(iv.a)? + f.value(iv.b)?) - w).abs(),
        midpoint: (f.value(iv.geometric_midpoint())? - w).abs(),
        weighted_integral: w,
        quadrature_error: err,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem: Theorem,
    pub a: f64,
    pub b: f64,
    pub s: f64,
    pub q: f64,
    pub trapezoid_lhs: f64,
    pub trapezoid_rhs: f64,
    pub trapezoid_margin: f64,
    pub midpoint_lhs: f64,
    pub midpoint_rhs: f64,
    pub midpoint_margin: f64,
    pub region: CaseRegion,
    pub weights: WeightPair,
    pub theta: ThetaSet,
    pub quadrature_error: f64,
}

impl BoundReport {
    /// Both margins non-negative within `slack` plus the quadrature error.
    pub fn holds(&self, slack: f64) -> bool {
        let allowance = slack + self.quadrature_error;
        self.trapezoid_margin >= -allowance && self.midpoint_margin >= -allowance
    }
}

fn bound_report(
    theorem: Theorem,
    f: &FunctionHandle,
    iv: &Interval,
    s: f64,
    q: f64,
    tol: &Tolerance,
) -> Result<BoundReport> {
    let rhs = bound_rhs(theorem, f, iv, s, q)?;
    let lhs = bound_lhs(f, iv, tol)?;
    Ok(BoundReport {
        theorem,
        a: iv.a,
        b: iv.b,
        s,
        q,
        trapezoid_lhs: lhs.trapezoid,
        trapezoid_rhs: rhs.trapezoid,
        trapezoid_margin: rhs.trapezoid - lhs.trapezoid,
        midpoint_lhs: lhs.midpoint,
        midpoint_rhs: rhs.midpoint,
        midpoint_margin: rhs.midpoint - lhs.midpoint,
        region: rhs.region,
        weights: rhs.weights,
        theta: rhs.theta,
        quadrature_error: lhs.quadrature_error,
    })
}

/// Power-mean bounds (`g1`, `q ≥ 1`), assuming `|f'|^q` is s-geometrically
/// convex on the interval.
pub fn theorem21_bounds(
    f: &FunctionHandle,
    iv: &Interval,
    s: f64,
    q: f64,
    tol: &Tolerance,
) -> Result<BoundReport> {
    bound_report(Theorem::PowerMean, f, iv, s, q, tol)
}

/// Hölder bounds (`g2`, `q > 1`), same precondition as
/// [`theorem21_bounds`].
pub fn theorem22_bounds(
    f: &FunctionHandle,
    iv: &Interval,
    s: f64,
    q: f64,
    tol: &Tolerance,
) -> Result<BoundReport> {
    bound_report(Theorem::Holder, f, iv, s, q, tol)
}

/// Right-hand sides of the geometric-convexity (`s = 1`) bounds written with
/// `α(u) = (b|f'(b)| / a|f'(a)|)^u` and `γ(u) = 1/α(u)`, evaluated with
/// plain `powf` and no θ-set or region table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometricRhs {
    pub trapezoid: f64,
    pub midpoint: f64,
}

pub fn geometric_convex_rhs(
    kind: KernelFunction,
    a: f64,
    b: f64,
    da: f64,
    db: f64,
    q: f64,
) -> Result<GeometricRhs> {
    let alpha = |u: f64| ((b * db) / (a * da)).powf(u);
    let gamma = |u: f64| ((a * da) / (b * db)).powf(u);
    let inv_q = 1.0 / q;
    let braces = |u: f64| -> Result<f64> {
        Ok(a * da * kernel_g(kind, alpha(u))?.powf(inv_q)
            + b * db * kernel_g(kind, gamma(u))?.powf(inv_q))
    };
    let log_span = b.ln() - a.ln();
    let factor = match kind {
        KernelFunction::G1 => 0.5f64.powf(1.0 - inv_q),
        KernelFunction::G2 => ((q - 1.0) / (2.0 * q - 1.0)).powf(1.0 - inv_q),
    };
    Ok(GeometricRhs {
        trapezoid: log_span / 2.0 * factor * braces(q)?,
        midpoint: log_span / 4.0 * factor * braces(q / 2.0)?,
    })
}

/// `|rhs(s=1 pipeline) − rhs(α/γ formulas)|` for each bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionResiduals {
    pub power_mean_trapezoid: f64,
    pub power_mean_midpoint: f64,
    /// Present when `q > 1`.
    pub holder: Option<(f64, f64)>,
}

impl ReductionResiduals {
    pub fn max(&self) -> f64 {
        let (ht, hm) = self.holder.unwrap_or((0.0, 0.0));
        self.power_mean_trapezoid
            .max(self.power_mean_midpoint)
            .max(ht)
            .max(hm)
    }
}

pub fn s1_reduction_check(f: &FunctionHandle, iv: &Interval, q: f64) -> Result<ReductionResiduals> {
    iv.require_positive()?;
    let da = f.derivative(iv.a)?.abs();
    let db = f.derivative(iv.b)?.abs();

    let pm = bound_rhs(Theorem::PowerMean, f, iv, 1.0, q)?;
    let pm_direct = geometric_convex_rhs(KernelFunction::G1, iv.a, iv.b, da, db, q)?;
    let holder = if q > 1.0 {
        let h = bound_rhs(Theorem::Holder, f, iv, 1.0, q)?;
        let h_direct = geometric_convex_rhs(KernelFunction::G2, iv.a, iv.b, da, db, q)?;
        Some((
            (h.trapezoid - h_direct.trapezoid).abs(),
            (h.midpoint - h_direct.midpoint).abs(),
        ))
    } else {
        None
    };
    Ok(ReductionResiduals {
        power_mean_trapezoid: (pm.trapezoid - pm_direct.trapezoid).abs(),
        power_mean_midpoint: (pm.midpoint - pm_direct.midpoint).abs(),
        holder,
    })
}
