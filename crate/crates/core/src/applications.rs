//! Closed-form mean inequalities from the power family `f(x) = x^s / s`.
//!
//! For `0 < s < 1` and `0 < a < b ≤ 1`, `|f'|^q = x^{(s-1)q}` is
//! s-geometrically convex, and the bounds specialise to inequalities between
//! arithmetic, geometric and logarithmic means of `a^s`, `b^s`.

use serde::{Deserialize, Serialize};

use crate::bounds::{bound_rhs, Theorem};
use crate::expr::{Bindings, FunctionHandle};
use crate::kernels::CaseRegion;
use crate::means::{arithmetic, geometric, logarithmic};
use crate::{Error, Interval, Result};

/// Parameters of one power-family instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerFamilySpec {
    pub s: f64,
    pub q: f64,
    pub a: f64,
    pub b: f64,
}

impl PowerFamilySpec {
    pub fn new(s: f64, q: f64, a: f64, b: f64) -> Result<Self> {
        let spec = PowerFamilySpec { s, q, a, b };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let PowerFamilySpec { s, q, a, b } = *self;
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::InvalidInput(format!(
                "s must lie in (0, 1), got {s}"
            )));
        }
        if !(q >= 1.0 && q.is_finite()) {
            return Err(Error::InvalidInput(format!("q must be >= 1, got {q}")));
        }
        if !(a > 0.0 && a < b && b <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "need 0 < a < b <= 1, got a={a}, b={b}"
            )));
        }
        Ok(())
    }

    /// `k = (s² − s + 1) q`
    pub fn k(&self) -> f64 {
        (self.s * self.s - self.s + 1.0) * self.q
    }

    fn function(&self) -> Result<FunctionHandle> {
        let mut params = Bindings::new();
        params.insert("s".into(), self.s);
        FunctionHandle::parse("x^s/s", &params)
    }

    fn interval(&self) -> Result<Interval> {
        Interval::positive(self.a, self.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropositionReport {
    pub lhs: f64,
    /// Closed form in terms of means.
    pub rhs_closed: f64,
    /// `s` times the general bound for `x^s / s`.
    pub rhs_theorem: f64,
    /// `rhs_closed − lhs`
    pub margin: f64,
    /// `|rhs_closed − rhs_theorem|`
    pub gap: f64,
    pub region: CaseRegion,
}

impl PropositionReport {
    fn new(lhs: f64, rhs_closed: f64, rhs_theorem: f64, region: CaseRegion) -> Self {
        PropositionReport {
            lhs,
            rhs_closed,
            rhs_theorem,
            margin: rhs_closed - lhs,
            gap: (rhs_closed - rhs_theorem).abs(),
            region,
        }
    }
}

/// Quantities shared by both propositions.
struct Common {
    s: f64,
    q: f64,
    a: f64,
    b: f64,
    k: f64,
    /// `(s − 1)²`
    d: f64,
    g: f64,
    l: f64,
    trapezoid_lhs: f64,
    midpoint_lhs: f64,
}

impl Common {
    fn new(spec: &PowerFamilySpec) -> Self {
        let PowerFamilySpec { s, q, a, b } = *spec;
        let (as_, bs) = (a.powf(s), b.powf(s));
        let l_s = logarithmic(as_, bs);
        Common {
            s,
            q,
            a,
            b,
            k: spec.k(),
            d: (s - 1.0) * (s - 1.0),
            g: geometric(a, b),
            l: logarithmic(a, b),
            trapezoid_lhs: (arithmetic(as_, bs) - l_s).abs(),
            midpoint_lhs: (geometric(a, b).powf(s) - l_s).abs(),
        }
    }
}

// Rounding can push `b^k − L(a^k, b^k)` a hair below zero when a ≈ b.
fn nonneg(x: f64) -> f64 {
    x.max(0.0)
}

fn theorem_rhs(spec: &PowerFamilySpec, theorem: Theorem) -> Result<(f64, f64, CaseRegion)> {
    let r = bound_rhs(
        theorem,
        &spec.function()?,
        &spec.interval()?,
        spec.s,
        spec.q,
    )?;
    Ok((spec.s * r.trapezoid, spec.s * r.midpoint, r.region))
}

/// Power-mean form: returns the (trapezoid, midpoint) reports.
pub fn proposition31(spec: &PowerFamilySpec) -> Result<(PropositionReport, PropositionReport)> {
    spec.validate()?;
    let c = Common::new(spec);
    let Common {
        s,
        q,
        a,
        b,
        k,
        d,
        g,
        l,
        ..
    } = c;
    let inv_q = 1.0 / q;
    let k_factor = (1.0 / k).powf(inv_q);

    let (ak, bk) = (a.powf(k), b.powf(k));
    let lk = logarithmic(ak, bk);
    let trap = s / (2.0 * g.powf(2.0 * d))
        * ((b - a) / (2.0 * l)).powf(1.0 - inv_q)
        * k_factor
        * (nonneg(bk - lk).powf(inv_q) + nonneg(lk - ak).powf(inv_q));

    let (ah, bh) = (a.powf(k / 2.0), b.powf(k / 2.0));
    let lh = logarithmic(ah, bh);
    let mid = s / (2.0 * g.powf(d))
        * ((b - a) / (4.0 * l)).powf(1.0 - inv_q)
        * k_factor
        * (geometric(a.powf(s), b.powf(-d)) * nonneg(bh - lh).powf(inv_q)
            + geometric(b.powf(s), a.powf(-d)) * nonneg(lh - ah).powf(inv_q));

    let (t_thm, m_thm, region) = theorem_rhs(spec, Theorem::PowerMean)?;
    Ok((
        PropositionReport::new(c.trapezoid_lhs, trap, t_thm, region),
        PropositionReport::new(c.midpoint_lhs, mid, m_thm, region),
    ))
}

/// Hölder form, `q > 1`: returns the (trapezoid, midpoint) reports.
pub fn proposition32(spec: &PowerFamilySpec) -> Result<(PropositionReport, PropositionReport)> {
    spec.validate()?;
    if spec.q <= 1.0 {
        return Err(Error::InvalidInput(format!(
            "q must be > 1, got {}",
            spec.q
        )));
    }
    let c = Common::new(spec);
    let Common {
        s,
        q,
        a,
        b,
        k,
        d,
        g,
        l,
        ..
    } = c;
    let inv_q = 1.0 / q;
    let holder = ((q - 1.0) / (2.0 * q - 1.0)).powf(1.0 - inv_q);

    let trap = s * (b - a) / (l * g.powf(2.0 * d))
        * holder
        * logarithmic(a.powf(k), b.powf(k)).powf(inv_q);
    let mid = s * (b - a) / (2.0 * l * g.powf(d))
        * holder
        * logarithmic(a.powf(k / 2.0), b.powf(k / 2.0)).powf(inv_q)
        * arithmetic(
            geometric(a.powf(-d), b.powf(s)),
            geometric(a.powf(s), b.powf(-d)),
        );

    let (t_thm, m_thm, region) = theorem_rhs(spec, Theorem::Holder)?;
    Ok((
        PropositionReport::new(c.trapezoid_lhs, trap, t_thm, region),
        PropositionReport::new(c.midpoint_lhs, mid, m_thm, region),
    ))
}
