//! Closed-form ingredients of the trapezoid- and midpoint-type bounds.
//!
//! * `g1(u) = ∫₀¹ t u^t dt = (u ln u − u + 1)/(ln u)²`, `g1(1) = 1/2`
//! * `g2(u) = ∫₀¹ u^t dt = (u − 1)/ln u`, `g2(1) = 1`
//! * θ-parameters `θ1 = (b·db^s / (a·da^s))^q`, `θ2 = 1/θ1`, `θ3 = √θ1`,
//!   `θ4 = √θ2`, where `da = |f'(a)|`, `db = |f'(b)|`.
//! * the four-region weight table selected by the positions of `da` and
//!   `db` relative to 1.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Series switch-over: inside `|u − 1| < SERIES_RADIUS` the kernels are
/// summed as power series in `ln u`.
const SERIES_RADIUS: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KernelFunction {
    /// `g1`, used by the power-mean (q ≥ 1) bounds.
    G1,
    /// `g2`, used by the Hölder (q > 1) bounds.
    G2,
}

/// Evaluates `g1` or `g2` at `u > 0`.
pub fn kernel_g(kind: KernelFunction, u: f64) -> Result<f64> {
    if !(u > 0.0) || !u.is_finite() {
        return Err(Error::InvalidInput(format!(
            "kernel argument must be positive and finite, got {u}"
        )));
    }
    if u == 1.0 {
        return Ok(match kind {
            KernelFunction::G1 => 0.5,
            KernelFunction::G2 => 1.0,
        });
    }
    let log_u = u.ln();
    if (u - 1.0).abs() < SERIES_RADIUS {
        // g1 = Σ Lⁿ/(n!(n+2)), g2 = Σ Lⁿ/(n!(n+1)), L = ln u; |L| < 1.0001e-4
        // so the L⁵ term is below 1e-22.
        let l = log_u;
        return Ok(match kind {
            KernelFunction::G1 => {
                0.5 + l * (1.0 / 3.0 + l * (1.0 / 8.0 + l * (1.0 / 30.0 + l / 144.0)))
            }
            KernelFunction::G2 => 1.0 + l * (0.5 + l * (1.0 / 6.0 + l * (1.0 / 24.0 + l / 120.0))),
        });
    }
    Ok(match kind {
        // u − 1 is exact near 1, so the cancellation is confined to one
        // subtraction of two ≈ L-sized terms
        KernelFunction::G1 => (u * log_u - (u - 1.0)) / (log_u * log_u),
        KernelFunction::G2 => (u - 1.0) / log_u,
    })
}

/// The θ-parameters. `theta3`/`theta4` are the square roots of
/// `theta1`/`theta2`, and `theta1 * theta2 == 1` up to rounding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaSet {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
    pub theta4: f64,
}

impl ThetaSet {
    /// θ-set from `ln(a·da^s)` and `ln(b·db^s)`.
    ///
    /// Computed in log space, so a swap of the two arguments swaps
    /// `theta1 <-> theta2` and `theta3 <-> theta4` exactly.
    pub fn from_log_weights(log_left: f64, log_right: f64, q: f64) -> Result<Self> {
        let exponent = q * (log_right - log_left);
        let theta1 = exponent.exp();
        let theta2 = (q * (log_left - log_right)).exp();
        let set = ThetaSet {
            theta1,
            theta2,
            theta3: theta1.sqrt(),
            theta4: theta2.sqrt(),
        };
        let ok = |t: f64| t.is_finite() && t > 0.0;
        if ok(set.theta1) && ok(set.theta2) {
            Ok(set)
        } else {
            Err(Error::Range(format!(
                "theta overflows: q * ln(b db^s / (a da^s)) = {exponent}"
            )))
        }
    }
}

fn check_endpoint_inputs(a: f64, b: f64, da: f64, db: f64, s: f64) -> Result<()> {
    if !(a > 0.0 && a < b && b.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "need 0 < a < b, got a={a}, b={b}"
        )));
    }
    if !(da > 0.0 && da.is_finite() && db > 0.0 && db.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "derivative magnitudes must be positive and finite, got |f'(a)|={da}, |f'(b)|={db}"
        )));
    }
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "s must lie in (0, 1], got {s}"
        )));
    }
    Ok(())
}

/// θ-set for endpoints `a < b` with derivative magnitudes `da`, `db`.
pub fn theta_set(a: f64, b: f64, da: f64, db: f64, s: f64, q: f64) -> Result<ThetaSet> {
    check_endpoint_inputs(a, b, da, db, s)?;
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::InvalidInput(format!("q must be >= 1, got {q}")));
    }
    let log_left = a.ln() + s * da.ln();
    let log_right = b.ln() + s * db.ln();
    ThetaSet::from_log_weights(log_left, log_right, q)
}

/// Which branch of the weight table applies. Ties (a magnitude equal to 1)
/// go to the lower-numbered region, in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseRegion {
    /// `|f'(a)|, |f'(b)| <= 1`
    BothBelowOne,
    /// `|f'(a)|, |f'(b)| >= 1`
    BothAboveOne,
    /// `|f'(a)| <= 1 <= |f'(b)|`
    ABelowBAbove,
    /// `|f'(b)| <= 1 <= |f'(a)|`
    BBelowAAbove,
}

impl CaseRegion {
    pub const ALL: [CaseRegion; 4] = [
        CaseRegion::BothBelowOne,
        CaseRegion::BothAboveOne,
        CaseRegion::ABelowBAbove,
        CaseRegion::BBelowAAbove,
    ];

    pub fn classify(da: f64, db: f64) -> CaseRegion {
        if da <= 1.0 && db <= 1.0 {
            CaseRegion::BothBelowOne
        } else if da >= 1.0 && db >= 1.0 {
            CaseRegion::BothAboveOne
        } else if da < 1.0 {
            CaseRegion::ABelowBAbove
        } else {
            CaseRegion::BBelowAAbove
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CaseRegion::BothBelowOne => "both_below_one",
            CaseRegion::BothAboveOne => "both_above_one",
            CaseRegion::ABelowBAbove => "a_below_b_above",
            CaseRegion::BBelowAAbove => "b_below_a_above",
        }
    }

    /// Whether `(da, db)` lies in the closed region.
    pub fn contains(self, da: f64, db: f64) -> bool {
        match self {
            CaseRegion::BothBelowOne => da <= 1.0 && db <= 1.0,
            CaseRegion::BothAboveOne => da >= 1.0 && db >= 1.0,
            CaseRegion::ABelowBAbove => da <= 1.0 && db >= 1.0,
            CaseRegion::BBelowAAbove => db <= 1.0 && da >= 1.0,
        }
    }
}

/// Coefficients multiplying `g^{1/q}(θi)` and `g^{1/q}(θj)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightPair {
    pub wa: f64,
    pub wb: f64,
}

/// Evaluates the weight formula of `region`, whether or not `(da, db)`
/// actually lies in it.
pub fn region_weights(region: CaseRegion, a: f64, b: f64, da: f64, db: f64, s: f64) -> WeightPair {
    let (wa, wb) = match region {
        CaseRegion::BothBelowOne => (a * da.powf(s), b * db.powf(s)),
        CaseRegion::BothAboveOne => (a * da * db.powf(1.0 - s), b * db * da.powf(1.0 - s)),
        CaseRegion::ABelowBAbove => (a * da.powf(s) * db.powf(1.0 - s), b * db),
        CaseRegion::BBelowAAbove => (a * da, b * db.powf(s) * da.powf(1.0 - s)),
    };
    WeightPair { wa, wb }
}

/// Selects the region for `(da, db)` and evaluates its weights.
pub fn case_weights(a: f64, b: f64, da: f64, db: f64, s: f64) -> Result<(CaseRegion, WeightPair)> {
    check_endpoint_inputs(a, b, da, db, s)?;
    let region = CaseRegion::classify(da, db);
    Ok((region, region_weights(region, a, b, da, db, s)))
}

/// `wa · g(θi)^{1/q} + wb · g(θj)^{1/q}`.
pub fn h_dispatch(
    kind: KernelFunction,
    weights: WeightPair,
    theta_i: f64,
    theta_j: f64,
    q: f64,
) -> Result<f64> {
    let inv_q = 1.0 / q;
    let gi = kernel_g(kind, theta_i)?;
    let gj = kernel_g(kind, theta_j)?;
    Ok(weights.wa * gi.powf(inv_q) + weights.wb * gj.powf(inv_q))
}

/// Symbols of the exponent inequality used to pass from `(1−t)^s`, `t^s`
/// exponents to linear ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoSidedBase {
    /// in (0, 1]
    pub mu: f64,
    /// in [1, ∞)
    pub eta: f64,
    /// in (0, 1]
    pub alpha: f64,
    /// in (0, 1]
    pub s: f64,
}

/// Checks `μ^{α^s} ≤ μ^{αs}` and `η^{α^s} ≤ η^{αs+1−s}`, each with slack
/// `1e-15 · max(|lhs|, |rhs|)`.
pub fn check_exponent_inequality(base: &TwoSidedBase) -> (bool, bool) {
    let TwoSidedBase { mu, eta, alpha, s } = *base;
    let alpha_pow_s = alpha.powf(s);
    let holds = |lhs: f64, rhs: f64| lhs <= rhs + 1e-15 * lhs.abs().max(rhs.abs());
    (
        holds(mu.powf(alpha_pow_s), mu.powf(alpha * s)),
        holds(eta.powf(alpha_pow_s), eta.powf(alpha * s + 1.0 - s)),
    )
}
