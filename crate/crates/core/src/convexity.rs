//! Sample-based convexity classification.
//!
//! Each check evaluates its defining inequality on a deterministic tensor
//! grid `x_i × y_j × t_k` and reports the smallest margin `rhs − lhs`.
//! A verdict of "fails" means some grid point violates the inequality by
//! more than the slack; "holds" only means no sampled point does.

use serde::{Deserialize, Serialize};

use crate::{Error, Interval, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleGrid {
    pub points: usize,
    pub t_values: Vec<f64>,
    pub slack: f64,
}

impl Default for SampleGrid {
    fn default() -> Self {
        SampleGrid {
            points: 17,
            t_values: vec![0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0],
            slack: 1e-12,
        }
    }
}

impl SampleGrid {
    pub fn validate(&self) -> Result<()> {
        if self.points < 3 {
            return Err(Error::InvalidInput(format!(
                "sample grid needs at least 3 points per axis, got {}",
                self.points
            )));
        }
        if self.t_values.iter().any(|t| !(0.0..=1.0).contains(t))
            || self.t_values.windows(2).any(|w| w[0] > w[1])
        {
            return Err(Error::InvalidInput(
                "t-values must be sorted and lie in [0, 1]".into(),
            ));
        }
        if !(self.slack >= 0.0) {
            return Err(Error::InvalidInput("slack must be non-negative".into()));
        }
        Ok(())
    }

    /// `points` log-spaced abscissae with exact endpoints.
    fn log_points(&self, iv: &Interval) -> Vec<f64> {
        let n = self.points;
        let log_ratio = iv.log_ratio();
        (0..n)
            .map(|i| match i {
                0 => iv.a,
                _ if i + 1 == n => iv.b,
                _ => iv.a * (log_ratio * (i as f64 / (n - 1) as f64)).exp(),
            })
            .collect()
    }

    fn linear_points(&self, iv: &Interval) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| match i {
                0 => iv.a,
                _ if i + 1 == n => iv.b,
                _ => iv.a + iv.width() * (i as f64 / (n - 1) as f64),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityVerdict {
    pub holds: bool,
    pub worst_margin: f64,
    /// Present iff the check fails.
    pub witness: Option<Witness>,
}

/// `f(x)^{t^s} f(y)^{(1-t)^s} - f(x^t y^{1-t})`.
pub fn s_geometric_margin<F>(f: &F, x: f64, y: f64, t: f64, s: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let z = if t == 1.0 {
        x
    } else if t == 0.0 {
        y
    } else {
        (t * x.ln() + (1.0 - t) * y.ln()).exp()
    };
    let lhs = f(z)?;
    let (fx, fy) = (f(x)?, f(y)?);
    if fx <= 0.0 || fy <= 0.0 {
        return Err(Error::Domain(format!(
            "s-geometric convexity needs a positive function, f({x}) = {fx}, f({y}) = {fy}"
        )));
    }
    let rhs = fx.powf(t.powf(s)) * fy.powf((1.0 - t).powf(s));
    Ok(rhs - lhs)
}

/// `α^s f(x) + β^s f(y) - f(αx + βy)` with `α = t`, `β = 1 - t`.
pub fn s_convex_margin<F>(f: &F, x: f64, y: f64, t: f64, s: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let beta = 1.0 - t;
    let lhs = f(t * x + beta * y)?;
    // 0^s = 0 for s > 0; the endpoint term drops out exactly
    let weight = |w: f64| if w == 0.0 { 0.0 } else { w.powf(s) };
    let rhs = weight(t) * f(x)? + weight(beta) * f(y)?;
    Ok(rhs - lhs)
}

fn scan<F>(points: &[f64], grid: &SampleGrid, mut margin: F) -> Result<ConvexityVerdict>
where
    F: FnMut(f64, f64, f64) -> Result<f64>,
{
    let mut worst = f64::INFINITY;
    let mut worst_at = None;
    for &x in points {
        for &y in points {
            for &t in &grid.t_values {
                let m = margin(x, y, t)?;
                // strict comparison keeps the first minimum in grid order
                if m < worst {
                    worst = m;
                    worst_at = Some(Witness { x, y, t });
                }
            }
        }
    }
    let holds = worst >= -grid.slack;
    Ok(ConvexityVerdict {
        holds,
        worst_margin: worst,
        witness: if holds { None } else { worst_at },
    })
}

fn check_s(s: f64) -> Result<()> {
    if s > 0.0 && s <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "s must lie in (0, 1], got {s}"
        )))
    }
}

/// Tests `f(x^t y^{1-t}) <= f(x)^{t^s} f(y)^{(1-t)^s}` on a log-spaced
/// grid over the positive interval. With `s = 1` this is plain geometric
/// convexity.
pub fn check_s_geometric<F>(
    f: F,
    interval: &Interval,
    s: f64,
    grid: &SampleGrid,
) -> Result<ConvexityVerdict>
where
    F: Fn(f64) -> Result<f64>,
{
    check_s(s)?;
    grid.validate()?;
    interval.require_positive()?;
    let points = grid.log_points(interval);
    scan(&points, grid, |x, y, t| s_geometric_margin(&f, x, y, t, s))
}

/// Tests `f(αx + βy) <= α^s f(x) + β^s f(y)` on a linear grid over an
/// interval of `[0, ∞)`. With `s = 1` this is ordinary convexity.
pub fn check_s_convex_second_sense<F>(
    f: F,
    interval: &Interval,
    s: f64,
    grid: &SampleGrid,
) -> Result<ConvexityVerdict>
where
    F: Fn(f64) -> Result<f64>,
{
    check_s(s)?;
    grid.validate()?;
    if interval.a < 0.0 {
        return Err(Error::InvalidInput(format!(
            "s-convexity is defined on [0, inf), got [{}, {}]",
            interval.a, interval.b
        )));
    }
    let points = grid.linear_points(interval);
    scan(&points, grid, |x, y, t| s_convex_margin(&f, x, y, t, s))
}

/// s-geometric verdict for each `s` independently; nothing is inferred
/// between grid values.
pub fn s_profile<F>(
    f: F,
    interval: &Interval,
    grid: &SampleGrid,
    s_grid: &[f64],
) -> Result<Vec<(f64, ConvexityVerdict)>>
where
    F: Fn(f64) -> Result<f64>,
{
    s_grid
        .iter()
        .map(|&s| Ok((s, check_s_geometric(&f, interval, s, grid)?)))
        .collect()
}
