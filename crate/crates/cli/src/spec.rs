//! Sweep configuration, as read from JSON or assembled from flags.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use geoconvex_core::expr::parse;
use geoconvex_core::{Expr, Tolerance};

use crate::CliError;

/// The checks a sweep can run at each grid point.
#[derive(
    Debug,
    Clone,
    Copy,
    PartialEq,
    Eq,
    Hash,
    PartialOrd,
    Ord,
    Serialize,
    Deserialize,
    clap::ValueEnum,
)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    /// integral identities behind the midpoint and trapezoid bounds
    Lemma,
    /// power-mean bounds (q >= 1)
    Thm21,
    /// Hölder bounds (q > 1)
    Thm22,
    /// geometric Hermite-Hadamard chain
    Chain,
    /// classical Hermite-Hadamard inequality
    Hh,
    /// power-family mean inequalities, power-mean form
    Prop31,
    /// power-family mean inequalities, Hölder form
    Prop32,
    /// grid test that |f'|^q is s-geometrically convex
    Convexity,
}

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Check::Lemma => "lemma",
            Check::Thm21 => "thm21",
            Check::Thm22 => "thm22",
            Check::Chain => "chain",
            Check::Hh => "hh",
            Check::Prop31 => "prop31",
            Check::Prop32 => "prop32",
            Check::Convexity => "convexity",
        }
    }

    fn uses_s(self) -> bool {
        matches!(
            self,
            Check::Thm21 | Check::Thm22 | Check::Prop31 | Check::Prop32 | Check::Convexity
        )
    }

    fn uses_q(self) -> bool {
        self.uses_s()
    }

    fn uses_function(self) -> bool {
        !matches!(self, Check::Prop31 | Check::Prop32)
    }
}

/// Partial tolerance override; missing fields keep the base value.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverride {
    pub abs: Option<f64>,
    pub rel: Option<f64>,
    pub max_subdivisions: Option<usize>,
}

impl ToleranceOverride {
    pub fn uniform(tol: f64) -> Self {
        ToleranceOverride {
            abs: Some(tol),
            rel: Some(tol),
            max_subdivisions: None,
        }
    }

    pub fn apply(&self, base: Tolerance) -> Tolerance {
        Tolerance {
            abs: self.abs.unwrap_or(base.abs),
            rel: self.rel.unwrap_or(base.rel),
            max_subdivisions: self.max_subdivisions.unwrap_or(base.max_subdivisions),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Expression in `x`; may be omitted when only `prop31`/`prop32` run.
    #[serde(default)]
    pub function: Option<String>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    /// Replaces the symbolic derivative.
    #[serde(default)]
    pub derivative: Option<String>,
    /// Left endpoints, crossed with `b`; pairs with `a >= b` are dropped.
    #[serde(default)]
    pub a: Vec<f64>,
    #[serde(default)]
    pub b: Vec<f64>,
    /// Explicit `[a, b]` pairs, visited before the `a × b` product.
    #[serde(default)]
    pub intervals: Vec<[f64; 2]>,
    #[serde(default)]
    pub s: Vec<f64>,
    #[serde(default)]
    pub q: Vec<f64>,
    #[serde(default)]
    pub tolerance: Option<ToleranceOverride>,
    #[serde(default)]
    pub checks: Vec<Check>,
    /// Pass threshold: `margin >= -(slack + err_estimate)`.
    #[serde(default)]
    pub slack: Option<f64>,
    /// Allowed residual for the identity checks.
    #[serde(default)]
    pub identity_tol: Option<f64>,
}

pub const DEFAULT_SLACK: f64 = 1e-12;
pub const DEFAULT_IDENTITY_TOL: f64 = 1e-8;
pub const DEFAULT_S: f64 = 1.0;
pub const DEFAULT_Q: f64 = 2.0;

/// One grid point of one check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub check: Check,
    pub a: f64,
    pub b: f64,
    pub s: Option<f64>,
    pub q: Option<f64>,
}

/// A validated sweep, ready to run.
#[derive(Debug, Clone)]
pub struct ResolvedSweep {
    pub label: String,
    pub source: Option<String>,
    pub expr: Option<Expr>,
    pub params: BTreeMap<String, f64>,
    pub derivative: Option<String>,
    pub tolerance: Tolerance,
    pub slack: f64,
    pub identity_tol: f64,
    pub points: Vec<Point>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl SweepSpec {
    /// Flag values replace file values wherever the flag was given.
    pub fn override_with(&mut self, other: &SweepSpec) {
        if other.function.is_some() {
            self.function = other.function.clone();
        }
        for (k, v) in &other.params {
            self.params.insert(k.clone(), *v);
        }
        if other.derivative.is_some() {
            self.derivative = other.derivative.clone();
        }
        if !other.a.is_empty() || !other.b.is_empty() || !other.intervals.is_empty() {
            self.a = other.a.clone();
            self.b = other.b.clone();
            self.intervals = other.intervals.clone();
        }
        if !other.s.is_empty() {
            self.s = other.s.clone();
        }
        if !other.q.is_empty() {
            self.q = other.q.clone();
        }
        if let Some(t) = other.tolerance {
            let base = self.tolerance.unwrap_or_default();
            self.tolerance = Some(ToleranceOverride {
                abs: t.abs.or(base.abs),
                rel: t.rel.or(base.rel),
                max_subdivisions: t.max_subdivisions.or(base.max_subdivisions),
            });
        }
        if !other.checks.is_empty() {
            self.checks = other.checks.clone();
        }
        if other.slack.is_some() {
            self.slack = other.slack;
        }
        if other.identity_tol.is_some() {
            self.identity_tol = other.identity_tol;
        }
    }

    fn interval_pairs(&self) -> Result<Vec<(f64, f64)>, CliError> {
        if self.a.is_empty() != self.b.is_empty() {
            return Err(usage("the a and b grids must be given together"));
        }
        let mut pairs: Vec<(f64, f64)> = self.intervals.iter().map(|[a, b]| (*a, *b)).collect();
        for &[a, b] in &self.intervals {
            if a.partial_cmp(&b) != Some(std::cmp::Ordering::Less) {
                return Err(usage(format!("interval [{a}, {b}] needs a < b")));
            }
        }
        let before = pairs.len();
        for &a in &self.a {
            for &b in &self.b {
                if a < b {
                    pairs.push((a, b));
                }
            }
        }
        if !self.a.is_empty() && pairs.len() == before {
            return Err(usage("no pair of the a and b grids satisfies a < b"));
        }
        if pairs.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
            return Err(usage("interval endpoints must be finite"));
        }
        Ok(pairs)
    }

    /// Validates the spec and expands its grids into points in visiting
    /// order: check, interval, s, q.
    pub fn resolve(&self, base_tolerance: Tolerance) -> Result<ResolvedSweep, CliError> {
        let tolerance = self.tolerance.unwrap_or_default().apply(base_tolerance);
        tolerance.validate().map_err(|e| usage(e.to_string()))?;
        let slack = self.slack.unwrap_or(DEFAULT_SLACK);
        let identity_tol = self.identity_tol.unwrap_or(DEFAULT_IDENTITY_TOL);
        let non_negative = |x: f64| x >= 0.0 && x.is_finite();
        if !non_negative(slack) || !non_negative(identity_tol) {
            return Err(usage(
                "slack and identity_tol must be non-negative and finite",
            ));
        }
        if let Some(s) = self.s.iter().find(|s| !(**s > 0.0 && **s <= 1.0)) {
            return Err(usage(format!("s-grid entries must lie in (0, 1], got {s}")));
        }
        if let Some(q) = self.q.iter().find(|q| !(**q >= 1.0 && q.is_finite())) {
            return Err(usage(format!("q-grid entries must be >= 1, got {q}")));
        }
        let pairs = self.interval_pairs()?;
        if !self.checks.is_empty() && pairs.is_empty() {
            return Err(usage("the interval grid is empty"));
        }

        let needs_function = self.checks.iter().any(|c| c.uses_function());
        let expr = match (&self.function, needs_function) {
            (Some(src), _) => Some(parse(src).map_err(|e| usage(format!("function: {e}")))?),
            (None, true) => return Err(usage("a function is required for the requested checks")),
            (None, false) => None,
        };
        let free: Vec<String> = expr
            .as_ref()
            .map(|e| {
                e.params()
                    .into_iter()
                    .filter(|p| !self.params.contains_key(p))
                    .collect()
            })
            .unwrap_or_default();
        if let Some(p) = free.iter().find(|p| *p != "s" && *p != "q") {
            return Err(usage(format!("unbound parameter `{p}`")));
        }
        let function_uses = |name: &str| free.iter().any(|p| p == name);

        let s_grid = if self.s.is_empty() {
            vec![DEFAULT_S]
        } else {
            self.s.clone()
        };
        let q_grid = if self.q.is_empty() {
            vec![DEFAULT_Q]
        } else {
            self.q.clone()
        };
        let mut points = Vec::new();
        for &check in &self.checks {
            let s_values: Vec<Option<f64>> = if check.uses_s() || function_uses("s") {
                s_grid.iter().map(|s| Some(*s)).collect()
            } else {
                vec![None]
            };
            let q_values: Vec<Option<f64>> = if check.uses_q() || function_uses("q") {
                q_grid.iter().map(|q| Some(*q)).collect()
            } else {
                vec![None]
            };
            for &(a, b) in &pairs {
                for &s in &s_values {
                    for &q in &q_values {
                        let point = Point { check, a, b, s, q };
                        if applies(&point) {
                            points.push(point);
                        }
                    }
                }
            }
        }

        let label = match &self.function {
            Some(src) if self.params.is_empty() => src.clone(),
            Some(src) => {
                let bound: Vec<String> = self
                    .params
                    .iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect();
                format!("{src}; {}", bound.join(", "))
            }
            None => "x^s/s".to_string(),
        };
        Ok(ResolvedSweep {
            label,
            source: self.function.clone(),
            expr,
            params: self.params.clone(),
            derivative: self.derivative.clone(),
            tolerance,
            slack,
            identity_tol,
            points,
        })
    }
}

/// Points outside a check's hypotheses are skipped rather than failed.
fn applies(p: &Point) -> bool {
    let q_above_one = p.q.is_some_and(|q| q > 1.0);
    let power_family = p.s.is_some_and(|s| s < 1.0) && p.a > 0.0 && p.b <= 1.0;
    match p.check {
        Check::Thm22 => q_above_one,
        Check::Prop31 => power_family,
        Check::Prop32 => power_family && q_above_one,
        _ => true,
    }
}

/// Either a single sweep object or `{"sweeps": [...]}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum SpecFile {
    Many { sweeps: Vec<SweepSpec> },
    One(Box<SweepSpec>),
}

pub fn parse_spec_text(text: &str) -> Result<Vec<SweepSpec>, CliError> {
    let file: SpecFile = serde_json::from_str(text).map_err(|e| usage(format!("spec: {e}")))?;
    Ok(match file {
        SpecFile::Many { sweeps } => sweeps,
        SpecFile::One(spec) => vec![*spec],
    })
}

pub fn load_spec(path: &Path) -> Result<Vec<SweepSpec>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read spec {}: {e}", path.display())))?;
    parse_spec_text(&text)
}
