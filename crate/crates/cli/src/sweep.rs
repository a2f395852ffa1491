//! Grid evaluation and per-record pass/fail.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use geoconvex_core::applications::{
    proposition31, proposition32, PowerFamilySpec, PropositionReport,
};
use geoconvex_core::bounds::{
    geometric_chain, hh_classical, lemma_identity_residuals, theorem21_bounds, theorem22_bounds,
    BoundReport,
};
use geoconvex_core::convexity::{check_s_geometric, SampleGrid};
use geoconvex_core::expr::Bindings;
use geoconvex_core::{Error, FunctionHandle, Interval};

use crate::spec::{Check, Point, ResolvedSweep};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointError {
    /// `numerical` or `invalid_input`
    pub kind: String,
    pub message: String,
}

impl From<Error> for PointError {
    fn from(e: Error) -> Self {
        PointError {
            kind: if e.is_numerical() {
                "numerical"
            } else {
                "invalid_input"
            }
            .into(),
            message: e.to_string(),
        }
    }
}

/// One row of a report. Errored points carry `NaN` numbers (`null` in
/// JSON) and an `error`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub check: Check,
    pub function: String,
    pub a: f64,
    pub b: f64,
    pub s: Option<f64>,
    pub q: Option<f64>,
    pub side: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub case: Option<String>,
    pub pass: bool,
    pub err_estimate: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<PointError>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckCounts {
    pub records: usize,
    pub passed: usize,
    pub violations: usize,
    pub errors: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub records: usize,
    pub passed: usize,
    pub violations: usize,
    pub errors: usize,
    pub worst_margin: Option<f64>,
    /// Index into `records` of the worst margin.
    pub worst_record: Option<usize>,
    pub max_gap: Option<f64>,
    pub by_check: BTreeMap<String, CheckCounts>,
}

impl Summary {
    pub fn from_records(records: &[Record]) -> Self {
        let mut summary = Summary {
            records: records.len(),
            ..Default::default()
        };
        for (i, r) in records.iter().enumerate() {
            let counts = summary
                .by_check
                .entry(r.check.name().to_string())
                .or_default();
            counts.records += 1;
            if r.error.is_some() {
                summary.errors += 1;
                counts.errors += 1;
            } else if r.pass {
                summary.passed += 1;
                counts.passed += 1;
            } else {
                summary.violations += 1;
                counts.violations += 1;
            }
            if r.margin.is_finite() && summary.worst_margin.is_none_or(|w| r.margin < w) {
                summary.worst_margin = Some(r.margin);
                summary.worst_record = Some(i);
            }
            if let Some(g) = r.gap {
                summary.max_gap = Some(summary.max_gap.map_or(g, |m: f64| m.max(g)));
            }
        }
        summary
    }

    /// 3 if any point failed numerically, else 1 on any violation, else 0.
    pub fn exit_code(&self) -> i32 {
        if self.errors > 0 {
            3
        } else if self.violations > 0 {
            1
        } else {
            0
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub records: Vec<Record>,
    pub summary: Summary,
}

struct Row {
    side: &'static str,
    lhs: f64,
    rhs: f64,
    margin: f64,
    err: f64,
    case: Option<&'static str>,
    gap: Option<f64>,
}

impl Row {
    fn inequality(side: &'static str, lhs: f64, rhs: f64, err: f64) -> Row {
        Row {
            side,
            lhs,
            rhs,
            margin: rhs - lhs,
            err,
            case: None,
            gap: None,
        }
    }
}

fn bound_rows(r: &BoundReport) -> Vec<Row> {
    let case = Some(r.region.label());
    vec![
        Row {
            case,
            ..Row::inequality(
                "trapezoid",
                r.trapezoid_lhs,
                r.trapezoid_rhs,
                r.quadrature_error,
            )
        },
        Row {
            case,
            ..Row::inequality(
                "midpoint",
                r.midpoint_lhs,
                r.midpoint_rhs,
                r.quadrature_error,
            )
        },
    ]
}

fn proposition_rows((t, m): (PropositionReport, PropositionReport)) -> Vec<Row> {
    [("trapezoid", t), ("midpoint", m)]
        .into_iter()
        .map(|(side, r)| Row {
            case: Some(r.region.label()),
            gap: Some(r.gap),
            ..Row::inequality(side, r.lhs, r.rhs_closed, 0.0)
        })
        .collect()
}

fn point_handle(sweep: &ResolvedSweep, p: &Point) -> Result<FunctionHandle, Error> {
    let (Some(src), Some(expr)) = (&sweep.source, &sweep.expr) else {
        return Err(Error::InvalidInput("no function given".into()));
    };
    let mut bindings: Bindings = sweep.params.clone();
    for (name, value) in [("s", p.s), ("q", p.q)] {
        if let Some(v) = value {
            bindings.entry(name.to_string()).or_insert(v);
        }
    }
    let handle = FunctionHandle::from_expr(src, expr, &bindings)?;
    match &sweep.derivative {
        Some(d) => handle.with_derivative(d),
        None => Ok(handle),
    }
}

fn rows_for(sweep: &ResolvedSweep, p: &Point) -> Result<Vec<Row>, Error> {
    let tol = &sweep.tolerance;
    let s = p.s.unwrap_or(1.0);
    let q = p.q.unwrap_or(1.0);
    if matches!(p.check, Check::Prop31 | Check::Prop32) {
        let spec = PowerFamilySpec::new(s, q, p.a, p.b)?;
        return Ok(proposition_rows(match p.check {
            Check::Prop31 => proposition31(&spec)?,
            _ => proposition32(&spec)?,
        }));
    }
    let f = point_handle(sweep, p)?;
    let iv = Interval::new(p.a, p.b)?;
    Ok(match p.check {
        Check::Lemma => {
            let r = lemma_identity_residuals(&f, &iv, tol)?;
            let identity = |side, lhs, rhs, residual: f64| Row {
                margin: sweep.identity_tol - residual,
                ..Row::inequality(side, lhs, rhs, r.quadrature_error)
            };
            vec![
                identity("midpoint", r.midpoint_lhs, r.midpoint_rhs, r.midpoint),
                identity("trapezoid", r.trapezoid_lhs, r.trapezoid_rhs, r.trapezoid),
            ]
        }
        Check::Thm21 => bound_rows(&theorem21_bounds(&f, &iv, s, q, tol)?),
        Check::Thm22 => bound_rows(&theorem22_bounds(&f, &iv, s, q, tol)?),
        Check::Chain => {
            let r = geometric_chain(&f, &iv, tol)?;
            let t = r.terms();
            const SIDES: [&str; 4] = ["t1<=t2", "t2<=t3", "t3<=t4", "t4<=t5"];
            r.link_margins()
                .iter()
                .enumerate()
                .map(|(i, (_, err))| Row::inequality(SIDES[i], t[i], t[i + 1], *err))
                .collect()
        }
        Check::Hh => {
            let r = hh_classical(&f, &iv, tol)?;
            vec![
                Row::inequality(
                    "midpoint<=average",
                    r.midpoint,
                    r.average,
                    r.quadrature_error,
                ),
                Row::inequality(
                    "average<=endpoints",
                    r.average,
                    r.endpoints,
                    r.quadrature_error,
                ),
            ]
        }
        Check::Convexity => {
            let grid = SampleGrid {
                slack: sweep.slack,
                ..SampleGrid::default()
            };
            let g = |x: f64| Ok(f.derivative(x)?.abs().powf(q));
            let v = check_s_geometric(g, &iv, s, &grid)?;
            vec![Row {
                side: "s-geometric |f'|^q",
                lhs: 0.0,
                rhs: v.worst_margin,
                margin: v.worst_margin,
                err: 0.0,
                case: None,
                gap: None,
            }]
        }
        Check::Prop31 | Check::Prop32 => unreachable!(),
    })
}

fn evaluate_point(sweep: &ResolvedSweep, p: &Point) -> Vec<Record> {
    let function = match p.check {
        Check::Prop31 | Check::Prop32 => "x^s/s".to_string(),
        _ => sweep.label.clone(),
    };
    let record = |side: String| Record {
        check: p.check,
        function: function.clone(),
        a: p.a,
        b: p.b,
        s: p.s,
        q: p.q,
        side,
        lhs: f64::NAN,
        rhs: f64::NAN,
        margin: f64::NAN,
        case: None,
        pass: false,
        err_estimate: f64::NAN,
        gap: None,
        error: None,
    };
    match rows_for(sweep, p) {
        Ok(rows) => rows
            .into_iter()
            .map(|row| Record {
                lhs: row.lhs,
                rhs: row.rhs,
                margin: row.margin,
                case: row.case.map(str::to_string),
                pass: row.margin >= -(sweep.slack + row.err),
                err_estimate: row.err,
                gap: row.gap,
                ..record(row.side.to_string())
            })
            .collect(),
        Err(e) => vec![Record {
            error: Some(e.into()),
            ..record("-".to_string())
        }],
    }
}

/// Evaluates every point of every sweep in parallel. Records come back in
/// grid order whatever the number of workers.
pub fn run_sweeps(sweeps: &[ResolvedSweep]) -> SweepResult {
    let jobs: Vec<(&ResolvedSweep, &Point)> = sweeps
        .iter()
        .flat_map(|sw| sw.points.iter().map(move |p| (sw, p)))
        .collect();
    let records: Vec<Record> = jobs
        .par_iter()
        .map(|(sw, p)| evaluate_point(sw, p))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let summary = Summary::from_records(&records);
    SweepResult { records, summary }
}

pub fn run_sweep(sweep: &ResolvedSweep) -> SweepResult {
    run_sweeps(std::slice::from_ref(sweep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::parse_spec_text;
    use geoconvex_core::Tolerance;

    fn resolved(json: &str) -> ResolvedSweep {
        parse_spec_text(json)
            .unwrap()
            .remove(0)
            .resolve(Tolerance::default())
            .unwrap()
    }

    #[test]
    fn single_lemma_point() {
        let r = run_sweep(&resolved(
            r#"{"function": "x^2", "a": [1], "b": [2], "checks": ["lemma"]}"#,
        ));
        assert_eq!(r.records.len(), 2);
        assert!(r.records.iter().all(|x| x.pass));
        assert!(r.records.iter().all(|x| (x.lhs - x.rhs).abs() <= 1e-8));
        assert_eq!(r.summary.exit_code(), 0);
    }

    #[test]
    fn power_family_sweep_passes() {
        let r = run_sweep(&resolved(
            r#"{"function": "x^s/s", "intervals": [[0.1, 0.3], [0.3, 1.0]],
                "s": [0.1, 0.5, 0.9], "q": [1, 2, 5], "checks": ["thm21", "thm22", "convexity"]}"#,
        ));
        assert_eq!(r.summary.errors, 0);
        assert_eq!(r.summary.violations, 0, "{:?}", r.summary);
        assert!(r
            .records
            .iter()
            .filter(|x| x.check != Check::Convexity)
            .all(|x| x.case.as_deref() == Some("both_above_one")));
    }

    #[test]
    fn empty_checks() {
        let r = run_sweep(&resolved(r#"{"function": "x"}"#));
        assert!(r.records.is_empty());
        assert_eq!(r.summary.exit_code(), 0);
    }

    #[test]
    fn concave_function_violates_classical_inequality() {
        let r = run_sweep(&resolved(
            r#"{"function": "sqrt(x)", "a": [1], "b": [4], "checks": ["hh"]}"#,
        ));
        assert_eq!(r.summary.violations, 2);
        assert_eq!(r.summary.exit_code(), 1);
    }

    #[test]
    fn point_errors_are_recorded() {
        // f' vanishes everywhere, so the bound is undefined
        let r = run_sweep(&resolved(
            r#"{"function": "3", "a": [1], "b": [2], "checks": ["thm21", "lemma"]}"#,
        ));
        assert_eq!(r.records.len(), 3);
        assert!(r.records[0].error.is_some());
        assert!(r.records[1].pass && r.records[2].pass);
        assert_eq!(r.summary.exit_code(), 3);
    }
}
