//! Command surface of the `geoconvex` binary.
//!
//! [`run_command`] parses arguments, runs one subcommand and returns the
//! process exit code: 0 when every check passed, 1 on an inequality
//! violation, 2 on a usage or parse error, 3 on a numerical failure.

pub mod report;
pub mod spec;
pub mod suite;
pub mod sweep;

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use geoconvex_core::bounds::{geometric_chain, theorem21_bounds, theorem22_bounds};
use geoconvex_core::convexity::{check_s_convex_second_sense, check_s_geometric, SampleGrid};
use geoconvex_core::expr::Bindings;
use geoconvex_core::means::{mean, MeanKind};
use geoconvex_core::{Error, FunctionHandle, Interval, Tolerance};

use report::{write_csv, write_json, Format, Meta, Report};
use spec::{Check, SweepSpec, ToleranceOverride};

pub const TOLERANCE_ENV: &str = "GEOCONVEX_TOL";

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Numerical(_) => "numerical",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Numerical(m) => m,
        }
    }

    /// Machine-readable form written on failure.
    pub fn record(&self) -> serde_json::Value {
        json!({ "error": { "kind": self.kind(), "message": self.message(), "exit_code": self.exit_code() } })
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Usage(e.to_string())
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "geoconvex",
    version,
    about = "Evaluate and verify Hermite-Hadamard type bounds"
)]
#[command(args_conflicts_with_subcommands = true, allow_negative_numbers = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Both bounds at a single point
    Bound(BoundArgs),
    /// Run a sweep from a spec file, inline flags or the built-in suite
    Verify(VerifyArgs),
    /// Evaluate a special mean
    Means(MeansArgs),
    /// The geometric Hermite-Hadamard chain t1 <= ... <= t5
    Chain(ChainArgs),
    /// Power-family mean inequalities over a grid
    Props(PropsArgs),
    /// Sample-based convexity classification
    Convexity(ConvexityArgs),
}

#[derive(Debug, Args)]
pub struct FunctionArgs {
    /// Expression in x, e.g. "x^s/s"
    #[arg(long = "f")]
    pub f: String,
    /// Parameter binding NAME=VALUE, repeatable
    #[arg(long = "param", value_parser = parse_binding)]
    pub params: Vec<(String, f64)>,
    /// Expression replacing the symbolic derivative
    #[arg(long)]
    pub derivative: Option<String>,
}

impl FunctionArgs {
    fn bindings(&self) -> Bindings {
        self.params.iter().cloned().collect()
    }

    fn handle(&self, extra: &[(&str, f64)]) -> Result<FunctionHandle, CliError> {
        let mut bindings = self.bindings();
        for (k, v) in extra {
            bindings.entry(k.to_string()).or_insert(*v);
        }
        let f = FunctionHandle::parse(&self.f, &bindings)?;
        Ok(match &self.derivative {
            Some(d) => f.with_derivative(d)?,
            None => f,
        })
    }
}

fn parse_binding(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let v: f64 = v
        .trim()
        .parse()
        .map_err(|_| format!("`{v}` is not a number"))?;
    Ok((k.trim().to_string(), v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TheoremArg {
    #[value(name = "21")]
    PowerMean,
    #[value(name = "22")]
    Holder,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    #[arg(long)]
    pub a: f64,
    #[arg(long)]
    pub b: f64,
    #[arg(long, default_value_t = 1.0)]
    pub s: f64,
    #[arg(long, default_value_t = 1.0)]
    pub q: f64,
    #[arg(long, value_enum, default_value = "21")]
    pub theorem: TheoremArg,
    /// Quadrature tolerance (absolute and relative)
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = spec::DEFAULT_SLACK)]
    pub slack: f64,
    /// Grid-test that |f'|^q is s-geometrically convex first and warn if not
    #[arg(long)]
    pub check_precondition: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// JSON sweep spec: one object or {"sweeps": [...]}
    #[arg(long, conflicts_with = "suite")]
    pub spec: Option<PathBuf>,
    /// Run the built-in verification suite
    #[arg(long)]
    pub suite: bool,
    #[arg(long = "f")]
    pub f: Option<String>,
    #[arg(long = "param", value_parser = parse_binding)]
    pub params: Vec<(String, f64)>,
    #[arg(long)]
    pub derivative: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub a: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub b: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub s: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub q: Vec<f64>,
    #[arg(long, value_enum, value_delimiter = ',')]
    pub checks: Vec<Check>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub slack: Option<f64>,
    /// Write the report here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

impl VerifyArgs {
    fn flag_spec(&self) -> SweepSpec {
        SweepSpec {
            function: self.f.clone(),
            params: self.params.iter().cloned().collect(),
            derivative: self.derivative.clone(),
            a: self.a.clone(),
            b: self.b.clone(),
            s: self.s.clone(),
            q: self.q.clone(),
            tolerance: self.tol.map(ToleranceOverride::uniform),
            checks: self.checks.clone(),
            slack: self.slack,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeanArg {
    #[value(name = "A")]
    Arithmetic,
    #[value(name = "G")]
    Geometric,
    #[value(name = "L")]
    Logarithmic,
    #[value(name = "Lp")]
    PLogarithmic,
}

#[derive(Debug, Args)]
pub struct MeansArgs {
    #[arg(long, value_enum)]
    pub kind: MeanArg,
    #[arg(long)]
    pub a: f64,
    #[arg(long)]
    pub b: f64,
    /// Order of the p-logarithmic mean
    #[arg(long)]
    pub p: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    #[arg(long)]
    pub a: f64,
    #[arg(long)]
    pub b: f64,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = spec::DEFAULT_SLACK)]
    pub slack: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PropArg {
    #[value(name = "31")]
    PowerMean,
    #[value(name = "32")]
    Holder,
}

#[derive(Debug, Args)]
pub struct PropsArgs {
    #[arg(long, value_enum)]
    pub prop: PropArg,
    /// Defaults to 0.1, 0.2, ..., 0.9
    #[arg(long, value_delimiter = ',')]
    pub s: Vec<f64>,
    /// Defaults to 1,2,5 for 31 and 1.5,2,4 for 32
    #[arg(long, value_delimiter = ',')]
    pub q: Vec<f64>,
    /// With --b, replaces the default six pairs from {0.1, 0.3, 0.6, 1}
    #[arg(long, value_delimiter = ',')]
    pub a: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub b: Vec<f64>,
    #[arg(long)]
    pub slack: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ConvexityArgs {
    #[command(flatten)]
    pub function: FunctionArgs,
    /// s values to test, default 1
    #[arg(long, value_delimiter = ',')]
    pub s: Vec<f64>,
    #[arg(long)]
    pub a: f64,
    #[arg(long)]
    pub b: f64,
    /// Grid points per axis
    #[arg(long, default_value_t = 17)]
    pub points: usize,
}

/// Default tolerance, after `GEOCONVEX_TOL`.
pub fn base_tolerance() -> Result<Tolerance, CliError> {
    match std::env::var(TOLERANCE_ENV) {
        Ok(v) => {
            let t: f64 = v
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("{TOLERANCE_ENV}: `{v}` is not a number")))?;
            Ok(Tolerance::uniform(t)?)
        }
        Err(_) => Ok(Tolerance::default()),
    }
}

fn tolerance_with(flag: Option<f64>) -> Result<Tolerance, CliError> {
    match flag {
        Some(t) => Ok(Tolerance::uniform(t)?),
        None => base_tolerance(),
    }
}

fn emit_json<T: Serialize>(value: &T, out: &mut dyn Write) -> Result<(), CliError> {
    let text =
        serde_json::to_string_pretty(value).map_err(|e| CliError::Numerical(e.to_string()))?;
    writeln!(out, "{text}").map_err(|e| CliError::Usage(format!("write failed: {e}")))
}

fn write_report(
    report: &Report,
    format: Format,
    path: Option<&PathBuf>,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let mut buf = Vec::new();
    match format {
        Format::Json => write_json(report, &mut buf).map_err(|e| CliError::Usage(e.to_string()))?,
        Format::Csv => {
            write_csv(&report.records, &mut buf).map_err(|e| CliError::Usage(e.to_string()))?
        }
    }
    match path {
        Some(p) => std::fs::write(p, &buf)
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", p.display()))),
        None => stdout
            .write_all(&buf)
            .map_err(|e| CliError::Usage(format!("write failed: {e}"))),
    }
}

fn run_specs(
    specs: &[SweepSpec],
    format: Format,
    out: Option<&PathBuf>,
    stdout: &mut dyn Write,
) -> Result<i32, CliError> {
    let start = Instant::now();
    let base = base_tolerance()?;
    let resolved = specs
        .iter()
        .map(|s| s.resolve(base))
        .collect::<Result<Vec<_>, _>>()?;
    let result = sweep::run_sweeps(&resolved);
    let code = result.summary.exit_code();
    let report = Report::new(result, Meta::now(start.elapsed()));
    write_report(&report, format, out, stdout)?;
    Ok(code)
}

fn cmd_bound(args: &BoundArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let f = args.function.handle(&[("s", args.s), ("q", args.q)])?;
    let iv = Interval::positive(args.a, args.b)?;
    let tol = tolerance_with(args.tol)?;
    let mut precondition = None;
    if args.check_precondition {
        let g = |x: f64| Ok(f.derivative(x)?.abs().powf(args.q));
        let verdict = check_s_geometric(g, &iv, args.s, &SampleGrid::default())?;
        if !verdict.holds {
            let warning = json!({ "warning": "|f'|^q failed the s-geometric convexity grid test; the bound may not apply", "verdict": verdict });
            let _ = writeln!(err, "{warning}");
        }
        precondition = Some(verdict);
    }
    let report = match args.theorem {
        TheoremArg::PowerMean => theorem21_bounds(&f, &iv, args.s, args.q, &tol)?,
        TheoremArg::Holder => theorem22_bounds(&f, &iv, args.s, args.q, &tol)?,
    };
    let pass = report.holds(args.slack);
    emit_json(
        &json!({ "function": args.function.f, "report": report, "pass": pass, "precondition": precondition }),
        out,
    )?;
    Ok(if pass { 0 } else { 1 })
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let flags = args.flag_spec();
    let specs = if args.suite {
        let mut specs = suite::full_suite();
        if args.tol.is_some() || args.slack.is_some() {
            let knobs = SweepSpec {
                tolerance: flags.tolerance,
                slack: flags.slack,
                ..Default::default()
            };
            specs.iter_mut().for_each(|s| s.override_with(&knobs));
        }
        specs
    } else if let Some(path) = &args.spec {
        let mut specs = spec::load_spec(path)?;
        specs.iter_mut().for_each(|s| s.override_with(&flags));
        specs
    } else {
        vec![flags]
    };
    run_specs(&specs, args.format, args.out.as_ref(), out)
}

fn cmd_means(args: &MeansArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let (kind, label) = match args.kind {
        MeanArg::Arithmetic => (MeanKind::Arithmetic, "A"),
        MeanArg::Geometric => (MeanKind::Geometric, "G"),
        MeanArg::Logarithmic => (MeanKind::Logarithmic, "L"),
        MeanArg::PLogarithmic => {
            let p = args
                .p
                .ok_or_else(|| CliError::Usage("--kind Lp needs --p".into()))?;
            (MeanKind::PLogarithmic(p), "Lp")
        }
    };
    let value = mean(kind, args.a, args.b)?;
    emit_json(
        &json!({ "kind": label, "a": args.a, "b": args.b, "p": args.p, "value": value }),
        out,
    )?;
    Ok(0)
}

fn cmd_chain(args: &ChainArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let f = args.function.handle(&[])?;
    let iv = Interval::positive(args.a, args.b)?;
    let report = geometric_chain(&f, &iv, &tolerance_with(args.tol)?)?;
    let ordered = report.is_ordered(args.slack);
    let links: Vec<_> = report
        .link_margins()
        .iter()
        .map(|(margin, error)| json!({ "margin": margin, "err_estimate": error }))
        .collect();
    emit_json(
        &json!({ "function": args.function.f, "chain": report, "links": links, "ordered": ordered }),
        out,
    )?;
    Ok(if ordered { 0 } else { 1 })
}

fn cmd_props(args: &PropsArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let (check, default_q) = match args.prop {
        PropArg::PowerMean => (Check::Prop31, suite::POWER_MEAN_Q),
        PropArg::Holder => (Check::Prop32, suite::HOLDER_Q),
    };
    let spec = SweepSpec {
        s: if args.s.is_empty() {
            suite::PROPOSITION_S.to_vec()
        } else {
            args.s.clone()
        },
        q: if args.q.is_empty() {
            default_q.to_vec()
        } else {
            args.q.clone()
        },
        intervals: if args.a.is_empty() && args.b.is_empty() {
            suite::UNIT_PAIRS.to_vec()
        } else {
            Vec::new()
        },
        a: args.a.clone(),
        b: args.b.clone(),
        checks: vec![check],
        slack: args.slack,
        ..Default::default()
    };
    run_specs(&[spec], args.format, args.out.as_ref(), out)
}

fn cmd_convexity(args: &ConvexityArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let f = args.function.handle(&[])?;
    let iv = Interval::positive(args.a, args.b)?;
    let grid = SampleGrid {
        points: args.points,
        ..SampleGrid::default()
    };
    let s_values = if args.s.is_empty() {
        vec![1.0]
    } else {
        args.s.clone()
    };
    let value = |x: f64| f.value(x);
    let mut rows = Vec::new();
    for &s in &s_values {
        let geometric = check_s_geometric(value, &iv, s, &grid)?;
        let second_sense = check_s_convex_second_sense(value, &iv, s, &grid)?;
        rows.push(
            json!({ "s": s, "s_geometric": geometric, "s_convex_second_sense": second_sense }),
        );
    }
    emit_json(
        &json!({ "function": args.function.f, "a": args.a, "b": args.b, "verdicts": rows }),
        out,
    )?;
    Ok(0)
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match &cli.command {
        Command::Bound(a) => cmd_bound(a, out, err),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Means(a) => cmd_means(a, out),
        Command::Chain(a) => cmd_chain(a, out),
        Command::Props(a) => cmd_props(a, out),
        Command::Convexity(a) => cmd_convexity(a, out),
    }
}

/// Runs the command line `argv` (program name first) and returns the exit
/// code. Reports go to `out`; on failure an error record is written there
/// too.
pub fn run_command<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let _ = write!(err, "{}", e.render());
            let failure = CliError::Usage(e.kind().to_string());
            let _ = writeln!(out, "{}", failure.record());
            return failure.exit_code();
        }
    };
    match dispatch(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(out, "{}", e.record());
            e.exit_code()
        }
    }
}
