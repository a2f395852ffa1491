//! Function mini-language: parsing, evaluation and symbolic differentiation.
//!
//! A source string such as `x^s/s` becomes an [`Expr`]; a
//! [`FunctionHandle`] binds its parameters and carries the derivative so
//! every bound evaluator gets `f` and `f'` from one piece of text.

mod deriv;
mod parser;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::{Error, Interval, Result};

pub use parser::parse;

/// Parameter name to value map. Ordered so that echoes are deterministic.
pub type Bindings = BTreeMap<String, f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Ln,
    Exp,
    Sqrt,
    Abs,
    /// Derivative of `abs`; undefined at zero.
    Sign,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "ln" => Func::Ln,
            "exp" => Func::Exp,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "sign" => Func::Sign,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Ln => "ln",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Sign => "sign",
        }
    }

    fn apply(self, v: f64) -> Result<f64> {
        match self {
            Func::Ln if v <= 0.0 => Err(Error::Domain(format!("ln of non-positive value {v}"))),
            Func::Ln => Ok(v.ln()),
            Func::Exp => Ok(v.exp()),
            Func::Sqrt if v < 0.0 => Err(Error::Domain(format!("sqrt of negative value {v}"))),
            Func::Sqrt => Ok(v.sqrt()),
            Func::Abs => Ok(v.abs()),
            Func::Sign if v == 0.0 => {
                Err(Error::Domain("derivative of abs is undefined at 0".into()))
            }
            Func::Sign => Ok(v.signum()),
        }
    }
}

/// Expression tree over the single variable `x`.
///
/// Arity is carried by the variants, so a tree is always well formed.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    X,
    Param(String),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    /// Evaluates at `x` in IEEE double precision.
    ///
    /// Any non-finite intermediate (ln of a non-positive value, division by
    /// zero, a negative base with a fractional exponent, overflow) is a
    /// [`Error::Domain`].
    pub fn evaluate(&self, x: f64, bindings: &Bindings) -> Result<f64> {
        let v = match self {
            Expr::Num(v) => *v,
            Expr::X => x,
            Expr::Param(name) => *bindings
                .get(name)
                .ok_or_else(|| Error::UnboundParameter(name.clone()))?,
            Expr::Neg(inner) => -inner.evaluate(x, bindings)?,
            Expr::Binary(op, lhs, rhs) => {
                let l = lhs.evaluate(x, bindings)?;
                let r = rhs.evaluate(x, bindings)?;
                match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div => {
                        if r == 0.0 {
                            return Err(Error::Domain("division by zero".into()));
                        }
                        l / r
                    }
                    BinOp::Pow => {
                        let p = l.powf(r);
                        if p.is_nan() {
                            return Err(Error::Domain(format!("{l}^{r} is not real")));
                        }
                        if l == 0.0 && r < 0.0 {
                            return Err(Error::Domain(format!("0^{r} is a division by zero")));
                        }
                        p
                    }
                }
            }
            Expr::Call(func, arg) => func.apply(arg.evaluate(x, bindings)?)?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain(format!("non-finite value at x = {x}")))
        }
    }

    /// Symbolic derivative with respect to `x`.
    pub fn differentiate(&self) -> Expr {
        deriv::differentiate(self)
    }

    /// Replaces every bound parameter by its value.
    pub fn bind(&self, bindings: &Bindings) -> Expr {
        match self {
            Expr::Param(name) => match bindings.get(name) {
                Some(v) => Expr::Num(*v),
                None => self.clone(),
            },
            Expr::Num(_) | Expr::X => self.clone(),
            Expr::Neg(inner) => Expr::Neg(Box::new(inner.bind(bindings))),
            Expr::Binary(op, l, r) => {
                Expr::Binary(*op, Box::new(l.bind(bindings)), Box::new(r.bind(bindings)))
            }
            Expr::Call(f, arg) => Expr::Call(*f, Box::new(arg.bind(bindings))),
        }
    }

    /// Names of all parameters in the tree.
    pub fn params(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_params(&mut out);
        out
    }

    fn collect_params(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Param(name) => {
                out.insert(name.clone());
            }
            Expr::Num(_) | Expr::X => {}
            Expr::Neg(inner) | Expr::Call(_, inner) => inner.collect_params(out),
            Expr::Binary(_, l, r) => {
                l.collect_params(out);
                r.collect_params(out);
            }
        }
    }

    pub fn depends_on_x(&self) -> bool {
        match self {
            Expr::X => true,
            Expr::Num(_) | Expr::Param(_) => false,
            Expr::Neg(inner) | Expr::Call(_, inner) => inner.depends_on_x(),
            Expr::Binary(_, l, r) => l.depends_on_x() || r.depends_on_x(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(op, _, _) => op.precedence(),
            Expr::Neg(_) => 3,
            Expr::Num(v) if *v < 0.0 => 3,
            _ => 5,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, parens: bool) -> fmt::Result {
        if parens {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

/// Canonical serializer: minimal parentheses, numbers in shortest
/// round-trip form. `parse(&e.to_string())` reproduces `e` for every tree
/// the parser can produce.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) if *v < 0.0 => write!(f, "-{:?}", -v),
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::X => f.write_str("x"),
            Expr::Param(name) => f.write_str(name),
            Expr::Neg(inner) => {
                f.write_str("-")?;
                inner.fmt_child(f, inner.precedence() < 3)
            }
            Expr::Binary(op, l, r) => {
                let p = op.precedence();
                let (left_parens, right_parens) = match op {
                    // base is a primary, exponent a unary
                    BinOp::Pow => (l.precedence() < 5, r.precedence() < 3),
                    _ => (l.precedence() < p, r.precedence() <= p),
                };
                l.fmt_child(f, left_parens)?;
                write!(f, " {} ", op.symbol())?;
                r.fmt_child(f, right_parens)
            }
            Expr::Call(func, arg) => write!(f, "{}({arg})", func.name()),
        }
    }
}

/// A positive function with its derivative, parameters already bound.
#[derive(Debug, Clone)]
pub struct FunctionHandle {
    source: String,
    params: Bindings,
    value: Expr,
    derivative: Expr,
    derivative_overridden: bool,
}

impl FunctionHandle {
    /// Parses `source` and binds `params`; the derivative is symbolic.
    pub fn parse(source: &str, params: &Bindings) -> Result<Self> {
        let expr = parse(source)?;
        Self::from_expr(source, &expr, params)
    }

    /// Builds a handle from an already parsed tree. Every parameter of the
    /// tree must be bound.
    pub fn from_expr(source: &str, expr: &Expr, params: &Bindings) -> Result<Self> {
        let used = expr.params();
        if let Some(missing) = used.iter().find(|name| !params.contains_key(*name)) {
            return Err(Error::UnboundParameter(missing.clone()));
        }
        let params: Bindings = params
            .iter()
            .filter(|(k, _)| used.contains(*k))
            .map(|(k, v)| (k.clone(), *v))
            .collect();
        let value = expr.bind(&params);
        let derivative = value.differentiate();
        Ok(FunctionHandle {
            source: source.to_string(),
            params,
            value,
            derivative,
            derivative_overridden: false,
        })
    }

    /// Replaces the symbolic derivative with a user-supplied one.
    pub fn with_derivative(mut self, source: &str) -> Result<Self> {
        let expr = parse(source)?;
        if let Some(missing) = expr
            .params()
            .into_iter()
            .find(|n| !self.params.contains_key(n))
        {
            return Err(Error::UnboundParameter(missing));
        }
        self.derivative = expr.bind(&self.params);
        self.derivative_overridden = true;
        Ok(self)
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        self.value.evaluate(x, &self.params)
    }

    pub fn derivative(&self, x: f64) -> Result<f64> {
        self.derivative.evaluate(x, &self.params)
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn params(&self) -> &Bindings {
        &self.params
    }

    pub fn value_expr(&self) -> &Expr {
        &self.value
    }

    pub fn derivative_expr(&self) -> &Expr {
        &self.derivative
    }

    pub fn derivative_overridden(&self) -> bool {
        self.derivative_overridden
    }

    /// Probes `probes` log-spaced points of a positive interval (endpoints
    /// included) and fails unless `f` is strictly positive at each.
    pub fn check_positive(&self, interval: &Interval, probes: usize) -> Result<()> {
        interval.require_positive()?;
        let n = probes.max(2);
        let log_ratio = interval.log_ratio();
        for i in 0..n {
            let x = if i + 1 == n {
                interval.b
            } else {
                interval.a * (log_ratio * i as f64 / (n - 1) as f64).exp()
            };
            let v = self.value(x)?;
            if v <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "f must be positive on [{}, {}], but f({x}) = {v}",
                    interval.a, interval.b
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bindings(pairs: &[(&str, f64)]) -> Bindings {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    fn eval(src: &str, x: f64, b: &[(&str, f64)]) -> Result<f64> {
        parse(src)?.evaluate(x, &bindings(b))
    }

    #[test]
    fn evaluate_examples() {
        assert!((eval("exp(ln(x))", 3.5, &[]).unwrap() - 3.5).abs() <= 4.0 * f64::EPSILON * 3.5);
        assert_eq!(eval("x^p", 7.0, &[("p", 0.0)]).unwrap(), 1.0);
        assert_eq!(eval("x^s / s", 0.25, &[("s", 0.5)]).unwrap(), 1.0);
        assert_eq!(eval("-x^2", 3.0, &[]).unwrap(), -9.0);
        assert_eq!(eval("2*sqrt(x)", 4.0, &[]).unwrap(), 4.0);
        assert_eq!(eval("abs(x - 3)", 1.0, &[]).unwrap(), 2.0);
    }

    #[test]
    fn evaluate_domain_errors() {
        assert!(matches!(eval("ln(x)", -1.0, &[]), Err(Error::Domain(_))));
        assert!(matches!(eval("ln(x)", 0.0, &[]), Err(Error::Domain(_))));
        assert!(matches!(eval("sqrt(x)", -1e-3, &[]), Err(Error::Domain(_))));
        assert!(matches!(eval("1/(x-1)", 1.0, &[]), Err(Error::Domain(_))));
        assert!(matches!(eval("x^0.5", -2.0, &[]), Err(Error::Domain(_))));
        assert!(matches!(eval("x^-1", 0.0, &[]), Err(Error::Domain(_))));
        assert!(matches!(eval("exp(x)", 1e3, &[]), Err(Error::Domain(_))));
        assert_eq!(
            eval("x^q", 2.0, &[("s", 1.0)]),
            Err(Error::UnboundParameter("q".into()))
        );
        // integer powers of negative bases are real
        assert_eq!(eval("x^3", -2.0, &[]).unwrap(), -8.0);
    }

    #[test]
    fn evaluate_is_bit_deterministic() {
        let e = parse("exp(x) * ln(x)^2 / sqrt(x + 1) - x^1.7").unwrap();
        let b = Bindings::new();
        for i in 1..50 {
            let x = 0.137 * i as f64;
            assert_eq!(
                e.evaluate(x, &b).unwrap().to_bits(),
                e.evaluate(x, &b).unwrap().to_bits()
            );
        }
    }

    #[test]
    fn print_round_trips_catalog() {
        for src in [
            "x",
            "x^2 * ln(x)",
            "x^s / s",
            "-x^2",
            "(-x)^2",
            "x^-2",
            "x^2^3",
            "(x^2)^3",
            "x - (1 - x)",
            "x / (2 / x)",
            "2*sqrt(x)",
            "exp(-x) + abs(x - 1)",
            "1.5e-7 * x + 1e300",
            "--x",
            "x^(s-1)*q",
        ] {
            let e = parse(src).unwrap();
            let printed = e.to_string();
            assert_eq!(parse(&printed).unwrap(), e, "{src} printed as {printed}");
        }
    }

    #[test]
    fn bind_and_params() {
        let e = parse("x^s / s + c*q").unwrap();
        let names: Vec<_> = e.params().into_iter().collect();
        assert_eq!(names, ["c", "q", "s"]);
        let bound = e.bind(&bindings(&[("s", 0.5), ("c", 1.0), ("q", 2.0)]));
        assert!(bound.params().is_empty());
        assert_eq!(bound.evaluate(0.25, &Bindings::new()).unwrap(), 1.0 + 2.0);
    }

    #[test]
    fn handle_requires_all_parameters() {
        assert_eq!(
            FunctionHandle::parse("x^s/s", &Bindings::new()).unwrap_err(),
            Error::UnboundParameter("s".into())
        );
        let h = FunctionHandle::parse("x^s/s", &bindings(&[("s", 0.5), ("unused", 3.0)])).unwrap();
        assert_eq!(h.params().len(), 1);
        assert_eq!(h.value(0.25).unwrap(), 1.0);
        assert!((h.derivative(1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn handle_derivative_override() {
        let h = FunctionHandle::parse("x^2", &Bindings::new())
            .unwrap()
            .with_derivative("3*x")
            .unwrap();
        assert!(h.derivative_overridden());
        assert_eq!(h.derivative(2.0).unwrap(), 6.0);
    }

    #[test]
    fn handle_positivity_probe() {
        let h = FunctionHandle::parse("x - 2", &Bindings::new()).unwrap();
        assert!(h
            .check_positive(&Interval::positive(3.0, 4.0).unwrap(), 16)
            .is_ok());
        assert!(h
            .check_positive(&Interval::positive(1.0, 4.0).unwrap(), 16)
            .is_err());
    }
}
