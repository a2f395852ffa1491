use super::{BinOp, Expr, Func};

// Smart constructors. They fold numeric constants and drop additive zeros
// and multiplicative ones; nothing else is simplified.

fn num(v: f64) -> Expr {
    Expr::Num(v)
}

fn is_num(e: &Expr, v: f64) -> bool {
    matches!(e, Expr::Num(n) if *n == v)
}

fn fold(v: f64, otherwise: impl FnOnce() -> Expr) -> Expr {
    if v.is_finite() {
        num(v)
    } else {
        otherwise()
    }
}

fn binary(op: BinOp, l: Expr, r: Expr) -> Expr {
    Expr::Binary(op, Box::new(l), Box::new(r))
}

fn add(l: Expr, r: Expr) -> Expr {
    match (&l, &r) {
        (Expr::Num(a), Expr::Num(b)) => num(a + b),
        _ if is_num(&l, 0.0) => r,
        _ if is_num(&r, 0.0) => l,
        _ => binary(BinOp::Add, l, r),
    }
}

fn sub(l: Expr, r: Expr) -> Expr {
    match (&l, &r) {
        (Expr::Num(a), Expr::Num(b)) => num(a - b),
        _ if is_num(&r, 0.0) => l,
        _ if is_num(&l, 0.0) => neg(r),
        _ => binary(BinOp::Sub, l, r),
    }
}

fn mul(l: Expr, r: Expr) -> Expr {
    match (&l, &r) {
        (Expr::Num(a), Expr::Num(b)) => num(a * b),
        _ if is_num(&l, 0.0) || is_num(&r, 0.0) => num(0.0),
        _ if is_num(&l, 1.0) => r,
        _ if is_num(&r, 1.0) => l,
        _ => binary(BinOp::Mul, l, r),
    }
}

fn div(l: Expr, r: Expr) -> Expr {
    match (&l, &r) {
        (Expr::Num(a), Expr::Num(b)) if *b != 0.0 => num(a / b),
        _ if is_num(&l, 0.0) => num(0.0),
        _ if is_num(&r, 1.0) => l,
        _ => binary(BinOp::Div, l, r),
    }
}

fn pow(base: Expr, exponent: Expr) -> Expr {
    match (&base, &exponent) {
        (Expr::Num(a), Expr::Num(b)) => {
            let (a, b) = (*a, *b);
            fold(a.powf(b), || binary(BinOp::Pow, num(a), num(b)))
        }
        _ if is_num(&exponent, 1.0) => base,
        _ if is_num(&exponent, 0.0) => num(1.0),
        _ => binary(BinOp::Pow, base, exponent),
    }
}

fn neg(e: Expr) -> Expr {
    match e {
        Expr::Num(v) => num(-v),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

fn call(f: Func, arg: Expr) -> Expr {
    Expr::Call(f, Box::new(arg))
}

pub(super) fn differentiate(e: &Expr) -> Expr {
    if !e.depends_on_x() {
        return num(0.0);
    }
    match e {
        Expr::Num(_) | Expr::Param(_) => num(0.0),
        Expr::X => num(1.0),
        Expr::Neg(inner) => neg(differentiate(inner)),
        Expr::Binary(op, u, v) => {
            let (u, v) = (u.as_ref(), v.as_ref());
            match op {
                BinOp::Add => add(differentiate(u), differentiate(v)),
                BinOp::Sub => sub(differentiate(u), differentiate(v)),
                BinOp::Mul => add(
                    mul(differentiate(u), v.clone()),
                    mul(u.clone(), differentiate(v)),
                ),
                BinOp::Div if !v.depends_on_x() => div(differentiate(u), v.clone()),
                BinOp::Div => div(
                    sub(
                        mul(differentiate(u), v.clone()),
                        mul(u.clone(), differentiate(v)),
                    ),
                    mul(v.clone(), v.clone()),
                ),
                BinOp::Pow => differentiate_pow(u, v),
            }
        }
        Expr::Call(func, arg) => {
            let inner = differentiate(arg);
            let arg = arg.as_ref().clone();
            let outer = match func {
                Func::Ln => return div(inner, arg),
                Func::Exp => call(Func::Exp, arg),
                Func::Sqrt => return div(inner, mul(num(2.0), call(Func::Sqrt, arg))),
                Func::Abs => call(Func::Sign, arg),
                // zero wherever it is defined; evaluating keeps the domain check
                Func::Sign => return mul(num(0.0), call(Func::Sign, arg)),
            };
            mul(outer, inner)
        }
    }
}

fn differentiate_pow(base: &Expr, exponent: &Expr) -> Expr {
    let base_varies = base.depends_on_x();
    let exponent_varies = exponent.depends_on_x();
    if !exponent_varies {
        // g * f^(g-1) * f'
        let reduced = match exponent {
            Expr::Num(g) => num(g - 1.0),
            other => sub(other.clone(), num(1.0)),
        };
        return mul(
            mul(exponent.clone(), pow(base.clone(), reduced)),
            differentiate(base),
        );
    }
    let power = pow(base.clone(), exponent.clone());
    if !base_varies {
        // f^g * ln f * g'
        return mul(
            mul(power, call(Func::Ln, base.clone())),
            differentiate(exponent),
        );
    }
    // f^g = exp(g ln f): f^g * (g' ln f + g f' / f)
    mul(
        power,
        add(
            mul(differentiate(exponent), call(Func::Ln, base.clone())),
            div(mul(exponent.clone(), differentiate(base)), base.clone()),
        ),
    )
}
