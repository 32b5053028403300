use super::{Expr, Func};

fn c(v: f64) -> Expr {
    Expr::Const(v)
}

fn add(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => c(x + y),
        (Some(x), _) if x == 0.0 => b,
        (_, Some(y)) if y == 0.0 => a,
        _ => Expr::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => c(x - y),
        (_, Some(y)) if y == 0.0 => a,
        (Some(x), _) if x == 0.0 => neg(b),
        _ => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Const(x) => c(-x),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), Some(y)) => c(x * y),
        (Some(x), _) | (_, Some(x)) if x == 0.0 => c(0.0),
        (Some(x), _) if x == 1.0 => b,
        (_, Some(y)) if y == 1.0 => a,
        (Some(x), _) if x == -1.0 => neg(b),
        (_, Some(y)) if y == -1.0 => neg(a),
        _ => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    match (a.as_const(), b.as_const()) {
        (Some(x), _) if x == 0.0 => c(0.0),
        (_, Some(y)) if y == 1.0 => a,
        _ => Expr::Div(Box::new(a), Box::new(b)),
    }
}

fn pow(a: Expr, b: Expr) -> Expr {
    match b.as_const() {
        Some(y) if y == 1.0 => a,
        Some(y) if y == 0.0 => c(1.0),
        _ => Expr::Pow(Box::new(a), Box::new(b)),
    }
}

fn f(func: Func, a: Expr) -> Expr {
    Expr::Call(func, vec![a])
}

/// Exact partial derivative with respect to coordinate `index`.
pub(super) fn derivative(e: &Expr, index: usize) -> Expr {
    let d = |x: &Expr| derivative(x, index);
    match e {
        Expr::Const(_) | Expr::Sym(_) => c(0.0),
        Expr::Var(i) => c(if *i == index { 1.0 } else { 0.0 }),
        Expr::Neg(a) => neg(d(a)),
        Expr::Add(a, b) => add(d(a), d(b)),
        Expr::Sub(a, b) => sub(d(a), d(b)),
        Expr::Mul(a, b) => add(mul(d(a), (**b).clone()), mul((**a).clone(), d(b))),
        Expr::Div(a, b) => div(
            sub(mul(d(a), (**b).clone()), mul((**a).clone(), d(b))),
            pow((**b).clone(), c(2.0)),
        ),
        Expr::Pow(a, b) => {
            let (a, b) = (&**a, &**b);
            let (da, db) = (d(a), d(b));
            if db.is_zero() {
                // b a^(b-1) a'
                mul(mul(b.clone(), pow(a.clone(), sub(b.clone(), c(1.0)))), da)
            } else {
                // a^b (b' ln a + b a'/a)
                mul(
                    e.clone(),
                    add(mul(db, f(Func::Ln, a.clone())), div(mul(b.clone(), da), a.clone())),
                )
            }
        }
        Expr::Call(func, args) => {
            let a = &args[0];
            let da = d(a);
            if *func == Func::Atan2 {
                // atan2(y, x): (x y' - y x') / (x^2 + y^2)
                let (y, x) = (a, &args[1]);
                let dx = d(x);
                if da.is_zero() && dx.is_zero() {
                    return c(0.0);
                }
                let r2 = add(pow(x.clone(), c(2.0)), pow(y.clone(), c(2.0)));
                return div(sub(mul(x.clone(), da), mul(y.clone(), dx)), r2);
            }
            if da.is_zero() {
                return c(0.0);
            }
            let outer = match func {
                Func::Exp => e.clone(),
                Func::Ln => div(c(1.0), a.clone()),
                Func::Sin => f(Func::Cos, a.clone()),
                Func::Cos => neg(f(Func::Sin, a.clone())),
                Func::Tan => add(c(1.0), pow(e.clone(), c(2.0))),
                Func::Sinh => f(Func::Cosh, a.clone()),
                Func::Cosh => f(Func::Sinh, a.clone()),
                Func::Tanh => sub(c(1.0), pow(e.clone(), c(2.0))),
                Func::Cot => neg(add(c(1.0), pow(e.clone(), c(2.0)))),
                Func::Sqrt => div(c(0.5), e.clone()),
                Func::Atan2 => unreachable!(),
            };
            mul(outer, da)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;

    #[test]
    fn constants_fold_away() {
        let e = parse("3*x + 2").unwrap().bind(&["x".into()]).unwrap();
        assert_eq!(e.diff(0), super::c(3.0));
        assert!(e.diff(1).is_zero());
    }

    #[test]
    fn variable_exponent() {
        let e = parse("x^x").unwrap().bind(&["x".into()]).unwrap();
        let x = [1.7, 0.0, 0.0, 0.0];
        let exact = 1.7f64.powf(1.7) * (1.7f64.ln() + 1.0);
        assert!((e.diff(0).eval(&x) - exact).abs() < 1e-13);
    }
}
