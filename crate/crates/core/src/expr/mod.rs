//! Field expressions: parsing, binding to chart coordinates, exact symbolic
//! differentiation and second-order jet evaluation.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { ("*" | "/") unary } ;
//! unary   = "-" unary | power ;
//! power   = atom [ "^" unary ] ;
//! atom    = number | ident | ident "(" expr { "," expr } ")" | "(" expr ")" ;
//! number  = digit { digit } [ "." { digit } ] [ ("e" | "E") [ "+" | "-" ] digit { digit } ] ;
//! ident   = letter { letter | digit | "_" } ;
//! ```
//!
//! `^` is right-associative. The identifier `pi` is the constant. Known
//! functions: exp, ln (alias log), sin, cos, tan, sinh, cosh, tanh, cot,
//! sqrt, atan2.

mod diff;
mod domain;
mod parser;

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::jet::Jet;

pub use domain::{Domain, Inequality, Relation};
pub use parser::{parse, ParseError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Ln,
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Cot,
    Sqrt,
    Atan2,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "ln" | "log" => Func::Ln,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "sinh" => Func::Sinh,
            "cosh" => Func::Cosh,
            "tanh" => Func::Tanh,
            "cot" => Func::Cot,
            "sqrt" => Func::Sqrt,
            "atan2" => Func::Atan2,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Cot => "cot",
            Func::Sqrt => "sqrt",
            Func::Atan2 => "atan2",
        }
    }

    pub fn arity(self) -> usize {
        if self == Func::Atan2 {
            2
        } else {
            1
        }
    }

    fn apply(self, a: &[f64]) -> f64 {
        let x = a[0];
        match self {
            Func::Exp => x.exp(),
            Func::Ln => x.ln(),
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Tanh => x.tanh(),
            Func::Cot => 1.0 / x.tan(),
            Func::Sqrt => x.sqrt(),
            Func::Atan2 => x.atan2(a[1]),
        }
    }

    fn apply_jet(self, a: &[Jet<f64>]) -> Jet<f64> {
        let x = &a[0];
        match self {
            Func::Exp => x.exp(),
            Func::Ln => x.ln(),
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Tanh => x.tanh(),
            Func::Cot => x.cot(),
            Func::Sqrt => x.sqrt(),
            Func::Atan2 => x.atan2(&a[1]),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    /// Chart coordinate by index.
    Var(usize),
    /// Unresolved identifier.
    Sym(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

impl Default for Expr {
    fn default() -> Self {
        Expr::Const(0.0)
    }
}

impl Expr {
    pub fn constant(v: f64) -> Expr {
        Expr::Const(v)
    }

    pub fn zero() -> Expr {
        Expr::Const(0.0)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(v) if *v == 0.0)
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(v) => Some(*v),
            _ => None,
        }
    }

    pub fn call(f: Func, arg: Expr) -> Expr {
        Expr::Call(f, vec![arg])
    }

    /// Parses and binds in one step.
    pub fn parse_bound(text: &str, coords: &[String], params: &Bindings) -> Result<Expr> {
        parse(text)?.substitute(params).bind(coords)
    }

    /// Replaces identifiers found in `map` by their expressions.
    pub fn substitute(&self, map: &Bindings) -> Expr {
        self.rebuild(&mut |e| match e {
            Expr::Sym(name) => map.get(name).cloned(),
            _ => None,
        })
    }

    /// Resolves remaining identifiers to coordinate indices.
    pub fn bind(&self, coords: &[String]) -> Result<Expr> {
        let mut missing = None;
        let out = self.rebuild(&mut |e| match e {
            Expr::Sym(name) => match coords.iter().position(|c| c == name) {
                Some(i) => Some(Expr::Var(i)),
                None => {
                    missing.get_or_insert_with(|| name.clone());
                    None
                }
            },
            _ => None,
        });
        match missing {
            Some(name) => Err(Error::UnknownSymbol(name)),
            None => Ok(out),
        }
    }

    fn rebuild(&self, f: &mut dyn FnMut(&Expr) -> Option<Expr>) -> Expr {
        if let Some(e) = f(self) {
            return e;
        }
        let mut b = |e: &Expr| Box::new(e.rebuild(f));
        match self {
            Expr::Const(_) | Expr::Var(_) | Expr::Sym(_) => self.clone(),
            Expr::Neg(a) => Expr::Neg(b(a)),
            Expr::Add(x, y) => Expr::Add(b(x), b(y)),
            Expr::Sub(x, y) => Expr::Sub(b(x), b(y)),
            Expr::Mul(x, y) => Expr::Mul(b(x), b(y)),
            Expr::Div(x, y) => Expr::Div(b(x), b(y)),
            Expr::Pow(x, y) => Expr::Pow(b(x), b(y)),
            Expr::Call(func, args) => Expr::Call(*func, args.iter().map(|a| *b(a)).collect()),
        }
    }

    /// Names of unresolved identifiers, in first-occurrence order.
    pub fn symbols(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.visit(&mut |e| {
            if let Expr::Sym(s) = e {
                if !out.contains(s) {
                    out.push(s.clone());
                }
            }
        });
        out
    }

    /// True when the expression reads coordinate `index`.
    pub fn depends_on(&self, index: usize) -> bool {
        let mut hit = false;
        self.visit(&mut |e| hit |= matches!(e, Expr::Var(i) if *i == index));
        hit
    }

    fn visit(&self, f: &mut dyn FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Const(_) | Expr::Var(_) | Expr::Sym(_) => {}
            Expr::Neg(a) => a.visit(f),
            Expr::Add(x, y) | Expr::Sub(x, y) | Expr::Mul(x, y) | Expr::Div(x, y) | Expr::Pow(x, y) => {
                x.visit(f);
                y.visit(f);
            }
            Expr::Call(_, args) => args.iter().for_each(|a| a.visit(f)),
        }
    }

    /// Plain evaluation. Unbound identifiers evaluate to NaN.
    pub fn eval(&self, x: &[f64; 4]) -> f64 {
        match self {
            Expr::Const(v) => *v,
            Expr::Var(i) => x[*i],
            Expr::Sym(_) => f64::NAN,
            Expr::Neg(a) => -a.eval(x),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Div(a, b) => a.eval(x) / b.eval(x),
            Expr::Pow(a, b) => {
                let base = a.eval(x);
                match b.as_const() {
                    Some(p) if p.fract() == 0.0 && p.abs() < 64.0 => base.powi(p as i32),
                    _ => base.powf(b.eval(x)),
                }
            }
            Expr::Call(f, args) => {
                let v: Vec<f64> = args.iter().map(|a| a.eval(x)).collect();
                f.apply(&v)
            }
        }
    }

    /// Value, gradient and Hessian with respect to the four coordinates.
    pub fn eval_jet(&self, x: &[f64; 4]) -> Jet<f64> {
        match self {
            Expr::Const(v) => Jet::constant(*v),
            Expr::Var(i) => Jet::variable(x[*i], *i),
            Expr::Sym(_) => Jet::constant(f64::NAN),
            Expr::Neg(a) => -&a.eval_jet(x),
            Expr::Add(a, b) => &a.eval_jet(x) + &b.eval_jet(x),
            Expr::Sub(a, b) => &a.eval_jet(x) - &b.eval_jet(x),
            Expr::Mul(a, b) => a.eval_jet(x).mul(&b.eval_jet(x)),
            Expr::Div(a, b) => a.eval_jet(x).div(&b.eval_jet(x)),
            Expr::Pow(a, b) => {
                let base = a.eval_jet(x);
                match b.as_const() {
                    Some(p) if p.fract() == 0.0 && p.abs() < 64.0 => base.powi(p as i32),
                    Some(p) => base.powf(p),
                    None => base.pow(&b.eval_jet(x)),
                }
            }
            Expr::Call(f, args) => {
                let v: Vec<Jet<f64>> = args.iter().map(|a| a.eval_jet(x)).collect();
                f.apply_jet(&v)
            }
        }
    }

    /// Exact partial derivative with respect to coordinate `index`.
    pub fn diff(&self, index: usize) -> Expr {
        diff::derivative(self, index)
    }

    /// Renders with coordinate names substituted for indices.
    pub fn display_with<'a>(&'a self, coords: &'a [String]) -> Display<'a> {
        Display { expr: self, coords }
    }
}

pub type Bindings = HashMap<String, Expr>;

/// Numeric parameters as constant bindings.
pub fn numeric_bindings<'a>(params: impl IntoIterator<Item = (&'a String, &'a f64)>) -> Bindings {
    params.into_iter().map(|(k, v)| (k.clone(), Expr::Const(*v))).collect()
}

pub struct Display<'a> {
    expr: &'a Expr,
    coords: &'a [String],
}

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Neg(..) => 3,
        Expr::Pow(..) => 4,
        Expr::Const(v) if *v < 0.0 => 3,
        _ => 5,
    }
}

impl Display<'_> {
    fn write(&self, e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |x: &Expr, min: u8, f: &mut fmt::Formatter<'_>| -> fmt::Result {
            if precedence(x) < min {
                write!(f, "(")?;
                self.write(x, f)?;
                write!(f, ")")
            } else {
                self.write(x, f)
            }
        };
        match e {
            Expr::Const(v) => {
                if *v == std::f64::consts::PI {
                    write!(f, "pi")
                } else {
                    write!(f, "{v}")
                }
            }
            Expr::Var(i) => match self.coords.get(*i) {
                Some(name) => write!(f, "{name}"),
                None => write!(f, "x{i}"),
            },
            Expr::Sym(s) => write!(f, "{s}"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                sub(a, 3, f)
            }
            Expr::Add(a, b) => {
                sub(a, 1, f)?;
                write!(f, " + ")?;
                sub(b, 2, f)
            }
            Expr::Sub(a, b) => {
                sub(a, 1, f)?;
                write!(f, " - ")?;
                sub(b, 2, f)
            }
            Expr::Mul(a, b) => {
                sub(a, 2, f)?;
                write!(f, "*")?;
                sub(b, 3, f)
            }
            Expr::Div(a, b) => {
                sub(a, 2, f)?;
                write!(f, "/")?;
                sub(b, 3, f)
            }
            Expr::Pow(a, b) => {
                sub(a, 5, f)?;
                write!(f, "^")?;
                sub(b, 4, f)
            }
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    self.write(a, f)?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(self.expr, f)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Display {
            expr: self,
            coords: &[],
        }
        .fmt(f)
    }
}

/// Step used by [`fd_crosscheck`] along coordinate `mu`.
pub fn fd_step(x: &[f64; 4], mu: usize) -> f64 {
    1e-3 * x[mu].abs().max(1.0)
}

/// Largest discrepancy between the exact first derivatives of `expr` and a
/// fourth-order central difference. Every stencil point must lie in `domain`.
pub fn fd_crosscheck(expr: &Expr, x: &[f64; 4], domain: &Domain) -> Result<f64> {
    domain.check(x)?;
    let mut worst: f64 = 0.0;
    for mu in 0..4 {
        let h = fd_step(x, mu);
        let at = |k: f64| -> Result<f64> {
            let mut y = *x;
            y[mu] += k * h;
            domain.check(&y)?;
            Ok(expr.eval(&y))
        };
        let fd = (at(-2.0)? - 8.0 * at(-1.0)? + 8.0 * at(1.0)? - at(2.0)?) / (12.0 * h);
        let exact = expr.diff(mu).eval(x);
        worst = worst.max((exact - fd).abs());
    }
    Ok(worst)
}
