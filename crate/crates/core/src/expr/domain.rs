use serde::{Deserialize, Serialize};

use super::parser::parse_relation;
use super::{Bindings, Expr};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Less,
    LessEq,
    Greater,
    GreaterEq,
}

/// A strict or non-strict inequality between two bound expressions.
#[derive(Clone, Debug, PartialEq)]
pub struct Inequality {
    pub lhs: Expr,
    pub relation: Relation,
    pub rhs: Expr,
    pub text: String,
}

impl Inequality {
    pub fn parse(text: &str, coords: &[String], params: &Bindings) -> Result<Self> {
        let (lhs, op, rhs) = parse_relation(text)?;
        let relation = match op {
            "<" => Relation::Less,
            "<=" => Relation::LessEq,
            ">" => Relation::Greater,
            _ => Relation::GreaterEq,
        };
        Ok(Self {
            lhs: lhs.substitute(params).bind(coords)?,
            relation,
            rhs: rhs.substitute(params).bind(coords)?,
            text: text.trim().to_string(),
        })
    }

    pub fn holds(&self, x: &[f64; 4]) -> bool {
        let (a, b) = (self.lhs.eval(x), self.rhs.eval(x));
        match self.relation {
            Relation::Less => a < b,
            Relation::LessEq => a <= b,
            Relation::Greater => a > b,
            Relation::GreaterEq => a >= b,
        }
    }
}

/// Conjunction of inequalities; the empty domain guard accepts every finite point.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Domain {
    pub guards: Vec<Inequality>,
}

impl Domain {
    pub fn parse<S: AsRef<str>>(texts: &[S], coords: &[String], params: &Bindings) -> Result<Self> {
        let guards = texts
            .iter()
            .map(|t| Inequality::parse(t.as_ref(), coords, params))
            .collect::<Result<_>>()?;
        Ok(Self { guards })
    }

    pub fn contains(&self, x: &[f64; 4]) -> bool {
        self.check(x).is_ok()
    }

    pub fn check(&self, x: &[f64; 4]) -> Result<()> {
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::OutOfDomain {
                point: *x,
                reason: "non-finite coordinate".into(),
            });
        }
        match self.guards.iter().find(|g| !g.holds(x)) {
            Some(g) => Err(Error::OutOfDomain {
                point: *x,
                reason: format!("violates `{}`", g.text),
            }),
            None => Ok(()),
        }
    }

    pub fn texts(&self) -> Vec<String> {
        self.guards.iter().map(|g| g.text.clone()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schwarzschild_style_guards() {
        let coords: Vec<String> = ["t", "r", "theta", "phi"].iter().map(|s| s.to_string()).collect();
        let mut params = Bindings::new();
        params.insert("M".into(), Expr::Const(0.5));
        let d = Domain::parse(&["r > 2*M", "theta > 0", "theta < pi"], &coords, &params).unwrap();
        assert!(d.contains(&[0.0, 1.5, 1.0, 0.0]));
        assert!(!d.contains(&[0.0, 1.0, 1.0, 0.0]));
        assert!(!d.contains(&[0.0, 1.5, 0.0, 0.0]));
        assert!(!d.contains(&[0.0, 1.5, std::f64::consts::PI, 0.0]));
        assert!(!d.contains(&[f64::NAN, 1.5, 1.0, 0.0]));
    }
}
