use std::fmt;

use super::{Expr, Func};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset of the offending token.
    pub offset: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at byte {}: expected {}, found {}",
            self.offset,
            self.expected.join(" | "),
            self.found
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(&'static str),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Op(o) => format!("`{o}`"),
            Tok::End => "end of input".into(),
        }
    }
}

const OPS: [&str; 12] = ["<=", ">=", "+", "-", "*", "/", "^", "(", ")", ",", "<", ">"];

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i];
        if ch.is_ascii_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() || (ch == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text = &src[start..i];
            let v = text.parse::<f64>().map_err(|_| ParseError {
                offset: start,
                expected: vec!["number".into()],
                found: format!("`{text}`"),
            })?;
            out.push((start, Tok::Num(v)));
        } else if ch.is_ascii_alphabetic() || ch == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(src[start..i].to_string())));
        } else if let Some(op) = OPS.iter().find(|op| src[i..].starts_with(**op)) {
            out.push((i, Tok::Op(op)));
            i += op.len();
        } else {
            let c = src[i..].chars().next().unwrap_or('?');
            return Err(ParseError {
                offset: i,
                expected: vec!["operator, number or identifier".into()],
                found: format!("`{c}`"),
            });
        }
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

const OPERAND: [&str; 4] = ["number", "identifier", "`(`", "`-`"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        ParseError {
            offset: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
        }
    }

    fn eat(&mut self, op: &str) -> bool {
        if matches!(self.peek(), Tok::Op(o) if *o == op) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: &str) -> Result<(), ParseError> {
        if self.eat(op) {
            Ok(())
        } else {
            Err(self.error(&[&format!("`{op}`")]))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat("+") {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat("-") {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat("*") {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat("/") {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat("-") {
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat("^") {
            Ok(Expr::Pow(Box::new(base), Box::new(self.unary()?)))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Num(v) => {
                self.pos += 1;
                Ok(Expr::Const(v))
            }
            Tok::Ident(name) => {
                self.pos += 1;
                if self.eat("(") {
                    let func = Func::from_name(&name).ok_or_else(|| ParseError {
                        offset,
                        expected: vec!["known function".into()],
                        found: format!("identifier `{name}`"),
                    })?;
                    let mut args = vec![self.expr()?];
                    while self.eat(",") {
                        args.push(self.expr()?);
                    }
                    if args.len() != func.arity() {
                        return Err(ParseError {
                            offset,
                            expected: vec![format!("{} argument(s) to {}", func.arity(), func.name())],
                            found: format!("{} argument(s)", args.len()),
                        });
                    }
                    self.expect(")")?;
                    Ok(Expr::Call(func, args))
                } else if name == "pi" {
                    Ok(Expr::Const(std::f64::consts::PI))
                } else {
                    Ok(Expr::Sym(name))
                }
            }
            Tok::Op("(") => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(")")?;
                Ok(e)
            }
            _ => Err(self.error(&OPERAND)),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            Err(self.error(&["operator", "end of input"]))
        }
    }
}

/// Parses a field expression.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
    };
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

/// Parses `lhs <op> rhs` where `<op>` is one of `<`, `<=`, `>`, `>=`.
pub(super) fn parse_relation(src: &str) -> Result<(Expr, &'static str, Expr), ParseError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
    };
    let lhs = p.expr()?;
    let op = match p.peek() {
        Tok::Op(o @ ("<" | "<=" | ">" | ">=")) => *o,
        _ => return Err(p.error(&["`<`", "`<=`", "`>`", "`>=`"])),
    };
    p.pos += 1;
    let rhs = p.expr()?;
    p.finish()?;
    Ok((lhs, op, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_associativity() {
        let x = [0.0; 4];
        assert_eq!(parse("1 + 2*3").unwrap().eval(&x), 7.0);
        assert_eq!(parse("2^3^2").unwrap().eval(&x), 512.0);
        assert_eq!(parse("-2^2").unwrap().eval(&x), -4.0);
        assert_eq!(parse("2^-1").unwrap().eval(&x), 0.5);
        assert_eq!(parse("8/2/2").unwrap().eval(&x), 2.0);
        assert_eq!(parse("1.5e1 - .5").unwrap().eval(&x), 14.5);
        assert!((parse("cos(pi)").unwrap().eval(&x) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn reports_offset_of_dangling_operator() {
        let e = parse("1/+").unwrap_err();
        assert_eq!(e.offset, 2);
        assert!(e.expected.contains(&"number".to_string()));
    }

    #[test]
    fn other_errors() {
        assert_eq!(parse("sin(x").unwrap_err().offset, 5);
        assert_eq!(parse("foo(1)").unwrap_err().offset, 0);
        assert_eq!(parse("atan2(1)").unwrap_err().offset, 0);
        assert_eq!(parse("x y").unwrap_err().offset, 2);
        assert_eq!(parse("3 $ 4").unwrap_err().offset, 2);
        assert_eq!(parse("").unwrap_err().offset, 0);
    }

    #[test]
    fn relations() {
        let (l, op, r) = parse_relation("r > 2*M").unwrap();
        assert_eq!(op, ">");
        assert_eq!(l, Expr::Sym("r".into()));
        assert_eq!(r.symbols(), vec!["M".to_string()]);
        assert!(parse_relation("r + 1").is_err());
    }
}
