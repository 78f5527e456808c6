//! A tiny expression language for composition functions `xi(t)`.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?
//! atom  := number | 't' | '|' expr '|' | '(' expr ')'
//!        | abs(e) | sign(e) | min(e, e) | max(e, e) | pow(e, e)
//! ```

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Var,
    Const(f64),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Abs(Box<Node>),
    Sign(Box<Node>),
    Min(Box<Node>, Box<Node>),
    Max(Box<Node>, Box<Node>),
}

/// A parsed expression in the variable `t`; keeps its source text.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    source: String,
    root: Node,
}

impl Expr {
    pub fn parse(source: &str) -> Result<Self> {
        let mut p = Parser {
            src: source.as_bytes(),
            pos: 0,
        };
        let root = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(Expr {
            source: source.to_string(),
            root,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, t: f64) -> f64 {
        eval(&self.root, t)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

/// `x^y`, using repeated multiplication for integral exponents so that
/// `|t|^2` and `t * t` agree bit for bit.
pub fn real_pow(x: f64, y: f64) -> f64 {
    if y.fract() == 0.0 && y.abs() <= 64.0 {
        x.powi(y as i32)
    } else {
        x.powf(y)
    }
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn eval(node: &Node, t: f64) -> f64 {
    match node {
        Node::Var => t,
        Node::Const(c) => *c,
        Node::Neg(a) => -eval(a, t),
        Node::Add(a, b) => eval(a, t) + eval(b, t),
        Node::Sub(a, b) => eval(a, t) - eval(b, t),
        Node::Mul(a, b) => eval(a, t) * eval(b, t),
        Node::Div(a, b) => eval(a, t) / eval(b, t),
        Node::Pow(a, b) => real_pow(eval(a, t), eval(b, t)),
        Node::Abs(a) => eval(a, t).abs(),
        Node::Sign(a) => sign(eval(a, t)),
        Node::Min(a, b) => eval(a, t).min(eval(b, t)),
        Node::Max(a, b) => eval(a, t).max(eval(b, t)),
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Expression {
            column: self.pos + 1,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.eat(b'-') {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let exp = self.unary()?;
            return Ok(Node::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        match self.peek() {
            None => Err(self.error("unexpected end of expression")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(b'|') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b'|')?;
                Ok(Node::Abs(Box::new(e)))
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                match name {
                    "t" => Ok(Node::Var),
                    "abs" | "sign" => {
                        self.expect(b'(')?;
                        let a = self.expr()?;
                        self.expect(b')')?;
                        Ok(if name == "abs" {
                            Node::Abs(Box::new(a))
                        } else {
                            Node::Sign(Box::new(a))
                        })
                    }
                    "min" | "max" | "pow" => {
                        self.expect(b'(')?;
                        let a = Box::new(self.expr()?);
                        self.expect(b',')?;
                        let b = Box::new(self.expr()?);
                        self.expect(b')')?;
                        Ok(match name {
                            "min" => Node::Min(a, b),
                            "max" => Node::Max(a, b),
                            _ => Node::Pow(a, b),
                        })
                    }
                    _ => {
                        self.pos = start;
                        Err(self.error(&format!("unknown identifier '{name}'")))
                    }
                }
            }
            Some(c) => Err(self.error(&format!("unexpected character '{}'", c as char))),
        }
    }

    fn number(&mut self) -> Result<Node> {
        let start = self.pos;
        let bytes = self.src;
        while self.pos < bytes.len() && (bytes[self.pos].is_ascii_digit() || bytes[self.pos] == b'.') {
            self.pos += 1;
        }
        if self.pos < bytes.len() && (bytes[self.pos] == b'e' || bytes[self.pos] == b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < bytes.len() && (bytes[self.pos] == b'+' || bytes[self.pos] == b'-') {
                self.pos += 1;
            }
            if self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            } else {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&bytes[start..self.pos]).expect("ascii");
        text.parse::<f64>().map(Node::Const).map_err(|_| {
            self.pos = start;
            self.error(&format!("malformed number '{text}'"))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(src: &str, t: f64) -> f64 {
        Expr::parse(src).unwrap().eval(t)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("1 + 2 * 3", 0.0), 7.0);
        assert_eq!(ev("2 ^ 3 ^ 2", 0.0), 512.0);
        assert_eq!(ev("-t^2", 3.0), -9.0);
        assert_eq!(ev("(1 - t) / 2", 5.0), -2.0);
        assert_eq!(ev("1.5e1 - 5", 0.0), 10.0);
    }

    #[test]
    fn functions_and_bars() {
        assert_eq!(ev("t*|t|", -2.0), -4.0);
        assert_eq!(ev("sign(t) * abs(t)^3", -2.0), -8.0);
        assert_eq!(ev("min(|t|^2, 1.5)", 3.0), 1.5);
        assert_eq!(ev("max(t, 0)", -1.0), 0.0);
        assert_eq!(ev("pow(|t|, 0.5)", 4.0), 2.0);
        assert_eq!(ev("sign(0)", 0.0), 0.0);
    }

    #[test]
    fn integral_powers_are_exact() {
        let x = 1.1_f64;
        assert_eq!(ev("t^2", x), x * x);
        assert_eq!(real_pow(x, 3.0), x * x * x);
    }

    #[test]
    fn errors_carry_a_column() {
        let err = Expr::parse("t + foo").unwrap_err();
        assert_eq!(
            err,
            Error::Expression {
                column: 5,
                message: "unknown identifier 'foo'".into()
            }
        );
        assert!(Expr::parse("(t").is_err());
        assert!(Expr::parse("t t").is_err());
        assert!(Expr::parse("").is_err());
        assert!(Expr::parse("min(t)").is_err());
    }
}
