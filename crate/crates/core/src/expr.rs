//! A small arithmetic expression language for profiles and coefficients.
//!
//! Grammar (lowest to highest precedence):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Variables are `x` (alias `r`), `t` and `u`; constants are `pi` and `e`.
//! Functions: `sin`, `cos`, `exp`, `sqrt`, `abs` and the two-argument
//! `max`, `min`.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Abs,
    Max,
    Min,
}

impl Func {
    fn lookup(name: &str) -> Option<(Func, usize)> {
        Some(match name {
            "sin" => (Func::Sin, 1),
            "cos" => (Func::Cos, 1),
            "exp" => (Func::Exp, 1),
            "sqrt" => (Func::Sqrt, 1),
            "abs" => (Func::Abs, 1),
            "max" => (Func::Max, 2),
            "min" => (Func::Min, 2),
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    X,
    T,
    U,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

impl Node {
    fn eval(&self, x: f64, t: f64, u: f64) -> f64 {
        match self {
            Node::Num(v) => *v,
            Node::X => x,
            Node::T => t,
            Node::U => u,
            Node::Neg(a) => -a.eval(x, t, u),
            Node::Add(a, b) => a.eval(x, t, u) + b.eval(x, t, u),
            Node::Sub(a, b) => a.eval(x, t, u) - b.eval(x, t, u),
            Node::Mul(a, b) => a.eval(x, t, u) * b.eval(x, t, u),
            Node::Div(a, b) => a.eval(x, t, u) / b.eval(x, t, u),
            Node::Pow(a, b) => {
                let base = a.eval(x, t, u);
                match **b {
                    Node::Num(p) if p == p.trunc() && p.abs() <= 16.0 => base.powi(p as i32),
                    _ => base.powf(b.eval(x, t, u)),
                }
            }
            Node::Call(f, args) => {
                let a0 = args[0].eval(x, t, u);
                match f {
                    Func::Sin => a0.sin(),
                    Func::Cos => a0.cos(),
                    Func::Exp => a0.exp(),
                    Func::Sqrt => a0.sqrt(),
                    Func::Abs => a0.abs(),
                    Func::Max => a0.max(args[1].eval(x, t, u)),
                    Func::Min => a0.min(args[1].eval(x, t, u)),
                }
            }
        }
    }

    fn uses(&self, var: &Node) -> bool {
        if self == var {
            return true;
        }
        match self {
            Node::Neg(a) => a.uses(var),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) | Node::Pow(a, b) => {
                a.uses(var) || b.uses(var)
            }
            Node::Call(_, args) => args.iter().any(|a| a.uses(var)),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // exponent part: 1e-3, 2.5E+4
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text
                .parse::<f64>()
                .map_err(|_| LabError::Parse(format!("bad number '{text}' in '{src}'")))?;
            toks.push(Tok::Num(v));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            toks.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^(),".contains(c) {
            toks.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(LabError::Parse(format!("unexpected character '{c}' in '{src}'")));
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err<T>(&self, what: &str) -> Result<T> {
        Err(LabError::Parse(format!("{what} at token {} in '{}'", self.pos, self.src)))
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.eat('-') {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.eat('^') {
            let exp = self.unary()?;
            return Ok(Node::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Node::Num(v))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                Ok(inner)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "x" | "r" => return Ok(Node::X),
                    "t" => return Ok(Node::T),
                    "u" => return Ok(Node::U),
                    "pi" => return Ok(Node::Num(std::f64::consts::PI)),
                    "e" => return Ok(Node::Num(std::f64::consts::E)),
                    _ => {}
                }
                let Some((func, arity)) = Func::lookup(&name) else {
                    return self.err(&format!("unknown identifier '{name}'"));
                };
                if !self.eat('(') {
                    return self.err(&format!("expected '(' after {name}"));
                }
                let mut args = vec![self.expr()?];
                while self.eat(',') {
                    args.push(self.expr()?);
                }
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                if args.len() != arity {
                    return self.err(&format!("{name} takes {arity} argument(s), got {}", args.len()));
                }
                Ok(Node::Call(func, args))
            }
            _ => self.err("unexpected end of expression"),
        }
    }
}

/// A parsed expression that remembers its source text. Equality and
/// serialization go through the source so configs round-trip verbatim.
#[derive(Clone)]
pub struct Expr {
    source: String,
    root: Node,
}

impl Expr {
    pub fn parse(source: &str) -> Result<Expr> {
        let toks = tokenize(source)?;
        if toks.is_empty() {
            return Err(LabError::Parse("empty expression".into()));
        }
        let mut p = Parser { toks, pos: 0, src: source };
        let root = p.expr()?;
        if p.pos != p.toks.len() {
            return p.err("trailing input");
        }
        Ok(Expr { source: source.to_string(), root })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    #[inline]
    pub fn eval(&self, x: f64, t: f64, u: f64) -> f64 {
        self.root.eval(x, t, u)
    }

    pub fn uses_x(&self) -> bool {
        self.root.uses(&Node::X)
    }

    pub fn uses_t(&self) -> bool {
        self.root.uses(&Node::T)
    }

    pub fn uses_u(&self) -> bool {
        self.root.uses(&Node::U)
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({:?})", self.source)
    }
}

impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.source)
    }
}

impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Expr::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ev(src: &str, x: f64) -> f64 {
        Expr::parse(src).unwrap().eval(x, 0.0, 0.0)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("1 + 2 * 3", 0.0), 7.0);
        assert_eq!(ev("(1 + 2) * 3", 0.0), 9.0);
        assert_eq!(ev("2 ^ 3 ^ 2", 0.0), 512.0);
        assert_eq!(ev("-2 ^ 2", 0.0), -4.0);
        assert_eq!(ev("8 / 4 / 2", 0.0), 1.0);
        assert_eq!(ev("1 - 2 - 3", 0.0), -4.0);
    }

    #[test]
    fn functions_and_variables() {
        assert!((ev("sin(pi*x)", 0.5) - 1.0).abs() < 1e-15);
        assert!((ev("exp(-x)*cos(2*pi*x)", 1.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(ev("max(x, 0.25)", 0.1), 0.25);
        assert_eq!(ev("min(x, 0.25)", 0.1), 0.1);
        let e = Expr::parse("u*(1-u)*(u-0.3) + t + r").unwrap();
        assert!(e.uses_u() && e.uses_t() && e.uses_x());
        assert!((e.eval(0.0, 0.0, 0.5) - 0.5 * 0.5 * 0.2).abs() < 1e-15);
        assert!((ev("1.5e-1 + 2E1", 0.0) - 20.15).abs() < 1e-12);
        assert!((ev("pi", 0.0) - PI).abs() < 1e-15);
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in ["", "1 +", "sin(", "foo(x)", "x $ 2", "max(1)", "(1", "1 2"] {
            assert!(Expr::parse(bad).is_err(), "{bad} should not parse");
        }
    }

    #[test]
    fn serde_keeps_source() {
        let e = Expr::parse("sin(pi*x) + 0.5").unwrap();
        let js = serde_json::to_string(&e).unwrap();
        assert_eq!(js, "\"sin(pi*x) + 0.5\"");
        let back: Expr = serde_json::from_str(&js).unwrap();
        assert_eq!(back, e);
    }
}
