//! Recursive-descent parser for equations in the normal form
//!
//! ```text
//! equation    := "Dt^a" IDENT "=" expr
//! expr        := ["+"|"-"] term (("+"|"-") term)*
//! term        := factor ("*" factor)*
//! factor      := NUMBER | derivref | "(" expr ")" derivsuffix?
//! derivref    := IDENT derivsuffix?
//! derivsuffix := "_" ("x"|"y"|"z")+
//! ```
//!
//! A suffix on a parenthesized expression is expanded by the sum and
//! product rules. Terms of degree 0, 1 and ≥ 2 become the constant source,
//! linear terms and nonlinear monomials respectively.

use thiserror::Error;

use super::problem::{Equation, FieldRef, LinearTerm, NonlinearTerm};
use crate::spatial_expr::{MultiIndex, VAR_NAMES};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EquationError {
    #[error("syntax error at column {}: {message}", pos + 1)]
    Syntax { pos: usize, message: String },
    #[error("unknown component '{name}' at column {}", pos + 1)]
    UnknownComponent { name: String, pos: usize },
    #[error("order error at column {}: {message}", pos + 1)]
    Order { pos: usize, message: String },
}

/// Sum of products of fields, kept in first-appearance order.
#[derive(Debug, Clone, Default)]
struct Poly(Vec<(f64, Vec<FieldRef>)>);

impl Poly {
    fn constant(c: f64) -> Self {
        Poly(vec![(c, vec![])])
    }

    fn field(f: FieldRef) -> Self {
        Poly(vec![(1.0, vec![f])])
    }

    fn push(&mut self, c: f64, mut factors: Vec<FieldRef>) {
        factors.sort();
        match self.0.iter_mut().find(|(_, f)| *f == factors) {
            Some((k, _)) => *k += c,
            None => self.0.push((c, factors)),
        }
    }

    fn add(mut self, other: Poly, sign: f64) -> Self {
        for (c, f) in other.0 {
            self.push(sign * c, f);
        }
        self
    }

    fn mul(&self, other: &Poly) -> Self {
        let mut out = Poly::default();
        for (a, fa) in &self.0 {
            for (b, fb) in &other.0 {
                let mut f = fa.clone();
                f.extend_from_slice(fb);
                out.push(a * b, f);
            }
        }
        out
    }

    fn diff(&self, var: usize) -> Self {
        let mut out = Poly::default();
        for (c, factors) in &self.0 {
            for j in 0..factors.len() {
                let mut f = factors.clone();
                f[j].deriv = f[j].deriv.bumped(var);
                out.push(*c, f);
            }
        }
        out
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    names: &'a [String],
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic()
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric()
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, EquationError> {
        Err(EquationError::Syntax {
            pos: self.pos,
            message: message.into(),
        })
    }

    fn order<T>(&self, pos: usize, message: impl Into<String>) -> Result<T, EquationError> {
        Err(EquationError::Order {
            pos,
            message: message.into(),
        })
    }

    fn ident(&mut self) -> Option<(usize, &'a str)> {
        self.skip_ws();
        let start = self.pos;
        if !self.peek().is_some_and(is_ident_start) {
            return None;
        }
        while self.peek().is_some_and(is_ident_char) {
            self.pos += 1;
        }
        Some((start, &self.src[start..self.pos]))
    }

    fn component(&self, pos: usize, name: &str) -> Result<usize, EquationError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| EquationError::UnknownComponent {
                name: name.to_string(),
                pos,
            })
    }

    /// `_xxy` → multi-index; `_t` is rejected as an order error.
    fn suffix(&mut self) -> Result<Option<MultiIndex>, EquationError> {
        if self.peek() != Some('_') {
            return Ok(None);
        }
        self.pos += 1;
        let mut m = MultiIndex::NONE;
        let start = self.pos;
        while let Some(c) = self.peek() {
            if let Some(v) = VAR_NAMES.iter().position(|&n| n == c) {
                m = m.bumped(v);
            } else if c == 't' {
                return self.order(
                    self.pos,
                    "time derivatives may only appear as the Caputo term",
                );
            } else if is_ident_char(c) {
                return self.syntax(format!("'{c}' is not a spatial variable"));
            } else {
                break;
            }
            self.pos += 1;
        }
        if self.pos == start {
            return self.syntax("expected x, y or z after '_'");
        }
        Ok(Some(m))
    }

    fn number(&mut self) -> Result<f64, EquationError> {
        let start = self.pos;
        let b = self.src.as_bytes();
        let mut i = self.pos;
        while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.') {
            i += 1;
        }
        if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
            let mut j = i + 1;
            if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
                j += 1;
            }
            if j < b.len() && b[j].is_ascii_digit() {
                while j < b.len() && b[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        self.pos = i;
        self.src[start..i].parse().or_else(|_| {
            self.pos = start;
            self.syntax("malformed number")
        })
    }

    fn expr(&mut self) -> Result<Poly, EquationError> {
        let sign = if self.eat('-') {
            -1.0
        } else {
            self.eat('+');
            1.0
        };
        let mut acc = Poly::default().add(self.term()?, sign);
        loop {
            if self.eat('+') {
                acc = acc.add(self.term()?, 1.0);
            } else if self.eat('-') {
                acc = acc.add(self.term()?, -1.0);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Poly, EquationError> {
        let mut acc = self.factor()?;
        while self.eat('*') {
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly, EquationError> {
        self.skip_ws();
        match self.peek() {
            None => self.syntax("unexpected end of equation"),
            Some(c) if c.is_ascii_digit() || c == '.' => Ok(Poly::constant(self.number()?)),
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return self.syntax("expected ')'");
                }
                let Some(m) = self.suffix()? else {
                    return Ok(inner);
                };
                let mut p = inner;
                for (var, &o) in m.0.iter().enumerate() {
                    for _ in 0..o {
                        p = p.diff(var);
                    }
                }
                Ok(p)
            }
            Some(c) if is_ident_start(c) => {
                let (pos, name) = self.ident().expect("checked start");
                if name == "Dt" {
                    return self.order(pos, "the Caputo derivative may only appear on the left");
                }
                let comp = self.component(pos, name)?;
                let deriv = self.suffix()?.unwrap_or(MultiIndex::NONE);
                Ok(Poly::field(FieldRef::new(comp, deriv)))
            }
            Some(c) => self.syntax(format!("unexpected '{c}'")),
        }
    }

    fn lhs(&mut self) -> Result<usize, EquationError> {
        self.skip_ws();
        let start = self.pos;
        if !self.src[self.pos..].starts_with("Dt") {
            return self.order(
                start,
                "equation must start with the Caputo term 'Dt^a <component>'",
            );
        }
        self.pos += 2;
        if !self.eat('^') {
            return self.syntax("expected '^a' after 'Dt'");
        }
        self.skip_ws();
        if self.peek() != Some('a') || self.src[self.pos + 1..].starts_with(is_ident_char) {
            return self.order(self.pos, "the Caputo order must be written 'a'");
        }
        self.pos += 1;
        let Some((pos, name)) = self.ident() else {
            return self.syntax("expected a component name");
        };
        let comp = self.component(pos, name)?;
        if self.peek() == Some('_') {
            return self.order(self.pos, "the Caputo term must act on a plain component");
        }
        if !self.eat('=') {
            return self.syntax("expected '='");
        }
        Ok(comp)
    }
}

/// Parses one equation against the declared component names.
pub fn parse_equation(text: &str, names: &[String]) -> Result<Equation, EquationError> {
    let mut p = Parser {
        src: text,
        pos: 0,
        names,
    };
    let target = p.lhs()?;
    let rhs = p.expr()?;
    p.skip_ws();
    if let Some(c) = p.peek() {
        return p.syntax(format!("unexpected '{c}'"));
    }
    let mut eq = Equation {
        target,
        linear: vec![],
        nonlinear: vec![],
        constant: 0.0,
    };
    for (c, factors) in rhs.0 {
        if c == 0.0 {
            continue;
        }
        match factors.as_slice() {
            [] => eq.constant += c,
            [f] => eq.linear.push(LinearTerm {
                coeff: c,
                field: *f,
            }),
            _ => eq.nonlinear.push(NonlinearTerm { coeff: c, factors }),
        }
    }
    Ok(eq)
}
