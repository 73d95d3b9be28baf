//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := unary (('*'|'/') unary)*
//! unary  := '-' unary | power
//! power  := base ('^' unary)?
//! base   := number | ident | call | '(' expr ')'
//! call   := ident '\''* '(' args ')' | 'D' '(' ident (',' int)+ ')' '(' args ')'
//!         | 'int' '(' expr ',' ident ',' '0' ',' expr ')'
//! ```

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::Zero;

use super::expr::Expr;
use super::kernel::{JetVar, Var};
use super::Q;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Q),
    Ident(String),
    Prime(usize),
    Sym(char),
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>> {
    let b = s.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    while i < b.len() {
        let c = b[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && i + 1 < b.len() && (b[i + 1] as char).is_ascii_digit()) {
            let start = i;
            while i < b.len() && (b[i] as char).is_ascii_digit() {
                i += 1;
            }
            let int_part = &s[start..i];
            let mut frac_part = "";
            if i < b.len() && b[i] == b'.' {
                i += 1;
                let fs = i;
                while i < b.len() && (b[i] as char).is_ascii_digit() {
                    i += 1;
                }
                frac_part = &s[fs..i];
            }
            let mut exp10: i64 = 0;
            if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
                let save = i;
                let mut j = i + 1;
                let mut neg = false;
                if j < b.len() && (b[j] == b'-' || b[j] == b'+') {
                    neg = b[j] == b'-';
                    j += 1;
                }
                let es = j;
                while j < b.len() && (b[j] as char).is_ascii_digit() {
                    j += 1;
                }
                if j > es {
                    exp10 = s[es..j].parse::<i64>().map_err(|_| Error::Parse { pos: save, msg: "bad exponent".into() })?;
                    if neg {
                        exp10 = -exp10;
                    }
                    i = j;
                }
            }
            let digits = format!("{int_part}{frac_part}");
            let digits = if digits.is_empty() { "0".to_string() } else { digits };
            let n: BigInt = digits.parse().map_err(|_| Error::Parse { pos: start, msg: "bad number".into() })?;
            let scale = exp10 - frac_part.len() as i64;
            let ten = BigInt::from(10);
            let q = if scale >= 0 {
                Q::from_integer(n * num_traits::pow(ten, scale as usize))
            } else {
                Q::new(n, num_traits::pow(ten, (-scale) as usize))
            };
            out.push((start, Tok::Num(q)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < b.len() && ((b[i] as char).is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(s[start..i].to_string())));
        } else if c == '\'' {
            let start = i;
            while i < b.len() && b[i] == b'\'' {
                i += 1;
            }
            out.push((start, Tok::Prime(i - start)));
        } else if "+-*/^(),".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(Error::Parse { pos: i, msg: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

/// Parser state; remembers formal-function arities across calls.
#[derive(Default)]
pub struct Parser {
    arities: HashMap<String, usize>,
}

struct Cursor<'a> {
    toks: &'a [(usize, Tok)],
    pos: usize,
    end: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }
    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.offset(), msg: msg.into() })
    }
    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }
    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected `{c}`"))
        }
    }
}

const BUILTINS: [&str; 7] = ["exp", "ln", "log", "sqrt", "atanh", "arctanh", "int"];

impl Parser {
    pub fn new() -> Self {
        Parser::default()
    }

    pub fn parse(&mut self, s: &str) -> Result<Expr> {
        let toks = lex(s)?;
        let mut c = Cursor { toks: &toks, pos: 0, end: s.len() };
        if c.peek().is_none() {
            return c.err("empty expression");
        }
        let e = self.expr(&mut c)?;
        if c.peek().is_some() {
            return c.err("unexpected trailing input");
        }
        Ok(e)
    }

    fn expr(&mut self, c: &mut Cursor) -> Result<Expr> {
        let mut e = self.term(c)?;
        loop {
            if c.eat('+') {
                e = e.add(&self.term(c)?);
            } else if c.eat('-') {
                e = e.sub(&self.term(c)?);
            } else {
                return Ok(e);
            }
        }
    }

    fn term(&mut self, c: &mut Cursor) -> Result<Expr> {
        let mut e = self.unary(c)?;
        loop {
            if c.eat('*') {
                e = e.mul(&self.unary(c)?);
            } else if c.eat('/') {
                let at = c.offset();
                let d = self.unary(c)?;
                e = e.checked_div(&d).ok_or(Error::Parse { pos: at, msg: "division by zero".into() })?;
            } else {
                return Ok(e);
            }
        }
    }

    fn unary(&mut self, c: &mut Cursor) -> Result<Expr> {
        if c.eat('-') {
            return Ok(self.unary(c)?.neg());
        }
        if c.eat('+') {
            return self.unary(c);
        }
        self.power(c)
    }

    fn power(&mut self, c: &mut Cursor) -> Result<Expr> {
        let base = self.base(c)?;
        if c.eat('^') {
            let at = c.offset();
            let ex = self.unary(c)?;
            if base.is_zero() {
                if let Some(r) = ex.as_rational() {
                    if r > Q::zero() {
                        return Ok(Expr::zero());
                    }
                }
                return Err(Error::Parse { pos: at, msg: "zero raised to a non-positive power".into() });
            }
            return Ok(base.pow(&ex));
        }
        Ok(base)
    }

    fn args(&mut self, c: &mut Cursor) -> Result<Vec<Expr>> {
        c.expect('(')?;
        let mut v = vec![self.expr(c)?];
        while c.eat(',') {
            v.push(self.expr(c)?);
        }
        c.expect(')')?;
        Ok(v)
    }

    fn check_arity(&mut self, name: &str, n: usize, c: &Cursor) -> Result<()> {
        match self.arities.get(name) {
            Some(&m) if m != n => c.err(format!("function `{name}` used with {n} arguments, previously {m}")),
            Some(_) => Ok(()),
            None => {
                self.arities.insert(name.to_string(), n);
                Ok(())
            }
        }
    }

    fn base(&mut self, c: &mut Cursor) -> Result<Expr> {
        let at = c.offset();
        match c.peek().cloned() {
            Some(Tok::Num(q)) => {
                c.pos += 1;
                Ok(Expr::rational(q))
            }
            Some(Tok::Sym('(')) => {
                c.pos += 1;
                let e = self.expr(c)?;
                c.expect(')')?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                c.pos += 1;
                let primes = match c.peek() {
                    Some(Tok::Prime(n)) => {
                        let n = *n;
                        c.pos += 1;
                        n
                    }
                    _ => 0,
                };
                let is_call = c.peek() == Some(&Tok::Sym('('));
                if !is_call {
                    if primes > 0 {
                        return c.err(format!("`{name}` with primes must be applied to arguments"));
                    }
                    if let Some(j) = JetVar::parse(&name) {
                        return Ok(Expr::jetvar(j));
                    }
                    return Ok(Expr::named(&name));
                }
                if primes == 0 && BUILTINS.contains(&name.as_str()) {
                    return self.builtin(&name, c, at);
                }
                if primes == 0 && name == "D" {
                    return self.d_call(c);
                }
                let args = self.args(c)?;
                self.check_arity(&name, args.len(), c)?;
                if primes > 0 && args.len() != 1 {
                    return Err(Error::Parse { pos: at, msg: "primes are only allowed on unary functions".into() });
                }
                let mut orders = vec![0; args.len()];
                if primes > 0 {
                    orders[0] = primes as u32;
                }
                Ok(Expr::func(&name, orders, args))
            }
            Some(_) => c.err("expected a number, identifier or `(`"),
            None => c.err("unexpected end of input"),
        }
    }

    fn builtin(&mut self, name: &str, c: &mut Cursor, at: usize) -> Result<Expr> {
        if name == "int" {
            c.expect('(')?;
            let body = self.expr(c)?;
            c.expect(',')?;
            let v = match c.peek().cloned() {
                Some(Tok::Ident(v)) => {
                    c.pos += 1;
                    v
                }
                _ => return c.err("expected integration variable"),
            };
            c.expect(',')?;
            let lower = self.expr(c)?;
            if !lower.is_zero() {
                return Err(Error::Parse { pos: at, msg: "formal integrals use lower bound 0".into() });
            }
            c.expect(',')?;
            let upper = self.expr(c)?;
            c.expect(')')?;
            return Ok(Expr::integral(&body, &Var::named(&v), &upper));
        }
        let args = self.args(c)?;
        if args.len() != 1 {
            return Err(Error::Parse { pos: at, msg: format!("`{name}` takes one argument") });
        }
        let a = &args[0];
        Ok(match name {
            "exp" => Expr::exp(a),
            "ln" | "log" => {
                if a.is_zero() {
                    return Err(Error::Parse { pos: at, msg: "ln(0)".into() });
                }
                Expr::ln(a)
            }
            "sqrt" => a.sqrt(),
            _ => Expr::atanh(a),
        })
    }

    /// D(g, k)(args) or D(alpha, i, j, ...)(args).
    fn d_call(&mut self, c: &mut Cursor) -> Result<Expr> {
        c.expect('(')?;
        let name = match c.peek().cloned() {
            Some(Tok::Ident(n)) => {
                c.pos += 1;
                n
            }
            _ => return c.err("expected function name in D(...)"),
        };
        let mut orders = Vec::new();
        while c.eat(',') {
            match c.peek().cloned() {
                Some(Tok::Num(q)) if q.is_integer() && q >= Q::zero() => {
                    c.pos += 1;
                    orders.push(q.to_integer().try_into().map_err(|_| Error::Parse { pos: c.offset(), msg: "order too large".into() })?);
                }
                _ => return c.err("expected a non-negative integer derivative order"),
            }
        }
        c.expect(')')?;
        if orders.is_empty() {
            return c.err("D(...) needs at least one order");
        }
        let args = self.args(c)?;
        self.check_arity(&name, args.len(), c)?;
        if orders.len() == 1 && args.len() == 1 {
            return Ok(Expr::func(&name, orders, args));
        }
        if orders.len() != args.len() {
            return c.err(format!("D({name}, ...) has {} orders for {} arguments", orders.len(), args.len()));
        }
        Ok(Expr::func(&name, orders, args))
    }
}

/// Parses an expression with a fresh arity table.
pub fn parse(s: &str) -> Result<Expr> {
    Parser::new().parse(s)
}
