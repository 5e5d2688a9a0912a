//! Recursive-descent parser for the expression grammar and `y' = ...` equations.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::ratfun::RationalFunction;
use crate::scalar::Scalar;
use crate::symbol::{is_reserved, Symbol};

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// Reject symbols that are not registered yet.
    pub strict: bool,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Op(char),
    Prime,
    Eq,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.1.is_ascii_digit())) {
            let mut int = String::new();
            let mut frac = String::new();
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                int.push(chars[i].1);
                i += 1;
            }
            if i < chars.len() && chars[i].1 == '.' {
                i += 1;
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    frac.push(chars[i].1);
                    i += 1;
                }
            }
            let digits = format!("{int}{frac}");
            let n: BigInt = digits.parse().map_err(|_| Error::Parse { pos, msg: "bad number".into() })?;
            let d = num_traits::pow(BigInt::from(10), frac.len());
            out.push((Tok::Num(BigRational::new(n, d)), pos));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let mut s = String::new();
            while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                s.push(chars[i].1);
                i += 1;
            }
            out.push((Tok::Ident(s), pos));
            continue;
        }
        let t = match c {
            '+' | '-' | '*' | '/' | '^' | '(' | ')' | ',' => Tok::Op(c),
            '\'' | '′' => Tok::Prime,
            '=' => Tok::Eq,
            _ => return Err(Error::Parse { pos, msg: format!("unexpected character `{c}`") }),
        };
        out.push((t, pos));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    i: usize,
    end: usize,
    opts: &'a ParseOptions,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.0)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map_or(self.end, |t| t.1)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos(), msg: msg.into() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.i += 1;
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

    fn expr(&mut self) -> Result<Expr> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat('+') {
                terms.push(self.term()?);
            } else if self.eat('-') {
                terms.push(Expr::Neg(Box::new(self.term()?)));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Expr::Add(terms) })
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                let rhs = self.unary()?;
                acc = match acc {
                    Expr::Mul(mut xs) => {
                        xs.push(rhs);
                        Expr::Mul(xs)
                    }
                    other => Expr::Mul(vec![other, rhs]),
                };
            } else if self.eat('/') {
                acc = Expr::Div(Box::new(acc), Box::new(self.unary()?));
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            let ex = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(ex)));
        }
        Ok(base)
    }

    fn symbol_arg(&mut self) -> Result<Symbol> {
        match self.peek().cloned() {
            Some(Tok::Ident(name)) if !is_reserved(&name) => {
                self.i += 1;
                self.symbol(&name)
            }
            _ => self.err("expected a variable name"),
        }
    }

    fn symbol(&self, name: &str) -> Result<Symbol> {
        if self.opts.strict {
            Symbol::lookup(name).ok_or_else(|| Error::UnknownSymbol(name.into()))
        } else {
            Ok(Symbol::named(name))
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let Some(tok) = self.peek().cloned() else { return self.err("unexpected end of input") };
        match tok {
            Tok::Num(r) => {
                self.i += 1;
                Ok(Expr::Num(Scalar::from_rational(r)))
            }
            Tok::Op('(') => {
                self.i += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.i += 1;
                match name.as_str() {
                    "I" => Ok(Expr::Num(Scalar::new(BigRational::zero(), BigRational::one()))),
                    "exp" | "log" | "atan" | "sqrt" => {
                        self.expect('(')?;
                        let a = Box::new(self.expr()?);
                        self.expect(')')?;
                        Ok(match name.as_str() {
                            "exp" => Expr::Exp(a),
                            "log" => Expr::Log(a),
                            "atan" => Expr::Atan(a),
                            _ => Expr::Sqrt(a),
                        })
                    }
                    "Int" => {
                        self.expect('(')?;
                        let integrand = Box::new(self.expr()?);
                        self.expect(',')?;
                        let var = self.symbol_arg()?;
                        let at = if self.eat(',') { Some(Box::new(self.expr()?)) } else { None };
                        self.expect(')')?;
                        Ok(Expr::Int { integrand, var, at })
                    }
                    "diff" => {
                        self.expect('(')?;
                        let e = Box::new(self.expr()?);
                        self.expect(',')?;
                        let v = self.symbol_arg()?;
                        self.expect(')')?;
                        Ok(Expr::Diff(e, v))
                    }
                    _ => {
                        if self.peek() == Some(&Tok::Op('(')) {
                            self.i -= 1;
                            return self.err(format!("unknown function `{name}`"));
                        }
                        Ok(Expr::Sym(self.symbol(&name)?))
                    }
                }
            }
            _ => self.err("unexpected token"),
        }
    }
}

/// Parses an expression.
pub fn parse_expr_with(src: &str, opts: &ParseOptions) -> Result<Expr> {
    let toks = lex(src)?;
    let mut p = Parser { toks, i: 0, end: src.len(), opts };
    let e = p.expr()?;
    if p.i != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

pub fn parse_expr(src: &str) -> Result<Expr> {
    parse_expr_with(src, &ParseOptions::default())
}

/// Parses and normalizes an expression.
pub fn parse_value(src: &str) -> Result<RationalFunction> {
    parse_expr(src)?.normalize()
}

/// Parses `y' = <rhs>` (or a bare right-hand side) and returns the normalized right-hand side.
pub fn parse_ode(src: &str) -> Result<RationalFunction> {
    let toks = lex(src)?;
    let opts = ParseOptions::default();
    let eq = toks.iter().position(|t| t.0 == Tok::Eq);
    let Some(eq) = eq else { return parse_value(src) };
    let lhs: Vec<&Tok> = toks[..eq].iter().map(|t| &t.0).collect();
    let ok = matches!(lhs.as_slice(), [Tok::Ident(y), Tok::Prime] if y == "y");
    if !ok {
        return Err(Error::Parse { pos: 0, msg: "expected `y' = ...`".into() });
    }
    let mut p = Parser { toks: toks[eq + 1..].to_vec(), i: 0, end: src.len(), opts: &opts };
    let e = p.expr()?;
    if p.i != p.toks.len() {
        return p.err("trailing input");
    }
    e.normalize()
}

/// True when the text looks like an equation rather than a bare expression.
pub fn is_equation(src: &str) -> bool {
    src.contains('=')
}
