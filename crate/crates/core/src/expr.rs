//! Expression trees and their normalization into tower rational functions.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::ratfun::RationalFunction as RF;
use crate::scalar::Scalar;
use crate::symbol::Symbol;
use crate::tower;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Scalar),
    Sym(Symbol),
    /// An already normalized value.
    Value(RF),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Neg(Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Exp(Box<Expr>),
    Log(Box<Expr>),
    Atan(Box<Expr>),
    Sqrt(Box<Expr>),
    /// Antiderivative in `var`, evaluated at `at` (defaults to `var`).
    Int { integrand: Box<Expr>, var: Symbol, at: Option<Box<Expr>> },
    Diff(Box<Expr>, Symbol),
}

impl Expr {
    pub fn num(n: i64) -> Expr {
        Expr::Num(Scalar::from_int(n))
    }

    /// Normalizes to a canonical rational function over the tower.
    pub fn normalize(&self) -> Result<RF> {
        Ok(match self {
            Expr::Num(c) => RF::constant(c.clone()),
            Expr::Sym(s) => RF::var(*s),
            Expr::Value(v) => v.clone(),
            Expr::Add(xs) => {
                let mut acc = RF::zero();
                for x in xs {
                    acc = &acc + &x.normalize()?;
                }
                acc
            }
            Expr::Mul(xs) => {
                let mut acc = RF::one();
                for x in xs {
                    acc = &acc * &x.normalize()?;
                }
                acc
            }
            Expr::Neg(x) => -x.normalize()?,
            Expr::Div(a, b) => a.normalize()?.checked_div(&b.normalize()?)?,
            Expr::Pow(b, e) => {
                let base = b.normalize()?;
                let ex = e.normalize()?;
                match ex.constant_value() {
                    Some(c) if c.is_real() => {
                        let p = c.re.numer().try_into().map_err(|_| Error::Unsupported("huge exponent".into()))?;
                        let q: u32 = c.re.denom().try_into().map_err(|_| Error::Unsupported("huge exponent".into()))?;
                        tower::pow_rational(&base, p, q)?
                    }
                    _ => tower::exp(&(&ex * &tower::log(&base)?))?,
                }
            }
            Expr::Exp(a) => tower::exp(&a.normalize()?)?,
            Expr::Log(a) => tower::log(&a.normalize()?)?,
            Expr::Atan(a) => tower::atan(&a.normalize()?),
            Expr::Sqrt(a) => tower::root(&a.normalize()?, 2)?,
            Expr::Int { integrand, var, at } => {
                let at = match at {
                    Some(a) => a.normalize()?,
                    None => RF::var(*var),
                };
                tower::integral(&integrand.normalize()?, *var, &at)?
            }
            Expr::Diff(e, v) => tower::diff(&e.normalize()?, *v),
        })
    }

    /// Exact derivative, returned in normal form.
    pub fn differentiate(&self, v: Symbol) -> Result<Expr> {
        Ok(Expr::Value(tower::diff(&self.normalize()?, v)))
    }

    /// Simultaneous substitution followed by normalization.
    pub fn substitute(&self, bindings: &HashMap<Symbol, Expr>) -> Result<Expr> {
        let map = bindings.iter().map(|(k, v)| Ok((*k, v.normalize()?))).collect::<Result<HashMap<_, _>>>()?;
        Ok(Expr::Value(tower::subst(&self.normalize()?, &map)?))
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(_) => 1,
            Expr::Neg(_) => 2,
            Expr::Mul(_) | Expr::Div(..) => 3,
            Expr::Pow(..) => 4,
            Expr::Num(c) if c.needs_parens() => 1,
            Expr::Num(c) if c.is_positive_like() => 5,
            Expr::Num(_) => 2,
            Expr::Value(v) => {
                if v.is_constant() {
                    Expr::Num(v.constant_value().unwrap()).precedence()
                } else if !v.is_polynomial() {
                    3
                } else if v.num().len() > 1 {
                    1
                } else {
                    2
                }
            }
            _ => 5,
        }
    }
}

impl From<RF> for Expr {
    fn from(v: RF) -> Self {
        Expr::Value(v)
    }
}

fn wrap(e: &Expr, min: u8) -> String {
    if e.precedence() < min {
        format!("({e})")
    } else {
        e.to_string()
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(c) => write!(f, "{c}"),
            Expr::Sym(s) => write!(f, "{s}"),
            Expr::Value(v) => write!(f, "{v}"),
            Expr::Add(xs) => {
                for (i, x) in xs.iter().enumerate() {
                    let t = wrap(x, 1);
                    if i == 0 {
                        write!(f, "{t}")?;
                    } else if let Some(rest) = t.strip_prefix('-') {
                        write!(f, " - {rest}")?;
                    } else {
                        write!(f, " + {t}")?;
                    }
                }
                Ok(())
            }
            Expr::Mul(xs) => {
                let parts: Vec<String> = xs.iter().map(|x| wrap(x, 3)).collect();
                write!(f, "{}", parts.join("*"))
            }
            Expr::Neg(x) => write!(f, "-{}", wrap(x, 3)),
            Expr::Div(a, b) => write!(f, "{}/{}", wrap(a, 3), wrap(b, 4)),
            Expr::Pow(a, b) => write!(f, "{}^{}", wrap(a, 5), wrap(b, 5)),
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::Log(a) => write!(f, "log({a})"),
            Expr::Atan(a) => write!(f, "atan({a})"),
            Expr::Sqrt(a) => write!(f, "sqrt({a})"),
            Expr::Int { integrand, var, at: None } => write!(f, "Int({integrand}, {var})"),
            Expr::Int { integrand, var, at: Some(at) } => write!(f, "Int({integrand}, {var}, {at})"),
            Expr::Diff(e, v) => write!(f, "diff({e}, {v})"),
        }
    }
}
