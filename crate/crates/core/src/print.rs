//! Printing in the input grammar, so that printed values parse back to themselves.

use std::fmt;

use crate::poly::{Monomial, Poly};
use crate::ratfun::RationalFunction;
use crate::scalar::Scalar;
use crate::symbol::{Symbol, TowerDef};

/// Printed form of a single symbol; tower entries print as their definitions.
pub fn symbol_text(s: Symbol) -> String {
    let Some(def) = s.tower_def() else { return s.name() };
    match &*def {
        TowerDef::Exp(a) => format!("exp({a})"),
        TowerDef::Log(a) => format!("log({a})"),
        TowerDef::Atan(a) => format!("atan({a})"),
        TowerDef::Root { base, degree: 2 } => format!("sqrt({base})"),
        TowerDef::Root { base, degree } => format!("({base})^(1/{degree})"),
        TowerDef::Integral { integrand, var, at } => {
            let at = at.clone().unwrap_or_else(|| RationalFunction::var(*var));
            let named = at
                .as_symbol()
                .filter(|v| !v.is_tower() && !integrand.free_symbols().contains(v))
                .and_then(|v| crate::tower::subst1(integrand, *var, &RationalFunction::var(v)).ok().map(|f| (f, v)));
            match named {
                Some((f, v)) => format!("Int({f}, {v})"),
                None => format!("Int({integrand}, {var}, {at})"),
            }
        }
    }
}

fn monomial_text(m: &Monomial) -> String {
    let parts: Vec<String> = m
        .iter()
        .map(|&(s, e)| {
            let base = symbol_text(s);
            let base = if s.is_tower() && base.starts_with('(') { format!("({base})") } else { base };
            if e == 1 {
                base
            } else {
                format!("{base}^{e}")
            }
        })
        .collect();
    parts.join("*")
}

fn term_text(m: &Monomial, c: &Scalar) -> String {
    if m.is_one() {
        return if c.needs_parens() { format!("({c})") } else { c.to_string() };
    }
    let mono = monomial_text(m);
    if c.is_one() {
        mono
    } else if (-c).is_one() {
        format!("-{mono}")
    } else if c.needs_parens() {
        format!("({c})*{mono}")
    } else {
        format!("{c}*{mono}")
    }
}

pub fn poly_text(p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (m, c)) in p.terms().iter().enumerate() {
        let t = term_text(m, c);
        if i == 0 {
            out.push_str(&t);
        } else if let Some(rest) = t.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(&t);
        }
    }
    out
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = poly_text(self.num());
        if self.den().is_one() {
            return write!(f, "{n}");
        }
        let num = if self.num().len() > 1 { format!("({n})") } else { n };
        let d = self.den();
        let simple = d.len() == 1 && d.lc().is_one() && d.terms()[0].0.iter().count() == 1;
        let den = poly_text(d);
        if simple {
            write!(f, "{num}/{den}")
        } else {
            write!(f, "{num}/({den})")
        }
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", poly_text(self))
    }
}
