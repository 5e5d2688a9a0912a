//! Changes of variables acting on rational right-hand sides.
//!
//! Every transform except [`Transform::Inversion`] and [`Transform::Monomial`]
//! is a substitution `x = F(t)`, `y = Y(t, u)` with `Y` linear-fractional in
//! `u`; the new right-hand side is `(F'·Φ(F, Y) − Y_t) / Y_u`, renamed back to
//! `(x, y)`.

use std::collections::HashMap;
use std::fmt;

use num_integer::Integer;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ode::RationalODE;
use crate::parse::parse_value;
use crate::poly::{Monomial, Poly};
use crate::ratfun::RationalFunction as RF;
use crate::scalar::Scalar;
use crate::symbol::{t, u, x, y, Symbol};
use crate::tower;

#[derive(Clone, Debug, PartialEq)]
pub enum Transform {
    /// x = F(t), y = P(t)·u + Q(t)
    Point { f: RF, p: RF, q: RF },
    /// x = F(t), y = (P1·u + Q1)/(P2·u + Q2)
    RationalLinear { f: RF, p1: RF, q1: RF, p2: RF, q2: RF },
    /// x ↔ y
    Inversion,
    /// x = t, y = 1/(g1·u + g0)
    KindShift { g1: RF, g0: RF },
    /// x = v^p, t = v^q, y = u: the fractional power x = t^(p/q).
    Monomial { p: i64, q: i64 },
    Composition(Vec<Transform>),
}

fn tv() -> RF {
    RF::var(t())
}

fn uv() -> RF {
    RF::var(u())
}

fn rename_tu(f: &RF) -> Result<RF> {
    let mut map = HashMap::new();
    map.insert(t(), RF::var(x()));
    map.insert(u(), RF::var(y()));
    tower::subst(f, &map)
}

fn swap_xy(f: &RF) -> Result<RF> {
    let mut map = HashMap::new();
    map.insert(x(), RF::var(y()));
    map.insert(y(), RF::var(x()));
    tower::subst(f, &map)
}

/// Substitutes `t ↦ g` in a slot.
fn at(slot: &RF, g: &RF) -> Result<RF> {
    tower::subst1(slot, t(), g)
}

impl Transform {
    pub fn point(f: RF, p: RF, q: RF) -> Self {
        Transform::Point { f, p, q }
    }

    pub fn identity() -> Self {
        Transform::Point { f: tv(), p: RF::one(), q: RF::zero() }
    }

    /// Builds a transform from `x = F(t)`, `y = Y(t, u)` with `Y` linear-fractional in `u`.
    pub fn from_map(f: RF, yv: &RF) -> Result<Self> {
        let nu = yv.num().degree_in(u());
        let du = yv.den().degree_in(u());
        let towers_in_u = yv.symbols().iter().any(|s| s.is_tower() && s.depends_on(u()));
        if nu > 1 || du > 1 || towers_in_u {
            return Err(Error::Unsupported(format!("y = {yv} is not linear-fractional in u")));
        }
        let split = |p: &Poly| {
            let c = p.coeffs_in(u());
            let get = |k| RF::from_poly(c.get(&k).cloned().unwrap_or_else(Poly::zero));
            (get(1), get(0))
        };
        let (n1, n0) = split(yv.num());
        let (d1, d0) = split(yv.den());
        let t = if d1.is_zero() {
            Transform::Point { f, p: &n1 / &d0, q: &n0 / &d0 }
        } else {
            Transform::RationalLinear { f, p1: n1, q1: n0, p2: d1, q2: d0 }
        };
        t.check()?;
        Ok(t)
    }

    /// `x = F(t)` and `y = Y(t, u)` for substitution-type transforms.
    pub fn map(&self) -> Option<(RF, RF)> {
        match self {
            Transform::Point { f, p, q } => Some((f.clone(), &(p * &uv()) + q)),
            Transform::RationalLinear { f, p1, q1, p2, q2 } => {
                Some((f.clone(), &(&(p1 * &uv()) + q1) / &(&(p2 * &uv()) + q2)))
            }
            Transform::KindShift { g1, g0 } => Some((tv(), RF::one() / (&(g1 * &uv()) + g0))),
            _ => None,
        }
    }

    /// Checks the non-degeneracy conditions of each kind.
    pub fn check(&self) -> Result<()> {
        match self {
            Transform::Point { f, p, .. } => {
                if tower::diff(f, t()).is_zero() {
                    return Err(Error::Singular("F' = 0".into()));
                }
                if p.is_zero() {
                    return Err(Error::Singular("P = 0".into()));
                }
            }
            Transform::RationalLinear { f, p1, q1, p2, q2 } => {
                if tower::diff(f, t()).is_zero() {
                    return Err(Error::Singular("F' = 0".into()));
                }
                if (&(p1 * q2) - &(p2 * q1)).is_zero() {
                    return Err(Error::Singular("P1·Q2 − P2·Q1 = 0".into()));
                }
            }
            Transform::KindShift { g1, .. } => {
                if g1.is_zero() {
                    return Err(Error::Singular("g1 = 0".into()));
                }
            }
            Transform::Monomial { p, q } => {
                if *p == 0 || *q == 0 {
                    return Err(Error::Singular("zero exponent".into()));
                }
            }
            Transform::Composition(ts) => {
                if ts.is_empty() {
                    return Err(Error::Invalid("empty composition".into()));
                }
                for t in ts {
                    t.check()?;
                }
            }
            Transform::Inversion => {}
        }
        Ok(())
    }

    /// Transforms a right-hand side.
    pub fn apply_rhs(&self, rhs: &RF) -> Result<RF> {
        match self {
            Transform::Inversion => invert_rhs(rhs),
            Transform::Composition(ts) => {
                let mut r = rhs.clone();
                for t in ts {
                    r = t.apply_rhs(&r)?;
                }
                Ok(r)
            }
            Transform::Monomial { p, q } => {
                // x = v^p, t = v^q: dy/dt = (p/q) v^(p-q) Φ(v^p, y); v is carried in t
                let v = tv();
                let phi = tower::subst1(rhs, x(), &v.powi(*p)?)?;
                let scaled = (&phi * &v.powi(p - q)?).scale(&Scalar::from_ratio(*p, *q));
                rename_tu(&collapse_power(&scaled, t(), *q)?)
            }
            _ => {
                self.check()?;
                let (f, yv) = self.map().expect("substitution transform");
                let mut map = HashMap::new();
                map.insert(x(), f.clone());
                map.insert(y(), yv.clone());
                let phi = tower::subst(rhs, &map)?;
                let num = &(&tower::diff(&f, t()) * &phi) - &tower::diff(&yv, t());
                let yu = tower::diff(&yv, u());
                rename_tu(&num.checked_div(&yu)?)
            }
        }
    }

    /// Applies to an equation, recording the transform on the result.
    pub fn apply(&self, e: &RationalODE) -> Result<RationalODE> {
        let rhs = self.apply_rhs(&e.rhs)?;
        let mut chain = e.chain.clone();
        chain.push(self.clone());
        Ok(RationalODE { rhs, chain })
    }

    /// Transports a first integral Ψ(x, y) of an equation to one of its transform.
    pub fn pull_back(&self, psi: &RF) -> Result<RF> {
        match self {
            Transform::Inversion => swap_xy(psi),
            Transform::Composition(ts) => {
                let mut r = psi.clone();
                for t in ts {
                    r = t.pull_back(&r)?;
                }
                Ok(r)
            }
            Transform::Monomial { p, q } => {
                let phi = tower::subst1(psi, x(), &tv().powi(*p)?)?;
                rename_tu(&collapse_power(&phi, t(), *q)?)
            }
            _ => {
                let (f, yv) = self.map().expect("substitution transform");
                let mut map = HashMap::new();
                map.insert(x(), f);
                map.insert(y(), yv);
                rename_tu(&tower::subst(psi, &map)?)
            }
        }
    }

    /// The inverse transform, when it exists in closed rational form.
    pub fn inverse(&self) -> Result<Transform> {
        match self {
            Transform::Inversion => Ok(Transform::Inversion),
            Transform::Monomial { p, q } => Ok(Transform::Monomial { p: *q, q: *p }),
            Transform::Composition(ts) => {
                Ok(Transform::Composition(ts.iter().rev().map(|t| t.inverse()).collect::<Result<_>>()?))
            }
            Transform::KindShift { g1, g0 } => {
                // u = (1/y - g0)/g1
                Ok(Transform::RationalLinear { f: tv(), p1: -g0.clone(), q1: RF::one(), p2: g1.clone(), q2: RF::zero() })
            }
            Transform::Point { f, p, q } => {
                let g = mobius_inverse(f)?;
                let pg = at(p, &g)?;
                let qg = at(q, &g)?;
                Ok(Transform::Point { f: g, p: pg.inv()?, q: -(&qg / &pg) })
            }
            Transform::RationalLinear { f, p1, q1, p2, q2 } => {
                let g = mobius_inverse(f)?;
                Ok(Transform::RationalLinear {
                    f: g.clone(),
                    p1: at(q2, &g)?,
                    q1: -at(q1, &g)?,
                    p2: -at(p2, &g)?,
                    q2: at(p1, &g)?,
                })
            }
        }
    }

    /// Short kind name used in JSON and reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Transform::Point { .. } => "point",
            Transform::RationalLinear { .. } => "rational-linear",
            Transform::Inversion => "inversion",
            Transform::KindShift { .. } => "kind-shift",
            Transform::Monomial { .. } => "monomial",
            Transform::Composition(_) => "composition",
        }
    }

    pub fn to_json(&self) -> Value {
        let s = |r: &RF| Value::String(r.to_string());
        match self {
            Transform::Point { f, p, q } => json!({"kind": "point", "F": s(f), "P": s(p), "Q": s(q)}),
            Transform::RationalLinear { f, p1, q1, p2, q2 } => {
                json!({"kind": "rational-linear", "F": s(f), "P1": s(p1), "Q1": s(q1), "P2": s(p2), "Q2": s(q2)})
            }
            Transform::Inversion => json!({"kind": "inversion"}),
            Transform::KindShift { g1, g0 } => json!({"kind": "kind-shift", "g1": s(g1), "g0": s(g0)}),
            Transform::Monomial { p, q } => json!({"kind": "monomial", "p": p, "q": q}),
            Transform::Composition(ts) => Value::Array(ts.iter().map(Transform::to_json).collect()),
        }
    }

    /// Reads the JSON form; `{"kind": "map", "F": .., "Y": ..}` is also accepted.
    pub fn from_json(v: &Value) -> Result<Transform> {
        if let Value::Array(items) = v {
            let ts = items.iter().map(Transform::from_json).collect::<Result<Vec<_>>>()?;
            return Ok(if ts.len() == 1 { ts.into_iter().next().unwrap() } else { Transform::Composition(ts) });
        }
        let field = |k: &str| -> Result<RF> {
            match v.get(k) {
                Some(Value::String(s)) => parse_value(s),
                Some(Value::Number(n)) => parse_value(&n.to_string()),
                None => Err(Error::Invalid(format!("transform is missing `{k}`"))),
                Some(other) => Err(Error::Invalid(format!("`{k}` must be an expression string, got {other}"))),
            }
        };
        let opt = |k: &str, d: RF| -> Result<RF> { if v.get(k).is_some() { field(k) } else { Ok(d) } };
        let kind = v.get("kind").and_then(Value::as_str).ok_or_else(|| Error::Invalid("transform needs `kind`".into()))?;
        let t = match kind {
            "point" => Transform::Point { f: opt("F", tv())?, p: opt("P", RF::one())?, q: opt("Q", RF::zero())? },
            "rational-linear" => Transform::RationalLinear {
                f: opt("F", tv())?,
                p1: field("P1")?,
                q1: field("Q1")?,
                p2: field("P2")?,
                q2: field("Q2")?,
            },
            "inversion" => Transform::Inversion,
            "kind-shift" => Transform::KindShift { g1: field("g1")?, g0: opt("g0", RF::zero())? },
            "monomial" => {
                let n = |k: &str| v.get(k).and_then(Value::as_i64).ok_or_else(|| Error::Invalid(format!("monomial needs integer `{k}`")));
                Transform::Monomial { p: n("p")?, q: n("q")? }
            }
            "map" => Transform::from_map(opt("F", tv())?, &field("Y")?)?,
            "composition" => match v.get("steps") {
                Some(steps) => Transform::from_json(steps)?,
                None => return Err(Error::Invalid("composition needs `steps`".into())),
            },
            other => return Err(Error::Invalid(format!("unknown transform kind `{other}`"))),
        };
        t.check()?;
        Ok(t)
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transform::Inversion => write!(fm, "{{x <-> y}}"),
            Transform::Monomial { p, q } => write!(fm, "{{x = v^{p}, t = v^{q}}}"),
            Transform::Composition(ts) => {
                let parts: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
                write!(fm, "{}", parts.join(" ; "))
            }
            _ => {
                let (f, yv) = self.map().expect("substitution transform");
                write!(fm, "{{x = {f}, y = {yv}}}")
            }
        }
    }
}

/// Inverts F(t) when it is linear-fractional in t.
fn mobius_inverse(f: &RF) -> Result<RF> {
    let v = t();
    if f.num().degree_in(v) > 1 || f.den().degree_in(v) > 1 || f.symbols().iter().any(|s| s.is_tower() && s.depends_on(v)) {
        return Err(Error::Unsupported(format!("x = {f} has no rational inverse")));
    }
    let split = |p: &Poly| {
        let c = p.coeffs_in(v);
        let get = |k| RF::from_poly(c.get(&k).cloned().unwrap_or_else(Poly::zero));
        (get(1), get(0))
    };
    let (a, b) = split(f.num());
    let (c, d) = split(f.den());
    // x = (a t + b)/(c t + d)  =>  t = (d x - b)/(a - c x)
    let tt = tv();
    (&(&d * &tt) - &b).checked_div(&(&a - &(&c * &tt)))
}

/// Rewrites an expression in `v` whose exponents are multiples of `q` as one in `v^q`.
fn collapse_power(f: &RF, v: Symbol, q: i64) -> Result<RF> {
    if q == 1 {
        return Ok(f.clone());
    }
    if f.symbols().iter().any(|s| s.is_tower() && s.depends_on(v)) {
        return Err(Error::Unsupported("fractional-power substitution through a transcendental".into()));
    }
    let (qa, neg) = (q.unsigned_abs() as u32, q < 0);
    let fix = |p: &Poly| -> Result<Poly> {
        let mut terms = Vec::new();
        for (m, c) in p.terms() {
            let (e, rest) = m.split(v);
            if e % qa != 0 {
                return Err(Error::Unsupported(format!("exponent {e} of {v} is not a multiple of {q}")));
            }
            terms.push((rest.mul(&Monomial::var(v, e / qa)), c.clone()));
        }
        Ok(Poly::from_terms(terms))
    };
    let out = RF::new(fix(f.num())?, fix(f.den())?)?;
    if neg {
        tower::subst1(&out, v, &RF::var(v).inv()?)
    } else {
        Ok(out)
    }
}

/// x ↔ y on a right-hand side: Φ(x, y) ↦ 1/Φ(y, x).
pub fn invert_rhs(rhs: &RF) -> Result<RF> {
    if rhs.is_zero() {
        return Err(Error::Degenerate("cannot invert y' = 0".into()));
    }
    swap_xy(rhs)?.inv()
}

pub fn invert_xy(e: &RationalODE) -> Result<RationalODE> {
    Transform::Inversion.apply(e)
}

/// Composes transforms, merging consecutive substitution transforms into one when possible.
pub fn compose(ts: &[Transform]) -> Result<Transform> {
    if ts.is_empty() {
        return Err(Error::Invalid("empty composition".into()));
    }
    let mut out: Vec<Transform> = Vec::new();
    for tr in ts.iter().flat_map(|tr| match tr {
        Transform::Composition(inner) => inner.clone(),
        other => vec![other.clone()],
    }) {
        if let Some(prev) = out.last() {
            if let (Some((f1, y1)), Some((f2, y2))) = (prev.map(), tr.map()) {
                // x = F1(F2(t)), y = Y1(F2(t), Y2(t, u))
                let f = at(&f1, &f2)?;
                let mut m = HashMap::new();
                m.insert(t(), f2.clone());
                m.insert(u(), y2.clone());
                let yv = tower::subst(&y1, &m)?;
                if let Ok(merged) = Transform::from_map(f, &yv) {
                    out.pop();
                    out.push(merged);
                    continue;
                }
            }
        }
        out.push(tr);
    }
    Ok(if out.len() == 1 { out.pop().unwrap() } else { Transform::Composition(out) })
}

/// First-kind to second-kind conversion `x = t, y = 1/(g1·u + g0)`.
pub fn kind_to_second(e: &RationalODE, g1: &RF, g0: &RF) -> Result<RationalODE> {
    Transform::KindShift { g1: g1.clone(), g0: g0.clone() }.apply(e)
}

/// Inverse of [`kind_to_second`] with the same `(g1, g0)`.
pub fn kind_to_first(e: &RationalODE, g1: &RF, g0: &RF) -> Result<RationalODE> {
    Transform::KindShift { g1: g1.clone(), g0: g0.clone() }.inverse()?.apply(e)
}

/// Change of variables reducing the Bernoulli-type family with exponent `lambda` to the linear one:
/// x = t^(1/(1 − lambda)).
pub fn gtib_reduction(lambda: &Scalar) -> Result<Transform> {
    if !lambda.is_real() || lambda.is_one() {
        return Err(Error::Invalid("lambda must be a real rational different from 1".into()));
    }
    let e = (&Scalar::one() - lambda).inv();
    let (p, q): (i64, i64) = (
        e.re.numer().try_into().map_err(|_| Error::Unsupported("exponent too large".into()))?,
        e.re.denom().try_into().map_err(|_| Error::Unsupported("exponent too large".into()))?,
    );
    let g = p.gcd(&q);
    let (p, q) = (p / g, q / g);
    if q == 1 {
        Ok(Transform::Point { f: tv().powi(p)?, p: RF::one(), q: RF::zero() })
    } else {
        Ok(Transform::Monomial { p, q })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_ode;

    fn ode(s: &str) -> RationalODE {
        RationalODE::new(parse_ode(s).unwrap())
    }

    #[test]
    fn inversion_of_inverse_linear() {
        let e = ode("y' = -(x*y + 1)");
        assert_eq!(invert_xy(&e).unwrap(), ode("y' = -1/(x*y + 1)"));
        let k = ode("y' = (1-2*x*y+y^2-2*y^3*x)/(x^2+1)");
        assert_eq!(invert_xy(&invert_xy(&k).unwrap()).unwrap(), k);
    }

    #[test]
    fn identity_and_group_law() {
        let e = ode("y' = y^3/(x*y + 1) + x");
        assert_eq!(Transform::identity().apply(&e).unwrap(), e);
        let t = Transform::from_map(parse_value("(2*t + 1)/(t - 3)").unwrap(), &parse_value("(t*u + 1)/(u - t)").unwrap()).unwrap();
        let back = compose(&[t.clone(), t.inverse().unwrap()]).unwrap();
        assert_eq!(back.apply(&e).unwrap(), e);
        assert_eq!(t.inverse().unwrap().apply(&t.apply(&e).unwrap()).unwrap(), e);
    }

    #[test]
    fn kind_round_trip() {
        let e = ode("y' = x*y^3 + y^2 - 1/x");
        let g1 = parse_value("t + 1").unwrap();
        let g0 = parse_value("t^2").unwrap();
        let s = kind_to_second(&e, &g1, &g0).unwrap();
        assert_eq!(kind_to_first(&s, &g1, &g0).unwrap(), e);
        let r = kind_to_second(&e, &RF::one(), &RF::zero()).unwrap();
        assert_eq!(r.rhs, invert_rhs(&invert_rhs(&r.rhs).unwrap()).unwrap());
    }

    #[test]
    fn pull_back_transports_first_integrals() {
        let e = ode("y' = -1/(y + x)");
        let psi = parse_value("(x + y - 1)*exp(y)").unwrap();
        let tr = Transform::from_map(parse_value("t^2/2").unwrap(), &parse_value("2*(u + t)/t^3").unwrap()).unwrap();
        let e2 = tr.apply(&e).unwrap();
        let psi2 = tr.pull_back(&psi).unwrap();
        let res = &tower::diff(&psi2, x()) + &(&tower::diff(&psi2, y()) * &e2.rhs);
        assert!(res.is_zero(), "{res}");
        assert_eq!(Transform::Inversion.pull_back(&psi).unwrap(), parse_value("(y + x - 1)*exp(x)").unwrap());
    }

    #[test]
    fn json_round_trip() {
        let t = compose(&[
            Transform::from_map(parse_value("1/t").unwrap(), &parse_value("t*u").unwrap()).unwrap(),
            Transform::Inversion,
        ])
        .unwrap();
        let back = Transform::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
    }
}
