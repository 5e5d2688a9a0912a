//! First-order rational equations `y' = Φ(x, y)`, the Abel families and shape recognition.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::parse::{parse_ode, parse_value};
use crate::poly::Poly;
use crate::ratfun::RationalFunction as RF;
use crate::scalar::Scalar;
use crate::symbol::{t, x, y, Symbol};
use crate::tower;
use crate::transform::{kind_to_first, Transform};

/// `y' = rhs`, with the transforms that produced it.
#[derive(Clone, Debug)]
pub struct RationalODE {
    pub rhs: RF,
    pub chain: Vec<Transform>,
}

impl PartialEq for RationalODE {
    fn eq(&self, o: &Self) -> bool {
        self.rhs == o.rhs
    }
}

impl RationalODE {
    pub fn new(rhs: RF) -> Self {
        RationalODE { rhs, chain: Vec::new() }
    }

    pub fn parse(src: &str) -> Result<Self> {
        Ok(RationalODE::new(parse_ode(src)?))
    }

    /// Parameters: base symbols other than x and y.
    pub fn params(&self) -> BTreeSet<Symbol> {
        self.rhs.free_symbols().into_iter().filter(|s| *s != x() && *s != y()).collect()
    }

    pub fn first_kind(&self) -> Option<AbelFirstKind> {
        AbelFirstKind::from_rhs(&self.rhs)
    }

    pub fn second_kind(&self) -> Option<AbelSecondKind> {
        AbelSecondKind::from_rhs(&self.rhs)
    }

    /// JSON form `{"kind", "vars", "slots", "params"}`.
    pub fn to_json(&self) -> Value {
        let s = |r: &RF| Value::String(r.to_string());
        let (kind, slots) = if let Some(a) = self.first_kind().filter(|a| !a.f[3].is_zero()) {
            let m: Map<String, Value> = (0..4).rev().map(|i| (format!("f{i}"), s(&a.f[i]))).collect();
            ("abel-first-kind", m)
        } else if let Some(a) = self.second_kind() {
            let mut m: Map<String, Value> = (0..4).rev().map(|i| (format!("f{i}"), s(&a.f[i]))).collect();
            m.insert("g1".into(), s(&a.g1));
            m.insert("g0".into(), s(&a.g0));
            ("abel-second-kind", m)
        } else {
            let mut m = Map::new();
            m.insert("rhs".into(), s(&self.rhs));
            ("rational", m)
        };
        let params: Map<String, Value> = self.params().into_iter().map(|p| (p.name(), Value::Null)).collect();
        json!({"kind": kind, "vars": ["x", "y"], "slots": slots, "params": params})
    }

    /// Reads the JSON form; parameters bound to values in `params` are substituted.
    pub fn from_json(v: &Value) -> Result<Self> {
        let slots = v.get("slots").and_then(Value::as_object).ok_or_else(|| Error::Invalid("missing `slots`".into()))?;
        let slot = |k: &str| -> Result<RF> {
            match slots.get(k) {
                Some(Value::String(s)) => parse_value(s),
                Some(Value::Number(n)) => parse_value(&n.to_string()),
                None => Ok(RF::zero()),
                Some(o) => Err(Error::Invalid(format!("slot `{k}` must be an expression string, got {o}"))),
            }
        };
        let kind = v.get("kind").and_then(Value::as_str).unwrap_or("rational");
        let fs = || -> Result<[RF; 4]> { Ok([slot("f0")?, slot("f1")?, slot("f2")?, slot("f3")?]) };
        let rhs = match kind {
            "abel-first-kind" => AbelFirstKind { f: fs()? }.rhs(),
            "abel-second-kind" => AbelSecondKind { f: fs()?, g1: slot("g1")?, g0: slot("g0")? }.rhs()?,
            "rational" => slot("rhs")?,
            other => return Err(Error::Invalid(format!("unknown equation kind `{other}`"))),
        };
        let bindings = match v.get("params") {
            Some(Value::Object(m)) => bind_params(m)?,
            _ => BTreeMap::new(),
        };
        Ok(RationalODE::new(substitute_params(&rhs, &bindings)?))
    }
}

impl fmt::Display for RationalODE {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y' = {}", self.rhs)
    }
}

fn bind_params(m: &Map<String, Value>) -> Result<BTreeMap<String, RF>> {
    let mut out = BTreeMap::new();
    for (k, v) in m {
        let val = match v {
            Value::Null => continue,
            Value::String(s) => parse_value(s)?,
            Value::Number(n) => parse_value(&n.to_string())?,
            o => return Err(Error::Invalid(format!("parameter `{k}` has unsupported value {o}"))),
        };
        out.insert(k.clone(), val);
    }
    Ok(out)
}

/// Substitutes named parameters.
pub fn substitute_params(rhs: &RF, bindings: &BTreeMap<String, RF>) -> Result<RF> {
    let map = bindings.iter().map(|(k, v)| (Symbol::named(k), v.clone())).collect();
    tower::subst(rhs, &map)
}

/// `y' = f3 y³ + f2 y² + f1 y + f0`; `f[i]` multiplies `y^i`.
#[derive(Clone, Debug, PartialEq)]
pub struct AbelFirstKind {
    pub f: [RF; 4],
}

/// `y' = (f3 y³ + f2 y² + f1 y + f0)/(g1 y + g0)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AbelSecondKind {
    pub f: [RF; 4],
    pub g1: RF,
    pub g0: RF,
}

fn y_coeffs(p: &Poly) -> BTreeMap<u32, RF> {
    p.coeffs_in(y()).into_iter().map(|(k, c)| (k, RF::from_poly(c))).collect()
}

fn towers_in_y(f: &RF) -> bool {
    f.symbols().iter().any(|s| s.is_tower() && s.depends_on(y()))
}

impl AbelFirstKind {
    pub fn from_rhs(rhs: &RF) -> Option<Self> {
        if towers_in_y(rhs) || rhs.den().degree_in(y()) > 0 || rhs.num().degree_in(y()) > 3 {
            return None;
        }
        let den = RF::from_poly(rhs.den().clone());
        let c = y_coeffs(rhs.num());
        let get = |i| c.get(&i).map(|v| v / &den).unwrap_or_else(RF::zero);
        Some(AbelFirstKind { f: [get(0), get(1), get(2), get(3)] })
    }

    pub fn rhs(&self) -> RF {
        let yv = RF::var(y());
        let mut acc = RF::zero();
        for c in self.f.iter().rev() {
            acc = &(&acc * &yv) + c;
        }
        acc
    }
}

impl AbelSecondKind {
    pub fn from_rhs(rhs: &RF) -> Option<Self> {
        if towers_in_y(rhs) || rhs.den().degree_in(y()) != 1 || rhs.num().degree_in(y()) > 3 {
            return None;
        }
        let c = y_coeffs(rhs.num());
        let d = y_coeffs(rhs.den());
        let get = |m: &BTreeMap<u32, RF>, i| m.get(&i).cloned().unwrap_or_else(RF::zero);
        Some(AbelSecondKind {
            f: [get(&c, 0), get(&c, 1), get(&c, 2), get(&c, 3)],
            g1: get(&d, 1),
            g0: get(&d, 0),
        })
    }

    pub fn rhs(&self) -> Result<RF> {
        let num = AbelFirstKind { f: self.f.clone() }.rhs();
        num.checked_div(&(&(&self.g1 * &RF::var(y())) + &self.g0))
    }
}

/// The named families of Abel equations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Ail8,
    Gtib,
    Air10,
    Aia16,
    InvAia,
    Ail4,
    AilFirstKind,
    Ail2,
    Ail1,
}

impl Family {
    pub const ALL: [Family; 9] = [
        Family::Ail8,
        Family::Gtib,
        Family::Air10,
        Family::Aia16,
        Family::InvAia,
        Family::Ail4,
        Family::AilFirstKind,
        Family::Ail2,
        Family::Ail1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Ail8 => "AIL8",
            Family::Gtib => "GTIB",
            Family::Air10 => "AIR10",
            Family::Aia16 => "AIA16",
            Family::InvAia => "inv_AIA",
            Family::Ail4 => "AIL4",
            Family::AilFirstKind => "AIL_FirstKind",
            Family::Ail2 => "AIL2",
            Family::Ail1 => "AIL1",
        }
    }

    pub fn from_name(s: &str) -> Result<Family> {
        let key = s.to_ascii_lowercase().replace(['-', '_'], "");
        Family::ALL
            .into_iter()
            .find(|f| f.name().to_ascii_lowercase().replace('_', "") == key)
            .ok_or_else(|| Error::Invalid(format!("unknown family `{s}`")))
    }

    pub fn params(self) -> &'static [&'static str] {
        const AIA: &[&str] = &[
            "a3", "a2", "a1", "a0", "b3", "b2", "b1", "b0", "s3", "s2", "s1", "s0", "r3", "r2", "r1", "r0",
        ];
        match self {
            Family::Ail8 => &["s1", "s0", "r1", "r0", "a3", "a2", "a1", "a0"],
            Family::Gtib => &["s1", "s0", "r1", "r0", "a3", "a2", "a1", "a0", "lambda"],
            Family::Air10 => &["s2", "s1", "s0", "r2", "r1", "r0", "a3", "a2", "a1", "a0"],
            Family::Aia16 | Family::InvAia => AIA,
            Family::Ail4 | Family::AilFirstKind => &["k3", "k2", "k1", "k0"],
            Family::Ail2 => &["alpha", "beta"],
            Family::Ail1 => &["alpha"],
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameter values for a family; unbound parameters stay symbolic.
pub type FamilyParams = BTreeMap<String, RF>;

fn poly_in(v: Symbol, cs: &[RF]) -> RF {
    // cs[i] multiplies v^(len-1-i)
    let vv = RF::var(v);
    cs.iter().fold(RF::zero(), |acc, c| &(&acc * &vv) + c)
}

/// Builds the right-hand side of a family member.
pub fn construct_family(family: Family, params: &FamilyParams) -> Result<RationalODE> {
    for k in params.keys() {
        if !family.params().contains(&k.as_str()) {
            return Err(Error::Invalid(format!("{family} has no parameter `{k}`")));
        }
    }
    let p = |n: &str| params.get(n).cloned().unwrap_or_else(|| RF::var(Symbol::named(n)));
    let ps = |ns: &[&str]| ns.iter().map(|n| p(n)).collect::<Vec<_>>();
    let (xv, yv) = (RF::var(x()), RF::var(y()));
    let cubic = || poly_in(y(), &ps(&["a3", "a2", "a1", "a0"]));
    let second = |num: RF, g1: RF, g0: RF| -> Result<RF> {
        let den = &(&g1 * &yv) + &g0;
        if den.is_zero() {
            return Err(Error::Degenerate(format!("{family} denominator vanishes identically")));
        }
        (-num).checked_div(&den)
    };
    let rhs = match family {
        Family::Ail8 => second(cubic(), poly_in(x(), &ps(&["s1", "s0"])), poly_in(x(), &ps(&["r1", "r0"])))?,
        Family::Gtib => {
            let lambda = p("lambda");
            let xl = match lambda.constant_value() {
                Some(c) if c.is_real() => {
                    let num: i64 = c.re.numer().try_into().map_err(|_| Error::Unsupported("huge exponent".into()))?;
                    let den: u32 = c.re.denom().try_into().map_err(|_| Error::Unsupported("huge exponent".into()))?;
                    tower::pow_rational(&xv, num, den)?
                }
                _ => tower::exp(&(&lambda * &tower::log(&xv)?))?,
            };
            let g1 = &(&p("s1") * &xv) + &(&p("s0") * &xl);
            let g0 = &(&p("r1") * &xv) + &(&p("r0") * &xl);
            second(cubic(), g1, g0)?
        }
        Family::Air10 => {
            second(cubic(), poly_in(x(), &ps(&["s2", "s1", "s0"])), poly_in(x(), &ps(&["r2", "r1", "r0"])))?
        }
        Family::Aia16 | Family::InvAia => {
            let (a, b, s, r) = if family == Family::Aia16 { ("a", "b", "s", "r") } else { ("s", "r", "a", "b") };
            let mut num = RF::zero();
            for i in (0..4).rev() {
                let c = &(&p(&format!("{a}{i}")) * &xv) + &p(&format!("{b}{i}"));
                num = &(&num * &yv) + &c;
            }
            let g1 = poly_in(x(), &(0..4).rev().map(|i| p(&format!("{s}{i}"))).collect::<Vec<_>>());
            let g0 = poly_in(x(), &(0..4).rev().map(|i| p(&format!("{r}{i}"))).collect::<Vec<_>>());
            second(num, g1, g0)?
        }
        Family::Ail4 => poly_in(y(), &ps(&["k3", "k2", "k1", "k0"])).checked_div(&(&yv + &xv))?,
        Family::AilFirstKind => {
            let (k3, k2, k1, k0) = (p("k3"), p("k2"), p("k1"), p("k0"));
            let f3 = poly_in(x(), &[k3.clone(), -k2.clone(), k1.clone(), -k0]);
            let f2 = -poly_in(x(), &[k3.scale(&Scalar::from_int(3)), k2.scale(&Scalar::from_int(-2)), &k1 + &RF::one()]);
            let f1 = poly_in(x(), &[k3.scale(&Scalar::from_int(3)), -k2]);
            AbelFirstKind { f: [-k3, f1, f2, f3] }.rhs()
        }
        Family::Ail2 => {
            let (alpha, beta) = (p("alpha"), p("beta"));
            let f3 = poly_in(x(), &[RF::from_int(-1), RF::zero(), alpha.clone(), -beta]);
            let f2 = poly_in(x(), &[RF::from_int(3), RF::zero(), -(&RF::one() + &alpha)]);
            AbelFirstKind { f: [RF::one(), xv.scale(&Scalar::from_int(-3)), f2, f3] }.rhs()
        }
        Family::Ail1 => {
            let f3 = poly_in(x(), &[RF::one(), RF::zero(), p("alpha")]);
            let f2 = poly_in(x(), &[RF::from_int(-2), RF::from_int(-1)]);
            AbelFirstKind { f: [RF::zero(), RF::one(), f2, f3] }.rhs()
        }
    };
    Ok(RationalODE::new(rhs))
}

/// Shape tags, from most to least specific.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Shape {
    Linear,
    Riccati,
    AilForm,
    AirForm,
    AiaForm,
    AbelFirstKind,
    AbelSecondKind,
}

impl Shape {
    pub fn tag(self) -> &'static str {
        match self {
            Shape::Linear => "linear",
            Shape::Riccati => "riccati",
            Shape::AbelFirstKind => "abel-first-kind",
            Shape::AbelSecondKind => "abel-second-kind",
            Shape::AiaForm => "AIA-form",
            Shape::AirForm => "AIR-form",
            Shape::AilForm => "AIL-form",
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Shape tags plus the coefficient slots of the most specific one.
#[derive(Clone, Debug)]
pub struct ShapeReport {
    pub tags: BTreeSet<Shape>,
    pub slots: BTreeMap<String, RF>,
}

impl ShapeReport {
    pub fn has(&self, s: Shape) -> bool {
        self.tags.contains(&s)
    }

    pub fn to_json(&self) -> Value {
        let tags: Vec<&str> = self.tags.iter().map(|s| s.tag()).collect();
        let slots: Map<String, Value> = self.slots.iter().map(|(k, v)| (k.clone(), Value::String(v.to_string()))).collect();
        json!({"tags": tags, "slots": slots})
    }
}

/// Coefficients of `x^i y^j` when free of x and y.
fn bicoeffs(p: &Poly) -> Option<BTreeMap<(u32, u32), RF>> {
    let mut out = BTreeMap::new();
    for (i, cx) in p.coeffs_in(x()) {
        for (j, c) in cx.coeffs_in(y()) {
            let c = RF::from_poly(c);
            if c.depends_on(x()) || c.depends_on(y()) {
                return None;
            }
            out.insert((i, j), c);
        }
    }
    Some(out)
}

/// Recognizes the structural classes an equation belongs to.
pub fn shape_classify(e: &RationalODE) -> ShapeReport {
    let rhs = &e.rhs;
    let mut tags = BTreeSet::new();
    let mut slots = BTreeMap::new();
    let (ny, dy) = rhs.degrees_in(y());
    if let Some(a) = AbelFirstKind::from_rhs(rhs) {
        match ny {
            0 | 1 => tags.insert(Shape::Linear),
            2 => tags.insert(Shape::Riccati),
            _ => tags.insert(Shape::AbelFirstKind),
        };
        for i in 0..=ny.clamp(1, 3) as usize {
            slots.insert(format!("f{i}"), a.f[i].clone());
        }
    } else if let Some(a) = AbelSecondKind::from_rhs(rhs) {
        tags.insert(Shape::AbelSecondKind);
        for i in 0..4 {
            slots.insert(format!("f{i}"), a.f[i].clone());
        }
        slots.insert("g1".into(), a.g1.clone());
        slots.insert("g0".into(), a.g0.clone());
    }
    let nb = bicoeffs(rhs.num());
    let db = bicoeffs(rhs.den());
    if let (Some(nb), Some(db)) = (nb, db) {
        let (nx, dx) = rhs.degrees_in(x());
        if ny <= 3 && dy <= 1 && nx <= 1 && dx <= 3 {
            let form = if nx == 0 && dx <= 1 {
                Shape::AilForm
            } else if nx == 0 && dx <= 2 {
                Shape::AirForm
            } else {
                Shape::AiaForm
            };
            for s in [Shape::AilForm, Shape::AirForm, Shape::AiaForm] {
                if s >= form {
                    tags.insert(s);
                }
            }
            if !tags.iter().any(|t| *t < form) {
                slots.clear();
                let get = |m: &BTreeMap<(u32, u32), RF>, i, j| m.get(&(i, j)).cloned().unwrap_or_else(RF::zero);
                // y' = -(Σ (a_j x + b_j) y^j) / ((Σ s_i x^i) y + Σ r_i x^i); the x-free
                // numerators of the AIL and AIR forms are named a_j
                let (xdeg, free_num) = match form {
                    Shape::AilForm => (2, true),
                    Shape::AirForm => (3, true),
                    _ => (4, false),
                };
                for j in 0..4 {
                    if free_num {
                        slots.insert(format!("a{j}"), -get(&nb, 0, j));
                    } else {
                        slots.insert(format!("a{j}"), -get(&nb, 1, j));
                        slots.insert(format!("b{j}"), -get(&nb, 0, j));
                    }
                }
                for i in 0..xdeg {
                    slots.insert(format!("s{i}"), get(&db, i, 1));
                    slots.insert(format!("r{i}"), get(&db, i, 0));
                }
            }
        }
    }
    ShapeReport { tags, slots }
}

/// Brings an Abel equation to first kind: unchanged if already first kind, otherwise
/// through `y = 1/u − g0/g1`.
pub fn to_first_kind(e: &RationalODE) -> Result<AbelFirstKind> {
    if let Some(a) = e.first_kind() {
        return Ok(a);
    }
    let s = e.second_kind().ok_or_else(|| Error::Shape("not an Abel equation".into()))?;
    let g0 = tower::subst1(&(&s.g0 / &s.g1), x(), &RF::var(t()))?;
    let first = kind_to_first(e, &RF::one(), &g0)?;
    first.first_kind().ok_or_else(|| Error::Shape("kind conversion did not give first kind".into()))
}

/// The two relative invariants (s3, s5) of a first-kind equation.
pub fn invariants(a: &AbelFirstKind) -> (RF, RF) {
    let [f0, f1, f2, f3] = &a.f;
    let d = |v: &RF| tower::diff(v, x());
    let c = |n: i64, m: i64| Scalar::from_ratio(n, m);
    let s3 = &(&(&(f0 * &f3.pow(2)) - &(&(f1 * f2) * f3).scale(&c(1, 3))) + &f2.pow(3).scale(&c(2, 27)))
        + &(&(f3 * &d(f2)) - &(f2 * &d(f3))).scale(&c(1, 3));
    let s5 = &(&(&(f3 * &d(&s3)) - &(&d(f3) * &s3).scale(&c(3, 1))) - &(&(&s3 * f1) * f3).scale(&c(3, 1)))
        + &(&s3 * &f2.pow(2));
    (s3, s5)
}

/// Absolute invariant s5³/s3⁵, or `None` when s3 vanishes.
pub fn absolute_invariant(e: &RationalODE) -> Result<Option<RF>> {
    let a = to_first_kind(e)?;
    if a.f[3].is_zero() {
        return Err(Error::Degenerate("cubic coefficient vanishes".into()));
    }
    let (s3, s5) = invariants(&a);
    if s3.is_zero() {
        return Ok(None);
    }
    Ok(Some(s5.pow(3).checked_div(&s3.pow(5))?))
}

/// True when the absolute invariant does not depend on x (or s3 vanishes).
pub fn is_constant_invariant(e: &RationalODE) -> Result<bool> {
    Ok(match absolute_invariant(e)? {
        None => true,
        Some(i) => !i.depends_on(x()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(pairs: &[(&str, i64)]) -> FamilyParams {
        pairs.iter().map(|(k, v)| (k.to_string(), RF::from_int(*v))).collect()
    }

    #[test]
    fn families_have_expected_shapes() {
        let e = construct_family(Family::Ail8, &params(&[("s1", 1), ("s0", 2), ("r1", 3), ("r0", -1), ("a3", 1), ("a2", 0), ("a1", 2), ("a0", 1)])).unwrap();
        let r = shape_classify(&e);
        assert!(r.has(Shape::AilForm) && r.has(Shape::AbelSecondKind), "{:?}", r.tags);
        assert_eq!(r.slots["r0"], RF::from_int(-1));
        assert_eq!(r.slots["a1"], RF::from_int(2));
        let e = construct_family(Family::Ail1, &params(&[("alpha", 3)])).unwrap();
        assert_eq!(e, RationalODE::parse("y' = (3 + x^2)*y^3 - (2*x + 1)*y^2 + y").unwrap());
        assert!(shape_classify(&e).has(Shape::AbelFirstKind));
        assert!(construct_family(Family::Ail1, &params(&[("beta", 3)])).is_err());
        assert!(construct_family(Family::Ail8, &params(&[("s1", 0), ("s0", 0), ("r1", 0), ("r0", 0)])).is_err());
    }

    #[test]
    fn riccati_is_not_abel() {
        let r = shape_classify(&RationalODE::parse("y' = y^2").unwrap());
        assert!(r.has(Shape::Riccati) && !r.has(Shape::AbelFirstKind));
        let r = shape_classify(&RationalODE::parse("y' = x*y + 1").unwrap());
        assert!(r.has(Shape::Linear));
        let r = shape_classify(&RationalODE::parse("y' = y^3/(x^3*y + 1) + x*y^2/(x^3*y + 1)").unwrap());
        assert!(r.has(Shape::AiaForm) && !r.has(Shape::AirForm));
    }

    #[test]
    fn first_kind_family_matches_ail4_conversion() {
        let k = params(&[("k3", 2), ("k2", -1), ("k1", 3), ("k0", 5)]);
        let ail4 = construct_family(Family::Ail4, &k).unwrap();
        let fk = construct_family(Family::AilFirstKind, &k).unwrap();
        let conv = kind_to_first(&ail4, &RF::one(), &RF::var(t())).unwrap();
        assert_eq!(conv, fk);
    }

    #[test]
    fn constant_invariant_cases() {
        let ail1 = construct_family(Family::Ail1, &params(&[("alpha", 1)])).unwrap();
        assert!(!is_constant_invariant(&ail1).unwrap());
        let k = params(&[("k3", 0), ("k2", 0)]);
        assert!(is_constant_invariant(&construct_family(Family::Ail4, &k).unwrap()).unwrap());
        let deg = params(&[("s1", 2), ("s0", 4), ("r1", 1), ("r0", 2), ("a3", 1), ("a2", 3), ("a1", -1), ("a0", 2)]);
        assert!(is_constant_invariant(&construct_family(Family::Ail8, &deg).unwrap()).unwrap());
        let gen = params(&[("s1", 1), ("s0", 0), ("r1", 0), ("r0", 1), ("a3", 1), ("a2", 0), ("a1", 0), ("a0", 1)]);
        assert!(!is_constant_invariant(&construct_family(Family::Ail8, &gen).unwrap()).unwrap());
    }

    #[test]
    fn json_round_trip() {
        for src in ["y' = x*y^3 + alpha*y^2 - 1", "y' = (y^3 + x)/(x*y + 1)", "y' = exp(x)*y^4"] {
            let e = RationalODE::parse(src).unwrap();
            assert_eq!(RationalODE::from_json(&e.to_json()).unwrap(), e, "{src}");
        }
        let mut j = RationalODE::parse("y' = alpha*y^3").unwrap().to_json();
        j["params"]["alpha"] = json!("2");
        assert_eq!(RationalODE::from_json(&j).unwrap(), RationalODE::parse("y' = 2*y^3").unwrap());
    }
}
