//! First integrals of AIL equations by quadrature, their verification, and
//! the Riccati form of AIR equations.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::eval::{is_zero_sampled, SampleConfig, SampledVerdict};
use crate::integrate::integrate;
use crate::ode::{construct_family, shape_classify, Family, FamilyParams, RationalODE, Shape};
use crate::ratfun::RationalFunction as RF;
use crate::reduce::ail_branch;
use crate::symbol::{x, y, Symbol};
use crate::tower;
use crate::transform::{invert_xy, Transform};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Every integral was evaluated in closed form.
    PartialFractions,
    /// At least one integral is left formal.
    Formal,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::PartialFractions => "partial-fractions",
            Method::Formal => "formal",
        }
    }
}

#[derive(Clone, Debug)]
pub struct FirstIntegral {
    pub psi: RF,
    pub method: Method,
    pub verified: bool,
    /// "exact", or "sampled" when only the high-precision sampled check could decide.
    pub check: &'static str,
    pub family: Family,
    pub params: FamilyParams,
    pub chain: Vec<Transform>,
}

impl FirstIntegral {
    pub fn to_json(&self) -> Value {
        json!({
            "first_integral": self.psi.to_string(),
            "verified": self.verified,
            "method": self.method.tag(),
            "check": self.check,
        })
    }
}

fn param(p: &FamilyParams, n: &str) -> RF {
    p.get(n).cloned().unwrap_or_else(|| RF::var(Symbol::named(n)))
}

fn cubic_in_y(p: &FamilyParams) -> RF {
    let yv = RF::var(y());
    ["a3", "a2", "a1", "a0"].iter().fold(RF::zero(), |acc, n| &(&acc * &yv) + &param(p, n))
}

/// Residual of Ψ along `y' = Φ`: ∂Ψ/∂x + ∂Ψ/∂y·Φ.
pub fn residual(e: &RationalODE, psi: &RF) -> RF {
    &tower::diff(psi, x()) + &(&tower::diff(psi, y()) * &e.rhs)
}

/// Exact check that Ψ is constant along solutions.
pub fn verify_first_integral(e: &RationalODE, psi: &RF) -> bool {
    residual(e, psi).is_zero()
}

/// Probabilistic cross-check of [`verify_first_integral`].
pub fn verify_first_integral_sampled(e: &RationalODE, psi: &RF, cfg: &SampleConfig) -> Result<SampledVerdict> {
    is_zero_sampled(&residual(e, psi), cfg)
}

/// Exact verification, falling back to the sampled test when the normal form cannot
/// decide (logarithms over algebraic extensions are not kept independent).
pub fn check_first_integral(e: &RationalODE, psi: &RF) -> Result<&'static str> {
    let res = residual(e, psi);
    if res.is_zero() {
        return Ok("exact");
    }
    if is_zero_sampled(&res, &SampleConfig { points: 12, ..SampleConfig::default() })?.zero {
        return Ok("sampled");
    }
    Err(Error::Verification(format!("Ψ = {psi} is not a first integral of {e}")))
}

/// Ψ = x·E + J with E = exp(∫g dy), J = ∫E·f dy, for the AIL8 member with parameters `p`.
pub fn solve_ail(p: &FamilyParams) -> Result<FirstIntegral> {
    let a = cubic_in_y(p);
    if a.is_zero() {
        return Err(Error::Degenerate("the cubic in y vanishes".into()));
    }
    let yv = RF::var(y());
    let g = &(&(&param(p, "s1") * &yv) + &param(p, "r1")) / &a;
    let f = &(&(&param(p, "s0") * &yv) + &param(p, "r0")) / &a;
    let ig = integrate(&g, y())?;
    let big_e = tower::exp(&ig.value)?;
    let j = integrate(&(&big_e * &f), y())?;
    let psi = &(&RF::var(x()) * &big_e) + &j.value;
    // dx/dy = -(g x + f): Ψ_y − Ψ_x (g x + f) = 0
    let res = &tower::diff(&psi, y()) - &(&tower::diff(&psi, x()) * &(&(&g * &RF::var(x())) + &f));
    let check = if res.is_zero() { "exact" } else { check_first_integral(&construct_family(Family::Ail8, p)?, &psi)? };
    let method = if ig.closed && j.closed { Method::PartialFractions } else { Method::Formal };
    Ok(FirstIntegral { psi, method, verified: true, check, family: Family::Ail8, params: p.clone(), chain: vec![] })
}

/// AIL8 parameters of the AIL4 member `(k0..k3)`.
pub fn ail4_as_ail8(k: &[RF; 4]) -> FamilyParams {
    let mut p = FamilyParams::new();
    p.insert("s1".into(), RF::zero());
    p.insert("s0".into(), RF::one());
    p.insert("r1".into(), RF::one());
    p.insert("r0".into(), RF::zero());
    for (i, ki) in k.iter().enumerate() {
        p.insert(format!("a{i}"), -ki.clone());
    }
    p
}

/// First integral of a normal form (AIL4, AIL2 or AIL1) through the AIL4 quadrature.
pub fn solve_normal_form(family: Family, p: &FamilyParams) -> Result<FirstIntegral> {
    let g = |n: &str| param(p, n);
    let (k, chain) = match family {
        Family::Ail4 => ([g("k0"), g("k1"), g("k2"), g("k3")], vec![]),
        Family::Ail2 => {
            // k4 = 1, k2 = 0: α = k1, β = −k0
            let k = [-g("beta"), g("alpha"), RF::zero(), RF::from_int(-1)];
            let r = ail_branch(&k, true)?;
            (k, r.chain)
        }
        Family::Ail1 => {
            let k = [g("alpha"), RF::zero(), RF::one(), RF::zero()];
            let r = ail_branch(&k, true)?;
            (k, r.chain)
        }
        other => return Err(Error::Unsupported(format!("{other} is not a normal form"))),
    };
    let base = solve_ail(&ail4_as_ail8(&k))?;
    let mut psi = base.psi;
    for t in &chain {
        psi = t.pull_back(&psi)?;
    }
    let e = construct_family(family, p)?;
    let check = check_first_integral(&e, &psi)?;
    Ok(FirstIntegral { psi, method: base.method, verified: true, check, family, params: p.clone(), chain })
}

/// Solves an equation given by its right-hand side when it has AIL form.
pub fn solve_ail_ode(e: &RationalODE) -> Result<FirstIntegral> {
    let r = shape_classify(e);
    if !r.has(Shape::AilForm) {
        return Err(Error::Shape(format!("{e} is not of AIL form")));
    }
    let p: FamilyParams = ["s1", "s0", "r1", "r0", "a3", "a2", "a1", "a0"]
        .iter()
        .map(|n| (n.to_string(), r.slots.get(*n).cloned().unwrap_or_else(RF::zero)))
        .collect();
    let mut fi = solve_ail(&p)?;
    fi.check = check_first_integral(e, &fi.psi)?;
    Ok(fi)
}

/// `dx/dy = −(h x² + g x + f)`, the inverse of an AIR10 member.
#[derive(Clone, Debug, PartialEq)]
pub struct RiccatiForm {
    pub h: RF,
    pub g: RF,
    pub f: RF,
    /// h = 0: the inverse equation is linear.
    pub linear: bool,
}

impl RiccatiForm {
    /// The inverse equation with the usual names: `y' = −(h(x) y² + g(x) y + f(x))`.
    pub fn ode(&self) -> Result<RationalODE> {
        let mut m = std::collections::HashMap::new();
        m.insert(y(), RF::var(x()));
        let r = |v: &RF| tower::subst(v, &m);
        let yv = RF::var(y());
        let rhs = -(&(&(&r(&self.h)? * &yv.pow(2)) + &(&r(&self.g)? * &yv)) + &r(&self.f)?);
        Ok(RationalODE::new(rhs))
    }
}

pub fn air_to_riccati(p: &FamilyParams) -> Result<RiccatiForm> {
    let a = cubic_in_y(p);
    if a.is_zero() {
        return Err(Error::Degenerate("the cubic in y vanishes".into()));
    }
    let yv = RF::var(y());
    let slot = |s: &str, r: &str| &(&(&param(p, s) * &yv) + &param(p, r)) / &a;
    let out = RiccatiForm { h: slot("s2", "r2"), g: slot("s1", "r1"), f: slot("s0", "r0"), linear: false };
    let linear = out.h.is_zero();
    let out = RiccatiForm { linear, ..out };
    let inv = invert_xy(&construct_family(Family::Air10, p)?)?;
    if inv != out.ode()? {
        return Err(Error::Verification("inverse equation does not match the Riccati slots".into()));
    }
    Ok(out)
}

/// Parameters of AIR10 read off an equation of AIR form.
pub fn air_params(e: &RationalODE) -> Result<FamilyParams> {
    let r = shape_classify(e);
    if !r.has(Shape::AirForm) {
        return Err(Error::Shape(format!("{e} is not of AIR form")));
    }
    Ok(["s2", "s1", "s0", "r2", "r1", "r0", "a3", "a2", "a1", "a0"]
        .iter()
        .map(|n| (n.to_string(), r.slots.get(*n).cloned().unwrap_or_else(RF::zero)))
        .collect::<BTreeMap<_, _>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_value;

    fn ints(pairs: &[(&str, i64)]) -> FamilyParams {
        pairs.iter().map(|(k, v)| (k.to_string(), RF::from_int(*v))).collect()
    }

    #[test]
    fn irrational_roots_verify_exactly() {
        // y^3 - 2y + 1 = (y - 1)(y^2 + y - 1)
        let p = ints(&[("s1", 1), ("s0", 0), ("r1", 0), ("r0", 1), ("a3", 1), ("a2", 0), ("a1", -2), ("a0", 1)]);
        let fi = solve_ail(&p).unwrap();
        assert_eq!(fi.check, "exact");
        assert_eq!(fi.method, Method::Formal);
    }

    #[test]
    fn inverse_linear_example() {
        let p = ints(&[("s1", 0), ("s0", 1), ("r1", 1), ("r0", 0), ("a3", 0), ("a2", 0), ("a1", 0), ("a0", 1)]);
        let fi = solve_ail(&p).unwrap();
        assert_eq!(fi.psi, parse_value("x*exp(y) + (y - 1)*exp(y)").unwrap());
        assert_eq!(fi.method, Method::PartialFractions);
        let e = RationalODE::parse("y' = -1/(y + x)").unwrap();
        assert!(verify_first_integral(&e, &fi.psi));
        assert!(verify_first_integral(&e, &RF::one()));
        assert!(!verify_first_integral(&e, &parse_value("x*exp(y)").unwrap()));
        assert!(verify_first_integral_sampled(&e, &fi.psi, &SampleConfig::default()).unwrap().zero);
        assert!(!verify_first_integral_sampled(&e, &parse_value("x*exp(y)").unwrap(), &SampleConfig::default()).unwrap().zero);
    }

    #[test]
    fn degenerate_slopes() {
        let p = ints(&[("s1", 0), ("s0", 0), ("r1", 0), ("r0", 0), ("a3", 1), ("a2", 0), ("a1", 0), ("a0", 1)]);
        assert_eq!(solve_ail(&p).unwrap().psi, RF::var(x()));
        assert!(solve_ail(&ints(&[("a3", 0), ("a2", 0), ("a1", 0), ("a0", 0)])).is_err());
    }

    #[test]
    fn factored_and_formal_cubics() {
        let base = [("s1", 2), ("s0", -1), ("r1", 1), ("r0", 3)];
        let simple = [("s1", 1), ("s0", -1), ("r1", 0), ("r0", 3)];
        for (s, a, closed) in [(base, [1, 0, -1, 0], false), (base, [1, 0, 1, 1], false), (base, [0, 1, 0, 1], false), (simple, [0, 1, 0, 0], true)] {
            let mut p = ints(&s);
            for (i, v) in a.iter().enumerate() {
                p.insert(format!("a{}", 3 - i), RF::from_int(*v));
            }
            let fi = solve_ail(&p).unwrap();
            assert_eq!(fi.method == Method::PartialFractions, closed, "{}", fi.psi);
            let e = construct_family(Family::Ail8, &p).unwrap();
            assert!(verify_first_integral(&e, &fi.psi));
        }
    }

    #[test]
    fn normal_forms_through_pull_back() {
        let fi = solve_normal_form(Family::Ail1, &ints(&[("alpha", 0)])).unwrap();
        assert!(fi.verified);
        let fi = solve_normal_form(Family::Ail2, &ints(&[("alpha", 2), ("beta", 1)])).unwrap();
        assert!(fi.verified);
        let fi = solve_normal_form(Family::Ail2, &ints(&[("alpha", 1), ("beta", 0)])).unwrap();
        assert_eq!(fi.check, "exact");
        let fi = solve_normal_form(Family::Ail4, &ints(&[("k3", 1), ("k2", 0), ("k1", 0), ("k0", 1)])).unwrap();
        assert!(fi.verified);
    }

    #[test]
    fn riccati_of_air() {
        let mut p = FamilyParams::new();
        for n in ["s0", "r2"] {
            p.insert(n.into(), RF::one());
        }
        for n in ["s2", "s1", "r1", "r0", "a3", "a2"] {
            p.insert(n.into(), RF::zero());
        }
        p.insert("a1".into(), RF::from_int(-2));
        p.insert("a0".into(), parse_value("-2*alpha").unwrap());
        let r = air_to_riccati(&p).unwrap();
        assert!(!r.linear);
        assert_eq!(r.h, parse_value("1/(-2*y - 2*alpha)").unwrap());
        let back = invert_xy(&r.ode().unwrap()).unwrap();
        assert_eq!(back, construct_family(Family::Air10, &p).unwrap());
        assert!(shape_classify(&r.ode().unwrap()).has(Shape::Riccati));
        let sym = air_to_riccati(&FamilyParams::new()).unwrap();
        assert_eq!(sym.h, parse_value("(s2*y + r2)/(a3*y^3 + a2*y^2 + a1*y + a0)").unwrap());
    }
}
