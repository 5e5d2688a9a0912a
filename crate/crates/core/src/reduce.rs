//! Parameter reduction of AIL/AIR representatives through the roots of the
//! numerator cubic, and the splitting of AIL8 into the AIL4, AIL2 and AIL1
//! normal forms.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::ode::{construct_family, Family, FamilyParams, RationalODE};
use crate::poly::Poly;
use crate::ratfun::RationalFunction as RF;
use crate::scalar::Scalar;
use crate::symbol::{t, u, y, Symbol};
use crate::tower;
use crate::transform::{compose, Transform};
use crate::upoly::UPoly;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Multiplicity {
    Triple,
    DoubleSimple,
    Distinct,
}

/// Roots of the numerator cubic, ordered so that a double root comes first.
#[derive(Clone, Debug, PartialEq)]
pub struct RootProfile {
    pub roots: [RF; 3],
    pub pattern: Multiplicity,
}

impl RootProfile {
    pub fn new(mut roots: [RF; 3]) -> Self {
        let pattern = if roots[0] == roots[1] && roots[1] == roots[2] {
            Multiplicity::Triple
        } else if roots[0] == roots[1] || roots[0] == roots[2] || roots[1] == roots[2] {
            // move the double root to the front
            if roots[1] == roots[2] {
                roots.swap(0, 2);
            } else if roots[0] == roots[2] {
                roots.swap(1, 2);
            }
            Multiplicity::DoubleSimple
        } else {
            Multiplicity::Distinct
        };
        RootProfile { roots, pattern }
    }

    /// Δ10 = α1 − α0
    pub fn delta10(&self) -> RF {
        &self.roots[1] - &self.roots[0]
    }

    /// Δ20 = α2 − α0
    pub fn delta20(&self) -> RF {
        &self.roots[2] - &self.roots[0]
    }
}

/// Numerator cubic of `y' = A(y)/D(x, y)` with x-free coefficients.
fn numerator_cubic(e: &RationalODE) -> Result<Poly> {
    let num = e.rhs.num();
    if num.degree_in(y()) != 3 || num.degree_in(crate::symbol::x()) != 0 || e.rhs.has_tower() {
        return Err(Error::Shape("numerator must be a cubic in y with coefficients free of x".into()));
    }
    if e.rhs.den().degree_in(y()) > 1 {
        return Err(Error::Shape("denominator must be at most linear in y".into()));
    }
    Ok(num.clone())
}

/// Roots of the numerator cubic over Q(i).
pub fn root_profile(e: &RationalODE) -> Result<RootProfile> {
    let num = numerator_cubic(e)?;
    let cubic = UPoly::from_poly(&num, y()).ok_or_else(|| Error::Unsupported("cubic has symbolic coefficients; supply its roots".into()))?;
    let (roots, rest) = cubic.gaussian_roots();
    if rest.degree() > 0 {
        return Err(Error::Unsupported("cubic does not split over Q(i); supply its roots".into()));
    }
    let mut all = Vec::new();
    for (r, m) in roots {
        for _ in 0..m {
            all.push(RF::constant(r.clone()));
        }
    }
    let roots: [RF; 3] = all.try_into().map_err(|_| Error::Unsupported("could not determine three roots".into()))?;
    Ok(RootProfile::new(roots))
}

/// Reduces `y' = c (y − α0)(y − α1)(y − α2)/D` by moving the roots to ∞, 0 and 1.
/// Without `roots`, they are found over Q(i).
pub fn reduce_by_roots(e: &RationalODE, roots: Option<[RF; 3]>) -> Result<(RationalODE, Transform, RootProfile)> {
    let num = numerator_cubic(e)?;
    let profile = match roots {
        Some(r) => {
            let p = RootProfile::new(r);
            let lc = RF::from_poly(num.coeff_in(y(), 3));
            let yv = RF::var(y());
            let prod = p.roots.iter().fold(lc, |acc, r| &acc * &(&yv - r));
            if prod != RF::from_poly(num) {
                return Err(Error::Invalid("supplied roots do not match the numerator".into()));
            }
            p
        }
        None => root_profile(e)?,
    };
    let shift = Transform::Point { f: RF::var(t()), p: RF::one(), q: profile.roots[0].clone() };
    let uv = RF::var(u());
    let mobius = match profile.pattern {
        Multiplicity::Triple => Transform::KindShift { g1: RF::one(), g0: RF::zero() },
        Multiplicity::DoubleSimple => Transform::KindShift { g1: RF::one(), g0: profile.delta20().inv()? },
        Multiplicity::Distinct => {
            let (i10, i20) = (profile.delta10().inv()?, profile.delta20().inv()?);
            Transform::from_map(RF::var(t()), &(&(&(&i20 - &i10) * &uv) + &i10).inv()?)?
        }
    };
    let tr = compose(&[shift, mobius])?;
    Ok((tr.apply(e)?, tr, profile))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormalForm {
    Ail4,
    Ail2,
    Ail1,
    ConstantInvariant,
}

impl NormalForm {
    pub fn tag(self) -> &'static str {
        match self {
            NormalForm::Ail4 => "AIL_4",
            NormalForm::Ail2 => "AIL_2",
            NormalForm::Ail1 => "AIL_1",
            NormalForm::ConstantInvariant => "constant-invariant",
        }
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Debug)]
pub struct SplitResult {
    pub k: Option<[RF; 4]>,
    pub normal_form: NormalForm,
    pub params: BTreeMap<String, RF>,
    pub chain: Vec<Transform>,
}

impl SplitResult {
    /// The normal-form equation the chain leads to.
    pub fn target(&self) -> Result<Option<RationalODE>> {
        let fam = match self.normal_form {
            NormalForm::Ail4 => {
                let k = self.k.as_ref().expect("AIL_4 result carries k");
                let p = ["k0", "k1", "k2", "k3"].iter().zip(k.iter()).map(|(n, v)| (n.to_string(), v.clone())).collect();
                return construct_family(Family::Ail4, &p).map(Some);
            }
            NormalForm::Ail2 => Family::Ail2,
            NormalForm::Ail1 => Family::Ail1,
            NormalForm::ConstantInvariant => return Ok(None),
        };
        let p: FamilyParams = self.params.iter().filter(|(k, _)| fam.params().contains(&k.as_str())).map(|(k, v)| (k.clone(), v.clone())).collect();
        construct_family(fam, &p).map(Some)
    }

    pub fn transform(&self) -> Result<Transform> {
        if self.chain.is_empty() {
            return Ok(Transform::identity());
        }
        compose(&self.chain)
    }

    pub fn to_json(&self) -> Value {
        let k = match &self.k {
            Some(k) => Value::Array(k.iter().map(|v| Value::String(v.to_string())).collect()),
            None => Value::Null,
        };
        let params: Map<String, Value> = self.params.iter().map(|(k, v)| (k.clone(), Value::String(v.to_string()))).collect();
        let chain: Vec<Value> = self.chain.iter().map(Transform::to_json).collect();
        json!({"k": k, "normal_form": self.normal_form.tag(), "params": params, "chain": chain})
    }
}

fn param(p: &FamilyParams, n: &str) -> RF {
    p.get(n).cloned().unwrap_or_else(|| RF::var(Symbol::named(n)))
}

fn c(n: i64) -> Scalar {
    Scalar::from_int(n)
}

/// Splits an AIL8 member into AIL4 with parameters k0..k3.
pub fn ail_split(p: &FamilyParams) -> Result<SplitResult> {
    construct_family(Family::Ail8, p)?;
    let g = |n: &str| param(p, n);
    let (s1, s0, r1, r0) = (g("s1"), g("s0"), g("r1"), g("r0"));
    let (a3, a2, a1, a0) = (g("a3"), g("a2"), g("a1"), g("a0"));
    if s1.is_zero() && s0.is_zero() {
        return Err(Error::Degenerate("denominator independent of y".into()));
    }
    if s1.is_zero() && r1.is_zero() {
        return Err(Error::Degenerate("s1 = 0 and r1 = 0".into()));
    }
    let omega = &(&r1 * &s0) - &(&r0 * &s1);
    if omega.is_zero() {
        return Ok(SplitResult { k: None, normal_form: NormalForm::ConstantInvariant, params: BTreeMap::new(), chain: vec![] });
    }
    let (k, tr) = if s1.is_zero() {
        // x = t/r1, y = (u − r0)/s0
        let tr = Transform::Point { f: RF::var(t()).checked_div(&r1)?, p: s0.inv()?, q: -(r0.checked_div(&s0)?) };
        let yy = &(&RF::var(y()) - &r0) / &s0;
        let a = [a0, a1, a2, a3].iter().rev().fold(RF::zero(), |acc, ai| &(&acc * &yy) + ai);
        let kp = -(&(&s0 / &r1) * &a);
        let coeffs = kp.num().coeffs_in(y());
        let den = RF::from_poly(kp.den().clone());
        let get = |i| coeffs.get(&i).map(|q| &RF::from_poly(q.clone()) / &den).unwrap_or_else(RF::zero);
        ([get(0), get(1), get(2), get(3)], tr)
    } else {
        let uv = RF::var(u());
        let s1sq = s1.pow(2);
        let f = -(&RF::var(t()) / &s1sq);
        let yv = -(&(&(&r0 * &s1sq) + &(&r1 * &uv)) / &(&(&(&s1 * &s0) + &uv) * &s1));
        let tr = Transform::from_map(f, &yv)?;
        let w2 = omega.pow(2);
        let k0 = &(&(&(&(&(&a2 * &r0.pow(2)) + &(&(&(&s0 * &a0) - &(&a1 * &r0)) * &s0)) * &s0) - &(&a3 * &r0.pow(3))) * &s1sq) / &w2;
        let k1 = &(&(&(&(&a2 * &s1) - &(&a3 * &r1).scale(&c(3))) * &r0.pow(2))
            + &(&(&(&(&(&r1 * &a2).scale(&c(2)) - &(&a1 * &s1).scale(&c(2))) * &r0)
                + &(&(&(&a0 * &s1).scale(&c(3)) - &(&a1 * &r1)) * &s0))
                * &s0))
            / &w2;
        let k2 = &(&(&(&(&(&(&a2 * &s1).scale(&c(2)) - &(&a3 * &r1).scale(&c(3))) * &r1) - &(&a1 * &s1sq)) * &r0)
            + &(&(&(&s1sq * &a0).scale(&c(3)) + &(&(&(&r1 * &a2) - &(&a1 * &s1).scale(&c(2))) * &r1)) * &s0))
            / &(&s1sq * &w2);
        let k3 = &(&(&a0 * &s1.pow(3)) + &(&(&(&(&(&a2 * &s1) - &(&a3 * &r1)) * &r1) - &(&a1 * &s1sq)) * &r1))
            / &(&s1.pow(4) * &w2);
        ([k0, k1, k2, k3], tr)
    };
    Ok(SplitResult { k: Some(k), normal_form: NormalForm::Ail4, params: BTreeMap::new(), chain: vec![tr] })
}

/// Square root of `v`: exact when `v` is a square in Q(i), otherwise a radical.
fn sqrt_param(v: &RF, strict: bool) -> Result<RF> {
    if let Some(c) = v.constant_value() {
        if let Some(r) = c.sqrt_exact() {
            return Ok(RF::constant(r));
        }
    }
    if strict {
        return Err(Error::Unsupported(format!("sqrt({v}) is not in the coefficient field")));
    }
    tower::root(v, 2)
}

/// Brings AIL4 with parameters `k = [k0, k1, k2, k3]` to AIL2 or AIL1.
pub fn ail_branch(k: &[RF; 4], strict: bool) -> Result<SplitResult> {
    let [k0, k1, k2, k3] = k;
    if k.iter().all(RF::is_zero) {
        return Err(Error::Degenerate("all k vanish".into()));
    }
    let tv = RF::var(t());
    let uv = RF::var(u());
    let mut params = BTreeMap::new();
    let (form, tr) = if !k3.is_zero() {
        let k4 = sqrt_param(&-k3.clone(), strict)?;
        let k4sq = k4.pow(2);
        let shift = &(k2 + &(&tv * &k4).scale(&c(3))) / &k4sq.scale(&c(3));
        let f = -shift.clone();
        let yv = &shift - &(&k4 * &uv).inv()?;
        let alpha = k1 + &(&k2.pow(2) / &k4sq.scale(&c(3)));
        let beta = -(&(&(k0 * &k4) + &(&(k1 * k2) / &k4.scale(&c(3)))) + &(&k2.pow(3).scale(&c(2)) / &k4.pow(3).scale(&c(27))));
        let gamma = -(&beta / &k4);
        params.insert("alpha".to_string(), alpha);
        params.insert("beta".to_string(), beta);
        params.insert("gamma".to_string(), gamma);
        params.insert("k4".to_string(), k4);
        (NormalForm::Ail2, Transform::from_map(f, &yv)?)
    } else if !k2.is_zero() {
        let two_k2 = k2.scale(&c(2));
        let f = &(k1 - &tv.scale(&c(2))) / &two_k2;
        let yv = &(&(&tv.scale(&c(2)) - k1) / &two_k2) - &(k2 * &uv).inv()?;
        params.insert("alpha".to_string(), &(k2 * k0) - &k1.pow(2).scale(&Scalar::from_ratio(1, 4)));
        (NormalForm::Ail1, Transform::from_map(f, &yv)?)
    } else {
        return Ok(SplitResult { k: Some(k.clone()), normal_form: NormalForm::ConstantInvariant, params, chain: vec![] });
    };
    Ok(SplitResult { k: Some(k.clone()), normal_form: form, params, chain: vec![tr] })
}

/// The whole pipeline: AIL8 → AIL4 → AIL2 or AIL1.
pub fn split_to_normal_form(p: &FamilyParams, strict: bool) -> Result<SplitResult> {
    let first = ail_split(p)?;
    let Some(k) = first.k.clone() else { return Ok(first) };
    if k.iter().all(RF::is_zero) {
        return Ok(first);
    }
    let mut second = ail_branch(&k, strict)?;
    let mut chain = first.chain;
    chain.append(&mut second.chain);
    second.chain = chain;
    Ok(second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::shape_classify;

    fn ints(pairs: &[(&str, i64)]) -> FamilyParams {
        pairs.iter().map(|(k, v)| (k.to_string(), RF::from_int(*v))).collect()
    }

    #[test]
    fn three_root_cases() {
        let e = RationalODE::parse("y' = y^3/(x*y + 1)").unwrap();
        let (r, _, p) = reduce_by_roots(&e, None).unwrap();
        assert_eq!(p.pattern, Multiplicity::Triple);
        assert_eq!(r, RationalODE::parse("y' = -1/(y + x)").unwrap());

        let e = RationalODE::parse("y' = y^2*(y - 1)/(x*y + 1)").unwrap();
        let (r, _, p) = reduce_by_roots(&e, None).unwrap();
        assert_eq!(p.pattern, Multiplicity::DoubleSimple);
        assert_eq!(r.rhs.num().degree_in(y()), 1);
        assert!(r.rhs.num().div_exact(&Poly::var(y())).is_some());

        let e = RationalODE::parse("y' = y*(y - 1)*(y - 2)/(x*y + 1)").unwrap();
        let (r, _, p) = reduce_by_roots(&e, None).unwrap();
        assert_eq!(p.pattern, Multiplicity::Distinct);
        let yy = Poly::var(y());
        let target = &yy * &(&yy - &Poly::one());
        assert!(r.rhs.num().degree_in(y()) == 2 && r.rhs.num().div_exact(&target).is_some(), "{r}");
        assert_eq!(r.rhs.den().degree_in(crate::symbol::x()), 1);
    }

    #[test]
    fn supplied_symbolic_roots() {
        let e = RationalODE::parse("y' = (y - a)^2*(y - b)/((x^2 + 1)*y + x)").unwrap();
        let a = RF::var(Symbol::named("a"));
        let b = RF::var(Symbol::named("b"));
        let (r, _, p) = reduce_by_roots(&e, Some([b, a.clone(), a])).unwrap();
        assert_eq!(p.pattern, Multiplicity::DoubleSimple);
        assert_eq!(r.rhs.num().degree_in(y()), 1);
        assert_eq!(r.rhs.den().degree_in(crate::symbol::x()), 2);
    }

    #[test]
    fn pinned_split_regression() {
        let p = ints(&[("s1", 1), ("s0", 0), ("r1", 0), ("r0", 1)]);
        let r = ail_split(&p).unwrap();
        let k = r.k.clone().unwrap();
        let a = |n: &str| RF::var(Symbol::named(n));
        assert_eq!(k, [-a("a3"), a("a2"), -a("a1"), a("a0")]);
        let e = construct_family(Family::Ail8, &p).unwrap();
        assert_eq!(r.transform().unwrap().apply(&e).unwrap(), r.target().unwrap().unwrap());
    }

    #[test]
    fn split_reproduces_ail4_and_fallback() {
        for p in [
            ints(&[("s1", 2), ("s0", -1), ("r1", 3), ("r0", 5), ("a3", 1), ("a2", -2), ("a1", 4), ("a0", 7)]),
            ints(&[("s1", 0), ("s0", 3), ("r1", 2), ("r0", -1), ("a3", 2), ("a2", 1), ("a1", 0), ("a0", -3)]),
        ] {
            let r = ail_split(&p).unwrap();
            let e = construct_family(Family::Ail8, &p).unwrap();
            assert_eq!(r.transform().unwrap().apply(&e).unwrap(), r.target().unwrap().unwrap());
        }
        let w0 = ints(&[("s1", 1), ("s0", 1), ("r1", 1), ("r0", 1)]);
        assert_eq!(ail_split(&w0).unwrap().normal_form, NormalForm::ConstantInvariant);
        let zero = ints(&[("s1", 1), ("s0", 2), ("r1", 1), ("r0", 1), ("a3", 0), ("a2", 0), ("a1", 0), ("a0", 0)]);
        assert!(ail_split(&zero).unwrap().k.unwrap().iter().all(RF::is_zero));
        assert!(ail_split(&ints(&[("s1", 0), ("s0", 2), ("r1", 0)])).is_err());
    }

    #[test]
    fn branches() {
        let k = [RF::zero(), RF::zero(), RF::one(), RF::zero()];
        let r = ail_branch(&k, true).unwrap();
        assert_eq!(r.normal_form, NormalForm::Ail1);
        assert!(r.params["alpha"].is_zero());
        let ail4 = construct_family(Family::Ail4, &ints(&[("k0", 0), ("k1", 0), ("k2", 1), ("k3", 0)])).unwrap();
        assert_eq!(r.transform().unwrap().apply(&ail4).unwrap(), r.target().unwrap().unwrap());

        for (k3, k2, k1, k0) in [(-1, 0, 2, 3), (-4, 3, -1, 2), (2, 1, 1, 1)] {
            let k = [RF::from_int(k0), RF::from_int(k1), RF::from_int(k2), RF::from_int(k3)];
            let r = ail_branch(&k, false).unwrap();
            assert_eq!(r.normal_form, NormalForm::Ail2);
            let ail4 = construct_family(Family::Ail4, &ints(&[("k0", k0), ("k1", k1), ("k2", k2), ("k3", k3)])).unwrap();
            let img = r.transform().unwrap().apply(&ail4).unwrap();
            assert_eq!(img, r.target().unwrap().unwrap(), "k3 = {k3}");
            assert!(shape_classify(&img).has(crate::ode::Shape::AbelFirstKind));
        }
        assert!(ail_branch(&[RF::one(), RF::zero(), RF::zero(), RF::from_int(2)], true).is_err());
        let k = [RF::one(), RF::one(), RF::zero(), RF::zero()];
        assert_eq!(ail_branch(&k, true).unwrap().normal_form, NormalForm::ConstantInvariant);
    }
}
