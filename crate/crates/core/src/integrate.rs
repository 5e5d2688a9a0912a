//! Antiderivatives: rational functions over Q(i) by Hermite reduction and
//! partial fractions, polynomial-times-exponential integrands by solving the
//! Risch equation in polynomials, and formal integrals for everything else.

use std::collections::BTreeMap;

use num_traits::Signed;

use crate::error::Result;
use crate::poly::{Monomial, Poly};
use crate::ratfun::RationalFunction as RF;
use crate::scalar::Scalar;
use crate::symbol::{Symbol, TowerDef};
use crate::tower;
use crate::upoly::UPoly;

/// An antiderivative together with whether it is free of formal integrals.
#[derive(Clone, Debug)]
pub struct Antiderivative {
    pub value: RF,
    pub closed: bool,
}

/// Antiderivative of `f` with respect to `v`, up to an additive constant.
pub fn integrate(f: &RF, v: Symbol) -> Result<Antiderivative> {
    if !f.depends_on(v) {
        return Ok(Antiderivative { value: f * &RF::var(v), closed: true });
    }
    let towers: Vec<Symbol> = f.symbols().into_iter().filter(|s| s.is_tower() && s.depends_on(v)).collect();
    if towers.is_empty() {
        if f.is_polynomial() {
            return Ok(Antiderivative { value: tower::antiderivative(f, v)?, closed: true });
        }
        if f.symbols().iter().all(|&s| s == v) {
            return rational(f, v);
        }
    } else if let Some(r) = poly_exp(f, v, &towers)? {
        return Ok(Antiderivative { value: r, closed: true });
    }
    Ok(Antiderivative { value: tower::antiderivative(f, v)?, closed: false })
}

fn urf(p: &UPoly, v: Symbol) -> RF {
    RF::from_poly(p.to_poly(v))
}

fn upoly_of(f: &Poly, v: Symbol) -> UPoly {
    UPoly::from_poly(f, v).expect("univariate polynomial")
}

/// Solves s*a + t*b = c with deg s < deg b, for coprime a, b.
fn solve_bezout(a: &UPoly, b: &UPoly, c: &UPoly) -> (UPoly, UPoly) {
    let (_, s0, _) = a.ext_gcd(b);
    let s = (&s0 * c).div_rem(b).1;
    let t = (c - &(&s * a)).div_rem(b).0;
    (s, t)
}

fn rational(f: &RF, v: Symbol) -> Result<Antiderivative> {
    let n = upoly_of(f.num(), v);
    let d = upoly_of(f.den(), v);
    let (q, r) = n.div_rem(&d);
    let mut value = tower::antiderivative(&urf(&q, v), v)?;
    let mut closed = true;
    if r.is_zero() {
        return Ok(Antiderivative { value, closed });
    }

    // Hermite reduction
    let lc = d.lc();
    let mut a = r.scale(&lc.inv());
    let mut dd = d.monic();
    let parts = dd.squarefree();
    for (vi, i) in parts.iter().filter(|(_, i)| *i >= 2) {
        let u = dd.div_rem(&vi.pow(*i)).0;
        let dv = vi.derivative();
        for j in (1..*i).rev() {
            let rhs = a.scale(&Scalar::from_ratio(-1, j as i64));
            let (b, c) = solve_bezout(&(&u * &dv), vi, &rhs);
            value = &value + &(&urf(&b, v) / &urf(&vi.pow(j), v));
            a = &c.scale(&Scalar::from_int(-(j as i64))) - &(&u * &b.derivative());
        }
        dd = &u * vi;
    }
    if a.is_zero() {
        return Ok(Antiderivative { value, closed });
    }

    // squarefree remainder a/dd: split into factors over Q(i)
    let real = dd.is_real() && a.is_real();
    let (roots, rest) = dd.gaussian_roots();
    let mut factors: Vec<UPoly> = Vec::new();
    let mut used = vec![false; roots.len()];
    for (k, (rho, _)) in roots.iter().enumerate() {
        if used[k] {
            continue;
        }
        used[k] = true;
        if real && !rho.is_real() {
            let conj = rho.conj();
            if let Some(j) = roots.iter().enumerate().position(|(j, (r, _))| !used[j] && *r == conj) {
                used[j] = true;
                factors.push(&UPoly::linear_root(rho) * &UPoly::linear_root(&conj));
                continue;
            }
        }
        factors.push(UPoly::linear_root(rho));
    }
    if rest.degree() > 0 {
        factors.push(rest);
    }
    for fac in &factors {
        let cof = dd.div_rem(fac).0;
        let (_, s, _) = cof.ext_gcd(fac);
        let part = (&a * &s).div_rem(fac).1;
        if part.is_zero() {
            continue;
        }
        match fac.degree() {
            1 => {
                let c = part.coeff(0);
                value = &value + &tower::log(&urf(fac, v))?.scale(&c);
            }
            2 if real => value = &value + &quadratic(&part, fac, v)?,
            _ => {
                value = &value + &tower::antiderivative(&(&urf(&part, v) / &urf(fac, v)), v)?;
                closed = false;
            }
        }
    }
    Ok(Antiderivative { value, closed })
}

/// Integral of (b*y + c)/(y^2 + p*y + q) over the reals.
fn quadratic(num: &UPoly, q: &UPoly, v: Symbol) -> Result<RF> {
    let b = num.coeff(1);
    let c = num.coeff(0);
    let p = q.coeff(1);
    let half = Scalar::from_ratio(1, 2);
    let mut out = tower::log(&urf(q, v))?.scale(&(&b * &half));
    // remaining constant numerator
    let k = &c - &(&(&b * &p) * &half);
    if k.is_zero() {
        return Ok(out);
    }
    // y^2 + p y + q = (y + p/2)^2 + disc/4
    let disc = &(&Scalar::from_int(4) * &q.coeff(0)) - &(&p * &p);
    let shift = &RF::var(v) + &RF::constant(&p * &half);
    let two_shift = shift.scale(&Scalar::from_int(2));
    let sq = tower::root(&RF::constant(disc.clone()), 2)?;
    if disc.re.is_positive() {
        // 2/sqrt(disc) * atan((2y + p)/sqrt(disc))
        let arg = &two_shift / &sq;
        out = &out + &(&tower::atan(&arg) * &(&RF::constant(&k * &Scalar::from_int(2)) / &sq));
    } else {
        // 1/sqrt(-disc) * log((2y + p - s)/(2y + p + s)), s = sqrt(-disc)
        let s = tower::root(&RF::constant(-&disc), 2)?;
        let ratio = &(&two_shift - &s) / &(&two_shift + &s);
        out = &out + &(&tower::log(&ratio)? * &(&RF::constant(k) / &s));
    }
    Ok(out)
}

/// Integrand that is a sum of polynomial(v) * exp(polynomial(v)) terms.
fn poly_exp(f: &RF, v: Symbol, towers: &[Symbol]) -> Result<Option<RF>> {
    let mut exps = BTreeMap::new();
    for &s in towers {
        match s.tower_def().as_deref() {
            Some(TowerDef::Exp(a)) if a.is_polynomial() && a.symbols().iter().all(|t| !t.is_tower()) => {
                exps.insert(s, a.clone());
            }
            _ => return Ok(None),
        }
    }
    // denominator: exponential monomial times a factor free of v
    let content = f.den().monomial_content();
    let den_exp: Vec<(Symbol, u32)> = content.iter().filter(|p| exps.contains_key(&p.0)).copied().collect();
    let den_rest = f.den().div_monomial(&Monomial::from_pairs(den_exp.clone())).expect("monomial content");
    if den_rest.symbols().iter().any(|s| *s == v || exps.contains_key(s)) {
        return Ok(None);
    }
    let den = RF::from_poly(den_rest);
    // group numerator terms by their net exponential exponents
    let mut groups: BTreeMap<Vec<(Symbol, i64)>, Vec<(Monomial, Scalar)>> = BTreeMap::new();
    for (m, c) in f.num().terms() {
        let mut net: BTreeMap<Symbol, i64> = den_exp.iter().map(|&(s, k)| (s, -(k as i64))).collect();
        let mut rest = Vec::new();
        for &(s, k) in m.iter() {
            if exps.contains_key(&s) {
                *net.entry(s).or_default() += k as i64;
            } else {
                rest.push((s, k));
            }
        }
        let key = net.into_iter().filter(|p| p.1 != 0).collect();
        groups.entry(key).or_default().push((Monomial::from_pairs(rest), c.clone()));
    }
    let mut acc = RF::zero();
    for (key, terms) in groups {
        let coeff = Poly::from_terms(terms);
        let mut exponent = RF::zero();
        let mut theta = RF::one();
        for &(s, k) in &key {
            exponent = &exponent + &exps[&s].scale(&Scalar::from_int(k));
            theta = &theta * &RF::var(s).powi(k)?;
        }
        if exponent.is_zero() {
            acc = &acc + &tower::antiderivative(&RF::from_poly(coeff), v)?;
            continue;
        }
        let Some(r) = risch_poly(&coeff, &tower::diff(&exponent, v), v) else { return Ok(None) };
        acc = &acc + &(&r * &theta);
    }
    Ok(Some(&acc / &den))
}

/// Polynomial R in v with R' + w R = p, where w is a nonzero polynomial in v.
fn risch_poly(p: &Poly, w: &RF, v: Symbol) -> Option<RF> {
    if !w.is_polynomial() || w.is_zero() {
        return None;
    }
    let wc = w.num().coeffs_in(v);
    let wdeg = *wc.keys().next_back()?;
    let wlc = RF::from_poly(wc[&wdeg].clone());
    let mut rem = RF::from_poly(p.clone());
    let mut r = RF::zero();
    let vv = RF::var(v);
    for _ in 0..=p.degree_in(v) + 1 {
        if rem.is_zero() {
            return Some(r);
        }
        let rd = rem.num().degree_in(v);
        if rd < wdeg {
            return None;
        }
        let top = RF::from_poly(rem.num().coeff_in(v, rd)) / RF::from_poly(rem.den().clone());
        let term = &(&top / &wlc) * &vv.pow(rd - wdeg);
        rem = &rem - &(&tower::diff(&term, v) + &(w * &term));
        r = &r + &term;
    }
    rem.is_zero().then_some(r)
}
