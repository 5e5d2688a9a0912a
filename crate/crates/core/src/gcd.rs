//! Multivariate polynomial gcd over Q(i).
//!
//! Cheap structural reductions first (monomial content, variables present in
//! only one argument), then a modular-image degree test per variable, and a
//! subresultant PRS in the variable of least degree as the last resort.

use std::collections::{BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::poly::Poly;
use crate::scalar::Scalar;
use crate::symbol::Symbol;
use crate::upoly::UPoly;

/// Greatest common divisor with leading coefficient 1 (zero only if both are zero).
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.make_monic().1;
    }
    if b.is_zero() {
        return a.make_monic().1;
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let m = ma.gcd(&mb);
    let a1 = if ma.is_one() { a.clone() } else { a.div_monomial(&ma).expect("content divides") };
    let b1 = if mb.is_one() { b.clone() } else { b.div_monomial(&mb).expect("content divides") };
    let g = gcd_core(&a1, &b1);
    let g = if m.is_one() { g } else { g.mul_monomial(&m) };
    g.make_monic().1
}

/// gcd of a list, stopping early at 1.
pub fn gcd_many<'a>(items: impl IntoIterator<Item = &'a Poly>) -> Poly {
    let mut g = Poly::zero();
    for p in items {
        g = gcd(&g, p);
        if g.is_one() {
            break;
        }
    }
    g
}

fn gcd_core(a: &Poly, b: &Poly) -> Poly {
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a == b {
        return a.clone();
    }
    let sa = a.symbols();
    let sb = b.symbols();
    if let Some(&v) = sa.difference(&sb).next() {
        return fold_coeffs(b, a, v);
    }
    if let Some(&v) = sb.difference(&sa).next() {
        return fold_coeffs(a, b, v);
    }
    if sa.len() == 1 {
        let v = *sa.iter().next().unwrap();
        let ua = UPoly::from_poly(a, v).expect("univariate");
        let ub = UPoly::from_poly(b, v).expect("univariate");
        return ua.gcd(&ub).to_poly(v);
    }
    // cheap divisibility checks for the common "one divides the other" case
    if b.len() <= a.len() {
        if a.div_exact(b).is_some() {
            return b.clone();
        }
    } else if b.div_exact(a).is_some() {
        return a.clone();
    }
    let vars: Vec<Symbol> = sa.iter().copied().collect();
    let mut best: Option<(Symbol, u32)> = None;
    for &v in &vars {
        match image_gcd_degree(a, b, v, &vars) {
            Some(0) => {
                // the gcd does not involve v
                let ca = a.coeffs_in(v);
                let cb = b.coeffs_in(v);
                return gcd_many(ca.values().chain(cb.values()));
            }
            _ => {
                let d = a.degree_in(v).min(b.degree_in(v));
                if best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((v, d));
                }
            }
        }
    }
    let (v, _) = best.expect("shared variable");
    prs_gcd(a, b, v)
}

/// gcd(b, a) where `a` involves `v` and `b` does not.
fn fold_coeffs(b: &Poly, a: &Poly, v: Symbol) -> Poly {
    let mut g = b.clone();
    for c in a.coeffs_in(v).values() {
        g = gcd(&g, c);
        if g.is_one() {
            break;
        }
    }
    g
}

/// Degree in `v` of the gcd of random integer images; an upper bound for the true degree.
fn image_gcd_degree(a: &Poly, b: &Poly, v: Symbol, vars: &[Symbol]) -> Option<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ v.index() as u64);
    let la = a.coeff_in(v, a.degree_in(v));
    let lb = b.coeff_in(v, b.degree_in(v));
    for _ in 0..6 {
        let vals: HashMap<Symbol, Scalar> =
            vars.iter().filter(|&&s| s != v).map(|&s| (s, Scalar::from_int(rng.gen_range(2..200)))).collect();
        let ea = la.eval_scalars(&vals);
        let eb = lb.eval_scalars(&vals);
        if ea.is_zero() || eb.is_zero() {
            continue;
        }
        let ia = UPoly::from_poly(&a.eval_scalars(&vals), v)?;
        let ib = UPoly::from_poly(&b.eval_scalars(&vals), v)?;
        return Some(ia.gcd(&ib).degree() as u32);
    }
    None
}

fn to_dense(p: &Poly, v: Symbol) -> Vec<Poly> {
    let cs = p.coeffs_in(v);
    let n = cs.keys().next_back().copied().unwrap_or(0) as usize;
    let mut out = vec![Poly::zero(); n + 1];
    for (e, c) in cs {
        out[e as usize] = c;
    }
    out
}

fn from_dense(c: &[Poly], v: Symbol) -> Poly {
    let map = c.iter().enumerate().filter(|(_, p)| !p.is_zero()).map(|(i, p)| (i as u32, p.clone())).collect();
    Poly::from_coeffs_in(v, &map)
}

fn trim(c: &mut Vec<Poly>) {
    while c.len() > 1 && c.last().is_some_and(Poly::is_zero) {
        c.pop();
    }
}

fn dense_content(c: &[Poly]) -> Poly {
    let mut g = Poly::zero();
    for p in c {
        g = gcd(&g, p);
        if g.is_one() {
            break;
        }
    }
    g
}

/// Pseudo-remainder of `a` by `b` in dense form.
fn prem(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r = a.to_vec();
    let mut delta = (a.len() as i64) - (b.len() as i64) + 1;
    while r.len() > db && !(r.len() == 1 && r[0].is_zero()) {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - db;
        for x in r.iter_mut() {
            *x = &*x * lb;
        }
        for (j, bc) in b.iter().enumerate() {
            r[j + shift] = &r[j + shift] - &(&lr * bc);
        }
        r.pop();
        trim(&mut r);
        delta -= 1;
        if r.iter().all(Poly::is_zero) {
            return vec![Poly::zero()];
        }
    }
    if delta > 0 {
        let f = lb.pow(delta as u32);
        for x in r.iter_mut() {
            *x = &*x * &f;
        }
    }
    r
}

fn prs_gcd(a: &Poly, b: &Poly, v: Symbol) -> Poly {
    let mut da = to_dense(a, v);
    let mut db = to_dense(b, v);
    let ca = dense_content(&da);
    let cb = dense_content(&db);
    let cg = gcd(&ca, &cb);
    for x in da.iter_mut() {
        *x = x.div_exact(&ca).expect("content");
    }
    for x in db.iter_mut() {
        *x = x.div_exact(&cb).expect("content");
    }
    if da.len() < db.len() {
        std::mem::swap(&mut da, &mut db);
    }
    let mut g = Poly::one();
    let mut h = Poly::one();
    loop {
        if db.len() == 1 {
            if db[0].is_zero() {
                break;
            }
            // constant remainder in v: primitive parts are coprime
            return cg;
        }
        let delta = (da.len() - db.len()) as u32;
        let r = prem(&da, &db);
        if r.len() == 1 && r[0].is_zero() {
            da = db;
            break;
        }
        let divisor = &g * &h.pow(delta);
        let r: Vec<Poly> = r.iter().map(|c| c.div_exact(&divisor).expect("subresultant division")).collect();
        da = db;
        db = r;
        g = da.last().unwrap().clone();
        h = if delta == 0 {
            h
        } else {
            let num = g.pow(delta);
            let den = h.pow(delta - 1);
            num.div_exact(&den).expect("subresultant h")
        };
    }
    let c = dense_content(&da);
    let pp: Vec<Poly> = da.iter().map(|x| x.div_exact(&c).expect("content")).collect();
    &from_dense(&pp, v) * &cg
}

/// Square-free decomposition `p = c * prod f_i^e_i` with every `f_i` of leading coefficient 1.
///
/// Single-symbol factors come from the monomial content; the others are
/// pairwise coprime and square-free but not necessarily irreducible.
pub fn squarefree(p: &Poly) -> (Scalar, Vec<(Poly, u32)>) {
    let mut out = Vec::new();
    if p.is_zero() {
        return (Scalar::zero(), out);
    }
    let lc = p.lc();
    let m = p.monomial_content();
    for &(s, e) in m.iter() {
        out.push((Poly::var(s), e));
    }
    let q = if m.is_one() { p.make_monic().1 } else { p.div_monomial(&m).expect("content").make_monic().1 };
    sqf_rec(&q, &mut out);
    (lc, out)
}

fn sqf_rec(q: &Poly, out: &mut Vec<(Poly, u32)>) {
    if q.is_constant() {
        return;
    }
    let v = *q.symbols().iter().next().expect("non-constant");
    let content = gcd_many(q.coeffs_in(v).values());
    let pp = if content.is_one() { q.clone() } else { q.div_exact(&content).expect("content") };
    let d = pp.derivative(v);
    let a = gcd(&pp, &d);
    let mut b = pp.div_exact(&a).expect("yun");
    let mut c = d.div_exact(&a).expect("yun");
    let mut dd = &c - &b.derivative(v);
    let mut i = 1;
    loop {
        let g = gcd(&b, &dd);
        if !g.is_constant() {
            out.push((g.clone(), i));
        }
        b = b.div_exact(&g).expect("yun");
        if b.is_constant() {
            break;
        }
        c = dd.div_exact(&g).expect("yun");
        dd = &c - &b.derivative(v);
        i += 1;
    }
    sqf_rec(&content.make_monic().1, out);
}

/// Symbols present in either argument.
pub fn joint_symbols(a: &Poly, b: &Poly) -> BTreeSet<Symbol> {
    let mut s = a.symbols();
    s.extend(b.symbols());
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Monomial;

    fn sym(n: &str) -> Poly {
        Poly::var(Symbol::named(n))
    }

    #[test]
    fn common_factor_is_found() {
        let (x, y, a) = (sym("x"), sym("y"), sym("a"));
        let f = &(&x * &y) + &a; // xy + a
        let g1 = &(&x + &y) + &Poly::from_int(1);
        let g2 = &(&a * &a) - &y;
        let p = &f * &g1;
        let q = &f * &g2;
        assert_eq!(gcd(&p, &q), f.make_monic().1);
    }

    #[test]
    fn coprime_and_monomial_content() {
        let (x, y) = (sym("x"), sym("y"));
        let p = &(&x * &x) * &(&y + &Poly::from_int(2));
        let q = &(&x * &y) * &(&x + &y);
        assert_eq!(gcd(&p, &q), x);
        let r = &x + &y;
        let s = &x - &y;
        assert!(gcd(&r, &s).is_one());
    }

    #[test]
    fn prs_path_on_shared_factor() {
        let (x, y, b) = (sym("x"), sym("y"), sym("b"));
        let f = &(&(&x * &x) + &(&y * &b)) + &Poly::from_int(3);
        let g1 = &(&(&x * &y) - &b) + &x;
        let g2 = &(&y * &y) + &(&x * &b);
        let p = &(&f * &f) * &g1;
        let q = &f * &g2;
        let g = gcd(&p, &q);
        assert_eq!(g, f.make_monic().1);
        let m = Monomial::var(Symbol::named("x"), 2);
        assert!(m.degree() == 2);
    }

    #[test]
    fn squarefree_multivariate() {
        let (x, y) = (sym("x"), sym("y"));
        let f = &(&x * &y) + &Poly::from_int(1);
        let g = &x + &y;
        let p = (&(&f.pow(2) * &g) * &y).scale(&Scalar::from_int(-3));
        let (c, fs) = squarefree(&p);
        assert_eq!(c, Scalar::from_int(-3));
        let mut back = Poly::constant(c);
        for (q, e) in &fs {
            back = &back * &q.pow(*e);
        }
        assert_eq!(back, p);
        assert!(fs.contains(&(f.clone(), 2)));
    }
}
