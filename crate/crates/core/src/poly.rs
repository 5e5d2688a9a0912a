//! Sparse multivariate polynomials over Q(i).
//!
//! Terms are kept sorted in descending graded-lexicographic order; symbols
//! with a smaller registry index are more significant in the lex tie-break.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::{Add, Mul, Neg, Sub};

use smallvec::SmallVec;

use crate::scalar::Scalar;
use crate::symbol::Symbol;

/// A power product; entries sorted by symbol with positive exponents.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct Monomial(SmallVec<[(Symbol, u32); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(s: Symbol, e: u32) -> Self {
        let mut v = SmallVec::new();
        if e > 0 {
            v.push((s, e));
        }
        Monomial(v)
    }

    pub fn from_pairs(mut pairs: Vec<(Symbol, u32)>) -> Self {
        pairs.retain(|p| p.1 > 0);
        pairs.sort_by_key(|p| p.0);
        let mut out: SmallVec<[(Symbol, u32); 4]> = SmallVec::new();
        for (s, e) in pairs {
            match out.last_mut() {
                Some(last) if last.0 == s => last.1 += e,
                _ => out.push((s, e)),
            }
        }
        Monomial(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|p| p.1).sum()
    }

    pub fn degree_in(&self, s: Symbol) -> u32 {
        self.0.iter().find(|p| p.0 == s).map_or(0, |p| p.1)
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Symbol, u32)> {
        self.0.iter()
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &o.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// `self / o` when `o` divides `self`.
    pub fn div(&self, o: &Monomial) -> Option<Monomial> {
        let mut out = SmallVec::with_capacity(self.0.len());
        let mut j = 0;
        for &(s, e) in &self.0 {
            if j < o.0.len() && o.0[j].0 < s {
                return None;
            }
            if j < o.0.len() && o.0[j].0 == s {
                let f = o.0[j].1;
                j += 1;
                match e.cmp(&f) {
                    Ordering::Less => return None,
                    Ordering::Equal => {}
                    Ordering::Greater => out.push((s, e - f)),
                }
            } else {
                out.push((s, e));
            }
        }
        if j < o.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Componentwise minimum.
    pub fn gcd(&self, o: &Monomial) -> Monomial {
        let mut out = SmallVec::new();
        for &(s, e) in &self.0 {
            let f = o.degree_in(s);
            if f > 0 {
                out.push((s, e.min(f)));
            }
        }
        Monomial(out)
    }

    pub fn pow(&self, n: u32) -> Monomial {
        if n == 0 {
            return Monomial::one();
        }
        Monomial(self.0.iter().map(|&(s, e)| (s, e * n)).collect())
    }

    /// Splits off the exponent of `s`.
    pub fn split(&self, s: Symbol) -> (u32, Monomial) {
        let mut e = 0;
        let rest = self
            .0
            .iter()
            .filter(|p| {
                if p.0 == s {
                    e = p.1;
                    false
                } else {
                    true
                }
            })
            .copied()
            .collect();
        (e, Monomial(rest))
    }
}

impl Ord for Monomial {
    fn cmp(&self, o: &Self) -> Ordering {
        let d = self.degree().cmp(&o.degree());
        if d != Ordering::Equal {
            return d;
        }
        let (a, b) = (&self.0, &o.0);
        let n = a.len().min(b.len());
        for k in 0..n {
            if a[k].0 != b[k].0 {
                // the monomial containing the more significant symbol wins
                return if a[k].0 < b[k].0 { Ordering::Greater } else { Ordering::Less };
            }
            if a[k].1 != b[k].1 {
                return a[k].1.cmp(&b[k].1);
            }
        }
        a.len().cmp(&b.len())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Polynomial with Gaussian-rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct Poly {
    terms: Vec<(Monomial, Scalar)>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(Monomial::one(), c)] }
        }
    }

    pub fn from_int(n: i64) -> Self {
        Poly::constant(Scalar::from_int(n))
    }

    pub fn var(s: Symbol) -> Self {
        Poly { terms: vec![(Monomial::var(s, 1), Scalar::one())] }
    }

    pub fn monomial(m: Monomial, c: Scalar) -> Self {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    /// Builds a polynomial from arbitrary (unsorted, possibly repeated) terms.
    pub fn from_terms(mut terms: Vec<(Monomial, Scalar)>) -> Self {
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        let mut out: Vec<(Monomial, Scalar)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            match out.last_mut() {
                Some(last) if last.0 == m => last.1 = &last.1 + &c,
                _ => {
                    if let Some(last) = out.last() {
                        if last.1.is_zero() {
                            out.pop();
                        }
                    }
                    out.push((m, c));
                }
            }
        }
        out.retain(|t| !t.1.is_zero());
        Poly { terms: out }
    }

    pub fn terms(&self) -> &[(Monomial, Scalar)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn constant_value(&self) -> Option<Scalar> {
        if self.terms.is_empty() {
            Some(Scalar::zero())
        } else if self.is_constant() {
            Some(self.terms[0].1.clone())
        } else {
            None
        }
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn leading_term(&self) -> Option<&(Monomial, Scalar)> {
        self.terms.first()
    }

    /// Leading coefficient (graded-lex); zero for the zero polynomial.
    pub fn lc(&self) -> Scalar {
        self.terms.first().map_or_else(Scalar::zero, |t| t.1.clone())
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Poly {
        Poly { terms: self.terms.iter().map(|(n, a)| (n.mul(m), a.clone())).collect() }
    }

    /// Scales so that the leading coefficient is 1; returns (lc, monic).
    pub fn make_monic(&self) -> (Scalar, Poly) {
        if self.is_zero() {
            return (Scalar::one(), Poly::zero());
        }
        let lc = self.lc();
        if lc.is_one() {
            return (lc, self.clone());
        }
        let inv = lc.inv();
        (lc, self.scale(&inv))
    }

    pub fn pow(&self, mut n: u32) -> Poly {
        if self.is_monomial() {
            let (m, c) = &self.terms[0];
            return Poly::monomial(m.pow(n), c.pow(n));
        }
        let mut base = self.clone();
        let mut acc = Poly::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|t| t.0.degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, s: Symbol) -> u32 {
        self.terms.iter().map(|t| t.0.degree_in(s)).max().unwrap_or(0)
    }

    pub fn contains(&self, s: Symbol) -> bool {
        self.terms.iter().any(|t| t.0.degree_in(s) > 0)
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        for (m, _) in &self.terms {
            for &(s, _) in m.iter() {
                out.insert(s);
            }
        }
        out
    }

    /// Minimum exponent of every symbol over all terms.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.iter();
        let Some(first) = it.next() else { return Monomial::one() };
        let mut g = first.0.clone();
        for (m, _) in it {
            if g.is_one() {
                break;
            }
            g = g.gcd(m);
        }
        g
    }

    pub fn div_monomial(&self, m: &Monomial) -> Option<Poly> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (n, c) in &self.terms {
            terms.push((n.div(m)?, c.clone()));
        }
        // dividing by a monomial can reorder terms only within equal degree
        // shifts, which graded lex preserves; still sort defensively cheap
        Some(Poly::from_terms(terms))
    }

    /// Coefficients with respect to `s`: exponent → coefficient free of `s`.
    pub fn coeffs_in(&self, s: Symbol) -> BTreeMap<u32, Poly> {
        let mut buckets: BTreeMap<u32, Vec<(Monomial, Scalar)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.split(s);
            buckets.entry(e).or_default().push((rest, c.clone()));
        }
        buckets.into_iter().map(|(e, ts)| (e, Poly::from_terms(ts))).collect()
    }

    pub fn coeff_in(&self, s: Symbol, e: u32) -> Poly {
        let terms = self
            .terms
            .iter()
            .filter_map(|(m, c)| {
                let (k, rest) = m.split(s);
                (k == e).then(|| (rest, c.clone()))
            })
            .collect();
        Poly::from_terms(terms)
    }

    /// Inverse of [`Poly::coeffs_in`].
    pub fn from_coeffs_in(s: Symbol, coeffs: &BTreeMap<u32, Poly>) -> Poly {
        let mut terms = Vec::new();
        for (&e, p) in coeffs {
            let m = Monomial::var(s, e);
            for (n, c) in p.terms() {
                terms.push((n.mul(&m), c.clone()));
            }
        }
        Poly::from_terms(terms)
    }

    /// Partial derivative treating every other symbol as a constant.
    pub fn derivative(&self, s: Symbol) -> Poly {
        let mut terms = Vec::new();
        for (m, c) in &self.terms {
            let (e, rest) = m.split(s);
            if e > 0 {
                let m2 = rest.mul(&Monomial::var(s, e - 1));
                terms.push((m2, c * &Scalar::from_int(e as i64)));
            }
        }
        Poly::from_terms(terms)
    }

    /// Substitutes scalars for some symbols.
    pub fn eval_scalars(&self, vals: &HashMap<Symbol, Scalar>) -> Poly {
        let mut pow_cache: HashMap<(Symbol, u32), Scalar> = HashMap::new();
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut coef = c.clone();
            let mut rest = Vec::new();
            for &(s, e) in m.iter() {
                if let Some(v) = vals.get(&s) {
                    let p = pow_cache.entry((s, e)).or_insert_with(|| v.pow(e));
                    coef = &coef * p;
                } else {
                    rest.push((s, e));
                }
            }
            if !coef.is_zero() {
                terms.push((Monomial::from_pairs(rest), coef));
            }
        }
        Poly::from_terms(terms)
    }

    /// Renames symbols (must be injective on the symbols present).
    pub fn rename(&self, map: &HashMap<Symbol, Symbol>) -> Poly {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let pairs = m.iter().map(|&(s, e)| (*map.get(&s).unwrap_or(&s), e)).collect();
                (Monomial::from_pairs(pairs), c.clone())
            })
            .collect();
        Poly::from_terms(terms)
    }

    /// Exact division; `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if d.is_constant() {
            return Some(self.scale(&d.lc().inv()));
        }
        if d.is_monomial() {
            let (m, c) = &d.terms[0];
            return self.div_monomial(m).map(|p| p.scale(&c.inv()));
        }
        let (dm, dc) = &d.terms[0];
        let dc_inv = dc.inv();
        let mut rem: BTreeMap<Monomial, Scalar> = self.terms.iter().cloned().collect();
        let mut quot = Vec::new();
        while let Some((m, c)) = rem.pop_last() {
            let qm = m.div(dm)?;
            let qc = &c * &dc_inv;
            for (n, a) in d.terms.iter().skip(1) {
                let key = n.mul(&qm);
                let delta = a * &qc;
                match rem.entry(key) {
                    std::collections::btree_map::Entry::Occupied(mut o) => {
                        let v = o.get() - &delta;
                        if v.is_zero() {
                            o.remove();
                        } else {
                            *o.get_mut() = v;
                        }
                    }
                    std::collections::btree_map::Entry::Vacant(v) => {
                        v.insert(-delta);
                    }
                }
            }
            quot.push((qm, qc));
        }
        Some(Poly::from_terms(quot))
    }

    /// Least common multiple of all coefficient denominators (real and imaginary).
    pub fn denominator_lcm(&self) -> num_bigint::BigInt {
        use num_integer::Integer;
        let mut l = num_bigint::BigInt::from(1);
        for (_, c) in &self.terms {
            l = l.lcm(&c.denom_lcm());
        }
        l
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let (a, b) = (&self.terms, &o.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &a[i].1 + &b[j].1;
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Poly { terms: out }
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        self + &(-o)
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        if o.is_constant() {
            return self.scale(&o.terms[0].1);
        }
        if self.is_constant() {
            return o.scale(&self.terms[0].1);
        }
        let mut terms = Vec::with_capacity(self.terms.len() * o.terms.len());
        for (m, a) in &self.terms {
            for (n, b) in &o.terms {
                terms.push((m.mul(n), a * b));
            }
        }
        Poly::from_terms(terms)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $m(self, o: Poly) -> Poly {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::{x, y};

    fn p(terms: &[(i64, u32, u32)]) -> Poly {
        Poly::from_terms(
            terms
                .iter()
                .map(|&(c, ex, ey)| (Monomial::from_pairs(vec![(x(), ex), (y(), ey)]), Scalar::from_int(c)))
                .collect(),
        )
    }

    #[test]
    fn binomial_square() {
        let _ = Symbol::named("x");
        let s = p(&[(1, 1, 0), (1, 0, 1)]);
        let sq = &s * &s;
        assert_eq!(sq, p(&[(1, 2, 0), (2, 1, 1), (1, 0, 2)]));
        assert!((&sq - &sq).is_zero());
    }

    #[test]
    fn exact_division() {
        let _ = Symbol::named("x");
        let a = p(&[(1, 1, 0), (1, 0, 1)]);
        let b = p(&[(1, 1, 0), (-3, 0, 2), (5, 0, 0)]);
        let prod = &a * &b;
        assert_eq!(prod.div_exact(&a), Some(b.clone()));
        assert_eq!(prod.div_exact(&b), Some(a));
        assert_eq!(b.div_exact(&p(&[(1, 1, 0), (2, 0, 0)])), None);
    }

    #[test]
    fn grlex_order() {
        let _ = Symbol::named("x");
        let m1 = Monomial::from_pairs(vec![(x(), 1), (y(), 2)]);
        let m2 = Monomial::from_pairs(vec![(y(), 3)]);
        let m3 = Monomial::from_pairs(vec![(x(), 2)]);
        assert!(m1 > m2);
        assert!(m2 > m3);
    }

    #[test]
    fn coefficient_views_round_trip() {
        let _ = Symbol::named("x");
        let a = p(&[(3, 2, 1), (-1, 0, 2), (7, 1, 0), (1, 0, 0)]);
        let cs = a.coeffs_in(y());
        assert_eq!(Poly::from_coeffs_in(y(), &cs), a);
        assert_eq!(a.degree_in(y()), 2);
        assert_eq!(a.derivative(x()), p(&[(6, 1, 1), (7, 0, 0)]));
    }
}
