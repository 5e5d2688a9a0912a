//! Dense univariate polynomials over Q(i).

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::poly::{Monomial, Poly};
use crate::scalar::Scalar;
use crate::symbol::Symbol;

/// Coefficients stored lowest degree first, without trailing zeros.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct UPoly {
    c: Vec<Scalar>,
}

impl UPoly {
    pub fn zero() -> Self {
        UPoly { c: Vec::new() }
    }

    pub fn one() -> Self {
        UPoly::constant(Scalar::one())
    }

    pub fn constant(s: Scalar) -> Self {
        UPoly::new(vec![s])
    }

    /// `y - a`
    pub fn linear_root(a: &Scalar) -> Self {
        UPoly::new(vec![-a, Scalar::one()])
    }

    pub fn new(mut c: Vec<Scalar>) -> Self {
        while c.last().is_some_and(|s| s.is_zero()) {
            c.pop();
        }
        UPoly { c }
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> Scalar {
        self.c.get(i).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn lc(&self) -> Scalar {
        self.c.last().cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_real(&self) -> bool {
        self.c.iter().all(Scalar::is_real)
    }

    pub fn scale(&self, s: &Scalar) -> UPoly {
        UPoly::new(self.c.iter().map(|a| a * s).collect())
    }

    pub fn monic(&self) -> UPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lc().inv())
    }

    pub fn derivative(&self) -> UPoly {
        UPoly::new(self.c.iter().enumerate().skip(1).map(|(i, a)| a * &Scalar::from_int(i as i64)).collect())
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let mut acc = Scalar::zero();
        for a in self.c.iter().rev() {
            acc = &(&acc * x) + a;
        }
        acc
    }

    pub fn pow(&self, n: u32) -> UPoly {
        let mut acc = UPoly::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn div_rem(&self, d: &UPoly) -> (UPoly, UPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.c.len() < d.c.len() {
            return (UPoly::zero(), self.clone());
        }
        let inv = d.lc().inv();
        let mut r = self.c.clone();
        let dd = d.degree();
        let mut q = vec![Scalar::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let coef = &r[k + dd] * &inv;
            if !coef.is_zero() {
                for (j, dc) in d.c.iter().enumerate() {
                    r[k + j] = &r[k + j] - &(&coef * dc);
                }
            }
            q[k] = coef;
        }
        r.truncate(dd);
        (UPoly::new(q), UPoly::new(r))
    }

    /// Monic gcd.
    pub fn gcd(&self, o: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Returns (g, s, t) with s*self + t*o = g, g monic.
    pub fn ext_gcd(&self, o: &UPoly) -> (UPoly, UPoly, UPoly) {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (UPoly::one(), UPoly::zero());
        let (mut t0, mut t1) = (UPoly::zero(), UPoly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = &s0 - &(&q * &s1);
            s0 = std::mem::replace(&mut s1, s);
            let t = &t0 - &(&q * &t1);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = r0.lc().inv();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    /// Yun's square-free decomposition: `self = lc * prod f_i^i`, entries (f_i, i) with f_i monic and non-constant.
    pub fn squarefree(&self) -> Vec<(UPoly, u32)> {
        let mut out = Vec::new();
        if self.degree() == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let mut a = f.gcd(&df);
        let mut b = f.div_rem(&a).0;
        let mut c = df.div_rem(&a).0;
        let mut d = &c - &b.derivative();
        let mut i = 1;
        loop {
            let g = b.gcd(&d);
            if g.degree() > 0 {
                out.push((g.clone(), i));
            }
            b = b.div_rem(&g).0;
            if b.degree() == 0 {
                break;
            }
            c = d.div_rem(&g).0;
            d = &c - &b.derivative();
            i += 1;
            a = g;
        }
        let _ = a;
        out
    }

    /// Converts a polynomial that only involves `v` (coefficients scalar).
    pub fn from_poly(p: &Poly, v: Symbol) -> Option<UPoly> {
        let mut c = vec![Scalar::zero(); p.degree_in(v) as usize + 1];
        for (m, a) in p.terms() {
            let (e, rest) = m.split(v);
            if !rest.is_one() {
                return None;
            }
            c[e as usize] = a.clone();
        }
        Some(UPoly::new(c))
    }

    pub fn to_poly(&self, v: Symbol) -> Poly {
        Poly::from_terms(
            self.c
                .iter()
                .enumerate()
                .filter(|(_, a)| !a.is_zero())
                .map(|(i, a)| (Monomial::var(v, i as u32), a.clone()))
                .collect(),
        )
    }

    /// Roots in Q(i) with multiplicity, plus the cofactor that has none.
    pub fn gaussian_roots(&self) -> (Vec<(Scalar, u32)>, UPoly) {
        let mut roots = Vec::new();
        let mut rest = self.monic();
        if rest.is_zero() {
            return (roots, rest);
        }
        // zero roots first
        let mut z = 0;
        while rest.degree() > 0 && rest.c[0].is_zero() {
            rest = UPoly::new(rest.c[1..].to_vec());
            z += 1;
        }
        if z > 0 {
            roots.push((Scalar::zero(), z));
        }
        loop {
            let deg = rest.degree();
            if deg == 0 {
                break;
            }
            // repeated roots are found on the squarefree part, where they are simple
            let sf = if deg > 1 { rest.div_rem(&rest.gcd(&rest.derivative())).0.monic() } else { rest.clone() };
            let cand = match sf.degree() {
                1 => Some(-&sf.c[0]),
                2 => quadratic_roots(&sf).map(|(r, _)| r),
                _ => sf.numeric_roots().into_iter().find_map(|z| {
                    let s = rationalize_complex(z)?;
                    sf.eval(&s).is_zero().then_some(s)
                }),
            };
            let Some(r) = cand else { break };
            let lin = UPoly::linear_root(&r);
            let mut mult = 0;
            loop {
                let (q, rem) = rest.div_rem(&lin);
                if !rem.is_zero() {
                    break;
                }
                rest = q;
                mult += 1;
            }
            debug_assert!(mult > 0);
            roots.push((r, mult));
        }
        (roots, rest)
    }

    /// Approximate complex roots (Aberth iteration in f64).
    pub fn numeric_roots(&self) -> Vec<(f64, f64)> {
        let n = self.degree();
        if n == 0 {
            return Vec::new();
        }
        let c: Vec<num_complex::Complex64> = self
            .monic()
            .c
            .iter()
            .map(|s| {
                let (a, b) = s.to_f64_pair();
                num_complex::Complex64::new(a, b)
            })
            .collect();
        let bound = 1.0 + c[..n].iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut z: Vec<num_complex::Complex64> = (0..n)
            .map(|k| num_complex::Complex64::from_polar(bound * 0.7, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64))
            .collect();
        let eval = |x: num_complex::Complex64| {
            let mut p = num_complex::Complex64::new(0.0, 0.0);
            let mut dp = num_complex::Complex64::new(0.0, 0.0);
            for a in c.iter().rev() {
                dp = dp * x + p;
                p = p * x + a;
            }
            (p, dp)
        };
        for _ in 0..500 {
            let mut moved = 0.0f64;
            for i in 0..n {
                let (p, dp) = eval(z[i]);
                if p.norm() == 0.0 {
                    continue;
                }
                let ratio = p / dp;
                let mut s = num_complex::Complex64::new(0.0, 0.0);
                for j in 0..n {
                    if j != i {
                        s += 1.0 / (z[i] - z[j]);
                    }
                }
                let w = ratio / (1.0 - ratio * s);
                z[i] -= w;
                moved = moved.max(w.norm() / (1.0 + z[i].norm()));
            }
            if moved < 1e-15 {
                break;
            }
        }
        z.into_iter().map(|w| (w.re, w.im)).collect()
    }
}

/// Both roots of a monic quadratic when the discriminant is a square in Q(i).
pub fn quadratic_roots(q: &UPoly) -> Option<(Scalar, Scalar)> {
    let (b, c) = (q.coeff(1), q.coeff(0));
    let disc = &(&b * &b) - &(&Scalar::from_int(4) * &c);
    let s = disc.sqrt_exact()?;
    let half = Scalar::from_ratio(1, 2);
    Some((&(&(-&b) + &s) * &half, &(&(-&b) - &s) * &half))
}

/// Best rational approximation with bounded denominator, if it is close.
fn rationalize(x: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    if x.abs() < 1e-12 {
        return Some(BigRational::zero());
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut v = x;
    for _ in 0..40 {
        let a = v.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2.abs() > 1_000_000_000 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let approx = h1 as f64 / k1 as f64;
        if (approx - x).abs() <= 1e-9 * x.abs().max(1.0) {
            return Some(BigRational::new(BigInt::from(h1), BigInt::from(k1)));
        }
        let frac = v - a;
        if frac.abs() < 1e-14 {
            break;
        }
        v = 1.0 / frac;
    }
    None
}

fn rationalize_complex((re, im): (f64, f64)) -> Option<Scalar> {
    Some(Scalar::new(rationalize(re)?, rationalize(im)?))
}

/// A rational close to `x`, used for picking sample points and roots.
pub fn f64_to_rational(x: f64) -> Option<BigRational> {
    rationalize(x).or_else(|| BigRational::from_float(x))
}

impl Add<&UPoly> for &UPoly {
    type Output = UPoly;
    fn add(self, o: &UPoly) -> UPoly {
        let n = self.c.len().max(o.c.len());
        UPoly::new((0..n).map(|i| &self.coeff(i) + &o.coeff(i)).collect())
    }
}

impl Sub<&UPoly> for &UPoly {
    type Output = UPoly;
    fn sub(self, o: &UPoly) -> UPoly {
        let n = self.c.len().max(o.c.len());
        UPoly::new((0..n).map(|i| &self.coeff(i) - &o.coeff(i)).collect())
    }
}

impl Mul<&UPoly> for &UPoly {
    type Output = UPoly;
    fn mul(self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut c = vec![Scalar::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] = &c[i + j] + &(a * b);
            }
        }
        UPoly::new(c)
    }
}

impl Neg for &UPoly {
    type Output = UPoly;
    fn neg(self) -> UPoly {
        UPoly::new(self.c.iter().map(|a| -a).collect())
    }
}

/// Integer value of a small real scalar, for diagnostics.
pub fn small_int(s: &Scalar) -> Option<i64> {
    if s.is_integer() {
        s.re.to_integer().to_i64()
    } else {
        None
    }
}

/// Sign of a real scalar: -1, 0 or 1.
pub fn real_sign(s: &Scalar) -> i32 {
    if s.re.is_positive() {
        1
    } else if s.re.is_negative() {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn up(c: &[i64]) -> UPoly {
        UPoly::new(c.iter().map(|&v| Scalar::from_int(v)).collect())
    }

    #[test]
    fn gcd_and_division() {
        // (y-1)(y+2) and (y-1)(y-3)
        let a = &up(&[-1, 1]) * &up(&[2, 1]);
        let b = &up(&[-1, 1]) * &up(&[-3, 1]);
        assert_eq!(a.gcd(&b), up(&[-1, 1]));
        let (g, s, t) = a.ext_gcd(&b);
        assert_eq!(&(&s * &a) + &(&t * &b), g);
    }

    #[test]
    fn squarefree_parts() {
        // y^2 (y-1)^3 (y+1)
        let p = &(&up(&[0, 0, 1]) * &up(&[-1, 1]).pow(3)) * &up(&[1, 1]);
        let sf = p.squarefree();
        assert_eq!(sf.len(), 3);
        assert!(sf.contains(&(up(&[1, 1]), 1)));
        assert!(sf.contains(&(up(&[0, 1]), 2)));
        assert!(sf.contains(&(up(&[-1, 1]), 3)));
    }

    #[test]
    fn gaussian_root_finding() {
        // (y - 1/2)^2 (y^2 + 1) (y - 3)
        let half = UPoly::new(vec![Scalar::from_ratio(-1, 2), Scalar::one()]);
        let p = &(&half.pow(2) * &up(&[1, 0, 1])) * &up(&[-3, 1]);
        let (roots, rest) = p.gaussian_roots();
        assert_eq!(rest.degree(), 0);
        assert_eq!(roots.iter().map(|r| r.1).sum::<u32>(), 5);
        assert!(roots.contains(&(Scalar::from_ratio(1, 2), 2)));
        assert!(roots.contains(&(Scalar::i(), 1)));
        // irreducible cubic keeps its cofactor
        let (r2, rest2) = up(&[-2, 0, 0, 1]).gaussian_roots();
        assert!(r2.is_empty());
        assert_eq!(rest2.degree(), 3);
    }
}
