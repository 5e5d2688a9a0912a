//! Exact Gaussian rationals, the coefficient field of every polynomial.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A complex number `re + im*I` with arbitrary-precision rational parts.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    pub re: BigRational,
    pub im: BigRational,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { re: BigRational::zero(), im: BigRational::zero() }
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Scalar { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar { re: BigRational::from_integer(BigInt::from(n)), im: BigRational::zero() }
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Scalar { re: BigRational::new(BigInt::from(n), BigInt::from(d)), im: BigRational::zero() }
    }

    pub fn from_rational(re: BigRational) -> Self {
        Scalar { re, im: BigRational::zero() }
    }

    pub fn new(re: BigRational, im: BigRational) -> Self {
        Scalar { re, im }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// True for a real integer value.
    pub fn is_integer(&self) -> bool {
        self.im.is_zero() && self.re.is_integer()
    }

    pub fn to_i64(&self) -> Option<i64> {
        if self.is_integer() {
            self.re.to_integer().to_i64()
        } else {
            None
        }
    }

    pub fn conj(&self) -> Self {
        Scalar { re: self.re.clone(), im: -self.im.clone() }
    }

    /// |z|^2 as a rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero scalar");
        if self.im.is_zero() {
            return Scalar { re: self.re.recip(), im: BigRational::zero() };
        }
        let n = self.norm_sqr();
        Scalar { re: &self.re / &n, im: -(&self.im / &n) }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Scalar::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn powi(&self, e: i64) -> Self {
        if e >= 0 {
            self.pow(e as u32)
        } else {
            self.inv().pow((-e) as u32)
        }
    }

    /// Canonical "sign": positive real part, or zero real part and positive
    /// imaginary part. Used to pick one of `{E, -E}` as a representative.
    pub fn is_positive_like(&self) -> bool {
        if !self.re.is_zero() {
            self.re.is_positive()
        } else {
            self.im.is_positive()
        }
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    /// Exact square root in Q(i), when one exists.
    pub fn sqrt_exact(&self) -> Option<Scalar> {
        if self.is_zero() {
            return Some(Scalar::zero());
        }
        if self.im.is_zero() {
            if let Some(r) = rational_root(&self.re.abs(), 2) {
                return Some(if self.re.is_negative() {
                    Scalar { re: BigRational::zero(), im: r }
                } else {
                    Scalar::from_rational(r)
                });
            }
            return None;
        }
        // sqrt(a+bi) = p + qi with p^2 = (|z|+a)/2, q^2 = (|z|-a)/2, sign(q) = sign(b)
        let modulus = rational_root(&self.norm_sqr(), 2)?;
        let two = BigRational::from_integer(BigInt::from(2));
        let p = rational_root(&((&modulus + &self.re) / &two), 2)?;
        let mut q = rational_root(&((&modulus - &self.re) / &two), 2)?;
        if self.im.is_negative() {
            q = -q;
        }
        let root = Scalar { re: p, im: q };
        debug_assert!(&(&root * &root) == self);
        Some(root)
    }

    /// Exact m-th root for positive real rationals (and m = 2 in Q(i)).
    pub fn root_exact(&self, m: u32) -> Option<Scalar> {
        match m {
            0 => None,
            1 => Some(self.clone()),
            2 => self.sqrt_exact(),
            _ => {
                if !self.im.is_zero() {
                    return None;
                }
                if self.re.is_zero() {
                    return Some(Scalar::zero());
                }
                if self.re.is_negative() {
                    if m % 2 == 1 {
                        return rational_root(&(-self.re.clone()), m).map(|r| Scalar::from_rational(-r));
                    }
                    return None;
                }
                rational_root(&self.re, m).map(Scalar::from_rational)
            }
        }
    }

    /// Least common multiple of the denominators of both parts.
    pub fn denom_lcm(&self) -> BigInt {
        self.re.denom().lcm(self.im.denom())
    }
}

pub(crate) fn rat_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // scale down huge values
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = (nb - db).clamp(-1000, 1000);
    let scaled = if shift > 0 {
        BigRational::new(r.numer().clone(), r.denom() << (shift as usize))
    } else {
        BigRational::new(r.numer() << ((-shift) as usize), r.denom().clone())
    };
    let n = scaled.numer().to_f64().unwrap_or(f64::NAN);
    let d = scaled.denom().to_f64().unwrap_or(f64::NAN);
    (n / d) * 2f64.powi(shift as i32)
}

fn int_root(n: &BigInt, m: u32) -> Option<BigInt> {
    if n.sign() == Sign::Minus {
        return None;
    }
    let r = n.nth_root(m);
    if num_traits::pow(r.clone(), m as usize) == *n {
        Some(r)
    } else {
        None
    }
}

fn rational_root(r: &BigRational, m: u32) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    Some(BigRational::new(int_root(r.numer(), m)?, int_root(r.denom(), m)?))
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        Scalar { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        Scalar { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        if self.im.is_zero() && o.im.is_zero() {
            return Scalar { re: &self.re * &o.re, im: BigRational::zero() };
        }
        Scalar {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, o: &Scalar) -> Scalar {
        if self.im.is_zero() && o.im.is_zero() {
            return Scalar { re: &self.re / &o.re, im: BigRational::zero() };
        }
        self * &o.inv()
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { re: -self.re, im: -self.im }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

fn fmt_rat(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl Scalar {
    /// True when printing this coefficient needs surrounding parentheses
    /// in a product.
    pub fn needs_parens(&self) -> bool {
        !self.re.is_zero() && !self.im.is_zero()
    }
}

impl fmt::Display for Scalar {
    /// Prints in the expression grammar: `3`, `-2/5`, `3*I`, `1/2 + 3/4*I`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", fmt_rat(&self.re));
        }
        let im_abs = self.im.abs();
        let im_part = if im_abs.is_one() {
            "I".to_string()
        } else {
            format!("{}*I", fmt_rat(&im_abs))
        };
        if self.re.is_zero() {
            if self.im.is_negative() {
                write!(f, "-{im_part}")
            } else {
                write!(f, "{im_part}")
            }
        } else {
            let sign = if self.im.is_negative() { "-" } else { "+" };
            write!(f, "{} {} {}", fmt_rat(&self.re), sign, im_part)
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
