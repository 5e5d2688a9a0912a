//! Numeric evaluation of tower rational functions.
//!
//! [`Evaluator`] works in complex `f64` and evaluates formal integrals by
//! adaptive Gauss–Kronrod quadrature along a straight path. [`BigEvaluator`]
//! works at an arbitrary decimal precision and backs the sampled zero test.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::ratfun::RationalFunction as RF;
use crate::scalar::Scalar;
use crate::symbol::{Symbol, TowerDef};

pub type Env = HashMap<Symbol, Complex64>;

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const K15_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const G7_WEIGHTS: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// Adaptive 15-point Gauss–Kronrod quadrature of `f` along the segment from `a` to `b`.
pub fn quad_segment<F>(f: &F, a: Complex64, b: Complex64, tol: f64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    fn rule<F: Fn(Complex64) -> Result<Complex64>>(f: &F, a: Complex64, b: Complex64) -> Result<(Complex64, Complex64)> {
        let mid = (a + b) * 0.5;
        let half = (b - a) * 0.5;
        let mut kron = Complex64::new(0.0, 0.0);
        let mut gauss = Complex64::new(0.0, 0.0);
        for (i, &node) in GK_NODES.iter().enumerate() {
            let pts: &[Complex64] = if node == 0.0 { &[mid] } else { &[mid - half * node, mid + half * node] };
            for &z in pts {
                let v = f(z)?;
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(Error::Numeric("pole on quadrature path".into()));
                }
                kron += v * K15_WEIGHTS[i];
                if i % 2 == 1 {
                    gauss += v * G7_WEIGHTS[i / 2];
                }
            }
        }
        Ok((kron * half, gauss * half))
    }
    fn go<F: Fn(Complex64) -> Result<Complex64>>(
        f: &F,
        a: Complex64,
        b: Complex64,
        tol: f64,
        depth: u32,
    ) -> Result<Complex64> {
        let (k, g) = rule(f, a, b)?;
        let err = (k - g).norm();
        if err <= tol.max(1e-15 * k.norm()) {
            return Ok(k);
        }
        if depth >= 48 {
            return Err(Error::Numeric("quadrature did not converge".into()));
        }
        let m = (a + b) * 0.5;
        Ok(go(f, a, m, tol * 0.5, depth + 1)? + go(f, m, b, tol * 0.5, depth + 1)?)
    }
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    go(f, a, b, tol, 0)
}

fn scalar_c64(c: &Scalar) -> Complex64 {
    let (re, im) = c.to_f64_pair();
    Complex64::new(re, im)
}

/// Complex double-precision evaluator using principal branches.
pub struct Evaluator {
    basepoint: Option<Complex64>,
    /// Lower limits, shared by every integral of the same integrand.
    bases: RefCell<HashMap<(RF, Symbol), Complex64>>,
    tol: f64,
}

impl Default for Evaluator {
    fn default() -> Self {
        Evaluator::new(None, 1e-12)
    }
}

impl Evaluator {
    /// With `basepoint == None` every formal integrand gets its lower limit from the
    /// first upper limit it is evaluated at.
    pub fn new(basepoint: Option<f64>, tol: f64) -> Self {
        Evaluator { basepoint: basepoint.map(|b| Complex64::new(b, 0.0)), bases: RefCell::default(), tol }
    }

    pub fn eval(&self, f: &RF, env: &Env) -> Result<Complex64> {
        let mut memo = env.clone();
        self.rf(f, &mut memo)
    }

    /// Evaluates at real values of the listed symbols and returns the real part.
    pub fn eval_real(&self, f: &RF, point: &[(Symbol, f64)]) -> Result<f64> {
        Ok(self.eval_real_complex(f, point)?.re)
    }

    pub fn eval_real_complex(&self, f: &RF, point: &[(Symbol, f64)]) -> Result<Complex64> {
        let env: Env = point.iter().map(|&(s, v)| (s, Complex64::new(v, 0.0))).collect();
        self.eval(f, &env)
    }

    fn rf(&self, f: &RF, memo: &mut Env) -> Result<Complex64> {
        let n = self.poly(f.num(), memo)?;
        if f.den().is_one() {
            return Ok(n);
        }
        let d = self.poly(f.den(), memo)?;
        if d.norm() < 1e-300 || !d.re.is_finite() || !d.im.is_finite() {
            return Err(Error::Singular("evaluation at a pole".into()));
        }
        Ok(n / d)
    }

    fn poly(&self, p: &Poly, memo: &mut Env) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in p.terms() {
            let mut t = scalar_c64(c);
            for &(s, e) in m.iter() {
                t *= self.value(s, memo)?.powi(e as i32);
            }
            acc += t;
        }
        Ok(acc)
    }

    fn value(&self, s: Symbol, memo: &mut Env) -> Result<Complex64> {
        if let Some(v) = memo.get(&s) {
            return Ok(*v);
        }
        let Some(def) = s.tower_def() else {
            return Err(Error::Numeric(format!("no numeric value for `{s}`")));
        };
        let v = match &*def {
            TowerDef::Exp(a) => self.rf(a, memo)?.exp(),
            TowerDef::Log(a) => {
                let z = self.rf(a, memo)?;
                if z.norm() == 0.0 {
                    return Err(Error::Singular("log of zero".into()));
                }
                z.ln()
            }
            TowerDef::Atan(a) => self.rf(a, memo)?.atan(),
            TowerDef::Root { base, degree } => {
                let z = self.rf(base, memo)?;
                if z.norm() == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else if z.im == 0.0 && z.re > 0.0 {
                    Complex64::new(z.re.powf(1.0 / *degree as f64), 0.0)
                } else {
                    (z.ln() / *degree as f64).exp()
                }
            }
            TowerDef::Integral { integrand, var, at } => {
                let upper = match at {
                    Some(a) => self.rf(a, memo)?,
                    None => self.value(*var, memo)?,
                };
                let lower = *self
                    .bases
                    .borrow_mut()
                    .entry((integrand.clone(), *var))
                    .or_insert(self.basepoint.unwrap_or(upper));
                let outer: Env =
                    memo.iter().filter(|(k, _)| **k != *var && !k.depends_on(*var)).map(|(k, v)| (*k, *v)).collect();
                let d = *var;
                let g = |z: Complex64| {
                    let mut child = outer.clone();
                    child.insert(d, z);
                    self.rf(integrand, &mut child)
                };
                quad_segment(&g, lower, upper, self.tol)?
            }
        };
        memo.insert(s, v);
        Ok(v)
    }
}

/// A complex number with arbitrary-precision components.
#[derive(Clone, Debug)]
pub struct BigC {
    pub re: BigFloat,
    pub im: BigFloat,
}

const RM: RoundingMode = RoundingMode::ToEven;

/// Arbitrary-precision evaluator. Formal integrals are given independent random values.
pub struct BigEvaluator {
    bits: usize,
    cc: RefCell<Consts>,
    integrals: RefCell<HashMap<Symbol, BigC>>,
    rng: RefCell<ChaCha8Rng>,
}

impl BigEvaluator {
    pub fn new(digits: usize, seed: u64) -> Self {
        BigEvaluator {
            bits: digits * 10 / 3 + 64,
            cc: RefCell::new(Consts::new().expect("astro-float constants")),
            integrals: RefCell::default(),
            rng: RefCell::new(ChaCha8Rng::seed_from_u64(seed)),
        }
    }

    fn zero(&self) -> BigFloat {
        BigFloat::from_i64(0, self.bits)
    }

    pub fn rational(&self, r: &BigRational) -> BigFloat {
        let mut cc = self.cc.borrow_mut();
        let n = BigFloat::parse(&r.numer().to_string(), Radix::Dec, self.bits, RM, &mut cc);
        let d = BigFloat::parse(&r.denom().to_string(), Radix::Dec, self.bits, RM, &mut cc);
        n.div(&d, self.bits, RM)
    }

    pub fn scalar(&self, c: &Scalar) -> BigC {
        BigC { re: self.rational(&c.re), im: self.rational(&c.im) }
    }

    pub fn real(&self, v: f64) -> BigC {
        BigC { re: BigFloat::from_f64(v, self.bits), im: self.zero() }
    }

    pub fn add(&self, a: &BigC, b: &BigC) -> BigC {
        BigC { re: a.re.add(&b.re, self.bits, RM), im: a.im.add(&b.im, self.bits, RM) }
    }

    pub fn sub(&self, a: &BigC, b: &BigC) -> BigC {
        BigC { re: a.re.sub(&b.re, self.bits, RM), im: a.im.sub(&b.im, self.bits, RM) }
    }

    pub fn mul(&self, a: &BigC, b: &BigC) -> BigC {
        let p = self.bits;
        let re = a.re.mul(&b.re, p, RM).sub(&a.im.mul(&b.im, p, RM), p, RM);
        let im = a.re.mul(&b.im, p, RM).add(&a.im.mul(&b.re, p, RM), p, RM);
        BigC { re, im }
    }

    fn norm_sqr(&self, a: &BigC) -> BigFloat {
        let p = self.bits;
        a.re.mul(&a.re, p, RM).add(&a.im.mul(&a.im, p, RM), p, RM)
    }

    pub fn div(&self, a: &BigC, b: &BigC) -> Result<BigC> {
        let p = self.bits;
        let den = self.norm_sqr(b);
        if den.is_zero() {
            return Err(Error::Singular("division by zero".into()));
        }
        let re = a.re.mul(&b.re, p, RM).add(&a.im.mul(&b.im, p, RM), p, RM).div(&den, p, RM);
        let im = a.im.mul(&b.re, p, RM).sub(&a.re.mul(&b.im, p, RM), p, RM).div(&den, p, RM);
        Ok(BigC { re, im })
    }

    fn powi(&self, a: &BigC, mut e: u32) -> BigC {
        let mut acc = self.real(1.0);
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    fn exp(&self, a: &BigC) -> BigC {
        let p = self.bits;
        let mut cc = self.cc.borrow_mut();
        let m = a.re.exp(p, RM, &mut cc);
        if a.im.is_zero() {
            return BigC { re: m, im: self.zero() };
        }
        let c = a.im.cos(p, RM, &mut cc);
        let s = a.im.sin(p, RM, &mut cc);
        BigC { re: m.mul(&c, p, RM), im: m.mul(&s, p, RM) }
    }

    fn atan2(&self, y: &BigFloat, x: &BigFloat) -> Result<BigFloat> {
        let p = self.bits;
        let mut cc = self.cc.borrow_mut();
        if x.is_zero() {
            if y.is_zero() {
                return Err(Error::Singular("argument of zero".into()));
            }
            let half_pi = cc.pi(p, RM).div(&BigFloat::from_i64(2, p), p, RM);
            return Ok(if y.is_negative() { half_pi.neg() } else { half_pi });
        }
        let base = y.div(x, p, RM).atan(p, RM, &mut cc);
        if x.is_positive() {
            Ok(base)
        } else if y.is_negative() {
            Ok(base.sub(&cc.pi(p, RM), p, RM))
        } else {
            Ok(base.add(&cc.pi(p, RM), p, RM))
        }
    }

    fn ln(&self, a: &BigC) -> Result<BigC> {
        let p = self.bits;
        let n = self.norm_sqr(a);
        if n.is_zero() {
            return Err(Error::Singular("log of zero".into()));
        }
        let im = self.atan2(&a.im, &a.re)?;
        let mut cc = self.cc.borrow_mut();
        let re = n.ln(p, RM, &mut cc).div(&BigFloat::from_i64(2, p), p, RM);
        Ok(BigC { re, im })
    }

    fn atan(&self, a: &BigC) -> Result<BigC> {
        if a.im.is_zero() {
            let mut cc = self.cc.borrow_mut();
            return Ok(BigC { re: a.re.atan(self.bits, RM, &mut cc), im: self.zero() });
        }
        // atan z = (i/2)(log(1 - iz) - log(1 + iz))
        let iz = BigC { re: a.im.neg(), im: a.re.clone() };
        let one = self.real(1.0);
        let w = self.sub(&self.ln(&self.sub(&one, &iz))?, &self.ln(&self.add(&one, &iz))?);
        let two = BigFloat::from_i64(2, self.bits);
        Ok(BigC { re: w.im.neg().div(&two, self.bits, RM), im: w.re.div(&two, self.bits, RM) })
    }

    fn root(&self, a: &BigC, m: u32) -> Result<BigC> {
        if self.norm_sqr(a).is_zero() {
            return Ok(self.real(0.0));
        }
        let l = self.ln(a)?;
        let k = BigFloat::from_i64(m as i64, self.bits);
        Ok(self.exp(&BigC { re: l.re.div(&k, self.bits, RM), im: l.im.div(&k, self.bits, RM) }))
    }

    pub fn eval(&self, f: &RF, env: &HashMap<Symbol, BigC>) -> Result<BigC> {
        let mut memo = env.clone();
        self.rf(f, &mut memo)
    }

    fn rf(&self, f: &RF, memo: &mut HashMap<Symbol, BigC>) -> Result<BigC> {
        let n = self.poly(f.num(), memo)?;
        if f.den().is_one() {
            return Ok(n);
        }
        let d = self.poly(f.den(), memo)?;
        self.div(&n, &d)
    }

    fn poly(&self, p: &Poly, memo: &mut HashMap<Symbol, BigC>) -> Result<BigC> {
        let mut acc = self.real(0.0);
        for (m, c) in p.terms() {
            let mut t = self.scalar(c);
            for &(s, e) in m.iter() {
                let v = self.value(s, memo)?;
                t = self.mul(&t, &self.powi(&v, e));
            }
            acc = self.add(&acc, &t);
        }
        Ok(acc)
    }

    fn value(&self, s: Symbol, memo: &mut HashMap<Symbol, BigC>) -> Result<BigC> {
        if let Some(v) = memo.get(&s) {
            return Ok(v.clone());
        }
        let Some(def) = s.tower_def() else {
            return Err(Error::Numeric(format!("no numeric value for `{s}`")));
        };
        let v = match &*def {
            TowerDef::Exp(a) => self.exp(&self.rf(a, memo)?),
            TowerDef::Log(a) => self.ln(&self.rf(a, memo)?)?,
            TowerDef::Atan(a) => self.atan(&self.rf(a, memo)?)?,
            TowerDef::Root { base, degree } => self.root(&self.rf(base, memo)?, *degree)?,
            TowerDef::Integral { .. } => {
                let mut cache = self.integrals.borrow_mut();
                let v = cache.entry(s).or_insert_with(|| {
                    let r: f64 = self.rng.borrow_mut().gen_range(0.5..2.5);
                    self.real(r)
                });
                v.clone()
            }
        };
        memo.insert(s, v.clone());
        Ok(v)
    }

    /// max(|re|, |im|)
    pub fn magnitude(&self, a: &BigC) -> BigFloat {
        let r = a.re.abs();
        let i = a.im.abs();
        if r.cmp(&i).unwrap_or(0) >= 0 {
            r
        } else {
            i
        }
    }

    pub fn less_than(&self, a: &BigFloat, bound: f64) -> bool {
        a.cmp(&BigFloat::from_f64(bound, self.bits)).is_some_and(|c| c < 0)
    }

    pub fn to_f64(&self, a: &BigFloat) -> f64 {
        a.to_string().parse().unwrap_or(f64::NAN)
    }
}

/// Base symbols (parameters and variables) that `f` depends on, looking through tower definitions.
/// Formal integrals contribute nothing because they are sampled as opaque values.
pub fn base_symbols(f: &RF) -> BTreeSet<Symbol> {
    fn walk(s: Symbol, out: &mut BTreeSet<Symbol>, seen: &mut BTreeSet<Symbol>) {
        if !seen.insert(s) {
            return;
        }
        match s.tower_def() {
            None => {
                out.insert(s);
            }
            Some(def) => match &*def {
                TowerDef::Exp(a) | TowerDef::Log(a) | TowerDef::Atan(a) | TowerDef::Root { base: a, .. } => {
                    for t in a.symbols() {
                        walk(t, out, seen);
                    }
                }
                TowerDef::Integral { .. } => {}
            },
        }
    }
    let mut out = BTreeSet::new();
    let mut seen = BTreeSet::new();
    for s in f.symbols() {
        walk(s, &mut out, &mut seen);
    }
    out
}

#[derive(Clone, Copy, Debug)]
pub struct SampleConfig {
    pub points: usize,
    pub digits: usize,
    pub seed: u64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig { points: 8, digits: 50, seed: 0x5eed }
    }
}

/// Outcome of a probabilistic zero test.
#[derive(Clone, Debug)]
pub struct SampledVerdict {
    pub zero: bool,
    pub points: usize,
    pub max_abs: f64,
}

/// Evaluates at random positive rational points and reports whether every value is below 10^(-digits/2).
pub fn is_zero_sampled(f: &RF, cfg: &SampleConfig) -> Result<SampledVerdict> {
    let ev = BigEvaluator::new(cfg.digits, cfg.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let syms = base_symbols(f);
    let bound = 10f64.powi(-(cfg.digits as i32) / 2);
    let mut used = 0;
    let mut max_abs: f64 = 0.0;
    let mut attempts = 0;
    while used < cfg.points {
        attempts += 1;
        if attempts > cfg.points * 20 + 20 {
            return Err(Error::Numeric("every sample point hit a pole".into()));
        }
        let env: HashMap<Symbol, BigC> = syms
            .iter()
            .map(|&s| {
                let r = BigRational::new(rng.gen_range(1..=60).into(), rng.gen_range(1..=17).into());
                (s, BigC { re: ev.rational(&r), im: ev.real(0.0).im })
            })
            .collect();
        let Ok(v) = ev.eval(f, &env) else { continue };
        used += 1;
        let m = ev.magnitude(&v);
        max_abs = max_abs.max(ev.to_f64(&m));
        if !ev.less_than(&m, bound) {
            return Ok(SampledVerdict { zero: false, points: used, max_abs });
        }
    }
    Ok(SampledVerdict { zero: true, points: used, max_abs })
}

/// How [`is_zero`] decides.
#[derive(Clone, Copy, Debug)]
pub enum ZeroMode {
    Exact,
    Sampled(SampleConfig),
}

pub fn is_zero(f: &RF, mode: ZeroMode) -> Result<bool> {
    match mode {
        ZeroMode::Exact => Ok(f.is_zero()),
        ZeroMode::Sampled(cfg) => Ok(is_zero_sampled(f, &cfg)?.zero),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_value;
    use crate::symbol::{x, y};
    use crate::tower;

    #[test]
    fn closed_forms_and_branches() {
        let ev = Evaluator::default();
        let psi = parse_value("(x + y - 1)*exp(y)").unwrap();
        let v = ev.eval_real(&psi, &[(x(), 1.0), (y(), 1.0)]).unwrap();
        assert!((v - std::f64::consts::E).abs() < 1e-14);
        let a = parse_value("atan(x)").unwrap();
        assert!((ev.eval_real(&a, &[(x(), 1.0)]).unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn formal_integral_from_a_basepoint() {
        let ev = Evaluator::new(Some(0.0), 1e-13);
        let f = parse_value("Int(y*exp(y), y)").unwrap();
        assert!(f.symbols().iter().any(|s| s.is_tower()));
        let v = ev.eval_real(&f, &[(y(), 1.0)]).unwrap();
        assert!((v - 1.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn sampled_zero_test() {
        let theta = tower::root(&parse_value("3 - 6*t").unwrap(), 2).unwrap();
        let r = &(&theta * &theta) - &parse_value("3 - 6*t").unwrap();
        assert!(r.is_zero());
        let cfg = SampleConfig::default();
        let e = parse_value("exp(y)*exp(-y) - 1").unwrap();
        assert!(is_zero_sampled(&e, &cfg).unwrap().zero);
        let nz = parse_value("x - y").unwrap();
        assert!(!is_zero_sampled(&nz, &cfg).unwrap().zero);
        let lg = parse_value("log(x*y) - log(x) - log(y)").unwrap();
        assert!(is_zero_sampled(&lg, &cfg).unwrap().zero);
    }
}
