//! Transcendental and algebraic tower entries: construction in normal form,
//! differentiation, and substitution.
//!
//! Each entry is a [`Symbol`] interned by its defining relation. Constructors
//! canonicalize their arguments (log parts of exponentials become power
//! products, signs are pulled out of odd functions, perfect powers leave
//! radicals) so that equal values tend to meet as equal symbols.

use std::collections::{BTreeSet, HashMap};
use std::sync::{LazyLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::gcd::squarefree;
use crate::poly::{Monomial, Poly};
use crate::ratfun::RationalFunction as RF;
use crate::scalar::Scalar;
use crate::symbol::{Symbol, TowerDef};

fn intern(def: TowerDef) -> Symbol {
    let mut deps = BTreeSet::new();
    let mut add = |rf: &RF| deps.extend(rf.free_symbols());
    match &def {
        TowerDef::Exp(a) | TowerDef::Log(a) | TowerDef::Atan(a) => add(a),
        TowerDef::Root { base, .. } => add(base),
        TowerDef::Integral { integrand, var, at } => {
            let mut inner = integrand.free_symbols();
            inner.remove(var);
            deps.extend(inner);
            if let Some(at) = at {
                deps.extend(at.free_symbols());
            }
        }
    }
    Symbol::tower(def, deps)
}

fn sym_rf(s: Symbol) -> RF {
    RF::var(s)
}

/// Rational scalar as (p, q) with q > 0, if real and small enough.
fn small_ratio(c: &Scalar) -> Option<(i64, u32)> {
    if !c.is_real() {
        return None;
    }
    let p = c.re.numer().to_i64()?;
    let q = c.re.denom().to_u32()?;
    Some((p, q))
}

/// exp(arg) in normal form.
pub fn exp(arg: &RF) -> Result<RF> {
    if arg.is_zero() {
        return Ok(RF::one());
    }
    let mut result = RF::one();
    let mut rest = arg.clone();
    // pull linear log parts out as powers
    for s in arg.num().symbols() {
        let Some(def) = s.tower_def() else { continue };
        let TowerDef::Log(inner) = &*def else { continue };
        let (dn, dd) = rest.degrees_in(s);
        if dn != 1 || dd != 0 {
            continue;
        }
        let coeff = rest.num().coeff_in(s, 1);
        let Some(ratio) = coeff.div_exact(rest.den()).and_then(|q| q.constant_value()) else { continue };
        let Some((p, q)) = small_ratio(&ratio) else { continue };
        result = &result * &pow_rational(inner, p, q)?;
        rest = &rest - &(&RF::constant(ratio) * &sym_rf(s));
    }
    if rest.is_zero() {
        return Ok(result);
    }
    let pieces: Vec<RF> = if rest.is_polynomial() {
        rest.num().terms().iter().map(|(m, c)| RF::from_poly(Poly::monomial(m.clone(), c.clone()))).collect()
    } else {
        vec![rest]
    };
    for piece in pieces {
        result = &result * &match log_power(&piece)? {
            Some(p) => p,
            None => exp_piece(&piece)?,
        };
    }
    Ok(result)
}

/// exp(c·log(a)) = a^c for a monomial piece with rational c.
fn log_power(piece: &RF) -> Result<Option<RF>> {
    if !piece.is_polynomial() || piece.num().len() != 1 {
        return Ok(None);
    }
    let (m, c) = &piece.num().terms()[0];
    let mut it = m.iter();
    let (Some(&(s, 1)), None) = (it.next(), it.next()) else { return Ok(None) };
    let Some(def) = s.tower_def() else { return Ok(None) };
    let TowerDef::Log(inner) = &*def else { return Ok(None) };
    let Some((p, q)) = small_ratio(c) else { return Ok(None) };
    pow_rational(inner, p, q).map(Some)
}

fn exp_piece(piece: &RF) -> Result<RF> {
    let c = piece.num().lc();
    if let Some((p, q)) = small_ratio(&c) {
        let unit = piece.scale(&Scalar::from_ratio(q as i64, p));
        let base = unit.scale(&Scalar::from_ratio(1, q as i64));
        let theta = sym_rf(intern(TowerDef::Exp(base)));
        return theta.powi(p);
    }
    if c.is_positive_like() {
        Ok(sym_rf(intern(TowerDef::Exp(piece.clone()))))
    } else {
        sym_rf(intern(TowerDef::Exp(-piece))).inv()
    }
}

/// log(arg) in normal form; products become sums.
pub fn log(arg: &RF) -> Result<RF> {
    if arg.is_zero() {
        return Err(Error::Invalid("log(0)".into()));
    }
    Ok(&log_poly(arg.num())? - &log_poly(arg.den())?)
}

fn log_poly(p: &Poly) -> Result<RF> {
    if p.is_one() {
        return Ok(RF::zero());
    }
    let (c, factors) = squarefree(p);
    let mut acc = log_scalar(&c);
    for (f, e) in factors {
        let e = RF::from_int(e as i64);
        let term = if let Some(s) = RF::from_poly(f.clone()).as_symbol() {
            log_symbol(s)?
        } else {
            sym_rf(intern(TowerDef::Log(RF::from_poly(f))))
        };
        acc = &acc + &(&e * &term);
    }
    Ok(acc)
}

fn log_symbol(s: Symbol) -> Result<RF> {
    match s.tower_def().as_deref() {
        Some(TowerDef::Exp(a)) => Ok(a.clone()),
        Some(TowerDef::Root { base, degree }) => {
            Ok(log(base)?.scale(&Scalar::from_ratio(1, *degree as i64)))
        }
        _ => Ok(sym_rf(intern(TowerDef::Log(sym_rf(s))))),
    }
}

fn log_scalar(c: &Scalar) -> RF {
    if c.is_one() {
        return RF::zero();
    }
    if c.is_real() && !c.re.is_zero() {
        let mut acc = RF::zero();
        if c.re.is_negative() {
            acc = sym_rf(intern(TowerDef::Log(RF::from_int(-1))));
        }
        let n = c.re.numer().abs();
        let d = c.re.denom().clone();
        if !n.is_one() {
            acc = &acc + &sym_rf(intern(TowerDef::Log(RF::constant(Scalar::from_rational(BigRational::from_integer(n))))));
        }
        if !d.is_one() {
            acc = &acc - &sym_rf(intern(TowerDef::Log(RF::constant(Scalar::from_rational(BigRational::from_integer(d))))));
        }
        return acc;
    }
    sym_rf(intern(TowerDef::Log(RF::constant(c.clone()))))
}

/// atan(arg) with the sign pulled out.
pub fn atan(arg: &RF) -> RF {
    if arg.is_zero() {
        return RF::zero();
    }
    if arg.num().lc().is_positive_like() {
        sym_rf(intern(TowerDef::Atan(arg.clone())))
    } else {
        -sym_rf(intern(TowerDef::Atan(-arg)))
    }
}

/// `base^(p/q)` with exact radicals.
pub fn pow_rational(base: &RF, p: i64, q: u32) -> Result<RF> {
    let g = p.unsigned_abs().gcd(&(q as u64));
    let (p, q) = if g > 1 { (p / g as i64, q / g as u32) } else { (p, q) };
    if q == 1 {
        return base.powi(p);
    }
    if base.is_zero() {
        return if p > 0 { Ok(RF::zero()) } else { Err(Error::DivisionByZero) };
    }
    root(base, q)?.powi(p)
}

/// Principal `m`-th root of `base`, as an expression over radical tower entries.
pub fn root(base: &RF, m: u32) -> Result<RF> {
    if m == 0 {
        return Err(Error::Invalid("zeroth root".into()));
    }
    if m == 1 || base.is_zero() {
        return Ok(base.clone());
    }
    if let Some(c) = base.constant_value() {
        if let Some(r) = c.root_exact(m) {
            return Ok(RF::constant(r));
        }
    }
    // root(N/D) = root(N * D^(m-1)) / D
    let (n, d) = (base.num().clone(), base.den().clone());
    let p = if d.is_one() { n } else { &n * &d.pow(m - 1) };
    let outside_den = RF::from_poly(d);
    let (c, factors) = squarefree(&p);
    let mut outside = RF::one();
    let mut inside = Poly::one();
    for (f, e) in factors {
        let whole = e / m;
        let part = e % m;
        if whole > 0 {
            outside = &outside * &RF::from_poly(f.pow(whole));
        }
        if part == 0 {
            continue;
        }
        if let Some(s) = RF::from_poly(f.clone()).as_symbol() {
            match s.tower_def().as_deref() {
                Some(TowerDef::Exp(a)) => {
                    outside = &outside * &exp(&a.scale(&Scalar::from_ratio(part as i64, m as i64)))?;
                    continue;
                }
                Some(TowerDef::Root { base: b, degree }) => {
                    let inner = RF::from_poly(b.num().pow(part));
                    outside = &outside * &root(&inner, degree * m)?;
                    continue;
                }
                _ => {}
            }
        }
        inside = &inside * &f.pow(part);
    }
    let (scalar_out, scalar_in) = split_scalar_root(&c, m);
    outside = outside.scale(&scalar_out);
    let inside = inside.scale(&scalar_in);
    let value = if inside.is_one() {
        RF::one()
    } else if let Some(k) = inside.constant_value() {
        match k.root_exact(m) {
            Some(r) => RF::constant(r),
            None => sym_rf(intern(TowerDef::Root { base: RF::constant(k), degree: m })),
        }
    } else {
        radical_with_reduced_degree(inside, m)
    };
    (&outside * &value).checked_div(&outside_den)
}

/// root_m(P) where P may be a perfect g-th power of a polynomial for g | m.
fn radical_with_reduced_degree(inside: Poly, m: u32) -> RF {
    let (c, factors) = squarefree(&inside);
    let mut g = m;
    for (_, e) in &factors {
        g = g.gcd(e);
    }
    if g > 1 && c.root_exact(g).is_some() {
        let cr = c.root_exact(g).unwrap();
        let mut reduced = Poly::constant(cr);
        for (f, e) in &factors {
            reduced = &reduced * &f.pow(e / g);
        }
        return sym_rf(intern(TowerDef::Root { base: RF::from_poly(reduced), degree: m / g }));
    }
    sym_rf(intern(TowerDef::Root { base: RF::from_poly(inside), degree: m }))
}

/// Splits a scalar `c` as `out^m * in` with `in` integral and free of small m-th power factors.
fn split_scalar_root(c: &Scalar, m: u32) -> (Scalar, Scalar) {
    if let Some(r) = c.root_exact(m) {
        return (r, Scalar::one());
    }
    if !c.is_real() {
        return (Scalar::one(), c.clone());
    }
    // c = n/d = n*d^(m-1) / d^m
    let n = c.re.numer().clone();
    let d = c.re.denom().clone();
    let mut k = &n * num_traits::pow(d.clone(), (m - 1) as usize);
    let mut out = BigRational::new(BigInt::one(), d);
    let neg = k.is_negative();
    if neg {
        k = -k;
    }
    let mut pr = BigInt::from(2);
    while &pr * &pr <= k && pr < BigInt::from(2000) {
        let pm = num_traits::pow(pr.clone(), m as usize);
        while (&k % &pm).is_zero() {
            k /= &pm;
            out *= BigRational::from_integer(pr.clone());
        }
        pr += 1;
    }
    if neg {
        if m % 2 == 1 {
            out = -out;
        } else {
            k = -k;
        }
    }
    (Scalar::from_rational(out), Scalar::from_rational(BigRational::from_integer(k)))
}

static DUMMY_LEVEL: LazyLock<RwLock<HashMap<Symbol, u32>>> = LazyLock::new(Default::default);

/// Name of the bound variable used by integral entries at nesting level `k`.
fn dummy(k: u32) -> Symbol {
    Symbol::named(&format!("_d{k}"))
}

fn symbol_level(s: Symbol) -> u32 {
    if let Some(l) = DUMMY_LEVEL.read().unwrap().get(&s) {
        return *l;
    }
    let name = s.name();
    let level = if let Some(k) = name.strip_prefix("_d").and_then(|k| k.parse::<u32>().ok()) {
        k
    } else {
        match s.tower_def().as_deref() {
            None => 0,
            Some(TowerDef::Exp(a) | TowerDef::Log(a) | TowerDef::Atan(a)) => level(a),
            Some(TowerDef::Root { base, .. }) => level(base),
            Some(TowerDef::Integral { integrand, var, at }) => {
                let mut l = level(integrand).max(symbol_level(*var));
                if let Some(at) = at {
                    l = l.max(level(at));
                }
                l
            }
        }
    };
    DUMMY_LEVEL.write().unwrap().insert(s, level);
    level
}

fn level(rf: &RF) -> u32 {
    rf.symbols().into_iter().map(symbol_level).max().unwrap_or(0)
}

/// The value F(at) of an antiderivative F of `integrand` with respect to `var`.
pub fn integral(integrand: &RF, var: Symbol, at: &RF) -> Result<RF> {
    if integrand.is_zero() {
        return Ok(RF::zero());
    }
    if !integrand.depends_on(var) {
        return Ok(integrand * at);
    }
    // polynomial integrands in `var` with coefficients free of it
    if integrand.is_polynomial() && !integrand.num().symbols().iter().any(|&s| s != var && s.depends_on(var)) {
        let mut acc = RF::zero();
        for (e, c) in integrand.num().coeffs_in(var) {
            let k = (e + 1) as i64;
            acc = &acc + &(&RF::from_poly(c).scale(&Scalar::from_ratio(1, k)) * &at.pow(e + 1));
        }
        return Ok(acc);
    }
    // the level is measured with `var` at level 0 so that alpha-equivalent
    // integrals get the same dummy
    let base = dummy(0);
    let probe = rename_var(integrand, var, base);
    let d = dummy(level(&probe) + 1);
    let inner = rename_var(&probe, base, d);
    let c = inner.num().lc();
    let unit = inner.scale(&c.inv());
    let theta = intern(TowerDef::Integral { integrand: unit, var: d, at: Some(at.clone()) });
    Ok(sym_rf(theta).scale(&c))
}

/// Antiderivative with respect to `var`, evaluated at `var` itself.
pub fn antiderivative(integrand: &RF, var: Symbol) -> Result<RF> {
    integral(integrand, var, &RF::var(var))
}

static DERIV_CACHE: LazyLock<RwLock<HashMap<(Symbol, Symbol), RF>>> = LazyLock::new(Default::default);

/// d(theta)/dv for a tower symbol.
fn tower_derivative(theta: Symbol, v: Symbol) -> RF {
    if let Some(d) = DERIV_CACHE.read().unwrap().get(&(theta, v)) {
        return d.clone();
    }
    let def = theta.tower_def().expect("tower symbol");
    let t = sym_rf(theta);
    let d = match &*def {
        TowerDef::Exp(a) => &diff(a, v) * &t,
        TowerDef::Log(a) => &diff(a, v) / a,
        TowerDef::Atan(a) => &diff(a, v) / &(&RF::one() + &(a * a)),
        TowerDef::Root { base, degree } => {
            let k = base.scale(&Scalar::from_int(*degree as i64));
            &(&diff(base, v) / &k) * &t
        }
        TowerDef::Integral { integrand, var, at } => {
            let at = at.clone().unwrap_or_else(|| RF::var(*var));
            let at_integrand = match at.as_symbol() {
                Some(s) => rename_var(integrand, *var, s),
                None => subst1(integrand, *var, &at).expect("integrand regular at its argument"),
            };
            let head = &at_integrand * &diff(&at, v);
            let di = diff(integrand, v);
            if di.is_zero() {
                head
            } else {
                &head + &integral(&di, *var, &at).expect("integral of derivative")
            }
        }
    };
    DERIV_CACHE.write().unwrap().insert((theta, v), d.clone());
    d
}

fn symbol_derivative(s: Symbol, v: Symbol) -> RF {
    if s == v {
        RF::one()
    } else if s.is_tower() && s.depends_on(v) {
        tower_derivative(s, v)
    } else {
        RF::zero()
    }
}

fn diff_poly(p: &Poly, v: Symbol) -> RF {
    let mut acc = RF::zero();
    for s in p.symbols() {
        if s != v && !(s.is_tower() && s.depends_on(v)) {
            continue;
        }
        let ds = symbol_derivative(s, v);
        if ds.is_zero() {
            continue;
        }
        acc = &acc + &(&RF::from_poly(p.derivative(s)) * &ds);
    }
    acc
}

/// Exact derivative with respect to `v`.
pub fn diff(f: &RF, v: Symbol) -> RF {
    if !f.depends_on(v) {
        return RF::zero();
    }
    let dn = diff_poly(f.num(), v);
    if f.den().is_one() {
        return dn;
    }
    let dd = diff_poly(f.den(), v);
    let den = RF::from_poly(f.den().clone());
    let q = &dn / &den;
    if dd.is_zero() {
        return q;
    }
    &q - &(&(f * &dd) / &den)
}

/// Simultaneous substitution of symbols (including inside tower definitions).
pub fn subst(f: &RF, map: &HashMap<Symbol, RF>) -> Result<RF> {
    if map.is_empty() {
        return Ok(f.clone());
    }
    let keys: Vec<Symbol> = map.keys().copied().collect();
    let touched = |s: Symbol| map.contains_key(&s) || (s.is_tower() && keys.iter().any(|&k| s.depends_on(k)));
    let syms = f.symbols();
    if !syms.iter().any(|&s| touched(s)) {
        return Ok(f.clone());
    }
    let mut values: HashMap<Symbol, RF> = HashMap::new();
    for &s in &syms {
        if let Some(v) = map.get(&s) {
            values.insert(s, v.clone());
        } else if touched(s) {
            values.insert(s, rebuild(s, map)?);
        }
    }
    let n = eval_poly(f.num(), &values);
    let d = eval_poly(f.den(), &values);
    let (nn, nd) = n.into_parts();
    let (dn, dd) = d.into_parts();
    if dn.is_zero() {
        return Err(Error::DivisionByZero);
    }
    RF::new(&nn * &dd, &nd * &dn)
}

/// Evaluates a polynomial with some symbols replaced by rational functions,
/// over a single common denominator.
fn eval_poly(p: &Poly, values: &HashMap<Symbol, RF>) -> RF {
    if values.is_empty() || p.is_constant() {
        return RF::from_poly(p.clone());
    }
    let mut maxdeg: HashMap<Symbol, u32> = HashMap::new();
    for (m, _) in p.terms() {
        for &(s, e) in m.iter() {
            if values.contains_key(&s) {
                let d = maxdeg.entry(s).or_insert(0);
                *d = (*d).max(e);
            }
        }
    }
    let mut num_pows: HashMap<(Symbol, u32), Poly> = HashMap::new();
    let mut den_pows: HashMap<(Symbol, u32), Poly> = HashMap::new();
    let pw = |cache: &mut HashMap<(Symbol, u32), Poly>, s: Symbol, e: u32, base: &Poly| -> Poly {
        if e == 0 {
            return Poly::one();
        }
        cache.entry((s, e)).or_insert_with(|| base.pow(e)).clone()
    };
    let mut acc = Poly::zero();
    for (m, c) in p.terms() {
        let mut term = Poly::constant(c.clone());
        let mut rest = Vec::new();
        let mut seen: BTreeSet<Symbol> = BTreeSet::new();
        for &(s, e) in m.iter() {
            if let Some(v) = values.get(&s) {
                seen.insert(s);
                let a = pw(&mut num_pows, s, e, v.num());
                let b = pw(&mut den_pows, s, maxdeg[&s] - e, v.den());
                term = &(&term * &a) * &b;
            } else {
                rest.push((s, e));
            }
        }
        for (&s, &dmax) in &maxdeg {
            if !seen.contains(&s) {
                let b = pw(&mut den_pows, s, dmax, values[&s].den());
                term = &term * &b;
            }
        }
        acc = &acc + &term.mul_monomial(&Monomial::from_pairs(rest));
    }
    let mut den = Poly::one();
    for (&s, &dmax) in &maxdeg {
        den = &den * &pw(&mut den_pows, s, dmax, values[&s].den());
    }
    RF::new(acc, den).expect("nonzero denominators")
}

fn rebuild(s: Symbol, map: &HashMap<Symbol, RF>) -> Result<RF> {
    let def = s.tower_def().expect("tower");
    match &*def {
        TowerDef::Exp(a) => exp(&subst(a, map)?),
        TowerDef::Log(a) => log(&subst(a, map)?),
        TowerDef::Atan(a) => Ok(atan(&subst(a, map)?)),
        TowerDef::Root { base, degree } => root(&subst(base, map)?, *degree),
        TowerDef::Integral { integrand, var, at } => {
            let mut inner_map = map.clone();
            inner_map.remove(var);
            let i2 = subst(integrand, &inner_map)?;
            let at = at.clone().unwrap_or_else(|| RF::var(*var));
            let at2 = subst(&at, map)?;
            integral(&i2, *var, &at2)
        }
    }
}

/// Renames `from` to `to` throughout, rebuilding tower entries without renormalizing
/// them, so that renaming back restores `f` exactly.
pub fn rename_var(f: &RF, from: Symbol, to: Symbol) -> RF {
    if from == to {
        return f.clone();
    }
    let mut map = HashMap::new();
    for s in f.symbols() {
        if s == from {
            map.insert(s, to);
        } else if s.is_tower() && s.depends_on(from) {
            map.insert(s, rename_tower(s, from, to));
        }
    }
    if map.is_empty() {
        f.clone()
    } else {
        f.rename(&map)
    }
}

fn rename_tower(s: Symbol, from: Symbol, to: Symbol) -> Symbol {
    let def = s.tower_def().expect("tower");
    let r = |a: &RF| rename_var(a, from, to);
    intern(match &*def {
        TowerDef::Exp(a) => TowerDef::Exp(r(a)),
        TowerDef::Log(a) => TowerDef::Log(r(a)),
        TowerDef::Atan(a) => TowerDef::Atan(r(a)),
        TowerDef::Root { base, degree } => TowerDef::Root { base: r(base), degree: *degree },
        TowerDef::Integral { integrand, var, at } => TowerDef::Integral {
            integrand: if *var == from { integrand.clone() } else { r(integrand) },
            var: *var,
            at: Some(r(&at.clone().unwrap_or_else(|| RF::var(*var)))),
        },
    })
}

/// Convenience: substitute a single symbol.
pub fn subst1(f: &RF, s: Symbol, value: &RF) -> Result<RF> {
    let mut map = HashMap::new();
    map.insert(s, value.clone());
    subst(f, &map)
}
