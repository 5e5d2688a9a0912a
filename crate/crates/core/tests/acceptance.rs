//! End-to-end acceptance criteria. Each criterion prints one PASS/FAIL line; the
//! test fails if any of them fails.

use std::io::Write;

mod common;

use std::time::{Duration, Instant};

use abelkit::catalog::Catalog;
use abelkit::cli;
use abelkit::eval::{BigC, BigEvaluator};
use abelkit::numeric::{constancy_check, integrate_rk4, NumericConfig};
use abelkit::ode::{construct_family, is_constant_invariant, Family, FamilyParams, RationalODE};
use abelkit::parse::{parse_ode, parse_value};
use abelkit::reduce::{ail_branch, ail_split, NormalForm};
use abelkit::scalar::Scalar;
use abelkit::solve::{solve_ail, verify_first_integral};
use abelkit::symbol::{x, y, Symbol};
use abelkit::transform::{gtib_reduction, invert_xy};
use abelkit::tower::diff;
use abelkit::RationalFunction as RF;
use common::{dense_ail8, generic_ail8, nonzero_rational, omega_zero_ail8, small_rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn sym(n: &str) -> RF {
    RF::var(Symbol::named(n))
}

fn catalog_suite() -> Outcome {
    let cat = Catalog::load().map_err(err)?;
    check(cat.entries.len() == 14, || format!("{} entries", cat.entries.len()))?;
    let mut bad = Vec::new();
    for e in &cat.entries {
        let r = cat.verify_fit(&e.id).map_err(err)?;
        if !r.identity {
            bad.push(e.id.clone());
        }
    }
    check(bad.is_empty(), || format!("identity failed for {bad:?}"))?;
    // the radical, reparametrized and Gaussian-unit derivations are among them
    for id in ["1", "C", "kamke-151", "liouville-2xy2", "appell-general"] {
        cat.get(id).map_err(err)?;
    }
    let a = cli::run(["abelkit", "fit", "--all", "--json"]);
    let b = cli::run(["abelkit", "fit", "--all", "--json"]);
    check(a.code == 0, || format!("fit --all exited {}", a.code))?;
    check(a.payload == b.payload, || "fit --all output is not deterministic".into())?;
    let v: Value = serde_json::from_str(&a.payload).map_err(err)?;
    check(v["verified"] == 14, || format!("fit --all verified {}", v["verified"]))?;
    Ok("14/14 identities exact, fit --all deterministic".into())
}

fn aia_inversion() -> Outcome {
    let aia = construct_family(Family::Aia16, &FamilyParams::new()).map_err(err)?;
    let inv = construct_family(Family::InvAia, &FamilyParams::new()).map_err(err)?;
    let got = invert_xy(&aia).map_err(err)?;
    check(got == inv, || format!("got {got}"))?;
    check(invert_xy(&got).map_err(err)? == aia, || "inversion is not an involution".into())?;
    Ok("symbolic 16-parameter inversion matches the (a,b)<->(s,r) exchange".into())
}

fn ail_solver() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut formal = 0;
    for i in 0..100 {
        let p = generic_ail8(&mut rng, false);
        let fi = solve_ail(&p).map_err(|e| format!("set {i}: {e}"))?;
        let e = construct_family(Family::Ail8, &p).map_err(err)?;
        check(verify_first_integral(&e, &fi.psi), || format!("set {i}: residual nonzero for {}", fi.psi))?;
        formal += (fi.method.tag() == "formal") as usize;
    }
    Ok(format!("100/100 first integrals verified exactly ({formal} with formal integrals)"))
}

fn split_pipeline() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut ail2, mut ail1) = (0, 0);
    for i in 0..50 {
        let mut p = generic_ail8(&mut rng, true);
        if i % 5 == 4 {
            // force k3 = 0 so the branch lands on AIL_1
            let (s1, r1) = (p["s1"].clone(), p["r1"].clone());
            let inner = &(&(&(&(&p["a2"] * &s1) - &(&p["a3"] * &r1)) * &r1) - &(&p["a1"] * &s1.pow(2))) * &r1;
            p.insert("a0".into(), -(&inner / &s1.pow(3)));
            if ["a3", "a2", "a1", "a0"].iter().all(|n| p[*n].is_zero()) || common::omega(&p).is_zero() {
                continue;
            }
        }
        let e = construct_family(Family::Ail8, &p).map_err(err)?;
        let split = ail_split(&p).map_err(|e| format!("set {i}: {e}"))?;
        let k = split.k.clone().ok_or_else(|| format!("set {i}: no k"))?;
        let ail4 = split.target().map_err(err)?.ok_or("no AIL_4 target")?;
        let mapped = split.transform().map_err(err)?.apply(&e).map_err(err)?;
        check(mapped == ail4, || format!("set {i}: chain gives {mapped}, expected {ail4}"))?;
        let branch = ail_branch(&k, false).map_err(|e| format!("set {i}: {e}"))?;
        let expect = if !k[3].is_zero() {
            NormalForm::Ail2
        } else if !k[2].is_zero() {
            NormalForm::Ail1
        } else {
            NormalForm::ConstantInvariant
        };
        check(branch.normal_form == expect, || format!("set {i}: branch {}", branch.normal_form))?;
        if let Some(target) = branch.target().map_err(err)? {
            let got = branch.transform().map_err(err)?.apply(&ail4).map_err(err)?;
            check(got == target, || format!("set {i}: branch gives {got}, expected {target}"))?;
        }
        match branch.normal_form {
            NormalForm::Ail2 => ail2 += 1,
            NormalForm::Ail1 => ail1 += 1,
            _ => {}
        }
    }
    check(ail1 > 0 && ail2 > 0, || format!("patterns not both reached: AIL_2 {ail2}, AIL_1 {ail1}"))?;
    let mut p = FamilyParams::new();
    for (n, v) in [("s1", 1), ("s0", 0), ("r1", 0), ("r0", 1)] {
        p.insert(n.into(), RF::from_int(v));
    }
    let k = ail_split(&p).map_err(err)?.k.ok_or("no k")?;
    let pinned = [-sym("a3"), sym("a2"), -sym("a1"), sym("a0")];
    check(k == pinned, || format!("regression: k = {:?}", k.iter().map(|v| v.to_string()).collect::<Vec<_>>()))?;
    Ok(format!("chain reproduces AIL_4 on {} sets, branches AIL_2 x{ail2}, AIL_1 x{ail1}, pinned k ok", ail1 + ail2))
}

fn constant_invariant() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..10 {
        let p = omega_zero_ail8(&mut rng);
        let e = construct_family(Family::Ail8, &p).map_err(err)?;
        check(is_constant_invariant(&e).map_err(err)?, || format!("omega = 0 set {i} not constant"))?;
    }
    for i in 0..10 {
        let mut p = FamilyParams::new();
        p.insert("k3".into(), RF::zero());
        p.insert("k2".into(), RF::zero());
        p.insert("k1".into(), nonzero_rational(&mut rng));
        p.insert("k0".into(), small_rational(&mut rng));
        let e = construct_family(Family::Ail4, &p).map_err(err)?;
        check(is_constant_invariant(&e).map_err(err)?, || format!("k3 = k2 = 0 set {i} not constant"))?;
    }
    for i in 0..20 {
        let p = dense_ail8(&mut rng);
        let e = construct_family(Family::Ail8, &p).map_err(err)?;
        check(!is_constant_invariant(&e).map_err(err)?, || format!("generic set {i} reported constant"))?;
    }
    Ok("omega = 0 x10 true, k3 = k2 = 0 x10 true, generic (all coefficients nonzero) x20 false".into())
}

fn gtib() -> Outcome {
    let mut done = Vec::new();
    for (n, d) in [(2, 1), (1, 2), (1, 3)] {
        let lambda = Scalar::from_ratio(n, d);
        let factor = &Scalar::one() - &lambda;
        let mut p = FamilyParams::new();
        p.insert("lambda".into(), RF::constant(lambda.clone()));
        for a in ["a3", "a2", "a1", "a0"] {
            p.insert(a.into(), sym(a).scale(&factor));
        }
        let e = construct_family(Family::Gtib, &p).map_err(err)?;
        let t = gtib_reduction(&lambda).map_err(err)?;
        let got = t.apply(&e).map_err(err)?;
        let ail8 = construct_family(Family::Ail8, &FamilyParams::new()).map_err(err)?;
        check(got == ail8, || format!("lambda = {lambda}: {got}"))?;
        done.push(format!("{lambda} via {}", t.kind()));
    }
    Ok(format!("GTIB with a_i -> (1-lambda) a_i maps onto AIL8 for lambda = {}", done.join(", ")))
}

/// Root of (x + y − 1) e^y = e by bisection.
fn implicit_y(px: f64) -> f64 {
    let g = |v: f64| (px + v - 1.0) * v.exp() - std::f64::consts::E;
    let (mut lo, mut hi) = (-5.0_f64, 1.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid
        } else {
            lo = mid
        }
    }
    0.5 * (lo + hi)
}

fn numeric() -> Outcome {
    let e = RationalODE::parse("y' = -1/(y+x)").map_err(err)?;
    let cfg = NumericConfig::default();
    let good = parse_value("(x+y-1)*exp(y)").map_err(err)?;
    let bad = parse_value("x*exp(y)").map_err(err)?;
    let d = constancy_check(&e, &good, 1.0, 1.0, 2.0, &cfg).map_err(err)?.max_drift;
    check(d < 1e-8, || format!("drift {d:e}"))?;
    let n = constancy_check(&e, &bad, 1.0, 1.0, 2.0, &cfg).map_err(err)?.max_drift;
    check(n > 1e-3, || format!("negative control drift {n:e}"))?;
    let exact = implicit_y(2.0);
    let e1 = (integrate_rk4(&e, 1.0, 1.0, 2.0, 20).map_err(err)? - exact).abs();
    let e2 = (integrate_rk4(&e, 1.0, 1.0, 2.0, 40).map_err(err)? - exact).abs();
    let ratio = e1 / e2;
    check((ratio - 16.0).abs() <= 0.2 * 16.0, || format!("order ratio {ratio}"))?;
    Ok(format!("drift {d:.1e}, negative control {n:.1e}, RK4 ratio {ratio:.2}"))
}

fn corpus() -> Result<Vec<(String, bool)>, String> {
    let v: Value = serde_json::from_str(abelkit::catalog::EMBEDDED).map_err(err)?;
    fn walk(v: &Value, key: Option<&str>, out: &mut Vec<(String, bool)>) {
        match v {
            Value::Object(m) => m.iter().for_each(|(k, v)| walk(v, Some(k), out)),
            Value::Array(a) => a.iter().for_each(|v| walk(v, key, out)),
            Value::String(s) if matches!(key, Some("equation" | "F" | "Y")) => {
                out.push((s.clone(), key == Some("equation")))
            }
            _ => {}
        }
    }
    let mut out = Vec::new();
    walk(&v, None, &mut out);
    let cat = Catalog::load().map_err(err)?;
    for e in &cat.entries {
        if let Some(psi) = cat.first_integral(&e.id).map_err(err)? {
            out.push((psi.to_string(), false));
        }
    }
    Ok(out)
}

fn read(s: &str, eq: bool) -> Result<RF, String> {
    if eq { parse_ode(s) } else { parse_value(s) }.map_err(|e| format!("`{s}`: {e}"))
}

const OPS: [&str; 10] = ["+", "-", "*", "/", "^", "exp", "log", "atan", "sqrt", "neg"];

fn random_expr(rng: &mut ChaCha8Rng, depth: u32) -> String {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..4) {
            0 => "x".into(),
            1 => "y".into(),
            2 => format!("{}", rng.gen_range(1..=5)),
            _ => format!("({}/{})", rng.gen_range(-5..=5), rng.gen_range(1..=4)),
        };
    }
    let a = random_expr(rng, depth - 1);
    match OPS[rng.gen_range(0..OPS.len())] {
        op @ ("+" | "-" | "*" | "/") => format!("({a} {op} {})", random_expr(rng, depth - 1)),
        "^" => format!("({a})^{}", rng.gen_range(2..=3)),
        "neg" => format!("(-{a})"),
        "log" | "sqrt" => format!("{}(1 + ({a})^2)", OPS[rng.gen_range(6..=8)]),
        f => format!("{f}({a})"),
    }
}

fn big_at(ev: &BigEvaluator, f: &RF, vx: &BigC, vy: &BigC) -> Option<BigC> {
    let env = [(x(), vx.clone()), (y(), vy.clone())].into_iter().collect();
    ev.eval(f, &env).ok()
}

fn parser_and_diff() -> Outcome {
    let corpus = corpus()?;
    check(corpus.len() >= 30, || format!("only {} corpus expressions", corpus.len()))?;
    for (src, eq) in &corpus {
        let first = read(src, *eq)?;
        let printed = first.to_string();
        let second = read(&printed, false)?;
        check(first == second, || format!("`{src}` re-read as {second}"))?;
        check(second.to_string() == printed, || format!("`{src}` prints unstably"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let ev = BigEvaluator::new(50, 8);
    let h = ev.real(1e-8);
    let two_h = ev.add(&h, &h);
    let mut tested = 0;
    let mut worst = 0.0_f64;
    while tested < 100 {
        let src = random_expr(&mut rng, 4);
        let f = read(&src, false)?;
        if f.is_constant() {
            continue;
        }
        let var = if rng.gen_bool(0.5) { x() } else { y() };
        let df = diff(&f, var);
        let (px, py) = (rng.gen_range(0.3..1.7), rng.gen_range(0.3..1.7));
        let (vx, vy) = (ev.real(px), ev.real(py));
        let (plus, minus) = if var == x() {
            ((ev.add(&vx, &h), vy.clone()), (ev.sub(&vx, &h), vy.clone()))
        } else {
            ((vx.clone(), ev.add(&vy, &h)), (vx.clone(), ev.sub(&vy, &h)))
        };
        let (Some(d), Some(fp), Some(fm)) =
            (big_at(&ev, &df, &vx, &vy), big_at(&ev, &f, &plus.0, &plus.1), big_at(&ev, &f, &minus.0, &minus.1))
        else {
            continue;
        };
        let fd = ev.div(&ev.sub(&fp, &fm), &two_h).map_err(err)?;
        let gap = ev.to_f64(&ev.magnitude(&ev.sub(&d, &fd)));
        let size = ev.to_f64(&ev.magnitude(&d));
        if !gap.is_finite() || !size.is_finite() || size > 1e12 {
            continue;
        }
        let rel = gap / size.max(1e-30);
        worst = worst.max(rel);
        check(rel <= 1e-6, || format!("d/d{}({src}) at ({px}, {py}): relative gap {rel:e}", if var == x() { "x" } else { "y" }))?;
        tested += 1;
    }
    Ok(format!("{} corpus expressions stable; 100 derivatives within {worst:.1e} of finite differences", corpus.len()))
}

#[test]
fn acceptance() {
    let criteria = [
        Criterion { id: 1, name: "catalog suite", budget: Some(Duration::from_secs(60)), run: catalog_suite },
        Criterion { id: 2, name: "AIA inversion", budget: Some(Duration::from_secs(1)), run: aia_inversion },
        Criterion { id: 3, name: "AIL solver", budget: Some(Duration::from_secs(120)), run: ail_solver },
        Criterion { id: 4, name: "split pipeline", budget: None, run: split_pipeline },
        Criterion { id: 5, name: "constant-invariant oracle", budget: None, run: constant_invariant },
        Criterion { id: 6, name: "GTIB reduction", budget: None, run: gtib },
        Criterion { id: 7, name: "numeric cross-check", budget: None, run: numeric },
        Criterion { id: 8, name: "parser round-trip and derivatives", budget: None, run: parser_and_diff },
    ];
    let mut failed = Vec::new();
    for c in criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let took = start.elapsed();
        let outcome = match (outcome, c.budget) {
            (Ok(_), Some(b)) if took > b => Err(format!("took {took:.2?}, budget {b:?}")),
            (o, _) => o,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d.clone()),
            Err(d) => ("FAIL", d.clone()),
        };
        writeln!(std::io::stdout(), "[{tag}] {}. {} ({took:.2?}): {detail}", c.id, c.name).unwrap();
        if outcome.is_err() {
            failed.push(c.id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
