mod common;

use std::collections::HashMap;

use abelkit::catalog::Catalog;
use abelkit::eval::base_symbols;
use abelkit::numeric::{constancy_check, NumericConfig};
use abelkit::ode::{construct_family, Family, RationalODE};
use abelkit::solve::{check_first_integral, solve_ail};
use abelkit::symbol::{t, x, y, Symbol};
use abelkit::tower;
use abelkit::transform::{compose, invert_xy, Transform};
use abelkit::{Error, RationalFunction as RF};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rational() -> impl Strategy<Value = RF> {
    (-4i64..=4, 1i64..=3).prop_map(|(n, d)| RF::from_ratio(n, d))
}

/// y' = Σ c_ij x^i y^j over a Σ d_ij x^i y^j with i, j ≤ 2, nonzero denominator.
fn rational_ode() -> impl Strategy<Value = RationalODE> {
    (prop::collection::vec(rational(), 9), prop::collection::vec(rational(), 9)).prop_filter_map("zero rhs", |(n, d)| {
        let poly = |cs: &[RF]| {
            let mut acc = RF::zero();
            for (k, c) in cs.iter().enumerate() {
                acc = &acc + &(c * &(&RF::var(x()).pow((k / 3) as u32) * &RF::var(y()).pow((k % 3) as u32)));
            }
            acc
        };
        let (num, den) = (poly(&n), poly(&d));
        if num.is_zero() || den.is_zero() {
            return None;
        }
        Some(RationalODE::new(&num / &den))
    })
}

/// Point transform x = (a t + b)/(c t + d), y = p u + q with p, q polynomial in t.
fn point_transform() -> impl Strategy<Value = Transform> {
    (rational(), rational(), rational(), rational(), rational(), rational(), rational()).prop_filter_map(
        "singular",
        |(a, b, c, d, p0, p1, q0)| {
            if (&(&a * &d) - &(&b * &c)).is_zero() || p0.is_zero() {
                return None;
            }
            let tv = RF::var(t());
            let f = &(&(&a * &tv) + &b) / &(&(&c * &tv) + &d);
            Some(Transform::point(f, p0, &(&p1 * &tv) + &q0))
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, rng_algorithm: prop::test_runner::RngAlgorithm::ChaCha, ..ProptestConfig::default() })]

    #[test]
    fn inversion_is_an_involution(e in rational_ode()) {
        prop_assume!(e.rhs.depends_on(x()) || e.rhs.depends_on(y()));
        let twice = invert_xy(&invert_xy(&e).unwrap()).unwrap();
        prop_assert_eq!(twice, e);
    }

    #[test]
    fn transform_then_inverse_is_identity(e in rational_ode(), tr in point_transform()) {
        let both = compose(&[tr.clone(), tr.inverse().unwrap()]).unwrap();
        prop_assert_eq!(both.apply(&e).unwrap(), e.clone());
        prop_assert_eq!(tr.inverse().unwrap().apply(&tr.apply(&e).unwrap()).unwrap(), e);
    }

    #[test]
    fn point_transforms_keep_first_kind(f in prop::collection::vec(rational(), 4), tr in point_transform()) {
        prop_assume!(!f[3].is_zero());
        let yv = RF::var(y());
        let xv = RF::var(x());
        let rhs = f.iter().rev().fold(RF::zero(), |acc, c| &(&acc * &yv) + &(c * &(&xv + &RF::one())));
        let out = tr.apply(&RationalODE::new(rhs)).unwrap();
        let fk = out.first_kind();
        prop_assert!(fk.is_some(), "{}", out);
        prop_assert!(!fk.unwrap().f[3].is_zero());
    }

    #[test]
    fn first_integrals_travel_with_transforms(tr in point_transform(), seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = common::generic_ail8(&mut rng, false);
        let e = construct_family(Family::Ail8, &p).unwrap();
        let psi = solve_ail(&p).unwrap().psi;
        let moved = tr.apply(&e).unwrap();
        let pulled = tr.pull_back(&psi).unwrap();
        prop_assert!(check_first_integral(&moved, &pulled).is_ok());
    }
}

/// Substitutes `value` for every free parameter of `f`.
fn bind(f: &RF, names: &[Symbol], value: &RF) -> Result<RF, Error> {
    let map: HashMap<Symbol, RF> = names.iter().map(|&s| (s, value.clone())).collect();
    tower::subst(f, &map)
}

/// Drift of `psi` along `e` from three regular random starts.
fn numeric_witness(e: &RationalODE, psi: &RF, rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let cfg = NumericConfig::default();
    let mut worst = 0.0_f64;
    let mut found = 0;
    for _ in 0..60 {
        let (x0, y0) = (rng.gen_range(0.3..2.0), rng.gen_range(0.3..2.0));
        let r = match constancy_check(e, psi, x0, y0, x0 + 0.25, &cfg) {
            Ok(r) if r.trajectory.completed() => r,
            _ => continue,
        };
        worst = worst.max(r.max_drift);
        found += 1;
        if found == 3 {
            return Ok(worst);
        }
    }
    Err(format!("no three regular starting points for {e}"))
}

#[test]
fn solver_first_integrals_are_numerically_constant() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..4 {
        let p = common::generic_ail8(&mut rng, false);
        let e = construct_family(Family::Ail8, &p).unwrap();
        let psi = solve_ail(&p).unwrap().psi;
        let drift = numeric_witness(&e, &psi, &mut rng).unwrap();
        assert!(drift < 1e-6, "set {i} {}: drift {drift:e}", common::settings(&p));
    }
}

#[test]
fn catalog_first_integrals_are_numerically_constant() {
    let cat = Catalog::load().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut checked = Vec::new();
    for entry in &cat.entries {
        let Some(psi) = cat.first_integral(&entry.id).unwrap() else { continue };
        let report = cat.verify_fit(&entry.id).unwrap();
        let free: Vec<Symbol> = base_symbols(&psi)
            .into_iter()
            .chain(report.result.params())
            .filter(|&s| s != x() && s != y())
            .collect();
        let value = RF::from_ratio(3, 2);
        let e = RationalODE::new(bind(&report.result.rhs, &free, &value).unwrap());
        let psi = bind(&psi, &free, &value).unwrap();
        if e.rhs.symbols().iter().any(|s| s.name() == "I") || format!("{e}").contains('I') {
            continue;
        }
        let drift = numeric_witness(&e, &psi, &mut rng).unwrap_or_else(|m| panic!("{}: {m}", entry.id));
        assert!(drift < 1e-6, "{}: drift {drift:e}", entry.id);
        checked.push(entry.id.clone());
    }
    assert!(checked.len() >= 6, "{checked:?}");
}
