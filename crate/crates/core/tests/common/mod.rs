#![allow(dead_code)]

use abelkit::ode::FamilyParams;
use abelkit::RationalFunction as RF;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn small_rational(rng: &mut ChaCha8Rng) -> RF {
    RF::from_ratio(rng.gen_range(-6..=6), rng.gen_range(1..=4))
}

pub fn nonzero_rational(rng: &mut ChaCha8Rng) -> RF {
    loop {
        let v = small_rational(rng);
        if !v.is_zero() {
            return v;
        }
    }
}

pub fn omega(p: &FamilyParams) -> RF {
    &(&p["r1"] * &p["s0"]) - &(&p["r0"] * &p["s1"])
}

/// Random AIL8 parameters with a nonzero cubic; `s1 != 0` when asked, and ω ≠ 0.
pub fn generic_ail8(rng: &mut ChaCha8Rng, s1_nonzero: bool) -> FamilyParams {
    loop {
        let mut p = FamilyParams::new();
        for n in ["s1", "s0", "r1", "r0", "a3", "a2", "a1", "a0"] {
            p.insert(n.into(), small_rational(rng));
        }
        if s1_nonzero && p["s1"].is_zero() {
            continue;
        }
        let cubic_zero = ["a3", "a2", "a1", "a0"].iter().all(|n| p[*n].is_zero());
        if !cubic_zero && !omega(&p).is_zero() {
            return p;
        }
    }
}

/// Random AIL8 parameters with ω = r1 s0 − r0 s1 = 0 and s1 ≠ 0.
pub fn omega_zero_ail8(rng: &mut ChaCha8Rng) -> FamilyParams {
    let mut p = generic_ail8(rng, true);
    let r0 = &(&p["r1"] * &p["s0"]) / &p["s1"];
    p.insert("r0".into(), r0);
    p
}

pub fn settings(p: &FamilyParams) -> String {
    p.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(",")
}

/// Generic AIL8 parameters: every coefficient nonzero and ω ≠ 0.
pub fn dense_ail8(rng: &mut ChaCha8Rng) -> FamilyParams {
    loop {
        let mut p = FamilyParams::new();
        for n in ["s1", "s0", "r1", "r0", "a3", "a2", "a1", "a0"] {
            p.insert(n.into(), nonzero_rational(rng));
        }
        if !omega(&p).is_zero() {
            return p;
        }
    }
}
