//! Root reduction of the numerator cubic and the AIL8 -> AIL4 -> AIL2/AIL1 pipeline.

use abelkit::cli::parse_settings;
use abelkit::ode::RationalODE;
use abelkit::reduce::{reduce_by_roots, split_to_normal_form};

fn main() -> abelkit::Result<()> {
    for src in ["y' = (y^3 - y)/(x*y + 1)", "y' = (y - 1)^2*(y + 2)/(x*y + 1)", "y' = (y - 3)^3/(x*y + 1)"] {
        let e = RationalODE::parse(src)?;
        let (r, tr, prof) = reduce_by_roots(&e, None)?;
        println!("{e}\n  roots {:?}\n  via {tr}\n  gives {r}", prof.pattern);
    }
    for set in ["s1=1,s0=0,r1=0,r0=1,a3=0,a2=0,a1=0,a0=-1", "s1=2,s0=1,r1=1,r0=3,a3=1,a2=-1,a1=0,a0=2"] {
        let s = split_to_normal_form(&parse_settings(set)?, false)?;
        println!("\nAIL8 {set}\n  -> {}", s.normal_form);
        for (k, v) in &s.params {
            println!("  {k} = {v}");
        }
        if let Some(t) = s.target()? {
            println!("  {t}");
        }
    }
    Ok(())
}
