//! Building family members, recognizing their shape, and the absolute invariant.

use abelkit::cli::parse_settings;
use abelkit::ode::{absolute_invariant, construct_family, shape_classify, Family, FamilyParams, RationalODE};

fn main() -> abelkit::Result<()> {
    for fam in [Family::Ail8, Family::Air10, Family::Ail2, Family::Ail1] {
        let e = construct_family(fam, &FamilyParams::new())?;
        println!("{fam:<6} {e}");
    }
    let e = construct_family(Family::Ail8, &parse_settings("s1=1,s0=2,r1=-1,r0=3,a3=1,a2=0,a1=-2,a0=1")?)?;
    let shape = shape_classify(&e);
    let tags: Vec<&str> = shape.tags.iter().map(|s| s.tag()).collect();
    println!("\n{e}\n  shapes {}", tags.join(", "));
    let riccati = RationalODE::parse("y' = x*y^2 - y + 1/x")?;
    let tags: Vec<&str> = shape_classify(&riccati).tags.iter().map(|s| s.tag()).collect();
    println!("{riccati}\n  shapes {}", tags.join(", "));
    let abel = RationalODE::parse("y' = y^3 + x*y^2")?;
    match absolute_invariant(&abel)? {
        Some(j) => println!("{abel}\n  invariant {j}"),
        None => println!("{abel}\n  invariant undefined"),
    }
    Ok(())
}
