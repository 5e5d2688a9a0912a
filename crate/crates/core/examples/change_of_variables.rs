//! Point transforms, inversion, composition and transport of first integrals.

use abelkit::ode::RationalODE;
use abelkit::parse::parse_value;
use abelkit::solve::check_first_integral;
use abelkit::transform::{compose, gtib_reduction, Transform};
use abelkit::scalar::Scalar;

fn main() -> abelkit::Result<()> {
    let e = RationalODE::parse("y' = -1/(y + x)")?;
    let psi = parse_value("(x + y - 1)*exp(y)")?;
    let tr = Transform::from_map(parse_value("2*t + 1")?, &parse_value("t*u")?)?;
    let moved = tr.apply(&e)?;
    let moved_psi = tr.pull_back(&psi)?;
    println!("{e}\n  under {tr}\n  becomes {moved}");
    println!("  first integral {moved_psi} ({})", check_first_integral(&moved, &moved_psi)?);

    let inv = Transform::Inversion.apply(&e)?;
    println!("inverted: {inv}");

    let round = compose(&[tr.clone(), tr.inverse()?])?;
    println!("T then T^-1 gives back the equation: {}", round.apply(&e)? == e);

    for (n, d) in [(2, 1), (1, 3)] {
        let t = gtib_reduction(&Scalar::from_ratio(n, d))?;
        println!("GTIB lambda = {n}/{d}: {} transform {}", t.kind(), t);
    }
    println!("{}", serde_json::to_string_pretty(&tr.to_json()).expect("json"));
    Ok(())
}
