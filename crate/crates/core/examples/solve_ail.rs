//! First integrals of AIL8 members by quadrature.

use abelkit::cli::parse_settings;
use abelkit::solve::{air_to_riccati, solve_ail};

fn main() -> abelkit::Result<()> {
    for set in [
        "s1=0,s0=1,r1=1,r0=0,a3=0,a2=0,a1=0,a0=1",
        "s1=1,s0=-1,r1=0,r0=3,a3=0,a2=1,a1=0,a0=0",
        "s1=1,s0=0,r1=0,r0=1,a3=1,a2=0,a1=-2,a0=1",
    ] {
        let fi = solve_ail(&parse_settings(set)?)?;
        println!("{set}\n  psi = {}\n  {} ({})", fi.psi, fi.method.tag(), fi.check);
    }
    let ric = air_to_riccati(&parse_settings("s2=1,s1=0,s0=0,r2=0,r1=0,r0=1,a3=0,a2=0,a1=0,a0=1")?)?;
    println!("\nAIR member, inverted: {}", ric.ode()?);
    Ok(())
}
