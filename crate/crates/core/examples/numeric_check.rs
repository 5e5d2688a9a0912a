//! Numerical integration and the drift of a first integral along the trajectory.

use abelkit::numeric::{constancy_check, integrate_ode, NumericConfig};
use abelkit::ode::RationalODE;
use abelkit::parse::parse_value;

fn main() -> abelkit::Result<()> {
    let e = RationalODE::parse("y' = -1/(y + x)")?;
    let cfg = NumericConfig::default();
    let tr = integrate_ode(&e, 1.0, 1.0, 2.0, &cfg)?;
    println!("{e} from (1, 1): y(2) = {:.12}, {} steps", tr.last().1, tr.stats.steps);

    for psi in ["(x + y - 1)*exp(y)", "x*exp(y)"] {
        let r = constancy_check(&e, &parse_value(psi)?, 1.0, 1.0, 2.0, &cfg)?;
        println!("psi = {psi:<20} drift {:.2e}  passed {}", r.max_drift, r.passed());
    }

    let blowup = integrate_ode(&RationalODE::parse("y' = y^2")?, 0.0, 1.0, 2.0, &cfg)?;
    println!("y' = y^2 from (0, 1) stops at x = {:.6} (near pole: {})", blowup.last().0, blowup.near_pole);

    let r = constancy_check(&e, &parse_value("(x + y - 1)*exp(y)")?, 1.0, 1.0, 1.5, &cfg)?;
    print!("{}", r.to_csv());
    Ok(())
}
