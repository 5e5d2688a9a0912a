//! Parsing, canonical forms and differentiation.

use abelkit::parse::{parse_expr, parse_value};
use abelkit::symbol::{x, y};
use abelkit::tower::diff;

fn main() -> abelkit::Result<()> {
    for src in ["(x^2 - 1)/(x - 1)", "exp(log(x)/2)*sqrt(x)", "atan(y/x) + log(x*y)", "Int(s*exp(s), s, y)"] {
        let tree = parse_expr(src)?;
        let value = tree.normalize()?;
        println!("{src}\n  tree      {tree}\n  canonical {value}");
        println!("  d/dx      {}\n  d/dy      {}", diff(&value, x()), diff(&value, y()));
    }
    let f = parse_value("diff(x^3*exp(y), x)")?;
    println!("diff(x^3*exp(y), x) = {f}");
    Ok(())
}
