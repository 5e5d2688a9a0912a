//! Replaying the catalog derivations and generating inverse classes.

use abelkit::catalog::{generate_inverse_of_entry, Catalog};

fn main() -> abelkit::Result<()> {
    let cat = Catalog::load()?;
    for entry in &cat.entries {
        let r = cat.verify_fit(&entry.id)?;
        println!("{:<16} {:<4} {:>2} steps  identity {}", entry.id, entry.class, r.steps.len(), r.identity);
    }
    let c = cat.get("C")?;
    println!("\nentry C: {}", c.equation);
    if let Some(psi) = cat.first_integral("C")? {
        println!("  first integral {psi}");
    }
    println!();
    for entry in &cat.entries {
        if let Ok(inv) = generate_inverse_of_entry(&entry.id) {
            println!("{} inverted: {}\n  abel {}  catalog {:?}  check {:?}", entry.id, inv.equation, inv.abel, inv.known, inv.check);
        }
    }
    Ok(())
}
