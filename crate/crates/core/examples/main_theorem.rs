//! Smirnov class membership against the existence of an `H¹` witness.
//!
//! `cargo run --release --example main_theorem`

use ae_toolkit::cli::Catalog;
use ae_toolkit::hardy::equivalence_harness;
use ae_toolkit::Error;

fn main() -> ae_toolkit::Result<()> {
    let catalog = Catalog::default();
    for entry in &catalog.functions.functions {
        let f = catalog.build_function(entry)?;
        match equivalence_harness(&f) {
            Ok(rep) => {
                let witness = rep.witness.as_ref().map(|w| format!("m={} s={} q={}", w.m, w.s, w.q)).unwrap_or_default();
                let (class, verdict) = (format!("{:?}", rep.classification), format!("{:?}", rep.verdict));
                println!("{:<14} {class:<12} {verdict:<22} {witness}", entry.name);
            }
            Err(Error::Precondition(why)) => println!("{:<14} skipped: {why}", entry.name),
            Err(e) => return Err(e),
        }
    }
    Ok(())
}
