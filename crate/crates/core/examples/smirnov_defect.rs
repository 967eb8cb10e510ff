//! Smirnov defect `log|F| - P_y * log|F|` for the function catalog.
//!
//! `cargo run --release --example smirnov_defect`

use ae_toolkit::analytic::{smirnov_defect, Lattice};
use ae_toolkit::cli::Catalog;

fn main() -> ae_toolkit::Result<()> {
    let catalog = Catalog::default();
    let lattice = Lattice::coarse();
    println!("{:<14} {:>12} {:>12}  classification", "function", "max defect", "min defect");
    for entry in &catalog.functions.functions {
        let f = catalog.build_function(entry)?;
        let rep = smirnov_defect(&f, &lattice)?;
        let min = rep.defect.iter().copied().fold(f64::INFINITY, f64::min);
        println!("{:<14} {:>12.2e} {:>12.2e}  {:?}", entry.name, rep.max_defect, min, rep.classification);
    }
    Ok(())
}
