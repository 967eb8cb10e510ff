//! `A_p` constants of power weights and the `A_∞` probe over the catalog.
//!
//! `cargo run --release --example ap_constants`

use ae_toolkit::cli::Catalog;
use ae_toolkit::numerics::default_grid;
use ae_toolkit::weights::{a_infty_probe, ap_constant, SampledWeight};

fn main() -> ae_toolkit::Result<()> {
    let g = default_grid();
    println!("|x|^a in A_2 exactly when -1 < a < 1");
    for a in [-1.0, -0.5, 0.0, 0.5, 0.9, 1.0, 3.0] {
        let w = SampledWeight::power(g.clone(), a)?;
        let rep = ap_constant(&w, 2.0)?;
        let iv = rep.witness_interval;
        println!("  a = {a:>4}: A2 = {:<12.5} witness [{:.3e}, {:.3e}]", rep.constant.value(), iv.lo, iv.hi);
    }

    println!("A_inf probe (smallest finite A_r among the scanned exponents)");
    let catalog = Catalog::default();
    for def in &catalog.weights {
        let w = catalog.weight(&def.label)?;
        let probe = a_infty_probe(&w)?;
        match probe.r_star {
            Some(r) => println!("  {:<10} r* = {r}", def.label),
            None => println!("  {:<10} not A_inf on the scanned range", def.label),
        }
    }
    Ok(())
}
