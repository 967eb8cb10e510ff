//! Build the outer function of a weight and confirm it lies in `AE(w)`.
//!
//! `cargo run --release --example outer_extension`

use ae_toolkit::analytic::{ae_membership, construct_extension};
use ae_toolkit::numerics::{default_grid, HalfPlanePoint};
use ae_toolkit::weights::SampledWeight;

fn main() -> ae_toolkit::Result<()> {
    let w = SampledWeight::power(default_grid(), 0.5)?;
    let h = construct_extension(&w)?;
    println!("H = outer extension of {}", h.label());
    for &(x, y) in &[(1.0, 1e-3), (4.0, 1e-3), (1.0, 1.0)] {
        let z = HalfPlanePoint::new(x, y)?;
        println!("  |H({x} + {y}i)| = {:.6}   |x|^0.5 = {:.6}", h.abs(z)?, x.abs().sqrt());
    }
    let rep = ae_membership(&h, &w)?;
    println!(
        "member {}, trace band [{:.5}, {:.5}] over {} nodes, max |defect| {:.2e}",
        rep.member,
        rep.band.0,
        rep.band.1,
        rep.trace_points,
        rep.smirnov.max_abs_defect()
    );
    Ok(())
}
