//! Solve a Schwarz–Christoffel map for a polyline boundary, evaluate it,
//! invert it, and print the `Φ'` diagnostics of the right-angle wedge.
//!
//! `cargo run --release --example schwarz_christoffel`

use ae_toolkit::conformal::{phi_prime_diagnostics, solve_sc, wedge_map, PolylineBoundary};
use ae_toolkit::Complex64;

fn main() -> ae_toolkit::Result<()> {
    let step = PolylineBoundary::new(vec![(0.0, 0.0), (1.0, 0.5)], 0.0, 0.0)?;
    let map = solve_sc(&step)?;
    println!("step: prevertices {:?}, angle ratios {:?}", map.prevertices(), map.angle_ratios());
    println!("      max residual {:.1e}, Phi(i) = {:.6}", map.max_residual(), map.base_point_image());
    for z in [Complex64::new(-2.0, 0.5), Complex64::new(0.3, 1.0), Complex64::new(5.0, 3.0)] {
        let w = map.phi(z)?;
        let back = map.inverse(w)?;
        println!("      Phi({z:.3}) = {w:.6}, round trip error {:.1e}", (back - z).norm());
    }
    for x in [-1.0, 0.5, 2.0] {
        let b = map.boundary_point(x)?;
        println!("      boundary Phi({x}) = {b:.6}");
    }

    let wedge = wedge_map(1.0)?;
    let d = phi_prime_diagnostics(&wedge)?;
    println!(
        "wedge m=1: sup arg Phi' = {:.6} (arctan m = {:.6}), A2(|Phi'|) = {:.4}, max |defect| {:.1e}",
        d.arg_sup,
        1f64.atan(),
        d.a2.constant.value(),
        d.smirnov.max_abs_defect()
    );
    Ok(())
}
