//! Harmonic extension of boundary data, checked against closed forms.
//!
//! `cargo run --release --example poisson_extension`

use std::f64::consts::PI;

use ae_toolkit::numerics::{default_grid, harmonic_extension, poisson_convolve, BoundaryFn, FnTail, HalfPlanePoint, Singularity};

fn main() -> ae_toolkit::Result<()> {
    let g = default_grid();
    let indicator = BoundaryFn::indicator(g.clone(), -1.0, 2.0);
    let log_abs = BoundaryFn::exact(
        g,
        "log|t|",
        |t: f64| t.abs().ln(),
        [FnTail::log_power(0.0, 1.0); 2],
        vec![Singularity { at: 0.0, exponent: 0.0 }],
    );

    println!("{:>8} {:>8} {:>14} {:>10} {:>18} {:>10}", "x", "y", "P*1[-1,2]", "error", "u + i v of log|t|", "error");
    for &(x, y) in &[(0.0, 1.0), (0.5, 0.1), (-3.0, 2.0), (10.0, 0.01), (0.0, 100.0)] {
        let z = HalfPlanePoint::new(x, y)?;
        let p = poisson_convolve(&indicator, z)?.value;
        let exact = (((2.0 - x) / y).atan() - ((-1.0 - x) / y).atan()) / PI;
        let h = harmonic_extension(&log_abs, z)?.value;
        // The analytic function with real part log|t| on the line is log z.
        let log_z = ae_toolkit::Complex64::new(x, y).ln();
        println!(
            "{x:>8} {y:>8} {p:>14.10} {:>10.1e} {:>8.4}{:+8.4}i {:>10.1e}",
            (p - exact).abs(),
            h.re,
            h.im,
            (h.re - log_z.re).abs()
        );
    }
    Ok(())
}
