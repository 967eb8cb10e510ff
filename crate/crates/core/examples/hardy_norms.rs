//! Weighted Hardy norms on the half-plane, horizontal and non-tangential.
//!
//! `cargo run --release --example hardy_norms`

use ae_toolkit::analytic::AnalyticFn;
use ae_toolkit::hardy::{hardy_norm_halfplane, hardy_norm_maximal, ConeGeometry};
use ae_toolkit::numerics::default_grid;
use ae_toolkit::weights::SampledWeight;

fn main() -> ae_toolkit::Result<()> {
    let one = SampledWeight::constant(default_grid(), 1.0)?;
    let cone = ConeGeometry::half_plane(std::f64::consts::FRAC_PI_4)?;
    let fns = [
        AnalyticFn::moebius_pole(2.0)?,
        AnalyticFn::moebius_pole(1.0)?,
        AnalyticFn::exp_iz().mul(&AnalyticFn::moebius_pole(2.0)?),
    ];
    for f in &fns {
        let h = hardy_norm_halfplane(f, 1.0, &one)?;
        let m = hardy_norm_maximal(f, 1.0, &one, &cone)?;
        let show = |v: Option<f64>| v.map_or("inf".to_string(), |x| format!("{x:.6}"));
        println!(
            "{:<24} sup_y int|F| = {:<10} int M F = {:<10} members {}/{}",
            f.label(),
            show(h.supremum),
            show(m.integral),
            h.member,
            m.member
        );
    }
    println!("||1/(z+i)^2||_H1 should be pi = {:.6}", std::f64::consts::PI);
    Ok(())
}
