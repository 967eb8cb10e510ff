use std::sync::Arc;

use ae_toolkit::analytic::Lattice;
use ae_toolkit::numerics::{default_grid, poisson_convolve, BoundaryFn, FnTail, HalfPlanePoint, RealGrid};
use proptest::prelude::*;

fn bump(grid: Arc<RealGrid>) -> BoundaryFn {
    BoundaryFn::exact(
        grid,
        "bump",
        |t: f64| if t.abs() < 1.0 { (-1.0 / (1.0 - t * t)).exp() } else { 0.0 },
        [FnTail::constant(0.0); 2],
        Vec::new(),
    )
}

fn at(x: f64, y: f64) -> HalfPlanePoint {
    HalfPlanePoint::new(x, y).unwrap()
}

#[test]
fn unit_mass_on_the_standard_lattice() {
    let one = BoundaryFn::constant(default_grid(), 1.0);
    let worst = Lattice::default()
        .points()
        .iter()
        .map(|z| (poisson_convolve(&one, *z).unwrap().value - 1.0).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 1e-6, "{worst}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn unit_mass_anywhere(x in -1e3f64..1e3, ly in -4.0f64..3.0) {
        let one = BoundaryFn::constant(default_grid(), 1.0);
        let v = poisson_convolve(&one, at(x, 10f64.powf(ly))).unwrap().value;
        prop_assert!((v - 1.0).abs() <= 1e-6, "{v}");
    }

    /// The five-point Laplacian of `P_y ∗ f` is `O(h²)`: halving `h`
    /// shrinks it by about four.
    #[test]
    fn poisson_extension_is_harmonic(x in -3.0f64..3.0, y in 0.5f64..3.0) {
        let f = bump(default_grid());
        let u = |x: f64, y: f64| poisson_convolve(&f, at(x, y)).unwrap().value;
        let lap = |h: f64| (u(x + h, y) + u(x - h, y) + u(x, y + h) + u(x, y - h) - 4.0 * u(x, y)) / (h * h);
        let (coarse, fine) = (lap(0.2), lap(0.1));
        prop_assert!(coarse.abs() <= 4.0 * 0.2f64.powi(2), "{coarse}");
        prop_assert!(fine.abs() <= 0.35 * coarse.abs() + 1e-6, "{coarse} {fine}");
    }

    /// Doubling the sampling density moves a convolution of sampled data
    /// by no more than four reported error estimates.
    #[test]
    fn refinement_stability(x in -20.0f64..20.0, ly in -2.0f64..2.0) {
        let make = |n: usize| {
            let g = Arc::new(RealGrid::log_linear(n, 1e4, 1e-6).unwrap());
            let values: Vec<f64> = g.nodes().iter().map(|t| (1.0 + t * t).ln() * 0.5).collect();
            BoundaryFn::from_samples(g, "log sqrt(1+t^2)", values, [FnTail::log_power(0.0, 1.0); 2]).unwrap()
        };
        let z = at(x, 10f64.powf(ly));
        let a = poisson_convolve(&make(2048), z).unwrap();
        let b = poisson_convolve(&make(4096), z).unwrap();
        prop_assert!((a.value - b.value).abs() <= 4.0 * a.error.max(b.error), "{a:?} {b:?}");
    }
}
