use ae_toolkit::analytic::{construct_extension, nt_trace, smirnov_defect, AnalyticFn, Lattice};
use ae_toolkit::hardy::hardy_norm_halfplane;
use ae_toolkit::numerics::{default_grid, HalfPlanePoint};
use ae_toolkit::weights::{ap_constant, SampledWeight};
use ae_toolkit::{Complex64, Tolerances};
use proptest::prelude::*;

fn product(alpha: f64, b: Complex64, t: f64) -> AnalyticFn {
    AnalyticFn::affine_power(1.0, b, alpha).unwrap().mul(&AnalyticFn::exp_linear(Complex64::new(0.0, t)).unwrap())
}

#[test]
fn outer_is_idempotent() {
    let g = default_grid();
    let w = SampledWeight::one_plus_square(g.clone(), 0.5).unwrap();
    let h = construct_extension(&w).unwrap();
    let trace: Vec<f64> = g.nodes().iter().map(|&x| nt_trace(&h, x).unwrap().value.norm()).collect();
    let again = construct_extension(&SampledWeight::from_samples(g, "|trace|", &trace, Some(w.tail())).unwrap()).unwrap();
    let mut quotients = Vec::new();
    for &(x, y) in &[(0.0, 1.0), (0.5, 0.1), (-3.0, 2.0), (20.0, 0.5), (1e-2, 1e-2)] {
        let z = HalfPlanePoint::new(x, y).unwrap();
        quotients.push(again.eval(z).unwrap() / h.eval(z).unwrap());
    }
    for q in &quotients {
        assert!((q.norm() - 1.0).abs() <= 1e-3, "{q}");
        assert!((q / quotients[0] - 1.0).norm() <= 1e-3, "{q} vs {}", quotients[0]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// Nonvanishing `H²` functions times bounded singular inner factors never
    /// have a positive defect beyond tolerance.
    #[test]
    fn defect_is_one_sided(alpha in -3.0f64..-0.6, beta in -5.0f64..5.0, c in 0.1f64..10.0, t in 0.0f64..2.0) {
        let f = product(alpha, Complex64::new(beta, c), t);
        let one = SampledWeight::constant(default_grid(), 1.0).unwrap();
        prop_assume!(hardy_norm_halfplane(&f, 2.0, &one).unwrap().member);
        let rep = smirnov_defect(&f, &Lattice::coarse()).unwrap();
        prop_assert!(rep.max_defect <= Tolerances::default().smirnov, "{}", rep.max_defect);
    }

    #[test]
    fn defect_is_linear_in_powers(a in 0.2f64..3.0) {
        let f = product(-1.0, Complex64::i(), 1.0);
        let lattice = Lattice::coarse();
        let base = smirnov_defect(&f, &lattice).unwrap();
        let scaled = smirnov_defect(&f.powf(a), &lattice).unwrap();
        for (d, e) in base.defect.iter().zip(&scaled.defect) {
            prop_assert!((e - a * d).abs() <= 1e-6 * (1.0 + a * d.abs()), "{e} vs {a}·{d}");
        }
    }

    #[test]
    fn unimodular_factors_change_nothing(theta in -3.1f64..3.1, alpha in -2.0f64..1.0) {
        let f = AnalyticFn::affine_power(1.0, Complex64::new(0.3, 1.0), alpha).unwrap();
        let g = f.scaled(Complex64::from_polar(1.0, theta)).unwrap();
        let lattice = Lattice::coarse();
        let (a, b) = (smirnov_defect(&f, &lattice).unwrap(), smirnov_defect(&g, &lattice).unwrap());
        prop_assert_eq!(a.classification, b.classification);
        prop_assert_eq!(&a.boundary_source, &b.boundary_source);
        for (x, y) in a.defect.iter().zip(&b.defect) {
            prop_assert!((x - y).abs() <= 1e-12, "{x} {y}");
        }
        let grid = default_grid();
        if let (Some(wf), Some(wg)) = (f.boundary_weight(&grid), g.boundary_weight(&grid)) {
            let (cf, cg) = (ap_constant(&wf, 2.0).unwrap(), ap_constant(&wg, 2.0).unwrap());
            prop_assert_eq!(cf.constant.is_finite(), cg.constant.is_finite());
            if cf.constant.is_finite() {
                prop_assert!((cf.constant.value() / cg.constant.value() - 1.0).abs() <= 1e-12);
            }
        }
    }
}
