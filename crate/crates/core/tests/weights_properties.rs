use ae_toolkit::analytic::Lattice;
use ae_toolkit::numerics::default_grid;
use ae_toolkit::weights::{ap_constant, poisson_average_ratio, SampledWeight};
use proptest::prelude::*;

const RTOL: f64 = 1e-6;

/// `sup_c ⟨|x|^a⟩ ⟨|x|^{-a/(p-1)}⟩^{p-1}` over `[c - 1, c + 1]`.
fn brute_force_ap(a: f64, p: f64) -> f64 {
    let mean = |e: f64, lo: f64, hi: f64| {
        let big_f = |x: f64| x.signum() * x.abs().powf(e + 1.0) / (e + 1.0);
        (big_f(hi) - big_f(lo)) / (hi - lo)
    };
    let dual = -a / (p - 1.0);
    (0..=20_000).map(|k| k as f64 * 1e-3).map(|c| mean(a, c - 1.0, c + 1.0) * mean(dual, c - 1.0, c + 1.0).powf(p - 1.0)).fold(0.0, f64::max)
}

fn weight(kind: u8, a: f64) -> SampledWeight {
    let g = default_grid();
    match kind {
        0 => SampledWeight::power(g, a).unwrap(),
        1 => SampledWeight::one_plus_square(g, a).unwrap(),
        _ => SampledWeight::shifted_powers(g, &[(1.0, a), (-1.0, -0.5 * a)]).unwrap(),
    }
}

#[test]
fn power_weight_law() {
    for p in [1.5, 2.0, 3.0, 4.0] {
        for a in [-0.9, -0.5, 0.0, 0.5, 0.9 * (p - 1.0), 1.1 * (p - 1.0)] {
            let w = SampledWeight::power(default_grid(), a).unwrap();
            let finite = ap_constant(&w, p).unwrap().constant.is_finite();
            assert_eq!(finite, -1.0 < a && a < p - 1.0, "a = {a}, p = {p}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn monotone_in_p(kind in 0u8..3, a in -0.8f64..0.8, p1 in 1.3f64..3.0, dp in 0.1f64..3.0) {
        let w = weight(kind, a);
        let c1 = ap_constant(&w, p1).unwrap().constant;
        if c1.is_finite() {
            let c2 = ap_constant(&w, p1 + dp).unwrap().constant;
            prop_assert!(c2.is_finite());
            prop_assert!(c2.value() <= c1.value() * (1.0 + RTOL), "{} > {}", c2.value(), c1.value());
        }
    }

    #[test]
    fn jensen_floor(kind in 0u8..3, a in -2.0f64..3.0, p in 1.2f64..6.0) {
        let c = ap_constant(&weight(kind, a), p).unwrap().constant;
        if c.is_finite() {
            prop_assert!(c.value() >= 1.0 - 1e-9, "{}", c.value());
        }
    }

    /// `[w]_{A_r} = [σ]_{A_{r'}}^{r-1}` with `σ = w^{1-r'}`, and `σ^{1-r} = w`.
    #[test]
    fn duality_involution(kind in 0u8..3, a in -0.6f64..0.6, r in 1.5f64..4.0) {
        let w = weight(kind, a);
        let r_dual = r / (r - 1.0);
        let sigma = w.powf(1.0 - r_dual);
        let back = sigma.powf(1.0 - r);
        let cw = ap_constant(&w, r).unwrap().constant.value();
        let cs = ap_constant(&sigma, r_dual).unwrap().constant.value();
        let cb = ap_constant(&back, r).unwrap().constant.value();
        prop_assert!((cs.powf(r - 1.0) / cw - 1.0).abs() <= 1e-6, "{cw} vs {cs}^{}", r - 1.0);
        prop_assert!((cb / cw - 1.0).abs() <= RTOL, "{cw} vs {cb}");
    }

    /// `P_y ∗ W ≤ C·2⟨W⟩_{[x-y, x+y]}` with `C` bounded by ten `A_2` constants.
    #[test]
    fn poisson_average_lemma(a in -0.9f64..0.9) {
        let w = SampledWeight::power(default_grid(), a).unwrap();
        let rep = poisson_average_ratio(&w, Lattice::coarse().points()).unwrap();
        prop_assert!(rep.sup.is_finite());
        prop_assert!(rep.sup <= 10.0 * brute_force_ap(a, 2.0), "{} vs {}", rep.sup, brute_force_ap(a, 2.0));
    }
}
