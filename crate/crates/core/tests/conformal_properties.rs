use ae_toolkit::analytic::{nt_trace, Lattice};
use ae_toolkit::cli::Catalog;
use ae_toolkit::conformal::{arc_mass, domain_ae_membership, pushforward, solve_sc, wedge_map, ArcWeight, ConformalMap, DomainFn};
use ae_toolkit::numerics::quadrature::GaussJacobi;
use ae_toolkit::{Complex64, Tolerances};
use proptest::prelude::*;

/// Closed-form wedges first, then the solved maps of the shipped boundaries.
fn maps() -> Vec<(String, ConformalMap, bool)> {
    let mut out: Vec<_> = [0.5, 1.0, 3f64.sqrt()].iter().map(|&m| (format!("wedge {m:.3}"), wedge_map(m).unwrap(), true)).collect();
    let catalog = Catalog::default();
    for name in ["step", "concave"] {
        out.push((name.to_string(), solve_sc(&catalog.boundaries[name]).unwrap(), false));
    }
    out
}

fn away_from_prevertices(map: &ConformalMap, x: f64) -> bool {
    map.prevertices().iter().all(|a| (x - a).abs() > 1e-2)
}

#[test]
fn cone_containment() {
    let lattice = Lattice::default();
    for (name, map, closed) in maps() {
        let slack = if closed { 1e-9 } else { Tolerances::default().arg };
        let bound = map.boundary().lipschitz().atan() + slack;
        let sup = lattice
            .points()
            .iter()
            .map(|z| map.log_phi_prime(Complex64::new(z.x(), z.y())).im.abs())
            .fold(0.0, f64::max);
        assert!(sup <= bound, "{name}: {sup} > {bound}");
    }
}

#[test]
fn ae_chain_for_the_constant() {
    let one = DomainFn::constant(Complex64::new(1.0, 0.0)).unwrap();
    let ds = ArcWeight::arc_length();
    for (name, map, _) in maps() {
        let rep = domain_ae_membership(&one, &ds, &map, &Lattice::coarse(), &Tolerances::default()).unwrap();
        assert!(rep.member, "{name}: {rep:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn boundary_trace_matches_closed_form(x in -50.0f64..50.0) {
        for (name, map, closed) in maps() {
            prop_assume!(away_from_prevertices(&map, x));
            let trace = nt_trace(&map.phi_prime_fn().unwrap(), x).unwrap();
            let exact = map.log_phi_prime(Complex64::new(x, 0.0)).re.exp();
            let tol = if closed { 1e-6 } else { 1e-3 };
            prop_assert!((trace.value.norm() / exact - 1.0).abs() <= tol, "{name} at {x}: {} vs {exact}", trace.value.norm());
        }
    }

    /// Richardson-extrapolated central differences of `Φ` along horizontal lines.
    #[test]
    fn derivative_consistency(x in -10.0f64..10.0, ly in -1.5f64..1.5) {
        let z = Complex64::new(x, 10f64.powf(ly));
        for (name, map, closed) in maps() {
            let d = |h: f64| (map.phi(z + h).unwrap() - map.phi(z - h).unwrap()) / (2.0 * h);
            let h = 1e-2 * z.im.min(1.0);
            let rich = (d(h / 2.0) * 4.0 - d(h)) / 3.0;
            let exact = map.phi_prime(z);
            let tol = if closed { 1e-6 } else { 1e-5 };
            prop_assert!(((rich - exact) / exact).norm() <= tol, "{name} at {z}: {rich} vs {exact}");
        }
    }

    /// `ν(J) = ∫_{Φ^{-1}(J)} Φ(ν) dx` for arcs clear of the vertices whose
    /// preimages stay inside the sampled core (beyond it the density
    /// follows its power-law tail model).
    #[test]
    fn pushforward_preserves_mass(side in 0usize..3, u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let nu = ArcWeight::from_log_fn("(1+xi^2)^-1/2 ds", |xi| -0.5 * (xi * xi).ln_1p(), Vec::new(), [-1.0, -1.0]);
        let rule = GaussJacobi::new(32, 0.0, 0.0).unwrap();
        let (lo, hi) = [(-5.0, -0.05), (0.05, 0.95), (1.05, 5.0)][side];
        let (a, b) = (lo + (hi - lo) * u.min(v), lo + (hi - lo) * u.max(v));
        prop_assume!(b - a > 1e-3);
        for (name, map, _) in maps() {
            let density = pushforward(&map, &nu).unwrap();
            let (x1, x2) = (map.boundary_preimage(a).unwrap(), map.boundary_preimage(b).unwrap());
            if x1.abs().max(x2.abs()) > density.core_radius() {
                continue;
            }
            let panels = 64;
            let step = (x2 - x1) / panels as f64;
            let pulled: f64 = (0..panels)
                .map(|k| rule.integrate(x1 + k as f64 * step, x1 + (k + 1) as f64 * step, |x| Ok(density.eval(x))).unwrap())
                .sum();
            let mass = arc_mass(&map, &nu, a, b).unwrap();
            prop_assert!((pulled / mass - 1.0).abs() <= 1e-6, "{name} on [{a}, {b}]: {pulled} vs {mass}");
        }
    }
}
