//! Acceptance criteria, one test per criterion. Each prints a single
//! `criterion N: PASS|FAIL` line to stderr (uncaptured) before asserting.

use std::f64::consts::PI;
use std::io::Write;

use ae_toolkit::analytic::{
    ae_membership_with, construct_extension, smirnov_defect, AnalyticFn, Classification, Lattice,
};
use ae_toolkit::cli::{domain_panel, run_suite, Catalog, Suite, SuiteConfig};
use ae_toolkit::conformal::{
    cor44_check_with, cor44_check_with_options, phi_prime_diagnostics, pullback_panel, solve_sc, transfer_panel,
    wedge_map, ArcWeight, PolylineBoundary, TransferPanel,
};
use ae_toolkit::hardy::{
    equivalence_harness, hardy_norm_halfplane, norm_change_check_with_options, NormChangeReport, NormOptions, Verdict,
    BASE_FAMILY,
};
use ae_toolkit::numerics::{
    default_grid, harmonic_extension, poisson_convolve, BoundaryFn, FnTail, Singularity,
};
use ae_toolkit::weights::{a_infty_probe, ap_constant, SampledWeight};
use ae_toolkit::{Complex64, Error, Tolerances};

fn line(n: u32, title: &str, ok: bool, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "criterion {n:>2} {title}: {verdict} ({detail})");
}

/// `sup_I ⟨w⟩_I ⟨w^{-1/(p-1)}⟩_I^{p-1}` for `w = |x|^a`, scanning the
/// intervals `[c - 1, c + 1]` (enough by scaling and symmetry) with exact
/// antiderivatives.
fn brute_force_ap(a: f64, p: f64) -> f64 {
    let mean = |e: f64, lo: f64, hi: f64| -> f64 {
        if e <= -1.0 && lo <= 0.0 && hi >= 0.0 {
            return f64::INFINITY;
        }
        let big_f = |x: f64| x.signum() * x.abs().powf(e + 1.0) / (e + 1.0);
        (big_f(hi) - big_f(lo)) / (hi - lo)
    };
    let dual = -a / (p - 1.0);
    (0..=40_000)
        .map(|k| k as f64 * 5e-4)
        .map(|c| mean(a, c - 1.0, c + 1.0) * mean(dual, c - 1.0, c + 1.0).powf(p - 1.0))
        .fold(0.0, f64::max)
}

fn relative(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs()
}

#[test]
fn criterion_01_poisson_engine() {
    let g = default_grid();
    let constant = BoundaryFn::constant(g.clone(), 2.5);
    let log_abs = BoundaryFn::exact(
        g.clone(),
        "log|t|",
        |t: f64| t.abs().ln(),
        [FnTail::log_power(0.0, 1.0); 2],
        vec![Singularity { at: 0.0, exponent: 0.0 }],
    );
    let indicator = BoundaryFn::indicator(g, -1.0, 2.0);
    let (mut e_const, mut e_log, mut e_ind) = (0.0f64, 0.0f64, 0.0f64);
    let lattice = Lattice::default();
    for z in lattice.points() {
        let (x, y) = (z.x(), z.y());
        e_const = e_const.max(relative(poisson_convolve(&constant, *z).unwrap().value, 2.5));
        // log|z| vanishes on the unit circle, so the error is relative to max(|log|z||, 1).
        let exact = Complex64::new(x, y).norm().ln();
        let got = harmonic_extension(&log_abs, *z).unwrap().value.re;
        e_log = e_log.max((got - exact).abs() / exact.abs().max(1.0));
        let exact = (((2.0 - x) / y).atan() - ((-1.0 - x) / y).atan()) / PI;
        e_ind = e_ind.max(relative(poisson_convolve(&indicator, *z).unwrap().value, exact));
    }
    let ok = e_const <= 1e-4 && e_log <= 1e-4 && e_ind <= 1e-4;
    line(1, "Poisson engine", ok, &format!("{} points, constant {e_const:.1e}, log|t| {e_log:.1e}, indicator {e_ind:.1e}", lattice.len()));
    assert!(ok);
}

#[test]
fn criterion_02_ap_oracle() {
    let g = default_grid();
    let mut worst = 0.0f64;
    let mut details = Vec::new();
    for (a, p) in [(0.0, 2.0), (0.5, 2.0), (-0.5, 2.0), (3.0, 2.0), (3.0, 5.0)] {
        let w = SampledWeight::power(g.clone(), a).unwrap();
        let got = ap_constant(&w, p).unwrap().constant.value();
        let want = brute_force_ap(a, p);
        let err = if got.is_infinite() && want.is_infinite() { 0.0 } else { relative(got, want) };
        worst = worst.max(err);
        details.push(format!("a={a} p={p}: {got:.4} vs {want:.4}"));
    }
    // Power-weight law: |x|^a ∈ A_2 iff -1 < a < 1.
    let mut law_ok = true;
    for a in [-1.0, -0.5, 0.0, 0.5, 1.0, 3.0] {
        let w = SampledWeight::power(g.clone(), a).unwrap();
        let finite = ap_constant(&w, 2.0).unwrap().constant.is_finite();
        law_ok &= finite == (-1.0 < a && a < 1.0);
    }
    let ok = worst <= 0.05 && law_ok;
    line(2, "A_p oracle agreement", ok, &format!("worst relative gap {worst:.2e}, law reproduced {law_ok}; {}", details.join(", ")));
    assert!(ok);
}

#[test]
fn criterion_03_outer_construction() {
    let catalog = Catalog::default();
    let tol = Tolerances::default();
    let lattice = Lattice::default();
    let mut passed = Vec::new();
    let mut failed = Vec::new();
    for def in &catalog.weights {
        let w = catalog.weight(&def.label).unwrap();
        if !a_infty_probe(&w).unwrap().a_infty_established() {
            continue;
        }
        let h = construct_extension(&w).unwrap();
        let rep = ae_membership_with(&h, &w, &lattice, &tol).unwrap();
        let ok = rep.member && rep.smirnov.max_abs_defect() <= 1e-3 && rep.band.1 <= 1.5 && rep.band.0 >= 1.0 / 1.5;
        let entry = format!("{} (defect {:.1e}, band [{:.4}, {:.4}])", def.label, rep.smirnov.max_abs_defect(), rep.band.0, rep.band.1);
        if ok {
            passed.push(entry);
        } else {
            failed.push(entry);
        }
    }
    let ok = passed.len() >= 5 && failed.is_empty();
    line(3, "outer construction", ok, &format!("{} weights pass: {}; failing: {:?}", passed.len(), passed.join(", "), failed));
    assert!(ok);
}

#[test]
fn criterion_04_garnett_bound() {
    let catalog = Catalog::default();
    let lattice = Lattice::default();
    let mut worst = f64::NEG_INFINITY;
    let mut exp_iz_ok = false;
    for entry in &catalog.functions.functions {
        let f = catalog.build_function(entry).unwrap();
        let rep = smirnov_defect(&f, &lattice).unwrap();
        worst = worst.max(rep.max_defect);
        if entry.name == "exp_iz" {
            let gap = rep.points.iter().zip(&rep.defect).map(|((_, y), d)| (d + y).abs()).fold(0.0, f64::max);
            exp_iz_ok = gap <= 1e-6 && rep.classification == Classification::NotSmirnov;
        }
    }
    let ok = worst <= 1e-3 && exp_iz_ok;
    line(4, "one-sided Garnett bound", ok, &format!("max defect over catalog {worst:.2e}, e^(iz) defect = -y and NotSmirnov: {exp_iz_ok}"));
    assert!(ok);
}

#[test]
fn criterion_05_main_theorem() {
    let catalog = Catalog::default();
    let mut witnesses = Vec::new();
    let mut contradictions = 0;
    let mut sqrt_ok = false;
    let mut exp_iz_ok = false;
    for entry in &catalog.functions.functions {
        let f = catalog.build_function(entry).unwrap();
        let rep = match equivalence_harness(&f) {
            Ok(r) => r,
            // Boundary modulus outside A_∞: not covered by the theorem.
            Err(Error::Precondition(_)) => continue,
            Err(e) => panic!("{}: {e}", entry.name),
        };
        if rep.verdict == Verdict::Contradiction {
            contradictions += 1;
        }
        if let (Verdict::Witness, Some(w)) = (rep.verdict, &rep.witness) {
            assert!(w.is_valid());
            witnesses.push(format!("{} (m={}, s={}, q={})", entry.name, w.m, w.s, w.q));
            if entry.name == "sqrt_z" {
                sqrt_ok = (w.m, w.s, w.q) == (2.0, 2.0, 1.0);
            }
        }
        if entry.name == "exp_iz" {
            exp_iz_ok = rep.verdict == Verdict::NotSmirnovConsistent && rep.witness.is_none();
        }
    }
    let ok = witnesses.len() >= 5 && sqrt_ok && exp_iz_ok && contradictions == 0;
    line(5, "main theorem witnesses", ok, &format!("{} witnesses: {}; sqrt (2,2,1) {sqrt_ok}; e^(iz) consistent {exp_iz_ok}; contradictions {contradictions}", witnesses.len(), witnesses.join(", ")));
    assert!(ok);
}

#[test]
fn criterion_06_wedge_diagnostics() {
    let mut ok = true;
    let mut details = Vec::new();
    for m in [0.5, 1.0, 3f64.sqrt()] {
        let map = wedge_map(m).unwrap();
        let d = phi_prime_diagnostics(&map).unwrap();
        let alpha = map.angle_ratios()[0];
        let a2 = d.a2.constant.value();
        let brute = brute_force_ap(alpha - 1.0, 2.0);
        let h1 = d.h1.iter().all(|h| h.forward.member && h.inverse.member);
        let row_ok = d.arg_sup <= m.atan() + 1e-9 && a2.is_finite() && relative(a2, brute) <= 0.05 && h1 && d.smirnov.max_abs_defect() <= 1e-3;
        ok &= row_ok;
        details.push(format!("m={m:.3}: arg {:.6}<={:.6}, A2 {a2:.4} vs {brute:.4}, H1 {h1}, defect {:.1e}", d.arg_sup, m.atan(), d.smirnov.max_abs_defect()));
    }
    line(6, "wedge cone and A_2 diagnostics", ok, &details.join("; "));
    assert!(ok);
}

#[test]
fn criterion_07_sc_solver() {
    let single = solve_sc(&PolylineBoundary::wedge(1.0).unwrap()).unwrap();
    let closed = wedge_map(1.0).unwrap();
    let ratios: Vec<Complex64> = [(0.2, 0.1), (-3.0, 2.0), (10.0, 1e-3), (0.0, 5.0), (-1e3, 1.0)]
        .iter()
        .map(|&(x, y)| {
            let z = Complex64::new(x, y);
            single.phi_prime(z) / closed.phi_prime(z)
        })
        .collect();
    let spread = ratios.iter().map(|r| (r - ratios[0]).norm() / ratios[0].norm()).fold(0.0, f64::max);
    let step = solve_sc(&PolylineBoundary::new(vec![(0.0, 0.0), (1.0, 0.5)], 0.0, 0.0).unwrap()).unwrap();
    let residual = step.max_residual();
    let ok = spread <= 1e-6 && residual <= 1e-6;
    line(7, "SC solver", ok, &format!("single-vertex Phi' ratio spread {spread:.1e}, two-vertex residual {residual:.1e}"));
    assert!(ok);
}

#[test]
fn criterion_08_closed_form_norm() {
    let one = SampledWeight::constant(default_grid(), 1.0).unwrap();
    let rep = hardy_norm_halfplane(&AnalyticFn::moebius_pole(2.0).unwrap(), 1.0, &one).unwrap();
    let sup = rep.supremum.unwrap_or(f64::INFINITY);
    let ok = rep.member && relative(sup, PI) <= 0.01;
    line(8, "closed-form Hardy norm", ok, &format!("||1/(i+z)^2||_H1 = {sup:.8} vs pi"));
    assert!(ok);
}

fn panel_functions(catalog: &Catalog) -> Vec<AnalyticFn> {
    catalog.panel().map(|e| catalog.build_function(e).unwrap()).collect()
}

fn within_factor_two(a: (f64, f64), b: (f64, f64)) -> bool {
    let r = |x: f64, y: f64| x / y <= 2.0 && y / x <= 2.0;
    r(a.0, b.0) && r(a.1, b.1)
}

/// Verdicts match, `≥ 4` members and `≥ 2` non-members.
fn counts_ok(members: usize, non_members: usize) -> bool {
    members >= 4 && non_members >= 2
}

fn norm_change_summary(reps: &[NormChangeReport]) -> (bool, usize, usize) {
    let agree = reps.iter().all(|r| !r.contradiction && r.equivalent);
    let members = reps.iter().filter(|r| r.members[0].norm_nu.is_some()).count();
    (agree, members, reps.len() - members)
}

fn panel_summary(p: &TransferPanel) -> (bool, usize, usize) {
    let members = p.rows.iter().filter(|r| r.left.member).count();
    (p.all_agree, members, p.rows.len() - members)
}

fn bands(reps: &[NormChangeReport]) -> Vec<Option<(f64, f64)>> {
    reps.iter().map(|r| r.band).collect()
}

fn stable(coarse: &[Option<(f64, f64)>], fine: &[Option<(f64, f64)>]) -> bool {
    coarse.len() == fine.len()
        && coarse.iter().zip(fine).all(|(a, b)| match (a, b) {
            (Some(a), Some(b)) => within_factor_two(*a, *b),
            (None, None) => true,
            _ => false,
        })
}

#[test]
fn criterion_09_norm_equivalences() {
    let catalog = Catalog::default();
    let fns = panel_functions(&catalog);
    let tol = Tolerances::default();
    let opts = NormOptions::from_tolerances(&tol);
    let fine = opts.refined();
    let g = default_grid();
    let mut sub = Vec::new();

    // Change of weight: dν = |h| dμ with ν = |x|^{1/2}, μ = 1, h = z^{1/2}.
    let nu = SampledWeight::power(g.clone(), 0.5).unwrap();
    let mu = SampledWeight::constant(g, 1.0).unwrap();
    let h = AnalyticFn::power(0.5).unwrap();
    let run = |o: &NormOptions| -> Vec<NormChangeReport> {
        fns.iter().map(|f| norm_change_check_with_options(f, &h, 1.0, &nu, &mu, &BASE_FAMILY, &tol, o).unwrap()).collect()
    };
    let (coarse_reps, fine_reps) = (run(&opts), run(&fine));
    let (agree, mem, non) = norm_change_summary(&coarse_reps);
    let st = stable(&bands(&coarse_reps), &bands(&fine_reps));
    sub.push(("weight change", agree && counts_ok(mem, non) && st, format!("agree {agree}, {mem}/{non}, stable {st}")));

    // Derivative-weight equivalence on the right-angle wedge, ν = ds, p = 1.
    let map = wedge_map(1.0).unwrap();
    let ds = ArcWeight::arc_length();
    let run = |o: &NormOptions| -> Vec<NormChangeReport> {
        fns.iter()
            .map(|f| {
                let r = cor44_check_with_options(f, 1.0, &ds, &map, &BASE_FAMILY, &tol, o).unwrap();
                assert!(r.hypothesis_satisfied, "{r:?}");
                r.norm_change.unwrap()
            })
            .collect()
    };
    let (coarse_reps, fine_reps) = (run(&opts), run(&fine));
    let (agree, mem, non) = norm_change_summary(&coarse_reps);
    let st = stable(&bands(&coarse_reps), &bands(&fine_reps));
    sub.push(("derivative weight p=1", agree && counts_ok(mem, non) && st, format!("agree {agree}, {mem}/{non}, stable {st}")));

    // Transfer panels on the same wedge.
    let boundary = map.boundary().clone();
    let domain_fns = domain_panel(&boundary).unwrap();
    for (name, coarse, fine_panel) in [
        ("composition", transfer_panel(&domain_fns, 1.0, &ds, &map, &opts).unwrap(), transfer_panel(&domain_fns, 1.0, &ds, &map, &fine).unwrap()),
        ("pullback", pullback_panel(&fns, 1.0, &ds, &map, &opts).unwrap(), pullback_panel(&fns, 1.0, &ds, &map, &fine).unwrap()),
    ] {
        let (agree, mem, non) = panel_summary(&coarse);
        let ratios = |p: &TransferPanel| -> Vec<Option<(f64, f64)>> { p.rows.iter().map(|r| r.ratio.map(|x| (x, x))).collect() };
        let st = stable(&ratios(&coarse), &ratios(&fine_panel)) && coarse.band.is_some();
        sub.push((name, agree && counts_ok(mem, non) && st, format!("agree {agree}, {mem}/{non}, stable {st}, band {:?}", coarse.band)));
    }

    // The unmet-hypothesis path. On the right-angle wedge |Φ'|^{-3}Φ(ds) = 4|x|
    // is an A_∞ weight, so that case cannot exercise it; the concave corner
    // {y > -|x|} gives |x|^{-3/2}·const, which is not.
    let f = &fns[1];
    let wedge_p3 = cor44_check_with(f, 3.0, &ds, &map, &BASE_FAMILY, &tol).unwrap();
    sub.push(("unmet hypothesis on the m=1 wedge at p=3", !wedge_p3.hypothesis_satisfied, format!("{:?}", wedge_p3.message)));
    let concave = solve_sc(&catalog.boundaries["concave"]).unwrap();
    assert!(concave.is_closed_form() && concave.angle_ratios()[0] > 1.0);
    let concave_p3 = cor44_check_with(f, 3.0, &ds, &concave, &BASE_FAMILY, &tol).unwrap();
    let exercised = !concave_p3.hypothesis_satisfied && concave_p3.message.as_deref().is_some_and(|m| m.starts_with("hypothesis not satisfied"));
    sub.push(("unmet hypothesis on the concave corner at p=3", exercised, format!("{:?}", concave_p3.message)));

    let all = sub.iter().all(|s| s.1);
    let detail: Vec<String> = sub.iter().map(|(n, ok, d)| format!("{n}: {} [{d}]", if *ok { "ok" } else { "FAIL" })).collect();
    line(9, "norm equivalences", all, &detail.join("; "));
    // Every sub-check but the m=1 wedge case must hold; that one is
    // asserted (and expected to fail) in `wedge_p3_hypothesis_unmet`.
    for (name, ok, d) in &sub {
        if !name.contains("m=1 wedge") {
            assert!(ok, "{name}: {d}");
        }
    }
}

/// The literal expectation for the m=1 wedge at p=3. It cannot hold: the
/// reweighted density is `4|x|`, an `A_2` weight. Kept red on purpose.
#[test]
#[ignore = "the m=1 wedge at p=3 satisfies the A_inf hypothesis"]
fn wedge_p3_hypothesis_unmet() {
    let f = AnalyticFn::moebius_pole(2.0).unwrap();
    let rep = cor44_check_with(&f, 3.0, &ArcWeight::arc_length(), &wedge_map(1.0).unwrap(), &BASE_FAMILY, &Tolerances::default()).unwrap();
    assert!(!rep.hypothesis_satisfied, "{rep:?}");
}

/// A cut-down catalog so that two runs of every suite stay within budget.
fn small_inputs(dir: &std::path::Path) {
    let full = Catalog::default();
    let keep_w = ["one", "sqrt", "inv"];
    let weights: Vec<_> = full.weights.iter().filter(|w| keep_w.contains(&w.label.as_str())).cloned().collect();
    let keep_f = ["one", "exp_iz", "sqrt_z", "pole1", "pole2"];
    let mut functions = full.functions.clone();
    functions.functions.retain(|f| keep_f.contains(&f.name.as_str()));
    std::fs::write(dir.join("weights.json"), serde_json::to_string_pretty(&weights).unwrap()).unwrap();
    std::fs::write(dir.join("functions.json"), serde_json::to_string_pretty(&functions).unwrap()).unwrap();
    let bdir = dir.join("boundaries");
    std::fs::create_dir(&bdir).unwrap();
    for name in ["wedge_one", "step"] {
        std::fs::write(bdir.join(format!("{name}.json")), serde_json::to_string_pretty(&full.boundaries[name]).unwrap()).unwrap();
    }
}

#[test]
fn criterion_10_determinism() {
    let inputs = tempfile::tempdir().unwrap();
    small_inputs(inputs.path());
    let mut differing = Vec::new();
    for suite in Suite::ALL {
        let mut bytes = Vec::new();
        for _ in 0..2 {
            let out = tempfile::tempdir().unwrap();
            let config = SuiteConfig {
                suite,
                inputs: inputs.path().to_path_buf(),
                output_dir: out.path().to_path_buf(),
                tolerances: Tolerances::default(),
                seed: 7,
            };
            run_suite(&config).unwrap();
            bytes.push(std::fs::read(out.path().join("report.json")).unwrap());
        }
        if bytes[0] != bytes[1] {
            differing.push(suite.name());
        }
    }
    let ok = differing.is_empty();
    line(10, "determinism", ok, &format!("{} suites run twice, differing: {differing:?}", Suite::ALL.len()));
    assert!(ok);
}
