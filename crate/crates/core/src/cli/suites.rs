use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::catalog::{wedge_slope, Catalog};
use super::report::{CheckRow, Status, SuiteReport};
use crate::analytic::{ae_membership_with, construct_extension_with, smirnov_defect_with, AnalyticFn, Classification, Lattice};
use crate::conformal::{
    cor44_check_with, domain_ae_membership, phi_prime_diagnostics_with, pullback_panel, solve_sc, transfer_panel, wedge_map, ArcWeight, ConformalMap,
    DomainFn, PolylineBoundary, TransferPanel,
};
use crate::hardy::{equivalence_harness_with, hmw_product_test_with, norm_change_check_with, NormOptions, Verdict, BASE_FAMILY};
use crate::numerics::default_grid;
use crate::weights::{a_infty_probe, ap_constant, SampledWeight, WeightDefinition, WeightKind};
use crate::{Error, Result, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Smirnov,
    Extend,
    Ap,
    Hmw,
    MainTheorem,
    Conformal,
    NormEquivalence,
    Transfer,
}

impl Suite {
    pub const ALL: [Suite; 8] =
        [Suite::Smirnov, Suite::Extend, Suite::Ap, Suite::Hmw, Suite::MainTheorem, Suite::Conformal, Suite::NormEquivalence, Suite::Transfer];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Smirnov => "smirnov",
            Suite::Extend => "extend",
            Suite::Ap => "ap",
            Suite::Hmw => "hmw",
            Suite::MainTheorem => "main-theorem",
            Suite::Conformal => "conformal",
            Suite::NormEquivalence => "norm-equivalence",
            Suite::Transfer => "transfer",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| {
            let names: Vec<_> = Suite::ALL.iter().map(|x| x.name()).collect();
            Error::Input(format!("unknown suite '{s}' (expected one of {})", names.join(", ")))
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub inputs: PathBuf,
    pub output_dir: PathBuf,
    pub tolerances: Tolerances,
    pub seed: u64,
}

/// Runs a suite and writes its files. Input problems come back as
/// [`Error::Input`]; failed checks are recorded in the report.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    config.tolerances.validate()?;
    let catalog = Catalog::load(&config.inputs, true)?;
    let report = run_catalog(config.suite, &catalog, &config.tolerances, config.seed)?;
    report.write(&config.output_dir)?;
    Ok(report)
}

pub fn run_catalog(suite: Suite, catalog: &Catalog, tol: &Tolerances, seed: u64) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new(suite.name(), seed, *tol);
    match suite {
        Suite::Smirnov => smirnov(catalog, tol, &mut rep)?,
        Suite::Extend => extend(catalog, tol, &mut rep)?,
        Suite::Ap => ap(catalog, &mut rep)?,
        Suite::Hmw => hmw(catalog, tol, &mut rep)?,
        Suite::MainTheorem => main_theorem(catalog, tol, &mut rep)?,
        Suite::Conformal => conformal(catalog, tol, &mut rep)?,
        Suite::NormEquivalence => norm_equivalence(catalog, tol, seed, &mut rep)?,
        Suite::Transfer => transfer(catalog, tol, seed, &mut rep)?,
    }
    Ok(rep)
}

/// Non-input errors become failed rows so one bad entry does not hide the rest.
fn guard<T>(rep: &mut SuiteReport, name: &str, r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(e @ Error::Input(_)) => Err(e),
        Err(e) => {
            rep.push(CheckRow::new(name, Status::Fail, format!("error: {e}")));
            Ok(None)
        }
    }
}

fn smirnov(catalog: &Catalog, tol: &Tolerances, rep: &mut SuiteReport) -> Result<()> {
    let lattice = Lattice::default();
    for entry in &catalog.functions.functions {
        let name = format!("smirnov/{}", entry.name);
        let Some(f) = guard(rep, &name, catalog.build_function(entry))? else { continue };
        let Some(r) = guard(rep, &name, smirnov_defect_with(&f, &lattice, tol.smirnov))? else { continue };
        let got = r.classification;
        // The one-sided bound: log|F| never exceeds the Poisson integral of its trace.
        let (status, verdict) = if r.max_defect > tol.smirnov {
            (Status::Contradiction, format!("{got:?}: positive defect {:e}", r.max_defect))
        } else {
            match entry.expected {
                Some(e) if e == got => (Status::Pass, format!("{got:?} (expected)")),
                Some(e) => (Status::Fail, format!("{got:?} (expected {e:?})")),
                None if got == Classification::Inconclusive => (Status::Inconclusive, format!("{got:?}")),
                None => (Status::Pass, format!("{got:?}")),
            }
        };
        rep.push(CheckRow::new(&name, status, verdict).scalar(Some(r.max_abs_defect()), Some(tol.smirnov)));
        rep.defects(&r);
        rep.detail(name, &r)?;
    }
    Ok(())
}

fn extend(catalog: &Catalog, tol: &Tolerances, rep: &mut SuiteReport) -> Result<()> {
    let lattice = Lattice::coarse();
    for def in &catalog.weights {
        let name = format!("extend/{}", def.label);
        let Some(w) = guard(rep, &name, catalog.weight(&def.label))? else { continue };
        let Some(probe) = guard(rep, &name, a_infty_probe(&w))? else { continue };
        if !probe.a_infty_established() {
            rep.push(CheckRow::new(&name, Status::Pass, "not A_inf: extension refused (expected)"));
            rep.detail(name, &probe)?;
            continue;
        }
        let Some(h) = guard(rep, &name, construct_extension_with(&w, &probe))? else { continue };
        let Some(ae) = guard(rep, &name, ae_membership_with(&h, &w, &lattice, tol))? else { continue };
        let status = if ae.member { Status::Pass } else { Status::Fail };
        let verdict = if ae.member { "in AE(w)".to_string() } else { format!("not in AE(w): band {:?}, defect {:e}", ae.band, ae.smirnov.max_abs_defect()) };
        rep.push(CheckRow::new(&name, status, verdict).scalar(Some(ae.smirnov.max_abs_defect()), Some(tol.smirnov)));
        rep.detail(name, &ae)?;
    }
    Ok(())
}

/// `A₂` membership predicted by the power-weight law, when the definition
/// has one.
fn expected_a2(def: &WeightDefinition) -> Option<bool> {
    let law = |a: f64| -1.0 < a && a < 1.0;
    let num = |k: &str| def.params.get(k).and_then(|v| v.as_f64());
    match def.kind {
        WeightKind::Power => match def.params.get("factors") {
            Some(f) => {
                let factors: Vec<(f64, f64)> = serde_json::from_value(f.clone()).ok()?;
                let total: f64 = factors.iter().map(|f| f.1).sum();
                Some(factors.iter().all(|f| law(f.1)) && law(total))
            }
            None => num("a").map(law),
        },
        WeightKind::Expression => match def.params.get("name")?.as_str()? {
            "constant" | "two_plus_sin" => Some(true),
            "one_plus_square" => num("a").map(law),
            "exp_abs" => Some(false),
            _ => None,
        },
        WeightKind::Samples => None,
    }
}

fn ap(catalog: &Catalog, rep: &mut SuiteReport) -> Result<()> {
    for def in &catalog.weights {
        let name = format!("ap/{}", def.label);
        let Some(w) = guard(rep, &name, catalog.weight(&def.label))? else { continue };
        let Some(r) = guard(rep, &name, ap_constant(&w, 2.0))? else { continue };
        let finite = r.constant.is_finite();
        let verdict = if finite {
            format!("A2 = {:.6}", r.constant.value())
        } else {
            format!("A2 = inf, witness [{:e}, {:e}]", r.witness_interval.lo, r.witness_interval.hi)
        };
        let status = match expected_a2(def) {
            Some(e) if e != finite => Status::Fail,
            _ => Status::Pass,
        };
        rep.push(CheckRow::new(&name, status, verdict).scalar(Some(r.constant.value()), None));
        rep.detail(name, &r)?;
    }
    Ok(())
}

fn hmw(catalog: &Catalog, tol: &Tolerances, rep: &mut SuiteReport) -> Result<()> {
    let f = AnalyticFn::moebius_pole(1.0)?;
    for def in &catalog.weights {
        let name = format!("hmw/{}", def.label);
        let Some(v) = guard(rep, &name, catalog.weight(&def.label))? else { continue };
        let Some(a2) = guard(rep, &name, ap_constant(&v, 2.0))? else { continue };
        if !a2.constant.is_finite() {
            rep.push(CheckRow::new(&name, Status::Pass, "majorant not A2: refused (expected)"));
            rep.detail(name, &a2)?;
            continue;
        }
        let Some(probe) = guard(rep, &name, a_infty_probe(&v))? else { continue };
        let Some(w) = guard(rep, &name, construct_extension_with(&v, &probe))? else { continue };
        let Some(r) = guard(rep, &name, hmw_product_test_with(&f, &w, &v, &Lattice::coarse(), tol))? else { continue };
        let (status, verdict) = if r.norm.member {
            (Status::Pass, format!("F^2 W in H^1, C = {:.4}", r.majorization_constant))
        } else {
            (Status::Contradiction, format!("F^2 W not in H^1 ({:?}) at C = {:.4}", r.norm.convergence, r.majorization_constant))
        };
        rep.push(CheckRow::new(&name, status, verdict).scalar(r.norm.norm(), Some(tol.majorization_cap)));
        rep.heights(&name, &r.norm);
        rep.detail(name, &r)?;
    }
    Ok(())
}

fn main_theorem(catalog: &Catalog, tol: &Tolerances, rep: &mut SuiteReport) -> Result<()> {
    let lattice = Lattice::coarse();
    for entry in &catalog.functions.functions {
        let name = format!("main-theorem/{}", entry.name);
        let Some(f) = guard(rep, &name, catalog.build_function(entry))? else { continue };
        let r = match equivalence_harness_with(&f, &lattice, tol) {
            Err(Error::Precondition(m)) => {
                rep.push(CheckRow::new(&name, Status::Pass, format!("outside the hypotheses: {m}")));
                continue;
            }
            r => r,
        };
        let Some(r) = guard(rep, &name, r)? else { continue };
        let status = match r.verdict {
            Verdict::Witness | Verdict::NotSmirnovConsistent => Status::Pass,
            Verdict::Inconclusive => Status::Inconclusive,
            Verdict::Contradiction => Status::Contradiction,
        };
        let mut row = CheckRow::new(&name, status, format!("{:?} / {:?}", r.classification, r.verdict)).scalar(Some(r.max_abs_defect), Some(tol.smirnov));
        if let Some(w) = &r.witness {
            row.witness = Some((w.m, w.s, w.q));
            rep.heights(&format!("{name}/forward"), &w.forward_report);
            rep.heights(&format!("{name}/inverse"), &w.inverse_report);
        }
        rep.push(row);
        rep.detail(name, &r)?;
    }
    Ok(())
}

fn map_for(b: &PolylineBoundary) -> Result<ConformalMap> {
    match wedge_slope(b) {
        Some(m) => wedge_map(m),
        None => solve_sc(b),
    }
}

fn pass(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn conformal(catalog: &Catalog, tol: &Tolerances, rep: &mut SuiteReport) -> Result<()> {
    let lattice = Lattice::coarse();
    for (bname, b) in &catalog.boundaries {
        let name = format!("conformal/{bname}");
        let Some(map) = guard(rep, &format!("{name}/solve"), map_for(b))? else { continue };
        let res = map.max_residual();
        rep.push(CheckRow::new(format!("{name}/solve"), pass(res <= tol.sc), format!("residual {res:e}")).scalar(Some(res), Some(tol.sc)));
        rep.detail(format!("{name}/map"), &map.dump())?;
        let Some(d) = guard(rep, &format!("{name}/diagnostics"), phi_prime_diagnostics_with(&map, &lattice, tol))? else { continue };
        rep.push(CheckRow::new(format!("{name}/arg"), pass(d.arg_ok), format!("sup |arg Phi'| = {:.9}", d.arg_sup)).scalar(Some(d.arg_sup), Some(d.arg_bound)));
        let a2 = d.a2.constant.value();
        rep.push(CheckRow::new(format!("{name}/a2"), pass(d.a2_ok), format!("A2 = {a2:.6}")).scalar(Some(a2), None));
        for hn in &d.h1 {
            rep.heights(&format!("{name}/h1/forward/eps={}", hn.epsilon), &hn.forward);
            rep.heights(&format!("{name}/h1/inverse/eps={}", hn.epsilon), &hn.inverse);
        }
        let h1: Vec<String> = d.h1.iter().map(|h| format!("eps {}: {}/{}", h.epsilon, h.forward.member, h.inverse.member)).collect();
        rep.push(CheckRow::new(format!("{name}/h1"), pass(d.h1_ok), h1.join("; ")));
        rep.push(
            CheckRow::new(format!("{name}/smirnov"), pass(d.smirnov_ok), format!("{:?}", d.smirnov.classification))
                .scalar(Some(d.smirnov.max_abs_defect()), Some(tol.smirnov)),
        );
        rep.detail(format!("{name}/diagnostics"), &d)?;
        let one = DomainFn::constant(Complex64::new(1.0, 0.0))?;
        let Some(ae) = guard(rep, &format!("{name}/ae_chain"), domain_ae_membership(&one, &ArcWeight::arc_length(), &map, &lattice, tol))? else { continue };
        rep.push(CheckRow::new(format!("{name}/ae_chain"), pass(ae.member), format!("G = 1, ds: member {}", ae.member)));
    }
    Ok(())
}

/// The base affine family plus two members drawn from `seed`.
pub fn seeded_family(seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fam = BASE_FAMILY.to_vec();
    for _ in 0..2 {
        let lambda = 2f64.powf(rng.gen_range(-1.0..1.0));
        let beta = rng.gen_range(-1.0..1.0);
        fam.push((lambda, beta));
    }
    fam
}

fn norm_equivalence(catalog: &Catalog, tol: &Tolerances, seed: u64, rep: &mut SuiteReport) -> Result<()> {
    let grid = default_grid();
    let family = seeded_family(seed);
    let one = SampledWeight::constant(grid.clone(), 1.0)?;
    let triples = [
        ("dx", one.clone(), one.clone(), AnalyticFn::one()),
        ("sqrt", SampledWeight::power(grid, 0.5)?, one, AnalyticFn::power(0.5)?),
    ];
    for entry in catalog.panel() {
        let Some(f) = guard(rep, &entry.name, catalog.build_function(entry))? else { continue };
        for (tag, nu, mu, h) in &triples {
            let name = format!("norm-equivalence/{tag}/{}", entry.name);
            let Some(r) = guard(rep, &name, norm_change_check_with(&f, h, 1.0, nu, mu, &family, tol))? else { continue };
            let member = r.members.iter().all(|m| m.norm_nu.is_some());
            let status = if r.contradiction {
                Status::Contradiction
            } else {
                pass(r.equivalent)
            };
            let verdict = match r.band {
                Some((lo, hi)) => format!("member on both sides, ratio band [{lo:.6}, {hi:.6}]"),
                None if member => "member".into(),
                None => "non-member on both sides".into(),
            };
            rep.push(CheckRow::new(&name, status, verdict).scalar(r.band.map(|b| b.1 / b.0), Some(r.band_limit)));
            rep.detail(name, &r)?;
        }
    }
    Ok(())
}

/// Powers of `(ζ - ζ₀)` with `ζ₀` one unit below the first vertex, so the
/// downward cut stays outside the domain.
pub fn domain_panel(b: &PolylineBoundary) -> Result<Vec<DomainFn>> {
    let v = b.vertices()[0];
    let z0 = Complex64::new(v.0, v.1 - 1.0);
    let pw = |e: f64| DomainFn::shifted_power(z0, e).with_label(format!("(w-w0)^{e}"));
    Ok(vec![
        pw(-2.0),
        pw(-3.0),
        DomainFn::exp_linear(Complex64::i()).mul(&pw(-2.0)).with_label("exp(iw)(w-w0)^-2"),
        pw(-1.5),
        pw(-1.0),
        DomainFn::constant(Complex64::new(1.0, 0.0))?.with_label("1"),
    ])
}

fn panel_rows(rep: &mut SuiteReport, prefix: &str, panel: &TransferPanel) -> Result<()> {
    for row in &panel.rows {
        let name = format!("{prefix}/{}", row.label);
        let status = if row.agree { Status::Pass } else { Status::Contradiction };
        let verdict = match (row.left.member, row.ratio) {
            (true, Some(r)) => format!("member on both sides, ratio {r:.6}"),
            (l, _) => format!("domain {l} / half-plane {}", row.right.member),
        };
        rep.push(CheckRow::new(&name, status, verdict).scalar(row.ratio, None));
        rep.heights(&format!("{name}/left"), &row.left);
        rep.heights(&format!("{name}/right"), &row.right);
    }
    rep.detail(prefix, panel)
}

fn transfer(catalog: &Catalog, tol: &Tolerances, seed: u64, rep: &mut SuiteReport) -> Result<()> {
    let opts = NormOptions::from_tolerances(tol);
    let ds = ArcWeight::arc_length();
    let family = seeded_family(seed);
    let mut panel_fns = Vec::new();
    for entry in catalog.panel() {
        if let Some(f) = guard(rep, &entry.name, catalog.build_function(entry))? {
            panel_fns.push(f);
        }
    }
    for (bname, b) in &catalog.boundaries {
        let name = format!("transfer/{bname}");
        let Some(map) = guard(rep, &name, map_for(b))? else { continue };
        if let Some(p) = guard(rep, &format!("{name}/composition"), transfer_panel(&domain_panel(b)?, 1.0, &ds, &map, &opts))? {
            panel_rows(rep, &format!("{name}/composition"), &p)?;
        }
        let mut probe = panel_fns.first();
        if let Some(p) = guard(rep, &format!("{name}/pullback"), pullback_panel(&panel_fns, 1.0, &ds, &map, &opts))? {
            panel_rows(rep, &format!("{name}/pullback"), &p)?;
            probe = p.rows.iter().position(|r| r.left.member).and_then(|k| panel_fns.get(k)).or(probe);
        }
        // The derivative-weight equivalence at p = 1 (hypothesis holds: the
        // weight is 1) and p = 3, on the first panel function whose pullback
        // is a member.
        let Some(f) = probe else { continue };
        for p in [1.0, 3.0] {
            let cname = format!("{name}/derivative-weight/p={p}/{}", f.label());
            let Some(r) = guard(rep, &cname, cor44_check_with(f, p, &ds, &map, &family, tol))? else { continue };
            let (status, verdict) = match (&r.norm_change, &r.message) {
                (Some(n), _) if n.contradiction => (Status::Contradiction, "verdicts differ".to_string()),
                (Some(n), _) => (pass(n.equivalent), format!("hypothesis satisfied, band {:?}", n.band)),
                (None, Some(m)) => (Status::Pass, m.clone()),
                (None, None) => (Status::Fail, "no result".into()),
            };
            rep.push(CheckRow::new(&cname, status, verdict).scalar(r.norm_change.as_ref().and_then(|n| n.band.map(|b| b.1 / b.0)), Some(tol.equivalence_band)));
            rep.detail(cname, &r)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!(matches!("nope".parse::<Suite>(), Err(Error::Input(_))));
    }

    #[test]
    fn family_is_seeded() {
        assert_eq!(seeded_family(7), seeded_family(7));
        assert_ne!(seeded_family(7), seeded_family(8));
        assert_eq!(&seeded_family(0)[..5], &BASE_FAMILY[..]);
    }

    #[test]
    fn power_law_expectations() {
        let c = Catalog::default();
        let got: Vec<_> = c.weights.iter().map(|w| (w.label.as_str(), expected_a2(w))).collect();
        assert!(got.contains(&("sqrt", Some(true))));
        assert!(got.contains(&("cube", Some(false))));
        assert!(got.contains(&("inv", Some(false))));
    }
}
