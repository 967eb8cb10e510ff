use serde::{Deserialize, Serialize};

use super::norms::{hardy_norm_halfplane_with, Convergence, HardyNormReport, NormOptions};
use crate::analytic::{ae_pair_membership_with, smirnov_defect_with, AeReport, AnalyticFn, Classification, Lattice};
use crate::numerics::default_grid;
use crate::weights::{a_infty_probe, SampledWeight};
use crate::{Error, Result, Tolerances};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceWitness {
    pub m: f64,
    pub s: f64,
    pub q: f64,
    /// `F/(i+z)^m` in `H¹`.
    pub forward_report: HardyNormReport,
    /// `F^{-q}/(i+z)^s` in `H¹`.
    pub inverse_report: HardyNormReport,
}

impl EquivalenceWitness {
    pub fn is_valid(&self) -> bool {
        self.forward_report.member && self.inverse_report.member
    }
}

/// One tried condition of the witness search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchStep {
    /// `"forward"` or `"inverse"`.
    pub condition: String,
    /// Power of `(i+z)` in the denominator.
    pub denominator: f64,
    /// Exponent `q` of `F^{-q}`; 0 for forward steps.
    pub q: f64,
    pub member: bool,
    pub convergence: Convergence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Of Smirnov type and a witness `(m, q, s)` was found.
    Witness,
    /// Not of Smirnov type and no witness exists on the search grid.
    NotSmirnovConsistent,
    /// A witness was found for a function that is not of Smirnov type.
    Contradiction,
    /// Classification inconclusive, or no witness on the finite grid.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub label: String,
    pub classification: Classification,
    pub max_abs_defect: f64,
    pub r_star: f64,
    pub m_grid: Vec<f64>,
    pub q_grid: Vec<f64>,
    pub steps: Vec<SearchStep>,
    pub witness: Option<EquivalenceWitness>,
    pub verdict: Verdict,
}

fn dedup(v: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for x in v {
        if !out.iter().any(|y| (x - y).abs() <= 1e-12 * x.abs().max(1.0)) {
            out.push(x);
        }
    }
    out
}

pub fn equivalence_harness(f: &AnalyticFn) -> Result<EquivalenceReport> {
    equivalence_harness_with(f, &Lattice::coarse(), &Tolerances::default())
}

/// Smirnov classification of `F` against the existence of `(m, q, s)` with
/// `F/(i+z)^m` and `F^{-q}/(i+z)^s` in `H¹`. The search follows the
/// constructive choices first: `m ∈ {2, 2(r*-1), 4, 8}`, `q ∈ {1, 1/(r*-1)}`,
/// `s` over the `m` grid, where `r*` is the smallest probed `A_r` exponent of
/// `|F̃|`.
pub fn equivalence_harness_with(f: &AnalyticFn, lattice: &Lattice, tol: &Tolerances) -> Result<EquivalenceReport> {
    let smirnov = smirnov_defect_with(f, lattice, tol.smirnov)?;
    let boundary = f
        .boundary_weight(&default_grid())
        .ok_or_else(|| Error::Precondition(format!("{}: boundary modulus has no closed form", f.label())))?;
    let probe = a_infty_probe(&boundary)?;
    let r_star = probe.r_star.ok_or_else(|| Error::Precondition(format!("{}: boundary modulus not in A_∞", f.label())))?;
    let m_grid = dedup([2.0, 2.0 * (r_star - 1.0), 4.0, 8.0]);
    let q_grid = dedup([1.0, 1.0 / (r_star - 1.0)]);
    let mut report = EquivalenceReport {
        label: f.label().to_string(),
        classification: smirnov.classification,
        max_abs_defect: smirnov.max_abs_defect(),
        r_star,
        m_grid: m_grid.clone(),
        q_grid: q_grid.clone(),
        steps: Vec::new(),
        witness: None,
        verdict: Verdict::Inconclusive,
    };
    if smirnov.classification == Classification::Inconclusive {
        return Ok(report);
    }
    let one = SampledWeight::constant(default_grid(), 1.0)?;
    let opts = NormOptions::from_tolerances(tol);
    let mut h1 = |condition: &str, g: AnalyticFn, d: f64, q: f64| -> Result<HardyNormReport> {
        let g = g.mul(&AnalyticFn::moebius_pole(d)?);
        let rep = hardy_norm_halfplane_with(&g, 1.0, &one, &opts)?;
        report.steps.push(SearchStep { condition: condition.into(), denominator: d, q, member: rep.member, convergence: rep.convergence });
        Ok(rep)
    };
    let mut forward = None;
    for &m in &m_grid {
        let rep = h1("forward", f.clone(), m, 0.0)?;
        if rep.member {
            forward = Some((m, rep));
            break;
        }
    }
    let mut witness = None;
    if let Some((m, forward_report)) = forward {
        'search: for &q in &q_grid {
            for &s in &m_grid {
                let rep = h1("inverse", f.powf(-q), s, q)?;
                if rep.member {
                    witness = Some(EquivalenceWitness { m, s, q, forward_report, inverse_report: rep });
                    break 'search;
                }
            }
        }
    }
    report.verdict = match (smirnov.classification, witness.is_some()) {
        (Classification::Smirnov, true) => Verdict::Witness,
        (Classification::NotSmirnov, true) => Verdict::Contradiction,
        (Classification::NotSmirnov, false) => Verdict::NotSmirnovConsistent,
        _ => Verdict::Inconclusive,
    };
    report.witness = witness;
    Ok(report)
}

/// Dilations and translations `z ↦ λz + β` always tried.
pub const BASE_FAMILY: [(f64, f64); 5] = [(1.0, 0.0), (0.5, 0.0), (2.0, 0.0), (1.0, 1.0), (1.0, -1.0)];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyMember {
    pub lambda: f64,
    pub beta: f64,
    /// `‖F(λ·+β)‖_{H^p(ν)}`, `None` when infinite.
    pub norm_nu: Option<f64>,
    /// `‖F(λ·+β) h^{1/p}‖_{H^p(μ)}`.
    pub norm_mu: Option<f64>,
    pub ratio: Option<f64>,
    pub contradiction: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormChangeReport {
    pub label: String,
    pub h_label: String,
    pub p: f64,
    pub ae: AeReport,
    pub members: Vec<FamilyMember>,
    /// `(min, max)` of the ratio over members with both norms finite.
    pub band: Option<(f64, f64)>,
    pub band_limit: f64,
    pub equivalent: bool,
    pub contradiction: bool,
}

pub fn norm_change_check(f: &AnalyticFn, h: &AnalyticFn, p: f64, nu: &SampledWeight, mu: &SampledWeight) -> Result<NormChangeReport> {
    norm_change_check_with(f, h, p, nu, mu, &BASE_FAMILY, &Tolerances::default())
}

/// Compares `‖G‖_{H^p(ν)}` with `‖G h^{1/p}‖_{H^p(μ)}` for `G = F(λz+β)`
/// over `family`. Requires `h ∈ AE(ν, μ)`. A member finite on one side only
/// is a contradiction; otherwise the norms are equivalent when the ratio
/// band lies in `[1/C, C]`.
pub fn norm_change_check_with(
    f: &AnalyticFn,
    h: &AnalyticFn,
    p: f64,
    nu: &SampledWeight,
    mu: &SampledWeight,
    family: &[(f64, f64)],
    tol: &Tolerances,
) -> Result<NormChangeReport> {
    norm_change_check_with_options(f, h, p, nu, mu, family, tol, &NormOptions::from_tolerances(tol))
}

/// [`norm_change_check_with`] with explicit height schedule and quadrature.
#[allow(clippy::too_many_arguments)]
pub fn norm_change_check_with_options(
    f: &AnalyticFn,
    h: &AnalyticFn,
    p: f64,
    nu: &SampledWeight,
    mu: &SampledWeight,
    family: &[(f64, f64)],
    tol: &Tolerances,
    opts: &NormOptions,
) -> Result<NormChangeReport> {
    let ae = ae_pair_membership_with(h, nu, mu, &Lattice::coarse(), tol)?;
    if !ae.member {
        return Err(Error::Precondition(format!("{} ∉ AE({}, {})", h.label(), nu.label(), mu.label())));
    }
    let hp = h.powf(1.0 / p);
    let mut members = Vec::with_capacity(family.len());
    for &(lambda, beta) in family {
        let g = f.compose_affine(lambda, beta)?;
        let a = hardy_norm_halfplane_with(&g, p, nu, opts)?;
        let b = hardy_norm_halfplane_with(&g.mul(&hp), p, mu, opts)?;
        let ratio = match (a.norm(), b.norm()) {
            (Some(x), Some(y)) if x > 0.0 => Some(y / x),
            _ => None,
        };
        members.push(FamilyMember { lambda, beta, norm_nu: a.norm(), norm_mu: b.norm(), ratio, contradiction: a.member != b.member });
    }
    let band = members.iter().filter_map(|m| m.ratio).fold(None, |acc: Option<(f64, f64)>, r| match acc {
        None => Some((r, r)),
        Some((lo, hi)) => Some((lo.min(r), hi.max(r))),
    });
    let c = tol.equivalence_band;
    let contradiction = members.iter().any(|m| m.contradiction);
    let equivalent = !contradiction && band.is_none_or(|(lo, hi)| lo >= 1.0 / c && hi <= c);
    Ok(NormChangeReport {
        label: f.label().to_string(),
        h_label: h.label().to_string(),
        p,
        ae,
        members,
        band,
        band_limit: c,
        equivalent,
        contradiction,
    })
}
