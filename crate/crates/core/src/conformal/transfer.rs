use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::diagnostics::boundary_modulus;
use super::{pushforward, ArcWeight, ConformalMap};
use crate::analytic::{ae_membership_with, AeReport, AnalyticFn, Lattice};
use crate::hardy::{
    check_exponent, hardy_norm_halfplane_with, norm_change_check_with_options, scan_heights, HardyNormReport, NormChangeReport, NormOptions,
};
use crate::numerics::{default_grid, integrate_line, BoundaryFn, FnTail, Focus, HalfPlanePoint, LinePlan};
use crate::weights::{a_infty_probe, ApReport, SampledWeight};
use crate::{Error, Result, Tolerances};

type LogFn = Arc<dyn Fn(Complex64) -> Result<Complex64> + Send + Sync>;

/// An analytic function on `Ω`, given by a logarithm.
#[derive(Clone)]
pub struct DomainFn {
    label: String,
    log: LogFn,
    /// Abscissae near which the function varies quickly close to `Λ`.
    hotspots: Vec<f64>,
    /// `|G(w)| ~ |w|^e` at infinity, when known.
    power_at_infinity: Option<f64>,
    constant: Option<Complex64>,
}

impl fmt::Debug for DomainFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DomainFn").field("label", &self.label).finish()
    }
}

impl DomainFn {
    pub fn from_log_fn(label: impl Into<String>, log: impl Fn(Complex64) -> Result<Complex64> + Send + Sync + 'static) -> Self {
        Self { label: label.into(), log: Arc::new(log), hotspots: Vec::new(), power_at_infinity: None, constant: None }
    }

    pub fn constant(c: Complex64) -> Result<Self> {
        if c.norm() == 0.0 || !c.is_finite() {
            return Err(Error::Argument("constant must be nonzero and finite".into()));
        }
        let l = c.ln();
        let mut g = Self::from_log_fn(format!("{c}"), move |_| Ok(l));
        g.power_at_infinity = Some(0.0);
        g.constant = Some(c);
        Ok(g)
    }

    /// `(w - w₀)^e` with the cut running straight down from `w₀`. Analytic on
    /// `Ω` whenever `w₀` lies below `Λ`.
    pub fn shifted_power(w0: Complex64, e: f64) -> Self {
        let mut g = Self::from_log_fn(format!("(w-({w0}))^{e}"), move |w: Complex64| {
            let d = w - w0;
            let mut t = d.arg();
            if t < -PI / 2.0 {
                t += 2.0 * PI;
            }
            Ok(Complex64::new(d.norm().ln(), t) * e)
        });
        g.hotspots = vec![w0.re];
        g.power_at_infinity = Some(e);
        g
    }

    /// `e^{cw}`.
    pub fn exp_linear(c: Complex64) -> Self {
        Self::from_log_fn(format!("exp({c}w)"), move |w| Ok(c * w))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn log_eval(&self, w: Complex64) -> Result<Complex64> {
        (self.log)(w)
    }

    pub fn mul(&self, other: &DomainFn) -> DomainFn {
        let (a, b) = (self.log.clone(), other.log.clone());
        let mut hot = self.hotspots.clone();
        hot.extend(&other.hotspots);
        DomainFn {
            label: format!("{}*{}", self.label, other.label),
            log: Arc::new(move |w| Ok(a(w)? + b(w)?)),
            hotspots: hot,
            power_at_infinity: self.power_at_infinity.zip(other.power_at_infinity).map(|(x, y)| x + y),
            constant: self.constant.zip(other.constant).map(|(x, y)| x * y),
        }
    }

    /// Checks that the function is defined on `Ω` for `map`: singular points
    /// of the shifted powers must lie below `Λ`.
    fn check_domain(&self, map: &ConformalMap, probe: Complex64) -> Result<()> {
        if !map.boundary().contains(probe) {
            return Err(Error::Domain(format!("{probe} not in Ω")));
        }
        self.log_eval(probe).map(|_| ())
    }

    /// `G∘Φ` on the half-plane.
    pub fn compose(&self, map: &ConformalMap) -> Result<AnalyticFn> {
        if let Some(c) = self.constant {
            return AnalyticFn::constant(c);
        }
        let label = format!("{}∘Phi", self.label);
        let g = self.log.clone();
        let m = map.clone();
        let log_f = move |z: Complex64| g(m.phi(z)?);
        let boundary = match self.power_at_infinity {
            Some(e) => {
                let grid = default_grid();
                let r = grid.core_radius();
                let slope = e * (1.0 + map.exponent_sum());
                let (g2, m2) = (self.log.clone(), map.clone());
                let f = move |x: f64| m2.boundary_point(x).and_then(|w| g2(w)).map_or(f64::NAN, |l| l.re);
                let tails = [FnTail::log_power(f(-r) - slope * r.ln(), slope), FnTail::log_power(f(r) - slope * r.ln(), slope)];
                Some(BoundaryFn::exact(grid, format!("log|{label}|"), f, tails, Vec::new()))
            }
            None => None,
        };
        let mut marks = map.prevertices().to_vec();
        for h in &self.hotspots {
            if let Ok(x) = map.boundary_preimage(*h) {
                marks.push(x);
            }
        }
        Ok(AnalyticFn::from_log_fn_marked(label, "analytic function on the domain composed with the map", log_f, boundary, marks))
    }

    /// `(F∘Φ^{-1})·((Φ^{-1})')^k`, `k ∈ {0, 1}`.
    pub fn pullback(f: &AnalyticFn, map: &ConformalMap, with_derivative: bool) -> DomainFn {
        let (f2, m) = (f.clone(), map.clone());
        let label = if with_derivative { format!("({}∘Phi^-1)(Phi^-1)'", f.label()) } else { format!("{}∘Phi^-1", f.label()) };
        let mut g = Self::from_log_fn(label, move |w| {
            let z = m.inverse(w)?;
            let l = f2.log_eval(HalfPlanePoint::try_from(z)?)?;
            Ok(if with_derivative { l - m.log_phi_prime(z) } else { l })
        });
        g.hotspots = map.boundary().vertices().iter().map(|v| v.0).collect();
        g
    }
}

/// `sup_h ∫_Λ |G(ξ + ih)|^p dν(ξ)`, with `ξ + ih` the vertical translate of
/// the boundary point above `ξ`.
pub fn hardy_norm_domain(g: &DomainFn, p: f64, nu: &ArcWeight, map: &ConformalMap) -> Result<HardyNormReport> {
    hardy_norm_domain_with(g, p, nu, map, &NormOptions::default())
}

pub fn hardy_norm_domain_with(g: &DomainFn, p: f64, nu: &ArcWeight, map: &ConformalMap, opts: &NormOptions) -> Result<HardyNormReport> {
    check_exponent(p)?;
    let b = map.boundary();
    let probe = b.eta(b.vertices()[0].0) + Complex64::i();
    g.check_domain(map, probe).map_err(|e| Error::Domain(format!("{} is not defined on the domain: {e}", g.label())))?;
    let r = default_grid().core_radius();
    let vx: Vec<f64> = b.vertices().iter().map(|v| v.0).collect();
    scan_heights(g.label(), nu.label(), p, &opts.heights, |h| {
        let mut foci: Vec<Focus> = g.hotspots.iter().chain(&vx).map(|&at| Focus { at, scale: h }).collect();
        foci.extend(nu.singulars().iter().map(|s| Focus { at: s.at, scale: h }));
        foci.push(Focus { at: vx[0], scale: 1.0 + h });
        let plan = LinePlan::whole_line(r).with_singulars(nu.singulars().iter().copied()).with_foci(foci).with_breakpoints(vx.iter().copied());
        let est = integrate_line(&opts.quad, &plan, |xi| {
            let w = Complex64::new(xi, b.gamma(xi) + h);
            let v = (p * g.log_eval(w)?.re + nu.log_eval(xi)).exp() * b.arc_factor(xi);
            if !v.is_finite() {
                return Err(Error::NonFinite { at: xi });
            }
            Ok(v)
        })?;
        Ok((est.value, est.error))
    })
}

/// Membership on both sides of an equivalence for one panel function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelRow {
    pub label: String,
    pub left: HardyNormReport,
    pub right: HardyNormReport,
    /// `‖left‖ / ‖right‖` when both are finite.
    pub ratio: Option<f64>,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferPanel {
    pub statement: String,
    pub rows: Vec<PanelRow>,
    pub band: Option<(f64, f64)>,
    pub all_agree: bool,
}

fn row(label: String, left: HardyNormReport, right: HardyNormReport) -> PanelRow {
    let ratio = match (left.norm(), right.norm()) {
        (Some(a), Some(b)) if b > 0.0 => Some(a / b),
        _ => None,
    };
    PanelRow { label, agree: left.member == right.member, left, right, ratio }
}

fn panel(statement: String, rows: Vec<PanelRow>) -> TransferPanel {
    let band = rows.iter().filter_map(|r| r.ratio).fold(None, |acc: Option<(f64, f64)>, r| match acc {
        None => Some((r, r)),
        Some((lo, hi)) => Some((lo.min(r), hi.max(r))),
    });
    TransferPanel { statement, all_agree: rows.iter().all(|r| r.agree), rows, band }
}

/// `G ∈ H^p(Ω, ν)` against `G∘Φ ∈ H^p(ℝ²₊, Φ(ν))` for each panel function.
pub fn transfer_panel(functions: &[DomainFn], p: f64, nu: &ArcWeight, map: &ConformalMap, opts: &NormOptions) -> Result<TransferPanel> {
    let w = pushforward(map, nu)?;
    let mut rows = Vec::with_capacity(functions.len());
    for g in functions {
        let left = hardy_norm_domain_with(g, p, nu, map, opts)?;
        let right = hardy_norm_halfplane_with(&g.compose(map)?, p, &w, opts)?;
        rows.push(row(g.label().to_string(), left, right));
    }
    Ok(panel(format!("G in H^{p}(Omega, {}) iff G∘Phi in H^{p}(H, {})", nu.label(), w.label()), rows))
}

/// `(F∘Φ^{-1})(Φ^{-1})' ∈ H^p(Ω, ν)` against `F∘Φ^{-1} ∈ H^p(Ω, |(Φ^{-1})'|^p ν)`.
pub fn pullback_panel(functions: &[AnalyticFn], p: f64, nu: &ArcWeight, map: &ConformalMap, opts: &NormOptions) -> Result<TransferPanel> {
    let reweighted = nu.times_inverse_derivative(map, p)?;
    let mut rows = Vec::with_capacity(functions.len());
    for f in functions {
        let left = hardy_norm_domain_with(&DomainFn::pullback(f, map, true), p, nu, map, opts)?;
        let right = hardy_norm_domain_with(&DomainFn::pullback(f, map, false), p, &reweighted, map, opts)?;
        rows.push(row(f.label().to_string(), left, right));
    }
    Ok(panel(format!("(F∘Phi^-1)(Phi^-1)' in H^{p}(Omega, {}) iff F∘Phi^-1 in H^{p}(Omega, {})", nu.label(), reweighted.label()), rows))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cor44Report {
    pub label: String,
    pub p: f64,
    /// Probe of `Φ(ν)`.
    pub mu_probe: ApReport,
    /// Probe of `|Φ'|^{-p} Φ(ν)`.
    pub nu_probe: ApReport,
    pub hypothesis_satisfied: bool,
    /// `"hypothesis not satisfied: ..."` when a probe fails.
    pub message: Option<String>,
    pub norm_change: Option<NormChangeReport>,
}

pub fn cor44_check(f: &AnalyticFn, p: f64, nu: &ArcWeight, map: &ConformalMap) -> Result<Cor44Report> {
    cor44_check_with(f, p, nu, map, &crate::hardy::BASE_FAMILY, &Tolerances::default())
}

/// `F ∈ H^p(|Φ'|^{-p}Φ(ν)) ⟺ F/Φ' ∈ H^p(Φ(ν))` through the norm-change
/// check with `h = (Φ')^{-p}`. Failing `A_∞` probes are reported as an
/// unmet hypothesis, not as a violation.
pub fn cor44_check_with(
    f: &AnalyticFn,
    p: f64,
    nu: &ArcWeight,
    map: &ConformalMap,
    family: &[(f64, f64)],
    tol: &Tolerances,
) -> Result<Cor44Report> {
    cor44_check_with_options(f, p, nu, map, family, tol, &NormOptions::from_tolerances(tol))
}

/// [`cor44_check_with`] with explicit height schedule and quadrature.
pub fn cor44_check_with_options(
    f: &AnalyticFn,
    p: f64,
    nu: &ArcWeight,
    map: &ConformalMap,
    family: &[(f64, f64)],
    tol: &Tolerances,
    opts: &NormOptions,
) -> Result<Cor44Report> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Argument(format!("p must lie in [1, ∞), got {p}")));
    }
    let pp = map.phi_prime_fn()?;
    let mu = pushforward(map, nu)?;
    let modulus = boundary_modulus(&pp)?;
    let nu_w = SampledWeight::power_product(&modulus, -p, &mu, 1.0)?.with_label(format!("|Phi'|^-{p} {}", mu.label()));
    let mu_probe = a_infty_probe(&mu)?;
    let nu_probe = a_infty_probe(&nu_w)?;
    let mut report = Cor44Report {
        label: f.label().to_string(),
        p,
        mu_probe,
        nu_probe,
        hypothesis_satisfied: false,
        message: None,
        norm_change: None,
    };
    let failed: Vec<&str> = [(&report.mu_probe, "Phi(nu)"), (&report.nu_probe, "|Phi'|^-p Phi(nu)")]
        .iter()
        .filter(|(r, _)| !r.a_infty_established())
        .map(|(_, n)| *n)
        .collect();
    if !failed.is_empty() {
        report.message = Some(format!("hypothesis not satisfied: {} not in A_inf", failed.join(", ")));
        return Ok(report);
    }
    report.hypothesis_satisfied = true;
    let h = pp.powf(-p).with_label(format!("(Phi')^-{p}"));
    report.norm_change = Some(norm_change_check_with_options(f, &h, p, &nu_w, &mu, family, tol, opts)?);
    Ok(report)
}

/// `G ∈ AE(Ω, ν)`, meaning `(G∘Φ)·Φ' ∈ AE(ℝ²₊, Φ(ν))`.
pub fn domain_ae_membership(g: &DomainFn, nu: &ArcWeight, map: &ConformalMap, lattice: &Lattice, tol: &Tolerances) -> Result<AeReport> {
    let h = g.compose(map)?.mul(&map.phi_prime_fn()?);
    ae_membership_with(&h, &pushforward(map, nu)?, lattice, tol)
}
