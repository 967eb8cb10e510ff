use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{default_heights, ConeGeometry};
use crate::analytic::AnalyticFn;
use crate::numerics::quadrature::Adaptive;
use crate::numerics::{integrate_line, Focus, HalfPlanePoint, LinePlan};
use crate::weights::SampledWeight;
use crate::{Error, Result, Tolerances};

/// Height schedule and quadrature for the norms.
#[derive(Debug, Clone, PartialEq)]
pub struct NormOptions {
    pub heights: Vec<f64>,
    pub quad: Adaptive,
    /// Band for agreement between the maximal and horizontal forms.
    pub equivalence_band: f64,
}

impl Default for NormOptions {
    fn default() -> Self {
        let t = Tolerances::default();
        Self { heights: default_heights(), quad: Adaptive::new(t.norm_rel, 1e-14), equivalence_band: t.equivalence_band }
    }
}

impl NormOptions {
    pub fn from_tolerances(t: &Tolerances) -> Self {
        Self { heights: default_heights(), quad: Adaptive::new(t.norm_rel, 1e-14), equivalence_band: t.equivalence_band }
    }

    /// Twice as many heights over the same range.
    pub fn refined(&self) -> Self {
        let mut h = Vec::with_capacity(2 * self.heights.len());
        for w in self.heights.windows(2) {
            h.push(w[0]);
            h.push((w[0] * w[1]).sqrt());
        }
        h.extend(self.heights.last());
        Self { heights: h, quad: Adaptive::new(self.quad.rel_tol * 0.1, self.quad.abs_tol), equivalence_band: self.equivalence_band }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convergence {
    /// Bounded over the schedule, settled toward both ends.
    Resolved,
    /// Bounded, but the small-height trend has not clearly settled; any
    /// divergence would only show below the smallest height.
    UnresolvedBelowYmin,
    /// Some height gives a divergent or non-finite integral.
    Divergent,
    /// Still increasing at the largest height.
    GrowsAtLargeHeight,
    /// Increments per decade toward `y → 0` do not shrink.
    GrowsAtSmallHeight,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyNormReport {
    pub label: String,
    pub weight_label: String,
    pub p: f64,
    pub heights_scanned: Vec<f64>,
    /// `∫ |F(x+ih)|^p w(x) dx` per height; `None` where it diverges.
    pub per_height_integral: Vec<Option<f64>>,
    pub per_height_error: Vec<f64>,
    /// Sup over heights, `None` when infinite.
    pub supremum: Option<f64>,
    pub member: bool,
    pub convergence: Convergence,
    pub witness_height: Option<f64>,
}

impl HardyNormReport {
    /// `supremum^{1/p}`, the norm itself.
    pub fn norm(&self) -> Option<f64> {
        self.supremum.map(|s| s.powf(1.0 / self.p))
    }
}

fn line_plan(f: &AnalyticFn, w: &SampledWeight, scale: f64) -> LinePlan {
    let r = w.core_radius();
    let mut foci: Vec<Focus> = f.hotspots().into_iter().map(|at| Focus { at, scale }).collect();
    foci.push(Focus { at: 0.0, scale: 1.0 + scale });
    for s in w.singulars() {
        foci.push(Focus { at: s.at, scale });
    }
    LinePlan::whole_line(r).with_singulars(w.singulars().iter().copied()).with_foci(foci).with_breakpoints([-r, r])
}

fn height_integral(f: &AnalyticFn, p: f64, w: &SampledWeight, y: f64, quad: &Adaptive) -> Result<(f64, f64)> {
    let plan = line_plan(f, w, y);
    let est = integrate_line(quad, &plan, |x| {
        let z = HalfPlanePoint::new(x, y)?;
        let v = (p * f.log_abs(z)? + w.log_eval(x)).exp();
        if !v.is_finite() {
            return Err(Error::NonFinite { at: x });
        }
        Ok(v)
    })?;
    if !est.value.is_finite() {
        return Err(Error::NonFinite { at: 0.0 });
    }
    Ok((est.value, est.error))
}

pub fn hardy_norm_halfplane(f: &AnalyticFn, p: f64, w: &SampledWeight) -> Result<HardyNormReport> {
    hardy_norm_halfplane_with(f, p, w, &NormOptions::default())
}

/// `sup_h ∫ |F(x+ih)|^p w(x) dx` over the height schedule.
///
/// Membership fails when some height diverges, when the integral still
/// grows by more than 1% at the top of the schedule, or when its increments
/// over the two lowest decades do not shrink (ratio ≥ 0.9). A ratio in
/// `[0.7, 0.9)` is reported as unresolved below the smallest height.
pub fn hardy_norm_halfplane_with(f: &AnalyticFn, p: f64, w: &SampledWeight, opts: &NormOptions) -> Result<HardyNormReport> {
    check_exponent(p)?;
    scan_heights(f.label(), w.label(), p, &opts.heights, |y| height_integral(f, p, w, y, &opts.quad))
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::Argument(format!("p must be positive, got {p}")));
    }
    Ok(())
}

/// Runs `integral` over `heights` and classifies the result.
pub(crate) fn scan_heights(
    label: &str,
    weight_label: &str,
    p: f64,
    heights: &[f64],
    integral: impl Fn(f64) -> Result<(f64, f64)> + Sync,
) -> Result<HardyNormReport> {
    let results: Vec<Result<(f64, f64)>> = heights.par_iter().map(|&y| integral(y)).collect();
    let mut per_height = Vec::with_capacity(heights.len());
    let mut errors = Vec::with_capacity(heights.len());
    let mut witness = None;
    for (y, r) in heights.iter().zip(results) {
        match r {
            Ok((v, e)) => {
                per_height.push(Some(v));
                errors.push(e);
            }
            Err(Error::Divergent { .. }) | Err(Error::NonFinite { .. }) | Err(Error::NonIntegrable(_)) => {
                per_height.push(None);
                errors.push(f64::INFINITY);
                witness.get_or_insert(*y);
            }
            Err(e) => return Err(e),
        }
    }
    let report = |supremum: Option<f64>, member, convergence, witness_height| HardyNormReport {
        label: label.to_string(),
        weight_label: weight_label.to_string(),
        p,
        heights_scanned: heights.to_vec(),
        per_height_integral: per_height.clone(),
        per_height_error: errors.clone(),
        supremum,
        member,
        convergence,
        witness_height,
    };
    if witness.is_some() {
        return Ok(report(None, false, Convergence::Divergent, witness));
    }
    let vals: Vec<f64> = per_height.iter().map(|v| v.expect("all finite")).collect();
    let (sup_k, sup) = vals.iter().copied().enumerate().fold((0, f64::NEG_INFINITY), |a, (k, v)| if v > a.1 { (k, v) } else { a });
    let n = vals.len();
    if n >= 2 && vals[n - 1] > 1.01 * vals[n - 2] {
        return Ok(report(None, false, Convergence::GrowsAtLargeHeight, Some(heights[n - 1])));
    }
    // Increments over the two lowest decades of the schedule.
    let decade = |k: usize| heights.iter().position(|h| *h >= heights[0] * 10f64.powi(k as i32) * (1.0 - 1e-9));
    let mut convergence = Convergence::Resolved;
    if let (Some(i1), Some(i2)) = (decade(1), decade(2)) {
        let d1 = vals[0] - vals[i1];
        let d2 = vals[i1] - vals[i2];
        if d1 > 0.0 && d2 > 0.0 {
            let ratio = d1 / d2;
            if ratio >= 0.9 {
                return Ok(report(None, false, Convergence::GrowsAtSmallHeight, Some(heights[0])));
            }
            if ratio >= 0.7 {
                convergence = Convergence::UnresolvedBelowYmin;
            }
        }
    }
    Ok(report(Some(sup), true, convergence, Some(heights[sup_k])))
}

/// `max |F|` over the sampled cone `Γ_α(ξ)`.
pub fn nt_maximal(f: &AnalyticFn, cone: &ConeGeometry, xi: f64) -> Result<f64> {
    let mut best = f64::NEG_INFINITY;
    for (x, y) in cone.samples(xi) {
        best = best.max(f.log_abs(HalfPlanePoint::new(x, y)?)?);
    }
    Ok(best.exp())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximalNormReport {
    pub label: String,
    pub weight_label: String,
    pub p: f64,
    pub alpha: f64,
    /// `∫ (M_α F)^p w`, `None` when infinite.
    pub integral: Option<f64>,
    pub member: bool,
    pub horizontal: HardyNormReport,
    pub convergence: Convergence,
    /// `integral / horizontal supremum` when both are finite.
    pub ratio: Option<f64>,
    pub band: f64,
    pub agrees: bool,
}

pub fn hardy_norm_maximal(f: &AnalyticFn, p: f64, w: &SampledWeight, cone: &ConeGeometry) -> Result<MaximalNormReport> {
    hardy_norm_maximal_with(f, p, w, cone, &NormOptions::default())
}

/// `‖M_α F‖^p_{L^p(w)}` by adaptive quadrature in `ξ`, with the horizontal
/// form alongside. They agree when both flags match and, if finite, the
/// ratio lies in `[1/C, C]`.
pub fn hardy_norm_maximal_with(f: &AnalyticFn, p: f64, w: &SampledWeight, cone: &ConeGeometry, opts: &NormOptions) -> Result<MaximalNormReport> {
    check_exponent(p)?;
    let horizontal = hardy_norm_halfplane_with(f, p, w, opts)?;
    let quad = Adaptive::new(1e-6, 1e-14);
    let maximal_integral = |cone: &ConeGeometry| -> Result<Option<f64>> {
        let plan = line_plan(f, w, cone.heights()[0]);
        match integrate_line(&quad, &plan, |xi| {
            let v = (p * nt_maximal(f, cone, xi)?.ln() + w.log_eval(xi)).exp();
            if !v.is_finite() {
                return Err(Error::NonFinite { at: xi });
            }
            Ok(v)
        }) {
            Ok(est) if est.value.is_finite() => Ok(Some(est.value)),
            Ok(_) | Err(Error::Divergent { .. }) | Err(Error::NonFinite { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let mut integral = maximal_integral(cone)?;
    let mut convergence = if integral.is_some() { Convergence::Resolved } else { Convergence::Divergent };
    // Same two-decade increment test as the horizontal form, on cones cut
    // off one and two decades above the lowest height.
    if let Some(v0) = integral {
        let floor = cone.heights()[0];
        let cut = |k: i32| cone.truncated(floor * 10f64.powi(k) * (1.0 - 1e-9));
        if let (Some(c1), Some(c2)) = (cut(1), cut(2)) {
            if let (Some(v1), Some(v2)) = (maximal_integral(&c1)?, maximal_integral(&c2)?) {
                let (d1, d2) = (v0 - v1, v1 - v2);
                if d1 > 0.0 && d2 > 0.0 {
                    let r = d1 / d2;
                    if r >= 0.9 {
                        integral = None;
                        convergence = Convergence::GrowsAtSmallHeight;
                    } else if r >= 0.7 {
                        convergence = Convergence::UnresolvedBelowYmin;
                    }
                }
            }
        }
    }
    let member = integral.is_some();
    let ratio = match (integral, horizontal.supremum) {
        (Some(a), Some(b)) if b > 0.0 => Some(a / b),
        _ => None,
    };
    let band = opts.equivalence_band;
    let agrees = member == horizontal.member && ratio.is_none_or(|r| r >= 1.0 / band && r <= band);
    Ok(MaximalNormReport {
        label: f.label().to_string(),
        weight_label: w.label().to_string(),
        p,
        alpha: cone.alpha(),
        integral,
        member,
        horizontal,
        convergence,
        ratio,
        band,
        agrees,
    })
}
