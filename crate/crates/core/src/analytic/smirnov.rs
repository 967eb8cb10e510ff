use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::AnalyticFn;
use crate::numerics::quadrature::Adaptive;
use crate::numerics::{default_grid, logspace, poisson_convolve_with, BoundaryFn, FnTail, HalfPlanePoint};
use crate::weights::{a_infty_probe_with, IntervalFamily, SampledWeight};
use crate::{Error, Result, Tolerances};

/// Evaluation points in the upper half-plane.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    points: Vec<HalfPlanePoint>,
}

impl Default for Lattice {
    /// 64 log-spaced `|x|` in `[1e-2, 1e2]` of each sign plus `x = 0`, times
    /// 24 log-spaced heights in `[1e-3, 1e2]`.
    fn default() -> Self {
        Self::symmetric(64, 24)
    }
}

impl Lattice {
    /// `n_x` magnitudes per sign plus zero, `n_y` heights, same ranges as the default.
    pub fn symmetric(n_x: usize, n_y: usize) -> Self {
        let mags = logspace(1e-2, 1e2, n_x);
        let mut xs: Vec<f64> = mags.iter().rev().map(|m| -m).collect();
        xs.push(0.0);
        xs.extend(mags.iter().copied());
        Self::from_axes(&xs, &logspace(1e-3, 1e2, n_y)).expect("positive heights")
    }

    pub fn coarse() -> Self {
        Self::symmetric(12, 8)
    }

    pub fn from_axes(xs: &[f64], ys: &[f64]) -> Result<Self> {
        let mut points = Vec::with_capacity(xs.len() * ys.len());
        for &y in ys {
            for &x in xs {
                points.push(HalfPlanePoint::new(x, y)?);
            }
        }
        Ok(Self { points })
    }

    pub fn from_points(points: Vec<HalfPlanePoint>) -> Self {
        Self { points }
    }

    pub fn points(&self) -> &[HalfPlanePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Smirnov,
    NotSmirnov,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmirnovReport {
    pub label: String,
    /// `(x, y)` per lattice point.
    pub points: Vec<(f64, f64)>,
    /// `log|F(z)| - (P_y ∗ log|F̃|)(x)` per point.
    pub defect: Vec<f64>,
    pub max_defect: f64,
    pub min_defect: f64,
    pub classification: Classification,
    pub tolerance: f64,
    /// Where `log|F̃|` came from: declared, closed form or non-tangential trace.
    pub boundary_source: String,
}

impl SmirnovReport {
    pub fn max_abs_defect(&self) -> f64 {
        self.max_defect.abs().max(self.min_defect.abs())
    }
}

fn boundary_log(f: &AnalyticFn) -> Result<(BoundaryFn, &'static str)> {
    if let Some(w) = f.boundary_modulus() {
        return Ok((w.log_fn(), "declared"));
    }
    let grid = default_grid();
    if let Some(b) = f.closed_form_boundary_log(&grid) {
        return Ok((b, "closed form"));
    }
    let nodes = grid.nodes();
    let traces: Vec<Result<TraceValue>> = nodes.par_iter().map(|&x| nt_trace(f, x)).collect();
    let mut logs = Vec::with_capacity(nodes.len());
    for (x, t) in nodes.iter().zip(traces) {
        let t = t?;
        if !t.converged {
            return Err(Error::Precondition(format!("{}: boundary modulus not extractable at x = {x}", f.label())));
        }
        logs.push(t.value.norm().ln());
    }
    let n = nodes.len();
    let slope = |i: usize, j: usize| (logs[i] - logs[j]) / (nodes[i].abs().ln() - nodes[j].abs().ln());
    let k = n / 16;
    let (sm, sp) = (slope(0, k), slope(n - 1, n - 1 - k));
    let tails = [
        FnTail::log_power(logs[0] - sm * nodes[0].abs().ln(), sm),
        FnTail::log_power(logs[n - 1] - sp * nodes[n - 1].ln(), sp),
    ];
    Ok((BoundaryFn::from_samples(grid, format!("log|{}~|", f.label()), logs, tails)?, "non-tangential trace"))
}

pub fn smirnov_defect(f: &AnalyticFn, lattice: &Lattice) -> Result<SmirnovReport> {
    smirnov_defect_with(f, lattice, Tolerances::default().smirnov)
}

/// Defect field `log|F| - P_y ∗ log|F̃|` and its classification: Smirnov iff
/// `max |defect| ≤ tol`, NotSmirnov iff some defect `< -10 tol`.
pub fn smirnov_defect_with(f: &AnalyticFn, lattice: &Lattice, tol: f64) -> Result<SmirnovReport> {
    if lattice.is_empty() {
        return Err(Error::Argument("empty lattice".into()));
    }
    let (bl, source) = boundary_log(f)?;
    bl.check_poisson_integrable()?;
    let quad = Adaptive::new(1e-10, 1e-12);
    let defect: Vec<Result<f64>> = lattice
        .points()
        .par_iter()
        .map(|z| Ok(f.log_abs(*z)? - poisson_convolve_with(&quad, &bl, *z)?.value))
        .collect();
    let defect: Vec<f64> = defect.into_iter().collect::<Result<_>>()?;
    let max_defect = defect.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min_defect = defect.iter().copied().fold(f64::INFINITY, f64::min);
    let classification = if max_defect.abs().max(min_defect.abs()) <= tol {
        Classification::Smirnov
    } else if min_defect < -10.0 * tol {
        Classification::NotSmirnov
    } else {
        Classification::Inconclusive
    };
    Ok(SmirnovReport {
        label: f.label().to_string(),
        points: lattice.points().iter().map(|z| (z.x(), z.y())).collect(),
        defect,
        max_defect,
        min_defect,
        classification,
        tolerance: tol,
        boundary_source: source.into(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceValue {
    pub value: Complex64,
    pub converged: bool,
    pub iterations: usize,
}

const TRACE_STEPS: usize = 40;

/// Limit of `F(x + i y_k)`, `y_k = y_0 2^{-k}`, with a Richardson step on
/// the last difference. Converged when two successive difference ratios are
/// below 0.75 and the last difference is below `1e-7 |F|`.
pub fn nt_trace(f: &AnalyticFn, x: f64) -> Result<TraceValue> {
    let dist = f.hotspots().iter().map(|h| (x - h).abs()).fold(f64::INFINITY, f64::min);
    let y0 = 0.1 * dist.min(1.0);
    if !(y0 > 0.0) {
        return Err(Error::Domain(format!("{}: x = {x} is a boundary singularity", f.label())));
    }
    let mut vals: Vec<Complex64> = Vec::with_capacity(TRACE_STEPS);
    let mut y = y0;
    for k in 0..TRACE_STEPS {
        vals.push(f.eval(HalfPlanePoint::new(x, y)?)?);
        y *= 0.5;
        if k >= 3 {
            let d = |j: usize| (vals[j] - vals[j - 1]).norm();
            let (d1, d2, d3) = (d(k), d(k - 1), d(k - 2));
            let settled = d1 <= 1e-7 * vals[k].norm();
            if settled && (d1 < 0.75 * d2 || d2 == 0.0) && (d2 < 0.75 * d3 || d3 == 0.0) {
                let step = vals[k] - vals[k - 1];
                let prev = vals[k - 1] - vals[k - 2];
                let r = if prev.norm() > 0.0 { step / prev } else { Complex64::new(0.0, 0.0) };
                let value = if r.norm() < 0.75 { vals[k] + step * (r / (1.0 - r)) } else { vals[k] };
                return Ok(TraceValue { value, converged: true, iterations: k + 1 });
            }
            if d1 == 0.0 && d2 == 0.0 {
                return Ok(TraceValue { value: vals[k], converged: true, iterations: k + 1 });
            }
        }
    }
    Ok(TraceValue { value: *vals.last().expect("non-empty"), converged: false, iterations: TRACE_STEPS })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AeReport {
    pub member: bool,
    pub nonvanishing: bool,
    /// Range of `|nt_trace(H, x)| / μ(x)` over the sampled nodes.
    pub band: (f64, f64),
    pub band_limit: f64,
    pub band_ok: bool,
    pub trace_points: usize,
    pub unconverged_traces: usize,
    pub smirnov: SmirnovReport,
}

fn band_nodes(mu: &SampledWeight) -> Vec<f64> {
    let inside: Vec<f64> = mu.grid().nodes().iter().copied().filter(|x| x.abs() >= 1e-2 && x.abs() <= 1e2).collect();
    let stride = inside.len().div_ceil(128).max(1);
    inside.into_iter().step_by(stride).collect()
}

pub fn ae_membership(h: &AnalyticFn, mu: &SampledWeight) -> Result<AeReport> {
    ae_membership_with(h, mu, &Lattice::default(), &Tolerances::default())
}

/// `H ∈ AE(μ)`: nonvanishing on the lattice, boundary modulus within the
/// band `[1/C, C]·μ`, and of Smirnov type.
pub fn ae_membership_with(h: &AnalyticFn, mu: &SampledWeight, lattice: &Lattice, tol: &Tolerances) -> Result<AeReport> {
    let probe = a_infty_probe_with(mu, &IntervalFamily::coarse())?;
    if !probe.a_infty_established() {
        return Err(Error::Precondition(format!("A_∞ not established for {}", mu.label())));
    }
    let nonvanishing = lattice.points().par_iter().all(|z| h.log_abs(*z).map(|v| v.is_finite()).unwrap_or(false));
    let nodes = band_nodes(mu);
    let traces: Vec<Result<TraceValue>> = nodes.par_iter().map(|&x| nt_trace(h, x)).collect();
    let mut band = (f64::INFINITY, f64::NEG_INFINITY);
    let mut unconverged = 0;
    for (x, t) in nodes.iter().zip(traces) {
        let t = t?;
        if !t.converged {
            unconverged += 1;
        }
        let r = t.value.norm() / mu.eval(*x);
        band = (band.0.min(r), band.1.max(r));
    }
    let c = tol.trace_band;
    let band_ok = band.0 >= 1.0 / c && band.1 <= c;
    let smirnov = smirnov_defect_with(h, lattice, tol.smirnov)?;
    let member = nonvanishing && band_ok && smirnov.classification == Classification::Smirnov;
    Ok(AeReport { member, nonvanishing, band, band_limit: c, band_ok, trace_points: nodes.len(), unconverged_traces: unconverged, smirnov })
}

/// `h ∈ AE(ν, μ)` through the quotient weight `ν/μ`.
pub fn ae_pair_membership(h: &AnalyticFn, nu: &SampledWeight, mu: &SampledWeight) -> Result<AeReport> {
    ae_pair_membership_with(h, nu, mu, &Lattice::default(), &Tolerances::default())
}

pub fn ae_pair_membership_with(h: &AnalyticFn, nu: &SampledWeight, mu: &SampledWeight, lattice: &Lattice, tol: &Tolerances) -> Result<AeReport> {
    for w in [nu, mu] {
        if !a_infty_probe_with(w, &IntervalFamily::coarse())?.a_infty_established() {
            return Err(Error::Precondition(format!("A_∞ not established for {}", w.label())));
        }
    }
    let q = SampledWeight::power_product(nu, 1.0, mu, -1.0)?.with_label(format!("{}/{}", nu.label(), mu.label()));
    ae_membership_with(h, &q, lattice, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RealGrid;
    use std::sync::Arc;

    #[test]
    fn default_lattice_shape() {
        let l = Lattice::default();
        assert_eq!(l.len(), 129 * 24);
    }

    #[test]
    fn exp_iz_defect_is_minus_y() {
        let f = AnalyticFn::exp_iz();
        let rep = smirnov_defect(&f, &Lattice::coarse()).unwrap();
        for ((_, y), d) in rep.points.iter().zip(&rep.defect) {
            assert!((d + y).abs() < 1e-6);
        }
        assert_eq!(rep.classification, Classification::NotSmirnov);
    }

    #[test]
    fn square_root_is_smirnov() {
        let f = AnalyticFn::power(0.5).unwrap();
        let rep = smirnov_defect(&f, &Lattice::coarse()).unwrap();
        assert!(rep.max_abs_defect() < 1e-7, "{}", rep.max_abs_defect());
        assert_eq!(rep.classification, Classification::Smirnov);
    }

    #[test]
    fn traces() {
        let c = AnalyticFn::constant(Complex64::new(2.0, -1.0)).unwrap();
        let t = nt_trace(&c, 0.3).unwrap();
        assert!(t.converged && (t.value - Complex64::new(2.0, -1.0)).norm() < 1e-14);
        let f = AnalyticFn::affine_power(1.0, Complex64::i(), -1.0).unwrap();
        let t = nt_trace(&f, 0.0).unwrap();
        assert!(t.converged && (t.value + Complex64::i()).norm() < 1e-8, "{:?}", t);
        let s = AnalyticFn::power(0.5).unwrap();
        let t = nt_trace(&s, 1.0).unwrap();
        assert!(t.converged && (t.value - 1.0).norm() < 1e-8);
    }

    #[test]
    fn ae_checks() {
        let g = Arc::new(RealGrid::default());
        let lat = Lattice::coarse();
        let tol = Tolerances::default();
        let one = SampledWeight::constant(g.clone(), 1.0).unwrap();
        let rep = ae_membership_with(&AnalyticFn::exp_iz(), &one, &lat, &tol).unwrap();
        assert!(rep.band_ok && !rep.member);
        let sq = SampledWeight::power(g, 0.5).unwrap();
        let rep = ae_membership_with(&AnalyticFn::power(0.5).unwrap(), &sq, &lat, &tol).unwrap();
        assert!(rep.member, "{rep:?}");
    }
}
