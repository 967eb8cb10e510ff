use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::family::IntervalFamily;
use super::SampledWeight;
use crate::numerics::quadrature::Adaptive;
use crate::numerics::{integrate_line, BoundaryFn, LinePlan, Singularity};
use crate::{Error, Result};

/// Exponents tried, in order, when probing `A_∞ = ∪ A_p`.
pub const A_INFTY_SCAN: [f64; 6] = [1.25, 1.5, 2.0, 4.0, 8.0, 16.0];

/// Constants with `ln C` above this are reported as infinite.
const LOG_OVERFLOW: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo && t <= self.hi
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConstantEstimate {
    Finite { value: f64 },
    Infinite { reason: String },
}

impl ConstantEstimate {
    pub fn value(&self) -> f64 {
        match self {
            Self::Finite { value } => *value,
            Self::Infinite { .. } => f64::INFINITY,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Self::Finite { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApReport {
    pub label: String,
    pub p: f64,
    pub constant: ConstantEstimate,
    pub witness_interval: Interval,
    pub intervals_scanned: usize,
    /// Smallest scanned exponent with a finite constant (set by the probe).
    pub r_star: Option<f64>,
}

impl ApReport {
    pub fn a_infty_established(&self) -> bool {
        self.r_star.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BmoReport {
    pub label: String,
    pub norm_estimate: f64,
    pub witness_interval: Interval,
    pub intervals_scanned: usize,
}

fn quad() -> Adaptive {
    Adaptive::new(1e-9, 1e-300)
}

/// `ln(1 - e^x)` for `x < 0`.
fn ln_1m_exp(x: f64) -> f64 {
    if x > -std::f64::consts::LN_2 {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}

/// `ln ∫_a^b t^e dt` for `0 < a < b`.
fn ln_int_pow(a: f64, b: f64, e: f64) -> f64 {
    let k = e + 1.0;
    let (la, lb) = (a.ln(), b.ln());
    if k.abs() < 1e-12 {
        (lb - la).ln()
    } else if k > 0.0 {
        k * lb + ln_1m_exp(k * (la - lb)) - k.ln()
    } else {
        k * la + ln_1m_exp(k * (lb - la)) - (-k).ln()
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `ln ∫_lo^hi w^s`. Divergence at a declared singularity is an error.
pub(crate) fn log_integral_power(w: &SampledWeight, s: f64, iv: Interval) -> Result<f64> {
    let r = w.core_radius();
    let mut total = f64::NEG_INFINITY;
    let (a, b) = (iv.lo.max(-r), iv.hi.min(r));
    if b > a {
        total = log_add(total, log_core_integral(w, s, a, b)?);
    }
    if iv.hi > r {
        let t = w.tail().plus;
        let lo = iv.lo.max(r);
        total = log_add(total, s * t.log_coeff + ln_int_pow(lo, iv.hi, s * t.exponent));
    }
    if iv.lo < -r {
        let t = w.tail().minus;
        let hi = (-iv.hi).max(r);
        total = log_add(total, s * t.log_coeff + ln_int_pow(hi, -iv.lo, s * t.exponent));
    }
    if total.is_nan() || total == f64::INFINITY {
        return Err(Error::NonFinite { at: iv.lo });
    }
    Ok(total)
}

fn log_core_integral(w: &SampledWeight, s: f64, a: f64, b: f64) -> Result<f64> {
    if !w.is_exact() {
        return Ok(log_cells_integral(w, s, a, b));
    }
    let singulars: Vec<Singularity> = w
        .singulars()
        .iter()
        .filter(|g| g.at >= a && g.at <= b)
        .map(|g| Singularity { at: g.at, exponent: s * g.exponent })
        .collect();
    let mut shift = f64::NEG_INFINITY;
    for k in 0..=8 {
        let t = a + (b - a) * k as f64 / 8.0;
        if singulars.iter().any(|g| (g.at - t).abs() <= 1e-9 * (b - a)) {
            continue;
        }
        let g = s * w.log_core(t);
        if g.is_finite() {
            shift = shift.max(g);
        }
    }
    if !shift.is_finite() {
        shift = 0.0;
    }
    let plan = LinePlan::interval(a, b, w.core_radius()).with_singulars(singulars);
    let est = integrate_line(&quad(), &plan, |t| Ok((s * w.log_core(t) - shift).exp()))?;
    if !(est.value > 0.0) || !est.value.is_finite() {
        return Err(Error::NonFinite { at: 0.5 * (a + b) });
    }
    Ok(shift + est.value.ln())
}

/// Exact integral of the log-linear interpolant, cell by cell.
fn log_cells_integral(w: &SampledWeight, s: f64, a: f64, b: f64) -> f64 {
    let nodes = w.grid().nodes();
    let mut total = f64::NEG_INFINITY;
    let mut i = w.grid().cell(a);
    let mut u = a;
    while u < b && i + 1 < nodes.len() {
        let v = nodes[i + 1].min(b);
        if v > u {
            let (gu, gv) = (s * w.log_core(u), s * w.log_core(v));
            let m = gu.max(gv);
            let d = (gu - gv).abs();
            let shape = if d < 1e-12 { 0.0 } else { (-(-d).exp_m1() / d).ln() };
            total = log_add(total, (v - u).ln() + m + shape);
        }
        u = v;
        i += 1;
    }
    total
}

enum Scan {
    Value(f64),
    Diverges(String),
}

fn anchors(singulars: &[Singularity]) -> Vec<f64> {
    singulars.iter().map(|s| s.at).collect()
}

pub fn ap_constant(w: &SampledWeight, p: f64) -> Result<ApReport> {
    ap_constant_with(w, p, &IntervalFamily::default())
}

/// `sup_I (avg_I w)(avg_I w^{-1/(p-1)})^{p-1}` over the interval family.
pub fn ap_constant_with(w: &SampledWeight, p: f64, family: &IntervalFamily) -> Result<ApReport> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::Argument(format!("A_p needs 1 < p < ∞, got {p}")));
    }
    let intervals = family.intervals(w.core_radius(), &anchors(w.singulars()));
    let s = -1.0 / (p - 1.0);
    let scans: Vec<Scan> = intervals
        .par_iter()
        .map(|iv| {
            let ln_len = iv.len().ln();
            let one = log_integral_power(w, 1.0, *iv);
            let dual = log_integral_power(w, s, *iv);
            match (one, dual) {
                (Ok(l1), Ok(l2)) => Scan::Value(l1 - ln_len + (p - 1.0) * (l2 - ln_len)),
                (Err(e), _) => Scan::Diverges(format!("w is not integrable: {e}")),
                (_, Err(e)) => Scan::Diverges(format!("w^(-1/(p-1)) is not integrable: {e}")),
            }
        })
        .collect();
    let mut best = (f64::NEG_INFINITY, 0usize);
    for (k, scan) in scans.iter().enumerate() {
        match scan {
            Scan::Diverges(reason) => {
                return Ok(ApReport {
                    label: w.label().to_string(),
                    p,
                    constant: ConstantEstimate::Infinite { reason: reason.clone() },
                    witness_interval: intervals[k],
                    intervals_scanned: intervals.len(),
                    r_star: None,
                })
            }
            Scan::Value(v) if *v > best.0 => best = (*v, k),
            Scan::Value(_) => {}
        }
    }
    let constant = if best.0 > LOG_OVERFLOW {
        ConstantEstimate::Infinite { reason: format!("ln C = {:.1} exceeds the overflow bound", best.0) }
    } else {
        ConstantEstimate::Finite { value: best.0.exp() }
    };
    Ok(ApReport {
        label: w.label().to_string(),
        p,
        constant,
        witness_interval: intervals[best.1],
        intervals_scanned: intervals.len(),
        r_star: None,
    })
}

/// Scans [`A_INFTY_SCAN`] and returns the first finite report with `r_star`
/// set, or the last report with `r_star = None`.
pub fn a_infty_probe(w: &SampledWeight) -> Result<ApReport> {
    a_infty_probe_with(w, &IntervalFamily::default())
}

pub fn a_infty_probe_with(w: &SampledWeight, family: &IntervalFamily) -> Result<ApReport> {
    let mut last = None;
    for &p in &A_INFTY_SCAN {
        let mut rep = ap_constant_with(w, p, family)?;
        if rep.constant.is_finite() {
            rep.r_star = Some(p);
            return Ok(rep);
        }
        last = Some(rep);
    }
    Ok(last.expect("scan is non-empty"))
}

pub fn bmo_norm(logw: &BoundaryFn) -> Result<BmoReport> {
    bmo_norm_with(logw, &IntervalFamily::default())
}

/// `sup_I avg_I |f - avg_I f|` over the interval family.
pub fn bmo_norm_with(f: &BoundaryFn, family: &IntervalFamily) -> Result<BmoReport> {
    let r = f.core_radius();
    let intervals = family.intervals(r, &anchors(f.singulars()));
    let osc: Vec<Result<f64>> = intervals.par_iter().map(|iv| mean_oscillation(f, *iv)).collect();
    let mut best = (0.0, 0usize);
    for (k, o) in osc.into_iter().enumerate() {
        let o = o?;
        if o > best.0 {
            best = (o, k);
        }
    }
    Ok(BmoReport {
        label: f.label().to_string(),
        norm_estimate: best.0,
        witness_interval: intervals[best.1],
        intervals_scanned: intervals.len(),
    })
}

/// `avg_I |f - avg_I f|`.
pub fn mean_oscillation(f: &BoundaryFn, iv: Interval) -> Result<f64> {
    let r = f.core_radius();
    let q = Adaptive::new(1e-8, 1e-13);
    let mut plan = LinePlan::interval(iv.lo, iv.hi, r)
        .with_singulars(f.singulars().iter().copied())
        .with_breakpoints([-r, r]);
    if f.is_interpolated() {
        plan = plan.with_breakpoints(f.grid().nodes_between(iv.lo, iv.hi).iter().copied());
    }
    let mean = integrate_line(&q, &plan, |t| Ok(f.eval(t)))?.value / iv.len();
    let dev = integrate_line(&q, &plan, |t| Ok((f.eval(t) - mean).abs()))?.value;
    Ok(dev / iv.len())
}
