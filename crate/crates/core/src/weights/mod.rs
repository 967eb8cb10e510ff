//! Boundary weights and their Muckenhoupt and BMO diagnostics.
//!
//! A [`SampledWeight`] keeps its logarithm: either a closed-form log-density
//! or log-linear interpolation of grid samples, plus declared power
//! singularities and a power-law [`TailModel`] beyond the core radius. All
//! averages are formed in the log domain, so weights such as `e^{|x|}` or
//! `|x|^{-0.9}` never overflow.

mod ap;
mod definition;
mod family;
mod lemmas;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::numerics::{BoundaryFn, FnTail, RealGrid, Singularity};
use crate::{Error, Result};

pub use ap::{a_infty_probe, ap_constant, ap_constant_with, bmo_norm, bmo_norm_with, a_infty_probe_with, mean_oscillation, ApReport, BmoReport, ConstantEstimate, Interval, A_INFTY_SCAN};
pub use definition::{WeightDefinition, WeightKind};
pub use family::IntervalFamily;
pub use lemmas::{lemma_integrability_check, poisson_average_ratio, RatioReport};

/// Stored samples are clipped to this range; exact profiles are not.
pub const CLIP: (f64, f64) = (1e-12, 1e12);

/// `w(x) ≈ e^{log_coeff}·|x|^exponent` on one side beyond the core radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailSide {
    pub exponent: f64,
    pub log_coeff: f64,
}

impl TailSide {
    pub fn new(exponent: f64, coeff: f64) -> Result<Self> {
        if !(coeff > 0.0) || !coeff.is_finite() || !exponent.is_finite() {
            return Err(Error::Argument(format!("tail needs finite exponent and positive coefficient, got ({exponent}, {coeff})")));
        }
        Ok(Self { exponent, log_coeff: coeff.ln() })
    }

    /// Tail with the given exponent matching `log_w` at radius `r`.
    pub fn matching(exponent: f64, log_w_at_r: f64, r: f64) -> Self {
        Self { exponent, log_coeff: log_w_at_r - exponent * r.ln() }
    }

    pub fn coeff(&self) -> f64 {
        self.log_coeff.exp()
    }

    pub fn log_eval(&self, r: f64) -> f64 {
        self.log_coeff + self.exponent * r.ln()
    }

    fn scaled(&self, a: f64) -> Self {
        Self { exponent: a * self.exponent, log_coeff: a * self.log_coeff }
    }

    fn plus(&self, o: &Self) -> Self {
        Self { exponent: self.exponent + o.exponent, log_coeff: self.log_coeff + o.log_coeff }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailModel {
    pub minus: TailSide,
    pub plus: TailSide,
}

impl TailModel {
    pub fn symmetric(side: TailSide) -> Self {
        Self { minus: side, plus: side }
    }

    pub fn flat() -> Self {
        Self::symmetric(TailSide { exponent: 0.0, log_coeff: 0.0 })
    }

    fn map(&self, f: impl Fn(&TailSide) -> TailSide) -> Self {
        Self { minus: f(&self.minus), plus: f(&self.plus) }
    }
}

type LogProfile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A positive density against `dx` on the real line.
#[derive(Clone)]
pub struct SampledWeight {
    grid: Arc<RealGrid>,
    log_values: Vec<f64>,
    values: Vec<f64>,
    tail: TailModel,
    log_profile: Option<LogProfile>,
    singulars: Vec<Singularity>,
    label: String,
}

impl fmt::Debug for SampledWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SampledWeight")
            .field("label", &self.label)
            .field("tail", &self.tail)
            .field("singulars", &self.singulars)
            .field("exact", &self.log_profile.is_some())
            .finish()
    }
}

impl SampledWeight {
    /// Closed-form weight given by its logarithm. `singulars` lists points
    /// where `w ≈ C|x - at|^exponent`.
    pub fn from_log_fn(
        grid: Arc<RealGrid>,
        label: impl Into<String>,
        log_w: impl Fn(f64) -> f64 + Send + Sync + 'static,
        singulars: Vec<Singularity>,
        tail: TailModel,
    ) -> Result<Self> {
        let log_values: Vec<f64> = grid.nodes().iter().map(|&t| log_w(t)).collect();
        if let Some(v) = log_values.iter().find(|v| v.is_nan()) {
            return Err(Error::Argument(format!("log-density is {v} at a grid node")));
        }
        let w = Self::assemble(grid, log_values, tail, Some(Arc::new(log_w)), singulars, label.into());
        w.check_tail_consistency()?;
        Ok(w)
    }

    /// Samples on the grid nodes; log-linear interpolation inside the core.
    /// Without an explicit tail the exponent is fitted on the outer decade.
    pub fn from_samples(grid: Arc<RealGrid>, label: impl Into<String>, values: &[f64], tail: Option<TailModel>) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::Argument("empty grid".into()));
        }
        if values.len() != grid.len() {
            return Err(Error::Argument(format!("{} samples for {} grid nodes", values.len(), grid.len())));
        }
        if let Some(v) = values.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
            return Err(Error::Argument(format!("weight samples must be positive and finite, got {v}")));
        }
        let log_values: Vec<f64> = values.iter().map(|v| v.ln()).collect();
        let tail = match tail {
            Some(t) => t,
            None => fit_tail(grid.nodes(), &log_values),
        };
        let w = Self::assemble(grid, log_values, tail, None, Vec::new(), label.into());
        w.check_tail_consistency()?;
        Ok(w)
    }

    fn assemble(
        grid: Arc<RealGrid>,
        log_values: Vec<f64>,
        tail: TailModel,
        log_profile: Option<LogProfile>,
        singulars: Vec<Singularity>,
        label: String,
    ) -> Self {
        let log_values: Vec<f64> = log_values.into_iter().map(|v| v.clamp(-700.0, 700.0)).collect();
        let values = log_values.iter().map(|v| v.exp().clamp(CLIP.0, CLIP.1)).collect();
        Self { grid, log_values, values, tail, log_profile, singulars, label }
    }

    pub fn constant(grid: Arc<RealGrid>, c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::Argument(format!("constant weight must be positive, got {c}")));
        }
        let lc = c.ln();
        Self::from_log_fn(grid, format!("{c}"), move |_| lc, Vec::new(), TailModel::symmetric(TailSide { exponent: 0.0, log_coeff: lc }))
    }

    /// `|x|^a`.
    pub fn power(grid: Arc<RealGrid>, a: f64) -> Result<Self> {
        Self::shifted_powers(grid, &[(0.0, a)])
    }

    /// `∏ |x - c_k|^{a_k}`.
    pub fn shifted_powers(grid: Arc<RealGrid>, factors: &[(f64, f64)]) -> Result<Self> {
        if factors.iter().any(|(c, a)| !c.is_finite() || !a.is_finite()) {
            return Err(Error::Argument("power factors must be finite".into()));
        }
        let r = grid.core_radius();
        let fs: Vec<(f64, f64)> = factors.to_vec();
        let label = fs
            .iter()
            .map(|(c, a)| if *c == 0.0 { format!("|x|^{a}") } else { format!("|x-{c}|^{a}") })
            .collect::<Vec<_>>()
            .join("*");
        let log_w = move |t: f64| fs.iter().map(|(c, a)| if *a == 0.0 { 0.0 } else { a * (t - c).abs().ln() }).sum::<f64>();
        let total: f64 = factors.iter().map(|f| f.1).sum();
        let tail = TailModel { minus: TailSide::matching(total, log_w(-r), r), plus: TailSide::matching(total, log_w(r), r) };
        let singulars = factors.iter().filter(|f| f.1 != 0.0).map(|&(at, exponent)| Singularity { at, exponent }).collect();
        Self::from_log_fn(grid, label, log_w, singulars, tail)
    }

    /// `(1 + x²)^{a/2}`: smooth, `|x|^a` at infinity.
    pub fn one_plus_square(grid: Arc<RealGrid>, a: f64) -> Result<Self> {
        let r = grid.core_radius();
        let log_w = move |t: f64| 0.5 * a * (t * t).ln_1p();
        let tail = TailModel::symmetric(TailSide::matching(a, log_w(r), r));
        Self::from_log_fn(grid, format!("(1+x^2)^({a}/2)"), log_w, Vec::new(), tail)
    }

    /// `e^{κ|x|}`. The tail keeps the local power exponent `κR` at the core
    /// radius, which is as far as a power law can follow it.
    pub fn exp_abs(grid: Arc<RealGrid>, kappa: f64) -> Result<Self> {
        let r = grid.core_radius();
        let log_w = move |t: f64| kappa * t.abs();
        let tail = TailModel::symmetric(TailSide::matching(kappa * r, kappa * r, r));
        Self::from_log_fn(grid, format!("exp({kappa}|x|)"), log_w, vec![Singularity { at: 0.0, exponent: 0.0 }], tail)
    }

    /// `2 + sin x`, bounded above and below.
    pub fn two_plus_sin(grid: Arc<RealGrid>) -> Result<Self> {
        let tail = TailModel::symmetric(TailSide { exponent: 0.0, log_coeff: 2f64.ln() });
        Self::from_log_fn(grid, "2+sin(x)", |t: f64| (2.0 + t.sin()).ln(), Vec::new(), tail)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn grid(&self) -> &Arc<RealGrid> {
        &self.grid
    }

    /// Clipped samples at the grid nodes.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn log_values(&self) -> &[f64] {
        &self.log_values
    }

    pub fn tail(&self) -> TailModel {
        self.tail
    }

    pub fn singulars(&self) -> &[Singularity] {
        &self.singulars
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_exact(&self) -> bool {
        self.log_profile.is_some()
    }

    pub fn core_radius(&self) -> f64 {
        self.grid.core_radius()
    }

    /// `ln w(t)`, using the tail model beyond the core radius.
    pub fn log_eval(&self, t: f64) -> f64 {
        let r = self.grid.core_radius();
        if t > r {
            return self.tail.plus.log_eval(t);
        }
        if t < -r {
            return self.tail.minus.log_eval(-t);
        }
        self.log_core(t)
    }

    fn log_core(&self, t: f64) -> f64 {
        match &self.log_profile {
            Some(f) => f(t),
            None => {
                let nodes = self.grid.nodes();
                let i = self.grid.cell(t);
                let s = ((t - nodes[i]) / (nodes[i + 1] - nodes[i])).clamp(0.0, 1.0);
                self.log_values[i] + s * (self.log_values[i + 1] - self.log_values[i])
            }
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.log_eval(t).exp()
    }

    /// The density as a [`BoundaryFn`] for the Poisson engine.
    pub fn density_fn(&self) -> BoundaryFn {
        let w = self.clone();
        let tails = [FnTail::power(self.tail.minus.coeff(), self.tail.minus.exponent), FnTail::power(self.tail.plus.coeff(), self.tail.plus.exponent)];
        BoundaryFn::exact(self.grid.clone(), self.label.clone(), move |t| w.log_core(t).exp(), tails, self.singulars.clone())
    }

    /// `ln w` as a [`BoundaryFn`]; power singularities become integrable
    /// logarithmic ones.
    pub fn log_fn(&self) -> BoundaryFn {
        let tails = [
            FnTail::log_power(self.tail.minus.log_coeff, self.tail.minus.exponent),
            FnTail::log_power(self.tail.plus.log_coeff, self.tail.plus.exponent),
        ];
        let label = format!("log({})", self.label);
        let marks = self.singulars.iter().map(|s| Singularity { at: s.at, exponent: 0.0 }).collect();
        match &self.log_profile {
            Some(f) => {
                let f = f.clone();
                BoundaryFn::exact(self.grid.clone(), label, move |t| f(t), tails, marks)
            }
            None => BoundaryFn::from_samples(self.grid.clone(), label, self.log_values.clone(), tails).expect("grid-aligned samples"),
        }
    }

    /// `|ln w(±R) - tail(±R)| ≤ ln 2` on both sides.
    pub fn check_tail_consistency(&self) -> Result<()> {
        let r = self.grid.core_radius();
        for (t, side) in [(-r, &self.tail.minus), (r, &self.tail.plus)] {
            let inner = self.log_core(t);
            let outer = side.log_eval(r);
            if !outer.is_finite() || (inner - outer).abs() > std::f64::consts::LN_2 + 1e-9 {
                return Err(Error::Inconsistent(format!(
                    "{}: tail model at x = {t} is off by factor e^{:.3}",
                    self.label,
                    (inner - outer).abs()
                )));
            }
        }
        Ok(())
    }

    /// Pointwise `w1^{a1}·w2^{a2}` on a shared grid.
    pub fn power_product(w1: &SampledWeight, a1: f64, w2: &SampledWeight, a2: f64) -> Result<SampledWeight> {
        if !Arc::ptr_eq(&w1.grid, &w2.grid) && w1.grid.nodes() != w2.grid.nodes() {
            return Err(Error::Argument("power_product needs a shared grid".into()));
        }
        let log_values = w1.log_values.iter().zip(&w2.log_values).map(|(l1, l2)| a1 * l1 + a2 * l2).collect();
        let tail = w1.tail.map(|s| s.scaled(a1));
        let tail2 = w2.tail.map(|s| s.scaled(a2));
        let tail = TailModel { minus: tail.minus.plus(&tail2.minus), plus: tail.plus.plus(&tail2.plus) };
        let mut singulars: Vec<Singularity> = Vec::new();
        for (w, a) in [(w1, a1), (w2, a2)] {
            if a == 0.0 {
                continue;
            }
            for s in &w.singulars {
                match singulars.iter_mut().find(|t| t.at == s.at) {
                    Some(t) => t.exponent += a * s.exponent,
                    None => singulars.push(Singularity { at: s.at, exponent: a * s.exponent }),
                }
            }
        }
        let profile: Option<LogProfile> = match (&w1.log_profile, &w2.log_profile) {
            (Some(f1), Some(f2)) => {
                let (f1, f2) = (f1.clone(), f2.clone());
                Some(Arc::new(move |t| {
                    let mut v = 0.0;
                    if a1 != 0.0 {
                        v += a1 * f1(t);
                    }
                    if a2 != 0.0 {
                        v += a2 * f2(t);
                    }
                    v
                }))
            }
            _ => None,
        };
        let label = format!("({})^{a1}*({})^{a2}", w1.label, w2.label);
        Ok(Self::assemble(w1.grid.clone(), log_values, tail, profile, singulars, label))
    }

    /// `w^a`.
    pub fn powf(&self, a: f64) -> SampledWeight {
        Self::power_product(self, a, self, 0.0).expect("same grid").with_label(format!("({})^{a}", self.label))
    }
}

/// Log-log slope over the outer decade of each side.
fn fit_tail(nodes: &[f64], log_values: &[f64]) -> TailModel {
    let n = nodes.len();
    let r = nodes[n - 1];
    let side = |pick: &dyn Fn(usize) -> usize| {
        let outer = pick(0);
        let mut k = 1;
        while k < n / 2 && nodes[pick(k)].abs() > 0.1 * r {
            k += 1;
        }
        let inner = pick(k.min(n - 1));
        let (x0, x1) = (nodes[inner].abs(), nodes[outer].abs());
        let (l0, l1) = (log_values[inner], log_values[outer]);
        let exponent = if x1 > x0 { (l1 - l0) / (x1.ln() - x0.ln()) } else { 0.0 };
        TailSide::matching(exponent, l1, x1)
    };
    TailModel { minus: side(&|k| k), plus: side(&|k| n - 1 - k) }
}
