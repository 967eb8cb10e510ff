use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::grid::RealGrid;
use super::line::Singularity;
use crate::{Error, Result};

/// How a [`BoundaryFn`] is evaluated between grid nodes inside the core.
#[derive(Clone)]
pub enum Profile {
    /// Closed-form evaluator.
    Exact(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
    /// Piecewise-linear interpolation of the grid samples.
    Interpolated,
}

/// Model `f(x) ≈ coeff·|x|^exponent + log_slope·ln|x|` beyond the core radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FnTail {
    pub coeff: f64,
    pub exponent: f64,
    pub log_slope: f64,
}

impl FnTail {
    pub const ZERO: FnTail = FnTail { coeff: 0.0, exponent: 0.0, log_slope: 0.0 };

    pub fn constant(c: f64) -> Self {
        Self { coeff: c, exponent: 0.0, log_slope: 0.0 }
    }

    pub fn power(coeff: f64, exponent: f64) -> Self {
        Self { coeff, exponent, log_slope: 0.0 }
    }

    /// `offset + slope·ln|x|`, the logarithm of a power law.
    pub fn log_power(offset: f64, slope: f64) -> Self {
        Self { coeff: offset, exponent: 0.0, log_slope: slope }
    }

    pub fn eval(&self, r: f64) -> f64 {
        let mut v = 0.0;
        if self.coeff != 0.0 {
            v += self.coeff * r.powf(self.exponent);
        }
        if self.log_slope != 0.0 {
            v += self.log_slope * r.ln();
        }
        v
    }

    /// Whether `∫ |f(t)|/(1+t²) dt` converges on this side.
    pub fn poisson_integrable(&self) -> bool {
        self.exponent.is_finite() && (self.coeff == 0.0 || self.exponent < 1.0)
    }
}

/// A real function on ℝ sampled on a [`RealGrid`] with tail models.
#[derive(Clone)]
pub struct BoundaryFn {
    grid: Arc<RealGrid>,
    values: Vec<f64>,
    tails: [FnTail; 2],
    profile: Profile,
    singulars: Vec<Singularity>,
    label: String,
}

impl fmt::Debug for BoundaryFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BoundaryFn")
            .field("label", &self.label)
            .field("tails", &self.tails)
            .field("singulars", &self.singulars)
            .field("interpolated", &self.is_interpolated())
            .finish()
    }
}

impl BoundaryFn {
    /// Closed-form function. `tails` are `[minus, plus]`.
    pub fn exact(
        grid: Arc<RealGrid>,
        label: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        tails: [FnTail; 2],
        singulars: Vec<Singularity>,
    ) -> Self {
        let values = grid.nodes().iter().map(|&t| f(t)).collect();
        Self { grid, values, tails, profile: Profile::Exact(Arc::new(f)), singulars, label: label.into() }
    }

    pub fn from_samples(grid: Arc<RealGrid>, label: impl Into<String>, values: Vec<f64>, tails: [FnTail; 2]) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::Argument("empty grid".into()));
        }
        if values.len() != grid.len() {
            return Err(Error::Argument(format!("{} samples for {} grid nodes", values.len(), grid.len())));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Argument(format!("non-finite sample {v}")));
        }
        Ok(Self { grid, values, tails, profile: Profile::Interpolated, singulars: Vec::new(), label: label.into() })
    }

    pub fn constant(grid: Arc<RealGrid>, c: f64) -> Self {
        Self::exact(grid, format!("const({c})"), move |_| c, [FnTail::constant(c); 2], Vec::new())
    }

    /// Indicator of `[a, b]` inside the core.
    pub fn indicator(grid: Arc<RealGrid>, a: f64, b: f64) -> Self {
        let jumps = vec![Singularity { at: a, exponent: 0.0 }, Singularity { at: b, exponent: 0.0 }];
        Self::exact(grid, format!("1[{a},{b}]"), move |t| if t >= a && t <= b { 1.0 } else { 0.0 }, [FnTail::ZERO; 2], jumps)
    }

    pub fn grid(&self) -> &Arc<RealGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tails(&self) -> [FnTail; 2] {
        self.tails
    }

    pub fn singulars(&self) -> &[Singularity] {
        &self.singulars
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn is_interpolated(&self) -> bool {
        matches!(self.profile, Profile::Interpolated)
    }

    pub fn core_radius(&self) -> f64 {
        self.grid.core_radius()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn eval(&self, t: f64) -> f64 {
        let r = self.grid.core_radius();
        if t > r {
            return self.tails[1].eval(t);
        }
        if t < -r {
            return self.tails[0].eval(-t);
        }
        match &self.profile {
            Profile::Exact(f) => f(t),
            Profile::Interpolated => self.linear(t),
        }
    }

    fn linear(&self, t: f64) -> f64 {
        let nodes = self.grid.nodes();
        let i = self.grid.cell(t);
        let (x0, x1) = (nodes[i], nodes[i + 1]);
        let s = ((t - x0) / (x1 - x0)).clamp(0.0, 1.0);
        self.values[i] + s * (self.values[i + 1] - self.values[i])
    }

    /// Linear minus local quadratic interpolant; an interpolation error proxy.
    /// Zero for exact profiles and in the tails.
    pub fn interp_defect(&self, t: f64) -> f64 {
        if !self.is_interpolated() || t.abs() > self.grid.core_radius() {
            return 0.0;
        }
        let nodes = self.grid.nodes();
        let n = nodes.len();
        if n < 3 {
            return 0.0;
        }
        let i = self.grid.cell(t);
        let j = if i + 2 < n { i } else { n - 3 };
        let (x0, x1, x2) = (nodes[j], nodes[j + 1], nodes[j + 2]);
        let (v0, v1, v2) = (self.values[j], self.values[j + 1], self.values[j + 2]);
        let quad = v0 * (t - x1) * (t - x2) / ((x0 - x1) * (x0 - x2))
            + v1 * (t - x0) * (t - x2) / ((x1 - x0) * (x1 - x2))
            + v2 * (t - x0) * (t - x1) / ((x2 - x0) * (x2 - x1));
        self.linear(t) - quad
    }

    pub fn check_poisson_integrable(&self) -> Result<()> {
        for (side, tail) in ["minus", "plus"].iter().zip(self.tails.iter()) {
            if !tail.poisson_integrable() {
                return Err(Error::NonIntegrable(format!(
                    "{}: {side} tail exponent {} >= 1",
                    self.label, tail.exponent
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Arc<RealGrid> {
        Arc::new(RealGrid::log_linear(256, 100.0, 1e-3).unwrap())
    }

    #[test]
    fn tails_take_over_beyond_core() {
        let f = BoundaryFn::exact(grid(), "abs", |t: f64| t.abs(), [FnTail::power(2.0, 1.0), FnTail::power(1.0, 1.0)], vec![]);
        assert_eq!(f.eval(50.0), 50.0);
        assert_eq!(f.eval(200.0), 200.0);
        assert_eq!(f.eval(-200.0), 400.0);
    }

    #[test]
    fn interpolation_reproduces_nodes_and_lines() {
        let g = grid();
        let values: Vec<f64> = g.nodes().iter().map(|t| 3.0 * t + 1.0).collect();
        let f = BoundaryFn::from_samples(g.clone(), "line", values, [FnTail::ZERO; 2]).unwrap();
        for &t in &[-7.3, 0.0, 1e-4, 42.0] {
            assert!((f.eval(t) - (3.0 * t + 1.0)).abs() < 1e-10);
            assert!(f.interp_defect(t).abs() < 1e-9);
        }
    }

    #[test]
    fn sample_count_checked() {
        assert!(BoundaryFn::from_samples(grid(), "bad", vec![1.0; 3], [FnTail::ZERO; 2]).is_err());
    }

    #[test]
    fn integrability_from_exponents() {
        let f = BoundaryFn::exact(grid(), "x", |t: f64| t.abs(), [FnTail::power(1.0, 1.0); 2], vec![]);
        assert!(f.check_poisson_integrable().is_err());
        assert!(FnTail::log_power(0.0, 3.0).poisson_integrable());
    }
}
