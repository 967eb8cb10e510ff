use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::function::BoundaryFn;
use super::line::{integrate_line, Focus, LinePlan};
use super::quadrature::Adaptive;
use super::HalfPlanePoint;
use crate::{Error, Result};

/// `P_y(x) = (1/π)·y/(x²+y²)`.
pub fn poisson_kernel(x: f64, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::Domain(format!("Poisson kernel needs y > 0, got {y}")));
    }
    Ok(y / (PI * (x * x + y * y)))
}

/// Normalized conjugate kernel `(x-t)/((x-t)²+y²) + t/(1+t²)` without the
/// `1/π`, written so that the large-`t` cancellation never happens in floating
/// point: the numerator equals `t(y² - x s) - s` with `s = t - x`.
#[inline]
fn conjugate_kernel(x: f64, y: f64, t: f64) -> f64 {
    let s = t - x;
    let num = t * (y * y - x * s) - s;
    num / ((s * s + y * y) * (1.0 + t * t))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Convolution {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtensionValue {
    /// `(P_y + iQ_y) ∗ f` at the point.
    pub value: Complex64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalAverage {
    pub value: f64,
    pub error: f64,
    /// The window left the core and used the tail model.
    pub uses_tail: bool,
}

fn plan(f: &BoundaryFn, x: f64, y: f64, conjugate: bool) -> LinePlan {
    let r = f.core_radius();
    let mut plan = LinePlan::whole_line(r)
        .with_singulars(f.singulars().iter().copied())
        .with_foci([Focus { at: x, scale: y }])
        .with_breakpoints([-r, r]);
    if conjugate {
        plan = plan.with_foci([Focus { at: 0.0, scale: 1.0 }]);
    }
    if f.is_interpolated() {
        let w = 64.0 * y;
        let nodes = f.grid().nodes_between(x - w, x + w);
        let stride = (nodes.len() / 4000).max(1);
        plan = plan.with_breakpoints(nodes.iter().step_by(stride).copied());
    }
    plan
}

fn precheck(f: &BoundaryFn) -> Result<()> {
    if f.grid().is_empty() {
        return Err(Error::Argument("empty grid".into()));
    }
    f.check_poisson_integrable()
}

fn interpolation_error(f: &BoundaryFn, plan: &LinePlan, kernel: impl Fn(f64) -> f64) -> Result<f64> {
    if !f.is_interpolated() {
        return Ok(0.0);
    }
    let loose = Adaptive::new(1e-4, 1e-14);
    let est = integrate_line(&loose, plan, |t| Ok(kernel(t) * f.interp_defect(t)))?;
    Ok(est.value.abs() + est.error)
}

pub fn poisson_convolve(f: &BoundaryFn, z: HalfPlanePoint) -> Result<Convolution> {
    poisson_convolve_with(&Adaptive::default(), f, z)
}

/// `(P_y ∗ f)(x)` by adaptive quadrature, tails through the tail model.
pub fn poisson_convolve_with(quad: &Adaptive, f: &BoundaryFn, z: HalfPlanePoint) -> Result<Convolution> {
    precheck(f)?;
    let (x, y) = (z.x(), z.y());
    let plan = plan(f, x, y, false);
    let kernel = |t: f64| y / (PI * ((x - t) * (x - t) + y * y));
    let est = integrate_line(quad, &plan, |t| Ok(kernel(t) * f.eval(t)))?;
    let interp = interpolation_error(f, &plan, kernel)?;
    Ok(Convolution { value: est.value, error: est.error + interp })
}

pub fn conjugate_convolve(f: &BoundaryFn, z: HalfPlanePoint) -> Result<Convolution> {
    conjugate_convolve_with(&Adaptive::default(), f, z)
}

/// Normalized conjugate Poisson integral, vanishing at `z = i` for every `f`.
pub fn conjugate_convolve_with(quad: &Adaptive, f: &BoundaryFn, z: HalfPlanePoint) -> Result<Convolution> {
    precheck(f)?;
    let (x, y) = (z.x(), z.y());
    let plan = plan(f, x, y, true);
    let kernel = |t: f64| conjugate_kernel(x, y, t) / PI;
    let est = integrate_line(quad, &plan, |t| Ok(kernel(t) * f.eval(t)))?;
    let interp = interpolation_error(f, &plan, kernel)?;
    Ok(Convolution { value: est.value, error: est.error + interp })
}

pub fn harmonic_extension(f: &BoundaryFn, z: HalfPlanePoint) -> Result<ExtensionValue> {
    harmonic_extension_with(&Adaptive::default(), f, z)
}

/// `(P_y + iQ_y) ∗ f` with both kernels evaluated in one pass.
pub fn harmonic_extension_with(quad: &Adaptive, f: &BoundaryFn, z: HalfPlanePoint) -> Result<ExtensionValue> {
    precheck(f)?;
    let (x, y) = (z.x(), z.y());
    let plan = plan(f, x, y, true);
    let est = integrate_line(quad, &plan, |t| {
        let s = t - x;
        let p = y / (s * s + y * y);
        let q = conjugate_kernel(x, y, t);
        Ok(Complex64::new(p, q) * (f.eval(t) / PI))
    })?;
    let interp = interpolation_error(f, &plan, |t| {
        let s = t - x;
        (y / (s * s + y * y)).hypot(conjugate_kernel(x, y, t)) / PI
    })?;
    Ok(ExtensionValue { value: est.value, error: est.error + interp })
}

/// Mean of `f` over `[x - y, x + y]`.
pub fn local_average(f: &BoundaryFn, x: f64, y: f64) -> Result<LocalAverage> {
    if !(y > 0.0) {
        return Err(Error::Domain(format!("window half-width must be positive, got {y}")));
    }
    let r = f.core_radius();
    let (lo, hi) = (x - y, x + y);
    let mut plan = LinePlan::interval(lo, hi, r).with_singulars(f.singulars().iter().copied());
    plan = plan.with_breakpoints([-r, r]);
    if f.is_interpolated() {
        let nodes = f.grid().nodes_between(lo, hi);
        let stride = (nodes.len() / 4000).max(1);
        plan = plan.with_breakpoints(nodes.iter().step_by(stride).copied());
    }
    let est = integrate_line(&Adaptive::default(), &plan, |t| Ok(f.eval(t)))?;
    Ok(LocalAverage { value: est.value / (2.0 * y), error: est.error / (2.0 * y), uses_tail: lo < -r || hi > r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{FnTail, RealGrid, Singularity};
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn grid() -> Arc<RealGrid> {
        Arc::new(RealGrid::default())
    }

    fn log_abs(grid: Arc<RealGrid>) -> BoundaryFn {
        BoundaryFn::exact(
            grid,
            "log|t|",
            |t: f64| t.abs().ln(),
            [FnTail::log_power(0.0, 1.0); 2],
            vec![Singularity { at: 0.0, exponent: 0.0 }],
        )
    }

    #[test]
    fn kernel_values() {
        assert_relative_eq!(poisson_kernel(0.0, 1.0).unwrap(), 1.0 / PI);
        assert_relative_eq!(poisson_kernel(1.0, 1.0).unwrap(), 0.5 / PI);
        assert_relative_eq!(poisson_kernel(3.0, 4.0).unwrap(), 4.0 / (25.0 * PI));
        assert!(poisson_kernel(1.0, 0.0).is_err());
        assert!(poisson_kernel(1.0, -1.0).is_err());
    }

    #[test]
    fn conjugate_kernel_matches_naive_form() {
        for &(x, y, t) in &[(0.3, 0.7, -2.0), (5.0, 1e-2, 4.9), (-1.0, 3.0, 100.0)] {
            let naive = (x - t) / ((x - t) * (x - t) + y * y) + t / (1.0 + t * t);
            assert_relative_eq!(conjugate_kernel(x, y, t), naive, max_relative = 1e-12);
        }
    }

    #[test]
    fn constants_are_reproduced() {
        let f = BoundaryFn::constant(grid(), 2.5);
        for &(x, y) in &[(0.0, 1.0), (3.0, 1e-3), (-50.0, 20.0)] {
            let z = HalfPlanePoint::new(x, y).unwrap();
            assert_relative_eq!(poisson_convolve(&f, z).unwrap().value, 2.5, max_relative = 1e-9);
            assert!(conjugate_convolve(&f, z).unwrap().value.abs() < 1e-9);
        }
    }

    #[test]
    fn log_abs_extends_to_log_modulus_and_argument() {
        let f = log_abs(grid());
        for &(x, y) in &[(0.5, 0.5), (-3.0, 1e-3), (20.0, 7.0), (1e-2, 1e-3)] {
            let z = HalfPlanePoint::new(x, y).unwrap();
            let ext = harmonic_extension(&f, z).unwrap().value;
            let w = Complex64::new(x, y);
            assert!((ext.re - w.norm().ln()).abs() < 1e-8, "{x} {y}: {}", ext.re);
            assert!((ext.im - (w.arg() - PI / 2.0)).abs() < 1e-8, "{x} {y}: {}", ext.im);
        }
    }

    #[test]
    fn indicator_closed_form() {
        let f = BoundaryFn::indicator(grid(), -1.0, 2.0);
        for &(x, y) in &[(0.0, 1.0), (2.0, 1e-2), (5.0, 0.3)] {
            let z = HalfPlanePoint::new(x, y).unwrap();
            let exact = (((2.0 - x) / y).atan() - ((-1.0 - x) / y).atan()) / PI;
            assert_relative_eq!(poisson_convolve(&f, z).unwrap().value, exact, max_relative = 1e-9);
        }
        let sym = BoundaryFn::indicator(grid(), -1.0, 1.0);
        let q = conjugate_convolve(&sym, HalfPlanePoint::new(0.0, 1.0).unwrap()).unwrap();
        assert!(q.value.abs() < 1e-12);
    }

    #[test]
    fn non_integrable_tail_rejected() {
        let f = BoundaryFn::exact(grid(), "t", |t: f64| t.abs(), [FnTail::power(1.0, 1.0); 2], vec![]);
        let z = HalfPlanePoint::new(0.0, 1.0).unwrap();
        assert!(matches!(poisson_convolve(&f, z), Err(Error::NonIntegrable(_))));
    }

    #[test]
    fn local_averages() {
        let g = grid();
        let c = BoundaryFn::constant(g.clone(), 4.0);
        assert_relative_eq!(local_average(&c, 3.0, 0.5).unwrap().value, 4.0, max_relative = 1e-12);
        let abs = BoundaryFn::exact(g.clone(), "|t|", |t: f64| t.abs(), [FnTail::power(1.0, 1.0); 2], vec![Singularity { at: 0.0, exponent: 1.0 }]);
        assert_relative_eq!(local_average(&abs, 0.0, 1.0).unwrap().value, 0.5, max_relative = 1e-10);
        let inv_sqrt = BoundaryFn::exact(g, "|t|^-1/2", |t: f64| t.abs().powf(-0.5), [FnTail::power(1.0, -0.5); 2], vec![Singularity { at: 0.0, exponent: -0.5 }]);
        let avg = local_average(&inv_sqrt, 0.0, 1.0).unwrap();
        assert_relative_eq!(avg.value, 2.0, max_relative = 1e-8);
        assert!(!avg.uses_tail);
        assert!(local_average(&c, 0.0, 2e4).unwrap().uses_tail);
    }
}
