use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::SampledWeight;
use crate::numerics::quadrature::Adaptive;
use crate::numerics::{integrate_line, local_average, poisson_convolve, HalfPlanePoint, LinePlan};
use crate::{Error, Result};

/// `∫ w(x)/(1+|x|)^p dx`, finite for `w ∈ A_p`.
pub fn lemma_integrability_check(w: &SampledWeight, p: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::Argument(format!("p must exceed 1, got {p}")));
    }
    let tail = w.tail();
    for (side, t) in [("minus", tail.minus), ("plus", tail.plus)] {
        if t.exponent - p >= -1.0 {
            return Err(Error::Inconsistent(format!(
                "A_p/tail inconsistency: {} has {side} tail exponent {} so w/(1+|x|)^{p} is not integrable",
                w.label(),
                t.exponent
            )));
        }
    }
    let r = w.core_radius();
    let plan = LinePlan::whole_line(r).with_singulars(w.singulars().iter().copied()).with_breakpoints([-r, r]);
    let est = integrate_line(&Adaptive::new(1e-9, 1e-14), &plan, |t: f64| Ok((w.log_eval(t) - p * t.abs().ln_1p()).exp()))?;
    if !est.value.is_finite() {
        return Err(Error::NonFinite { at: 0.0 });
    }
    Ok(est.value)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub sup: f64,
    pub witness: (f64, f64),
    pub points: usize,
}

/// `sup (P_y ∗ W)(x) / ((1/y)∫_{|x-t|<y} W)` over the given points.
pub fn poisson_average_ratio(w: &SampledWeight, points: &[HalfPlanePoint]) -> Result<RatioReport> {
    if points.is_empty() {
        return Err(Error::Argument("no lattice points".into()));
    }
    let f = w.density_fn();
    let ratios: Vec<Result<f64>> = points
        .par_iter()
        .map(|z| {
            let p = poisson_convolve(&f, *z)?.value;
            let avg = local_average(&f, z.x(), z.y())?.value;
            Ok(p / (2.0 * avg))
        })
        .collect();
    let mut best = (f64::NEG_INFINITY, 0usize);
    for (k, r) in ratios.into_iter().enumerate() {
        let r = r?;
        if r > best.0 {
            best = (r, k);
        }
    }
    let z = points[best.1];
    Ok(RatioReport { sup: best.0, witness: (z.x(), z.y()), points: points.len() })
}
