use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::norms::{hardy_norm_halfplane_with, HardyNormReport, NormOptions};
use crate::analytic::{AnalyticFn, Lattice};
use crate::numerics::quadrature::Adaptive;
use crate::numerics::poisson_convolve_with;
use crate::weights::{ap_constant, ApReport, SampledWeight};
use crate::{Error, Result, Tolerances};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HmwReport {
    pub majorant_a2: ApReport,
    /// `sup |W(z)| / (P_y ∗ majorant)(x)` over the lattice.
    pub majorization_constant: f64,
    pub majorization_witness: (f64, f64),
    /// `sup_y ∫ |F² W|(x+iy) dx`.
    pub norm: HardyNormReport,
}

pub fn hmw_product_test(f: &AnalyticFn, w: &AnalyticFn, majorant: &SampledWeight) -> Result<HmwReport> {
    hmw_product_test_with(f, w, majorant, &Lattice::coarse(), &Tolerances::default())
}

/// `F² W ∈ H¹` for `F = O(|z|^{-1})` bounded and `|W| ≤ C P_y ∗ V` with
/// `V ∈ A₂`. Both hypotheses are checked first: an infinite `A₂` constant or
/// `C` above the cap is a precondition error.
pub fn hmw_product_test_with(f: &AnalyticFn, w: &AnalyticFn, majorant: &SampledWeight, lattice: &Lattice, tol: &Tolerances) -> Result<HmwReport> {
    let a2 = ap_constant(majorant, 2.0)?;
    if !a2.constant.is_finite() {
        return Err(Error::Precondition(format!(
            "majorant {} is not in A₂ (witness [{}, {}])",
            majorant.label(),
            a2.witness_interval.lo,
            a2.witness_interval.hi
        )));
    }
    let density = majorant.density_fn();
    let quad = Adaptive::new(tol.quad_rel, tol.quad_abs);
    let ratios: Vec<Result<f64>> = lattice
        .points()
        .par_iter()
        .map(|z| {
            let p = poisson_convolve_with(&quad, &density, *z)?.value;
            Ok((w.log_abs(*z)? - p.ln()).exp())
        })
        .collect();
    let mut c = f64::NEG_INFINITY;
    let mut witness = (f64::NAN, f64::NAN);
    for (z, r) in lattice.points().iter().zip(ratios) {
        let r = r?;
        if !(r <= c) {
            c = r;
            witness = (z.x(), z.y());
        }
    }
    if !(c <= tol.majorization_cap) {
        return Err(Error::Precondition(format!(
            "|{}| not majorized by P ∗ {}: ratio {c:.3e} at ({}, {})",
            w.label(),
            majorant.label(),
            witness.0,
            witness.1
        )));
    }
    let one = SampledWeight::constant(majorant.grid().clone(), 1.0)?;
    let g = f.powf(2.0).mul(w).with_label(format!("({})²·{}", f.label(), w.label()));
    let norm = hardy_norm_halfplane_with(&g, 1.0, &one, &NormOptions::from_tolerances(tol))?;
    Ok(HmwReport { majorant_a2: a2, majorization_constant: c, majorization_witness: witness, norm })
}
