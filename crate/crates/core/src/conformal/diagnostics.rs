use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ConformalMap;
use crate::analytic::{smirnov_defect_with, AnalyticFn, Classification, Lattice, SmirnovReport};
use crate::hardy::{hardy_norm_halfplane_with, HardyNormReport, NormOptions};
use crate::numerics::default_grid;
use crate::weights::{ap_constant, ApReport, SampledWeight};
use crate::{Error, Result, Tolerances};

/// `Φ'/(i+εz)²` and `(Φ')^{-1}/(i+εz)²` in `H¹(dx)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeightNorms {
    pub epsilon: f64,
    pub forward: HardyNormReport,
    pub inverse: HardyNormReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiPrimeDiagnostics {
    pub lipschitz: f64,
    /// `sup |arg Φ'|` over the lattice.
    pub arg_sup: f64,
    /// `arctan L + tolerance`.
    pub arg_bound: f64,
    pub arg_ok: bool,
    /// `A₂` constant of `|Φ'(x)|`.
    pub a2: ApReport,
    pub a2_ok: bool,
    pub h1: Vec<HeightNorms>,
    pub h1_ok: bool,
    pub smirnov: SmirnovReport,
    pub smirnov_ok: bool,
    pub passed: bool,
}

pub fn phi_prime_diagnostics(map: &ConformalMap) -> Result<PhiPrimeDiagnostics> {
    phi_prime_diagnostics_with(map, &Lattice::default(), &Tolerances::default())
}

/// `|arg Φ'| ≤ arctan L`, `|Φ'| ∈ A₂`, the two `H¹` conditions for
/// `ε ∈ {1, 0.1}` and the Smirnov property of `Φ'`. Closed-form maps get an
/// argument slack of `1e-9`, solved maps `tol.arg`.
pub fn phi_prime_diagnostics_with(map: &ConformalMap, lattice: &Lattice, tol: &Tolerances) -> Result<PhiPrimeDiagnostics> {
    let lipschitz = map.boundary().lipschitz();
    let slack = if map.is_closed_form() { 1e-9 } else { tol.arg };
    let arg_bound = lipschitz.atan() + slack;
    let pp = map.phi_prime_fn()?;
    let mut arg_sup: f64 = 0.0;
    for z in lattice.points() {
        arg_sup = arg_sup.max(pp.log_eval(*z)?.im.abs());
    }
    let modulus = boundary_modulus(&pp)?;
    let a2 = ap_constant(&modulus, 2.0)?;
    let one = SampledWeight::constant(default_grid(), 1.0)?;
    let opts = NormOptions::from_tolerances(tol);
    let mut h1 = Vec::new();
    for eps in [1.0, 0.1] {
        let d = AnalyticFn::affine_power(eps, Complex64::i(), -2.0)?;
        let forward = hardy_norm_halfplane_with(&pp.mul(&d).with_label(format!("Phi'/(i+{eps}z)^2")), 1.0, &one, &opts)?;
        let inverse = hardy_norm_halfplane_with(&pp.powf(-1.0).mul(&d).with_label(format!("1/(Phi'(i+{eps}z)^2)")), 1.0, &one, &opts)?;
        h1.push(HeightNorms { epsilon: eps, forward, inverse });
    }
    let smirnov = smirnov_defect_with(&pp, lattice, tol.smirnov)?;
    let arg_ok = arg_sup <= arg_bound;
    let a2_ok = a2.constant.is_finite();
    let h1_ok = h1.iter().all(|h| h.forward.member && h.inverse.member);
    let smirnov_ok = smirnov.classification == Classification::Smirnov;
    Ok(PhiPrimeDiagnostics {
        lipschitz,
        arg_sup,
        arg_bound,
        arg_ok,
        a2,
        a2_ok,
        h1,
        h1_ok,
        smirnov,
        smirnov_ok,
        passed: arg_ok && a2_ok && h1_ok && smirnov_ok,
    })
}

pub(crate) fn boundary_modulus(pp: &AnalyticFn) -> Result<SampledWeight> {
    pp.boundary_weight(&default_grid()).ok_or_else(|| Error::Inconsistent("Phi' has no closed-form boundary modulus".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::wedge_map;

    #[test]
    fn identity_map_passes() {
        let d = phi_prime_diagnostics_with(&wedge_map(0.0).unwrap(), &Lattice::coarse(), &Tolerances::default()).unwrap();
        assert!(d.passed);
        assert_eq!(d.arg_sup, 0.0);
        assert!((d.a2.constant.value() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn right_angle_wedge_passes() {
        let d = phi_prime_diagnostics_with(&wedge_map(1.0).unwrap(), &Lattice::coarse(), &Tolerances::default()).unwrap();
        assert!(d.passed, "{d:?}");
        assert!(d.arg_sup <= std::f64::consts::FRAC_PI_4 + 1e-9);
    }
}
