//! Weighted Hardy-space norms on the half-plane, the non-tangential maximal
//! function, and the Smirnov ⟺ `H¹` equivalence harness.

mod equivalence;
mod hmw;
mod norms;

use serde::{Deserialize, Serialize};

use crate::numerics::logspace;
use crate::{Error, Result};

pub use equivalence::{
    equivalence_harness, equivalence_harness_with, norm_change_check, norm_change_check_with, norm_change_check_with_options, EquivalenceReport,
    EquivalenceWitness, FamilyMember, NormChangeReport, SearchStep, Verdict,
};
pub use equivalence::BASE_FAMILY;
pub use hmw::{hmw_product_test, hmw_product_test_with, HmwReport};
pub(crate) use norms::{check_exponent, scan_heights};
pub use norms::{
    hardy_norm_halfplane, hardy_norm_halfplane_with, hardy_norm_maximal, hardy_norm_maximal_with, nt_maximal,
    Convergence, HardyNormReport, MaximalNormReport, NormOptions,
};

/// 22 heights, three per decade over `[1e-4, 1e3]`.
pub fn default_heights() -> Vec<f64> {
    logspace(1e-4, 1e3, 22)
}

/// Aperture and sampling of the cones `Γ_α(ξ) = {x + iy : |x - ξ| < y tan α}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeGeometry {
    alpha: f64,
    heights: Vec<f64>,
    lateral_count: usize,
}

impl ConeGeometry {
    /// `lipschitz` is the boundary's Lipschitz constant (0 for the half-plane);
    /// the aperture must satisfy `0 < α < arctan(1/L)`.
    pub fn new(alpha: f64, heights: Vec<f64>, lateral_count: usize, lipschitz: f64) -> Result<Self> {
        let limit = if lipschitz > 0.0 { (1.0 / lipschitz).atan() } else { std::f64::consts::FRAC_PI_2 };
        if !(alpha > 0.0 && alpha < limit) {
            return Err(Error::Argument(format!("aperture {alpha} outside (0, {limit})")));
        }
        if heights.is_empty() || heights.iter().any(|h| !(*h > 0.0) || !h.is_finite()) {
            return Err(Error::Argument("cone heights must be positive".into()));
        }
        if lateral_count == 0 {
            return Err(Error::Argument("lateral_count must be positive".into()));
        }
        let mut heights = heights;
        heights.sort_by(|a, b| a.total_cmp(b));
        Ok(Self { alpha, heights, lateral_count })
    }

    /// The cone with heights below `floor` removed, `None` if none remain.
    pub fn truncated(&self, floor: f64) -> Option<Self> {
        let heights: Vec<f64> = self.heights.iter().copied().filter(|h| *h >= floor).collect();
        (!heights.is_empty()).then(|| Self { heights, ..self.clone() })
    }

    pub fn half_plane(alpha: f64) -> Result<Self> {
        Self::new(alpha, default_heights(), 9, 0.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn lateral_count(&self) -> usize {
        self.lateral_count
    }

    /// Sample points of `Γ_α(ξ)`, closed at the lateral edges.
    pub fn samples(&self, xi: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let n = self.lateral_count;
        let t = self.alpha.tan();
        self.heights.iter().flat_map(move |&h| {
            (0..n).map(move |j| {
                let s = if n == 1 { 0.0 } else { 2.0 * j as f64 / (n - 1) as f64 - 1.0 };
                (xi + s * h * t, h)
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cone_bounds() {
        assert!(ConeGeometry::new(1.0, vec![1.0], 3, 0.0).is_ok());
        assert!(ConeGeometry::new(0.5f64.atan() + 1e-9, vec![1.0], 3, 2.0).is_err());
        assert!(ConeGeometry::new(std::f64::consts::FRAC_PI_2, vec![1.0], 3, 0.0).is_err());
        let c = ConeGeometry::new(std::f64::consts::FRAC_PI_4, vec![2.0], 3, 0.0).unwrap();
        let pts: Vec<_> = c.samples(1.0).collect();
        assert_eq!(pts.len(), 3);
        assert!((pts[0].0 + 1.0).abs() < 1e-12 && (pts[2].0 - 3.0).abs() < 1e-12 && pts[1].0 == 1.0);
    }
}
