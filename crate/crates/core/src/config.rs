//! Centralized tolerances. Every harness reads its thresholds from here.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Relative tolerance of the adaptive quadrature in convolutions.
    pub quad_rel: f64,
    /// Absolute tolerance of the adaptive quadrature in convolutions.
    pub quad_abs: f64,
    /// Relative tolerance for line integrals in Hardy norms.
    pub norm_rel: f64,
    /// Absolute Smirnov tolerance, in log scale.
    pub smirnov: f64,
    /// Factor band `C_trace` for boundary-modulus comparability.
    pub trace_band: f64,
    /// Relative accuracy demanded from non-tangential traces.
    pub trace_rtol: f64,
    /// Relative side-length residual for Schwarz–Christoffel solves.
    pub sc: f64,
    /// Slack on `|arg Φ'| ≤ arctan L` for numerically solved maps.
    pub arg: f64,
    /// Largest admissible norm-equivalence constant `C_eq`.
    pub equivalence_band: f64,
    /// Largest admissible majorization constant in the product test.
    pub majorization_cap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            quad_rel: 1e-10,
            quad_abs: 1e-13,
            norm_rel: 1e-7,
            smirnov: 1e-3,
            trace_band: 1.5,
            trace_rtol: 1e-3,
            sc: 1e-6,
            arg: 1e-4,
            equivalence_band: 100.0,
            majorization_cap: 10.0,
        }
    }
}

impl Tolerances {
    /// Rejects non-positive overrides.
    pub fn validate(&self) -> crate::Result<()> {
        let fields = [
            ("quad_rel", self.quad_rel),
            ("quad_abs", self.quad_abs),
            ("norm_rel", self.norm_rel),
            ("smirnov", self.smirnov),
            ("trace_band", self.trace_band),
            ("trace_rtol", self.trace_rtol),
            ("sc", self.sc),
            ("arg", self.arg),
            ("equivalence_band", self.equivalence_band),
            ("majorization_cap", self.majorization_cap),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(crate::Error::Input(format!("tolerance {name} must be positive, got {v}")));
            }
        }
        if self.trace_band < 1.0 {
            return Err(crate::Error::Input("trace_band must be at least 1".into()));
        }
        Ok(())
    }
}
