//! Grids, quadrature and the Poisson / conjugate-Poisson kernel engine.

mod function;
mod grid;
mod kernels;
mod line;
pub mod quadrature;

pub use function::{BoundaryFn, FnTail, Profile};
pub use grid::{default_grid, logspace, RealGrid};
pub use kernels::{
    conjugate_convolve, conjugate_convolve_with, harmonic_extension, harmonic_extension_with, local_average,
    poisson_convolve, poisson_convolve_with, poisson_kernel, Convolution, ExtensionValue, LocalAverage,
};
pub use line::{integrate_line, Focus, LinePlan, Singularity};

use serde::{Deserialize, Serialize};

/// A point `x + iy` of the open upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlanePoint {
    x: f64,
    y: f64,
}

impl HalfPlanePoint {
    pub fn new(x: f64, y: f64) -> crate::Result<Self> {
        if !(y > 0.0) || !y.is_finite() || !x.is_finite() {
            return Err(crate::Error::Domain(format!("({x}, {y}) is not in the open upper half-plane")));
        }
        Ok(Self { x, y })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn to_complex(self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.x, self.y)
    }
}

impl TryFrom<num_complex::Complex64> for HalfPlanePoint {
    type Error = crate::Error;

    fn try_from(z: num_complex::Complex64) -> crate::Result<Self> {
        Self::new(z.re, z.im)
    }
}
