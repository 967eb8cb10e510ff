use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A continuous piecewise-linear graph `γ` with rays beyond the end vertices.
/// The domain is `Ω = {Im z > γ(Re z)}` with boundary `Λ = {x + iγ(x)}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BoundaryFile", into = "BoundaryFile")]
pub struct PolylineBoundary {
    vertices: Vec<(f64, f64)>,
    slope_left: f64,
    slope_right: f64,
    lipschitz: f64,
}

/// On-disk form: `{"vertices": [[x, y], ...], "slope_left": .., "slope_right": ..}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct BoundaryFile {
    vertices: Vec<[f64; 2]>,
    slope_left: f64,
    slope_right: f64,
}

impl TryFrom<BoundaryFile> for PolylineBoundary {
    type Error = Error;

    fn try_from(f: BoundaryFile) -> Result<Self> {
        Self::new(f.vertices.iter().map(|v| (v[0], v[1])).collect(), f.slope_left, f.slope_right)
    }
}

impl From<PolylineBoundary> for BoundaryFile {
    fn from(b: PolylineBoundary) -> Self {
        Self { vertices: b.vertices.iter().map(|&(x, y)| [x, y]).collect(), slope_left: b.slope_left, slope_right: b.slope_right }
    }
}

impl PolylineBoundary {
    pub fn new(vertices: Vec<(f64, f64)>, slope_left: f64, slope_right: f64) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Argument("a polyline needs at least one vertex".into()));
        }
        if vertices.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) || !slope_left.is_finite() || !slope_right.is_finite() {
            return Err(Error::Argument("vertices and slopes must be finite".into()));
        }
        if vertices.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::Argument("vertex abscissae must increase strictly".into()));
        }
        let mut b = Self { vertices, slope_left, slope_right, lipschitz: 0.0 };
        b.lipschitz = b.slopes().iter().fold(0.0, |m, s| m.max(s.abs()));
        Ok(b)
    }

    /// `γ(x) = m|x|`.
    pub fn wedge(m: f64) -> Result<Self> {
        Self::new(vec![(0.0, 0.0)], -m, m)
    }

    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    pub fn slope_left(&self) -> f64 {
        self.slope_left
    }

    pub fn slope_right(&self) -> f64 {
        self.slope_right
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// Slopes of the left ray, the finite segments and the right ray.
    pub fn slopes(&self) -> Vec<f64> {
        let mut s = vec![self.slope_left];
        s.extend(self.vertices.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)));
        s.push(self.slope_right);
        s
    }

    /// Direction angles `arctan(slope)` of the pieces, left to right.
    pub fn directions(&self) -> Vec<f64> {
        self.slopes().into_iter().map(f64::atan).collect()
    }

    /// Interior angle over `π` at each vertex.
    pub fn angle_ratios(&self) -> Vec<f64> {
        self.directions().windows(2).map(|d| 1.0 - (d[1] - d[0]) / std::f64::consts::PI).collect()
    }

    /// Lengths of the finite segments.
    pub fn side_lengths(&self) -> Vec<f64> {
        self.vertices.windows(2).map(|w| (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1)).collect()
    }

    fn piece(&self, x: f64) -> usize {
        self.vertices.partition_point(|v| v.0 <= x)
    }

    pub fn gamma(&self, x: f64) -> f64 {
        let k = self.piece(x);
        let s = self.slopes()[k];
        let (vx, vy) = if k == 0 { self.vertices[0] } else { self.vertices[k - 1] };
        vy + s * (x - vx)
    }

    /// `γ'(x)`, right-continuous at vertices.
    pub fn gamma_prime(&self, x: f64) -> f64 {
        self.slopes()[self.piece(x)]
    }

    /// `η(ξ) = ξ + iγ(ξ)`.
    pub fn eta(&self, xi: f64) -> Complex64 {
        Complex64::new(xi, self.gamma(xi))
    }

    /// `ds/dξ = √(1 + γ'²)`.
    pub fn arc_factor(&self, xi: f64) -> f64 {
        self.gamma_prime(xi).hypot(1.0)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.im > self.gamma(z.re)
    }

    /// Largest `γ` over `[a, b]`.
    pub fn max_gamma(&self, a: f64, b: f64) -> f64 {
        let mut m = self.gamma(a).max(self.gamma(b));
        for &(x, y) in &self.vertices {
            if x > a && x < b {
                m = m.max(y);
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wedge_geometry() {
        let b = PolylineBoundary::wedge(1.0).unwrap();
        assert_eq!(b.lipschitz(), 1.0);
        assert!((b.angle_ratios()[0] - 0.5).abs() < 1e-15);
        assert_eq!(b.gamma(-2.0), 2.0);
        assert!(b.contains(Complex64::new(0.5, 0.6)) && !b.contains(Complex64::new(0.5, 0.4)));
    }

    #[test]
    fn exponent_sum_identity() {
        let b = PolylineBoundary::new(vec![(-1.0, 0.0), (0.0, 0.5), (2.0, 0.5)], 0.0, -0.25).unwrap();
        let d = b.directions();
        let sum: f64 = b.angle_ratios().iter().map(|a| a - 1.0).sum();
        assert!((sum + (d[d.len() - 1] - d[0]) / std::f64::consts::PI).abs() < 1e-14);
        assert_eq!(b.side_lengths().len(), 2);
        assert!((b.gamma(1.0) - 0.5).abs() < 1e-15 && (b.gamma(-0.5) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn json_round_trip() {
        let s = r#"{"vertices": [[0, 0], [1, 0.5]], "slope_left": 0, "slope_right": 0}"#;
        let b: PolylineBoundary = serde_json::from_str(s).unwrap();
        assert_eq!(b.lipschitz(), 0.5);
        let back: PolylineBoundary = serde_json::from_str(&serde_json::to_string(&b).unwrap()).unwrap();
        assert_eq!(b, back);
        assert!(serde_json::from_str::<PolylineBoundary>(r#"{"vertices": [[1, 0], [0, 0]], "slope_left": 0, "slope_right": 0}"#).is_err());
    }
}
