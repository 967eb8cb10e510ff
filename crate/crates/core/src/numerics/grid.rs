use std::sync::{Arc, OnceLock};

use crate::{Error, Result};

/// Symmetric nonuniform grid on `[-R, R]`.
///
/// Positive nodes follow `x_j = h/2 + h (q^j - 1)/(q - 1)`: spacing `h` near
/// the origin that grows geometrically with ratio `q` until the last node
/// lands on the core radius `R`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealGrid {
    nodes: Vec<f64>,
    quad_weights: Vec<f64>,
    core_radius: f64,
}

pub const DEFAULT_NODES: usize = 4096;
pub const DEFAULT_CORE_RADIUS: f64 = 1e4;
pub const DEFAULT_MIN_SPACING: f64 = 1e-6;

impl Default for RealGrid {
    fn default() -> Self {
        Self::log_linear(DEFAULT_NODES, DEFAULT_CORE_RADIUS, DEFAULT_MIN_SPACING)
            .expect("default grid parameters are valid")
    }
}

impl RealGrid {
    /// Builds a grid from explicit nodes; weights are trapezoidal.
    pub fn from_nodes(nodes: Vec<f64>, core_radius: f64) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::Argument("a grid needs at least two nodes".into()));
        }
        if !(core_radius > 0.0) {
            return Err(Error::Argument("core radius must be positive".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Argument("grid nodes must be strictly increasing".into()));
        }
        let n = nodes.len();
        for (a, b) in nodes.iter().zip(nodes.iter().rev()) {
            if (a + b).abs() > 1e-12 * a.abs().max(1.0) {
                return Err(Error::Argument("grid must be symmetric about 0".into()));
            }
        }
        let mut quad_weights = vec![0.0; n];
        for i in 0..n {
            let left = if i == 0 { nodes[0] } else { nodes[i - 1] };
            let right = if i + 1 == n { nodes[n - 1] } else { nodes[i + 1] };
            quad_weights[i] = 0.5 * (right - left);
        }
        Ok(Self { nodes, quad_weights, core_radius })
    }

    /// Log-linear hybrid grid with `n` nodes (even), outermost nodes at `±R`.
    pub fn log_linear(n: usize, core_radius: f64, min_spacing: f64) -> Result<Self> {
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::Argument(format!("node count must be even and >= 4, got {n}")));
        }
        let h = min_spacing;
        let r = core_radius;
        if !(h > 0.0 && r > h) {
            return Err(Error::Argument("need 0 < min_spacing < core_radius".into()));
        }
        let m = n / 2;
        let last = (m - 1) as f64;
        // x_{m-1}(q) is increasing in q; bisect on q for x_{m-1} = R.
        let outer = |q: f64| 0.5 * h + h * (q.powf(last) - 1.0) / (q - 1.0);
        if outer(1.0 + 1e-12) > r {
            return Err(Error::Argument("too many nodes for the requested spacing".into()));
        }
        let (mut lo, mut hi) = (1.0 + 1e-12, 2.0);
        while outer(hi) < r {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if outer(mid) < r {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let q = 0.5 * (lo + hi);
        let mut positive: Vec<f64> =
            (0..m).map(|j| 0.5 * h + h * (q.powi(j as i32) - 1.0) / (q - 1.0)).collect();
        positive[m - 1] = r;
        let mut nodes: Vec<f64> = positive.iter().rev().map(|x| -x).collect();
        nodes.extend_from_slice(&positive);
        Self::from_nodes(nodes, r)
    }

    /// Same construction with twice the nodes.
    pub fn refined(&self) -> Result<Self> {
        let n = self.nodes.len() * 2;
        let h = self.min_spacing() / 2.0;
        Self::log_linear(n, self.core_radius, h)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn quad_weights(&self) -> &[f64] {
        &self.quad_weights
    }

    pub fn core_radius(&self) -> f64 {
        self.core_radius
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn min_spacing(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    /// Index `i` with `nodes[i] <= t < nodes[i+1]`, clamped to the valid cells.
    pub fn cell(&self, t: f64) -> usize {
        let n = self.nodes.len();
        match self.nodes.binary_search_by(|v| v.total_cmp(&t)) {
            Ok(i) => i.min(n - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 2),
        }
    }

    /// Nodes inside `[lo, hi]`.
    pub fn nodes_between(&self, lo: f64, hi: f64) -> &[f64] {
        let start = self.nodes.partition_point(|&v| v < lo);
        let end = self.nodes.partition_point(|&v| v <= hi);
        &self.nodes[start..end.max(start)]
    }
}

/// `n` log-spaced values from `lo` to `hi` inclusive.
/// The shared default grid.
pub fn default_grid() -> Arc<RealGrid> {
    static GRID: OnceLock<Arc<RealGrid>> = OnceLock::new();
    GRID.get_or_init(|| Arc::new(RealGrid::default())).clone()
}

pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n).map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp()).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_shape() {
        let g = RealGrid::default();
        assert_eq!(g.len(), 4096);
        assert_eq!(g.nodes()[0], -1e4);
        assert_eq!(*g.nodes().last().unwrap(), 1e4);
        let h = g.min_spacing();
        assert!((h - 1e-6).abs() < 1e-9, "min spacing {h}");
        assert!(g.quad_weights().iter().all(|&w| w > 0.0));
        let total: f64 = g.quad_weights().iter().sum();
        assert!((total - 2e4).abs() < 1e-6);
    }

    #[test]
    fn symmetric_and_increasing() {
        let g = RealGrid::log_linear(64, 10.0, 1e-3).unwrap();
        let n = g.len();
        for i in 0..n {
            assert_eq!(g.nodes()[i], -g.nodes()[n - 1 - i]);
        }
        assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(RealGrid::from_nodes(vec![0.0, -1.0], 1.0).is_err());
        assert!(RealGrid::from_nodes(vec![-1.0, 2.0], 1.0).is_err());
        assert!(RealGrid::log_linear(7, 10.0, 1e-3).is_err());
    }

    #[test]
    fn cell_lookup() {
        let g = RealGrid::log_linear(16, 10.0, 0.1).unwrap();
        let i = g.cell(0.3);
        assert!(g.nodes()[i] <= 0.3 && 0.3 < g.nodes()[i + 1]);
        assert_eq!(g.cell(-100.0), 0);
        assert_eq!(g.cell(100.0), g.len() - 2);
    }
}
