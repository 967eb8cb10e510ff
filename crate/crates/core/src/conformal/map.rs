use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::PolylineBoundary;
use crate::analytic::AnalyticFn;
use crate::numerics::quadrature::GaussJacobi;
use crate::{Error, Result};

/// Nodes of the Gauss–Jacobi rules for side lengths and arc integrals.
pub const SC_ORDER: usize = 48;

/// Nodes per panel when integrating `Φ'` along a path.
const PATH_ORDER: usize = 12;

/// `Φ: ℝ²₊ → Ω` with `Φ'(z) = scale·rotation·∏ (z - a_k)^{α_k - 1}`,
/// normalized by `Φ(∞) = ∞` and `Φ(i) = v_1 + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalMap {
    boundary: PolylineBoundary,
    prevertices: Vec<f64>,
    angle_ratios: Vec<f64>,
    rotation: Complex64,
    scale: f64,
    base_point_image: Complex64,
    closed_form: bool,
    residuals: Vec<f64>,
    check_residuals: Vec<f64>,
    iterations: usize,
    /// Gauss–Jacobi rules absorbing `(z - a_k)^{α_k - 1}`, one per prevertex.
    heads: Vec<GaussJacobi>,
    legendre: GaussJacobi,
}

fn path_rules(alphas: &[f64]) -> Result<(Vec<GaussJacobi>, GaussJacobi)> {
    let heads = alphas.iter().map(|al| GaussJacobi::new(PATH_ORDER, 0.0, al - 1.0)).collect::<Result<Vec<_>>>()?;
    Ok((heads, GaussJacobi::new(PATH_ORDER, 0.0, 0.0)?))
}

/// JSON dump of a solved map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapDump {
    pub boundary: PolylineBoundary,
    pub prevertices: Vec<f64>,
    pub exponents: Vec<f64>,
    pub rotation: (f64, f64),
    pub scale: f64,
    pub base_point_image: (f64, f64),
    pub closed_form: bool,
    /// Relative side-length residuals at the solver's quadrature order.
    pub residuals: Vec<f64>,
    /// The same at doubled order.
    pub check_residuals: Vec<f64>,
    pub iterations: usize,
}

/// `arg z` in `[lo, lo + 2π)`.
fn arg_from(z: Complex64, lo: f64) -> f64 {
    let mut t = z.arg();
    while t < lo {
        t += 2.0 * PI;
    }
    while t >= lo + 2.0 * PI {
        t -= 2.0 * PI;
    }
    t
}

/// `Φ(z) = e^{i arctan m} z^α` with `α = 1 - (2/π) arctan m`, onto `{y > m|x|}`.
pub fn wedge_map(m: f64) -> Result<ConformalMap> {
    if !(m >= 0.0) || !m.is_finite() {
        return Err(Error::Argument(format!("wedge slope must be finite and nonnegative, got {m}")));
    }
    let boundary = PolylineBoundary::wedge(m)?;
    let alpha = 1.0 - 2.0 * m.atan() / PI;
    let (heads, legendre) = path_rules(&[alpha])?;
    Ok(ConformalMap {
        boundary,
        prevertices: vec![0.0],
        angle_ratios: vec![alpha],
        rotation: Complex64::from_polar(1.0, m.atan()),
        scale: alpha,
        base_point_image: Complex64::i(),
        closed_form: true,
        residuals: Vec::new(),
        check_residuals: Vec::new(),
        iterations: 0,
        heads,
        legendre,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub order: usize,
    pub max_iter: usize,
    /// Required relative side-length residual.
    pub tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { order: SC_ORDER, max_iter: 60, tol: crate::Tolerances::default().sc }
    }
}

pub fn solve_sc(boundary: &PolylineBoundary) -> Result<ConformalMap> {
    solve_sc_with(boundary, &SolveOptions::default())
}

/// Side-length integrals `∫_{a_k}^{a_{k+1}} ∏ |t - a_j|^{α_j - 1} dt` with
/// the endpoint powers absorbed by Gauss–Jacobi weights.
fn side_integrals(a: &[f64], alphas: &[f64], order: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(a.len().saturating_sub(1));
    for k in 0..a.len().saturating_sub(1) {
        let rule = GaussJacobi::new(order, alphas[k + 1] - 1.0, alphas[k] - 1.0)?;
        let v = rule.integrate(a[k], a[k + 1], |t| {
            Ok(a.iter().zip(alphas).enumerate().filter(|(j, _)| *j != k && *j != k + 1).map(|(_, (aj, al))| (t - aj).abs().powf(al - 1.0)).product::<f64>())
        })?;
        out.push(v);
    }
    Ok(out)
}

fn prevertices_from_gaps(log_gaps: &[f64]) -> Vec<f64> {
    let mut a = vec![0.0, 1.0];
    for u in log_gaps {
        let last = *a.last().expect("non-empty");
        a.push(last + u.exp());
    }
    a
}

/// Schwarz–Christoffel parameter problem for a polyline graph.
///
/// With `a_1 = 0` and `a_2 = 1` the remaining log-gaps solve the side-length
/// ratio equations by damped Newton; the scale follows from the first side.
/// A final half-plane automorphism `z ↦ λz + b` enforces `Φ(i) = v_1 + i`.
pub fn solve_sc_with(boundary: &PolylineBoundary, opts: &SolveOptions) -> Result<ConformalMap> {
    let alphas = boundary.angle_ratios();
    let lengths = boundary.side_lengths();
    let n = alphas.len();
    let rotation = Complex64::from_polar(1.0, *boundary.directions().last().expect("non-empty"));
    let mut iterations = 0;
    let (a, scale) = match n {
        1 => (vec![0.0], 1.0),
        2 => {
            let i = side_integrals(&[0.0, 1.0], &alphas, opts.order)?;
            (vec![0.0, 1.0], lengths[0] / i[0])
        }
        _ => {
            let target: Vec<f64> = (1..n - 1).map(|k| (lengths[k] / lengths[0]).ln()).collect();
            let resid = |u: &[f64]| -> Result<DVector<f64>> {
                let i = side_integrals(&prevertices_from_gaps(u), &alphas, opts.order)?;
                Ok(DVector::from_iterator(n - 2, (1..n - 1).map(|k| (i[k] / i[0]).ln() - target[k - 1])))
            };
            let mut u = DVector::from_vec(target.clone());
            let mut r = resid(u.as_slice())?;
            while r.amax() > 1e-13 {
                if iterations >= opts.max_iter {
                    return Err(Error::NoConvergence { iterations, residual: r.amax() });
                }
                iterations += 1;
                let h = 1e-7;
                let mut jac = DMatrix::zeros(n - 2, n - 2);
                for c in 0..n - 2 {
                    let mut up = u.clone();
                    up[c] += h;
                    let rc = resid(up.as_slice())?;
                    jac.set_column(c, &((rc - &r) / h));
                }
                let step = jac.lu().solve(&(-&r)).ok_or(Error::NoConvergence { iterations, residual: r.amax() })?;
                let mut t = 1.0;
                loop {
                    let cand = &u + &step * t;
                    let rc = resid(cand.as_slice())?;
                    if rc.norm() < r.norm() || t < 1e-4 {
                        u = cand;
                        r = rc;
                        break;
                    }
                    t *= 0.5;
                }
                if (&step * t).amax() < 1e-15 {
                    break;
                }
            }
            let a = prevertices_from_gaps(u.as_slice());
            let i = side_integrals(&a, &alphas, opts.order)?;
            (a, lengths[0] / i[0])
        }
    };
    let (heads, legendre) = path_rules(&alphas)?;
    let mut map = ConformalMap {
        boundary: boundary.clone(),
        prevertices: a,
        angle_ratios: alphas,
        rotation,
        scale,
        base_point_image: Complex64::new(0.0, 0.0),
        closed_form: n == 1,
        residuals: Vec::new(),
        check_residuals: Vec::new(),
        iterations,
        heads,
        legendre,
    };
    map.base_point_image = map.phi(Complex64::i())?;
    // Φ(λz + b) is the normalized map when Φ(λi + b) = v_1 + i.
    let zeta = map.inverse(map.first_vertex() + Complex64::i())?;
    let (b, lambda) = (zeta.re, zeta.im);
    map.prevertices.iter_mut().for_each(|p| *p = (*p - b) / lambda);
    map.scale *= lambda.powf(1.0 + map.exponent_sum());
    map.base_point_image = map.first_vertex() + Complex64::i();
    map.residuals = map.side_residuals(opts.order)?;
    map.check_residuals = map.side_residuals(2 * opts.order)?;
    let worst = map.max_residual();
    if !(worst <= opts.tol) {
        return Err(Error::NoConvergence { iterations, residual: worst });
    }
    Ok(map)
}

impl ConformalMap {
    pub fn boundary(&self) -> &PolylineBoundary {
        &self.boundary
    }

    pub fn prevertices(&self) -> &[f64] {
        &self.prevertices
    }

    pub fn angle_ratios(&self) -> &[f64] {
        &self.angle_ratios
    }

    pub fn rotation(&self) -> Complex64 {
        self.rotation
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn base_point_image(&self) -> Complex64 {
        self.base_point_image
    }

    /// Single-vertex maps are evaluated in closed form.
    pub fn is_closed_form(&self) -> bool {
        self.closed_form
    }

    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().chain(&self.check_residuals).fold(0.0, |m, r| m.max(*r))
    }

    /// `Σ (α_k - 1)`: `|Φ'(x)| ~ |x|^{Σ(α_k - 1)}` at infinity.
    pub fn exponent_sum(&self) -> f64 {
        self.angle_ratios.iter().map(|a| a - 1.0).sum()
    }

    fn first_vertex(&self) -> Complex64 {
        let (x, y) = self.boundary.vertices()[0];
        Complex64::new(x, y)
    }

    fn vertex(&self, k: usize) -> Complex64 {
        let (x, y) = self.boundary.vertices()[k];
        Complex64::new(x, y)
    }

    pub fn dump(&self) -> MapDump {
        MapDump {
            boundary: self.boundary.clone(),
            prevertices: self.prevertices.clone(),
            exponents: self.angle_ratios.iter().map(|a| a - 1.0).collect(),
            rotation: (self.rotation.re, self.rotation.im),
            scale: self.scale,
            base_point_image: (self.base_point_image.re, self.base_point_image.im),
            closed_form: self.closed_form,
            residuals: self.residuals.clone(),
            check_residuals: self.check_residuals.clone(),
            iterations: self.iterations,
        }
    }

    /// `log Φ'(z)` with `Im` between the end directions, `z` in the closed
    /// half-plane away from prevertices.
    pub fn log_phi_prime(&self, z: Complex64) -> Complex64 {
        let mut l = Complex64::new(self.scale.ln(), self.rotation.arg());
        for (a, al) in self.prevertices.iter().zip(&self.angle_ratios) {
            if *al != 1.0 {
                l += (z - a).ln() * (al - 1.0);
            }
        }
        l
    }

    pub fn phi_prime(&self, z: Complex64) -> Complex64 {
        self.log_phi_prime(z).exp()
    }

    /// `Φ'` as a function on the half-plane; its boundary modulus is the
    /// closed-form `|Φ'(x)|`.
    pub fn phi_prime_fn(&self) -> Result<AnalyticFn> {
        let mut f = AnalyticFn::constant(self.rotation * self.scale)?;
        for (a, al) in self.prevertices.iter().zip(&self.angle_ratios) {
            if *al != 1.0 {
                f = f.mul(&AnalyticFn::affine_power(1.0, Complex64::new(-a, 0.0), al - 1.0)?);
            }
        }
        Ok(f.with_label("Phi'"))
    }

    fn closed_phi(&self, z: Complex64) -> Complex64 {
        let (a, al) = (self.prevertices[0], self.angle_ratios[0]);
        self.first_vertex() + self.rotation * (self.scale / al) * ((z - a).ln() * al).exp()
    }

    /// `v_k + ∫_{a_k}^{z} Φ'` along the segment from the nearest prevertex:
    /// a Gauss–Jacobi head absorbs the power at `a_k`, then Gauss–Legendre
    /// panels no longer than half the distance to the other prevertices.
    fn path_phi(&self, z: Complex64) -> Result<Complex64> {
        let (k, _) = self
            .prevertices
            .iter()
            .map(|a| (z - a).norm())
            .enumerate()
            .fold((0, f64::INFINITY), |best, (j, r)| if r < best.1 { (j, r) } else { best });
        let a = self.prevertices[k];
        let d = z - a;
        let len = d.norm();
        if len == 0.0 {
            return Ok(self.vertex(k));
        }
        let e = self.angle_ratios[k] - 1.0;
        let gap = self
            .prevertices
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != k)
            .map(|(_, p)| (p - a).abs())
            .fold(f64::INFINITY, f64::min);
        let pref = d * (d.ln() * e).exp();
        let others = |t: f64| -> Complex64 {
            let zeta = a + d * t;
            let mut l = Complex64::new(self.scale.ln(), self.rotation.arg());
            for (j, (p, al)) in self.prevertices.iter().zip(&self.angle_ratios).enumerate() {
                if j != k && *al != 1.0 {
                    l += (zeta - p).ln() * (al - 1.0);
                }
            }
            l.exp()
        };
        let t1 = (0.5 * gap / len).min(1.0);
        let mut total = self.vertex(k) + pref * self.heads[k].integrate(0.0, t1, |t| Ok(others(t)))?;
        let mut t = t1;
        let mut panels = 0;
        while t < 1.0 {
            let p = a + d * t;
            let dist = self.prevertices.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min);
            let next = if panels >= 400 { 1.0 } else { (t + 0.5 * dist / len).min(1.0) };
            total += self.legendre.integrate(t, next, |s| Ok(self.phi_prime(a + d * s) * d))?;
            t = next;
            panels += 1;
        }
        Ok(total)
    }

    /// `Φ(z)` for `z` in the closed half-plane.
    pub fn phi(&self, z: Complex64) -> Result<Complex64> {
        if !(z.im >= 0.0) || !z.is_finite() {
            return Err(Error::Domain(format!("{z} is outside the closed half-plane")));
        }
        if self.closed_form {
            return Ok(self.closed_phi(z));
        }
        self.path_phi(z)
    }

    /// `x ↦ Φ(x)` on the boundary line.
    pub fn boundary_point(&self, x: f64) -> Result<Complex64> {
        if !x.is_finite() {
            return Err(Error::Domain(format!("boundary point at {x}")));
        }
        if self.closed_form {
            return Ok(self.closed_phi(Complex64::new(x, 0.0)));
        }
        self.path_phi(Complex64::new(x, 0.0))
    }

    fn side_residuals(&self, order: usize) -> Result<Vec<f64>> {
        let i = side_integrals(&self.prevertices, &self.angle_ratios, order)?;
        Ok(i.iter().zip(self.boundary.side_lengths()).map(|(v, l)| (self.scale * v / l - 1.0).abs()).collect())
    }

    /// `Φ^{-1}(w)` for `w ∈ Ω`.
    ///
    /// Newton's method seeded by the local wedge `v_k + c_k (z - a_k)^{α_k}`
    /// at the nearest vertex. Should that fail, Newton is continued along
    /// the path that rises vertically from `Φ(i)`, crosses above the boundary
    /// and descends vertically onto `w`.
    pub fn inverse(&self, w: Complex64) -> Result<Complex64> {
        if !self.boundary.contains(w) {
            return Err(Error::Domain(format!("{w} is not in the domain")));
        }
        if self.closed_form {
            let (a, al) = (self.prevertices[0], self.angle_ratios[0]);
            let u = (w - self.first_vertex()) / self.rotation * (al / self.scale);
            let theta = arg_from(u, 0.5 * al * PI - PI);
            return Ok(a + Complex64::from_polar(u.norm().powf(1.0 / al), theta / al));
        }
        if let Ok(z) = self.newton(self.wedge_seed(w), w) {
            return Ok(z);
        }
        let w0 = self.base_point_image;
        let top = w0.im.max(w.im).max(self.boundary.max_gamma(w0.re.min(w.re), w0.re.max(w.re))) + 1.0;
        let legs = [Complex64::new(w0.re, top), Complex64::new(w.re, top), w];
        let mut zeta = Complex64::i();
        let mut image = w0;
        for target in legs {
            let start = image;
            let mut s: f64 = 0.0;
            let mut ds: f64 = 0.25;
            while s < 1.0 {
                let next = (s + ds).min(1.0);
                let goal = start + (target - start) * next;
                match self.newton(zeta, goal) {
                    Ok(z) => {
                        zeta = z;
                        image = goal;
                        s = next;
                        ds = (2.0 * ds).min(0.5);
                    }
                    Err(_) if ds > 1e-6 => ds *= 0.5,
                    Err(e) => return Err(e),
                }
            }
        }
        Ok(zeta)
    }

    fn wedge_seed(&self, w: Complex64) -> Complex64 {
        let k = (0..self.prevertices.len())
            .map(|j| (j, (w - self.vertex(j)).norm()))
            .fold((0, f64::INFINITY), |best, (j, r)| if r < best.1 { (j, r) } else { best })
            .0;
        let (a, al) = (self.prevertices[k], self.angle_ratios[k]);
        let mut lc = Complex64::new(self.scale.ln() - al.ln(), self.rotation.arg());
        for (j, (p, aj)) in self.prevertices.iter().zip(&self.angle_ratios).enumerate() {
            if j != k && *aj != 1.0 {
                lc += Complex64::new(a - p, 0.0).ln() * (aj - 1.0);
            }
        }
        let u = (w - self.vertex(k)) / lc.exp();
        let theta = arg_from(u, 0.5 * al * PI - PI);
        let z = Complex64::from_polar(u.norm().powf(1.0 / al), theta / al);
        a + Complex64::new(z.re, z.im.max(1e-3 * z.norm()))
    }

    /// Damped Newton for `Φ(ζ) = goal`, kept inside the open half-plane.
    fn newton(&self, mut zeta: Complex64, goal: Complex64) -> Result<Complex64> {
        let tol = 1e-12 * (1.0 + goal.norm());
        if !(zeta.im > 0.0) {
            return Err(Error::Domain(format!("Newton start {zeta} is not in the half-plane")));
        }
        let mut r = self.phi(zeta)? - goal;
        for it in 0..60 {
            if r.norm() <= tol {
                return Ok(zeta);
            }
            let mut step = -r / self.phi_prime(zeta);
            loop {
                let next = zeta + step;
                if next.im > 0.0 {
                    let rn = self.phi(next)? - goal;
                    if rn.norm() < r.norm() {
                        zeta = next;
                        r = rn;
                        break;
                    }
                }
                step *= 0.5;
                if step.norm() <= 1e-15 * (1.0 + zeta.norm()) {
                    if r.norm() <= 1e3 * tol {
                        return Ok(zeta);
                    }
                    return Err(Error::NoConvergence { iterations: it, residual: r.norm() });
                }
            }
        }
        Err(Error::NoConvergence { iterations: 60, residual: r.norm() })
    }

    /// The boundary-line point mapped to `η(ξ)`.
    pub fn boundary_preimage(&self, xi: f64) -> Result<f64> {
        if self.closed_form {
            let z = self.inverse_boundary_closed(xi);
            return Ok(z);
        }
        // Re Φ is increasing along the boundary line.
        let vx: Vec<f64> = self.boundary.vertices().iter().map(|v| v.0).collect();
        let k = vx.partition_point(|v| *v <= xi);
        let n = vx.len();
        let (mut lo, mut hi) = match k {
            0 => {
                let mut span = 1.0_f64.max(self.prevertices[n - 1].abs());
                while self.boundary_point(self.prevertices[0] - span)?.re > xi {
                    span *= 2.0;
                }
                (self.prevertices[0] - span, self.prevertices[0])
            }
            _ if k == n => {
                let mut span = 1.0_f64.max(self.prevertices[0].abs());
                while self.boundary_point(self.prevertices[n - 1] + span)?.re < xi {
                    span *= 2.0;
                }
                (self.prevertices[n - 1], self.prevertices[n - 1] + span)
            }
            _ => (self.prevertices[k - 1], self.prevertices[k]),
        };
        // Newton on Re Φ(x) = ξ, safeguarded by bisection of the bracket.
        let mut x = 0.5 * (lo + hi);
        for _ in 0..200 {
            let r = self.boundary_point(x)?.re - xi;
            if r == 0.0 {
                return Ok(x);
            }
            if r < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let slope = self.phi_prime(Complex64::new(x, 0.0)).re;
            let newton = x - r / slope;
            let next = if slope > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) || !(next > lo && next < hi) {
                return Ok(next);
            }
            x = next;
        }
        Ok(x)
    }

    fn inverse_boundary_closed(&self, xi: f64) -> f64 {
        let (a, al) = (self.prevertices[0], self.angle_ratios[0]);
        let v = self.boundary.eta(xi) - self.first_vertex();
        let u = v / self.rotation * (al / self.scale);
        let r = u.norm().powf(1.0 / al);
        if xi >= self.boundary.vertices()[0].0 {
            a + r
        } else {
            a - r
        }
    }
}
