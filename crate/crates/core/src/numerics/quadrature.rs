//! Gauss–Kronrod adaptive integration and Gauss–Jacobi rules.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

use crate::{Error, Result};

/// Values that can be integrated: reals and complex numbers.
pub trait QuadValue:
    Copy + Default + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn magnitude(self) -> f64;
    fn finite(self) -> bool;
}

impl QuadValue for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn finite(self) -> bool {
        self.is_finite()
    }
}

impl QuadValue for Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Integral value with an absolute error estimate.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Estimate<V> {
    pub value: V,
    pub error: f64,
    pub evaluations: usize,
}

impl<V: QuadValue> Add for Estimate<V> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            value: self.value + rhs.value,
            error: self.error + rhs.error,
            evaluations: self.evaluations + rhs.evaluations,
        }
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// 15-point Kronrod rule on `[a, b]` with the QUADPACK error heuristic.
pub fn gauss_kronrod_15<V, F>(f: &mut F, a: f64, b: f64) -> Result<Estimate<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> Result<V>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = fc.magnitude() * WGK[7];
    let mut fv1 = [V::default(); 7];
    let mut fv2 = [V::default(); 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k = res_k + (f1 + f2) * WGK[j];
        res_abs += WGK[j] * (f1.magnitude() + f2.magnitude());
        if j % 2 == 1 {
            res_g = res_g + (f1 + f2) * WG[j / 2];
        }
    }
    let mean = res_k * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).magnitude();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).magnitude() + (fv2[j] - mean).magnitude());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();
    let mut err = ((res_k - res_g) * half).magnitude();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    if !value.finite() {
        return Err(Error::NonFinite { at: center });
    }
    Ok(Estimate { value, error: err, evaluations: 15 })
}

struct Panel<V> {
    a: f64,
    b: f64,
    est: Estimate<V>,
}

impl<V> PartialEq for Panel<V> {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
    }
}
impl<V> Eq for Panel<V> {}
impl<V> PartialOrd for Panel<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<V> Ord for Panel<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

/// Globally adaptive Gauss–Kronrod integration over a partition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Adaptive {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for Adaptive {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 1e-13, max_subdivisions: 2000 }
    }
}

impl Adaptive {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Self {
        Self { rel_tol, abs_tol, ..Self::default() }
    }

    /// Integrates over `[p_0, p_n]`, starting from the panels between
    /// consecutive breakpoints and bisecting the worst panel until the
    /// total error meets the tolerance.
    pub fn integrate<V, F>(&self, f: &mut F, breakpoints: &[f64]) -> Result<Estimate<V>>
    where
        V: QuadValue,
        F: FnMut(f64) -> Result<V>,
    {
        let mut heap = BinaryHeap::new();
        let mut done = Estimate::<V>::default();
        let mut total = Estimate::<V>::default();
        for w in breakpoints.windows(2) {
            if !(w[1] > w[0]) {
                continue;
            }
            let est = gauss_kronrod_15(f, w[0], w[1])?;
            total = total + est;
            heap.push(Panel { a: w[0], b: w[1], est });
        }
        let mut evaluations = total.evaluations;
        let mut splits = 0;
        loop {
            let value = total.value;
            let err: f64 = done.error + heap.iter().map(|p| p.est.error).sum::<f64>();
            if err <= self.abs_tol.max(self.rel_tol * value.magnitude()) || splits >= self.max_subdivisions {
                return Ok(Estimate { value, error: err, evaluations });
            }
            let Some(worst) = heap.pop() else {
                return Ok(Estimate { value, error: err, evaluations });
            };
            let mid = 0.5 * (worst.a + worst.b);
            if !(mid > worst.a && mid < worst.b) {
                done = done + worst.est;
                continue;
            }
            let left = gauss_kronrod_15(f, worst.a, mid)?;
            let right = gauss_kronrod_15(f, mid, worst.b)?;
            evaluations += 30;
            splits += 1;
            total.value = total.value - worst.est.value + left.value + right.value;
            heap.push(Panel { a: worst.a, b: mid, est: left });
            heap.push(Panel { a: mid, b: worst.b, est: right });
        }
    }
}

/// Gauss–Jacobi rule for `∫_{-1}^{1} (1-x)^α (1+x)^β f(x) dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussJacobi {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    alpha: f64,
    beta: f64,
}

impl GaussJacobi {
    /// Golub–Welsch construction from the Jacobi recurrence.
    pub fn new(n: usize, alpha: f64, beta: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::Argument("Gauss-Jacobi needs at least one node".into()));
        }
        if !(alpha > -1.0 && beta > -1.0) {
            return Err(Error::Argument(format!("Gauss-Jacobi exponents must exceed -1, got ({alpha}, {beta})")));
        }
        let ab = alpha + beta;
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n.saturating_sub(1)];
        diag[0] = (beta - alpha) / (ab + 2.0);
        for (k, d) in diag.iter_mut().enumerate().skip(1) {
            let kf = k as f64;
            *d = (beta * beta - alpha * alpha) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0));
        }
        for (k, o) in off.iter_mut().enumerate() {
            let kf = (k + 1) as f64;
            let b2 = if k == 0 {
                4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab)
                    / ((2.0 * kf + ab).powi(2) * (2.0 * kf + ab + 1.0) * (2.0 * kf + ab - 1.0))
            };
            *o = b2.sqrt();
        }
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = diag[i];
            if i + 1 < n {
                m[(i, i + 1)] = off[i];
                m[(i + 1, i)] = off[i];
            }
        }
        let mu0 = ((ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0)
            - ln_gamma(ab + 2.0))
        .exp();
        let eig = SymmetricEigen::new(m);
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let v0 = eig.eigenvectors[(0, i)];
                (eig.eigenvalues[i], mu0 * v0 * v0)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
            alpha,
            beta,
        })
    }

    pub fn legendre(n: usize) -> Self {
        Self::new(n, 0.0, 0.0).expect("Legendre rule is always valid")
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `∫_a^b (b-t)^α (t-a)^β f(t) dt`.
    pub fn integrate<V, F>(&self, a: f64, b: f64, mut f: F) -> Result<V>
    where
        V: QuadValue,
        F: FnMut(f64) -> Result<V>,
    {
        let half = 0.5 * (b - a);
        let scale = half.powf(1.0 + self.alpha + self.beta);
        let mut acc = V::default();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + f(a + half * (x + 1.0))? * *w;
        }
        Ok(acc * scale)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kronrod_polynomial_exact() {
        let est = gauss_kronrod_15(&mut |x: f64| Ok(x.powi(10)), -1.0, 2.0).unwrap();
        assert_relative_eq!(est.value, (2f64.powi(11) + 1.0) / 11.0, max_relative = 1e-13);
    }

    #[test]
    fn adaptive_handles_peaks() {
        let y = 1e-4;
        let mut f = |t: f64| Ok(y / (t * t + y * y) / std::f64::consts::PI);
        let est = Adaptive::default().integrate(&mut f, &[-1.0, 1.0]).unwrap();
        let exact = 2.0 * (1.0 / y).atan() / std::f64::consts::PI;
        assert_relative_eq!(est.value, exact, max_relative = 1e-9);
    }

    #[test]
    fn complex_integrand() {
        let mut f = |t: f64| Ok(Complex64::new(0.0, t).exp());
        let est = Adaptive::default().integrate(&mut f, &[0.0, std::f64::consts::PI]).unwrap();
        assert!((est.value - Complex64::new(0.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn jacobi_moments() {
        // ∫_{-1}^{1} (1+x)^{-1/2} dx = 2√2, ∫ x (1+x)^{-1/2} = 2√2 - 8√2/3.
        let gj = GaussJacobi::new(12, 0.0, -0.5).unwrap();
        let m0: f64 = gj.weights().iter().sum();
        assert_relative_eq!(m0, 2.0 * 2f64.sqrt(), max_relative = 1e-13);
        let m1: f64 = gj.nodes().iter().zip(gj.weights()).map(|(x, w)| x * w).sum();
        assert_relative_eq!(m1, 2.0 * 2f64.sqrt() - 8.0 * 2f64.sqrt() / 3.0, max_relative = 1e-12);
    }

    #[test]
    fn jacobi_on_interval() {
        // ∫_0^2 t^{-1/3} cos t dt against a fine Kronrod reference after t = s^3.
        let gj = GaussJacobi::new(20, 0.0, -1.0 / 3.0).unwrap();
        let v: f64 = gj.integrate(0.0, 2.0, |t| Ok(t.cos())).unwrap();
        let s_max = 2f64.powf(1.0 / 3.0);
        let mut g = |s: f64| Ok(3.0 * s * (s * s * s).cos());
        let reference = Adaptive::default().integrate(&mut g, &[0.0, s_max]).unwrap().value;
        assert_relative_eq!(v, reference, max_relative = 1e-12);
    }

    #[test]
    fn legendre_rejects_bad_exponent() {
        assert!(GaussJacobi::new(4, -1.0, 0.0).is_err());
    }
}
