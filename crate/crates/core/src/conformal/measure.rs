use std::fmt;
use std::sync::Arc;

use super::ConformalMap;
use crate::numerics::quadrature::Adaptive;
use crate::numerics::{default_grid, integrate_line, LinePlan, Singularity};
use crate::weights::{SampledWeight, TailModel, TailSide};
use crate::Result;

type LogDensity = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A density `dν/ds` on `Λ`, written as a function of the abscissa `ξ`.
#[derive(Clone)]
pub struct ArcWeight {
    label: String,
    log_density: LogDensity,
    /// Points `ξ` where `dν/ds ≈ C|ξ - at|^exponent`.
    singulars: Vec<Singularity>,
    /// Power exponents of the density as `ξ → -∞` and `ξ → +∞`.
    tail_exponents: [f64; 2],
    /// `Some(c)` when `ln(dν/ds) ≡ c`.
    uniform: Option<f64>,
}

impl fmt::Debug for ArcWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ArcWeight").field("label", &self.label).field("singulars", &self.singulars).field("tails", &self.tail_exponents).finish()
    }
}

impl ArcWeight {
    pub fn from_log_fn(
        label: impl Into<String>,
        log_density: impl Fn(f64) -> f64 + Send + Sync + 'static,
        singulars: Vec<Singularity>,
        tail_exponents: [f64; 2],
    ) -> Self {
        Self { label: label.into(), log_density: Arc::new(log_density), singulars, tail_exponents, uniform: None }
    }

    /// `ds` itself.
    pub fn arc_length() -> Self {
        Self { uniform: Some(0.0), ..Self::from_log_fn("ds", |_| 0.0, Vec::new(), [0.0, 0.0]) }
    }

    /// `|ξ - c|^a ds`.
    pub fn power_about(c: f64, a: f64) -> Self {
        let label = if c == 0.0 { format!("|xi|^{a} ds") } else { format!("|xi-{c}|^{a} ds") };
        Self::from_log_fn(label, move |xi| a * (xi - c).abs().ln(), vec![Singularity { at: c, exponent: a }], [a, a])
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn singulars(&self) -> &[Singularity] {
        &self.singulars
    }

    pub fn tail_exponents(&self) -> [f64; 2] {
        self.tail_exponents
    }

    pub fn log_eval(&self, xi: f64) -> f64 {
        (self.log_density)(xi)
    }

    /// `|(Φ^{-1})'|^p dν`, that is the density divided by `|Φ'|^p` at the
    /// boundary preimage.
    pub fn times_inverse_derivative(&self, map: &ConformalMap, p: f64) -> Result<ArcWeight> {
        let vx: Vec<f64> = map.boundary().vertices().iter().map(|v| v.0).collect();
        let mut singulars: Vec<Singularity> = self.singulars.iter().filter(|s| !vx.contains(&s.at)).copied().collect();
        for (k, al) in map.angle_ratios().iter().enumerate() {
            let e = self.singulars.iter().find(|s| s.at == vx[k]).map_or(0.0, |s| s.exponent);
            // |ξ - ξ_k| ~ |x - a_k|^α and |Φ'| ~ |x - a_k|^{α-1}.
            let exponent = e - p * (al - 1.0) / al;
            if exponent != 0.0 {
                singulars.push(Singularity { at: vx[k], exponent });
            }
        }
        let beta = map.exponent_sum();
        let tails = self.tail_exponents.map(|e| e - p * beta / (1.0 + beta));
        let inner = self.clone();
        let m = map.clone();
        Ok(Self::from_log_fn(
            format!("|(Phi^-1)'|^{p} {}", self.label),
            move |xi| match m.boundary_preimage(xi) {
                Ok(x) => inner.log_eval(xi) - p * m.log_phi_prime(num_complex::Complex64::new(x, 0.0)).re,
                Err(_) => f64::NAN,
            },
            singulars,
            tails,
        ))
    }
}

/// `ν(J)` for the arc of `Λ` above `[xi1, xi2]`.
pub fn arc_mass(map: &ConformalMap, nu: &ArcWeight, xi1: f64, xi2: f64) -> Result<f64> {
    let b = map.boundary();
    let mut plan = LinePlan::interval(xi1, xi2, 1.0).with_singulars(nu.singulars().iter().copied());
    plan = plan.with_breakpoints(b.vertices().iter().map(|v| v.0));
    Ok(integrate_line(&Adaptive::new(1e-11, 1e-15), &plan, |xi| Ok((nu.log_eval(xi)).exp() * b.arc_factor(xi)))?.value)
}

/// `Φ(ν)` with density `(dν/ds)(Φ(x))·|Φ'(x)|` against `dx`.
pub fn pushforward(map: &ConformalMap, nu: &ArcWeight) -> Result<SampledWeight> {
    let grid = default_grid();
    let r = grid.core_radius();
    let vx: Vec<f64> = map.boundary().vertices().iter().map(|v| v.0).collect();
    let mut singulars = Vec::new();
    for (k, (a, al)) in map.prevertices().iter().zip(map.angle_ratios()).enumerate() {
        let e = nu.singulars().iter().find(|s| s.at == vx[k]).map_or(0.0, |s| s.exponent);
        let exponent = al * e + al - 1.0;
        if exponent != 0.0 {
            singulars.push(Singularity { at: *a, exponent });
        }
    }
    for s in nu.singulars() {
        if !vx.contains(&s.at) && s.exponent != 0.0 {
            singulars.push(Singularity { at: map.boundary_preimage(s.at)?, exponent: s.exponent });
        }
    }
    let m = map.clone();
    let n = nu.clone();
    let uniform = nu.uniform;
    let log_w = move |x: f64| -> f64 {
        if let Some(c) = uniform {
            return c + m.log_phi_prime(num_complex::Complex64::new(x, 0.0)).re;
        }
        let xi = match m.boundary_point(x) {
            Ok(p) => p.re,
            Err(_) => return f64::NAN,
        };
        n.log_eval(xi) + m.log_phi_prime(num_complex::Complex64::new(x, 0.0)).re
    };
    let beta = map.exponent_sum();
    let [tl, tr] = nu.tail_exponents();
    let tail = TailModel {
        minus: TailSide::matching(tl * (1.0 + beta) + beta, log_w(-r), r),
        plus: TailSide::matching(tr * (1.0 + beta) + beta, log_w(r), r),
    };
    SampledWeight::from_log_fn(grid, format!("Phi({})", nu.label()), log_w, singulars, tail)
}
