//! Nonvanishing analytic functions on the upper half-plane.
//!
//! An [`AnalyticFn`] is stored through a continuous logarithm
//! `log F = c + Σ α_k log T_k`, so powers, products and quotients are exact
//! and never need a branch decision. Terms are affine factors `(az+b)`,
//! exponentials `e^{cz}`, outer extensions of weights, and user closures.

mod catalog;
mod outer;
mod smirnov;
mod track;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::numerics::{BoundaryFn, FnTail, HalfPlanePoint, RealGrid, Singularity};
use crate::weights::{SampledWeight, TailModel, TailSide};
use crate::{Error, Result};

pub use catalog::{FunctionCatalog, FunctionEntry, FunctionSpec};
pub use outer::{construct_extension, construct_extension_with};
pub use smirnov::{
    ae_membership, ae_membership_with, ae_pair_membership, ae_pair_membership_with, nt_trace, smirnov_defect, smirnov_defect_with, AeReport, Classification, Lattice,
    SmirnovReport, TraceValue,
};

/// Closure returning a value or a logarithm at a point of the half-plane.
pub type ComplexMap = Arc<dyn Fn(Complex64) -> Result<Complex64> + Send + Sync>;

#[derive(Clone)]
enum Term {
    /// `log(a z + b)`, `a` real nonzero, `a·Im b ≥ 0`: principal log is
    /// continuous because the image is an open half-plane.
    Affine { a: f64, b: Complex64 },
    /// `log e^{cz} = cz`.
    Exp { c: Complex64 },
    Outer(Arc<outer::Outer>),
    /// A closure that already returns a continuous logarithm.
    Log { f: ComplexMap, boundary: Option<Arc<BoundaryFn>>, exponents: Vec<Singularity> },
    /// A closure returning values; the logarithm is tracked along a path from `i`.
    Tracked(ComplexMap),
}

impl Term {
    fn log_eval(&self, z: Complex64) -> Result<Complex64> {
        match self {
            Term::Affine { a, b } => Ok((z * *a + *b).ln()),
            Term::Exp { c } => Ok(*c * z),
            Term::Outer(o) => o.log_eval(z),
            Term::Log { f, .. } => f(z),
            Term::Tracked(f) => track::tracked_log(f.as_ref(), z),
        }
    }

    fn log_abs(&self, z: Complex64) -> Result<f64> {
        match self {
            Term::Affine { a, b } => Ok((z * *a + *b).norm().ln()),
            Term::Exp { c } => Ok((*c * z).re),
            Term::Outer(o) => Ok(o.log_eval(z)?.re),
            Term::Log { f, .. } => Ok(f(z)?.re),
            Term::Tracked(f) => {
                let v = f(z)?;
                if v.norm() == 0.0 || !v.is_finite() {
                    return Err(Error::NonFinite { at: z.re });
                }
                Ok(v.norm().ln())
            }
        }
    }

    fn hotspots(&self) -> Vec<f64> {
        match self {
            Term::Affine { a, b } if b.im == 0.0 => vec![-b.re / a],
            Term::Outer(o) => o.logw().singulars().iter().map(|s| s.at).collect(),
            Term::Log { exponents, .. } => exponents.iter().map(|s| s.at).collect(),
            _ => Vec::new(),
        }
    }
}

/// A nonvanishing analytic function on the upper half-plane.
#[derive(Clone)]
pub struct AnalyticFn {
    log_const: Complex64,
    terms: Vec<(f64, Term)>,
    boundary_modulus: Option<SampledWeight>,
    certificate: String,
    label: String,
}

impl fmt::Debug for AnalyticFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticFn")
            .field("label", &self.label)
            .field("terms", &self.terms.len())
            .field("certificate", &self.certificate)
            .field("declared_modulus", &self.boundary_modulus.as_ref().map(|w| w.label().to_string()))
            .finish()
    }
}

impl AnalyticFn {
    fn from_terms(label: String, certificate: &str, log_const: Complex64, terms: Vec<(f64, Term)>) -> Self {
        let mut f = Self { log_const, terms, boundary_modulus: None, certificate: certificate.into(), label };
        f.normalize_branch();
        f
    }

    /// Makes `Im log F(i)` lie in `(-π, π]`. Changes no value of `F`.
    fn normalize_branch(&mut self) {
        if let Ok(l) = self.log_eval_c(Complex64::i()) {
            let k = ((l.im + std::f64::consts::PI) / (2.0 * std::f64::consts::PI)).ceil() - 1.0;
            self.log_const.im -= 2.0 * std::f64::consts::PI * k;
        }
    }

    /// The constant `c ≠ 0`.
    pub fn constant(c: Complex64) -> Result<Self> {
        if c.norm() == 0.0 || !c.is_finite() {
            return Err(Error::Argument("constant must be nonzero and finite".into()));
        }
        Ok(Self::from_terms(format!("{c}"), "nonzero constant", c.ln(), Vec::new()))
    }

    pub fn one() -> Self {
        Self::from_terms("1".into(), "nonzero constant", Complex64::new(0.0, 0.0), Vec::new())
    }

    /// `(a z + b)^e` with `a` real nonzero and `a·Im b ≥ 0`.
    pub fn affine_power(a: f64, b: Complex64, e: f64) -> Result<Self> {
        if a == 0.0 || !a.is_finite() || !b.is_finite() || a * b.im < 0.0 || !e.is_finite() {
            return Err(Error::Argument(format!("affine factor ({a})z+({b}) must map the half-plane to a half-plane")));
        }
        Ok(Self::from_terms(format!("({a}z+{b})^{e}"), "affine factor nonvanishing on the open half-plane", Complex64::new(0.0, 0.0), vec![(e, Term::Affine { a, b })]))
    }

    /// `z^a`, principal branch.
    pub fn power(a: f64) -> Result<Self> {
        Ok(Self::affine_power(1.0, Complex64::new(0.0, 0.0), a)?.with_label(format!("z^{a}")))
    }

    /// `(z + i)^{-m}`.
    pub fn moebius_pole(m: f64) -> Result<Self> {
        Ok(Self::affine_power(1.0, Complex64::i(), -m)?.with_label(format!("(z+i)^-{m}")))
    }

    /// `e^{cz}`.
    pub fn exp_linear(c: Complex64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::Argument("exponent must be finite".into()));
        }
        Ok(Self::from_terms(format!("exp({c}z)"), "exponential never vanishes", Complex64::new(0.0, 0.0), vec![(1.0, Term::Exp { c })]))
    }

    /// `e^{iz}`, the singular inner witness.
    pub fn exp_iz() -> Self {
        Self::exp_linear(Complex64::i()).expect("finite").with_label("exp(iz)")
    }

    /// A function given by a continuous logarithm. `boundary_log`, when
    /// known, is `log|F|` on the real line.
    pub fn from_log_fn(
        label: impl Into<String>,
        certificate: impl Into<String>,
        log_f: impl Fn(Complex64) -> Result<Complex64> + Send + Sync + 'static,
        boundary_log: Option<BoundaryFn>,
    ) -> Self {
        Self::from_log_fn_marked(label, certificate, log_f, boundary_log, Vec::new())
    }

    /// As [`from_log_fn`](Self::from_log_fn), naming boundary points where
    /// `F` varies quickly (used for quadrature foci and trace start heights).
    pub fn from_log_fn_marked(
        label: impl Into<String>,
        certificate: impl Into<String>,
        log_f: impl Fn(Complex64) -> Result<Complex64> + Send + Sync + 'static,
        boundary_log: Option<BoundaryFn>,
        marks: Vec<f64>,
    ) -> Self {
        let exponents = marks.into_iter().map(|at| Singularity { at, exponent: 0.0 }).collect();
        let term = Term::Log { f: Arc::new(log_f), boundary: boundary_log.map(Arc::new), exponents };
        let mut f = Self::from_terms(label.into(), "", Complex64::new(0.0, 0.0), vec![(1.0, term)]);
        f.certificate = certificate.into();
        f
    }

    /// A function given by values; its logarithm is tracked by continuity
    /// along `i → Re z + i → z`.
    pub fn from_fn(label: impl Into<String>, f: impl Fn(Complex64) -> Result<Complex64> + Send + Sync + 'static) -> Self {
        Self::from_terms(label.into(), "checked on lattice", Complex64::new(0.0, 0.0), vec![(1.0, Term::Tracked(Arc::new(f)))])
    }

    pub(crate) fn from_outer(o: outer::Outer, w: SampledWeight) -> Self {
        let label = format!("outer({})", w.label());
        let mut f = Self::from_terms(label, "exponential of a harmonic extension", Complex64::new(0.0, 0.0), vec![(1.0, Term::Outer(Arc::new(o)))]);
        f.boundary_modulus = Some(w);
        f
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Declares `|F̃|`; see [`check_declared_modulus`](Self::check_declared_modulus).
    pub fn with_boundary_modulus(mut self, w: SampledWeight) -> Self {
        self.boundary_modulus = Some(w);
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn certificate(&self) -> &str {
        &self.certificate
    }

    pub fn boundary_modulus(&self) -> Option<&SampledWeight> {
        self.boundary_modulus.as_ref()
    }

    /// `F · u` for a constant `u`.
    pub fn scaled(&self, u: Complex64) -> Result<Self> {
        if u.norm() == 0.0 || !u.is_finite() {
            return Err(Error::Argument("scale must be nonzero".into()));
        }
        let mut f = self.clone();
        f.log_const += u.ln();
        f.normalize_branch();
        if let Some(w) = &self.boundary_modulus {
            let c = SampledWeight::constant(w.grid().clone(), u.norm())?;
            f.boundary_modulus = Some(SampledWeight::power_product(w, 1.0, &c, 1.0)?.with_label(w.label().to_string()));
        }
        Ok(f)
    }

    /// `F^a` on the continuous branch.
    pub fn powf(&self, a: f64) -> Self {
        combine(self, a, &Self::one(), 0.0).with_label(format!("({})^{a}", self.label))
    }

    pub fn mul(&self, other: &AnalyticFn) -> Self {
        combine(self, 1.0, other, 1.0)
    }

    pub fn div(&self, other: &AnalyticFn) -> Self {
        combine(self, 1.0, other, -1.0)
    }

    fn log_eval_c(&self, z: Complex64) -> Result<Complex64> {
        let mut acc = self.log_const;
        for (c, t) in &self.terms {
            if *c != 0.0 {
                acc += t.log_eval(z)? * *c;
            }
        }
        if !acc.is_finite() {
            return Err(Error::NonFinite { at: z.re });
        }
        Ok(acc)
    }

    /// The continuous logarithm.
    pub fn log_eval(&self, z: HalfPlanePoint) -> Result<Complex64> {
        self.log_eval_c(z.to_complex())
    }

    /// `log|F(z)|`, cheaper than [`log_eval`](Self::log_eval) for closures.
    pub fn log_abs(&self, z: HalfPlanePoint) -> Result<f64> {
        let z = z.to_complex();
        let mut acc = self.log_const.re;
        for (c, t) in &self.terms {
            if *c != 0.0 {
                acc += c * t.log_abs(z)?;
            }
        }
        if !acc.is_finite() {
            return Err(Error::NonFinite { at: z.re });
        }
        Ok(acc)
    }

    pub fn eval(&self, z: HalfPlanePoint) -> Result<Complex64> {
        let v = self.log_eval(z)?.exp();
        if v.norm() == 0.0 || !v.is_finite() {
            return Err(Error::NonFinite { at: z.x() });
        }
        Ok(v)
    }

    pub fn abs(&self, z: HalfPlanePoint) -> Result<f64> {
        Ok(self.log_abs(z)?.exp())
    }

    /// Boundary points near which `F` is singular or vanishes.
    pub fn hotspots(&self) -> Vec<f64> {
        let mut h: Vec<f64> = self.terms.iter().filter(|(c, _)| *c != 0.0).flat_map(|(_, t)| t.hotspots()).collect();
        if let Some(w) = &self.boundary_modulus {
            h.extend(w.singulars().iter().map(|s| s.at));
        }
        h.sort_by(|a, b| a.total_cmp(b));
        h.dedup();
        h
    }

    fn boundary_parts(&self) -> Option<Vec<BoundaryPart>> {
        let mut parts = Vec::new();
        for (c, t) in &self.terms {
            if *c == 0.0 {
                continue;
            }
            match t {
                Term::Affine { a, b } => {
                    let (a, b) = (*a, *b);
                    let tail = FnTail::log_power(a.abs().ln(), 1.0);
                    let singulars = if b.im == 0.0 { vec![Singularity { at: -b.re / a, exponent: 1.0 }] } else { Vec::new() };
                    parts.push(BoundaryPart { coeff: *c, eval: Arc::new(move |x| (b + a * x).norm().ln()), tails: [tail; 2], singulars, interpolated: false });
                }
                Term::Exp { c: e } => {
                    if e.re != 0.0 {
                        return None;
                    }
                }
                Term::Outer(o) => {
                    let lw = o.logw().clone();
                    parts.push(BoundaryPart {
                        coeff: *c,
                        tails: lw.tails(),
                        singulars: o.weight().singulars().to_vec(),
                        interpolated: lw.is_interpolated(),
                        eval: Arc::new(move |x| lw.eval(x)),
                    });
                }
                Term::Log { boundary: Some(b), exponents, .. } => {
                    let b = b.clone();
                    let mut singulars = exponents.clone();
                    for m in b.singulars() {
                        if !singulars.iter().any(|g| g.at == m.at) {
                            singulars.push(Singularity { at: m.at, exponent: 0.0 });
                        }
                    }
                    parts.push(BoundaryPart { coeff: *c, tails: b.tails(), singulars, interpolated: b.is_interpolated(), eval: Arc::new(move |x| b.eval(x)) });
                }
                Term::Log { boundary: None, .. } | Term::Tracked(_) => return None,
            }
        }
        Some(parts)
    }

    /// Sum of the parts: evaluator, log-power tails, weight singular
    /// exponents and whether any part is interpolated.
    #[allow(clippy::type_complexity)]
    fn boundary_sum(&self) -> Option<(Arc<dyn Fn(f64) -> f64 + Send + Sync>, [FnTail; 2], Vec<Singularity>, bool)> {
        let parts = self.boundary_parts()?;
        let offset = self.log_const.re;
        let mut tails = [FnTail::log_power(offset, 0.0); 2];
        let mut singulars: Vec<Singularity> = Vec::new();
        let mut interpolated = false;
        for part in &parts {
            for (tail, t) in tails.iter_mut().zip(part.tails) {
                if t.exponent != 0.0 && t.coeff != 0.0 {
                    return None;
                }
                tail.coeff += part.coeff * t.coeff;
                tail.log_slope += part.coeff * t.log_slope;
            }
            for g in &part.singulars {
                match singulars.iter_mut().find(|h| h.at == g.at) {
                    Some(h) => h.exponent += part.coeff * g.exponent,
                    None => singulars.push(Singularity { at: g.at, exponent: part.coeff * g.exponent }),
                }
            }
            interpolated |= part.interpolated;
        }
        let funcs: Vec<(f64, Arc<dyn Fn(f64) -> f64 + Send + Sync>)> = parts.into_iter().map(|p| (p.coeff, p.eval)).collect();
        let eval = Arc::new(move |x: f64| offset + funcs.iter().map(|(c, f)| c * f(x)).sum::<f64>());
        Some((eval, tails, singulars, interpolated))
    }

    /// `log|F̃|` on the real line from the closed form, when every term has one.
    pub fn closed_form_boundary_log(&self, grid: &Arc<RealGrid>) -> Option<BoundaryFn> {
        let (eval, tails, singulars, interpolated) = self.boundary_sum()?;
        let label = format!("log|{}|", self.label);
        if interpolated {
            let values = grid.nodes().iter().map(|&x| eval(x)).collect();
            return BoundaryFn::from_samples(grid.clone(), label, values, tails).ok();
        }
        let marks = singulars.iter().map(|g| Singularity { at: g.at, exponent: 0.0 }).collect();
        Some(BoundaryFn::exact(grid.clone(), label, move |x| eval(x), tails, marks))
    }

    /// `|F̃|` as a weight: the declared modulus, else the closed form.
    pub fn boundary_weight(&self, grid: &Arc<RealGrid>) -> Option<SampledWeight> {
        if let Some(w) = &self.boundary_modulus {
            return Some(w.clone());
        }
        let (eval, tails, singulars, interpolated) = self.boundary_sum()?;
        let side = |t: FnTail| TailSide { exponent: t.log_slope, log_coeff: t.coeff };
        let tail = TailModel { minus: side(tails[0]), plus: side(tails[1]) };
        let label = format!("|{}|", self.label);
        if interpolated {
            let values: Vec<f64> = grid.nodes().iter().map(|&x| eval(x).exp()).collect();
            return SampledWeight::from_samples(grid.clone(), label, &values, Some(tail)).ok();
        }
        let singulars = singulars.into_iter().filter(|g| g.exponent != 0.0).collect();
        SampledWeight::from_log_fn(grid.clone(), label, move |x| eval(x), singulars, tail).ok()
    }

    /// `z ↦ F(λz + β)` for `λ > 0` and real `β`.
    pub fn compose_affine(&self, lambda: f64, beta: f64) -> Result<AnalyticFn> {
        if !(lambda > 0.0) || !lambda.is_finite() || !beta.is_finite() {
            return Err(Error::Argument(format!("need λ > 0 and finite β, got ({lambda}, {beta})")));
        }
        let map = move |z: Complex64| z * lambda + beta;
        let mut log_const = self.log_const;
        let mut terms = Vec::with_capacity(self.terms.len());
        for (c, t) in &self.terms {
            let t2 = match t {
                Term::Affine { a, b } => Term::Affine { a: a * lambda, b: *b + a * beta },
                Term::Exp { c: e } => {
                    log_const += *e * beta * *c;
                    Term::Exp { c: *e * lambda }
                }
                Term::Outer(o) => {
                    let o = o.clone();
                    let lw = o.logw().clone();
                    let exps = o.weight().singulars().iter().map(|g| Singularity { at: (g.at - beta) / lambda, exponent: g.exponent }).collect();
                    Term::Log {
                        f: Arc::new(move |z| o.log_eval(map(z))),
                        boundary: Some(Arc::new(compose_boundary(&lw, lambda, beta))),
                        exponents: exps,
                    }
                }
                Term::Log { f, boundary, exponents } => {
                    let f = f.clone();
                    Term::Log {
                        f: Arc::new(move |z| f(map(z))),
                        boundary: boundary.as_ref().map(|b| Arc::new(compose_boundary(b, lambda, beta))),
                        exponents: exponents.iter().map(|g| Singularity { at: (g.at - beta) / lambda, exponent: g.exponent }).collect(),
                    }
                }
                Term::Tracked(f) => {
                    let f = f.clone();
                    Term::Tracked(Arc::new(move |z| f(map(z))))
                }
            };
            terms.push((*c, t2));
        }
        Ok(Self::from_terms(format!("{}({lambda}z+{beta})", self.label), &self.certificate, log_const, terms))
    }

    /// `|F(x + i y_min)|` against the declared modulus at the given points.
    /// Returns the largest relative error.
    pub fn check_declared_modulus(&self, xs: &[f64], y_min: f64) -> Result<f64> {
        let w = self.boundary_modulus.as_ref().ok_or_else(|| Error::Precondition("no declared boundary modulus".into()))?;
        let mut worst: f64 = 0.0;
        for &x in xs {
            let v = self.abs(HalfPlanePoint::new(x, y_min)?)?;
            worst = worst.max((v / w.eval(x) - 1.0).abs());
        }
        Ok(worst)
    }
}

struct BoundaryPart {
    coeff: f64,
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    tails: [FnTail; 2],
    /// Weight exponents per unit coefficient.
    singulars: Vec<Singularity>,
    interpolated: bool,
}

/// `t ↦ b(λt + β)` with tails and singularities moved accordingly.
fn compose_boundary(b: &BoundaryFn, lambda: f64, beta: f64) -> BoundaryFn {
    let inner = b.clone();
    let tails = b.tails().map(|t| FnTail {
        coeff: t.coeff * lambda.powf(t.exponent) + t.log_slope * lambda.ln(),
        exponent: t.exponent,
        log_slope: t.log_slope,
    });
    let singulars = b.singulars().iter().map(|g| Singularity { at: (g.at - beta) / lambda, exponent: g.exponent }).collect();
    BoundaryFn::exact(b.grid().clone(), format!("{}∘({lambda}t+{beta})", b.label()), move |t| inner.eval(lambda * t + beta), tails, singulars)
}

/// `F^{αF}·G^{αG}` through the continuous logarithms.
pub fn combine(f: &AnalyticFn, af: f64, g: &AnalyticFn, ag: f64) -> AnalyticFn {
    let mut terms: Vec<(f64, Term)> = Vec::with_capacity(f.terms.len() + g.terms.len());
    terms.extend(f.terms.iter().map(|(c, t)| (c * af, t.clone())));
    terms.extend(g.terms.iter().map(|(c, t)| (c * ag, t.clone())));
    terms.retain(|(c, _)| *c != 0.0);
    let log_const = f.log_const * af + g.log_const * ag;
    let label = match (af, ag) {
        (_, 0.0) => format!("({})^{af}", f.label),
        (0.0, _) => format!("({})^{ag}", g.label),
        _ => format!("({})^{af}*({})^{ag}", f.label, g.label),
    };
    let certificate = if af == 0.0 {
        g.certificate.clone()
    } else if ag == 0.0 {
        f.certificate.clone()
    } else {
        format!("product of: {}; {}", f.certificate, g.certificate)
    };
    let mut out = AnalyticFn::from_terms(label, &certificate, log_const, terms);
    out.boundary_modulus = match (&f.boundary_modulus, &g.boundary_modulus) {
        (Some(wf), Some(wg)) => SampledWeight::power_product(wf, af, wg, ag).ok(),
        (Some(wf), None) if ag == 0.0 => Some(wf.powf(af)),
        (None, Some(wg)) if af == 0.0 => Some(wg.powf(ag)),
        _ => None,
    };
    out
}
