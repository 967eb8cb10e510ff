//! Integration over subsets of the real line with declared structure.
//!
//! A [`LinePlan`] names the points where an integrand is singular (with the
//! local power exponent) and the points where it varies on a given length
//! scale. The core interval is partitioned geometrically around both kinds of
//! points; semi-infinite pieces are covered by doubling panels with a
//! geometric-series remainder.

use super::quadrature::{Adaptive, Estimate, QuadValue};
use crate::{Error, Result};

/// `|f(t)| ≈ C |t - at|^exponent` near `at`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Singularity {
    pub at: f64,
    pub exponent: f64,
}

/// The integrand varies on length scale `scale` around `at`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Focus {
    pub at: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinePlan {
    pub lo: f64,
    pub hi: f64,
    pub singulars: Vec<Singularity>,
    pub foci: Vec<Focus>,
    pub breakpoints: Vec<f64>,
    /// Lower bound for the half-width of the finite core when an end is infinite.
    pub core_radius: f64,
}

impl LinePlan {
    pub fn whole_line(core_radius: f64) -> Self {
        Self::interval(f64::NEG_INFINITY, f64::INFINITY, core_radius)
    }

    pub fn interval(lo: f64, hi: f64, core_radius: f64) -> Self {
        Self { lo, hi, singulars: Vec::new(), foci: Vec::new(), breakpoints: Vec::new(), core_radius }
    }

    pub fn with_singulars(mut self, s: impl IntoIterator<Item = Singularity>) -> Self {
        self.singulars.extend(s);
        self
    }

    pub fn with_foci(mut self, f: impl IntoIterator<Item = Focus>) -> Self {
        self.foci.extend(f);
        self
    }

    pub fn with_breakpoints(mut self, b: impl IntoIterator<Item = f64>) -> Self {
        self.breakpoints.extend(b);
        self
    }
}

const GRADING_DEPTH: i32 = 48;
const MAX_TAIL_PANELS: usize = 90;

struct Graded {
    at: f64,
    exponent: f64,
    innermost: f64,
}

fn finite_core(plan: &LinePlan) -> (f64, f64) {
    let mut reach = plan.core_radius.max(1.0);
    for s in &plan.singulars {
        reach = reach.max(2.0 * s.at.abs() + 1.0);
    }
    for f in &plan.foci {
        reach = reach.max(2.0 * (f.at.abs() + 4.0 * f.scale) + 1.0);
    }
    for b in &plan.breakpoints {
        if b.is_finite() {
            reach = reach.max(2.0 * b.abs() + 1.0);
        }
    }
    let a = if plan.lo.is_finite() {
        plan.lo
    } else if plan.hi.is_finite() {
        -reach.max(2.0 * plan.hi.abs() + 1.0)
    } else {
        -reach
    };
    let b = if plan.hi.is_finite() {
        plan.hi
    } else if plan.lo.is_finite() {
        reach.max(2.0 * plan.lo.abs() + 1.0)
    } else {
        reach
    };
    (a, b)
}

/// Integrates `f` according to `plan`. Non-integrable declared singularities
/// and non-decaying tails are reported as [`Error::Divergent`].
pub fn integrate_line<V, F>(quad: &Adaptive, plan: &LinePlan, mut f: F) -> Result<Estimate<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> Result<V>,
{
    if plan.lo.is_nan() || plan.hi.is_nan() || !(plan.hi > plan.lo) {
        return Err(Error::Argument(format!("empty integration range [{}, {}]", plan.lo, plan.hi)));
    }
    let (a, b) = finite_core(plan);
    let mut pts = vec![a, b];
    for &p in &plan.breakpoints {
        if p > a && p < b {
            pts.push(p);
        }
    }
    for foc in &plan.foci {
        if !(foc.scale > 0.0) {
            continue;
        }
        if foc.at > a && foc.at < b {
            pts.push(foc.at);
        }
        for j in -2..=80 {
            let d = foc.scale * 2f64.powi(j);
            let (l, r) = (foc.at - d, foc.at + d);
            let mut inside = false;
            if l > a && l < b {
                pts.push(l);
                inside = true;
            }
            if r > a && r < b {
                pts.push(r);
                inside = true;
            }
            if !inside && l <= a && r >= b {
                break;
            }
        }
    }
    let mut graded = Vec::new();
    for s in &plan.singulars {
        if s.at < a || s.at > b {
            continue;
        }
        let reach = s.at.abs().max(1.0);
        let innermost = (reach * 2f64.powi(-GRADING_DEPTH)).max(8.0 * f64::EPSILON * s.at.abs());
        if s.at > a && s.at < b {
            pts.push(s.at);
        }
        let mut d = reach;
        while d >= innermost * 0.999 {
            for p in [s.at - d, s.at + d] {
                if p > a && p < b {
                    pts.push(p);
                }
            }
            d *= 0.5;
        }
        graded.push(Graded { at: s.at, exponent: s.exponent, innermost: d * 2.0 });
    }
    pts.sort_by(|x, y| x.total_cmp(y));
    // Near-duplicates collapse onto a singular point if one is involved, so
    // no panel straddles it.
    pts.dedup_by(|later, earlier| {
        let close = (*later - *earlier) <= 2.0 * f64::EPSILON * later.abs().max(earlier.abs());
        if close && graded.iter().any(|g| g.at == *later) {
            *earlier = *later;
        }
        close
    });

    let mut analytic = Estimate::<V>::default();
    let mut panels: Vec<f64> = Vec::with_capacity(pts.len());
    let mut regular: Vec<(f64, f64)> = Vec::new();
    for w in pts.windows(2) {
        let (l, r) = (w[0], w[1]);
        let width = r - l;
        let touching = graded.iter().find(|g| (g.at == l || g.at == r) && width <= 1.01 * g.innermost);
        match touching {
            Some(g) => {
                if g.exponent <= -1.0 {
                    return Err(Error::Divergent { at: g.at, reason: format!("local exponent {} <= -1", g.exponent) });
                }
                let far = if g.at == l { r } else { l };
                let v = f(far)? * (width / (g.exponent + 1.0));
                analytic.value = analytic.value + v;
                analytic.error += 1e-8 * v.magnitude();
                analytic.evaluations += 1;
            }
            None => regular.push((l, r)),
        }
    }
    // Contiguous runs of regular panels become one adaptive call each.
    let mut total = analytic;
    let mut run_start = 0;
    while run_start < regular.len() {
        panels.clear();
        panels.push(regular[run_start].0);
        let mut k = run_start;
        while k < regular.len() && (k == run_start || regular[k].0 == regular[k - 1].1) {
            panels.push(regular[k].1);
            k += 1;
        }
        total = total + quad.integrate(&mut f, &panels)?;
        run_start = k;
    }
    let scale = total.value.magnitude();
    if plan.hi == f64::INFINITY {
        total = total + tail(quad, &mut f, b, 1.0, scale)?;
    }
    if plan.lo == f64::NEG_INFINITY {
        total = total + tail(quad, &mut f, -a, -1.0, scale)?;
    }
    Ok(total)
}

fn tail<V, F>(quad: &Adaptive, f: &mut F, start: f64, direction: f64, scale: f64) -> Result<Estimate<V>>
where
    V: QuadValue,
    F: FnMut(f64) -> Result<V>,
{
    debug_assert!(start > 0.0);
    // Panels far out only need accuracy relative to the core integral.
    let quad = &Adaptive { abs_tol: quad.abs_tol.max(1e-2 * quad.rel_tol * scale), ..*quad };
    let mut total = Estimate::<V>::default();
    let mut mags: Vec<f64> = Vec::new();
    let mut last = V::default();
    for j in 0..MAX_TAIL_PANELS {
        let lo = start * 2f64.powi(j as i32);
        let hi = 2.0 * lo;
        let bounds = if direction > 0.0 { [lo, hi] } else { [-hi, -lo] };
        let est = quad.integrate(f, &bounds)?;
        total = total + est;
        last = est.value;
        let mag = est.value.magnitude();
        mags.push(mag);
        let n = mags.len();
        if n >= 3 && mags[n - 1] == 0.0 && mags[n - 2] == 0.0 {
            return Ok(total);
        }
        if n >= 4 {
            let ratios: Vec<f64> = (n - 3..n).map(|i| mags[i] / mags[i - 1]).collect();
            let q = ratios[2];
            let spread = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - ratios.iter().cloned().fold(f64::INFINITY, f64::min);
            if q.is_finite() && q < 0.9 && spread < 0.05 {
                let rem = mag * q / (1.0 - q);
                let target = quad.abs_tol.max(quad.rel_tol * (scale + total.value.magnitude()));
                if rem * (4.0 * spread + 1e-3) <= target {
                    total.value = total.value + last * (q / (1.0 - q));
                    total.error += rem * (4.0 * spread + 1e-3);
                    return Ok(total);
                }
            }
        }
        if n >= 12 {
            let growing = (n - 6..n).all(|i| mags[i] >= 0.985 * mags[i - 1] && mags[i] > 0.0);
            if growing {
                return Err(Error::Divergent { at: direction * hi, reason: "tail does not decay".into() });
            }
        }
    }
    let n = mags.len();
    let q = (mags[n - 1] / mags[n - 2]).min(mags[n - 2] / mags[n - 3]);
    if !(q < 0.985) {
        return Err(Error::Divergent { at: direction * start * 2f64.powi(MAX_TAIL_PANELS as i32), reason: "tail does not decay".into() });
    }
    total.value = total.value + last * (q / (1.0 - q));
    total.error += mags[n - 1] * q / (1.0 - q);
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn endpoint_power_singularity() {
        let plan = LinePlan::interval(0.0, 1.0, 1.0).with_singulars([Singularity { at: 0.0, exponent: -0.9 }]);
        let est = integrate_line(&Adaptive::default(), &plan, |t: f64| Ok(t.powf(-0.9))).unwrap();
        assert_relative_eq!(est.value, 10.0, max_relative = 1e-8);
    }

    #[test]
    fn interior_singularity_two_sided() {
        let plan = LinePlan::interval(-1.0, 2.0, 1.0).with_singulars([Singularity { at: 0.5, exponent: -0.5 }]);
        let est = integrate_line(&Adaptive::default(), &plan, |t: f64| Ok((t - 0.5).abs().powf(-0.5))).unwrap();
        let exact = 2.0 * (1.5f64.sqrt() + 1.5f64.sqrt());
        assert_relative_eq!(est.value, exact, max_relative = 1e-8);
    }

    #[test]
    fn divergent_singularity_flagged() {
        let plan = LinePlan::interval(0.0, 1.0, 1.0).with_singulars([Singularity { at: 0.0, exponent: -1.0 }]);
        let r = integrate_line(&Adaptive::default(), &plan, |t: f64| Ok(1.0 / t));
        assert!(matches!(r, Err(Error::Divergent { .. })));
    }

    #[test]
    fn whole_line_lorentzian() {
        let y = 1e-3;
        let plan = LinePlan::whole_line(10.0).with_foci([Focus { at: 3.0, scale: y }]);
        let est = integrate_line(&Adaptive::default(), &plan, |t: f64| Ok(y / PI / ((t - 3.0).powi(2) + y * y))).unwrap();
        assert_relative_eq!(est.value, 1.0, max_relative = 1e-8);
    }

    #[test]
    fn slowly_decaying_tail_diverges() {
        let plan = LinePlan::interval(1.0, f64::INFINITY, 10.0);
        let r = integrate_line(&Adaptive::default(), &plan, |t: f64| Ok(1.0 / t));
        assert!(matches!(r, Err(Error::Divergent { .. })), "{r:?}");
        let plan = LinePlan::interval(1.0, f64::INFINITY, 10.0);
        let est = integrate_line(&Adaptive::default(), &plan, |t: f64| Ok(t.powf(-1.5))).unwrap();
        assert_relative_eq!(est.value, 2.0, max_relative = 1e-6);
    }
}
