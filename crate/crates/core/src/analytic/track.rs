//! Continuous logarithm of a closure by tracking its argument.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::{Error, Result};

/// Largest accepted argument change between neighbouring samples.
const MAX_STEP_ARG: f64 = PI / 4.0;
const MAX_HALVINGS: u32 = 30;

fn nonzero(f: &dyn Fn(Complex64) -> Result<Complex64>, z: Complex64) -> Result<Complex64> {
    let v = f(z)?;
    if v.norm() == 0.0 || !v.is_finite() {
        return Err(Error::NonFinite { at: z.re });
    }
    Ok(v)
}

/// Follows `arg f` along the segment `from → to`, starting from `log_from`.
fn follow(f: &dyn Fn(Complex64) -> Result<Complex64>, from: Complex64, to: Complex64, log_from: Complex64) -> Result<Complex64> {
    let len = (to - from).norm();
    if len == 0.0 {
        return Ok(log_from);
    }
    let mut t = 0.0;
    let mut h = (0.25 / len).min(1.0);
    let mut im = log_from.im;
    let mut halvings = 0;
    while t < 1.0 {
        let step = h.min(1.0 - t);
        let z = from + (to - from) * (t + step);
        let v = nonzero(f, z)?;
        let arg = v.arg();
        let k = ((im - arg) / (2.0 * PI)).round();
        let cont = arg + 2.0 * PI * k;
        if (cont - im).abs() > MAX_STEP_ARG {
            halvings += 1;
            if halvings > MAX_HALVINGS {
                return Err(Error::BranchTracking { from: format!("{from}"), to: format!("{z}") });
            }
            h *= 0.5;
            continue;
        }
        halvings = 0;
        im = cont;
        t += step;
        h = (h * 1.5).min(1.0);
        if t >= 1.0 {
            return Ok(Complex64::new(v.norm().ln(), im));
        }
    }
    Ok(Complex64::new(nonzero(f, to)?.norm().ln(), im))
}

/// `log f(z)` continuous along `i → Re z + i → z`, principal at `i`.
pub(crate) fn tracked_log(f: &dyn Fn(Complex64) -> Result<Complex64>, z: Complex64) -> Result<Complex64> {
    let base = Complex64::i();
    let l0 = nonzero(f, base)?.ln();
    let corner = Complex64::new(z.re, 1.0);
    let l1 = follow(f, base, corner, l0)?;
    follow(f, corner, z, l1)
}
