use std::collections::HashMap;
use std::sync::Mutex;

use num_complex::Complex64;

use super::AnalyticFn;
use crate::numerics::quadrature::Adaptive;
use crate::numerics::{harmonic_extension_with, BoundaryFn, HalfPlanePoint};
use crate::weights::{a_infty_probe_with, ApReport, IntervalFamily, SampledWeight};
use crate::{Error, Result};

const CACHE_LIMIT: usize = 1 << 20;

/// `(P_y + iQ_y) ∗ log w`, memoized per point.
pub(crate) struct Outer {
    weight: SampledWeight,
    logw: BoundaryFn,
    quad: Adaptive,
    cache: Mutex<HashMap<(u64, u64), Complex64>>,
}

impl Outer {
    pub(crate) fn new(weight: SampledWeight) -> Self {
        let logw = weight.log_fn();
        Self { weight, logw, quad: Adaptive::new(1e-10, 1e-12), cache: Mutex::new(HashMap::new()) }
    }

    pub(crate) fn weight(&self) -> &SampledWeight {
        &self.weight
    }

    pub(crate) fn logw(&self) -> &BoundaryFn {
        &self.logw
    }

    pub(crate) fn log_eval(&self, z: Complex64) -> Result<Complex64> {
        let key = (z.re.to_bits(), z.im.to_bits());
        if let Some(v) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(*v);
        }
        let p = HalfPlanePoint::try_from(z)?;
        let v = harmonic_extension_with(&self.quad, &self.logw, p)?.value;
        let mut cache = self.cache.lock().expect("cache lock");
        if cache.len() >= CACHE_LIMIT {
            cache.clear();
        }
        cache.insert(key, v);
        Ok(v)
    }
}

/// `H(z) = exp((P_y + iQ_y) ∗ log w)`, refused unless `w ∈ A_∞` by the probe.
pub fn construct_extension(w: &SampledWeight) -> Result<AnalyticFn> {
    let probe = a_infty_probe_with(w, &IntervalFamily::coarse())?;
    construct_extension_with(w, &probe)
}

/// As [`construct_extension`] with an existing probe report for `w`.
pub fn construct_extension_with(w: &SampledWeight, probe: &ApReport) -> Result<AnalyticFn> {
    if probe.label != w.label() {
        return Err(Error::Argument(format!("probe is for '{}', weight is '{}'", probe.label, w.label())));
    }
    if !probe.a_infty_established() {
        return Err(Error::Precondition(format!("A_∞ not established for {}", w.label())));
    }
    let outer = Outer::new(w.clone());
    outer.logw().check_poisson_integrable()?;
    Ok(AnalyticFn::from_outer(outer, w.clone()))
}
