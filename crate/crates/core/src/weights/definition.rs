use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{SampledWeight, TailModel, TailSide};
use crate::numerics::RealGrid;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    Power,
    Samples,
    Expression,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailSpec {
    pub a_minus: f64,
    pub a_plus: f64,
    pub c_minus: f64,
    pub c_plus: f64,
}

/// A weight definition file entry.
///
/// - `power`: `params = {"a": 0.5}` or `{"factors": [[c, a], ...]}`.
/// - `samples`: `params = {"x": [...], "w": [...]}`, interpolated in `ln w`.
/// - `expression`: `params = {"name": ...}` with one of `constant` (`c`),
///   `one_plus_square` (`a`), `exp_abs` (`kappa`), `two_plus_sin`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightDefinition {
    pub label: String,
    pub kind: WeightKind,
    #[serde(default)]
    pub params: BTreeMap<String, serde_json::Value>,
    #[serde(default)]
    pub tail: Option<TailSpec>,
}

impl WeightDefinition {
    fn num(&self, key: &str) -> Result<f64> {
        self.params
            .get(key)
            .and_then(|v| v.as_f64())
            .ok_or_else(|| Error::Input(format!("weight '{}': missing numeric param '{key}'", self.label)))
    }

    fn nums(&self, key: &str) -> Result<Vec<f64>> {
        let arr = self
            .params
            .get(key)
            .and_then(|v| v.as_array())
            .ok_or_else(|| Error::Input(format!("weight '{}': missing array param '{key}'", self.label)))?;
        arr.iter()
            .map(|v| v.as_f64().ok_or_else(|| Error::Input(format!("weight '{}': non-numeric entry in '{key}'", self.label))))
            .collect()
    }

    fn tail_model(&self) -> Result<Option<TailModel>> {
        self.tail
            .as_ref()
            .map(|t| Ok(TailModel { minus: TailSide::new(t.a_minus, t.c_minus)?, plus: TailSide::new(t.a_plus, t.c_plus)? }))
            .transpose()
    }

    pub fn build(&self, grid: Arc<RealGrid>) -> Result<SampledWeight> {
        let w = match self.kind {
            WeightKind::Power => {
                if let Some(f) = self.params.get("factors") {
                    let factors: Vec<(f64, f64)> = serde_json::from_value(f.clone())
                        .map_err(|e| Error::Input(format!("weight '{}': bad factors: {e}", self.label)))?;
                    SampledWeight::shifted_powers(grid, &factors)?
                } else {
                    SampledWeight::power(grid, self.num("a")?)?
                }
            }
            WeightKind::Expression => {
                let name = self.params.get("name").and_then(|v| v.as_str()).unwrap_or("");
                match name {
                    "constant" => SampledWeight::constant(grid, self.num("c")?)?,
                    "one_plus_square" => SampledWeight::one_plus_square(grid, self.num("a")?)?,
                    "exp_abs" => SampledWeight::exp_abs(grid, self.num("kappa")?)?,
                    "two_plus_sin" => SampledWeight::two_plus_sin(grid)?,
                    other => return Err(Error::Input(format!("weight '{}': unknown expression '{other}'", self.label))),
                }
            }
            WeightKind::Samples => {
                let xs = self.nums("x")?;
                let ws = self.nums("w")?;
                if xs.len() != ws.len() || xs.len() < 2 {
                    return Err(Error::Input(format!("weight '{}': x and w must have equal length ≥ 2", self.label)));
                }
                if xs.windows(2).any(|p| !(p[1] > p[0])) {
                    return Err(Error::Input(format!("weight '{}': x must be strictly increasing", self.label)));
                }
                if ws.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
                    return Err(Error::Input(format!("weight '{}': samples must be positive", self.label)));
                }
                let logs: Vec<f64> = ws.iter().map(|v| v.ln()).collect();
                let values: Vec<f64> = grid.nodes().iter().map(|&t| resample(&xs, &logs, t).exp()).collect();
                SampledWeight::from_samples(grid, self.label.clone(), &values, self.tail_model()?)
                    .map_err(|e| Error::Input(format!("weight '{}': {e}", self.label)))?
            }
        };
        Ok(w.with_label(self.label.clone()))
    }
}

/// Piecewise-linear in the data, constant beyond the sampled range.
fn resample(xs: &[f64], ys: &[f64], t: f64) -> f64 {
    let n = xs.len();
    if t <= xs[0] {
        return ys[0];
    }
    if t >= xs[n - 1] {
        return ys[n - 1];
    }
    let i = xs.partition_point(|x| *x <= t) - 1;
    let s = (t - xs[i]) / (xs[i + 1] - xs[i]);
    ys[i] + s * (ys[i + 1] - ys[i])
}
