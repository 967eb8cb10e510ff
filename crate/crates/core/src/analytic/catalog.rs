use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{construct_extension, AnalyticFn, Classification};
use crate::weights::SampledWeight;
use crate::{Error, Result};

/// Closed-form function description, as in a function catalog file:
/// `"exp_iz"`, `{"power": {"a": 0.5}}`, `{"moebius_pole": {"m": 2}}`,
/// `{"outer_of": "sqrt"}`, `{"product": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionSpec {
    ExpIz,
    One,
    Power { a: f64 },
    MoebiusPole { m: f64 },
    /// `(a z + b)^e` with `b = b_re + i b_im`.
    Affine { a: f64, b_re: f64, b_im: f64, e: f64 },
    /// Outer extension of the weight with this label.
    OuterOf(String),
    Product(Vec<FunctionSpec>),
    Pow { base: Box<FunctionSpec>, exponent: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionEntry {
    pub name: String,
    pub function: FunctionSpec,
    /// Human-readable closed-form oracle.
    #[serde(default)]
    pub oracle: String,
    /// Expected Smirnov classification, when known in closed form.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<Classification>,
    /// Included in the norm-equivalence and transfer panels.
    #[serde(default)]
    pub panel: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FunctionCatalog {
    pub functions: Vec<FunctionEntry>,
}

impl FunctionSpec {
    /// Builds the function; `weight` resolves labels used by `outer_of`.
    pub fn build(&self, weight: &dyn Fn(&str) -> Result<SampledWeight>) -> Result<AnalyticFn> {
        Ok(match self {
            FunctionSpec::ExpIz => AnalyticFn::exp_iz(),
            FunctionSpec::One => AnalyticFn::one(),
            FunctionSpec::Power { a } => AnalyticFn::power(*a)?,
            FunctionSpec::MoebiusPole { m } => AnalyticFn::moebius_pole(*m)?,
            FunctionSpec::Affine { a, b_re, b_im, e } => AnalyticFn::affine_power(*a, Complex64::new(*b_re, *b_im), *e)?,
            FunctionSpec::OuterOf(label) => construct_extension(&weight(label)?)?,
            FunctionSpec::Product(parts) => {
                let mut acc = AnalyticFn::one();
                let mut labels = Vec::new();
                for p in parts {
                    let f = p.build(weight)?;
                    labels.push(f.label().to_string());
                    acc = acc.mul(&f);
                }
                acc.with_label(labels.join("*"))
            }
            FunctionSpec::Pow { base, exponent } => base.build(weight)?.powf(*exponent),
        })
    }
}

impl FunctionCatalog {
    pub fn get(&self, name: &str) -> Result<&FunctionEntry> {
        self.functions.iter().find(|e| e.name == name).ok_or_else(|| Error::Input(format!("unknown function '{name}'")))
    }
}
