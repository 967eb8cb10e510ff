use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::analytic::{AnalyticFn, Classification, FunctionCatalog, FunctionEntry, FunctionSpec};
use crate::conformal::PolylineBoundary;
use crate::numerics::{default_grid, RealGrid};
use crate::weights::{SampledWeight, WeightDefinition, WeightKind};
use crate::{Error, Result, Tolerances};

/// Named weights, functions and boundaries a suite runs over.
///
/// On disk an inputs directory may hold `weights.json` (a list of weight
/// definitions), `functions.json` (a function catalog), `boundaries/*.json`
/// (one boundary definition per file, named by its stem) and
/// `tolerances.json`. Missing pieces fall back to the built-in catalog.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Catalog {
    pub weights: Vec<WeightDefinition>,
    pub functions: FunctionCatalog,
    pub boundaries: BTreeMap<String, PolylineBoundary>,
}

/// One line of `describe`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CatalogEntry {
    pub kind: &'static str,
    pub name: String,
    pub definition: String,
    pub oracle: String,
}

fn weight(label: &str, kind: WeightKind, params: serde_json::Value) -> WeightDefinition {
    let params = match params {
        serde_json::Value::Object(m) => m.into_iter().collect(),
        _ => BTreeMap::new(),
    };
    WeightDefinition { label: label.into(), kind, params, tail: None }
}

fn function(name: &str, function: FunctionSpec, oracle: &str, expected: Classification, panel: bool) -> FunctionEntry {
    FunctionEntry { name: name.into(), function, oracle: oracle.into(), expected: Some(expected), panel }
}

fn product(parts: Vec<FunctionSpec>) -> FunctionSpec {
    FunctionSpec::Product(parts)
}

impl Default for Catalog {
    fn default() -> Self {
        use Classification::*;
        use FunctionSpec as S;
        let weights = vec![
            weight("one", WeightKind::Expression, json!({"name": "constant", "c": 1.0})),
            weight("sqrt", WeightKind::Power, json!({"a": 0.5})),
            weight("inv_sqrt", WeightKind::Power, json!({"a": -0.5})),
            weight("cube", WeightKind::Power, json!({"a": 3.0})),
            weight("inv", WeightKind::Power, json!({"a": -1.0})),
            weight("bump", WeightKind::Expression, json!({"name": "one_plus_square", "a": 0.5})),
            weight("dip", WeightKind::Expression, json!({"name": "one_plus_square", "a": -0.5})),
            weight("pair", WeightKind::Power, json!({"factors": [[1.0, 0.5], [-1.0, -0.25]]})),
        ];
        let pole = |m: f64| S::MoebiusPole { m };
        let functions = vec![
            function("one", S::One, "F = 1, defect 0", Smirnov, false),
            function("exp_iz", S::ExpIz, "|F*| = 1, defect(x+iy) = -y", NotSmirnov, false),
            function("sqrt_z", S::Power { a: 0.5 }, "z^(1/2), witness m = s = 2, q = 1", Smirnov, false),
            function("pole1", pole(1.0), "(z+i)^-1, H^p for p > 1 only", Smirnov, true),
            function("pole2", pole(2.0), "(z+i)^-2, H^1 norm pi", Smirnov, true),
            function("pole3", pole(3.0), "(z+i)^-3, H^1 norm 3 pi / 4", Smirnov, true),
            function("inv_sqrt_pole2", product(vec![S::Power { a: -0.5 }, pole(2.0)]), "z^(-1/2) (z+i)^-2", Smirnov, true),
            function("exp_pole2", product(vec![S::ExpIz, pole(2.0)]), "e^(iz) (z+i)^-2, singular inner factor", NotSmirnov, true),
            function("blowup", product(vec![S::Power { a: -1.5 }, pole(1.0)]), "z^(-3/2) (z+i)^-1, not locally integrable at 0", Smirnov, true),
            function("outer_sqrt", S::OuterOf("sqrt".into()), "outer extension with |F*| = |x|^(1/2)", Smirnov, false),
        ];
        let mut boundaries = BTreeMap::new();
        for (name, m) in [("wedge_half", 0.5), ("wedge_one", 1.0), ("wedge_sqrt3", 3f64.sqrt())] {
            boundaries.insert(name.to_string(), PolylineBoundary::wedge(m).expect("valid slope"));
        }
        boundaries.insert("step".into(), PolylineBoundary::new(vec![(0.0, 0.0), (1.0, 0.5)], 0.0, 0.0).expect("valid step"));
        boundaries.insert("concave".into(), PolylineBoundary::new(vec![(0.0, 0.0)], 1.0, -1.0).expect("valid corner"));
        Self { weights, functions: FunctionCatalog { functions }, boundaries }
    }
}

fn parse_file<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Input(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column())))
}

impl Catalog {
    /// An empty catalog.
    pub fn empty() -> Self {
        Self { weights: Vec::new(), functions: FunctionCatalog::default(), boundaries: BTreeMap::new() }
    }

    /// Reads an inputs directory. With `fallback`, absent files are filled
    /// from the built-in catalog; otherwise they stay empty.
    pub fn load(dir: &Path, fallback: bool) -> Result<Self> {
        if !dir.is_dir() {
            return Err(Error::Input(format!("{}: not a directory", dir.display())));
        }
        let base = if fallback { Self::default() } else { Self::empty() };
        let weights_path = dir.join("weights.json");
        let weights = if weights_path.exists() { parse_file(&weights_path)? } else { base.weights };
        let functions_path = dir.join("functions.json");
        let functions = if functions_path.exists() { parse_file(&functions_path)? } else { base.functions };
        let bdir = dir.join("boundaries");
        let boundaries = if bdir.is_dir() {
            let mut paths: Vec<_> = fs::read_dir(&bdir)
                .map_err(|e| Error::Input(format!("{}: {e}", bdir.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            paths.sort();
            let mut out = BTreeMap::new();
            for p in paths {
                let name = p.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
                out.insert(name, parse_file(&p)?);
            }
            out
        } else {
            base.boundaries
        };
        let cat = Self { weights, functions, boundaries };
        cat.validate()?;
        Ok(cat)
    }

    /// Optional `tolerances.json` in an inputs directory.
    pub fn load_tolerances(dir: &Path) -> Result<Tolerances> {
        let path = dir.join("tolerances.json");
        let tol: Tolerances = if path.exists() { parse_file(&path)? } else { Tolerances::default() };
        tol.validate()?;
        Ok(tol)
    }

    /// Unique names, and every `outer_of` label resolvable.
    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::BTreeSet::new();
        for w in &self.weights {
            if !seen.insert(w.label.as_str()) {
                return Err(Error::Input(format!("duplicate weight '{}'", w.label)));
            }
        }
        let mut fseen = std::collections::BTreeSet::new();
        for f in &self.functions.functions {
            if !fseen.insert(f.name.as_str()) {
                return Err(Error::Input(format!("duplicate function '{}'", f.name)));
            }
            let mut stack = vec![&f.function];
            while let Some(s) = stack.pop() {
                match s {
                    FunctionSpec::OuterOf(l) if !seen.contains(l.as_str()) => {
                        return Err(Error::Input(format!("function '{}': unknown weight '{l}'", f.name)));
                    }
                    FunctionSpec::Product(parts) => stack.extend(parts),
                    FunctionSpec::Pow { base, .. } => stack.push(base),
                    _ => {}
                }
            }
        }
        Ok(())
    }

    pub fn weight(&self, label: &str) -> Result<SampledWeight> {
        self.weight_on(label, default_grid())
    }

    fn weight_on(&self, label: &str, grid: Arc<RealGrid>) -> Result<SampledWeight> {
        let def = self.weights.iter().find(|w| w.label == label).ok_or_else(|| Error::Input(format!("unknown weight '{label}'")))?;
        def.build(grid)
    }

    pub fn build_function(&self, entry: &FunctionEntry) -> Result<AnalyticFn> {
        let f = entry.function.build(&|l| self.weight(l))?;
        Ok(f.with_label(entry.name.clone()))
    }

    pub fn panel(&self) -> impl Iterator<Item = &FunctionEntry> {
        self.functions.functions.iter().filter(|f| f.panel)
    }

    pub fn entries(&self) -> Vec<CatalogEntry> {
        let mut out = Vec::new();
        for w in &self.weights {
            out.push(CatalogEntry {
                kind: "weight",
                name: w.label.clone(),
                definition: format!("{} {}", serde_json::to_value(w.kind).unwrap_or_default().as_str().unwrap_or(""), json!(w.params)),
                oracle: weight_oracle(w),
            });
        }
        for f in &self.functions.functions {
            out.push(CatalogEntry {
                kind: "function",
                name: f.name.clone(),
                definition: serde_json::to_string(&f.function).unwrap_or_default(),
                oracle: f.oracle.clone(),
            });
        }
        for (name, b) in &self.boundaries {
            out.push(CatalogEntry { kind: "boundary", name: name.clone(), definition: boundary_definition(b), oracle: boundary_oracle(b) });
        }
        out
    }
}

fn weight_oracle(w: &WeightDefinition) -> String {
    let num = |k: &str| w.params.get(k).and_then(|v| v.as_f64());
    match (w.kind, w.params.get("name").and_then(|v| v.as_str())) {
        (WeightKind::Power, _) if w.params.contains_key("factors") => "product of |x-c|^a: A_p iff every exponent in (-1, p-1)".into(),
        (WeightKind::Power, _) => match num("a") {
            Some(a) => {
                let ainf = if a > -1.0 { format!("A_inf, A_p for p > {}", (a + 1.0).max(1.0)) } else { "not A_inf".into() };
                format!("|x|^{a}: A_p iff -1 < a < p-1; {ainf}")
            }
            None => "power weight".into(),
        },
        (WeightKind::Expression, Some("constant")) => "A_p constant 1 for every p".into(),
        (WeightKind::Expression, Some("one_plus_square")) => "(1+x^2)^(a/2): A_p iff -1 < a < p-1".into(),
        (WeightKind::Expression, Some("two_plus_sin")) => "bounded above and below: A_p for every p".into(),
        (WeightKind::Expression, Some("exp_abs")) => "e^(k|x|): not doubling, not A_inf".into(),
        _ => String::new(),
    }
}

fn boundary_definition(b: &PolylineBoundary) -> String {
    let v: Vec<String> = b.vertices().iter().map(|(x, y)| format!("({x}, {y})")).collect();
    format!("vertices [{}], slopes {} / {}", v.join(", "), b.slope_left(), b.slope_right())
}

fn boundary_oracle(b: &PolylineBoundary) -> String {
    match wedge_slope(b) {
        Some(m) => {
            let alpha = 1.0 - 2.0 * m.atan() / std::f64::consts::PI;
            format!("wedge: Phi(z) = e^(i atan m) z^{alpha:.6}, |arg Phi'| <= {:.6}", m.atan())
        }
        None => format!("Schwarz-Christoffel, L = {}, |arg Phi'| <= {:.6}", b.lipschitz(), b.lipschitz().atan()),
    }
}

/// `Some(m)` for the boundary `γ = m|x|`, which has a closed-form map.
pub fn wedge_slope(b: &PolylineBoundary) -> Option<f64> {
    let m = b.slope_right();
    (b.vertices() == [(0.0, 0.0)] && m >= 0.0 && b.slope_left() == -m).then_some(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_catalog_is_rich_and_valid() {
        let c = Catalog::default();
        c.validate().unwrap();
        assert!(c.entries().len() >= 12);
        for f in &c.functions.functions {
            c.build_function(f).unwrap();
        }
    }

    #[test]
    fn load_empty_and_malformed() {
        let dir = tempfile::tempdir().unwrap();
        let cat = Catalog::load(dir.path(), false).unwrap();
        assert!(cat.entries().is_empty());
        fs::write(dir.path().join("functions.json"), "{\"functions\": [").unwrap();
        assert!(matches!(Catalog::load(dir.path(), false), Err(Error::Input(_))));
    }

    #[test]
    fn boundaries_from_files() {
        let dir = tempfile::tempdir().unwrap();
        fs::create_dir(dir.path().join("boundaries")).unwrap();
        fs::write(dir.path().join("boundaries/z.json"), r#"{"vertices": [[0, 0], [1, 0.5]], "slope_left": 0, "slope_right": 0}"#).unwrap();
        let cat = Catalog::load(dir.path(), true).unwrap();
        assert_eq!(cat.boundaries.keys().collect::<Vec<_>>(), ["z"]);
        assert!(!cat.weights.is_empty());
    }
}
