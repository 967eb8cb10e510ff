use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::hardy::HardyNormReport;
use crate::analytic::SmirnovReport;
use crate::{Error, Result, Tolerances};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    /// Within numerical tolerance of the decision threshold.
    Inconclusive,
    /// An expected verdict not reproduced.
    Fail,
    /// A numerically robust violation of a theorem.
    Contradiction,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Inconclusive => "inconclusive",
            Status::Fail => "fail",
            Status::Contradiction => "contradiction",
        }
    }
}

/// One row of `summary.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub name: String,
    pub status: Status,
    pub verdict: String,
    pub key_scalar: Option<f64>,
    pub tolerance: Option<f64>,
    /// Witness exponents, when the check produces one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<(f64, f64, f64)>,
}

impl CheckRow {
    pub fn new(name: impl Into<String>, status: Status, verdict: impl Into<String>) -> Self {
        Self { name: name.into(), status, verdict: verdict.into(), key_scalar: None, tolerance: None, witness: None }
    }

    pub fn scalar(mut self, v: Option<f64>, tol: Option<f64>) -> Self {
        self.key_scalar = v.filter(|x| x.is_finite());
        self.tolerance = tol;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detail {
    pub name: String,
    pub report: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectRow {
    pub function: String,
    pub x: f64,
    pub y: f64,
    pub defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeightRow {
    pub check: String,
    pub p: f64,
    pub height: f64,
    pub integral: Option<f64>,
}

/// Everything a suite produces. Serialized fields go to `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema: u32,
    pub suite: String,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub checks: Vec<CheckRow>,
    pub details: Vec<Detail>,
    #[serde(skip)]
    pub defect_grid: Vec<DefectRow>,
    #[serde(skip)]
    pub norm_vs_height: Vec<HeightRow>,
}

impl SuiteReport {
    pub fn new(suite: &str, seed: u64, tolerances: Tolerances) -> Self {
        Self {
            schema: SCHEMA,
            suite: suite.into(),
            seed,
            tolerances,
            checks: Vec::new(),
            details: Vec::new(),
            defect_grid: Vec::new(),
            norm_vs_height: Vec::new(),
        }
    }

    pub fn push(&mut self, row: CheckRow) {
        self.checks.push(row);
    }

    pub fn detail(&mut self, name: impl Into<String>, report: &impl Serialize) -> Result<()> {
        let report = serde_json::to_value(report).map_err(|e| Error::Inconsistent(format!("report serialization: {e}")))?;
        self.details.push(Detail { name: name.into(), report });
        Ok(())
    }

    pub fn defects(&mut self, r: &SmirnovReport) {
        for (&(x, y), &d) in r.points.iter().zip(&r.defect) {
            self.defect_grid.push(DefectRow { function: r.label.clone(), x, y, defect: d });
        }
    }

    pub fn heights(&mut self, check: &str, r: &HardyNormReport) {
        for (&h, &v) in r.heights_scanned.iter().zip(&r.per_height_integral) {
            self.norm_vs_height.push(HeightRow { check: check.into(), p: r.p, height: h, integral: v });
        }
    }

    pub fn worst(&self) -> Status {
        self.checks.iter().map(|c| c.status).max().unwrap_or(Status::Pass)
    }

    /// 0 when nothing failed, 1 on a failed check or a contradiction.
    pub fn exit_code(&self) -> i32 {
        match self.worst() {
            Status::Pass | Status::Inconclusive => 0,
            Status::Fail | Status::Contradiction => 1,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map(|s| s + "\n").map_err(|e| Error::Inconsistent(format!("report serialization: {e}")))
    }

    /// Writes `report.json`, `summary.csv`, `defect_grid.csv` and
    /// `norm_vs_height.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        let io = |e: std::io::Error| Error::Input(format!("{}: {e}", dir.display()));
        fs::create_dir_all(dir).map_err(io)?;
        fs::write(dir.join("report.json"), self.to_json()?).map_err(io)?;
        let num = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();

        let mut w = csv_writer(&dir.join("summary.csv"))?;
        record(&mut w, ["name", "status", "verdict", "key_scalar", "tolerance", "m", "s", "q"])?;
        for c in &self.checks {
            let (m, s, q) = match c.witness {
                Some((m, s, q)) => (num(Some(m)), num(Some(s)), num(Some(q))),
                None => Default::default(),
            };
            record(&mut w, [c.name.as_str(), c.status.as_str(), &c.verdict, &num(c.key_scalar), &num(c.tolerance), &m, &s, &q])?;
        }
        flush(w)?;

        let mut w = csv_writer(&dir.join("defect_grid.csv"))?;
        record(&mut w, ["function", "x", "y", "defect"])?;
        for r in &self.defect_grid {
            record(&mut w, [r.function.as_str(), &num(Some(r.x)), &num(Some(r.y)), &num(Some(r.defect))])?;
        }
        flush(w)?;

        let mut w = csv_writer(&dir.join("norm_vs_height.csv"))?;
        record(&mut w, ["check", "p", "height", "integral"])?;
        for r in &self.norm_vs_height {
            record(&mut w, [r.check.as_str(), &num(Some(r.p)), &num(Some(r.height)), &num(r.integral)])?;
        }
        flush(w)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Input(format!("csv: {e}"))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_path(path).map_err(csv_err)
}

fn record<'a>(w: &mut csv::Writer<fs::File>, fields: impl IntoIterator<Item = &'a str>) -> Result<()> {
    w.write_record(fields).map_err(csv_err)
}

fn flush(mut w: csv::Writer<fs::File>) -> Result<()> {
    w.flush().map_err(|e| Error::Input(format!("csv: {e}")))
}
