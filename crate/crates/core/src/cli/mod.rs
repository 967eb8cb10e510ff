//! Batch suites over a catalog of weights, functions and boundaries.
//!
//! Each suite writes `report.json` (schema 1), `summary.csv`,
//! `defect_grid.csv` and `norm_vs_height.csv`. The binary maps the outcome
//! to exit codes: 0 when every check passes, 1 on a failed check or a
//! contradiction, 2 on an input error.

mod catalog;
mod report;
mod suites;

pub use catalog::{wedge_slope, Catalog, CatalogEntry};
pub use report::{CheckRow, DefectRow, Detail, HeightRow, Status, SuiteReport, SCHEMA};
pub use suites::{domain_panel, run_catalog, run_suite, seeded_family, Suite, SuiteConfig};

/// `describe` output, one line per entry.
pub fn describe(catalog: &Catalog) -> String {
    let mut out = String::new();
    for e in catalog.entries() {
        out.push_str(&format!("{:<8} {:<16} {}\n         oracle: {}\n", e.kind, e.name, e.definition, e.oracle));
    }
    out
}
