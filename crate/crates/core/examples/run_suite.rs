//! Run a batch suite programmatically and list what it wrote.
//!
//! `cargo run --release --example run_suite -- [suite]` (default `smirnov`)

use ae_toolkit::cli::{run_suite, Suite, SuiteConfig};
use ae_toolkit::Tolerances;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "smirnov".into());
    let suite: Suite = name.parse()?;
    let inputs = std::env::temp_dir().join("ae-toolkit-example-inputs");
    std::fs::create_dir_all(&inputs)?;
    let out = std::env::temp_dir().join(format!("ae-toolkit-example-{name}"));
    let config = SuiteConfig { suite, inputs, output_dir: out.clone(), tolerances: Tolerances::default(), seed: 0 };
    let report = run_suite(&config)?;
    for row in &report.checks {
        println!("{:<10} {:<28} {}", format!("{:?}", row.status), row.name, row.verdict);
    }
    println!("exit code {}, outputs in {}", report.exit_code(), out.display());
    Ok(())
}
