//! Hardy norms on a Lipschitz domain against their half-plane pullbacks.
//!
//! `cargo run --release --example transfer_panel`

use ae_toolkit::cli::{domain_panel, Catalog};
use ae_toolkit::conformal::{pullback_panel, transfer_panel, wedge_map, ArcWeight};
use ae_toolkit::hardy::NormOptions;
use ae_toolkit::Tolerances;

fn main() -> ae_toolkit::Result<()> {
    let map = wedge_map(1.0)?;
    let ds = ArcWeight::arc_length();
    let opts = NormOptions::from_tolerances(&Tolerances::default());

    let domain_fns = domain_panel(map.boundary())?;
    let composed = transfer_panel(&domain_fns, 1.0, &ds, &map, &opts)?;
    println!("composition panel: all agree {}, band {:?}", composed.all_agree, composed.band);

    let catalog = Catalog::default();
    let fns: Vec<_> = catalog.panel().map(|e| catalog.build_function(e)).collect::<Result<_, _>>()?;
    let pulled = pullback_panel(&fns, 1.0, &ds, &map, &opts)?;
    println!("pullback panel: all agree {}, band {:?}", pulled.all_agree, pulled.band);
    for row in &pulled.rows {
        println!("  {:<24} member {:<5} ratio {:?}", row.label, row.left.member, row.ratio);
    }
    Ok(())
}
