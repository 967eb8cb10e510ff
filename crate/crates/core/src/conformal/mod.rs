//! Graph Lipschitz domains with polyline boundaries, their conformal maps
//! from the half-plane, boundary measures and domain-side Hardy norms.

mod boundary;
mod diagnostics;
mod map;
mod measure;
mod transfer;

pub use boundary::PolylineBoundary;
pub use diagnostics::{phi_prime_diagnostics, phi_prime_diagnostics_with, HeightNorms, PhiPrimeDiagnostics};
pub use map::{solve_sc, solve_sc_with, wedge_map, ConformalMap, MapDump, SolveOptions, SC_ORDER};
pub use measure::{arc_mass, pushforward, ArcWeight};
pub use transfer::{
    pullback_panel, cor44_check, cor44_check_with, cor44_check_with_options, domain_ae_membership, hardy_norm_domain, hardy_norm_domain_with, transfer_panel,
    Cor44Report, DomainFn, PanelRow, TransferPanel,
};
