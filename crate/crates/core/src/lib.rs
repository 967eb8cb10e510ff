//! Analytic extensions of Muckenhoupt weights.
//!
//! The crate builds nonvanishing analytic functions on the upper half-plane
//! whose boundary modulus is a prescribed `A_∞` weight, measures how far a
//! function is from being of Smirnov type, and computes weighted Hardy-space
//! norms on the half-plane and on graph Lipschitz domains with polyline
//! boundaries (through Schwarz–Christoffel maps).
//!
//! Module map:
//!
//! - [`numerics`]: grids, adaptive quadrature, Poisson and conjugate kernels.
//! - [`weights`]: sampled weights, `A_p` / `A_∞` / BMO estimators.
//! - [`analytic`]: the function algebra, outer extensions, Smirnov defect and
//!   `AE` membership.
//! - [`hardy`]: Hardy norms, non-tangential maximal functions and the
//!   Smirnov ⟺ `H¹` equivalence harness.
//! - [`conformal`]: wedge and Schwarz–Christoffel maps, pushforward of
//!   boundary measures and domain-side Hardy norms.
//! - [`cli`]: batch suites writing `report.json` and CSV tables.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod cli;
pub mod config;
pub mod conformal;
pub mod error;
pub mod hardy;
pub mod numerics;
pub mod weights;

pub use config::Tolerances;
pub use error::{Error, Result};
pub use num_complex::Complex64;
