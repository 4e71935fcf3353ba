//! Spectral Calderón–Zygmund operators on sampled fields, mixed and weak
//! Lebesgue norms, dyadic Calderón–Zygmund decomposition, and a harness that
//! builds an explicit family `g_n` for which
//! `‖‖R₁₂ g_n‖_{L²_x}‖_{L^∞_y}` grows without bound while
//! `‖‖e^{x²+y²} g_n‖_{L^∞_y}‖_{L^∞_x}` stays bounded.

pub mod bump;
pub mod decomp;
pub mod error;
pub mod fourier;
pub mod grid;
pub mod harness;
pub mod io;
pub mod norms;
pub mod operator;

pub use error::{Error, Result};
pub use grid::{integrate, Axis, Field1D, Field2D, UniformGrid1D};
