//! Multi-bubble concentration solutions of −Δu + Q(y)u = u^{(N+2)/(N−2)} in R^N.
//!
//! Bubble profiles and norms live in [`profile`], quadrature and the derived
//! constants in [`quadrature`], the finite-dimensional reduced problem in
//! [`reduced`], the discretized correction in [`correction`], local Pohozaev
//! identities in [`pohozaev`], and solution-pair diagnostics in [`diagnostics`].

pub mod dims;
pub mod error;
pub mod grid;
pub mod profile;
pub mod quadrature;
pub mod reduced;
pub mod correction;
pub mod pohozaev;
pub mod diagnostics;

pub use dims::DimensionParams;
pub use error::{Error, Result};
pub use grid::{AxiGrid, AxialBoundary, Field, GridSpec};
pub use profile::{Ansatz, Bubble, CutoffSpec, Layout, PotentialSpec, WeightedNormParams};
