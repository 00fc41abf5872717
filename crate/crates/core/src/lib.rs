//! Minimal surfaces of hyperbolic 3-space: helicoids, catenoids, their
//! conjugate-surface relations and the spectrum of their Jacobi operators.

pub mod jet;
pub mod lorentz;
pub mod diffgeo;
pub mod quadrature;
pub mod stability;
pub mod surfaces;

pub use lorentz::{LorentzVec, Model, ModelError, ModelPoint};
pub use surfaces::{CatenoidKind, SurfaceChart, SurfaceError, SurfaceKind};
