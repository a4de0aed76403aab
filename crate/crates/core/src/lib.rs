//! Viscous contact wave of the one-dimensional Navier–Stokes–Poisson system
//! with a free boundary, in Lagrangian coordinates: construction of the wave,
//! a semi-implicit solver for the full system and perturbation diagnostics.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod electron_density;
pub mod error;
pub mod fd;
pub mod linalg;
pub mod nsp_solver;
pub mod quadrature;
pub mod wave_profile;

pub use electron_density::{DensityKind, ElectronDensityModel};
pub use error::{NspError, Result};
