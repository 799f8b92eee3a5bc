//! Boundary concentration of weighted manifolds with boundary.
//!
//! The crate computes the observable inscribed radius and related
//! invariants from *screens* (laws of the distance to the boundary), the
//! comparison bounds that curvature lower bounds place on them, spectral
//! audits of one dimensional radial reductions, the same invariants on
//! finite metric graphs, and high dimensional sweeps of the model spaces.

pub mod asymptotics;
pub mod discrete;
pub mod error;
pub mod jacobi;
pub mod models;
pub mod numeric;
pub mod screen;
pub mod spectral;

pub use error::{Error, Result};
