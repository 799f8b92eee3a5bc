//! Numerical kernels used by the geometric modules: adaptive quadrature,
//! bracketing root finders, golden-section search and a symmetric
//! tridiagonal eigenvalue solver.

pub mod quad;
pub mod roots;
pub mod tridiag;

pub use quad::{integrate, integrate_to_infinity, Integral, QuadOptions};
pub use roots::{brent, expand_upper, golden_min};
pub use tridiag::SymTridiagonal;
