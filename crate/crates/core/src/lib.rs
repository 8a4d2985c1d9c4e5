//! Recursively compressed inverse preconditioning for second-kind integral
//! equations on piecewise-smooth planar curves whose right-hand side is
//! singular at corner or endpoint locations.
//!
//! The dense linear algebra and the Gauss–Legendre machinery are generic over
//! the scalar type; the physics pipeline works in complex double precision,
//! for which [`C64`], [`CMatrix`] and [`RMatrix`] are the working aliases.

pub mod bgkw;
pub mod geometry;
pub mod linalg;
pub mod models;
pub mod quadrature;
pub mod rcip;
pub mod scalar;
pub mod solver;

pub use num_complex::Complex64;

/// Complex double-precision scalar.
pub type C64 = Complex64;
/// Dense complex matrix.
pub type CMatrix = linalg::Matrix<C64>;
/// Dense real matrix.
pub type RMatrix = linalg::Matrix<f64>;
