//! Geodesic X-ray transform on simple disks of constant curvature.
//!
//! A model is a disk of radius `R` with metric `(1 + kappa |z|^2)^{-2} |dz|^2`.
//! The crate provides quadrature forward and backprojection operators, the
//! curved Zernike and boundary bases in which the transform is diagonal, the
//! associated differential operators, and spectral reconstruction.

pub mod basis;
pub mod error;
pub mod filter;
pub mod geometry;
pub mod interp;
pub mod inversion;
pub mod io;
pub mod operators;
pub mod phantom;
pub mod quadrature;
pub mod transform;
pub mod verify;

pub use error::{GxrayError, Result};
pub use geometry::{DiskModel, FanBeamCoord, GeodesicArc, PhasePoint};
pub use num_complex::Complex64;
