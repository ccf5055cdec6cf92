//! Zernike and boundary bases, coefficient containers and grid transforms.

pub mod boundary;
pub mod calculus;
pub mod grid;
pub mod jacobi;
pub mod spectral;
pub mod zernike;

pub use boundary::{psi_eval, psi_euclid, psi_norm, BoundaryCoeffs, SpectralBoundary};
pub use grid::{analyze_boundary, analyze_disk, synthesize_boundary, synthesize_disk, DiskGrid, FourierTable, GridField, GridSinogram, SinogramGrid};
pub use spectral::{Frame, SpectralField, ZernikeCoeffs};
pub use zernike::{curved_zernike_eval, curved_zernike_norm, zernike_all, zernike_eval, zernike_norm};
