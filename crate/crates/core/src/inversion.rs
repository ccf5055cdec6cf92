//! Reconstruction from fan-beam data: exact singular-value inversion, the
//! one-parameter family of inversion formulas, and filtered reconstructions.
//!
//! Every method returns the field in the [`Frame::Weighted`] frame: data
//! `I_0 f` yields `f = w sum c_{n,k} Z_hat_{n,k}`.

use crate::basis::{analyze_boundary, analyze_disk, BoundaryCoeffs, DiskGrid, Frame, GridSinogram, SpectralBoundary, SpectralField, ZernikeCoeffs};
use crate::error::{GxrayError, Result};
use crate::filter::SpectralFilter;
use crate::operators::DEFAULT_FILTER_BOUND;
use crate::transform::{adjoint_star_grid, RaySamplingConfig};
use num_complex::Complex64;

/// Fraction of sinogram energy outside the range band above which a warning
/// is logged.
pub const KERNEL_LEAK_THRESHOLD: f64 = 0.01;

#[derive(Debug, Clone)]
pub enum Method {
    Svd,
    Alpha(f64),
    Filter(SpectralFilter),
}

impl Method {
    /// `svd`, `alpha:<a>` or `filter:<filter spec>`.
    pub fn parse(s: &str) -> Result<Self> {
        if s == "svd" {
            return Ok(Self::Svd);
        }
        if let Some(a) = s.strip_prefix("alpha:") {
            return a
                .parse::<f64>()
                .ok()
                .filter(|a| a.is_finite())
                .map(Self::Alpha)
                .ok_or_else(|| GxrayError::InvalidArgument(format!("invalid method '{s}'")));
        }
        if let Some(f) = s.strip_prefix("filter:") {
            return SpectralFilter::parse(f).map(Self::Filter);
        }
        Err(GxrayError::InvalidArgument(format!("invalid method '{s}'")))
    }
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub field: SpectralField,
    /// Boundary coefficients of the data, including the margin band.
    pub data: SpectralBoundary,
    /// Share of the data energy at `k` outside `[0, n]`.
    pub kernel_fraction: f64,
    /// Relative norm of the data not explained by the reconstruction.
    pub residual_fraction: f64,
}

/// Margin used for kernel-energy diagnostics.
pub fn default_margin(sino: &GridSinogram, degree: usize) -> Result<usize> {
    sino.grid
        .max_margin(degree)
        .map(|k| k.min(degree.max(4)))
        .ok_or(GxrayError::ResolutionTooLow { what: "n_beta/n_alpha", got: sino.grid.n_beta.min(sino.grid.n_alpha), need: 2 * degree + 2 })
}

fn sigma(c: f64, n: usize) -> f64 {
    (c / (n as f64 + 1.0)).sqrt()
}

/// `coef = b / sigma_n` on the range band.
pub fn svd_from_spectral(b: &SpectralBoundary, degree: usize) -> SpectralField {
    let c = b.model.c_const();
    let coeffs = ZernikeCoeffs::from_fn(degree, |n, k| b.coeffs.get(n, k as i64) / sigma(c, n));
    SpectralField::new(b.model, Frame::Weighted, coeffs)
}

fn pipeline(b: &SpectralBoundary, degree: usize, alpha: f64, filter: Option<&[f64]>) -> SpectralField {
    let c = b.model.c_const();
    let coeffs = ZernikeCoeffs::from_fn(degree, |n, k| {
        let e = n as f64 + 1.0;
        let mut v = b.coeffs.get(n, k as i64);
        if let Some(f) = filter {
            v *= f[n];
        }
        // (-T^2)^alpha, adjoint, L^{1/2 - alpha}, 1/c
        v *= e.powf(2.0 * alpha);
        v *= sigma(c, n);
        v *= e.powf(1.0 - 2.0 * alpha);
        v / c
    });
    SpectralField::new(b.model, Frame::Weighted, coeffs)
}

/// Inversion through `(1/c) L^{1/2 - alpha} I_0^* (-T^2)^alpha`, spectrally.
pub fn alpha_from_spectral(b: &SpectralBoundary, alpha: f64, degree: usize) -> SpectralField {
    pipeline(b, degree, alpha, None)
}

/// Filtered inversion `F(-T^2)` applied before the `alpha = 1/2` formula.
pub fn regularized_from_spectral(b: &SpectralBoundary, filter: &SpectralFilter, degree: usize, bound: f64) -> Result<SpectralField> {
    let f: Vec<f64> = (0..=degree).map(|n| filter.checked(n, bound)).collect::<Result<_>>()?;
    Ok(pipeline(b, degree, 0.5, Some(&f)))
}

/// Analyze the data and report how much of it lies off the range band.
pub fn analyze_data(sino: &GridSinogram, degree: usize) -> Result<(SpectralBoundary, f64, f64)> {
    let margin = default_margin(sino, degree)?;
    let b = analyze_boundary(sino, degree, margin)?;
    let energy = sino.energy();
    let (kernel, residual) = if energy > 0.0 {
        let range = b.coeffs.range_norm().powi(2);
        let kern = b.coeffs.kernel_norm().powi(2);
        (kern / energy, ((energy - range).max(0.0) / energy).sqrt())
    } else {
        (0.0, 0.0)
    };
    if kernel > KERNEL_LEAK_THRESHOLD {
        log::warn!("kernel leak: {:.3}% of the data energy lies outside the range band", 100.0 * kernel);
    }
    Ok((b, kernel, residual))
}

pub fn reconstruct(sino: &GridSinogram, method: &Method, degree: usize) -> Result<Reconstruction> {
    let (data, kernel_fraction, residual_fraction) = analyze_data(sino, degree)?;
    let field = match method {
        Method::Svd => svd_from_spectral(&data, degree),
        Method::Alpha(a) => alpha_from_spectral(&data, *a, degree),
        Method::Filter(f) => regularized_from_spectral(&data, f, degree, DEFAULT_FILTER_BOUND)?,
    };
    Ok(Reconstruction { field, data, kernel_fraction, residual_fraction })
}

pub fn svd_reconstruct(sino: &GridSinogram, degree: usize) -> Result<Reconstruction> {
    reconstruct(sino, &Method::Svd, degree)
}

pub fn alpha_reconstruct(sino: &GridSinogram, alpha: f64, degree: usize) -> Result<Reconstruction> {
    reconstruct(sino, &Method::Alpha(alpha), degree)
}

pub fn regularized_reconstruct(sino: &GridSinogram, filter: &SpectralFilter, degree: usize) -> Result<Reconstruction> {
    reconstruct(sino, &Method::Filter(filter.clone()), degree)
}

/// The alpha formula with the backprojection done by quadrature instead of
/// through the singular relation.
pub fn alpha_reconstruct_quadrature(sino: &GridSinogram, alpha: f64, degree: usize, cfg: &RaySamplingConfig) -> Result<SpectralField> {
    let model = sino.grid.model;
    let data = analyze_boundary(sino, degree, 0)?;
    let mut scaled = BoundaryCoeffs::zeros(degree, 0);
    for (n, k, v) in data.coeffs.iter() {
        scaled.set(n, k, v * (n as f64 + 1.0).powf(2.0 * alpha));
    }
    let g = SpectralBoundary::new(model, scaled);
    let grid = DiskGrid::for_degree(model, degree);
    let back = adjoint_star_grid(&g, &grid, cfg)?;
    let spec = analyze_disk(&back, degree, Frame::Plain)?;
    let c = model.c_const();
    let coeffs = spec.coeffs.map(|n, _, v| v * (n as f64 + 1.0).powf(1.0 - 2.0 * alpha) / c);
    Ok(SpectralField::new(model, Frame::Weighted, coeffs))
}

/// Zero coefficients beyond degree `nc`.
pub fn truncate(f: &SpectralField, nc: usize) -> SpectralField {
    f.map(|n, _, c| if n <= nc { c } else { Complex64::new(0.0, 0.0) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{synthesize_boundary, SinogramGrid};
    use crate::geometry::DiskModel;

    #[test]
    fn singular_function_inverts_to_unit() {
        for (k, r) in [(0.0, 1.0), (0.5, 1.0), (-0.5, 1.0)] {
            let m = DiskModel::new(k, r).unwrap();
            let mut c = BoundaryCoeffs::zeros(4, 0);
            c.set(4, 1, Complex64::new(sigma(m.c_const(), 4), 0.0));
            let grid = SinogramGrid::new(m, 33, 32).unwrap();
            let sino = synthesize_boundary(&SpectralBoundary::new(m, c), &grid);
            for method in [Method::Svd, Method::Alpha(0.0), Method::Alpha(1.0), Method::Filter(SpectralFilter::identity())] {
                let rec = reconstruct(&sino, &method, 6).unwrap();
                let mut expect = ZernikeCoeffs::zeros(6);
                expect.set(4, 1, Complex64::new(1.0, 0.0));
                assert!(rec.field.coeffs.max_abs_diff(&expect) < 1e-12, "{method:?}");
                assert!(rec.kernel_fraction < 1e-20);
            }
        }
    }

    #[test]
    fn zero_data_gives_zero() {
        let m = DiskModel::reference();
        let grid = SinogramGrid::new(m, 33, 32).unwrap();
        let sino = grid.sample(|_| Complex64::new(0.0, 0.0));
        let rec = svd_reconstruct(&sino, 6).unwrap();
        assert_eq!(rec.field.coeffs.norm(), 0.0);
    }

    #[test]
    fn identity_filter_matches_half_alpha_bitwise() {
        let m = DiskModel::new(0.3, 1.5).unwrap();
        let mut c = BoundaryCoeffs::zeros(5, 1);
        for (n, k, _) in c.clone().iter() {
            c.set(n, k, Complex64::new(0.3 * n as f64 - 0.1 * k as f64, 1.0 / (1.0 + n as f64)));
        }
        let b = SpectralBoundary::new(m, c);
        let a = alpha_from_spectral(&b, 0.5, 5);
        let f = regularized_from_spectral(&b, &SpectralFilter::identity(), 5, 1e12).unwrap();
        assert_eq!(a, f);
    }

    #[test]
    fn method_grammar() {
        assert!(matches!(Method::parse("svd").unwrap(), Method::Svd));
        assert!(matches!(Method::parse("alpha:0.25").unwrap(), Method::Alpha(a) if a == 0.25));
        assert!(matches!(Method::parse("filter:cutoff:4").unwrap(), Method::Filter(SpectralFilter::Cutoff(4))));
        assert!(Method::parse("alpha:x").is_err());
        assert!(Method::parse("fbp").is_err());
    }

    #[test]
    fn leak_is_measured() {
        let m = DiskModel::reference();
        let mut c = BoundaryCoeffs::zeros(3, 2);
        c.set(2, -1, Complex64::new(1.0, 0.0));
        c.set(2, 1, Complex64::new(1.0, 0.0));
        let grid = SinogramGrid::new(m, 33, 32).unwrap();
        let sino = synthesize_boundary(&SpectralBoundary::new(m, c), &grid);
        let rec = svd_reconstruct(&sino, 3).unwrap();
        assert!((rec.kernel_fraction - 0.5).abs() < 1e-10);
    }
}
