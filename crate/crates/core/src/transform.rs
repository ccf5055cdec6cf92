//! Forward X-ray transform and backprojections by quadrature along the
//! explicit geodesics.

use crate::basis::{DiskGrid, GridField, GridSinogram, SinogramGrid, SpectralBoundary, SpectralField};
use crate::error::{GxrayError, Result};
use crate::geometry::{DiskModel, FanBeamCoord, PhasePoint};
use crate::interp::{Interpolation, SinogramInterpolant};
use crate::quadrature::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::TAU;

/// Function on the disk.
pub trait DiskFunction: Sync {
    fn eval(&self, z: Complex64) -> Complex64;
}

impl<F: Fn(Complex64) -> Complex64 + Sync> DiskFunction for F {
    fn eval(&self, z: Complex64) -> Complex64 {
        self(z)
    }
}

impl DiskFunction for SpectralField {
    fn eval(&self, z: Complex64) -> Complex64 {
        SpectralField::eval(self, z)
    }
}

/// Function on the fan-beam domain.
pub trait BoundaryFunction: Sync {
    fn eval(&self, coord: FanBeamCoord) -> Complex64;
}

impl<F: Fn(FanBeamCoord) -> Complex64 + Sync> BoundaryFunction for F {
    fn eval(&self, coord: FanBeamCoord) -> Complex64 {
        self(coord)
    }
}

impl BoundaryFunction for SpectralBoundary {
    fn eval(&self, coord: FanBeamCoord) -> Complex64 {
        SpectralBoundary::eval(self, coord)
    }
}

/// Nodes for the fiber integral in the backprojections.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThetaRule {
    /// Equispaced in the direction angle.
    Uniform,
    /// Equispaced in the straightened direction angle; the substitution is
    /// exact for band-limited data.
    #[default]
    FiberAdapted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RaySamplingConfig {
    /// Gauss-Legendre nodes per geodesic.
    pub nodes_per_ray: usize,
    /// Nodes on each fiber of the unit circle bundle.
    pub theta_nodes: usize,
    pub theta_rule: ThetaRule,
    /// Interpolation of gridded data inside the normal operator.
    pub interpolation: Interpolation,
}

impl Default for RaySamplingConfig {
    fn default() -> Self {
        Self { nodes_per_ray: 256, theta_nodes: 256, theta_rule: ThetaRule::FiberAdapted, interpolation: Interpolation::Bicubic }
    }
}

impl RaySamplingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_ray < 16 {
            return Err(GxrayError::ResolutionTooLow { what: "nodes_per_ray", got: self.nodes_per_ray, need: 16 });
        }
        if self.theta_nodes < 64 {
            return Err(GxrayError::ResolutionTooLow { what: "theta_nodes", got: self.theta_nodes, need: 64 });
        }
        Ok(())
    }
}

/// `I_0 f` along the given rays.
pub fn forward_rays(model: &DiskModel, f: &impl DiskFunction, coords: &[FanBeamCoord], cfg: &RaySamplingConfig) -> Result<Vec<Complex64>> {
    cfg.validate()?;
    let rule = GaussLegendre::new(cfg.nodes_per_ray);
    coords
        .par_iter()
        .map(|&c| {
            let g = model.geodesic(c)?;
            Ok(g.quadrature(&rule).map(|(z, w)| f.eval(z) * w).sum())
        })
        .collect()
}

/// `I_0 f` on a sinogram grid.
pub fn forward(f: &impl DiskFunction, grid: &SinogramGrid, cfg: &RaySamplingConfig) -> Result<GridSinogram> {
    let values = forward_rays(&grid.model, f, &grid.coords(), cfg)?;
    Ok(GridSinogram { grid: *grid, values })
}

/// `I_0` applied to `dim` functions at once; `f(z, out)` writes their values
/// at `z` into `out`.
pub fn forward_batch(
    dim: usize,
    f: &(dyn Fn(Complex64, &mut [Complex64]) + Sync),
    grid: &SinogramGrid,
    cfg: &RaySamplingConfig,
) -> Result<Vec<GridSinogram>> {
    cfg.validate()?;
    let rule = GaussLegendre::new(cfg.nodes_per_ray);
    let model = grid.model;
    let rows: Vec<Vec<Complex64>> = grid
        .coords()
        .par_iter()
        .map(|&c| {
            let g = model.geodesic(c)?;
            let mut acc = vec![Complex64::new(0.0, 0.0); dim];
            let mut buf = vec![Complex64::new(0.0, 0.0); dim];
            for (z, w) in g.quadrature(&rule) {
                f(z, &mut buf);
                for (a, b) in acc.iter_mut().zip(&buf) {
                    *a += b * w;
                }
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    Ok((0..dim)
        .map(|d| GridSinogram { grid: *grid, values: rows.iter().map(|r| r[d]).collect() })
        .collect())
}

/// Nodes `(theta - omega, weight)` for the fiber integral at radius `rho`.
pub fn fiber_nodes(model: &DiskModel, rho: f64, cfg: &RaySamplingConfig) -> Vec<(f64, f64)> {
    let m = cfg.theta_nodes;
    let h = TAU / m as f64;
    let t = rho / model.radius();
    let r = model.lambda() * t * t;
    (0..m)
        .map(|j| {
            let tp = h * j as f64;
            match cfg.theta_rule {
                ThetaRule::Uniform => (tp, h),
                ThetaRule::FiberAdapted => {
                    let (s2, c2) = (2.0 * tp).sin_cos();
                    let th = tp + (r * s2).atan2(1.0 - r * c2);
                    let jac = (1.0 + 2.0 * r * (2.0 * th).cos() + r * r) / (1.0 - r * r);
                    (th, h * jac)
                }
            }
        })
        .collect()
}

fn backproject(
    model: &DiskModel,
    g: &impl BoundaryFunction,
    points: &[Complex64],
    cfg: &RaySamplingConfig,
    divide_by_mu: bool,
) -> Result<Vec<Complex64>> {
    cfg.validate()?;
    points
        .par_iter()
        .map(|&z| {
            let rho = z.norm();
            if rho > model.radius() * (1.0 + 1e-12) {
                return Err(GxrayError::OutOfDisk { radius: rho, limit: model.radius() });
            }
            let omega = z.arg();
            let mut acc = Complex64::new(0.0, 0.0);
            for (th, w) in fiber_nodes(model, rho, cfg) {
                let foot = model.footpoint(PhasePoint::new(rho, omega, omega + th))?;
                let mut v = g.eval(foot) * w;
                if divide_by_mu {
                    v /= foot.alpha.cos();
                }
                acc += v;
            }
            Ok(acc)
        })
        .collect()
}

/// Backprojection `int_{S_x} g(footpoint) d theta`, the adjoint for the
/// `mu d Sigma^2` boundary measure.
pub fn adjoint_sharp(model: &DiskModel, g: &impl BoundaryFunction, points: &[Complex64], cfg: &RaySamplingConfig) -> Result<Vec<Complex64>> {
    backproject(model, g, points, cfg, false)
}

/// Adjoint for the `d Sigma^2` boundary measure and `dVol` on the disk.
pub fn adjoint_star(model: &DiskModel, g: &impl BoundaryFunction, points: &[Complex64], cfg: &RaySamplingConfig) -> Result<Vec<Complex64>> {
    backproject(model, g, points, cfg, true)
}

pub fn adjoint_star_grid(g: &impl BoundaryFunction, grid: &DiskGrid, cfg: &RaySamplingConfig) -> Result<GridField> {
    let values = adjoint_star(grid.model(), g, &grid.points(), cfg)?;
    Ok(GridField { grid: grid.clone(), values })
}

/// `I_0^* I_0 f` on `disk`, via an intermediate sinogram on `sino` that is
/// interpolated with `cfg.interpolation`.
pub fn normal_operator(f: &impl DiskFunction, sino: &SinogramGrid, disk: &DiskGrid, cfg: &RaySamplingConfig) -> Result<GridField> {
    let data = forward(f, sino, cfg)?;
    let it = SinogramInterpolant::new(&data, cfg.interpolation);
    let out = adjoint_star_grid(&it, disk, cfg)?;
    if it.edge_hits() > 0 {
        log::debug!("normal operator: {} interpolations used the antiperiodic continuation", it.edge_hits());
    }
    Ok(out)
}

/// Default intermediate sinogram grid for a degree-`degree` normal operator.
pub fn normal_operator_grid(model: DiskModel, degree: usize) -> SinogramGrid {
    let n = (4 * degree).max(16);
    SinogramGrid::new(model, n + 1, n).expect("valid sizes")
}
