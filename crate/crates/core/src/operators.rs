//! The degenerate elliptic operator `L` on the disk, the boundary field `T`,
//! spectral functional calculus, the operator `C_-`, and Sobolev norms.

use crate::basis::{Frame, SpectralBoundary, SpectralField};
use crate::error::{GxrayError, Result};
use crate::filter::SpectralFilter;
use crate::geometry::{DiskModel, FanBeamCoord};
use crate::transform::{BoundaryFunction, DiskFunction};
use num_complex::Complex64;

/// Default bound on filter multipliers.
pub const DEFAULT_FILTER_BOUND: f64 = 1e12;

fn eig(n: usize) -> f64 {
    ((n + 1) * (n + 1)) as f64
}

fn require_plain(f: &SpectralField) -> Result<()> {
    if f.frame != Frame::Plain {
        return Err(GxrayError::InvalidArgument("operator acts on plain-frame fields".into()));
    }
    Ok(())
}

/// `L` in the curved Zernike basis: multiply `(n,k)` by `(n+1)^2`.
pub fn apply_l_spectral(f: &SpectralField) -> Result<SpectralField> {
    require_plain(f)?;
    Ok(f.map(|n, _, c| c * eig(n)))
}

/// `F(L)` in the curved Zernike basis.
pub fn functional_calculus_disk(filter: &SpectralFilter, f: &SpectralField, bound: f64) -> Result<SpectralField> {
    require_plain(f)?;
    let mult: Vec<f64> = (0..=f.degree()).map(|n| filter.checked(n, bound)).collect::<Result<_>>()?;
    Ok(f.map(|n, _, c| c * mult[n]))
}

/// `-T^2` in the boundary basis.
pub fn apply_minus_t2_spectral(b: &SpectralBoundary) -> SpectralBoundary {
    SpectralBoundary::new(b.model, b.coeffs.map(|n, _, c| c * eig(n)))
}

/// `F(-T^2)` in the boundary basis.
pub fn functional_calculus_boundary(filter: &SpectralFilter, b: &SpectralBoundary, bound: f64) -> Result<SpectralBoundary> {
    let mult: Vec<f64> = (0..=b.coeffs.degree()).map(|n| filter.checked(n, bound)).collect::<Result<_>>()?;
    Ok(SpectralBoundary::new(b.model, b.coeffs.map(|n, _, c| c * mult[n])))
}

/// `C_-`: `i` on `k < 0`, `0` on `0 <= k <= n`, `-i` on `k > n`.
pub fn cminus_spectral(b: &SpectralBoundary) -> SpectralBoundary {
    let i = Complex64::i();
    SpectralBoundary::new(
        b.model,
        b.coeffs.map(|n, k, c| {
            if k < 0 {
                c * i
            } else if k > n as i64 {
                -c * i
            } else {
                Complex64::new(0.0, 0.0)
            }
        }),
    )
}

/// `(sum (n+1)^{2s} |f_{n,k}|^2)^{1/2}`.
pub fn sobolev_norm_disk(s: f64, f: &SpectralField) -> f64 {
    f.coeffs.iter().map(|(n, _, c)| eig(n).powf(s) * c.norm_sqr()).sum::<f64>().sqrt()
}

/// `(sum (n+1)^{2s} |w_{n,k}|^2)^{1/2}`.
pub fn sobolev_norm_boundary_t(s: f64, b: &SpectralBoundary) -> f64 {
    b.coeffs.iter().map(|(n, _, c)| eig(n).powf(s) * c.norm_sqr()).sum::<f64>().sqrt()
}

/// Norm with coefficient multiplier `((n+1)^2 + (n-2k)^2)^{s/2}`.
pub fn sobolev_norm_boundary_classical(s: f64, b: &SpectralBoundary) -> f64 {
    b.coeffs
        .iter()
        .map(|(n, k, c)| {
            let m = n as f64 - 2.0 * k as f64;
            (eig(n) + m * m).powf(s) * c.norm_sqr()
        })
        .sum::<f64>()
        .sqrt()
}

const D1: [(f64, f64); 4] = [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)];
const D2: [(f64, f64); 5] = [(-2.0, -1.0), (-1.0, 16.0), (0.0, -30.0), (1.0, 16.0), (2.0, -1.0)];

/// Euclidean `L_e v = -Delta v + (E + 1)^2 v` at `zeta`, with `E` the Euler
/// field, by fourth-order central differences of step `h`.
pub fn apply_l_euclid_fd(v: &dyn Fn(Complex64) -> Result<Complex64>, zeta: Complex64, h: f64) -> Result<Complex64> {
    let at = |dx: f64, dy: f64| v(zeta + Complex64::new(dx * h, dy * h));
    let mut fx = Complex64::new(0.0, 0.0);
    let mut fy = fx;
    for &(o, c) in &D1 {
        fx += at(o, 0.0)? * c;
        fy += at(0.0, o)? * c;
    }
    fx /= 12.0 * h;
    fy /= 12.0 * h;
    let mut fxx = Complex64::new(0.0, 0.0);
    let mut fyy = fxx;
    for &(o, c) in &D2 {
        fxx += at(o, 0.0)? * c;
        fyy += at(0.0, o)? * c;
    }
    fxx /= 12.0 * h * h;
    fyy /= 12.0 * h * h;
    let mut fxy = Complex64::new(0.0, 0.0);
    for &(ox, cx) in &D1 {
        for &(oy, cy) in &D1 {
            fxy += at(ox, oy)? * (cx * cy);
        }
    }
    fxy /= 144.0 * h * h;
    let f0 = v(zeta)?;
    let (x, y) = (zeta.re, zeta.im);
    Ok(-(fxx + fyy) + fxx * (x * x) + fxy * (2.0 * x * y) + fyy * (y * y) + (fx * x + fy * y) * 3.0 + f0)
}

/// Pointwise `L f (z)` by conjugating the Euclidean operator through the
/// straightening map; derivatives by finite differences of step `h` in the
/// reference disk.
pub fn apply_l_pointwise(model: &DiskModel, f: &impl DiskFunction, z: Complex64, h: f64) -> Result<Complex64> {
    let rho = z.norm();
    if rho > model.radius() * (1.0 + 1e-12) {
        return Err(GxrayError::OutOfDisk { radius: rho, limit: model.radius() });
    }
    let v = |zeta: Complex64| -> Result<Complex64> {
        let x = model
            .phi_inverse(zeta)
            .ok_or(GxrayError::OutOfDisk { radius: zeta.norm(), limit: 1.0 })?;
        Ok(f.eval(x) / model.weight(x))
    };
    Ok(apply_l_euclid_fd(&v, model.phi(z), h)? * model.weight(z))
}

/// Pointwise `T u = sqrt(s') (d_beta - (1/s') d_alpha)(u / sqrt(s'))`.
pub fn apply_t_pointwise(model: &DiskModel, u: &impl BoundaryFunction, coord: FanBeamCoord, h: f64) -> Complex64 {
    let v = |b: f64, a: f64| u.eval(FanBeamCoord { beta: b, alpha: a }) / model.s_derivative(a).sqrt();
    let mut db = Complex64::new(0.0, 0.0);
    let mut da = db;
    for &(o, c) in &D1 {
        db += v(coord.beta + o * h, coord.alpha) * c;
        da += v(coord.beta, coord.alpha + o * h) * c;
    }
    db /= 12.0 * h;
    da /= 12.0 * h;
    let sp = model.s_derivative(coord.alpha);
    (db - da / sp) * sp.sqrt()
}

/// Pointwise `T^2 u`.
pub fn apply_t2_pointwise(model: &DiskModel, u: &impl BoundaryFunction, coord: FanBeamCoord, h: f64) -> Complex64 {
    let tu = |c: FanBeamCoord| apply_t_pointwise(model, u, c, h);
    apply_t_pointwise(model, &tu, coord, h)
}

/// Pointwise `D u = T^2 u + 2 tan(alpha) T u`.
pub fn apply_d_pointwise(model: &DiskModel, u: &impl BoundaryFunction, coord: FanBeamCoord, h: f64) -> Complex64 {
    apply_t2_pointwise(model, u, coord, h) + apply_t_pointwise(model, u, coord, h) * (2.0 * coord.alpha.tan())
}
