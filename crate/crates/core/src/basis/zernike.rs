//! Zernike polynomials `Z_{n,k}` on the unit disk and their curved transplants.

use super::jacobi::{jacobi_all, jacobi_derivative};
use crate::error::{GxrayError, Result};
use crate::geometry::DiskModel;
use num_complex::Complex64;
use std::f64::consts::PI;

pub fn check_index(n: i64, k: i64) -> Result<()> {
    if n < 0 || k < 0 || k > n {
        return Err(GxrayError::IndexError { n, k });
    }
    Ok(())
}

/// Position of `(n, k)` in triangular storage.
#[inline]
pub fn tri_index(n: usize, k: usize) -> usize {
    n * (n + 1) / 2 + k
}

pub fn tri_len(degree: usize) -> usize {
    (degree + 1) * (degree + 2) / 2
}

/// `||Z_{n,k}||` in `L^2` of the unit disk.
pub fn zernike_norm(n: usize) -> f64 {
    (PI / (n as f64 + 1.0)).sqrt()
}

/// `||Z_{n,k}||` for the curved basis in `L^2(w dVol)`.
pub fn curved_zernike_norm(model: &DiskModel, n: usize) -> f64 {
    model.radius() / (1.0 - model.lambda()) * zernike_norm(n)
}

fn sign(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn radial_parts(n: usize, k: usize) -> (usize, usize) {
    let m = n as i64 - 2 * k as i64;
    (m.unsigned_abs() as usize, k.min(n - k))
}

/// `(-1)^k R_n^{|n-2k|}(rho)`.
pub fn zernike_radial(n: usize, k: usize, rho: f64) -> Result<f64> {
    check_index(n as i64, k as i64)?;
    let (am, j) = radial_parts(n, k);
    let mut p = Vec::with_capacity(j + 1);
    jacobi_all(j, 0.0, am as f64, 2.0 * rho * rho - 1.0, &mut p);
    Ok(sign(k) * rho.powi(am as i32) * p[j])
}

/// `d/d rho` of [`zernike_radial`].
pub fn zernike_radial_derivative(n: usize, k: usize, rho: f64) -> Result<f64> {
    check_index(n as i64, k as i64)?;
    let (am, j) = radial_parts(n, k);
    let x = 2.0 * rho * rho - 1.0;
    let mut p = Vec::with_capacity(j + 1);
    jacobi_all(j, 0.0, am as f64, x, &mut p);
    let dp = jacobi_derivative(j, 0.0, am as f64, x);
    let lead = if am == 0 { 0.0 } else { am as f64 * rho.powi(am as i32 - 1) * p[j] };
    Ok(sign(k) * (lead + rho.powi(am as i32) * dp * 4.0 * rho))
}

fn check_unit(z: Complex64) -> Result<()> {
    let r = z.norm();
    if r > 1.0 + 1e-12 {
        return Err(GxrayError::OutOfDisk { radius: r, limit: 1.0 });
    }
    Ok(())
}

/// `Z_{n,k}(z) = (-1)^k e^{i(n-2k) omega} R_n^{|n-2k|}(rho)`.
pub fn zernike_eval(n: usize, k: usize, z: Complex64) -> Result<Complex64> {
    check_unit(z)?;
    let m = n as i64 - 2 * k as i64;
    let r = zernike_radial(n, k, z.norm())?;
    Ok(Complex64::from_polar(r, m as f64 * z.arg()))
}

/// `dZ_{n,k}/dz` evaluated through the radial derivative.
pub fn zernike_dz_eval(n: usize, k: usize, z: Complex64) -> Result<Complex64> {
    check_unit(z)?;
    let rho = z.norm();
    let m = n as f64 - 2.0 * k as f64;
    let r = zernike_radial(n, k, rho)?;
    let dr = zernike_radial_derivative(n, k, rho)?;
    let radial = if rho == 0.0 {
        if m == 1.0 {
            2.0 * dr
        } else {
            0.0
        }
    } else {
        dr + m * r / rho
    };
    Ok(Complex64::from_polar(0.5 * radial, (m - 1.0) * z.arg()))
}

/// All `Z_{n,k}(z)` with `n <= degree`, in triangular order.
pub fn zernike_all(degree: usize, z: Complex64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); tri_len(degree)];
    zernike_all_into(degree, z, &mut out, &mut Vec::new());
    out
}

/// Like [`zernike_all`] writing into `out`; `scratch` is reused between calls.
pub fn zernike_all_into(degree: usize, z: Complex64, out: &mut [Complex64], scratch: &mut Vec<f64>) {
    let rho = z.norm();
    let omega = z.arg();
    let x = 2.0 * rho * rho - 1.0;
    let nd = degree as i64;
    for m in -nd..=nd {
        let am = m.unsigned_abs() as usize;
        let jmax = (degree - am) / 2;
        jacobi_all(jmax, 0.0, am as f64, x, scratch);
        let phase = Complex64::from_polar(rho.powi(am as i32), m as f64 * omega);
        for j in 0..=jmax {
            let n = am + 2 * j;
            let k = ((n as i64 - m) / 2) as usize;
            out[tri_index(n, k)] = phase * (sign(k) * scratch[j]);
        }
    }
}

/// Signed radial values `(-1)^k R_n^{|n-2k|}(rho)` for all `n <= degree`.
pub fn zernike_radial_table(degree: usize, rho: f64) -> Vec<f64> {
    let mut out = vec![0.0; tri_len(degree)];
    let x = 2.0 * rho * rho - 1.0;
    let mut p = Vec::new();
    for am in 0..=degree {
        let jmax = (degree - am) / 2;
        jacobi_all(jmax, 0.0, am as f64, x, &mut p);
        let pw = rho.powi(am as i32);
        for j in 0..=jmax {
            let n = am + 2 * j;
            let v = pw * p[j];
            // m = +am and m = -am share the radial factor
            let k1 = (n - am) / 2;
            let k2 = (n + am) / 2;
            out[tri_index(n, k1)] = sign(k1) * v;
            out[tri_index(n, k2)] = sign(k2) * v;
        }
    }
    out
}

/// Unnormalized curved Zernike function `w (Z_{n,k} o Phi)`.
pub fn curved_zernike_eval(model: &DiskModel, n: usize, k: usize, z: Complex64) -> Result<Complex64> {
    let r = z.norm();
    if r > model.radius() * (1.0 + 1e-12) {
        return Err(GxrayError::OutOfDisk { radius: r, limit: model.radius() });
    }
    let zeta = model.phi(z);
    let zeta = if zeta.norm() > 1.0 { zeta / zeta.norm() } else { zeta };
    Ok(zernike_eval(n, k, zeta)? * model.weight(z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn low_order_closed_forms() {
        let z = Complex64::new(0.3, -0.4);
        let zb = z.conj();
        let one = Complex64::new(1.0, 0.0);
        let cases: [(usize, usize, Complex64); 6] = [
            (0, 0, one),
            (1, 0, z),
            (1, 1, -zb),
            (2, 0, z * z),
            (2, 1, -(2.0 * z * zb - one)),
            (2, 2, zb * zb),
        ];
        for (n, k, v) in cases {
            let got = zernike_eval(n, k, z).unwrap();
            assert!((got - v).norm() < 1e-15, "Z_{n},{k}: {got} vs {v}");
        }
    }

    #[test]
    fn boundary_value_is_unimodular() {
        let z = Complex64::from_polar(1.0, 0.7);
        for n in 0..12 {
            for k in 0..=n {
                let v = zernike_eval(n, k, z).unwrap();
                assert_relative_eq!(v.norm(), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn batch_matches_single() {
        let z = Complex64::new(-0.2, 0.55);
        let all = zernike_all(14, z);
        let table = zernike_radial_table(14, z.norm());
        for n in 0..=14 {
            for k in 0..=n {
                let v = zernike_eval(n, k, z).unwrap();
                assert!((all[tri_index(n, k)] - v).norm() < 1e-13);
                assert_relative_eq!(table[tri_index(n, k)], zernike_radial(n, k, z.norm()).unwrap(), epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn bad_indices() {
        assert!(matches!(zernike_eval(2, 3, Complex64::new(0.0, 0.0)), Err(GxrayError::IndexError { .. })));
        assert!(zernike_eval(2, 1, Complex64::new(1.5, 0.0)).is_err());
    }

    #[test]
    fn dz_matches_differences() {
        let z = Complex64::new(0.31, 0.22);
        let h = 1e-6;
        for n in 0..8 {
            for k in 0..=n {
                let fx = (zernike_eval(n, k, z + h).unwrap() - zernike_eval(n, k, z - h).unwrap()) / (2.0 * h);
                let iy = Complex64::new(0.0, h);
                let fy = (zernike_eval(n, k, z + iy).unwrap() - zernike_eval(n, k, z - iy).unwrap()) / (2.0 * h);
                let dz = (fx - Complex64::i() * fy) * 0.5;
                assert!((zernike_dz_eval(n, k, z).unwrap() - dz).norm() < 1e-8);
            }
        }
    }
}
