//! Complex derivatives and the Beurling shift in Zernike coefficients on the
//! unit disk (normalized basis).

use super::spectral::ZernikeCoeffs;
use num_complex::Complex64;

/// Coefficients of `df/dz` for `f = sum c_{n,k} Z_hat_{n,k}`.
pub fn dz(f: &ZernikeCoeffs) -> ZernikeCoeffs {
    shift_derivative(f, 0, 1.0)
}

/// Coefficients of `df/dzbar`.
pub fn dzbar(f: &ZernikeCoeffs) -> ZernikeCoeffs {
    shift_derivative(f, 1, -1.0)
}

fn shift_derivative(f: &ZernikeCoeffs, dk: usize, sign0: f64) -> ZernikeCoeffs {
    let d = f.degree();
    if d == 0 {
        return ZernikeCoeffs::zeros(0);
    }
    ZernikeCoeffs::from_fn(d - 1, |n, k| {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut p = 0;
        let mut sign = sign0;
        while n + 1 + 2 * p <= d {
            acc += f.get(n + 1 + 2 * p, k + dk + p) * (sign * ((n + 2 + 2 * p) as f64).sqrt());
            sign = -sign;
            p += 1;
        }
        acc * ((n + 1) as f64).sqrt()
    })
}

/// Beurling transform: `Z_hat_{n,k} -> Z_hat_{n,k+1}`, with `k = n` sent to 0.
pub fn beurling(f: &ZernikeCoeffs) -> ZernikeCoeffs {
    ZernikeCoeffs::from_fn(f.degree(), |n, k| if k == 0 { Complex64::new(0.0, 0.0) } else { f.get(n, k - 1) })
}

/// Upper summation index in the unnormalized derivative expansion.
pub fn derivative_top(n: usize, k: usize) -> usize {
    if k < n - k {
        k
    } else {
        n - k - 1
    }
}

/// `dZ_{n,k}/dz = sum_p (n - 2p)(-1)^p Z_{n-1-2p, k-p}` in unnormalized
/// Zernike polynomials, as `(n', k', coefficient)` triples.
pub fn dz_expansion(n: usize, k: usize) -> Vec<(usize, usize, f64)> {
    if n == 0 || k > n {
        return Vec::new();
    }
    if k == n {
        // Z_{n,n} = (-1)^n zbar^n is antiholomorphic
        return Vec::new();
    }
    (0..=derivative_top(n, k))
        .filter(|&p| k >= p)
        .map(|p| (n - 1 - 2 * p, k - p, (n - 2 * p) as f64 * if p % 2 == 0 { 1.0 } else { -1.0 }))
        .collect()
}

/// `||dZ_{n,k}/dz||^2 = pi (P + 1)(n - P)` with `P` from [`derivative_top`].
pub fn dz_norm_squared(n: usize, k: usize) -> f64 {
    if n == 0 || k == n {
        return 0.0;
    }
    let p = derivative_top(n, k) as f64;
    std::f64::consts::PI * (p + 1.0) * (n as f64 - p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::zernike::zernike_norm;
    use approx::assert_relative_eq;

    fn unit(n: usize, k: usize) -> ZernikeCoeffs {
        let mut c = ZernikeCoeffs::zeros(n);
        c.set(n, k, Complex64::new(1.0, 0.0));
        c
    }

    #[test]
    fn dz_of_z21_is_twice_z11() {
        let d = dz(&unit(2, 1));
        // dZ_{2,1}/dz = 2 Z_{1,1}
        let expect = 2.0 * zernike_norm(1) / zernike_norm(2);
        assert_relative_eq!(d.get(1, 1).re, expect, epsilon = 1e-14);
        assert_relative_eq!(expect, 6f64.sqrt(), epsilon = 1e-14);
        assert!(d.get(1, 0).norm() < 1e-15);
    }

    #[test]
    fn normalized_matches_unnormalized_expansion() {
        for n in 0..=10 {
            for k in 0..=n {
                let d = dz(&unit(n, k));
                let mut expect = ZernikeCoeffs::zeros(n.saturating_sub(1));
                for (n2, k2, c) in dz_expansion(n, k) {
                    expect.set(n2, k2, Complex64::new(c * zernike_norm(n2) / zernike_norm(n), 0.0));
                }
                assert!(d.max_abs_diff(&expect) < 1e-12, "({n},{k})");
                let nsq: f64 = d.iter().map(|(_, _, v)| v.norm_sqr()).sum::<f64>() * zernike_norm(n).powi(2);
                assert_relative_eq!(nsq, dz_norm_squared(n, k), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn beurling_shifts() {
        let b = beurling(&unit(4, 1));
        assert_eq!(b.get(4, 2), Complex64::new(1.0, 0.0));
        assert_eq!(beurling(&unit(4, 4)).norm(), 0.0);
    }
}
