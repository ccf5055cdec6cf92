//! Zernike coefficient storage and spectrally represented disk functions.

use super::zernike::{curved_zernike_norm, tri_index, tri_len, zernike_all_into, zernike_norm};
use crate::geometry::DiskModel;
use num_complex::Complex64;

/// Coefficients `c_{n,k}`, `0 <= k <= n <= degree`, in triangular order.
#[derive(Debug, Clone, PartialEq)]
pub struct ZernikeCoeffs {
    degree: usize,
    data: Vec<Complex64>,
}

impl ZernikeCoeffs {
    pub fn zeros(degree: usize) -> Self {
        Self { degree, data: vec![Complex64::new(0.0, 0.0); tri_len(degree)] }
    }

    pub fn from_fn(degree: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut c = Self::zeros(degree);
        for n in 0..=degree {
            for k in 0..=n {
                c.set(n, k, f(n, k));
            }
        }
        c
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn get(&self, n: usize, k: usize) -> Complex64 {
        if n <= self.degree && k <= n {
            self.data[tri_index(n, k)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    pub fn set(&mut self, n: usize, k: usize, v: Complex64) {
        assert!(n <= self.degree && k <= n, "({n},{k}) outside coefficient table");
        self.data[tri_index(n, k)] = v;
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..=self.degree).flat_map(move |n| (0..=n).map(move |k| (n, k, self.data[tri_index(n, k)])))
    }

    pub fn map(&self, f: impl Fn(usize, usize, Complex64) -> Complex64) -> Self {
        Self::from_fn(self.degree, |n, k| f(n, k, self.get(n, k)))
    }

    /// Copy with a different degree, truncating or zero-padding.
    pub fn resized(&self, degree: usize) -> Self {
        Self::from_fn(degree, |n, k| self.get(n, k))
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let d = self.degree.max(other.degree);
        let mut m: f64 = 0.0;
        for n in 0..=d {
            for k in 0..=n {
                m = m.max((self.get(n, k) - other.get(n, k)).norm());
            }
        }
        m
    }

    pub fn sub(&self, other: &Self) -> Self {
        let d = self.degree.max(other.degree);
        Self::from_fn(d, |n, k| self.get(n, k) - other.get(n, k))
    }

    /// Evaluate `sum c_{n,k} Z_{n,k}(zeta) / ||Z_{n,k}||` on the unit disk.
    pub fn eval_reference(&self, zeta: Complex64) -> Complex64 {
        let mut buf = vec![Complex64::new(0.0, 0.0); tri_len(self.degree)];
        zernike_all_into(self.degree, zeta, &mut buf, &mut Vec::new());
        let mut acc = Complex64::new(0.0, 0.0);
        for n in 0..=self.degree {
            let inv = 1.0 / zernike_norm(n);
            for k in 0..=n {
                let i = tri_index(n, k);
                acc += self.data[i] * buf[i] * inv;
            }
        }
        acc
    }
}

/// How coefficients represent a function: `Plain` means `f = sum c Z_hat`,
/// `Weighted` means `f = w sum c Z_hat`. The curved `Z_hat` already carries
/// one factor of `w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Frame {
    Plain,
    Weighted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub model: DiskModel,
    pub frame: Frame,
    pub coeffs: ZernikeCoeffs,
}

impl SpectralField {
    pub fn new(model: DiskModel, frame: Frame, coeffs: ZernikeCoeffs) -> Self {
        Self { model, frame, coeffs }
    }

    /// Single normalized basis element `Z_hat_{n,k}`.
    pub fn basis(model: DiskModel, frame: Frame, n: usize, k: usize) -> Self {
        let mut c = ZernikeCoeffs::zeros(n);
        c.set(n, k, Complex64::new(1.0, 0.0));
        Self { model, frame, coeffs: c }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.degree()
    }

    /// Pointwise synthesis.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let m = &self.model;
        let zeta = m.phi(z);
        let w = m.weight(z);
        let frame = match self.frame {
            Frame::Plain => w,
            Frame::Weighted => w * w,
        };
        // curved norm = R/(1-lambda) * reference norm
        let scale = frame * zernike_norm(0) / curved_zernike_norm(m, 0);
        self.coeffs.eval_reference(zeta) * scale
    }

    /// Same function with each coefficient transformed.
    pub fn map(&self, f: impl Fn(usize, usize, Complex64) -> Complex64) -> Self {
        Self { model: self.model, frame: self.frame, coeffs: self.coeffs.map(f) }
    }
}
