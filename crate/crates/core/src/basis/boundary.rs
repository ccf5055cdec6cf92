//! Boundary basis `psi_{n,k}` on the fan-beam domain.

use crate::error::{GxrayError, Result};
use crate::geometry::{DiskModel, FanBeamCoord};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Euclidean `psi_{n,k}(beta, a)`, defined for every integer `k`.
pub fn psi_euclid(n: usize, k: i64, beta: f64, a: f64) -> Complex64 {
    let m = n as f64 - 2.0 * k as f64;
    let nf = n as f64 + 1.0;
    let sgn = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let inner = if n.is_multiple_of(2) {
        Complex64::new(2.0 * (nf * a).cos(), 0.0)
    } else {
        Complex64::new(0.0, 2.0 * (nf * a).sin())
    };
    Complex64::from_polar(sgn / (4.0 * PI), m * (beta + a)) * inner
}

/// Curved `psi_{n,k} = sqrt(s'(alpha)) psi^e_{n,k}(beta, s(alpha))`.
pub fn psi_eval(model: &DiskModel, n: i64, k: i64, coord: FanBeamCoord) -> Result<Complex64> {
    if n < 0 {
        return Err(GxrayError::IndexError { n, k });
    }
    let a = model.s_map(coord.alpha);
    Ok(psi_euclid(n as usize, k, coord.beta, a) * model.s_derivative(coord.alpha).sqrt())
}

/// `||psi_{n,k}||` in `L^2(d Sigma^2)`.
pub fn psi_norm(model: &DiskModel) -> f64 {
    model.measure_factor().sqrt() * 0.5
}

/// Coefficients indexed by `n <= degree` and `k` in the window
/// `[-margin, n + margin]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCoeffs {
    degree: usize,
    margin: usize,
    data: Vec<Complex64>,
}

impl BoundaryCoeffs {
    pub fn zeros(degree: usize, margin: usize) -> Self {
        let len = Self::offset(degree + 1, margin);
        Self { degree, margin, data: vec![Complex64::new(0.0, 0.0); len] }
    }

    fn offset(n: usize, margin: usize) -> usize {
        n * (n + 1) / 2 + 2 * margin * n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn margin(&self) -> usize {
        self.margin
    }

    pub fn contains(&self, n: usize, k: i64) -> bool {
        n <= self.degree && k >= -(self.margin as i64) && k <= (n + self.margin) as i64
    }

    fn index(&self, n: usize, k: i64) -> usize {
        debug_assert!(self.contains(n, k));
        Self::offset(n, self.margin) + (k + self.margin as i64) as usize
    }

    pub fn get(&self, n: usize, k: i64) -> Complex64 {
        if self.contains(n, k) {
            self.data[self.index(n, k)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    pub fn set(&mut self, n: usize, k: i64, v: Complex64) {
        assert!(self.contains(n, k), "({n},{k}) outside coefficient window");
        let i = self.index(n, k);
        self.data[i] = v;
    }

    /// `(n, k, value)` over the whole window.
    pub fn iter(&self) -> impl Iterator<Item = (usize, i64, Complex64)> + '_ {
        let m = self.margin as i64;
        (0..=self.degree).flat_map(move |n| (-m..=(n as i64 + m)).map(move |k| (n, k, self.get(n, k))))
    }

    pub fn map(&self, f: impl Fn(usize, i64, Complex64) -> Complex64) -> Self {
        let mut out = Self::zeros(self.degree, self.margin);
        for (n, k, v) in self.iter() {
            out.set(n, k, f(n, k, v));
        }
        out
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Norm of the part with `0 <= k <= n`.
    pub fn range_norm(&self) -> f64 {
        self.iter().filter(|&(n, k, _)| k >= 0 && k <= n as i64).map(|(_, _, v)| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Norm of the part outside `0 <= k <= n`.
    pub fn kernel_norm(&self) -> f64 {
        self.iter().filter(|&(n, k, _)| k < 0 || k > n as i64).map(|(_, _, v)| v.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Function on the fan-beam domain, `sum w_{n,k} psi_hat_{n,k}` with
/// normalized `psi_hat`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBoundary {
    pub model: DiskModel,
    pub coeffs: BoundaryCoeffs,
}

impl SpectralBoundary {
    pub fn new(model: DiskModel, coeffs: BoundaryCoeffs) -> Self {
        Self { model, coeffs }
    }

    /// Single normalized basis element.
    pub fn basis(model: DiskModel, n: usize, k: i64) -> Self {
        let margin = if k < 0 { (-k) as usize } else { (k - n as i64).max(0) as usize };
        let mut c = BoundaryCoeffs::zeros(n, margin);
        c.set(n, k, Complex64::new(1.0, 0.0));
        Self { model, coeffs: c }
    }

    pub fn eval(&self, coord: FanBeamCoord) -> Complex64 {
        let a = self.model.s_map(coord.alpha);
        let scale = self.model.s_derivative(coord.alpha).sqrt() / psi_norm(&self.model);
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, k, v) in self.coeffs.iter() {
            if v != Complex64::new(0.0, 0.0) {
                acc += v * psi_euclid(n, k, coord.beta, a);
            }
        }
        acc * scale
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }
}
