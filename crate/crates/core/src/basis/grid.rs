//! Sampling grids on the disk and on the fan-beam domain, with exact
//! analysis/synthesis for band-limited data.

use super::boundary::{psi_norm, BoundaryCoeffs, SpectralBoundary};
use super::spectral::{Frame, SpectralField, ZernikeCoeffs};
use super::zernike::{tri_index, zernike_norm, zernike_radial_table};
use crate::error::{GxrayError, Result};
use crate::geometry::{DiskModel, FanBeamCoord};
use crate::quadrature::GaussLegendre;
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Product grid: Gauss-Legendre in `|Phi(z)|^2`, equispaced in angle.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskGrid {
    model: DiskModel,
    n_omega: usize,
    ref_rho: Vec<f64>,
    rho: Vec<f64>,
    ref_weights: Vec<f64>,
}

impl DiskGrid {
    pub fn new(model: DiskModel, n_rho: usize, n_omega: usize) -> Result<Self> {
        if n_rho == 0 {
            return Err(GxrayError::ResolutionTooLow { what: "n_rho", got: 0, need: 1 });
        }
        if n_omega == 0 {
            return Err(GxrayError::ResolutionTooLow { what: "n_omega", got: 0, need: 1 });
        }
        let rule = GaussLegendre::new(n_rho);
        let (t, wt) = rule.on_interval(0.0, 1.0);
        let ref_rho: Vec<f64> = t.iter().map(|t| t.sqrt()).collect();
        let rho = ref_rho
            .iter()
            .map(|&r| model.phi_radius_inverse(r).expect("reference radius inside unit disk"))
            .collect();
        let ref_weights = wt.iter().map(|w| 0.5 * w * TAU / n_omega as f64).collect();
        Ok(Self { model, n_omega, ref_rho, rho, ref_weights })
    }

    /// Grid on which degree-`degree` analysis is exact.
    pub fn for_degree(model: DiskModel, degree: usize) -> Self {
        Self::new(model, degree + 2, 2 * degree + 2).expect("nonzero sizes")
    }

    pub fn model(&self) -> &DiskModel {
        &self.model
    }

    pub fn n_rho(&self) -> usize {
        self.rho.len()
    }

    pub fn n_omega(&self) -> usize {
        self.n_omega
    }

    pub fn len(&self) -> usize {
        self.n_rho() * self.n_omega
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn rho(&self, i: usize) -> f64 {
        self.rho[i]
    }

    pub fn ref_rho(&self, i: usize) -> f64 {
        self.ref_rho[i]
    }

    pub fn omega(&self, j: usize) -> f64 {
        TAU * j as f64 / self.n_omega as f64
    }

    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        Complex64::from_polar(self.rho[i], self.omega(j))
    }

    /// All nodes, radius-major.
    pub fn points(&self) -> Vec<Complex64> {
        (0..self.n_rho()).flat_map(|i| (0..self.n_omega).map(move |j| self.point(i, j))).collect()
    }

    /// Weight of ring `i` for integrals against `dA` of the reference disk.
    pub fn ref_weight(&self, i: usize) -> f64 {
        self.ref_weights[i]
    }

    /// Weight of ring `i` for integrals against `w dVol`.
    pub fn weight_w_dvol(&self, i: usize) -> f64 {
        let m = &self.model;
        let s = m.radius() / (1.0 - m.lambda());
        let w = m.weight_r2(self.rho[i] * self.rho[i]);
        s * s * self.ref_weights[i] / (w * w)
    }

    /// Weight of ring `i` for integrals against `dVol`.
    pub fn weight_dvol(&self, i: usize) -> f64 {
        self.weight_w_dvol(i) / self.model.weight_r2(self.rho[i] * self.rho[i])
    }

    pub fn sample(&self, f: impl Fn(Complex64) -> Complex64 + Sync) -> GridField {
        use rayon::prelude::*;
        let values = (0..self.len())
            .into_par_iter()
            .map(|idx| f(self.point(idx / self.n_omega, idx % self.n_omega)))
            .collect();
        GridField { grid: self.clone(), values }
    }
}

/// Samples on a [`DiskGrid`], radius-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    pub grid: DiskGrid,
    pub values: Vec<Complex64>,
}

impl GridField {
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.grid.n_omega() + j]
    }

    /// `L^2(w dVol)` inner product by grid quadrature.
    pub fn inner_w(&self, other: &GridField) -> Complex64 {
        self.inner_with(other, |i| self.grid.weight_w_dvol(i))
    }

    /// `L^2(dVol)` inner product by grid quadrature.
    pub fn inner_dvol(&self, other: &GridField) -> Complex64 {
        self.inner_with(other, |i| self.grid.weight_dvol(i))
    }

    fn inner_with(&self, other: &GridField, weight: impl Fn(usize) -> f64) -> Complex64 {
        let no = self.grid.n_omega();
        let mut acc = ZERO;
        for i in 0..self.grid.n_rho() {
            let w = weight(i);
            for j in 0..no {
                acc += self.values[i * no + j] * other.values[i * no + j].conj() * w;
            }
        }
        acc
    }
}

/// Project grid samples onto the curved Zernike basis up to `degree`.
pub fn analyze_disk(field: &GridField, degree: usize, frame: Frame) -> Result<SpectralField> {
    let grid = &field.grid;
    let need_rho = (degree + 2) / 2;
    if grid.n_rho() < need_rho {
        return Err(GxrayError::ResolutionTooLow { what: "n_rho", got: grid.n_rho(), need: need_rho });
    }
    if grid.n_omega() < 2 * degree + 1 {
        return Err(GxrayError::ResolutionTooLow { what: "n_omega", got: grid.n_omega(), need: 2 * degree + 1 });
    }
    let model = grid.model;
    let no = grid.n_omega();
    let nd = degree as i64;
    let mut coeffs = ZernikeCoeffs::zeros(degree);
    let scale = model.radius() / (1.0 - model.lambda());
    let mut ring = vec![ZERO; (2 * degree + 1) * grid.n_rho()];
    for i in 0..grid.n_rho() {
        let r2 = grid.rho(i) * grid.rho(i);
        let w = model.weight_r2(r2);
        let div = match frame {
            Frame::Plain => w,
            Frame::Weighted => w * w,
        };
        for m in -nd..=nd {
            let mut acc = ZERO;
            for j in 0..no {
                let e = Complex64::from_polar(1.0, -(m as f64) * grid.omega(j));
                acc += field.values[i * no + j] * e;
            }
            ring[i * (2 * degree + 1) + (m + nd) as usize] = acc / div;
        }
    }
    let tables: Vec<Vec<f64>> = (0..grid.n_rho()).map(|i| zernike_radial_table(degree, grid.ref_rho(i))).collect();
    for n in 0..=degree {
        let inv = scale / zernike_norm(n);
        for k in 0..=n {
            let m = n as i64 - 2 * k as i64;
            let mut acc = ZERO;
            for i in 0..grid.n_rho() {
                acc += ring[i * (2 * degree + 1) + (m + nd) as usize] * (tables[i][tri_index(n, k)] * grid.ref_weight(i));
            }
            coeffs.set(n, k, acc * inv);
        }
    }
    Ok(SpectralField::new(model, frame, coeffs))
}

/// Evaluate a spectral field on a grid.
pub fn synthesize_disk(field: &SpectralField, grid: &DiskGrid) -> GridField {
    let model = field.model;
    let degree = field.degree();
    let nd = degree as i64;
    let no = grid.n_omega();
    let scale = (1.0 - model.lambda()) / model.radius();
    let mut values = vec![ZERO; grid.len()];
    for i in 0..grid.n_rho() {
        let table = zernike_radial_table(degree, grid.ref_rho(i));
        let r2 = grid.rho(i) * grid.rho(i);
        let w = model.weight_r2(r2);
        let fac = scale
            * match field.frame {
                Frame::Plain => w,
                Frame::Weighted => w * w,
            };
        let mut by_m = vec![ZERO; 2 * degree + 1];
        for (n, k, c) in field.coeffs.iter() {
            let m = n as i64 - 2 * k as i64;
            by_m[(m + nd) as usize] += c * (table[tri_index(n, k)] / zernike_norm(n));
        }
        for j in 0..no {
            let om = grid.omega(j);
            let mut acc = ZERO;
            for (mi, b) in by_m.iter().enumerate() {
                if *b != ZERO {
                    acc += b * Complex64::from_polar(1.0, (mi as i64 - nd) as f64 * om);
                }
            }
            values[i * no + j] = acc * fac;
        }
    }
    GridField { grid: grid.clone(), values }
}

/// Fan-beam grid: `beta_i = 2 pi i / n_beta`, `alpha_j = s^{-1}(a_j)` with
/// `a_j` the midpoints of `n_alpha` equal cells of `(-pi/2, pi/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinogramGrid {
    pub model: DiskModel,
    pub n_beta: usize,
    pub n_alpha: usize,
}

impl SinogramGrid {
    pub fn new(model: DiskModel, n_beta: usize, n_alpha: usize) -> Result<Self> {
        if n_beta < 1 {
            return Err(GxrayError::ResolutionTooLow { what: "n_beta", got: n_beta, need: 1 });
        }
        if n_alpha < 2 {
            return Err(GxrayError::ResolutionTooLow { what: "n_alpha", got: n_alpha, need: 2 });
        }
        Ok(Self { model, n_beta, n_alpha })
    }

    pub fn len(&self) -> usize {
        self.n_beta * self.n_alpha
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn beta(&self, i: usize) -> f64 {
        TAU * i as f64 / self.n_beta as f64
    }

    pub fn ref_alpha(&self, j: usize) -> f64 {
        -FRAC_PI_2 + (j as f64 + 0.5) * PI / self.n_alpha as f64
    }

    pub fn alpha(&self, j: usize) -> f64 {
        self.model.s_inverse(self.ref_alpha(j))
    }

    pub fn coord(&self, i: usize, j: usize) -> FanBeamCoord {
        FanBeamCoord::new(self.beta(i), self.alpha(j))
    }

    /// All coordinates, beta-major.
    pub fn coords(&self) -> Vec<FanBeamCoord> {
        (0..self.n_beta).flat_map(|i| (0..self.n_alpha).map(move |j| self.coord(i, j))).collect()
    }

    /// Quadrature weight for `d Sigma^2` at column `j`.
    pub fn weight(&self, j: usize) -> f64 {
        self.model.measure_factor() * (TAU / self.n_beta as f64) * (PI / self.n_alpha as f64)
            / self.model.s_derivative(self.alpha(j))
    }

    pub fn sample(&self, g: impl Fn(FanBeamCoord) -> Complex64 + Sync) -> GridSinogram {
        use rayon::prelude::*;
        let values = (0..self.len())
            .into_par_iter()
            .map(|idx| g(self.coord(idx / self.n_alpha, idx % self.n_alpha)))
            .collect();
        GridSinogram { grid: *self, values }
    }

    /// Largest `k`-margin that analysis at `degree` can resolve.
    pub fn max_margin(&self, degree: usize) -> Option<usize> {
        let by_beta = (self.n_beta as i64 - 2 * degree as i64 - 1).div_euclid(4);
        let by_alpha = (self.n_alpha as i64 - 2 * degree as i64 - 2).div_euclid(2);
        let k = by_beta.min(by_alpha);
        (k >= 0).then_some(k as usize)
    }
}

/// Samples on a [`SinogramGrid`], beta-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSinogram {
    pub grid: SinogramGrid,
    pub values: Vec<Complex64>,
}

impl GridSinogram {
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.grid.n_alpha + j]
    }

    /// `L^2(d Sigma^2)` inner product by grid quadrature.
    pub fn inner(&self, other: &GridSinogram) -> Complex64 {
        let na = self.grid.n_alpha;
        let mut acc = ZERO;
        for j in 0..na {
            let w = self.grid.weight(j);
            let mut col = ZERO;
            for i in 0..self.grid.n_beta {
                col += self.values[i * na + j] * other.values[i * na + j].conj();
            }
            acc += col * w;
        }
        acc
    }

    pub fn energy(&self) -> f64 {
        self.inner(self).re
    }
}

/// Two-dimensional Fourier coefficients of `g / sqrt(s')` in `(beta, a)`,
/// over beta-frequencies `m_lo..=m_hi` and odd a-frequencies `|q| <= q_max`.
#[derive(Debug, Clone)]
pub struct FourierTable {
    m_lo: i64,
    m_hi: i64,
    q_max: i64,
    data: Vec<Complex64>,
}

impl FourierTable {
    fn q_count(q_max: i64) -> usize {
        (q_max + 1) as usize
    }

    fn index(&self, m: i64, q: i64) -> Option<usize> {
        if m < self.m_lo || m > self.m_hi || q.abs() > self.q_max || q.rem_euclid(2) != 1 {
            return None;
        }
        Some((m - self.m_lo) as usize * Self::q_count(self.q_max) + ((q + self.q_max) / 2) as usize)
    }

    pub fn get(&self, m: i64, q: i64) -> Complex64 {
        self.index(m, q).map_or(ZERO, |i| self.data[i])
    }

    fn zeros(m_lo: i64, m_hi: i64, q_max: i64) -> Self {
        let len = (m_hi - m_lo + 1) as usize * Self::q_count(q_max);
        Self { m_lo, m_hi, q_max, data: vec![ZERO; len] }
    }

    fn add(&mut self, m: i64, q: i64, v: Complex64) {
        let i = self.index(m, q).expect("frequency inside table");
        self.data[i] += v;
    }

    /// Discrete transform of a sinogram.
    pub fn from_sinogram(sino: &GridSinogram, m_lo: i64, m_hi: i64, q_max: i64) -> Self {
        use rayon::prelude::*;
        let grid = &sino.grid;
        let (nb, na) = (grid.n_beta, grid.n_alpha);
        let inv_sqrt: Vec<f64> = (0..na).map(|j| 1.0 / grid.model.s_derivative(grid.alpha(j)).sqrt()).collect();
        let twiddle: Vec<Complex64> = (0..nb).map(|i| Complex64::from_polar(1.0, -TAU * i as f64 / nb as f64)).collect();
        let n_m = (m_hi - m_lo + 1) as usize;
        // beta transform, per column
        let by_col: Vec<Vec<Complex64>> = (0..na)
            .into_par_iter()
            .map(|j| {
                (0..n_m)
                    .map(|mi| {
                        let m = m_lo + mi as i64;
                        let mut acc = ZERO;
                        for i in 0..nb {
                            let p = (m * i as i64).rem_euclid(nb as i64) as usize;
                            acc += sino.values[i * na + j] * twiddle[p];
                        }
                        acc * (inv_sqrt[j] / nb as f64)
                    })
                    .collect()
            })
            .collect();
        let qc = Self::q_count(q_max);
        let mut table = Self::zeros(m_lo, m_hi, q_max);
        let a_phase: Vec<Vec<Complex64>> = (0..qc)
            .map(|qi| {
                let q = -q_max + 2 * qi as i64;
                (0..na).map(|j| Complex64::from_polar(1.0 / na as f64, -(q as f64) * grid.ref_alpha(j))).collect()
            })
            .collect();
        table.data.par_chunks_mut(qc).enumerate().for_each(|(mi, row)| {
            for (qi, slot) in row.iter_mut().enumerate() {
                let mut acc = ZERO;
                for j in 0..na {
                    acc += by_col[j][mi] * a_phase[qi][j];
                }
                *slot = acc;
            }
        });
        table
    }

    /// Full-band table used for trigonometric interpolation of a sinogram.
    pub fn full_band(sino: &GridSinogram) -> Self {
        let mh = ((sino.grid.n_beta as i64) - 1) / 2;
        let na = sino.grid.n_alpha as i64;
        let q_max = if na % 2 == 0 { na - 1 } else { na - 2 };
        Self::from_sinogram(sino, -mh, mh, q_max)
    }

    /// Table of a spectral boundary function.
    pub fn from_spectral(b: &SpectralBoundary) -> Self {
        let d = b.coeffs.degree() as i64;
        let k = b.coeffs.margin() as i64;
        let mut t = Self::zeros(-d - 2 * k, d + 2 * k, 2 * d + 2 * k + 1);
        let nrm = 2.0 * PI * 2.0 * psi_norm(&b.model);
        for (n, kk, c) in b.coeffs.iter() {
            let m = n as i64 - 2 * kk;
            let n1 = n as i64 + 1;
            let sgn = if n % 2 == 0 { 1.0 } else { -1.0 };
            t.add(m, m + n1, c * (sgn / nrm));
            t.add(m, m - n1, c / nrm);
        }
        t
    }

    /// Evaluate the trigonometric sum at `(beta, a)`; multiply by
    /// `sqrt(s'(alpha))` to recover the sinogram value.
    pub fn eval(&self, beta: f64, a: f64) -> Complex64 {
        let qc = Self::q_count(self.q_max);
        let ea = Complex64::from_polar(1.0, 2.0 * a);
        let base = Complex64::from_polar(1.0, -(self.q_max as f64) * a);
        let eb = Complex64::from_polar(1.0, beta);
        let mut pb = Complex64::from_polar(1.0, self.m_lo as f64 * beta);
        let mut acc = ZERO;
        for mi in 0..(self.m_hi - self.m_lo + 1) as usize {
            let row = &self.data[mi * qc..(mi + 1) * qc];
            let mut pa = base;
            let mut s = ZERO;
            for v in row {
                s += v * pa;
                pa *= ea;
            }
            acc += s * pb;
            pb *= eb;
        }
        acc
    }
}

/// Project a sinogram onto `psi_hat_{n,k}` for `n <= degree` and
/// `-margin <= k <= n + margin`.
pub fn analyze_boundary(sino: &GridSinogram, degree: usize, margin: usize) -> Result<SpectralBoundary> {
    let grid = &sino.grid;
    let need_b = 2 * degree + 4 * margin + 1;
    let need_a = 2 * degree + 2 * margin + 2;
    if grid.n_beta < need_b {
        return Err(GxrayError::ResolutionTooLow { what: "n_beta", got: grid.n_beta, need: need_b });
    }
    if grid.n_alpha < need_a {
        return Err(GxrayError::ResolutionTooLow { what: "n_alpha", got: grid.n_alpha, need: need_a });
    }
    let d = degree as i64;
    let k = margin as i64;
    let table = FourierTable::from_sinogram(sino, -d - 2 * k, d + 2 * k, 2 * d + 2 * k + 1);
    let scale = PI * 2.0 * psi_norm(&grid.model);
    let mut coeffs = BoundaryCoeffs::zeros(degree, margin);
    for (n, kk, _) in coeffs.clone().iter() {
        let m = n as i64 - 2 * kk;
        let n1 = n as i64 + 1;
        let sgn = if n % 2 == 0 { 1.0 } else { -1.0 };
        let v = (table.get(m, m + n1) + table.get(m, m - n1) * sgn) * (sgn * scale);
        coeffs.set(n, kk, v);
    }
    Ok(SpectralBoundary::new(grid.model, coeffs))
}

/// Evaluate a spectral boundary function on a grid.
pub fn synthesize_boundary(b: &SpectralBoundary, grid: &SinogramGrid) -> GridSinogram {
    let table = FourierTable::from_spectral(b);
    let model = b.model;
    grid.sample(|c| table.eval(c.beta, model.s_map(c.alpha)) * model.s_derivative(c.alpha).sqrt())
}
