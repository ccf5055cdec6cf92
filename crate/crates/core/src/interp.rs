//! Interpolation of gridded sinograms at arbitrary fan-beam coordinates.
//!
//! Interpolation acts on `g / sqrt(s')` in the variables `(beta, s(alpha))`,
//! where the boundary basis is a plain trigonometric system: periodic in
//! `beta` and antiperiodic with period `pi` in `s(alpha)`.

use crate::basis::{FourierTable, GridSinogram};
use crate::geometry::FanBeamCoord;
use crate::transform::BoundaryFunction;
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::sync::atomic::{AtomicUsize, Ordering};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interpolation {
    Bilinear,
    #[default]
    Bicubic,
    /// Trigonometric interpolation; exact for data within the grid band.
    Spectral,
}

impl std::str::FromStr for Interpolation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "bilinear" => Ok(Self::Bilinear),
            "bicubic" => Ok(Self::Bicubic),
            "spectral" => Ok(Self::Spectral),
            other => Err(format!("unknown interpolation '{other}'")),
        }
    }
}

#[derive(Debug)]
pub struct SinogramInterpolant {
    sino: GridSinogram,
    method: Interpolation,
    reduced: Vec<Complex64>,
    table: Option<FourierTable>,
    edge_hits: AtomicUsize,
}

impl SinogramInterpolant {
    pub fn new(sino: &GridSinogram, method: Interpolation) -> Self {
        let grid = sino.grid;
        let na = grid.n_alpha;
        let inv: Vec<f64> = (0..na).map(|j| 1.0 / grid.model.s_derivative(grid.alpha(j)).sqrt()).collect();
        let reduced = sino.values.iter().enumerate().map(|(idx, v)| v * inv[idx % na]).collect();
        let table = (method == Interpolation::Spectral).then(|| FourierTable::full_band(sino));
        Self { sino: sino.clone(), method, reduced, table, edge_hits: AtomicUsize::new(0) }
    }

    pub fn method(&self) -> Interpolation {
        self.method
    }

    /// Evaluations that needed samples beyond the first or last alpha row;
    /// those use the antiperiodic continuation in `s(alpha)`.
    pub fn edge_hits(&self) -> usize {
        self.edge_hits.load(Ordering::Relaxed)
    }

    fn sample(&self, i: i64, j: i64) -> Complex64 {
        let g = &self.sino.grid;
        let nb = g.n_beta as i64;
        let na = g.n_alpha as i64;
        let ii = i.rem_euclid(nb) as usize;
        let jj = j.rem_euclid(na) as usize;
        let v = self.reduced[ii * g.n_alpha + jj];
        if j.div_euclid(na) % 2 == 0 {
            v
        } else {
            -v
        }
    }

    fn positions(&self, beta: f64, a: f64) -> (f64, f64) {
        let g = &self.sino.grid;
        let ub = beta.rem_euclid(TAU) / (TAU / g.n_beta as f64);
        let ua = (a + FRAC_PI_2) / (PI / g.n_alpha as f64) - 0.5;
        (ub, ua)
    }

    fn reduced_value(&self, beta: f64, a: f64) -> Complex64 {
        let na = self.sino.grid.n_alpha as f64;
        match self.method {
            Interpolation::Spectral => self.table.as_ref().expect("table built").eval(beta, a),
            Interpolation::Bilinear => {
                let (ub, ua) = self.positions(beta, a);
                if ua < 0.0 || ua > na - 1.0 {
                    self.edge_hits.fetch_add(1, Ordering::Relaxed);
                }
                let (i0, j0) = (ub.floor(), ua.floor());
                let (tb, ta) = (ub - i0, ua - j0);
                let (i0, j0) = (i0 as i64, j0 as i64);
                let v00 = self.sample(i0, j0);
                let v01 = self.sample(i0, j0 + 1);
                let v10 = self.sample(i0 + 1, j0);
                let v11 = self.sample(i0 + 1, j0 + 1);
                (v00 * (1.0 - ta) + v01 * ta) * (1.0 - tb) + (v10 * (1.0 - ta) + v11 * ta) * tb
            }
            Interpolation::Bicubic => {
                let (ub, ua) = self.positions(beta, a);
                if ua < 1.0 || ua > na - 2.0 {
                    self.edge_hits.fetch_add(1, Ordering::Relaxed);
                }
                let (i0, j0) = (ub.floor(), ua.floor());
                let wb = catmull_rom(ub - i0);
                let wa = catmull_rom(ua - j0);
                let (i0, j0) = (i0 as i64, j0 as i64);
                let mut acc = Complex64::new(0.0, 0.0);
                for (di, wbi) in wb.iter().enumerate() {
                    let mut row = Complex64::new(0.0, 0.0);
                    for (dj, waj) in wa.iter().enumerate() {
                        row += self.sample(i0 + di as i64 - 1, j0 + dj as i64 - 1) * *waj;
                    }
                    acc += row * *wbi;
                }
                acc
            }
        }
    }
}

fn catmull_rom(t: f64) -> [f64; 4] {
    let t2 = t * t;
    let t3 = t2 * t;
    [
        0.5 * (-t3 + 2.0 * t2 - t),
        0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
        0.5 * (-3.0 * t3 + 4.0 * t2 + t),
        0.5 * (t3 - t2),
    ]
}

impl BoundaryFunction for SinogramInterpolant {
    fn eval(&self, coord: FanBeamCoord) -> Complex64 {
        let model = &self.sino.grid.model;
        let a = model.s_map(coord.alpha);
        self.reduced_value(coord.beta, a) * model.s_derivative(coord.alpha).sqrt()
    }
}
