//! Test fields on the disk.

use crate::basis::{Frame, SpectralField, ZernikeCoeffs};
use crate::error::{GxrayError, Result};
use crate::geometry::DiskModel;
use crate::transform::DiskFunction;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Phantom description; lengths are in units of the disk radius.
#[derive(Debug, Clone, PartialEq)]
pub enum Phantom {
    Constant(f64),
    GaussianBump { center: Complex64, width: f64, amplitude: f64 },
    SmoothRing { radius: f64, width: f64 },
    /// `w sum c Z_hat_{n,k}`; its data is an exact combination of boundary
    /// basis functions.
    ZernikeCombo(Vec<(usize, usize, Complex64)>),
}

impl Phantom {
    pub fn gaussian() -> Self {
        Self::GaussianBump { center: Complex64::new(0.0, 0.0), width: 0.25, amplitude: 1.0 }
    }

    fn nums(s: &str, spec: &str) -> Result<Vec<f64>> {
        s.split(',')
            .map(|t| t.trim().parse::<f64>().ok().filter(|v| v.is_finite()))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| GxrayError::InvalidArgument(format!("invalid phantom '{spec}'")))
    }

    /// `const[:v]`, `gaussian[:cx,cy,width[,amp]]`, `ring[:r0,width]`,
    /// `zernike:n,k[,re[,im]][;n,k,...]`.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = || GxrayError::InvalidArgument(format!("invalid phantom '{spec}'"));
        let (kind, arg) = match spec.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (spec, None),
        };
        match kind {
            "const" => Ok(Self::Constant(match arg {
                Some(a) => *Self::nums(a, spec)?.first().ok_or_else(bad)?,
                None => 1.0,
            })),
            "gaussian" | "gaussian_bump" => match arg {
                None => Ok(Self::gaussian()),
                Some(a) => {
                    let v = Self::nums(a, spec)?;
                    if !(v.len() == 3 || v.len() == 4) || v[2] <= 0.0 {
                        return Err(bad());
                    }
                    Ok(Self::GaussianBump {
                        center: Complex64::new(v[0], v[1]),
                        width: v[2],
                        amplitude: v.get(3).copied().unwrap_or(1.0),
                    })
                }
            },
            "ring" | "smooth_ring" => match arg {
                None => Ok(Self::SmoothRing { radius: 0.5, width: 0.08 }),
                Some(a) => {
                    let v = Self::nums(a, spec)?;
                    if v.len() != 2 || v[1] <= 0.0 {
                        return Err(bad());
                    }
                    Ok(Self::SmoothRing { radius: v[0], width: v[1] })
                }
            },
            "zernike" | "zernike_combo" => {
                let a = arg.ok_or_else(bad)?;
                let mut terms = Vec::new();
                for part in a.split(';') {
                    let v = Self::nums(part, spec)?;
                    if v.len() < 2 || v.len() > 4 || v[0] < 0.0 || v[1] < 0.0 || v[0].fract() != 0.0 || v[1].fract() != 0.0 {
                        return Err(bad());
                    }
                    let (n, k) = (v[0] as usize, v[1] as usize);
                    if k > n {
                        return Err(GxrayError::IndexError { n: n as i64, k: k as i64 });
                    }
                    let c = Complex64::new(v.get(2).copied().unwrap_or(1.0), v.get(3).copied().unwrap_or(0.0));
                    terms.push((n, k, c));
                }
                Ok(Self::ZernikeCombo(terms))
            }
            _ => Err(bad()),
        }
    }

    /// Bind the phantom to a model.
    pub fn on(&self, model: DiskModel) -> PhantomField {
        let spectral = match self {
            Self::ZernikeCombo(terms) => {
                let degree = terms.iter().map(|t| t.0).max().unwrap_or(0);
                let mut c = ZernikeCoeffs::zeros(degree);
                for &(n, k, v) in terms {
                    c.set(n, k, c.get(n, k) + v);
                }
                Some(SpectralField::new(model, Frame::Weighted, c))
            }
            _ => None,
        };
        PhantomField { model, phantom: self.clone(), spectral }
    }
}

#[derive(Debug, Clone)]
pub struct PhantomField {
    model: DiskModel,
    phantom: Phantom,
    spectral: Option<SpectralField>,
}

impl PhantomField {
    pub fn model(&self) -> &DiskModel {
        &self.model
    }
}

impl DiskFunction for PhantomField {
    fn eval(&self, z: Complex64) -> Complex64 {
        let r = self.model.radius();
        let u = z / r;
        match &self.phantom {
            Phantom::Constant(v) => Complex64::new(*v, 0.0),
            Phantom::GaussianBump { center, width, amplitude } => {
                Complex64::new(amplitude * (-(u - center).norm_sqr() / (2.0 * width * width)).exp(), 0.0)
            }
            Phantom::SmoothRing { radius, width } => {
                let d = u.norm() - radius;
                Complex64::new((-d * d / (2.0 * width * width)).exp(), 0.0)
            }
            Phantom::ZernikeCombo(_) => self.spectral.as_ref().expect("built in on()").eval(z),
        }
    }
}

/// Coefficients with independent standard complex Gaussian entries.
pub fn random_coeffs(degree: usize, rng: &mut impl Rng) -> ZernikeCoeffs {
    let mut c = ZernikeCoeffs::zeros(degree);
    for n in 0..=degree {
        for k in 0..=n {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            c.set(n, k, Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2);
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_phantoms() {
        assert_eq!(Phantom::parse("const").unwrap(), Phantom::Constant(1.0));
        assert_eq!(Phantom::parse("gaussian").unwrap(), Phantom::gaussian());
        assert!(matches!(Phantom::parse("gaussian:0.1,0.2,0.15").unwrap(), Phantom::GaussianBump { width, .. } if width == 0.15));
        let z = Phantom::parse("zernike:2,1;3,0,0.5,1").unwrap();
        assert_eq!(z, Phantom::ZernikeCombo(vec![(2, 1, Complex64::new(1.0, 0.0)), (3, 0, Complex64::new(0.5, 1.0))]));
        assert!(matches!(Phantom::parse("zernike:2,3"), Err(GxrayError::IndexError { .. })));
        for bad in ["blob", "gaussian:1,2", "ring:0.5,-1", "zernike", "const:x"] {
            assert!(Phantom::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn gaussian_peak_and_scaling() {
        let m = DiskModel::new(0.1, 2.0).unwrap();
        let f = Phantom::parse("gaussian:0.5,0,0.2,3").unwrap().on(m);
        assert!((f.eval(Complex64::new(1.0, 0.0)).re - 3.0).abs() < 1e-15);
    }
}
