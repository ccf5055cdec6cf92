//! Constant-curvature disk model, fan-beam coordinates, geodesics and the
//! maps that straighten curved geometry onto the Euclidean unit disk.

use crate::error::{GxrayError, Result};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

/// Wrap an angle into `[0, 2pi)`.
pub fn wrap_2pi(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Wrap an angle into `(-pi, pi]`.
pub fn wrap_pi(x: f64) -> f64 {
    let r = wrap_2pi(x);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Disk of radius `R` with metric `(1 + kappa |z|^2)^{-2} |dz|^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskModel {
    kappa: f64,
    radius: f64,
    lambda: f64,
}

impl DiskModel {
    pub fn new(kappa: f64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(GxrayError::NonpositiveRadius(radius));
        }
        if !kappa.is_finite() {
            return Err(GxrayError::InvalidArgument(format!("kappa = {kappa}")));
        }
        let lambda = kappa * radius * radius;
        if lambda.abs() >= 1.0 {
            return Err(GxrayError::SimplicityViolation { kappa, radius, lambda });
        }
        Ok(Self { kappa, radius, lambda })
    }

    /// Euclidean unit disk.
    pub fn reference() -> Self {
        Self { kappa: 0.0, radius: 1.0, lambda: 0.0 }
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `kappa R^2`.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn is_euclidean(&self) -> bool {
        self.kappa == 0.0
    }

    /// `(1 - lambda) / (1 + lambda)`.
    pub fn ratio(&self) -> f64 {
        (1.0 - self.lambda) / (1.0 + self.lambda)
    }

    /// Singular-value constant `4 pi R / (1 - lambda)`.
    pub fn c_const(&self) -> f64 {
        4.0 * PI * self.radius / (1.0 - self.lambda)
    }

    /// Factor in `d Sigma^2 = R/(1+lambda) d beta d alpha`.
    pub fn measure_factor(&self) -> f64 {
        self.radius / (1.0 + self.lambda)
    }

    /// Weight `w = (1 + kappa|z|^2) / (1 - kappa|z|^2)`.
    pub fn weight(&self, z: Complex64) -> f64 {
        self.weight_r2(z.norm_sqr())
    }

    pub fn weight_r2(&self, r2: f64) -> f64 {
        (1.0 + self.kappa * r2) / (1.0 - self.kappa * r2)
    }

    /// Riemannian area density with respect to `rho d rho d omega`.
    pub fn volume_density(&self, r2: f64) -> f64 {
        let d = 1.0 + self.kappa * r2;
        1.0 / (d * d)
    }

    /// `s(alpha)`; continuous on `[-pi/2, pi/2]` with `s(+-pi/2) = +-pi/2`.
    pub fn s_map(&self, alpha: f64) -> f64 {
        let q = self.ratio();
        (q * alpha.sin()).atan2(alpha.cos())
    }

    pub fn s_derivative(&self, alpha: f64) -> f64 {
        let q = self.ratio();
        let (s, c) = alpha.sin_cos();
        q / (c * c + q * q * s * s)
    }

    pub fn s_inverse(&self, a: f64) -> f64 {
        let q = self.ratio();
        a.sin().atan2(q * a.cos())
    }

    /// Radial part of the straightening map, acting on `|z|`.
    pub fn phi_radius(&self, rho: f64) -> f64 {
        let t = rho / self.radius;
        (1.0 - self.lambda) * t / (1.0 - self.lambda * t * t)
    }

    /// Inverse of [`Self::phi_radius`]; `None` when the argument leaves the
    /// domain on which the inverse is real.
    pub fn phi_radius_inverse(&self, rho_ref: f64) -> Option<f64> {
        let l = self.lambda;
        let disc = (1.0 - l) * (1.0 - l) + 4.0 * l * rho_ref * rho_ref;
        if disc < 0.0 {
            return None;
        }
        Some(self.radius * 2.0 * rho_ref / ((1.0 - l) + disc.sqrt()))
    }

    /// Straightening map onto the Euclidean unit disk.
    pub fn phi(&self, z: Complex64) -> Complex64 {
        let t2 = z.norm_sqr() / (self.radius * self.radius);
        z * ((1.0 - self.lambda) / (self.radius * (1.0 - self.lambda * t2)))
    }

    pub fn phi_inverse(&self, zeta: Complex64) -> Option<Complex64> {
        let r = zeta.norm();
        if r == 0.0 {
            return Some(Complex64::new(0.0, 0.0));
        }
        self.phi_radius_inverse(r).map(|p| zeta * (p / r))
    }

    fn check_radius(&self, rho: f64) -> Result<()> {
        if !(rho >= 0.0) || rho > self.radius * (1.0 + 1e-12) {
            return Err(GxrayError::OutOfDisk { radius: rho, limit: self.radius });
        }
        Ok(())
    }

    /// Fiber map on the unit tangent bundle, in polar coordinates at angle
    /// `omega = 0`: `(rho, theta) -> (rho', theta')`.
    pub fn psi_map(&self, rho: f64, theta: f64) -> Result<(f64, f64)> {
        self.check_radius(rho)?;
        let rho = rho.min(self.radius);
        let t = rho / self.radius;
        let r = self.lambda * t * t;
        let (s2, c2) = (2.0 * theta).sin_cos();
        Ok((self.phi_radius(rho), theta - (r * s2).atan2(1.0 + r * c2)))
    }

    /// `d theta' / d theta` written through the footpoint angle.
    pub fn psi_theta_jacobian(&self, point: PhasePoint) -> Result<f64> {
        let foot = self.footpoint(point)?;
        let t = point.rho / self.radius;
        let r = self.lambda * t * t;
        Ok(((1.0 - r) / (1.0 + r)) * ((1.0 + self.lambda) / (1.0 - self.lambda))
            * self.s_derivative(foot.alpha))
    }

    /// Entry coordinates of the geodesic through a phase-space point, computed
    /// by straightening to the Euclidean disk.
    pub fn footpoint(&self, point: PhasePoint) -> Result<FanBeamCoord> {
        let (rho_ref, theta_ref) = self.psi_map(point.rho, point.theta - point.omega)?;
        let a_e = (-rho_ref * theta_ref.sin()).clamp(-1.0, 1.0).asin();
        let b_e = theta_ref - PI - a_e;
        Ok(FanBeamCoord::new(point.omega + b_e, self.s_inverse(a_e)))
    }

    /// Entry coordinates found by intersecting the geodesic with the boundary
    /// circle directly.
    pub fn footpoint_traced(&self, point: PhasePoint) -> Result<FanBeamCoord> {
        self.check_radius(point.rho)?;
        let rho = point.rho.min(self.radius);
        let k = self.kappa;
        let r2 = self.radius * self.radius;
        let th = point.theta - point.omega;
        let e = Complex64::from_polar(1.0, th);
        let a = 1.0 - k * k * rho * rho * r2;
        let b = 2.0 * rho * th.cos() * (1.0 + k * r2);
        let c = rho * rho - r2;
        let disc = (b * b - 4.0 * a * c).max(0.0);
        let t = if c == 0.0 {
            if b > 0.0 {
                -b / a
            } else {
                0.0
            }
        } else if b >= 0.0 {
            (-b - disc.sqrt()) / (2.0 * a)
        } else {
            2.0 * c / (-b + disc.sqrt())
        };
        let den = Complex64::new(1.0, 0.0) - e * (k * rho * t);
        let entry = (e * t + rho) / den;
        let dir = th - 2.0 * den.arg();
        let beta = entry.arg();
        let alpha = wrap_pi(dir - beta - PI);
        Ok(FanBeamCoord::new(point.omega + beta, alpha))
    }

    /// Geodesic entering at `R e^{i beta}` with angle `alpha` to the inner normal.
    pub fn geodesic(&self, coord: FanBeamCoord) -> Result<GeodesicArc> {
        let ca = coord.alpha.cos();
        if coord.alpha.abs() >= FRAC_PI_2 || ca <= 1e-14 {
            return Err(GxrayError::TangentRay { alpha: coord.alpha });
        }
        let x_exit = 2.0 * self.radius * ca / (1.0 - self.lambda);
        let arc = GeodesicArc {
            model: *self,
            coord,
            rot: Complex64::from_polar(1.0, coord.beta),
            e_alpha: Complex64::from_polar(1.0, coord.alpha),
            x_exit,
            tau: 0.0,
        };
        let tau = self.distance(arc.entry(), arc.exit());
        Ok(GeodesicArc { tau, ..arc })
    }

    /// Riemannian distance between two points of the disk.
    pub fn distance(&self, z1: Complex64, z2: Complex64) -> f64 {
        let num = (z1 - z2).norm();
        let den = (Complex64::new(1.0, 0.0) + z1.conj() * z2 * self.kappa).norm();
        let x = num / den;
        if self.kappa > 0.0 {
            let sk = self.kappa.sqrt();
            (sk * x).atan() / sk
        } else if self.kappa < 0.0 {
            let sk = (-self.kappa).sqrt();
            (sk * x).atanh() / sk
        } else {
            x
        }
    }

    /// Scattering relation on fan-beam coordinates.
    pub fn scattering(&self, coord: FanBeamCoord) -> FanBeamCoord {
        FanBeamCoord::new(coord.beta + PI + 2.0 * self.s_map(coord.alpha), PI - coord.alpha)
    }

    /// Scattering relation followed by reversal of direction; an involution.
    pub fn antipodal_scattering(&self, coord: FanBeamCoord) -> FanBeamCoord {
        FanBeamCoord::new(coord.beta + PI + 2.0 * self.s_map(coord.alpha), -coord.alpha)
    }
}

/// Boundary point `R e^{i beta}` and angle `alpha` from the inner normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FanBeamCoord {
    pub beta: f64,
    pub alpha: f64,
}

impl FanBeamCoord {
    pub fn new(beta: f64, alpha: f64) -> Self {
        Self { beta: wrap_2pi(beta), alpha }
    }
}

/// Point `rho e^{i omega}` with unit direction `e^{i theta}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub rho: f64,
    pub omega: f64,
    pub theta: f64,
}

impl PhasePoint {
    pub fn new(rho: f64, omega: f64, theta: f64) -> Self {
        Self { rho, omega, theta }
    }

    pub fn position(&self) -> Complex64 {
        Complex64::from_polar(self.rho, self.omega)
    }
}

/// Geodesic chord, parametrized by the Moebius parameter `x in [0, x_exit]`.
#[derive(Debug, Clone, Copy)]
pub struct GeodesicArc {
    model: DiskModel,
    coord: FanBeamCoord,
    rot: Complex64,
    e_alpha: Complex64,
    x_exit: f64,
    tau: f64,
}

impl GeodesicArc {
    pub fn coord(&self) -> FanBeamCoord {
        self.coord
    }

    pub fn x_exit(&self) -> f64 {
        self.x_exit
    }

    /// Riemannian length of the chord.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn entry(&self) -> Complex64 {
        self.rot * self.model.radius
    }

    pub fn exit(&self) -> Complex64 {
        self.point(self.x_exit)
    }

    pub fn point(&self, x: f64) -> Complex64 {
        let r = self.model.radius;
        let num = Complex64::new(r, 0.0) - self.e_alpha * x;
        let den = Complex64::new(1.0, 0.0) + self.e_alpha * (r * self.model.kappa * x);
        self.rot * num / den
    }

    fn den(&self, x: f64) -> Complex64 {
        Complex64::new(1.0, 0.0) + self.e_alpha * (self.model.radius * self.model.kappa * x)
    }

    /// Riemannian speed `dt/dx`.
    pub fn speed(&self, x: f64) -> f64 {
        let z = self.point(x);
        (1.0 + self.model.lambda) / self.den(x).norm_sqr() / (1.0 + self.model.kappa * z.norm_sqr())
    }

    /// Direction angle of the tangent at parameter `x`.
    pub fn direction(&self, x: f64) -> f64 {
        let d = -self.e_alpha / (self.den(x) * self.den(x));
        self.coord.beta + d.arg()
    }

    /// Quadrature nodes `(point, weight)` for `int f dt` using Gauss-Legendre
    /// nodes in `x`.
    pub fn quadrature<'a>(&'a self, rule: &'a crate::quadrature::GaussLegendre) -> impl Iterator<Item = (Complex64, f64)> + 'a {
        let half = 0.5 * self.x_exit;
        let radius = self.model.radius;
        rule.nodes()
            .iter()
            .zip(rule.weights())
            .map(move |(&t, &w)| {
                let x = half * (t + 1.0);
                let mut z = self.point(x);
                let n = z.norm();
                if n > radius {
                    z *= radius / n;
                }
                (z, w * half * self.speed(x))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussLegendre;
    use approx::assert_relative_eq;

    fn models() -> Vec<DiskModel> {
        [(0.0, 1.0), (0.5, 1.0), (-0.5, 1.0), (0.9, 1.0), (-0.9, 1.0), (0.3, 1.5)]
            .iter()
            .map(|&(k, r)| DiskModel::new(k, r).unwrap())
            .collect()
    }

    #[test]
    fn constructor_rejects_bad_models() {
        assert!(matches!(DiskModel::new(1.0, 1.0), Err(GxrayError::SimplicityViolation { .. })));
        assert!(matches!(DiskModel::new(-1.2, 1.0), Err(GxrayError::SimplicityViolation { .. })));
        assert!(matches!(DiskModel::new(0.0, 0.0), Err(GxrayError::NonpositiveRadius(_))));
        assert!(matches!(DiskModel::new(0.0, -1.0), Err(GxrayError::NonpositiveRadius(_))));
    }

    #[test]
    fn derived_constants() {
        let m = DiskModel::new(0.5, 1.0).unwrap();
        assert_relative_eq!(m.lambda(), 0.5);
        assert_relative_eq!(m.c_const(), 8.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(m.measure_factor(), 2.0 / 3.0, max_relative = 1e-15);
        let r = DiskModel::reference();
        assert_relative_eq!(r.c_const(), 4.0 * PI);
        assert_eq!(r.measure_factor(), 1.0);
    }

    #[test]
    fn s_map_is_identity_when_flat() {
        let m = DiskModel::reference();
        for i in 0..50 {
            let a = -1.5 + 3.0 * i as f64 / 49.0;
            assert_relative_eq!(m.s_map(a), a, epsilon = 1e-15);
            assert_relative_eq!(m.s_derivative(a), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn s_map_endpoints_and_inverse() {
        for m in models() {
            assert_relative_eq!(m.s_map(FRAC_PI_2), FRAC_PI_2, epsilon = 1e-14);
            assert_relative_eq!(m.s_map(-FRAC_PI_2), -FRAC_PI_2, epsilon = 1e-14);
            for i in 0..41 {
                let a = -1.55 + 3.1 * i as f64 / 40.0;
                assert_relative_eq!(m.s_inverse(m.s_map(a)), a, epsilon = 1e-13);
                let h = 1e-5;
                let fd = (m.s_map(a + h) - m.s_map(a - h)) / (2.0 * h);
                assert_relative_eq!(fd, m.s_derivative(a), max_relative = 1e-7);
            }
        }
    }

    #[test]
    fn phi_maps_boundary_to_unit_circle() {
        for m in models() {
            assert_relative_eq!(m.phi_radius(m.radius()), 1.0, epsilon = 1e-14);
            for i in 0..=20 {
                let rho = m.radius() * i as f64 / 20.0;
                let back = m.phi_radius_inverse(m.phi_radius(rho)).unwrap();
                assert_relative_eq!(back, rho, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn diameter_length_matches_closed_form() {
        let m = DiskModel::new(0.5, 1.0).unwrap();
        let g = m.geodesic(FanBeamCoord::new(0.3, 0.0)).unwrap();
        let sk = 0.5f64.sqrt();
        assert_relative_eq!(g.tau(), 2.0 / sk * (sk * 1.0).atan(), max_relative = 1e-14);
    }

    #[test]
    fn exit_point_and_length() {
        let rule = GaussLegendre::new(512);
        for m in models() {
            for &(b, a) in &[(0.2, 0.4), (2.0, -1.1), (5.0, 1.4), (1.0, 0.0)] {
                let c = FanBeamCoord::new(b, a);
                let g = m.geodesic(c).unwrap();
                assert_relative_eq!(g.exit().norm(), m.radius(), max_relative = 1e-13);
                let expect = m.scattering(c).beta;
                assert!(wrap_pi(g.exit().arg() - expect).abs() < 1e-12);
                let len: f64 = g.quadrature(&rule).map(|(_, w)| w).sum();
                assert_relative_eq!(len, g.tau(), max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn tangent_ray_rejected() {
        let m = DiskModel::reference();
        assert!(matches!(m.geodesic(FanBeamCoord::new(0.0, FRAC_PI_2)), Err(GxrayError::TangentRay { .. })));
    }

    #[test]
    fn antipodal_scattering_is_involution() {
        for m in models() {
            let c = FanBeamCoord::new(1.3, 0.7);
            let back = m.antipodal_scattering(m.antipodal_scattering(c));
            assert!(wrap_pi(back.beta - c.beta).abs() < 1e-13);
            assert_relative_eq!(back.alpha, c.alpha);
        }
    }

    #[test]
    fn footpoint_matches_tracing() {
        for m in models() {
            for &(r, w, t) in &[(0.3, 0.5, 2.0), (0.8, -1.0, 0.1), (0.0, 0.0, 1.0), (0.95, 3.0, -2.5)] {
                let p = PhasePoint::new(r * m.radius(), w, t);
                let a = m.footpoint(p).unwrap();
                let b = m.footpoint_traced(p).unwrap();
                assert!(wrap_pi(a.beta - b.beta).abs() < 1e-12, "{a:?} {b:?}");
                assert_relative_eq!(a.alpha, b.alpha, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn footpoint_lies_on_geodesic() {
        let rule = GaussLegendre::new(16);
        for m in models() {
            let c = FanBeamCoord::new(0.9, -0.6);
            let g = m.geodesic(c).unwrap();
            for &t in rule.nodes() {
                let x = 0.5 * g.x_exit() * (t + 1.0);
                let z = g.point(x);
                let p = PhasePoint::new(z.norm(), z.arg(), g.direction(x));
                let f = m.footpoint(p).unwrap();
                assert!(wrap_pi(f.beta - c.beta).abs() < 1e-11);
                assert_relative_eq!(f.alpha, c.alpha, epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn out_of_disk_rejected() {
        let m = DiskModel::reference();
        assert!(matches!(m.psi_map(1.1, 0.0), Err(GxrayError::OutOfDisk { .. })));
    }
}
