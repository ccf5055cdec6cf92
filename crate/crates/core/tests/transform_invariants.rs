use gxray_core::basis::{
    synthesize_disk, BoundaryCoeffs, DiskGrid, Frame, SinogramGrid, SpectralBoundary, SpectralField, ZernikeCoeffs,
};
use gxray_core::geometry::{DiskModel, FanBeamCoord};
use gxray_core::transform::{adjoint_sharp, adjoint_star, adjoint_star_grid, forward, forward_rays, RaySamplingConfig};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, TAU};

fn models() -> Vec<DiskModel> {
    [(0.0, 1.0), (0.5, 1.0), (-0.5, 1.0), (0.9, 1.0), (-0.9, 1.0), (0.3, 1.5)]
        .into_iter()
        .map(|(k, r)| DiskModel::new(k, r).unwrap())
        .collect()
}

fn coeffs(degree: usize, rng: &mut ChaCha8Rng) -> ZernikeCoeffs {
    let mut c = ZernikeCoeffs::zeros(degree);
    for n in 0..=degree {
        for k in 0..=n {
            c.set(n, k, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        }
    }
    c
}

fn boundary(model: DiskModel, degree: usize, margin: usize, rng: &mut ChaCha8Rng) -> SpectralBoundary {
    let mut c = BoundaryCoeffs::zeros(degree, margin);
    let keys: Vec<(usize, i64)> = c.iter().map(|(n, k, _)| (n, k)).collect();
    for (n, k) in keys {
        c.set(n, k, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    }
    SpectralBoundary::new(model, c)
}

fn interior_points(model: &DiskModel, count: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..count)
        .map(|_| Complex64::from_polar(model.radius() * 0.9 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..TAU)))
        .collect()
}

#[test]
fn backprojection_is_the_adjoint_for_dvol() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cfg = RaySamplingConfig::default();
    for m in models() {
        let (degree, margin) = (4, 2);
        let f = SpectralField::new(m, Frame::Weighted, coeffs(degree, &mut rng));
        let g = boundary(m, degree, margin, &mut rng);
        let sgrid = SinogramGrid::new(m, 4 * degree + 8 * margin + 9, 2 * degree + 2 * margin + 8).unwrap();
        let lhs = forward(&f, &sgrid, &cfg).unwrap().inner(&sgrid.sample(|c| g.eval(c)));
        let dgrid = DiskGrid::for_degree(m, 2 * degree + 4);
        let rhs = dgrid.sample(|z| f.eval(z)).inner_dvol(&adjoint_star_grid(&g, &dgrid, &cfg).unwrap());
        let scale = synthesize_disk(&f, &dgrid).inner_dvol(&synthesize_disk(&f, &dgrid)).re.sqrt() * g.norm();
        assert!((lhs - rhs).norm() <= 1e-6 * scale, "kappa={} R={}: {lhs} vs {rhs}", m.kappa(), m.radius());
    }
}

#[test]
fn sinograms_are_orientation_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let cfg = RaySamplingConfig::default();
    for m in models() {
        let f = SpectralField::new(m, Frame::Plain, coeffs(5, &mut rng));
        let coords: Vec<FanBeamCoord> =
            (0..40).map(|_| FanBeamCoord::new(rng.gen_range(0.0..TAU), rng.gen_range(-1.4..1.4))).collect();
        let images: Vec<FanBeamCoord> = coords.iter().map(|&c| m.antipodal_scattering(c)).collect();
        let a = forward_rays(&m, &f, &coords, &cfg).unwrap();
        let b = forward_rays(&m, &f, &images, &cfg).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-10 * (1.0 + x.norm()), "{x} vs {y}");
        }
    }
}

#[test]
fn odd_data_backprojects_to_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let cfg = RaySamplingConfig::default();
    for m in models() {
        let h = boundary(m, 5, 2, &mut rng);
        let odd = |c: FanBeamCoord| h.eval(c) - h.eval(m.antipodal_scattering(c));
        let pts = interior_points(&m, 20, &mut rng);
        let scale = h.norm();
        for v in adjoint_star(&m, &odd, &pts, &cfg).unwrap() {
            assert!(v.norm() < 1e-8 * scale, "{v}");
        }
    }
}

#[test]
fn constant_data_backprojects_to_full_circle() {
    let cfg = RaySamplingConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for m in models() {
        let pts = interior_points(&m, 10, &mut rng);
        for v in adjoint_sharp(&m, &|_: FanBeamCoord| Complex64::new(1.0, 0.0), &pts, &cfg).unwrap() {
            assert!((v.re - TAU).abs() < 1e-12 && v.im.abs() < 1e-12, "{v}");
        }
    }
}

/// Data in the reference model from the curved transform of the pulled back
/// and reweighted field.
#[test]
fn curved_transform_intertwines_with_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let cfg = RaySamplingConfig::default();
    let e = DiskModel::reference();
    for m in models() {
        let fe = SpectralField::new(e, Frame::Plain, coeffs(5, &mut rng));
        let pulled = |z: Complex64| fe.eval(m.phi(z)) * m.weight(z).powi(2);
        let (lambda, r) = (m.lambda(), m.radius());
        let k = (1.0 - lambda).powf(1.5) / (r * (1.0 + lambda).sqrt());
        let coords: Vec<FanBeamCoord> = (0..40)
            .map(|_| FanBeamCoord::new(rng.gen_range(0.0..TAU), rng.gen_range(-1.0..1.0) * (FRAC_PI_2 - 0.05)))
            .collect();
        let curved: Vec<FanBeamCoord> = coords.iter().map(|c| FanBeamCoord::new(c.beta, m.s_inverse(c.alpha))).collect();
        let lhs = forward_rays(&e, &fe, &coords, &cfg).unwrap();
        let rhs = forward_rays(&m, &pulled, &curved, &cfg).unwrap();
        for ((x, y), c) in lhs.iter().zip(&rhs).zip(&curved) {
            let y = y * (k / m.s_derivative(c.alpha).sqrt());
            assert!((x - y).norm() < 1e-6 * (1.0 + x.norm()), "kappa={}: {x} vs {y}", m.kappa());
        }
    }
}
