use gxray_core::basis::{psi_eval, psi_norm};
use gxray_core::io;
use gxray_core::phantom::Phantom;
use gxray_core::transform::DiskFunction;
use gxray_core::DiskModel;
use std::path::Path;
use std::process::{Command, Output};

fn gxray(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gxray")).args(args).output().expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn constant_phantom_gives_chord_lengths() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    let o = gxray(&["project", "--kappa", "0", "--radius", "1", "--phantom", "const", "--nbeta", "8", "--nalpha", "8", "--format", "csv", "--out", p(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let sino = io::read_sinogram(&out).unwrap();
    for (i, c) in sino.grid.coords().iter().enumerate() {
        assert!((sino.values[i].re - 2.0 * c.alpha.cos()).abs() < 1e-12);
    }
}

#[test]
fn curved_zernike_phantom_projects_to_singular_function() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("z.gxr");
    let o = gxray(&["project", "--kappa", "0.5", "--radius", "1", "--phantom", "zernike:2,1", "--nbeta", "9", "--nalpha", "8", "--out", p(&out)]);
    assert!(o.status.success());
    let sino = io::read_sinogram(&out).unwrap();
    let m = DiskModel::new(0.5, 1.0).unwrap();
    let scale = (8.0 * std::f64::consts::PI / 3.0).sqrt() / psi_norm(&m);
    for (i, c) in sino.grid.coords().iter().enumerate() {
        let expect = psi_eval(&m, 2, 1, *c).unwrap() * scale;
        assert!((sino.values[i] - expect).norm() < 1e-10, "{} vs {}", sino.values[i], expect);
    }
    assert!(out.with_extension("gxr.meta.txt").exists());
}

#[test]
fn bad_flags_exit_2() {
    assert_eq!(gxray(&["project", "--radius", "1", "--out", "/tmp/x"]).status.code(), Some(2));
    assert_eq!(gxray(&["project", "--kappa", "0", "--nbeta", "2", "--out", "/tmp/x"]).status.code(), Some(2));
    assert_eq!(gxray(&["project", "--kappa", "2", "--out", "/tmp/x"]).status.code(), Some(2));
    assert_eq!(gxray(&["project", "--kappa", "0", "--phantom", "blob", "--out", "/tmp/x"]).status.code(), Some(2));
}

#[test]
fn corrupted_magic_exit_3_and_mismatch_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.gxr");
    assert!(gxray(&["project", "--kappa", "0.2", "--nbeta", "33", "--nalpha", "32", "--out", p(&out)]).status.success());
    let field = dir.path().join("f.gxf");
    let o = gxray(&["reconstruct", p(&out), "--kappa", "0.3", "--degree", "8", "--out", p(&field)]);
    assert_eq!(o.status.code(), Some(4));
    let mut bytes = std::fs::read(&out).unwrap();
    bytes[..4].copy_from_slice(b"XXXX");
    std::fs::write(&out, bytes).unwrap();
    let o = gxray(&["reconstruct", p(&out), "--degree", "8", "--out", p(&field)]);
    assert_eq!(o.status.code(), Some(3));
    let o = gxray(&["reconstruct", p(&dir.path().join("missing")), "--out", p(&field)]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn gaussian_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let sino = dir.path().join("g.gxr");
    let field = dir.path().join("g.gxf");
    assert!(gxray(&["project", "--kappa", "0", "--phantom", "gaussian", "--out", p(&sino)]).status.success());
    let o = gxray(&["reconstruct", p(&sino), "--degree", "40", "--method", "svd", "--out", p(&field)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("kernel_energy_fraction=") && stdout.contains("residual_misfit="));
    let f = io::read_field(&field).unwrap();
    let truth = Phantom::gaussian().on(*f.grid.model());
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..f.grid.n_rho() {
        for j in 0..f.grid.n_omega() {
            let t = truth.eval(f.grid.point(i, j));
            num += (f.get(i, j) - t).norm_sqr() * f.grid.weight_dvol(i);
            den += t.norm_sqr() * f.grid.weight_dvol(i);
        }
    }
    assert!((num / den).sqrt() < 1e-3, "{}", (num / den).sqrt());
}

#[test]
fn identity_filter_equals_half_alpha_bitwise() {
    let dir = tempfile::tempdir().unwrap();
    let sino = dir.path().join("s.gxr");
    assert!(gxray(&["project", "--kappa", "-0.4", "--radius", "1.2", "--phantom", "ring", "--nbeta", "65", "--nalpha", "64", "--out", p(&sino)]).status.success());
    let run = |extra: &[&str], name: &str| {
        let c = dir.path().join(name);
        let f = dir.path().join(format!("{name}.gxf"));
        let mut args = vec!["reconstruct", p(&sino), "--degree", "20", "--out", p(&f), "--coeffs", p(&c)];
        args.extend_from_slice(extra);
        assert!(gxray(&args).status.success());
        (std::fs::read(c).unwrap(), std::fs::read(f).unwrap())
    };
    let a = run(&["--alpha-exponent", "0.5"], "a");
    let b = run(&["--filter", "identity"], "b");
    let c = run(&["--method", "filter:power:0"], "c");
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn noisy_projection_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |seed: &str, name: &str| {
        let out = dir.path().join(name);
        let args = ["project", "--kappa", "0.3", "--nbeta", "17", "--nalpha", "16", "--noise", "0.01", "--seed", seed, "--format", "csv", "--out", p(&out)];
        assert!(gxray(&args).status.success());
        std::fs::read(out).unwrap()
    };
    let a = run("7", "a.csv");
    assert_eq!(a, run("7", "b.csv"));
    assert_ne!(a, run("8", "c.csv"));
    assert!(String::from_utf8_lossy(&a).contains("# seed=7"));
}

#[test]
fn pgm_preview_with_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let sino = dir.path().join("s.gxr");
    let pgm = dir.path().join("f.pgm");
    assert!(gxray(&["project", "--kappa", "0", "--nbeta", "33", "--nalpha", "32", "--out", p(&sino)]).status.success());
    assert!(gxray(&["reconstruct", p(&sino), "--degree", "8", "--format", "pgm", "--pgm-size", "32", "--out", p(&pgm)]).status.success());
    assert!(std::fs::read(&pgm).unwrap().starts_with(b"P5\n32 32\n255\n"));
    assert!(std::fs::read_to_string(dir.path().join("f.pgm.scale.txt")).unwrap().contains("max="));
}

#[test]
fn verify_selection_and_rejection() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let o = gxray(&["verify", "--models", "0,1", "--only", "svd", "--out", p(&json)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    let results = report["results"].as_array().unwrap();
    assert_eq!(results.len(), 1);
    assert_eq!(results[0]["check"], "svd");
    assert_eq!(gxray(&["verify", "--models", "1,1"]).status.code(), Some(2));
    assert_eq!(gxray(&["verify", "--only", "bogus"]).status.code(), Some(2));
    // impossible tolerances fail the run
    let o = gxray(&["verify", "--models", "0,1", "--only", "zernike_calculus", "--tolerance-scale", "1e-30"]);
    assert_eq!(o.status.code(), Some(1));
}
