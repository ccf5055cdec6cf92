//! File formats.
//!
//! Sinogram binary (`GXR1`): magic, `f64` kappa, `f64` radius, `u32` n_beta,
//! `u32` n_alpha, then `n_beta * n_alpha` pairs `(re, im)` of `f64`, beta-major,
//! all little-endian. Field binary (`GXF1`) has the same layout with
//! `n_rho, n_omega` on the [`DiskGrid`] of those sizes. CSV variants carry the
//! header values in `#` comment lines.

use crate::basis::{DiskGrid, GridField, GridSinogram, SinogramGrid, ZernikeCoeffs};
use crate::error::{GxrayError, Result};
use crate::geometry::DiskModel;
use crate::transform::DiskFunction;
use num_complex::Complex64;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

pub const SINOGRAM_MAGIC: &[u8; 4] = b"GXR1";
pub const FIELD_MAGIC: &[u8; 4] = b"GXF1";

/// Write through a temporary file and rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = PathBuf::from(path);
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    tmp.set_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

fn encode(magic: &[u8; 4], model: &DiskModel, a: usize, b: usize, values: &[Complex64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(4 + 16 + 8 + 16 * values.len());
    out.extend_from_slice(magic);
    out.extend_from_slice(&model.kappa().to_le_bytes());
    out.extend_from_slice(&model.radius().to_le_bytes());
    out.extend_from_slice(&(a as u32).to_le_bytes());
    out.extend_from_slice(&(b as u32).to_le_bytes());
    for v in values {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

struct Decoded {
    model: DiskModel,
    a: usize,
    b: usize,
    values: Vec<Complex64>,
}

fn decode(magic: &[u8; 4], bytes: &[u8]) -> Result<Decoded> {
    if bytes.len() < 28 || &bytes[0..4] != magic {
        return Err(GxrayError::Format(format!("missing {} magic", String::from_utf8_lossy(magic))));
    }
    let f = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"));
    let u = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes")) as usize;
    let model = DiskModel::new(f(4), f(12))?;
    let (a, b) = (u(20), u(24));
    let n = a.checked_mul(b).ok_or_else(|| GxrayError::Format("header sizes overflow".into()))?;
    if bytes.len() != 28 + 16 * n {
        return Err(GxrayError::Format(format!("expected {} data bytes, found {}", 16 * n, bytes.len() - 28)));
    }
    let values = (0..n).map(|i| Complex64::new(f(28 + 16 * i), f(36 + 16 * i))).collect();
    Ok(Decoded { model, a, b, values })
}

pub fn sinogram_to_bytes(s: &GridSinogram) -> Vec<u8> {
    encode(SINOGRAM_MAGIC, &s.grid.model, s.grid.n_beta, s.grid.n_alpha, &s.values)
}

pub fn sinogram_from_bytes(bytes: &[u8]) -> Result<GridSinogram> {
    let d = decode(SINOGRAM_MAGIC, bytes)?;
    Ok(GridSinogram { grid: SinogramGrid::new(d.model, d.a, d.b)?, values: d.values })
}

pub fn field_to_bytes(f: &GridField) -> Vec<u8> {
    encode(FIELD_MAGIC, f.grid.model(), f.grid.n_rho(), f.grid.n_omega(), &f.values)
}

pub fn field_from_bytes(bytes: &[u8]) -> Result<GridField> {
    let d = decode(FIELD_MAGIC, bytes)?;
    Ok(GridField { grid: DiskGrid::new(d.model, d.a, d.b)?, values: d.values })
}

fn comments(out: &mut String, kind: &str, model: &DiskModel, dims: [(&str, usize); 2], extra: &[(String, String)]) {
    let _ = writeln!(out, "# gxray {kind}");
    let _ = writeln!(out, "# kappa={}", model.kappa());
    let _ = writeln!(out, "# radius={}", model.radius());
    for (k, v) in dims {
        let _ = writeln!(out, "# {k}={v}");
    }
    for (k, v) in extra {
        let _ = writeln!(out, "# {k}={v}");
    }
}

/// CSV sinogram with one row per sample.
pub fn sinogram_to_csv(s: &GridSinogram, extra: &[(String, String)]) -> String {
    let g = &s.grid;
    let mut out = String::new();
    comments(&mut out, "sinogram", &g.model, [("n_beta", g.n_beta), ("n_alpha", g.n_alpha)], extra);
    out.push_str("i_beta,j_alpha,beta,alpha,re,im\n");
    for i in 0..g.n_beta {
        for j in 0..g.n_alpha {
            let v = s.get(i, j);
            let _ = writeln!(out, "{i},{j},{},{},{},{}", g.beta(i), g.alpha(j), v.re, v.im);
        }
    }
    out
}

struct CsvTable {
    header: std::collections::HashMap<String, String>,
    rows: Vec<Vec<String>>,
}

fn parse_csv(text: &str, columns: &str) -> Result<CsvTable> {
    let mut header = std::collections::HashMap::new();
    let mut rows = Vec::new();
    let mut seen_columns = false;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(c) = line.strip_prefix('#') {
            if let Some((k, v)) = c.trim().split_once('=') {
                header.insert(k.trim().to_string(), v.trim().to_string());
            }
            continue;
        }
        if !seen_columns {
            if line != columns {
                return Err(GxrayError::Format(format!("expected column header '{columns}'")));
            }
            seen_columns = true;
            continue;
        }
        rows.push(line.split(',').map(|s| s.trim().to_string()).collect());
    }
    if !seen_columns {
        return Err(GxrayError::Format("missing CSV column header".into()));
    }
    Ok(CsvTable { header, rows })
}

fn header_num<T: std::str::FromStr>(t: &CsvTable, key: &str) -> Result<T> {
    t.header
        .get(key)
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| GxrayError::Format(format!("missing or invalid '{key}' header")))
}

fn cell<T: std::str::FromStr>(row: &[String], i: usize) -> Result<T> {
    row.get(i).and_then(|v| v.parse().ok()).ok_or_else(|| GxrayError::Format("malformed CSV row".into()))
}

pub fn sinogram_from_csv(text: &str) -> Result<GridSinogram> {
    let t = parse_csv(text, "i_beta,j_alpha,beta,alpha,re,im")?;
    let model = DiskModel::new(header_num(&t, "kappa")?, header_num(&t, "radius")?)?;
    let grid = SinogramGrid::new(model, header_num(&t, "n_beta")?, header_num(&t, "n_alpha")?)?;
    let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut filled = vec![false; grid.len()];
    for row in &t.rows {
        let (i, j): (usize, usize) = (cell(row, 0)?, cell(row, 1)?);
        if i >= grid.n_beta || j >= grid.n_alpha {
            return Err(GxrayError::Format(format!("sample index ({i},{j}) out of range")));
        }
        values[i * grid.n_alpha + j] = Complex64::new(cell(row, 4)?, cell(row, 5)?);
        filled[i * grid.n_alpha + j] = true;
    }
    if filled.iter().any(|f| !f) {
        return Err(GxrayError::Format("CSV sinogram is missing samples".into()));
    }
    Ok(GridSinogram { grid, values })
}

pub fn field_to_csv(f: &GridField, extra: &[(String, String)]) -> String {
    let g = &f.grid;
    let mut out = String::new();
    comments(&mut out, "field", g.model(), [("n_rho", g.n_rho()), ("n_omega", g.n_omega())], extra);
    out.push_str("i_rho,j_omega,rho,omega,re,im\n");
    for i in 0..g.n_rho() {
        for j in 0..g.n_omega() {
            let v = f.get(i, j);
            let _ = writeln!(out, "{i},{j},{},{},{},{}", g.rho(i), g.omega(j), v.re, v.im);
        }
    }
    out
}

pub fn field_from_csv(text: &str) -> Result<GridField> {
    let t = parse_csv(text, "i_rho,j_omega,rho,omega,re,im")?;
    let model = DiskModel::new(header_num(&t, "kappa")?, header_num(&t, "radius")?)?;
    let grid = DiskGrid::new(model, header_num(&t, "n_rho")?, header_num(&t, "n_omega")?)?;
    let no = grid.n_omega();
    let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
    for row in &t.rows {
        let (i, j): (usize, usize) = (cell(row, 0)?, cell(row, 1)?);
        if i >= grid.n_rho() || j >= no {
            return Err(GxrayError::Format(format!("sample index ({i},{j}) out of range")));
        }
        values[i * no + j] = Complex64::new(cell(row, 4)?, cell(row, 5)?);
    }
    Ok(GridField { grid, values })
}

/// Read a sinogram, binary or CSV, deciding by the first bytes.
pub fn read_sinogram(path: &Path) -> Result<GridSinogram> {
    let bytes = fs::read(path)?;
    if bytes.starts_with(SINOGRAM_MAGIC) {
        return sinogram_from_bytes(&bytes);
    }
    if bytes.first() == Some(&b'#') || bytes.starts_with(b"i_beta") {
        let text = String::from_utf8(bytes).map_err(|_| GxrayError::Format("CSV is not UTF-8".into()))?;
        return sinogram_from_csv(&text);
    }
    Err(GxrayError::Format("unrecognized sinogram file (bad magic)".into()))
}

pub fn read_field(path: &Path) -> Result<GridField> {
    let bytes = fs::read(path)?;
    if bytes.starts_with(FIELD_MAGIC) {
        return field_from_bytes(&bytes);
    }
    if bytes.first() == Some(&b'#') || bytes.starts_with(b"i_rho") {
        let text = String::from_utf8(bytes).map_err(|_| GxrayError::Format("CSV is not UTF-8".into()))?;
        return field_from_csv(&text);
    }
    Err(GxrayError::Format("unrecognized field file (bad magic)".into()))
}

/// Coefficient table with header `n,k,re,im`.
pub fn coeffs_to_csv(c: &ZernikeCoeffs) -> String {
    let mut out = String::from("n,k,re,im\n");
    for (n, k, v) in c.iter() {
        let _ = writeln!(out, "{n},{k},{},{}", v.re, v.im);
    }
    out
}

pub fn coeffs_from_csv(text: &str) -> Result<ZernikeCoeffs> {
    let t = parse_csv(text, "n,k,re,im")?;
    let mut entries = Vec::new();
    for row in &t.rows {
        let (n, k): (usize, usize) = (cell(row, 0)?, cell(row, 1)?);
        if k > n {
            return Err(GxrayError::IndexError { n: n as i64, k: k as i64 });
        }
        entries.push((n, k, Complex64::new(cell(row, 2)?, cell(row, 3)?)));
    }
    let degree = entries.iter().map(|e| e.0).max().unwrap_or(0);
    let mut c = ZernikeCoeffs::zeros(degree);
    for (n, k, v) in entries {
        c.set(n, k, v);
    }
    Ok(c)
}

/// 8-bit PGM of `|f|` on a `size x size` raster of the disk's bounding square
/// (zero outside), plus the linear scale as text for the sidecar file.
pub fn magnitude_pgm(model: &DiskModel, f: &impl DiskFunction, size: usize) -> (Vec<u8>, String) {
    use rayon::prelude::*;
    let r = model.radius();
    let mag: Vec<Option<f64>> = (0..size * size)
        .into_par_iter()
        .map(|idx| {
            let (row, col) = (idx / size, idx % size);
            let x = -r + (col as f64 + 0.5) * 2.0 * r / size as f64;
            let y = r - (row as f64 + 0.5) * 2.0 * r / size as f64;
            let z = Complex64::new(x, y);
            (z.norm() <= r).then(|| f.eval(z).norm())
        })
        .collect();
    let inside = mag.iter().flatten();
    let lo = inside.clone().cloned().fold(f64::INFINITY, f64::min);
    let hi = inside.cloned().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (0.0, 0.0) };
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut out = format!("P5\n{size} {size}\n255\n").into_bytes();
    out.extend(mag.iter().map(|m| match m {
        Some(v) => (((v - lo) / span) * 255.0).round().clamp(0.0, 255.0) as u8,
        None => 0,
    }));
    let sidecar = format!("# pixel = round(255 * (|f| - min) / (max - min))\nmin={lo}\nmax={hi}\n");
    (out, sidecar)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_sino() -> GridSinogram {
        let m = DiskModel::new(0.5, 1.0).unwrap();
        let g = SinogramGrid::new(m, 5, 4).unwrap();
        g.sample(|c| Complex64::new(c.beta, c.alpha * 3.0))
    }

    #[test]
    fn binary_round_trip_is_exact() {
        let s = sample_sino();
        let bytes = sinogram_to_bytes(&s);
        assert_eq!(&bytes[..4], b"GXR1");
        assert_eq!(bytes.len(), 28 + 16 * 20);
        assert_eq!(sinogram_from_bytes(&bytes).unwrap(), s);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let s = sample_sino();
        let text = sinogram_to_csv(&s, &[("seed".into(), "7".into())]);
        assert!(text.contains("# seed=7"));
        assert_eq!(sinogram_from_csv(&text).unwrap(), s);
    }

    #[test]
    fn field_round_trips() {
        let m = DiskModel::new(-0.5, 1.0).unwrap();
        let g = DiskGrid::new(m, 4, 6).unwrap();
        let f = g.sample(|z| z * z);
        assert_eq!(field_from_bytes(&field_to_bytes(&f)).unwrap(), f);
        assert_eq!(field_from_csv(&field_to_csv(&f, &[])).unwrap(), f);
    }

    #[test]
    fn corrupted_inputs_rejected() {
        let s = sample_sino();
        let mut bytes = sinogram_to_bytes(&s);
        bytes[0] = b'X';
        assert!(matches!(sinogram_from_bytes(&bytes), Err(GxrayError::Format(_))));
        let bytes = sinogram_to_bytes(&s);
        assert!(matches!(sinogram_from_bytes(&bytes[..bytes.len() - 1]), Err(GxrayError::Format(_))));
        assert!(field_from_bytes(&bytes).is_err());
    }

    #[test]
    fn coeff_csv_round_trip() {
        let c = ZernikeCoeffs::from_fn(3, |n, k| Complex64::new(n as f64, -(k as f64)));
        let text = coeffs_to_csv(&c);
        assert!(text.starts_with("n,k,re,im\n"));
        assert_eq!(coeffs_from_csv(&text).unwrap(), c);
    }

    #[test]
    fn pgm_header_and_scale() {
        let m = DiskModel::reference();
        let (pgm, side) = magnitude_pgm(&m, &|z: Complex64| z, 8);
        assert!(pgm.starts_with(b"P5\n8 8\n255\n"));
        assert_eq!(pgm.len(), "P5\n8 8\n255\n".len() + 64);
        assert!(side.contains("max="));
    }
}
