use clap::{Args, Parser, Subcommand, ValueEnum};
use gxray_core::basis::{synthesize_disk, DiskGrid, SinogramGrid};
use gxray_core::inversion::{reconstruct, Method};
use gxray_core::io;
use gxray_core::phantom::Phantom;
use gxray_core::transform::{forward, RaySamplingConfig};
use gxray_core::verify::{self, CheckId, VerifyOptions};
use gxray_core::{DiskModel, GxrayError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gxray", version, about = "Geodesic X-ray transform on constant-curvature disks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the fan-beam sinogram of a phantom.
    Project(ProjectArgs),
    /// Reconstruct a field from a sinogram file.
    Reconstruct(ReconstructArgs),
    /// Run the verification suite.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Bin,
    Csv,
    Pgm,
}

#[derive(Args)]
struct ProjectArgs {
    #[arg(long, allow_negative_numbers = true)]
    kappa: f64,
    #[arg(long, default_value_t = 1.0)]
    radius: f64,
    #[arg(long, default_value_t = 256)]
    nbeta: usize,
    #[arg(long, default_value_t = 256)]
    nalpha: usize,
    /// const[:v] | gaussian[:cx,cy,width[,amp]] | ring[:r0,width] | zernike:n,k[,re[,im]][;...]
    #[arg(long, default_value = "gaussian")]
    phantom: String,
    /// Standard deviation of Gaussian noise added to each sample.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Bin)]
    format: Format,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Sinogram file, binary or CSV.
    input: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    kappa: Option<f64>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long, default_value_t = 40)]
    degree: usize,
    /// svd | alpha:<a> | filter:<filter>
    #[arg(long, conflicts_with_all = ["filter", "alpha_exponent"])]
    method: Option<String>,
    /// power:a | cutoff:N | cosine:N | tikhonov:mu | identity
    #[arg(long, conflicts_with = "alpha_exponent")]
    filter: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    alpha_exponent: Option<f64>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Bin)]
    format: Format,
    /// Also write the coefficients as CSV.
    #[arg(long)]
    coeffs: Option<PathBuf>,
    /// Side length of the PGM preview.
    #[arg(long, default_value_t = 256)]
    pgm_size: usize,
}

#[derive(Args)]
struct VerifyArgs {
    /// Semicolon-separated kappa,R pairs.
    #[arg(long, allow_hyphen_values = true)]
    models: Option<String>,
    /// Comma-separated check names.
    #[arg(long)]
    only: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    tolerance_scale: f64,
    #[arg(long, default_value_t = VerifyOptions::default().seed)]
    seed: u64,
    /// Write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Lib(GxrayError),
    ChecksFailed,
}

impl From<GxrayError> for Failure {
    fn from(e: GxrayError) -> Self {
        Self::Lib(e)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Ok(v) = std::env::var("GXR_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: GXR_THREADS must be a positive integer");
                return ExitCode::from(2);
            }
        }
    }
    let outcome = match cli.command {
        Command::Project(a) => project(a),
        Command::Reconstruct(a) => reconstruct_cmd(a),
        Command::Verify(a) => verify_cmd(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::ChecksFailed) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                GxrayError::Io(_) | GxrayError::Format(_) => 3,
                GxrayError::ModelMismatch { .. } => 4,
                _ => 2,
            })
        }
    }
}

fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn meta_text(pairs: &[(String, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
}

fn project(a: ProjectArgs) -> Result<(), Failure> {
    if a.nbeta < 4 || a.nalpha < 4 {
        return Err(Failure::Usage("--nbeta and --nalpha must be at least 4".into()));
    }
    if !(a.noise >= 0.0 && a.noise.is_finite()) {
        return Err(Failure::Usage("--noise must be a nonnegative number".into()));
    }
    if a.format == Format::Pgm {
        return Err(Failure::Usage("sinograms are written as bin or csv".into()));
    }
    let model = DiskModel::new(a.kappa, a.radius)?;
    let phantom = Phantom::parse(&a.phantom)?;
    let grid = SinogramGrid::new(model, a.nbeta, a.nalpha)?;
    let cfg = RaySamplingConfig::default();
    let mut sino = forward(&phantom.on(model), &grid, &cfg)?;
    if a.noise > 0.0 {
        // real measurement noise, drawn in sample order
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        let dist = Normal::new(0.0, a.noise).map_err(|e| Failure::Usage(e.to_string()))?;
        for v in sino.values.iter_mut() {
            v.re += dist.sample(&mut rng);
        }
    }
    let meta = vec![
        ("phantom".to_string(), a.phantom.clone()),
        ("noise".to_string(), a.noise.to_string()),
        ("seed".to_string(), a.seed.to_string()),
        ("nodes_per_ray".to_string(), cfg.nodes_per_ray.to_string()),
    ];
    match a.format {
        Format::Bin => {
            io::write_atomic(&a.out, &io::sinogram_to_bytes(&sino))?;
            let mut m = vec![("kappa".to_string(), a.kappa.to_string()), ("radius".to_string(), a.radius.to_string())];
            m.extend(meta);
            io::write_atomic(&sidecar(&a.out, ".meta.txt"), meta_text(&m).as_bytes())?;
        }
        _ => io::write_atomic(&a.out, io::sinogram_to_csv(&sino, &meta).as_bytes())?,
    }
    Ok(())
}

fn select_method(a: &ReconstructArgs) -> Result<Method, Failure> {
    Ok(if let Some(m) = &a.method {
        Method::parse(m)?
    } else if let Some(f) = &a.filter {
        Method::Filter(f.parse()?)
    } else if let Some(x) = a.alpha_exponent {
        if !x.is_finite() {
            return Err(Failure::Usage("--alpha-exponent must be finite".into()));
        }
        Method::Alpha(x)
    } else {
        Method::Svd
    })
}

fn reconstruct_cmd(a: ReconstructArgs) -> Result<(), Failure> {
    let method = select_method(&a)?;
    let sino = io::read_sinogram(&a.input)?;
    let found = sino.grid.model;
    let expected = DiskModel::new(a.kappa.unwrap_or(found.kappa()), a.radius.unwrap_or(found.radius()))?;
    if expected.kappa() != found.kappa() || expected.radius() != found.radius() {
        return Err(GxrayError::ModelMismatch {
            expected_kappa: expected.kappa(),
            expected_radius: expected.radius(),
            found_kappa: found.kappa(),
            found_radius: found.radius(),
        }
        .into());
    }
    let rec = reconstruct(&sino, &method, a.degree)?;
    println!("kernel_energy_fraction={:.6e}", rec.kernel_fraction);
    println!("residual_misfit={:.6e}", rec.residual_fraction);
    let meta = vec![
        ("input".to_string(), a.input.display().to_string()),
        ("degree".to_string(), a.degree.to_string()),
        ("method".to_string(), a.method.clone().unwrap_or_else(|| method_label(&method))),
    ];
    match a.format {
        Format::Pgm => {
            let (pgm, scale) = io::magnitude_pgm(&found, &rec.field, a.pgm_size);
            io::write_atomic(&a.out, &pgm)?;
            io::write_atomic(&sidecar(&a.out, ".scale.txt"), scale.as_bytes())?;
        }
        fmt => {
            let field = synthesize_disk(&rec.field, &DiskGrid::for_degree(found, a.degree));
            if fmt == Format::Bin {
                io::write_atomic(&a.out, &io::field_to_bytes(&field))?;
            } else {
                io::write_atomic(&a.out, io::field_to_csv(&field, &meta).as_bytes())?;
            }
        }
    }
    if let Some(p) = &a.coeffs {
        io::write_atomic(p, io::coeffs_to_csv(&rec.field.coeffs).as_bytes())?;
    }
    Ok(())
}

fn method_label(m: &Method) -> String {
    match m {
        Method::Svd => "svd".into(),
        Method::Alpha(x) => format!("alpha:{x}"),
        Method::Filter(f) => format!("filter:{f}"),
    }
}

fn parse_models(s: &str) -> Result<Vec<DiskModel>, Failure> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let (k, r) = p
                .split_once(',')
                .ok_or_else(|| Failure::Usage(format!("model '{p}' is not kappa,R")))?;
            let k: f64 = k.trim().parse().map_err(|_| Failure::Usage(format!("bad kappa in '{p}'")))?;
            let r: f64 = r.trim().parse().map_err(|_| Failure::Usage(format!("bad radius in '{p}'")))?;
            Ok(DiskModel::new(k, r)?)
        })
        .collect()
}

fn verify_cmd(a: VerifyArgs) -> Result<(), Failure> {
    let models = match &a.models {
        Some(s) => parse_models(s)?,
        None => verify::default_models(),
    };
    if models.is_empty() {
        return Err(Failure::Usage("--models is empty".into()));
    }
    let only: Vec<CheckId> = match &a.only {
        Some(s) => s.split(',').map(|c| c.trim().parse()).collect::<Result<_, _>>()?,
        None => Vec::new(),
    };
    if !(a.tolerance_scale > 0.0 && a.tolerance_scale.is_finite()) {
        return Err(Failure::Usage("--tolerance-scale must be positive".into()));
    }
    let opts = VerifyOptions { tolerance_scale: a.tolerance_scale, seed: a.seed };
    let report = verify::run(&models, &only, &opts);
    print!("{}", report.to_text());
    if let Some(p) = &a.out {
        io::write_atomic(p, report.to_json().as_bytes())?;
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::ChecksFailed)
    }
}
