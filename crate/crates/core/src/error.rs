use thiserror::Error;

#[derive(Debug, Error)]
pub enum GxrayError {
    #[error("radius must be positive, got {0}")]
    NonpositiveRadius(f64),
    #[error("disk is not simple: kappa*R^2 = {lambda} (need |kappa|*R^2 < 1; kappa={kappa}, R={radius})")]
    SimplicityViolation { kappa: f64, radius: f64, lambda: f64 },
    #[error("point at radius {radius} lies outside the disk of radius {limit}")]
    OutOfDisk { radius: f64, limit: f64 },
    #[error("ray with alpha = {alpha} is tangent to the boundary")]
    TangentRay { alpha: f64 },
    #[error("invalid Zernike index (n={n}, k={k})")]
    IndexError { n: i64, k: i64 },
    #[error("grid too coarse: {what} is {got}, need at least {need}")]
    ResolutionTooLow { what: &'static str, got: usize, need: usize },
    #[error("filter multiplier {value} at s={s} exceeds bound {bound}")]
    FilterOverflow { s: f64, value: f64, bound: f64 },
    #[error("model mismatch: expected (kappa={expected_kappa}, R={expected_radius}), found (kappa={found_kappa}, R={found_radius})")]
    ModelMismatch {
        expected_kappa: f64,
        expected_radius: f64,
        found_kappa: f64,
        found_radius: f64,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, GxrayError>;
