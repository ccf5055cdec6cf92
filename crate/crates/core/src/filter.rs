//! Spectral multipliers `F(s)` evaluated at the eigenvalues `s = (n+1)^2`.

use crate::error::{GxrayError, Result};
use std::fmt;
use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

#[derive(Clone)]
pub enum SpectralFilter {
    /// `s^alpha`; `Power(0)` is the identity.
    Power(f64),
    /// 1 for `n <= nc`, 0 beyond.
    Cutoff(usize),
    /// `cos(pi n / (2 nc))` for `n <= nc`, 0 beyond.
    Cosine(usize),
    /// `1 / (1 + mu sqrt(s))`, i.e. Tikhonov damping of the singular values.
    Tikhonov(f64),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for SpectralFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for SpectralFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Power(a) => write!(f, "power:{a}"),
            Self::Cutoff(n) => write!(f, "cutoff:{n}"),
            Self::Cosine(n) => write!(f, "cosine:{n}"),
            Self::Tikhonov(m) => write!(f, "tikhonov:{m}"),
            Self::Custom(_) => write!(f, "custom"),
        }
    }
}

impl SpectralFilter {
    pub fn identity() -> Self {
        Self::Power(0.0)
    }

    /// Degree `n` attached to the eigenvalue `s = (n+1)^2`.
    fn degree_of(s: f64) -> f64 {
        (s.sqrt() - 1.0).round()
    }

    pub fn eval(&self, s: f64) -> f64 {
        match self {
            Self::Power(a) => {
                if *a == 0.0 {
                    1.0
                } else {
                    s.powf(*a)
                }
            }
            Self::Cutoff(nc) => {
                if Self::degree_of(s) <= *nc as f64 {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Cosine(nc) => {
                let n = Self::degree_of(s);
                if n > *nc as f64 {
                    0.0
                } else if *nc == 0 {
                    1.0
                } else {
                    (FRAC_PI_2 * n / *nc as f64).cos()
                }
            }
            Self::Tikhonov(mu) => 1.0 / (1.0 + mu * s.sqrt()),
            Self::Custom(f) => f(s),
        }
    }

    /// `F((n+1)^2)`, failing when the magnitude exceeds `bound`.
    pub fn checked(&self, n: usize, bound: f64) -> Result<f64> {
        let s = ((n + 1) * (n + 1)) as f64;
        let v = self.eval(s);
        if !v.is_finite() || v.abs() > bound {
            return Err(GxrayError::FilterOverflow { s, value: v, bound });
        }
        Ok(v)
    }

    /// Parse `power:a`, `cutoff:N`, `cosine:N`, `tikhonov:mu`, or `identity`.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = || GxrayError::InvalidArgument(format!("invalid filter '{spec}'"));
        if spec == "identity" || spec == "none" {
            return Ok(Self::identity());
        }
        let (kind, arg) = spec.split_once(':').ok_or_else(bad)?;
        match kind {
            "power" => arg.parse::<f64>().ok().filter(|a| a.is_finite()).map(Self::Power).ok_or_else(bad),
            "cutoff" => arg.parse::<usize>().map(Self::Cutoff).map_err(|_| bad()),
            "cosine" => arg.parse::<usize>().map(Self::Cosine).map_err(|_| bad()),
            "tikhonov" => arg.parse::<f64>().ok().filter(|m| *m >= 0.0 && m.is_finite()).map(Self::Tikhonov).ok_or_else(bad),
            _ => Err(bad()),
        }
    }
}

impl std::str::FromStr for SpectralFilter {
    type Err = GxrayError;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_grammar() {
        assert!(matches!(SpectralFilter::parse("power:0.5").unwrap(), SpectralFilter::Power(a) if a == 0.5));
        assert!(matches!(SpectralFilter::parse("cutoff:10").unwrap(), SpectralFilter::Cutoff(10)));
        assert!(matches!(SpectralFilter::parse("cosine:7").unwrap(), SpectralFilter::Cosine(7)));
        assert!(matches!(SpectralFilter::parse("tikhonov:0.01").unwrap(), SpectralFilter::Tikhonov(_)));
        for bad in ["power", "cutoff:-1", "gauss:2", "tikhonov:-1", "power:nan"] {
            assert!(SpectralFilter::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn low_pass_behaviour() {
        for f in [SpectralFilter::Cutoff(5), SpectralFilter::Cosine(5), SpectralFilter::Tikhonov(0.1)] {
            assert!(f.eval(1e8) < 1e-3);
            assert!(f.eval(1.0) > 0.9);
        }
        assert_eq!(SpectralFilter::identity().eval(1234.0), 1.0);
        assert_eq!(SpectralFilter::Cosine(4).eval(36.0), 0.0);
        assert!(SpectralFilter::Cosine(4).eval(16.0) > 0.0);
    }

    #[test]
    fn overflow_detected() {
        let f = SpectralFilter::Power(3.0);
        assert!(matches!(f.checked(100, 1e6), Err(GxrayError::FilterOverflow { .. })));
        assert!(f.checked(3, 1e6).is_ok());
    }
}
