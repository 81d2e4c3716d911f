use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The truncated state lost more norm than [`crate::MAX_NORM_DEFICIT`].
    InsufficientCutoff { nmax: usize, deficit: f64 },
    /// The trusted block of the squeeze matrix is smaller than required.
    UntrustedSqueezeBlock { trusted: usize, required: usize },
    /// A parameter is outside its domain.
    Domain(&'static str),
    /// The CHSH bound is not exceeded anywhere in the searched bracket.
    NoViolation,
    /// An oracle was asked to run above its cost guard.
    CutoffGuard { nmax: usize, limit: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InsufficientCutoff { nmax, deficit } => {
                write!(f, "insufficient cutoff: nmax={nmax} leaves norm deficit {deficit:e}")
            }
            Error::UntrustedSqueezeBlock { trusted, required } => write!(
                f,
                "insufficient cutoff: squeeze matrix trusted up to n={trusted}, need n={required}"
            ),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::NoViolation => f.write_str("no violation anywhere in the searched range"),
            Error::CutoffGuard { nmax, limit } => {
                write!(f, "cutoff guard: nmax={nmax} exceeds oracle limit {limit}")
            }
        }
    }
}

#[cfg(test)]
impl std::error::Error for Error {}

#[cfg(not(test))]
impl core::error::Error for Error {}
