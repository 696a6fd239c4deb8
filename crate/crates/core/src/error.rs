use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// Each variant maps to a stable process exit code (see [`Error::exit_code`]),
/// which is what the CLI and the C ABI report.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("degenerate projective frame: {0}")]
    DegenerateFrame(String),

    #[error("point at infinity in the registered chart")]
    PointAtInfinity,

    #[error("data not concentrated enough for a directional representation (component {component}, |dot| = {dot:.4})")]
    NotConcentrated { component: usize, dot: f64 },

    #[error("extrinsic mean is not unique: spectral gap {gap:e} of component {component} is below tolerance")]
    MeanNotUnique { component: usize, gap: f64 },

    #[error("covariance matrix is singular (effective rank {rank} of {dim}); try the bootstrap or more data")]
    SingularCovariance { rank: usize, dim: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("mean direction undefined: resultant length is zero")]
    UndefinedMeanDirection,

    #[error("bootstrap unstable: {rejected} resamples rejected for {accepted} accepted")]
    BootstrapUnstable { rejected: usize, accepted: usize },

    #[error("rotation axis is at infinity in affine coordinates")]
    AtInfinity,

    #[error("i/o error: {0}")]
    Io(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable exit code for each error class; 0 is reserved for success.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Argument(_) => 2,
            Error::Parse { .. } => 3,
            Error::Validation(_) => 4,
            Error::DegenerateFrame(_) => 10,
            Error::PointAtInfinity => 11,
            Error::NotConcentrated { .. } => 12,
            Error::MeanNotUnique { .. } => 13,
            Error::SingularCovariance { .. } => 14,
            Error::InsufficientData(_) => 15,
            Error::UndefinedMeanDirection => 16,
            Error::BootstrapUnstable { .. } => 17,
            Error::AtInfinity => 18,
            Error::Io(_) => 20,
            Error::Internal(_) => 70,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_are_distinct() {
        let all = [
            Error::Argument(String::new()),
            Error::Parse { row: 0, message: String::new() },
            Error::Validation(String::new()),
            Error::DegenerateFrame(String::new()),
            Error::PointAtInfinity,
            Error::NotConcentrated { component: 0, dot: 0.0 },
            Error::MeanNotUnique { component: 0, gap: 0.0 },
            Error::SingularCovariance { rank: 0, dim: 1 },
            Error::InsufficientData(String::new()),
            Error::UndefinedMeanDirection,
            Error::BootstrapUnstable { rejected: 0, accepted: 0 },
            Error::AtInfinity,
            Error::Io(String::new()),
            Error::Internal(String::new()),
        ];
        let mut codes: Vec<i32> = all.iter().map(Error::exit_code).collect();
        assert!(codes.iter().all(|&c| c != 0));
        codes.sort_unstable();
        codes.dedup();
        assert_eq!(codes.len(), all.len());
    }
}
