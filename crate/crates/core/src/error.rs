use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cat state needs |δα| > {eps}, got {magnitude}")]
    DegenerateShift { magnitude: f64, eps: f64 },
    #[error("imaginary residue {residue:e} exceeds {limit:e}")]
    ImaginaryResidue { residue: f64, limit: f64 },
    #[error("wavefunction tail mass {tail:e} lies outside the quadrature span")]
    QuadratureSpanTooSmall { tail: f64 },
    #[error("invalid wavefunction: {0}")]
    InvalidWavefunction(String),
    #[error("invalid grid bounds: {0}")]
    InvalidBounds(String),
    #[error("degenerate moments: {0}")]
    DegenerateMoments(String),
    #[error("total signed mass {0} is too low for moment analysis")]
    MassTooLow(f64),
    #[error("field has no value spread (min = max = {0})")]
    DegenerateRange(f64),
    #[error("field is empty")]
    EmptyField,
    #[error("partial at {freq} Hz is outside [{lo}, {hi}] Hz")]
    FrequencyOutOfRange { freq: f64, lo: f64, hi: f64 },
    #[error("point ({r}, {p}) lies outside the field bounds")]
    OutOfBounds { r: f64, p: f64 },
    #[error("unsupported channel count {0}")]
    UnsupportedChannels(usize),
    #[error("partial at {freq} Hz violates Nyquist for {sample_rate} Hz")]
    NyquistViolation { freq: f64, sample_rate: u32 },
    #[error("buffer has {len} samples, window needs {window}")]
    BufferTooShort { len: usize, window: usize },
    #[error("unsupported WAV data: {0}")]
    UnsupportedFormat(String),
    #[error("coverage {coverage:.6} is below the required {required}")]
    CoverageTooLow { coverage: f64, required: f64 },
    #[error("invalid config: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status used by the command-line front-end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Parse(_) => 2,
            Error::CoverageTooLow { .. } => 3,
            Error::Io { .. } => 1,
            _ => 4,
        }
    }
}
