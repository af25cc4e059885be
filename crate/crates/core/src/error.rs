use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet size q = {0} is invalid (need q >= 2)")]
    InvalidAlphabet(usize),
    #[error("group element {value} out of range for Z_{q}")]
    ElementOutOfRange { value: usize, q: usize },
    #[error("kernel is not even: imaginary residue {0:e} in its transform")]
    NonRealSpectrum(f64),
    #[error("lattice side {0} too small (need L >= 2)")]
    LatticeTooSmall(usize),
    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("configuration does not match the model: {0}")]
    AlphabetMismatch(String),
    #[error("bond configuration violates the parity constraints")]
    OutOfSupport,
    #[error("spectrum has non-positive entry {value} at {index}; dual representation unavailable")]
    DegenerateSpectrum { index: usize, value: f64 },
    #[error("custom kernels carry no energy function")]
    NoEnergy,
    #[error("instance has {0:e} configurations; exact enumeration limit exceeded")]
    TooLargeForExact(f64),
    #[error("row space q^L = {0:e} exceeds the transfer-matrix limit")]
    TooLargeForTransfer(f64),
    #[error("estimator needs at least one sample")]
    EmptySample,
    #[error("dual bounds require an even number of sites, got N = {0}")]
    OddSiteCount(usize),
    #[error("dual bounds require beta > 0")]
    ZeroBeta,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Process exit status for the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DegenerateSpectrum { .. } | Error::ZeroBeta => 3,
            Error::TooLargeForExact(_) | Error::TooLargeForTransfer(_) => 4,
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}
