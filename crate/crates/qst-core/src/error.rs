use core::fmt;

/// Error type shared by all modules of the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Too few sites for the requested protocol kind.
    InvalidLength { n_sites: usize, min: usize },
    /// A weak-coupling perturbation must be strictly positive.
    NonPositivePerturbation(f64),
    /// The Bose-Hubbard filling must be a positive half-integer.
    NonHalfIntegerFilling(f64),
    /// The Bose-Hubbard hopping must be strictly positive.
    NonPositiveHopping(f64),
    /// The eigensolver did not converge within its iteration cap.
    ConvergenceFailure,
    /// A site or eigenstate index fell outside `1..=N`.
    IndexOutOfRange { index: usize, n_sites: usize },
    /// Two-particle amplitude requested with a non-canonical pair (need n < m).
    UnorderedPair,
    /// Sender/receiver lists have the wrong arity for the requested fidelity.
    SetupArityMismatch { expected: usize, got: usize },
    /// Sender and receiver lists are invalid (overlap, duplicates, out of range).
    InvalidSetup,
    /// No eigenstate pair with block localization weight above 0.5.
    LocalizationNotFound,
    /// The two sextet half-gaps disagree by more than 10%.
    SextetMismatch { lower: f64, upper: f64 },
    /// Dense sector diagonalization is capped at N = 14.
    SizeCapExceeded { n_sites: usize, cap: usize },
    /// Power-law fit input has no spread in x (or too few samples).
    DegenerateSamples,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidLength { n_sites, min } => {
                write!(f, "chain of {n_sites} sites is too short (need at least {min})")
            }
            Error::NonPositivePerturbation(x) => {
                write!(f, "perturbation must be positive, got {x}")
            }
            Error::NonHalfIntegerFilling(x) => {
                write!(f, "filling must be a positive half-integer, got {x}")
            }
            Error::NonPositiveHopping(x) => {
                write!(f, "hopping must be positive, got {x}")
            }
            Error::ConvergenceFailure => write!(f, "eigensolver failed to converge"),
            Error::IndexOutOfRange { index, n_sites } => {
                write!(f, "index {index} out of range 1..={n_sites}")
            }
            Error::UnorderedPair => write!(f, "pair indices must satisfy n < m"),
            Error::SetupArityMismatch { expected, got } => {
                write!(f, "transfer setup has {got} sites per block, expected {expected}")
            }
            Error::InvalidSetup => write!(f, "sender/receiver lists overlap or are out of range"),
            Error::LocalizationNotFound => {
                write!(f, "no bi-localized eigenstate pair (block weight > 0.5)")
            }
            Error::SextetMismatch { lower, upper } => {
                write!(f, "sextet half-gaps disagree beyond 10%: {lower} vs {upper}")
            }
            Error::SizeCapExceeded { n_sites, cap } => {
                write!(f, "dense sector solver capped at N = {cap}, got N = {n_sites}")
            }
            Error::DegenerateSamples => {
                write!(f, "power-law fit needs at least 3 samples with distinct x")
            }
        }
    }
}

impl core::error::Error for Error {}
