use thiserror::Error;

use crate::arith::Natural;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// `gcd(a, n) > 1`. The gcd is kept because it may be a nontrivial factor of `n`.
    #[error("element is not invertible (gcd = {gcd})")]
    NotInvertible { gcd: Natural },
    #[error("moduli are not pairwise coprime")]
    NonCoprimeModuli,
    #[error("no prime found within the attempt budget")]
    RandomnessExhausted,
    /// A group operation needed to invert a non-unit. `factor` is the gcd with the modulus.
    #[error("impossible group operation (gcd with modulus = {factor})")]
    ImpossibleOperation { factor: Natural },
    #[error("point is not on the hyperbola x^2 - D y^2 = 1")]
    NotOnCurve,
    #[error("modulus too large for exhaustive enumeration")]
    ModulusTooLarge,
    #[error("public exponent shares a factor with the exponent modulus")]
    BadExponentChoice,
    #[error("message cannot be encrypted: {0}")]
    MessageNotEncryptable(&'static str),
    #[error("decryption failed: {0}")]
    DecryptionFailure(&'static str),
    #[error("factorization did not finish within {0} trials")]
    TrialBudgetExhausted(u64),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("malformed input: {0}")]
    Format(String),
}

impl Error {
    /// Variant name, stable for use in diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NotInvertible { .. } => "NotInvertible",
            Error::NonCoprimeModuli => "NonCoprimeModuli",
            Error::RandomnessExhausted => "RandomnessExhausted",
            Error::ImpossibleOperation { .. } => "ImpossibleOperation",
            Error::NotOnCurve => "NotOnCurve",
            Error::ModulusTooLarge => "ModulusTooLarge",
            Error::BadExponentChoice => "BadExponentChoice",
            Error::MessageNotEncryptable(_) => "MessageNotEncryptable",
            Error::DecryptionFailure(_) => "DecryptionFailure",
            Error::TrialBudgetExhausted(_) => "TrialBudgetExhausted",
            Error::InvalidParameters(_) => "InvalidParameters",
            Error::Format(_) => "Format",
        }
    }
}
