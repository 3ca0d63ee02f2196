//! Decryption timing of the Pell scheme against two-prime CRT-RSA.
//!
//! Both sides decrypt the same `2 log N` bits of plaintext per timed call:
//! one Pell ciphertext against two RSA blocks. The operation-count model
//! predicts a speedup of `r^2 / 2` for `r` primes.

pub mod baseline;
pub mod harness;
pub mod report;

pub use baseline::{rsa_baseline, RsaBaseline};
pub use harness::{predicted_speedup, run_benchmark, run_median_of, BenchConfig, BenchResult};
pub use report::{emit_report, ReportFormat, CSV_COLUMNS};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("infeasible configuration: {0}")]
    ConfigInfeasible(String),
    #[error("{0} did not reproduce the plaintext")]
    Mismatch(&'static str),
    #[error(transparent)]
    Core(#[from] pellrsa_core::Error),
}
