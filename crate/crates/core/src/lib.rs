//! A multifactor RSA-like public-key scheme over the Pell hyperbola
//! `x^2 - D y^2 = 1`, with exponentiation carried out through Rédei rational
//! functions.
//!
//! The modulus is `N = p_1^{e_1} ... p_r^{e_r}`. Decryption works modulo each
//! prime power with an exponent reduced by the local group order and
//! recombines through the CRT, which is where the speedup over RSA comes from.
//!
//! Modules:
//! - [`arith`]: modular arithmetic, Jacobi symbol, CRT, prime generation.
//! - [`pell`]: the hyperbola group `⊗`, the parameter group `⊙`, the maps
//!   between them, Rédei evaluators and group orders.
//! - [`scheme`]: key generation, encryption and decryption, text formats.
//! - [`cryptanalysis`]: factoring from `Ψ(N)` and impossible-operation statistics.

pub mod arith;
pub mod cryptanalysis;
mod error;
pub mod pell;
pub mod scheme;

pub use arith::{FactoredModulus, Natural};
pub use error::{Error, Result};
pub use pell::{Evaluator, HyperbolaPoint, OpCount, PellParameter, PellParams};
pub use scheme::{
    Ciphertext, DecryptionMode, MessagePair, PointCiphertext, PrivateKey, PublicKey,
};

/// Deterministic randomness source used by tests, the CLI and the benchmarks.
pub type SeededRng = rand_chacha::ChaCha20Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    use rand::SeedableRng;
    SeededRng::seed_from_u64(seed)
}

pub fn entropy_rng() -> SeededRng {
    use rand::SeedableRng;
    SeededRng::from_entropy()
}
