//! Modular arithmetic over arbitrary-precision naturals.
//!
//! Everything here works on [`Natural`] (an alias for `BigUint`). Functions
//! that need randomness take it explicitly so callers can seed them.

use std::sync::OnceLock;

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};

pub type Natural = BigUint;

/// Miller–Rabin rounds used for every probable-prime decision above 2^64.
pub const MILLER_RABIN_ROUNDS: usize = 40;

/// A modulus given together with its prime-power factorization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredModulus {
    factors: Vec<(Natural, u32)>,
    value: Natural,
}

impl FactoredModulus {
    /// Builds `∏ p_i^{e_i}`. Primes must be distinct probable primes and
    /// every exponent at least 1. Factors are kept in the given order.
    pub fn new(factors: Vec<(Natural, u32)>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidParameters("empty factor list".into()));
        }
        for (i, (p, e)) in factors.iter().enumerate() {
            if *e == 0 {
                return Err(Error::InvalidParameters(format!("exponent of {p:x} is zero")));
            }
            if !is_probable_prime(p) {
                return Err(Error::InvalidParameters(format!("{p:x} is not prime")));
            }
            if factors[..i].iter().any(|(q, _)| q == p) {
                return Err(Error::InvalidParameters(format!("repeated prime {p:x}")));
            }
        }
        let value = factors
            .iter()
            .fold(Natural::one(), |acc, (p, e)| acc * p.pow(*e));
        Ok(FactoredModulus { factors, value })
    }

    pub fn value(&self) -> &Natural {
        &self.value
    }

    pub fn factors(&self) -> &[(Natural, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = &Natural> {
        self.factors.iter().map(|(p, _)| p)
    }

    /// `p_i^{e_i}` for every factor, in order.
    pub fn prime_powers(&self) -> Vec<Natural> {
        self.factors.iter().map(|(p, e)| p.pow(*e)).collect()
    }

    /// Euler's totient `∏ p^{e-1}(p-1)`.
    pub fn euler_phi(&self) -> Natural {
        self.factors
            .iter()
            .map(|(p, e)| p.pow(e - 1) * (p - 1u32))
            .product()
    }
}

pub(crate) fn low_u64(n: &Natural) -> u64 {
    n.iter_u64_digits().next().unwrap_or(0)
}

pub fn mul_mod(a: &Natural, b: &Natural, n: &Natural) -> Natural {
    (a * b) % n
}

/// `a + b mod n` for `a, b < n`.
pub fn add_mod(a: &Natural, b: &Natural, n: &Natural) -> Natural {
    let s = a + b;
    if &s >= n {
        s - n
    } else {
        s
    }
}

/// `a - b mod n` for `a, b < n`.
pub fn sub_mod(a: &Natural, b: &Natural, n: &Natural) -> Natural {
    if a >= b {
        a - b
    } else {
        n - b + a
    }
}

/// `-a mod n` for `a < n`.
pub fn neg_mod(a: &Natural, n: &Natural) -> Natural {
    if a.is_zero() {
        Natural::zero()
    } else {
        n - a
    }
}

/// Inverse of `a` modulo `n` (`n >= 2`).
///
/// Fails with [`Error::NotInvertible`] carrying `gcd(a, n)`, which callers
/// may harvest as a factor of `n`.
pub fn mod_inv(a: &Natural, n: &Natural) -> Result<Natural> {
    debug_assert!(*n >= Natural::from(2u32));
    let a = a % n;
    match a.modinv(n) {
        Some(b) => Ok(b),
        None => Err(Error::NotInvertible { gcd: a.gcd(n) }),
    }
}

/// Jacobi symbol `(a / n)` for odd `n`.
pub fn jacobi(a: &Natural, n: &Natural) -> i8 {
    assert!(n.is_odd(), "jacobi symbol needs an odd modulus");
    let mut a = a % n;
    let mut n = n.clone();
    let mut t = 1i8;
    while !a.is_zero() {
        let tz = a.trailing_zeros().unwrap_or(0);
        if tz % 2 == 1 {
            let r = low_u64(&n) & 7;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        a >>= tz;
        std::mem::swap(&mut a, &mut n);
        if low_u64(&a) & 3 == 3 && low_u64(&n) & 3 == 3 {
            t = -t;
        }
        a %= &n;
    }
    if n.is_one() {
        t
    } else {
        0
    }
}

/// `a^k mod n` by left-to-right square-and-multiply.
///
/// This is deliberately the plain binary method with one reduction per
/// product; the benchmark baseline and the Pell evaluators share it so their
/// costs are comparable.
pub fn mod_pow(a: &Natural, k: &Natural, n: &Natural) -> Natural {
    if n.is_one() {
        return Natural::zero();
    }
    let base = a % n;
    let mut acc = Natural::one();
    for i in (0..k.bits()).rev() {
        acc = mul_mod(&acc, &acc, n);
        if k.bit(i) {
            acc = mul_mod(&acc, &base, n);
        }
    }
    acc
}

/// Solves `x ≡ residues[i] (mod moduli[i])` for pairwise-coprime moduli.
pub fn crt_combine(residues: &[Natural], moduli: &[Natural]) -> Result<Natural> {
    CrtBasis::new(moduli)?.combine(residues)
}

/// Garner's coefficients for a fixed list of pairwise-coprime moduli, so
/// that repeated recombination needs no inversions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrtBasis {
    moduli: Vec<Natural>,
    /// `m_0 ⋯ m_{i-1}`
    prefixes: Vec<Natural>,
    /// `(m_0 ⋯ m_{i-1})^{-1} mod m_i`
    inverses: Vec<Natural>,
}

impl CrtBasis {
    pub fn new(moduli: &[Natural]) -> Result<Self> {
        if moduli.is_empty() {
            return Err(Error::InvalidParameters("crt needs at least one modulus".into()));
        }
        if moduli.iter().any(Zero::is_zero) {
            return Err(Error::InvalidParameters("zero modulus".into()));
        }
        let mut prefixes = Vec::with_capacity(moduli.len());
        let mut inverses = Vec::with_capacity(moduli.len());
        let mut m = Natural::one();
        for mi in moduli {
            let inv = if mi.is_one() {
                Natural::zero()
            } else {
                mod_inv(&(&m % mi), mi).map_err(|_| Error::NonCoprimeModuli)?
            };
            prefixes.push(m.clone());
            inverses.push(inv);
            m *= mi;
        }
        Ok(CrtBasis { moduli: moduli.to_vec(), prefixes, inverses })
    }

    pub fn moduli(&self) -> &[Natural] {
        &self.moduli
    }

    pub fn combine(&self, residues: &[Natural]) -> Result<Natural> {
        if residues.len() != self.moduli.len() {
            return Err(Error::InvalidParameters(
                "crt needs one residue per modulus".into(),
            ));
        }
        let mut x = &residues[0] % &self.moduli[0];
        let rest = residues.iter().zip(&self.moduli).zip(self.prefixes.iter().zip(&self.inverses));
        for ((ri, mi), (prefix, inv)) in rest.skip(1) {
            if mi.is_one() {
                continue;
            }
            let diff = sub_mod(&(ri % mi), &(&x % mi), mi);
            x += prefix * mul_mod(&diff, inv, mi);
        }
        Ok(x)
    }
}

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        const LIMIT: usize = 2000;
        let mut composite = vec![false; LIMIT];
        let mut out = Vec::new();
        for i in 2..LIMIT {
            if !composite[i] {
                out.push(i as u32);
                for j in (i * i..LIMIT).step_by(i) {
                    composite[j] = true;
                }
            }
        }
        out
    })
}

fn miller_rabin_round(n: &Natural, n_minus_1: &Natural, odd: &Natural, s: u64, a: &Natural) -> bool {
    let mut x = a.modpow(odd, n);
    if x.is_one() || &x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = x.modpow(&Natural::from(2u32), n);
        if &x == n_minus_1 {
            return true;
        }
        if x.is_one() {
            return false;
        }
    }
    false
}

/// Returns `Some(verdict)` when trial division decides, `None` otherwise.
fn trial_division(n: &Natural) -> Option<bool> {
    if let Some(small) = n.to_u64() {
        if small < 2 {
            return Some(false);
        }
    }
    for &p in small_primes() {
        let p = Natural::from(p);
        if *n == p {
            return Some(true);
        }
        if (n % &p).is_zero() {
            return Some(false);
        }
        if &p * &p > *n {
            return Some(true);
        }
    }
    None
}

/// Miller–Rabin with `rounds` random bases drawn from `rng`.
pub fn is_probable_prime_with<R: Rng + ?Sized>(n: &Natural, rounds: usize, rng: &mut R) -> bool {
    if let Some(verdict) = trial_division(n) {
        return verdict;
    }
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let odd = &n_minus_1 >> s;
    let upper = n - 2u32;
    (0..rounds).all(|_| {
        let a = rng.gen_biguint_range(&Natural::from(2u32), &upper);
        miller_rabin_round(n, &n_minus_1, &odd, s, &a)
    })
}

/// Probable-prime test. Deterministic below 2^64 (fixed base set); above
/// that, [`MILLER_RABIN_ROUNDS`] bases from a fixed-seed stream.
pub fn is_probable_prime(n: &Natural) -> bool {
    if let Some(verdict) = trial_division(n) {
        return verdict;
    }
    if n.bits() <= 64 {
        let n_minus_1 = n - 1u32;
        let s = n_minus_1.trailing_zeros().unwrap_or(0);
        let odd = &n_minus_1 >> s;
        return [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]
            .iter()
            .all(|&a| miller_rabin_round(n, &n_minus_1, &odd, s, &Natural::from(a)));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(low_u64(n));
    is_probable_prime_with(n, MILLER_RABIN_ROUNDS, &mut rng)
}

/// A probable prime of exactly `bits` bits. The two top bits are set so that
/// products of such primes land close to the sum of their sizes.
pub fn gen_prime<R: Rng + ?Sized>(bits: u64, rng: &mut R) -> Result<Natural> {
    if bits < 8 {
        return Err(Error::InvalidParameters(format!(
            "prime size {bits} is below the 8-bit minimum"
        )));
    }
    let attempts = 100 * bits + 1000;
    for _ in 0..attempts {
        let mut cand = rng.gen_biguint(bits);
        cand.set_bit(bits - 1, true);
        cand.set_bit(bits - 2, true);
        cand.set_bit(0, true);
        if is_probable_prime_with(&cand, MILLER_RABIN_ROUNDS, rng) {
            return Ok(cand);
        }
    }
    Err(Error::RandomnessExhausted)
}

/// Largest `x` with `x^k <= n`.
pub fn integer_root(n: &Natural, k: u32) -> Natural {
    num_integer::Roots::nth_root(n, k)
}
