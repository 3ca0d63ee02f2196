//! Textbook two-prime RSA with CRT decryption, the reference point for the
//! decryption timings.
//!
//! Exponentiation goes through [`pellrsa_core::arith::mod_pow`], the same
//! square-and-multiply routine and big-integer backend the Pell side uses for
//! its modular products.

use pellrsa_core::arith::{gen_prime, mod_inv, mod_pow, mul_mod, sub_mod};
use pellrsa_core::Natural;
use rand::Rng;

use crate::BenchError;

pub const RSA_PUBLIC_EXPONENT: u32 = 65537;

/// Smallest modulus size accepted by [`rsa_baseline`].
pub const MIN_RSA_BITS: u64 = 512;

#[derive(Clone, Debug)]
pub struct RsaBaseline {
    pub n: Natural,
    pub e: Natural,
    pub d: Natural,
    p: Natural,
    q: Natural,
    dp: Natural,
    dq: Natural,
    /// `q^{-1} mod p`
    qinv: Natural,
}

impl RsaBaseline {
    pub fn encrypt(&self, m: &Natural) -> Natural {
        mod_pow(m, &self.e, &self.n)
    }

    /// One block, two half-size exponentiations recombined with Garner's formula.
    pub fn decrypt_block(&self, c: &Natural, exponentiations: &mut u64) -> Natural {
        let mp = mod_pow(&(c % &self.p), &self.dp, &self.p);
        let mq = mod_pow(&(c % &self.q), &self.dq, &self.q);
        *exponentiations += 2;
        let h = mul_mod(&self.qinv, &sub_mod(&mp, &(&mq % &self.p), &self.p), &self.p);
        mq + h * &self.q
    }

    /// A `2 log N`-bit message is two blocks, so four exponentiations.
    pub fn decrypt_message(&self, blocks: &[Natural; 2], exponentiations: &mut u64) -> [Natural; 2] {
        [
            self.decrypt_block(&blocks[0], exponentiations),
            self.decrypt_block(&blocks[1], exponentiations),
        ]
    }

    pub fn primes(&self) -> (&Natural, &Natural) {
        (&self.p, &self.q)
    }
}

/// Two balanced primes, `e = 65537`, `d = e^{-1} mod φ(N)`.
pub fn rsa_baseline<R: Rng + ?Sized>(modulus_bits: u64, rng: &mut R) -> Result<RsaBaseline, BenchError> {
    if modulus_bits < MIN_RSA_BITS {
        return Err(BenchError::ConfigInfeasible(format!(
            "RSA baseline needs at least {MIN_RSA_BITS} bits, got {modulus_bits}"
        )));
    }
    let e = Natural::from(RSA_PUBLIC_EXPONENT);
    let p_bits = modulus_bits / 2;
    let q_bits = modulus_bits - p_bits;
    loop {
        let p = gen_prime(p_bits, rng)?;
        let q = gen_prime(q_bits, rng)?;
        if p == q {
            continue;
        }
        let phi = (&p - 1u32) * (&q - 1u32);
        let Ok(d) = mod_inv(&e, &phi) else { continue };
        let dp = &d % (&p - 1u32);
        let dq = &d % (&q - 1u32);
        let qinv = mod_inv(&q, &p)?;
        return Ok(RsaBaseline { n: &p * &q, e, d, p, q, dp, dq, qinv });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::RandBigInt;
    use pellrsa_core::seeded_rng;

    #[test]
    fn round_trip_and_exponentiation_count() {
        let mut rng = seeded_rng(11);
        let rsa = rsa_baseline(512, &mut rng).unwrap();
        assert_eq!(rsa.n.bits(), 512);
        for _ in 0..20 {
            let m = [rng.gen_biguint_below(&rsa.n), rng.gen_biguint_below(&rsa.n)];
            let c = [rsa.encrypt(&m[0]), rsa.encrypt(&m[1])];
            let mut count = 0;
            assert_eq!(rsa.decrypt_message(&c, &mut count), m);
            assert_eq!(count, 4);
            // plain exponentiation by d as an independent check
            assert_eq!(c[0].modpow(&rsa.d, &rsa.n), m[0]);
        }
    }

    #[test]
    fn private_exponent_is_full_size() {
        let mut rng = seeded_rng(12);
        for bits in [512u64, 768, 1024] {
            let rsa = rsa_baseline(bits, &mut rng).unwrap();
            assert!(rsa.n.bits() - rsa.d.bits() <= 8, "bits={bits}");
        }
    }

    #[test]
    fn rejects_small_moduli() {
        assert!(matches!(rsa_baseline(256, &mut seeded_rng(0)), Err(BenchError::ConfigInfeasible(_))));
    }
}
