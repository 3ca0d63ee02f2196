//! Key generation, encryption and decryption.
//!
//! A message is a pair `(Mx, My)` of units mod `N`. The sender derives
//! `D = (Mx^2 - 1) / My^2`, so the pair lies on `x^2 - D y^2 = 1`, compresses
//! it to the parameter `M = (Mx + 1) / My` and sends `(C, D)` with
//! `C = Q_e(D, M)`. The receiver computes `Q_d(D, C)` prime power by prime
//! power with exponents reduced by the local group order, then recombines.
//!
//! The uncompressed variant sends `(Cx, Cy, D) = (Mx, My)^{⊗e}` and never
//! divides during exponentiation.
//!
//! Two private-exponent conventions are supported, see [`DecryptionMode`].

mod format;

pub use format::CiphertextFile;

use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;
use num_bigint::RandBigInt;

use crate::arith::{gen_prime, jacobi, mod_inv, mul_mod, sub_mod, CrtBasis, FactoredModulus, Natural};
use crate::error::{Error, Result};
use crate::pell::{
    self, hyperbola_order, invert, phi_inv, point_pow, power, redei_eval, redei_ladder_point, Evaluator,
    HyperbolaPoint, OpCount, PellParameter, PellParams,
};

/// Smallest default public exponent.
pub const DEFAULT_PUBLIC_EXPONENT: u32 = 65_537;

/// How the private exponent is derived and which messages are accepted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum DecryptionMode {
    /// `d = e^{-1} mod lcm(p_i^{e_i-1}(p_i+1))`; messages need
    /// `jacobi(Mx^2 - 1, N) = -1`. Decryption only succeeds when `D` is a
    /// non-residue modulo every prime, which the sender cannot check.
    StrictPaper,
    /// `d = e^{-1} mod lcm(p_i^{e_i-1}(p_i^2-1))`; any message with
    /// `gcd(Mx^2 - 1, N) = 1` decrypts.
    #[default]
    Robust,
}

impl DecryptionMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DecryptionMode::StrictPaper => "strict",
            DecryptionMode::Robust => "robust",
        }
    }
}

impl std::str::FromStr for DecryptionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(DecryptionMode::StrictPaper),
            "robust" => Ok(DecryptionMode::Robust),
            other => Err(Error::Format(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublicKey {
    n: Natural,
    e: Natural,
}

impl PublicKey {
    /// `e` must be odd and at least 3; `n` odd and at least 15.
    pub fn new(n: Natural, e: Natural) -> Result<Self> {
        if e < Natural::from(3u32) || e.is_even() {
            return Err(Error::BadExponentChoice);
        }
        if n < Natural::from(15u32) || n.is_even() {
            return Err(Error::InvalidParameters("modulus must be odd and composite-sized".into()));
        }
        Ok(PublicKey { n, e })
    }

    pub fn n(&self) -> &Natural {
        &self.n
    }

    pub fn e(&self) -> &Natural {
        &self.e
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrivateKey {
    factors: FactoredModulus,
    d: Natural,
    mode: DecryptionMode,
    /// Recombination coefficients over the prime powers.
    crt: CrtBasis,
    /// `d^{-1} mod L`; stands in for `e` when checking a decryption.
    e_check: Natural,
}

impl PrivateKey {
    pub fn new(factors: FactoredModulus, d: Natural, mode: DecryptionMode) -> Result<Self> {
        if factors.factors().len() < 2 {
            return Err(Error::InvalidParameters("need at least two primes".into()));
        }
        if factors.primes().any(|p| p.is_even()) {
            return Err(Error::InvalidParameters("primes must be odd".into()));
        }
        let l = exponent_modulus(&factors, mode);
        let e_check = mod_inv(&d, &l)
            .map_err(|_| Error::InvalidParameters("d is not invertible modulo the exponent modulus".into()))?;
        let crt = CrtBasis::new(&factors.prime_powers())?;
        Ok(PrivateKey { factors, d, mode, crt, e_check })
    }

    pub fn factors(&self) -> &FactoredModulus {
        &self.factors
    }

    pub fn modulus(&self) -> &Natural {
        self.factors.value()
    }

    pub fn d(&self) -> &Natural {
        &self.d
    }

    pub fn mode(&self) -> DecryptionMode {
        self.mode
    }

    pub fn exponent_modulus(&self) -> Natural {
        exponent_modulus(&self.factors, self.mode)
    }

    /// Per prime power: the order of the local group for this `D`
    /// (`p^{a-1}(p+1)` if `D` is a non-residue mod `p`, `p^{a-1}(p-1)` otherwise).
    pub fn local_orders(&self, d_coef: &Natural) -> Result<Vec<Natural>> {
        self.factors
            .factors()
            .iter()
            .map(|(p, a)| local_order(p, *a, d_coef))
            .collect()
    }

    /// The private exponent reduced by each local group order.
    pub fn reduced_exponents(&self, d_coef: &Natural) -> Result<Vec<Natural>> {
        Ok(self.local_orders(d_coef)?.iter().map(|o| &self.d % o).collect())
    }
}

fn local_order(p: &Natural, a: u32, d_coef: &Natural) -> Result<Natural> {
    match jacobi(&(d_coef % p), p) {
        -1 => Ok(hyperbola_order(p, a)),
        1 => Ok(p.pow(a - 1) * (p - 1u32)),
        _ => Err(Error::DecryptionFailure("D is not a unit modulo N")),
    }
}

/// The modulus `L` the private exponent is inverted against.
pub fn exponent_modulus(fm: &FactoredModulus, mode: DecryptionMode) -> Natural {
    fm.factors().iter().fold(Natural::one(), |acc, (p, a)| {
        let local = match mode {
            DecryptionMode::StrictPaper => hyperbola_order(p, *a),
            DecryptionMode::Robust => p.pow(a - 1) * (p * p - 1u32),
        };
        acc.lcm(&local)
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MessagePair {
    pub mx: Natural,
    pub my: Natural,
}

impl MessagePair {
    pub fn new(mx: Natural, my: Natural) -> Self {
        MessagePair { mx, my }
    }

    /// A uniformly drawn pair accepted by [`validate_message`] under `mode`.
    pub fn random<R: Rng + ?Sized>(pk: &PublicKey, mode: DecryptionMode, rng: &mut R) -> Self {
        let two = Natural::from(2u32);
        loop {
            let msg = MessagePair::new(
                rng.gen_biguint_range(&two, pk.n()),
                rng.gen_biguint_range(&two, pk.n()),
            );
            if validate_message(pk, &msg, mode).is_ok() {
                return msg;
            }
        }
    }
}

/// Compressed ciphertext `(C, D)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ciphertext {
    pub c: Natural,
    pub d_coef: Natural,
}

/// Uncompressed ciphertext `(Cx, Cy, D)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PointCiphertext {
    pub cx: Natural,
    pub cy: Natural,
    pub d_coef: Natural,
}

/// Draws `r` distinct primes and builds a key pair with
/// `N = ∏ p_i^{exponents[i]}`.
pub fn keygen<R: Rng + ?Sized>(
    r: usize,
    exponents: &[u32],
    prime_bits: u64,
    e_choice: Option<&Natural>,
    mode: DecryptionMode,
    rng: &mut R,
) -> Result<(PublicKey, PrivateKey)> {
    if exponents.len() != r {
        return Err(Error::InvalidParameters(format!(
            "expected {r} exponents, got {}",
            exponents.len()
        )));
    }
    keygen_sized(&vec![prime_bits; r], exponents, e_choice, mode, rng)
}

/// Like [`keygen`] with an individual size for every prime.
pub fn keygen_sized<R: Rng + ?Sized>(
    prime_bits: &[u64],
    exponents: &[u32],
    e_choice: Option<&Natural>,
    mode: DecryptionMode,
    rng: &mut R,
) -> Result<(PublicKey, PrivateKey)> {
    check_shape(prime_bits.len(), exponents)?;
    let mut primes: Vec<Natural> = Vec::with_capacity(prime_bits.len());
    for &bits in prime_bits {
        let mut collisions = 0;
        let p = loop {
            let p = gen_prime(bits, rng)?;
            if !primes.contains(&p) {
                break p;
            }
            collisions += 1;
            if collisions > 1000 {
                return Err(Error::RandomnessExhausted);
            }
        };
        primes.push(p);
    }
    keygen_from_primes(&primes, exponents, e_choice, mode)
}

fn check_shape(r: usize, exponents: &[u32]) -> Result<()> {
    if r < 2 {
        return Err(Error::InvalidParameters("need at least two primes".into()));
    }
    if exponents.len() != r {
        return Err(Error::InvalidParameters("one exponent per prime".into()));
    }
    if exponents.iter().any(|e| e % 2 == 0) {
        return Err(Error::InvalidParameters("prime exponents must be odd".into()));
    }
    Ok(())
}

/// Key pair from explicit primes.
pub fn keygen_from_primes(
    primes: &[Natural],
    exponents: &[u32],
    e_choice: Option<&Natural>,
    mode: DecryptionMode,
) -> Result<(PublicKey, PrivateKey)> {
    check_shape(primes.len(), exponents)?;
    let fm = FactoredModulus::new(primes.iter().cloned().zip(exponents.iter().copied()).collect())?;
    let l = exponent_modulus(&fm, mode);
    let e = match e_choice {
        Some(e) => {
            if e < &Natural::from(3u32) || e.is_even() || !e.gcd(&l).is_one() {
                return Err(Error::BadExponentChoice);
            }
            e.clone()
        }
        None => {
            let mut e = Natural::from(DEFAULT_PUBLIC_EXPONENT);
            while !e.gcd(&l).is_one() {
                e += 2u32;
            }
            e
        }
    };
    let d = mod_inv(&e, &l).map_err(|_| Error::BadExponentChoice)?;
    let pk = PublicKey::new(fm.value().clone(), e)?;
    let sk = PrivateKey::new(fm, d, mode)?;
    Ok((pk, sk))
}

/// Checks `msg` against the encryption condition of `mode` and returns
/// `D = (Mx^2 - 1) / My^2 mod N`.
pub fn validate_message(pk: &PublicKey, msg: &MessagePair, mode: DecryptionMode) -> Result<Natural> {
    let n = pk.n();
    let mx = &msg.mx % n;
    let my = &msg.my % n;
    if my.is_zero() {
        return Err(Error::MessageNotEncryptable("My is zero"));
    }
    if !mx.gcd(n).is_one() {
        return Err(Error::MessageNotEncryptable("Mx is not a unit"));
    }
    let my_inv = invert(&my, n)?;
    let numerator = sub_mod(&mul_mod(&mx, &mx, n), &(Natural::one() % n), n);
    let symbol = jacobi(&numerator, n);
    match mode {
        DecryptionMode::StrictPaper if symbol != -1 => {
            return Err(Error::MessageNotEncryptable("jacobi(Mx^2 - 1, N) is not -1"));
        }
        DecryptionMode::Robust if symbol == 0 => {
            return Err(Error::MessageNotEncryptable("Mx^2 - 1 is not a unit"));
        }
        _ => {}
    }
    Ok(mul_mod(&numerator, &mul_mod(&my_inv, &my_inv, n), n))
}

/// `(C, D)` with `C = Q_e(D, M)`, `M = (Mx + 1) / My`.
pub fn encrypt(pk: &PublicKey, msg: &MessagePair, mode: DecryptionMode) -> Result<Ciphertext> {
    let d_coef = validate_message(pk, msg, mode)?;
    let n = pk.n();
    let pp = PellParams::new(n.clone(), d_coef.clone())?;
    let point = HyperbolaPoint::new(msg.mx.clone(), msg.my.clone(), &pp)?;
    let m = match pell::phi(&point, &pp)? {
        PellParameter::Finite(m) => m,
        PellParameter::Alpha => return Err(Error::MessageNotEncryptable("message is the identity")),
    };
    match redei_eval(&d_coef, &m, pk.e(), n).quotient(n)? {
        PellParameter::Finite(c) => Ok(Ciphertext { c, d_coef }),
        PellParameter::Alpha => Err(Error::MessageNotEncryptable("message has order dividing e")),
    }
}

/// `(Cx, Cy) = (Mx, My)^{⊗e}`.
pub fn encrypt_point(pk: &PublicKey, msg: &MessagePair, mode: DecryptionMode) -> Result<PointCiphertext> {
    let d_coef = validate_message(pk, msg, mode)?;
    let pp = PellParams::new(pk.n().clone(), d_coef.clone())?;
    let point = HyperbolaPoint::new(msg.mx.clone(), msg.my.clone(), &pp)?;
    let (cx, cy) = point_pow(&point, pk.e(), &pp).into_coords();
    Ok(PointCiphertext { cx, cy, d_coef })
}

pub fn decrypt(sk: &PrivateKey, ct: &Ciphertext) -> Result<MessagePair> {
    decrypt_with(sk, ct, Evaluator::Ladder)
}

/// Decryption using a specific `⊙`-power evaluator for the per-prime work.
///
/// With [`Evaluator::Ladder`] every prime power yields the message point
/// directly; the other evaluators recover the parameter `Q_d(D, C)` and map
/// it back to the curve.
pub fn decrypt_with(sk: &PrivateKey, ct: &Ciphertext, evaluator: Evaluator) -> Result<MessagePair> {
    let pp = params_for(sk, &ct.d_coef)?;
    if evaluator == Evaluator::Ladder {
        return decrypt_ladder(sk, ct, &pp);
    }
    let m = recover_parameter(sk, ct, evaluator)?;
    let point = phi_inv(&PellParameter::Finite(m), &pp)
        .map_err(|_| Error::DecryptionFailure("recovered parameter has no point"))?;
    finish_message(sk, point, &pp)
}

fn decrypt_ladder(sk: &PrivateKey, ct: &Ciphertext, pp: &PellParams) -> Result<MessagePair> {
    let orders = sk.local_orders(pp.d())?;
    let (mut xs, mut ys) = (Vec::with_capacity(orders.len()), Vec::with_capacity(orders.len()));
    for (modulus, order) in sk.crt.moduli().iter().zip(&orders) {
        let local = pp.reduce(modulus)?;
        let c = &ct.c % modulus;
        let exponent = sk.d() % order;
        let m = match redei_ladder_point(&c, &exponent, &local) {
            Some(m) => m,
            None => {
                let start = phi_inv(&PellParameter::Finite(c.clone()), &local)
                    .map_err(|_| Error::DecryptionFailure("ciphertext is not a unit"))?;
                point_pow(&start, &exponent, &local)
            }
        };
        check_local(sk, order, &exponent, |e| {
            let Ok(start) = phi_inv(&PellParameter::Finite(c.clone()), &local) else { return false };
            point_pow(&m, e, &local) == start
        })?;
        let (x, y) = m.into_coords();
        xs.push(x);
        ys.push(y);
    }
    let x = sk.crt.combine(&xs)?;
    let y = sk.crt.combine(&ys)?;
    finish_message(sk, HyperbolaPoint::new_unchecked(x, y), pp)
}

fn finish_message(sk: &PrivateKey, point: HyperbolaPoint, pp: &PellParams) -> Result<MessagePair> {
    let is_unit = |v: &Natural| sk.factors.primes().all(|p| !(v % p).is_zero());
    if !point.is_on_curve(pp) || !is_unit(point.x()) || !is_unit(point.y()) {
        return Err(Error::DecryptionFailure("recovered pair is not a valid message"));
    }
    let (mx, my) = point.into_coords();
    Ok(MessagePair { mx, my })
}

fn params_for(sk: &PrivateKey, d_coef: &Natural) -> Result<PellParams> {
    PellParams::new(sk.modulus().clone(), d_coef.clone())
        .map_err(|_| Error::DecryptionFailure("D is not a unit modulo N"))
}

/// `Q_d(D, C) mod N` via the CRT: one reduced exponentiation per prime power.
pub fn recover_parameter(sk: &PrivateKey, ct: &Ciphertext, evaluator: Evaluator) -> Result<Natural> {
    let pp = params_for(sk, &ct.d_coef)?;
    let orders = sk.local_orders(pp.d())?;
    let mut residues = Vec::with_capacity(orders.len());
    for (modulus, order) in sk.crt.moduli().iter().zip(&orders) {
        let local = pp.reduce(modulus)?;
        let c = PellParameter::finite(&ct.c, &local);
        let exponent = sk.d() % order;
        let m = power(&c, &exponent, &local, evaluator, &mut OpCount::default())
            .map_err(|_| Error::DecryptionFailure("ciphertext is not a unit"))?;
        let m = match m {
            PellParameter::Finite(m) => m,
            PellParameter::Alpha => return Err(Error::DecryptionFailure("ciphertext decrypts to the identity")),
        };
        check_local(sk, order, &exponent, |e| {
            let back = power(&PellParameter::Finite(m.clone()), e, &local, evaluator, &mut OpCount::default());
            back.ok() == Some(c.clone())
        })?;
        residues.push(m);
    }
    sk.crt.combine(&residues)
}

/// A local result is right when `e d ≡ 1` modulo the local order. In
/// strict mode that fails at primes where `D` is a residue; the result is
/// then accepted only if re-encrypting it reproduces the ciphertext.
fn check_local(sk: &PrivateKey, order: &Natural, exponent: &Natural, reencrypts: impl FnOnce(&Natural) -> bool) -> Result<()> {
    if (&sk.e_check * exponent % order).is_one() {
        return Ok(());
    }
    if reencrypts(&(&sk.e_check % order)) {
        Ok(())
    } else {
        Err(Error::DecryptionFailure("exponent does not invert e for this D (residuosity mismatch)"))
    }
}

/// `Q_d(D, C) mod N` computed in one full-width matrix exponentiation.
pub fn recover_parameter_direct(sk: &PrivateKey, ct: &Ciphertext) -> Result<Natural> {
    let n = sk.modulus();
    match redei_eval(&ct.d_coef, &ct.c, sk.d(), n).quotient(n) {
        Ok(PellParameter::Finite(m)) => Ok(m),
        _ => Err(Error::DecryptionFailure("direct exponentiation left the unit group")),
    }
}

/// `(Mx, My) = (Cx, Cy)^{⊗d}`, prime power by prime power.
pub fn decrypt_point(sk: &PrivateKey, ct: &PointCiphertext) -> Result<MessagePair> {
    let pp = params_for(sk, &ct.d_coef)?;
    let cipher_point = HyperbolaPoint::new(ct.cx.clone(), ct.cy.clone(), &pp)
        .map_err(|_| Error::DecryptionFailure("ciphertext is not on the curve"))?;
    let orders = sk.local_orders(pp.d())?;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (modulus, order) in sk.crt.moduli().iter().zip(&orders) {
        let local = pp.reduce(modulus)?;
        let c = HyperbolaPoint::new_unchecked(cipher_point.x() % modulus, cipher_point.y() % modulus);
        let exponent = sk.d() % order;
        let m = point_pow(&c, &exponent, &local);
        check_local(sk, order, &exponent, |e| point_pow(&m, e, &local) == c)?;
        let (x, y) = m.into_coords();
        xs.push(x);
        ys.push(y);
    }
    let x = sk.crt.combine(&xs)?;
    let y = sk.crt.combine(&ys)?;
    finish_message(sk, HyperbolaPoint::new_unchecked(x, y), &pp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pell::phi;
    use crate::seeded_rng;

    fn n(v: u64) -> Natural {
        Natural::from(v)
    }

    fn toy_key(mode: DecryptionMode) -> (PublicKey, PrivateKey) {
        keygen_from_primes(&[n(5), n(7)], &[1, 1], Some(&n(5)), mode).unwrap()
    }

    #[test]
    fn toy_keygen_exponents() {
        let (_, strict) = toy_key(DecryptionMode::StrictPaper);
        assert_eq!(strict.exponent_modulus(), n(24));
        assert_eq!(n(5) * n(5) % n(24), n(1));
        assert_eq!(strict.d(), &n(5));
        let (pk, robust) = toy_key(DecryptionMode::Robust);
        assert_eq!(robust.exponent_modulus(), n(48));
        assert_eq!(n(5) * n(29) % n(48), n(1));
        assert_eq!(robust.d(), &n(29));
        assert_eq!(pk.n(), &n(35));
    }

    #[test]
    fn keygen_rejects_bad_exponents() {
        let primes = [n(5), n(7)];
        for e in [4u64, 3, 1] {
            // 3 divides 6 = 5 + 1
            assert_eq!(
                keygen_from_primes(&primes, &[1, 1], Some(&n(e)), DecryptionMode::StrictPaper),
                Err(Error::BadExponentChoice)
            );
        }
        assert!(keygen_from_primes(&primes, &[2, 1], None, DecryptionMode::Robust).is_err());
        assert!(keygen_from_primes(&primes[..1], &[1], None, DecryptionMode::Robust).is_err());
    }

    #[test]
    fn default_exponent_is_smallest_coprime_odd() {
        let mut rng = seeded_rng(3);
        let (pk, sk) = keygen(3, &[1, 1, 1], 64, None, DecryptionMode::Robust, &mut rng).unwrap();
        let l = sk.exponent_modulus();
        let mut e = n(65537);
        while !e.gcd(&l).is_one() {
            e += 2u32;
        }
        assert_eq!(pk.e(), &e);
        assert_eq!((pk.e() * sk.d()) % &l, n(1));
    }

    #[test]
    fn validate_toy_message() {
        let (pk, _) = toy_key(DecryptionMode::Robust);
        assert_eq!(8 * 11 % 35, 18);
        let msg = MessagePair::new(n(3), n(4));
        assert_eq!(validate_message(&pk, &msg, DecryptionMode::Robust).unwrap(), n(18));
        // jacobi(8, 35) = -1, so strict mode accepts it too
        assert_eq!(validate_message(&pk, &msg, DecryptionMode::StrictPaper).unwrap(), n(18));
        // 6^2 - 1 = 35
        assert!(matches!(
            validate_message(&pk, &MessagePair::new(n(6), n(4)), DecryptionMode::Robust),
            Err(Error::MessageNotEncryptable(_))
        ));
        assert!(matches!(
            validate_message(&pk, &MessagePair::new(n(1), n(4)), DecryptionMode::Robust),
            Err(Error::MessageNotEncryptable(_))
        ));
        assert_eq!(
            validate_message(&pk, &MessagePair::new(n(3), n(14)), DecryptionMode::Robust),
            Err(Error::ImpossibleOperation { factor: n(7) })
        );
    }

    #[test]
    fn toy_encrypt_and_decrypt() {
        let (pk, sk) = toy_key(DecryptionMode::Robust);
        // oracle: multiply (A + B√D) by (z + √D) k times, divide once at the end.
        // Repeated ⊙ is not usable here: 1 ⊙ 1 ⊙ 1 has denominator 28.
        let naive = |z: u64, k: u32| {
            let (mut a, mut b) = (1u64, 0u64);
            for _ in 0..k {
                (a, b) = ((a * z + 18 * b) % 35, (b * z + a) % 35);
            }
            let b_inv = (1..35u64).find(|t| b * t % 35 == 1).unwrap();
            a * b_inv % 35
        };
        assert_eq!(naive(1, 5), 34);

        let msg = MessagePair::new(n(3), n(4));
        let ct = encrypt(&pk, &msg, DecryptionMode::Robust).unwrap();
        assert_eq!(ct, Ciphertext { c: n(34), d_coef: n(18) });

        assert_eq!(naive(34, 29), 1);
        for ev in [Evaluator::Ladder, Evaluator::Matrix, Evaluator::SquareMultiply] {
            assert_eq!(decrypt_with(&sk, &ct, ev).unwrap(), msg);
        }
        assert_eq!(recover_parameter_direct(&sk, &ct).unwrap(), n(1));
    }

    #[test]
    fn sign_symmetry() {
        let (pk, _) = toy_key(DecryptionMode::Robust);
        let a = MessagePair::new(n(3), n(4));
        let b = MessagePair::new(n(3), n(31));
        let da = validate_message(&pk, &a, DecryptionMode::Robust).unwrap();
        let db = validate_message(&pk, &b, DecryptionMode::Robust).unwrap();
        assert_eq!(da, db);
        let pp = PellParams::new(n(35), da).unwrap();
        let ma = phi(&HyperbolaPoint::new(a.mx, a.my, &pp).unwrap(), &pp).unwrap();
        let mb = phi(&HyperbolaPoint::new(b.mx, b.my, &pp).unwrap(), &pp).unwrap();
        assert_eq!(mb, ma.inverse(&pp));
    }

    #[test]
    fn toy_point_mode() {
        let (pk, sk) = toy_key(DecryptionMode::Robust);
        let msg = MessagePair::new(n(3), n(4));
        let ct = encrypt_point(&pk, &msg, DecryptionMode::Robust).unwrap();
        let pp = PellParams::new(n(35), n(18)).unwrap();
        let expected = phi_inv(&PellParameter::Finite(n(34)), &pp).unwrap();
        assert_eq!((&ct.cx, &ct.cy), (expected.x(), expected.y()));
        assert_eq!(decrypt_point(&sk, &ct).unwrap(), msg);

        let (pk1, _) = keygen_from_primes(&[n(5), n(7)], &[1, 1], Some(&n(5)), DecryptionMode::Robust).unwrap();
        let trivial = PublicKey { n: pk1.n().clone(), e: n(1) };
        let ct = encrypt_point(&trivial, &msg, DecryptionMode::Robust).unwrap();
        assert_eq!((ct.cx, ct.cy), (msg.mx.clone(), msg.my.clone()));
    }

    #[test]
    fn round_trip_random_messages() {
        let mut rng = seeded_rng(99);
        for (r, bits) in [(2usize, 32u64), (3, 48), (4, 64)] {
            let exps = vec![1; r];
            let (pk, sk) = keygen(r, &exps, bits, None, DecryptionMode::Robust, &mut rng).unwrap();
            for _ in 0..25 {
                let msg = MessagePair::random(&pk, DecryptionMode::Robust, &mut rng);
                let ct = encrypt(&pk, &msg, DecryptionMode::Robust).unwrap();
                assert_eq!(decrypt(&sk, &ct).unwrap(), msg);
                assert!(ct.c.gcd(pk.n()).is_one());
                let pct = encrypt_point(&pk, &msg, DecryptionMode::Robust).unwrap();
                assert_eq!(decrypt_point(&sk, &pct).unwrap(), msg);
            }
        }
    }

    #[test]
    fn prime_power_moduli_round_trip() {
        let mut rng = seeded_rng(12);
        let (pk, sk) = keygen(2, &[3, 1], 40, None, DecryptionMode::Robust, &mut rng).unwrap();
        assert_eq!(sk.factors().factors()[0].1, 3);
        for _ in 0..20 {
            let msg = MessagePair::random(&pk, DecryptionMode::Robust, &mut rng);
            let ct = encrypt(&pk, &msg, DecryptionMode::Robust).unwrap();
            assert_eq!(decrypt(&sk, &ct).unwrap(), msg);
            assert_eq!(
                recover_parameter(&sk, &ct, Evaluator::Ladder).unwrap(),
                recover_parameter_direct(&sk, &ct).unwrap()
            );
        }
    }

    #[test]
    fn decrypt_rejects_non_unit_d() {
        let (_, sk) = toy_key(DecryptionMode::Robust);
        let ct = Ciphertext { c: n(3), d_coef: n(10) };
        assert!(matches!(decrypt(&sk, &ct), Err(Error::DecryptionFailure(_))));
        let pct = PointCiphertext { cx: n(2), cy: n(0), d_coef: n(18) };
        assert!(matches!(decrypt_point(&sk, &pct), Err(Error::DecryptionFailure(_))));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn key(r: usize, bits: u64, mode: DecryptionMode, seed: u64) -> (PublicKey, PrivateKey, crate::SeededRng) {
            let mut rng = seeded_rng(seed);
            let (pk, sk) = keygen(r, &vec![1; r], bits, None, mode, &mut rng).unwrap();
            (pk, sk, rng)
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn robust_round_trip(r in 2usize..=4, bits in 16u64..=512, seed in any::<u64>()) {
                let (pk, sk, mut rng) = key(r, bits, DecryptionMode::Robust, seed);
                for _ in 0..3 {
                    let msg = MessagePair::random(&pk, DecryptionMode::Robust, &mut rng);
                    let ct = encrypt(&pk, &msg, DecryptionMode::Robust).unwrap();
                    prop_assert!(ct.c.gcd(pk.n()).is_one());
                    prop_assert_eq!(decrypt(&sk, &ct).unwrap(), msg.clone());
                    let pct = encrypt_point(&pk, &msg, DecryptionMode::Robust).unwrap();
                    prop_assert_eq!(decrypt_point(&sk, &pct).unwrap(), decrypt(&sk, &ct).unwrap());
                }
            }

            #[test]
            fn crt_matches_direct_in_both_modes(r in 2usize..=3, bits in 16u64..=128, seed in any::<u64>(), strict in any::<bool>()) {
                let mode = if strict { DecryptionMode::StrictPaper } else { DecryptionMode::Robust };
                let (pk, sk, mut rng) = key(r, bits, mode, seed);
                for _ in 0..5 {
                    let msg = MessagePair::random(&pk, mode, &mut rng);
                    let ct = encrypt(&pk, &msg, mode).unwrap();
                    for ev in [Evaluator::Ladder, Evaluator::Matrix] {
                        if let Ok(fast) = recover_parameter(&sk, &ct, ev) {
                            prop_assert_eq!(fast, recover_parameter_direct(&sk, &ct).unwrap());
                        }
                    }
                }
            }

            #[test]
            fn point_encryption_never_divides(bits in 16u64..=96, seed in any::<u64>(), mx in any::<u128>(), my in any::<u128>()) {
                let (pk, _, _) = key(2, bits, DecryptionMode::Robust, seed);
                let msg = MessagePair::new(Natural::from(mx), Natural::from(my));
                if validate_message(&pk, &msg, DecryptionMode::Robust).is_ok() {
                    let res = encrypt_point(&pk, &msg, DecryptionMode::Robust);
                    let divided = matches!(res, Err(Error::ImpossibleOperation { .. }));
                    prop_assert!(!divided, "encrypt_point divided: {:?}", res);
                }
            }

            #[test]
            fn strict_two_prime_messages_split_residuosity(bits in 16u64..=96, seed in any::<u64>()) {
                let (pk, sk, mut rng) = key(2, bits, DecryptionMode::StrictPaper, seed);
                let msg = MessagePair::random(&pk, DecryptionMode::StrictPaper, &mut rng);
                let d = validate_message(&pk, &msg, DecryptionMode::StrictPaper).unwrap();
                let non_residues = sk.factors().primes().filter(|p| jacobi(&(&d % *p), p) == -1).count();
                prop_assert_eq!(non_residues, 1);
            }
        }
    }
}
