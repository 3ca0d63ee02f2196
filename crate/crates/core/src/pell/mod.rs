//! The Pell hyperbola `H: x^2 - D y^2 = 1` over `Z_n` with the Brahmagupta
//! product `⊗`, and its parametrization `P = Z_n ∪ {α}` with the product
//! `a ⊙ b = (D + ab) / (a + b)`.
//!
//! `phi` maps `(x, y) ↦ (1 + x) / y` and `phi_inv` maps
//! `m ↦ ((m^2 + D) / (m^2 - D), 2m / (m^2 - D))`. Over a composite modulus
//! divisions can fail on non-units; such failures surface as
//! [`Error::ImpossibleOperation`] carrying the gcd with the modulus.

mod order;
mod redei;

pub use order::{count_hyperbola, enumerate_hyperbola, hyperbola_order, psi, ENUMERATION_LIMIT};
pub use redei::{
    power, redei_eval, redei_eval_counted, redei_ladder, redei_ladder_counted, redei_ladder_point, Evaluator, RedeiPair,
};

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{add_mod, mod_inv, mul_mod, neg_mod, sub_mod, Natural};
use crate::error::{Error, Result};

/// The ambient setting: modulus `n` and conic coefficient `D`, `gcd(D, n) = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PellParams {
    modulus: Natural,
    d: Natural,
}

impl PellParams {
    pub fn new(modulus: Natural, d: Natural) -> Result<Self> {
        if modulus < Natural::from(2u32) {
            return Err(Error::InvalidParameters("modulus must be at least 2".into()));
        }
        let d = d % &modulus;
        if d.is_zero() || !d.gcd(&modulus).is_one() {
            return Err(Error::InvalidParameters(
                "D must be a unit modulo the modulus".into(),
            ));
        }
        Ok(PellParams { modulus, d })
    }

    pub fn modulus(&self) -> &Natural {
        &self.modulus
    }

    pub fn d(&self) -> &Natural {
        &self.d
    }

    /// Same `D`, reduced modulo a divisor of the modulus.
    pub fn reduce(&self, divisor: &Natural) -> Result<Self> {
        PellParams::new(divisor.clone(), &self.d % divisor)
    }
}

/// A solution of `x^2 - D y^2 ≡ 1`. Coordinates are reduced.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HyperbolaPoint {
    x: Natural,
    y: Natural,
}

impl HyperbolaPoint {
    /// Checks the curve equation.
    pub fn new(x: Natural, y: Natural, pp: &PellParams) -> Result<Self> {
        let n = pp.modulus();
        let p = HyperbolaPoint { x: x % n, y: y % n };
        if p.is_on_curve(pp) {
            Ok(p)
        } else {
            Err(Error::NotOnCurve)
        }
    }

    pub(crate) fn new_unchecked(x: Natural, y: Natural) -> Self {
        HyperbolaPoint { x, y }
    }

    /// `(1, 0)`.
    pub fn identity() -> Self {
        HyperbolaPoint { x: Natural::one(), y: Natural::zero() }
    }

    pub fn x(&self) -> &Natural {
        &self.x
    }

    pub fn y(&self) -> &Natural {
        &self.y
    }

    pub fn into_coords(self) -> (Natural, Natural) {
        (self.x, self.y)
    }

    pub fn is_on_curve(&self, pp: &PellParams) -> bool {
        let n = pp.modulus();
        let lhs = mul_mod(&self.x, &self.x, n);
        let rhs = mul_mod(&mul_mod(&self.y, &self.y, n), pp.d(), n);
        sub_mod(&(&lhs % n), &rhs, n) == Natural::one() % n
    }

    /// `(x, -y)`.
    pub fn inverse(&self, pp: &PellParams) -> Self {
        HyperbolaPoint { x: self.x.clone(), y: neg_mod(&self.y, pp.modulus()) }
    }
}

/// An element of `Z_n ∪ {α}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PellParameter {
    Finite(Natural),
    /// The point at infinity of the parametrization; identity of `⊙`.
    Alpha,
}

impl PellParameter {
    pub fn finite(m: &Natural, pp: &PellParams) -> Self {
        PellParameter::Finite(m % pp.modulus())
    }

    pub fn as_finite(&self) -> Option<&Natural> {
        match self {
            PellParameter::Finite(m) => Some(m),
            PellParameter::Alpha => None,
        }
    }

    /// The `⊙`-inverse: `-m`, and `α` for `α`.
    pub fn inverse(&self, pp: &PellParams) -> Self {
        match self {
            PellParameter::Finite(m) => PellParameter::Finite(neg_mod(m, pp.modulus())),
            PellParameter::Alpha => PellParameter::Alpha,
        }
    }
}

/// Operation tally for the exponentiation routines.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCount {
    /// Group operations: `⊗`/`⊙` products, matrix products, ladder steps.
    pub group_ops: u64,
    /// Modular inversions.
    pub inversions: u64,
}

/// Inverts `a` modulo `n`, turning a failure into an impossible operation.
pub(crate) fn invert(a: &Natural, n: &Natural) -> Result<Natural> {
    mod_inv(a, n).map_err(|e| match e {
        Error::NotInvertible { gcd } => Error::ImpossibleOperation { factor: gcd },
        other => other,
    })
}

/// `(x, y) ⊗ (w, z) = (xw + yzD, yw + xz)`.
pub fn point_mul(p: &HyperbolaPoint, q: &HyperbolaPoint, pp: &PellParams) -> HyperbolaPoint {
    let n = pp.modulus();
    let x = (&p.x * &q.x + mul_mod(&(&p.y * &q.y), pp.d(), n)) % n;
    let y = (&p.y * &q.x + &p.x * &q.y) % n;
    HyperbolaPoint { x, y }
}

/// `a ⊙ b`. A zero denominator is the legitimate `α` result; a denominator
/// sharing a proper factor with the modulus is an impossible operation.
pub fn param_mul(a: &PellParameter, b: &PellParameter, pp: &PellParams) -> Result<PellParameter> {
    let mut count = OpCount::default();
    param_mul_counted(a, b, pp, &mut count)
}

pub(crate) fn param_mul_counted(
    a: &PellParameter,
    b: &PellParameter,
    pp: &PellParams,
    count: &mut OpCount,
) -> Result<PellParameter> {
    let (a, b) = match (a, b) {
        (PellParameter::Alpha, other) | (other, PellParameter::Alpha) => return Ok(other.clone()),
        (PellParameter::Finite(a), PellParameter::Finite(b)) => (a, b),
    };
    count.group_ops += 1;
    let n = pp.modulus();
    let den = add_mod(a, b, n);
    if den.is_zero() {
        return Ok(PellParameter::Alpha);
    }
    count.inversions += 1;
    let inv = invert(&den, n)?;
    let num = add_mod(pp.d(), &mul_mod(a, b, n), n);
    Ok(PellParameter::Finite(mul_mod(&num, &inv, n)))
}

/// `Φ(x, y) = (1 + x) / y`, with `(1, 0) ↦ α` and `(-1, 0) ↦ 0`.
pub fn phi(p: &HyperbolaPoint, pp: &PellParams) -> Result<PellParameter> {
    let n = pp.modulus();
    let minus_one = n - 1u32;
    if p.y.is_zero() {
        if p.x == Natural::one() % n {
            return Ok(PellParameter::Alpha);
        }
        if p.x == minus_one {
            return Ok(PellParameter::Finite(Natural::zero()));
        }
        // x^2 ≡ 1 with x ≠ ±1: x - 1 splits the modulus
        return Err(Error::ImpossibleOperation { factor: (&p.x - 1u32).gcd(n) });
    }
    let inv = invert(&p.y, n)?;
    Ok(PellParameter::Finite(mul_mod(&add_mod(&Natural::one(), &p.x, n), &inv, n)))
}

/// `Φ^{-1}(m) = ((m^2 + D) / (m^2 - D), 2m / (m^2 - D))`, `α ↦ (1, 0)`.
pub fn phi_inv(m: &PellParameter, pp: &PellParams) -> Result<HyperbolaPoint> {
    let m = match m {
        PellParameter::Alpha => return Ok(HyperbolaPoint::identity()),
        PellParameter::Finite(m) => m,
    };
    let n = pp.modulus();
    let m2 = mul_mod(m, m, n);
    let inv = invert(&sub_mod(&m2, pp.d(), n), n)?;
    let x = mul_mod(&add_mod(&m2, pp.d(), n), &inv, n);
    let y = mul_mod(&((m << 1u32) % n), &inv, n);
    Ok(HyperbolaPoint { x, y })
}

/// `k`-fold `⊙`-power by square-and-multiply. `k = 0` gives `α`.
pub fn param_pow(m: &PellParameter, k: &Natural, pp: &PellParams) -> Result<PellParameter> {
    param_pow_counted(m, k, pp, &mut OpCount::default())
}

pub fn param_pow_counted(
    m: &PellParameter,
    k: &Natural,
    pp: &PellParams,
    count: &mut OpCount,
) -> Result<PellParameter> {
    let mut acc = PellParameter::Alpha;
    for i in (0..k.bits()).rev() {
        acc = param_mul_counted(&acc, &acc, pp, count)?;
        if k.bit(i) {
            acc = param_mul_counted(&acc, m, pp, count)?;
        }
    }
    Ok(acc)
}

/// `k`-fold `⊗`-power by square-and-multiply. Division free.
pub fn point_pow(p: &HyperbolaPoint, k: &Natural, pp: &PellParams) -> HyperbolaPoint {
    point_pow_counted(p, k, pp, &mut OpCount::default())
}

pub fn point_pow_counted(
    p: &HyperbolaPoint,
    k: &Natural,
    pp: &PellParams,
    count: &mut OpCount,
) -> HyperbolaPoint {
    let bits = k.bits();
    if bits == 0 {
        return HyperbolaPoint::identity();
    }
    let mut acc = p.clone();
    for i in (0..bits - 1).rev() {
        acc = point_mul(&acc, &acc, pp);
        count.group_ops += 1;
        if k.bit(i) {
            acc = point_mul(&acc, p, pp);
            count.group_ops += 1;
        }
    }
    acc
}
