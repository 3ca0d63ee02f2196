//! Rédei polynomials and three routes to `m^{⊙k}`.
//!
//! With `M = [[z, D], [1, z]]`, `M^k = [[A_k, D B_k], [B_k, A_k]]` and
//! `(z + √D)^k = A_k + B_k √D`. The Rédei function `Q_k = A_k / B_k` equals the
//! `k`-th `⊙`-power of `z`.
//!
//! - [`Evaluator::SquareMultiply`]: square-and-multiply on `⊙`, one inversion
//!   per step.
//! - [`Evaluator::Matrix`]: powers of `M`, reduced at every step, one final
//!   division.
//! - [`Evaluator::Ladder`]: moves `z` onto the hyperbola, where the norm is 1,
//!   and runs a Lucas ladder on `V_j = 2 x_j` (`V_{2j} = V_j^2 - 2`,
//!   `V_{2j+1} = V_j V_{j+1} - V_1`), two products per exponent bit. The
//!   y-coordinate is recovered at the end from `V_k` and `V_{k+1}`, so the
//!   whole power costs one inversion, plus one more to return to the
//!   parameter. Used by decryption.

use num_traits::{One, Zero};

use super::{invert, param_pow_counted, phi, HyperbolaPoint, OpCount, PellParameter, PellParams};
use crate::arith::{add_mod, mul_mod, sub_mod, Natural};
use crate::error::Result;

/// `(A_k, B_k)` with `M^k = [[A_k, D B_k], [B_k, A_k]]`, entries reduced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RedeiPair {
    pub a: Natural,
    pub b: Natural,
}

impl RedeiPair {
    /// `Q_k = A_k / B_k`. `B_k ≡ 0` means the power is `α`.
    pub fn quotient(&self, modulus: &Natural) -> Result<PellParameter> {
        if self.b.is_zero() {
            return Ok(PellParameter::Alpha);
        }
        let inv = invert(&self.b, modulus)?;
        Ok(PellParameter::Finite(mul_mod(&self.a, &inv, modulus)))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Evaluator {
    SquareMultiply,
    Matrix,
    #[default]
    Ladder,
}

/// `(A_k, B_k)` modulo `modulus` by binary powering of `M`.
/// `k = 0` gives the identity matrix, `(1, 0)`.
pub fn redei_eval(d: &Natural, z: &Natural, k: &Natural, modulus: &Natural) -> RedeiPair {
    redei_eval_counted(d, z, k, modulus, &mut OpCount::default())
}

pub fn redei_eval_counted(
    d: &Natural,
    z: &Natural,
    k: &Natural,
    modulus: &Natural,
    count: &mut OpCount,
) -> RedeiPair {
    let n = modulus;
    let d = d % n;
    let z = z % n;
    let bits = k.bits();
    if bits == 0 {
        return RedeiPair { a: Natural::one() % n, b: Natural::zero() };
    }
    let (mut a, mut b) = (z.clone(), Natural::one() % n);
    for i in (0..bits - 1).rev() {
        // (A + B√D)^2 = (A^2 + D B^2) + 2AB √D
        let a2 = &a * &a;
        let db2 = mul_mod(&(&b * &b), &d, n);
        let ab = (&a * &b) << 1u32;
        a = (a2 + db2) % n;
        b = ab % n;
        count.group_ops += 1;
        if k.bit(i) {
            // (A + B√D)(z + √D) = (Az + DB) + (A + Bz) √D
            let na = (&a * &z + &d * &b) % n;
            let nb = (&b * &z + &a) % n;
            a = na;
            b = nb;
            count.group_ops += 1;
        }
    }
    RedeiPair { a, b }
}

/// `m^{⊙k}` through the Lucas ladder on the hyperbola.
///
/// Needs `2`, `m`, `m^2 - D` and `D` to be units; otherwise falls back to
/// square-and-multiply, which reports impossible operations precisely.
pub fn redei_ladder(m: &PellParameter, k: &Natural, pp: &PellParams) -> Result<PellParameter> {
    redei_ladder_counted(m, k, pp, &mut OpCount::default())
}

pub fn redei_ladder_counted(
    m: &PellParameter,
    k: &Natural,
    pp: &PellParams,
    count: &mut OpCount,
) -> Result<PellParameter> {
    let z = match m {
        PellParameter::Alpha => return Ok(PellParameter::Alpha),
        PellParameter::Finite(z) => z,
    };
    if k.is_zero() {
        return Ok(PellParameter::Alpha);
    }
    let before = *count;
    if let Some(point) = ladder_point_counted(z, k, pp, count) {
        if !point.y().is_zero() {
            count.inversions += 1;
        }
        if let Ok(result) = phi(&point, pp) {
            return Ok(result);
        }
    }
    *count = before;
    param_pow_counted(m, k, pp, count)
}

/// `Φ^{-1}(z)^{⊗k}` by the Lucas ladder, with a single modular inversion.
///
/// Returns `None` when `z`, `m^2 - D` or `2D` is not a unit; callers fall
/// back to a division-free or inversion-per-step method.
pub fn redei_ladder_point(z: &Natural, k: &Natural, pp: &PellParams) -> Option<HyperbolaPoint> {
    ladder_point_counted(z, k, pp, &mut OpCount::default())
}

fn ladder_point_counted(z: &Natural, k: &Natural, pp: &PellParams, count: &mut OpCount) -> Option<HyperbolaPoint> {
    let n = pp.modulus();
    let d = pp.d();
    let z = &(z % n);
    if k.is_zero() {
        return Some(HyperbolaPoint::identity());
    }
    let two = Natural::from(2u32) % n;

    // One inversion of (z^2 - D) * 4Dz yields both 1/(z^2 - D), for
    // Φ^{-1}(z), and 1/(4Dz), for the final y-coordinate.
    let z2 = mul_mod(z, z, n);
    let w = sub_mod(&z2, d, n);
    let s = mul_mod(&mul_mod(d, z, n), &Natural::from(4u32), n);
    count.inversions += 1;
    let inv = invert(&mul_mod(&w, &s, n), n).ok()?;
    let inv_w = mul_mod(&inv, &s, n);
    let inv_s = mul_mod(&inv, &w, n);
    let x = mul_mod(&add_mod(&z2, d, n), &inv_w, n);

    // (V_j, V_{j+1}) with V_j = 2 x_j, starting from j = 1
    let v1 = add_mod(&x, &x, n);
    let (mut lo, mut hi) = (v1.clone(), sub_mod(&mul_mod(&v1, &v1, n), &two, n));
    for i in (0..k.bits() - 1).rev() {
        let cross = sub_mod(&mul_mod(&lo, &hi, n), &v1, n);
        if k.bit(i) {
            hi = sub_mod(&mul_mod(&hi, &hi, n), &two, n);
            lo = cross;
        } else {
            lo = sub_mod(&mul_mod(&lo, &lo, n), &two, n);
            hi = cross;
        }
        count.group_ops += 1;
    }

    // x_k = V_k / 2, and x_{k+1} = x x_k + D y y_k with y = 2z / (z^2 - D)
    // gives y_k = (V_{k+1} - x V_k) (z^2 - D) / (4Dz).
    let half = (n + 1u32) >> 1u32;
    let xk = mul_mod(&lo, &half, n);
    let yk = mul_mod(&mul_mod(&sub_mod(&hi, &mul_mod(&x, &lo, n), n), &w, n), &inv_s, n);
    Some(HyperbolaPoint::new_unchecked(xk, yk))
}

/// `m^{⊙k}` with the chosen evaluator. All three agree wherever they are defined.
pub fn power(
    m: &PellParameter,
    k: &Natural,
    pp: &PellParams,
    evaluator: Evaluator,
    count: &mut OpCount,
) -> Result<PellParameter> {
    match evaluator {
        Evaluator::SquareMultiply => param_pow_counted(m, k, pp, count),
        Evaluator::Ladder => redei_ladder_counted(m, k, pp, count),
        Evaluator::Matrix => match m {
            PellParameter::Alpha => Ok(PellParameter::Alpha),
            PellParameter::Finite(z) => {
                let pair = redei_eval_counted(pp.d(), z, k, pp.modulus(), count);
                if !pair.b.is_zero() {
                    count.inversions += 1;
                }
                pair.quotient(pp.modulus())
            }
        },
    }
}
