//! Group orders: `Ψ(N)` and exhaustive point counts for small prime powers.

use num_traits::One;

use super::HyperbolaPoint;
use crate::arith::{is_probable_prime, FactoredModulus, Natural};
use crate::error::{Error, Result};

/// Largest `p^r` accepted by [`enumerate_hyperbola`].
pub const ENUMERATION_LIMIT: u64 = 1_000_000;

/// `Ψ(N) = ∏ p_i^{e_i - 1} (p_i + 1)`.
pub fn psi(fm: &FactoredModulus) -> Natural {
    fm.factors()
        .iter()
        .map(|(p, e)| hyperbola_order(p, *e))
        .fold(Natural::one(), |acc, v| acc * v)
}

/// `p^{r-1} (p + 1)`: the number of solutions mod `p^r` when `D` is a
/// quadratic non-residue mod `p`.
pub fn hyperbola_order(p: &Natural, r: u32) -> Natural {
    p.pow(r.saturating_sub(1)) * (p + 1u32)
}

/// All `(x, y)` in `Z_{p^r}^2` with `x^2 - D y^2 ≡ 1`.
///
/// Every `y` is visited; the matching `x` values come from a table of square
/// roots built by squaring every residue once, so the scan is exact and
/// linear in `p^r` plus the output size.
pub fn enumerate_hyperbola(p: u64, r: u32, d: u64) -> Result<Vec<HyperbolaPoint>> {
    let mut out = Vec::new();
    scan(p, r, d, |x, y| out.push(HyperbolaPoint::new_unchecked(Natural::from(x), Natural::from(y))))?;
    Ok(out)
}

/// Number of points found by the same scan as [`enumerate_hyperbola`].
pub fn count_hyperbola(p: u64, r: u32, d: u64) -> Result<u64> {
    let mut count = 0u64;
    scan(p, r, d, |_, _| count += 1)?;
    Ok(count)
}

fn scan(p: u64, r: u32, d: u64, mut visit: impl FnMut(u64, u64)) -> Result<()> {
    if r == 0 || !is_probable_prime(&Natural::from(p)) {
        return Err(Error::InvalidParameters("need a prime p and r >= 1".into()));
    }
    let m = p
        .checked_pow(r)
        .filter(|&m| m <= ENUMERATION_LIMIT)
        .ok_or(Error::ModulusTooLarge)?;
    let d = d % m;

    // Bucket every x by x^2 mod m (counting sort into `roots`).
    let mut start = vec![0u32; m as usize + 1];
    for x in 0..m {
        start[(x * x % m) as usize + 1] += 1;
    }
    for i in 0..m as usize {
        start[i + 1] += start[i];
    }
    let mut fill = start.clone();
    let mut roots = vec![0u32; m as usize];
    for x in 0..m {
        let s = (x * x % m) as usize;
        roots[fill[s] as usize] = x as u32;
        fill[s] += 1;
    }

    for y in 0..m {
        let target = ((1 + d * (y * y % m)) % m) as usize;
        for &x in &roots[start[target] as usize..start[target + 1] as usize] {
            visit(x as u64, y);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pell::PellParams;

    fn n(v: u64) -> Natural {
        Natural::from(v)
    }

    fn brute_force_count(m: u64, d: u64) -> u64 {
        let mut c = 0;
        for x in 0..m {
            for y in 0..m {
                if (x * x + m * m - d * (y * y % m) % m) % m == 1 % m {
                    c += 1;
                }
            }
        }
        c
    }

    #[test]
    fn psi_examples() {
        let fm = |f: Vec<(u64, u32)>| {
            FactoredModulus::new(f.into_iter().map(|(p, e)| (n(p), e)).collect()).unwrap()
        };
        assert_eq!(psi(&fm(vec![(5, 1), (7, 1)])), n(48));
        assert_eq!(psi(&fm(vec![(5, 3)])), n(150));
        assert_eq!(psi(&fm(vec![(5, 3), (7, 2)])), n(8400));
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_hyperbola(5, 1, 2).unwrap().len(), 6);
        assert_eq!(enumerate_hyperbola(5, 2, 2).unwrap().len(), 30);
        assert_eq!(brute_force_count(7, 3), 8);
        assert_eq!(enumerate_hyperbola(7, 1, 3).unwrap().len(), 8);
        assert_eq!(enumerate_hyperbola(101, 3, 2), Err(Error::ModulusTooLarge));
        assert!(enumerate_hyperbola(9, 1, 2).is_err());
    }

    #[test]
    fn enumeration_matches_double_loop() {
        for (p, r) in [(3u64, 1u32), (3, 2), (3, 3), (5, 2), (7, 2), (11, 1), (13, 1)] {
            let m = p.pow(r);
            for d in 1..p {
                assert_eq!(count_hyperbola(p, r, d).unwrap(), brute_force_count(m, d), "p={p} r={r} d={d}");
            }
        }
    }

    #[test]
    fn enumerated_points_are_on_curve() {
        let pp = PellParams::new(n(125), n(2)).unwrap();
        let pts = enumerate_hyperbola(5, 3, 2).unwrap();
        assert_eq!(pts.len(), 150);
        assert!(pts.iter().all(|pt| pt.is_on_curve(&pp)));
    }
}
