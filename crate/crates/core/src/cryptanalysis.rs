//! The attacker's side: recovering the factorization of `N` from `Ψ(N)`, and
//! the likelihood of an impossible `⊙` operation.
//!
//! [`find_factor`] is the `⊙`-group analogue of the classical
//! factor-from-`φ(N)` method: write `Ψ(N) = 2^h t` with `t` odd, raise a
//! random `a` to `t`, then square up to `h` times looking for an element that
//! is the order-two element `0` (or the identity) modulo some but not all
//! prime powers. Any `⊙` step whose denominator shares a factor with `N`
//! also yields a factor and is harvested.

use std::time::{Duration, Instant};

use num_bigint::RandBigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::arith::{integer_root, is_probable_prime, jacobi, FactoredModulus, Natural};
use crate::error::{Error, Result};
use crate::pell::{param_mul, param_pow, PellParameter, PellParams};

/// Attempts at drawing a `D` with Jacobi symbol −1 before settling for any unit.
const D_ATTEMPTS: usize = 64;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AttackReport {
    pub trials: u64,
    pub successes: u64,
    /// Nontrivial divisors returned by successful trials.
    pub factors_found: Vec<Natural>,
    pub elapsed: Duration,
}

impl AttackReport {
    pub fn success_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.successes as f64 / self.trials as f64
        }
    }

    pub fn merge(&mut self, other: AttackReport) {
        self.trials += other.trials;
        self.successes += other.successes;
        self.factors_found.extend(other.factors_found);
        self.elapsed += other.elapsed;
    }
}

fn nontrivial(g: &Natural, n: &Natural) -> bool {
    !g.is_one() && !g.is_zero() && g != n
}

/// One trial of the factoring algorithm. Returns a nontrivial divisor of
/// `n`, or `0` when the trial fails.
///
/// `d_coef` fixes the conic coefficient; when `None`, a fresh `D` with
/// `jacobi(D, n) = -1` is drawn for the trial.
pub fn find_factor<R: Rng + ?Sized>(n: &Natural, psi_n: &Natural, d_coef: Option<&Natural>, rng: &mut R) -> Natural {
    let zero = Natural::zero();
    if n < &Natural::from(4u32) {
        return zero;
    }
    if n.is_even() {
        return Natural::from(2u32);
    }
    if psi_n.is_zero() {
        return zero;
    }
    let h = psi_n.trailing_zeros().unwrap_or(0);
    let t = psi_n >> h;

    let a = rng.gen_biguint_range(&Natural::one(), n);
    let g = a.gcd(n);
    if !g.is_one() {
        return g;
    }
    if h == 0 {
        return zero;
    }

    let d = match d_coef {
        Some(d) => d % n,
        None => match draw_d(n, rng) {
            Ok(d) => d,
            Err(g) => return g,
        },
    };
    let Ok(pp) = PellParams::new(n.clone(), d.clone()) else {
        let g = d.gcd(n);
        return if nontrivial(&g, n) { g } else { zero };
    };

    let mut b = match param_pow(&PellParameter::Finite(a), &t, &pp) {
        Ok(PellParameter::Finite(b)) => b,
        Ok(PellParameter::Alpha) => return zero,
        Err(e) => return harvested(e, n),
    };
    for _ in 0..h {
        // b ≡ 0 is the order-two element; b + 1 is the literal probe of the
        // totient-style algorithm. Either may split n.
        for probe in [b.gcd(n), (&b + 1u32).gcd(n)] {
            if nontrivial(&probe, n) {
                return probe;
            }
        }
        let fin = PellParameter::Finite(b);
        b = match param_mul(&fin, &fin, &pp) {
            Ok(PellParameter::Finite(next)) => next,
            Ok(PellParameter::Alpha) => return zero,
            Err(e) => return harvested(e, n),
        };
    }
    zero
}

fn harvested(e: Error, n: &Natural) -> Natural {
    match e {
        Error::ImpossibleOperation { factor } if nontrivial(&factor, n) => factor,
        _ => Natural::zero(),
    }
}

/// `Err(g)` when the draw itself hit a divisor of `n`.
fn draw_d<R: Rng + ?Sized>(n: &Natural, rng: &mut R) -> std::result::Result<Natural, Natural> {
    let two = Natural::from(2u32);
    let mut fallback = None;
    for _ in 0..D_ATTEMPTS {
        let d = rng.gen_biguint_range(&two, n);
        match jacobi(&d, n) {
            -1 => return Ok(d),
            0 => {
                let g = d.gcd(n);
                if nontrivial(&g, n) {
                    return Err(g);
                }
            }
            _ => {
                fallback.get_or_insert(d);
            }
        }
    }
    // n is a square: no D with symbol −1 exists
    fallback.ok_or_else(Natural::zero)
}

/// Complete prime-power factorization of `n` from a multiple of its
/// `⊙`-group exponent, such as `Ψ(n)`.
pub fn full_factorization<R: Rng + ?Sized>(
    n: &Natural,
    psi_n: &Natural,
    rng: &mut R,
    max_trials: u64,
) -> Result<Vec<(Natural, u32)>> {
    full_factorization_with_report(n, psi_n, rng, max_trials).map(|(f, _)| f)
}

/// [`full_factorization`] together with trial statistics. `max_trials`
/// bounds the total number of [`find_factor`] calls.
pub fn full_factorization_with_report<R: Rng + ?Sized>(
    n: &Natural,
    psi_n: &Natural,
    rng: &mut R,
    max_trials: u64,
) -> Result<(Vec<(Natural, u32)>, AttackReport)> {
    if n.is_zero() {
        return Err(Error::InvalidParameters("cannot factor zero".into()));
    }
    let start = Instant::now();
    let mut report = AttackReport::default();
    let mut found: Vec<(Natural, u32)> = Vec::new();
    // (composite, multiplicity) still to split
    let mut pending = vec![(n.clone(), 1u32)];
    while let Some((m, mult)) = pending.pop() {
        if m.is_one() {
            continue;
        }
        if is_probable_prime(&m) {
            add_factor(&mut found, m, mult);
            continue;
        }
        if let Some((root, k)) = perfect_power(&m) {
            pending.push((root, mult * k));
            continue;
        }
        let divisor = loop {
            if report.trials >= max_trials {
                report.elapsed = start.elapsed();
                return Err(Error::TrialBudgetExhausted(max_trials));
            }
            report.trials += 1;
            let g = find_factor(&m, psi_n, None, rng);
            if !g.is_zero() {
                report.successes += 1;
                report.factors_found.push(g.clone());
                break g;
            }
        };
        let cofactor = &m / &divisor;
        pending.push((divisor, mult));
        pending.push((cofactor, mult));
    }
    found.sort();
    report.elapsed = start.elapsed();
    Ok((found, report))
}

fn add_factor(found: &mut Vec<(Natural, u32)>, p: Natural, mult: u32) {
    match found.iter_mut().find(|(q, _)| *q == p) {
        Some((_, e)) => *e += mult,
        None => found.push((p, mult)),
    }
}

/// `Some((root, k))` with `root^k = m` for the smallest `k >= 2`.
fn perfect_power(m: &Natural) -> Option<(Natural, u32)> {
    let bits = m.bits() as u32;
    (2..=bits).find_map(|k| {
        let root = integer_root(m, k);
        (root > Natural::one() && root.pow(k) == *m).then_some((root, k))
    })
}

/// `1 − ∏ (1 − 1/p_i)`: the share of `Z_N` that is not invertible, which
/// approximates the chance of an impossible `⊙` operation.
pub fn impossible_op_probability(primes: &[Natural]) -> f64 {
    // −expm1(Σ ln(1 − 1/p)) keeps precision for very large primes
    let log_survival: f64 = primes
        .iter()
        .map(|p| {
            let inv = p.to_f64().map_or(0.0, |p| 1.0 / p);
            (-inv).ln_1p()
        })
        .sum();
    -log_survival.exp_m1()
}

/// The exact share of non-invertible elements of `Z_N ∪ {α}`,
/// `(N − φ(N)) / (N + 1)`.
pub fn noninvertible_fraction_exact(fm: &FactoredModulus) -> f64 {
    let n = fm.value();
    let num = n - fm.euler_phi();
    let den = n + 1u32;
    ratio_f64(&num, &den)
}

fn ratio_f64(num: &Natural, den: &Natural) -> f64 {
    let shift = den.bits().saturating_sub(900);
    let (num, den) = (num >> shift, den >> shift);
    num.to_f64().unwrap_or(f64::INFINITY) / den.to_f64().unwrap_or(f64::INFINITY)
}

/// Empirical rate of non-invertible `⊙` denominators: draws operand pairs
/// `(a, b)` uniformly from `Z_N × Z_N` and counts `gcd(a + b, N) ≠ 1`.
pub fn monte_carlo_impossible_rate<R: Rng + ?Sized>(fm: &FactoredModulus, trials: u64, rng: &mut R) -> Result<f64> {
    if trials < 1000 {
        return Err(Error::InvalidParameters("at least 1000 trials are needed".into()));
    }
    let n = fm.value();
    let mut hits = 0u64;
    for _ in 0..trials {
        let a = rng.gen_biguint_below(n);
        let b = rng.gen_biguint_below(n);
        if !((a + b) % n).gcd(n).is_one() {
            hits += 1;
        }
    }
    Ok(hits as f64 / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::gen_prime;
    use crate::pell::psi;
    use crate::seeded_rng;

    fn n(v: u64) -> Natural {
        Natural::from(v)
    }

    #[test]
    fn find_factor_toy_modulus() {
        let mut rng = seeded_rng(0);
        let hit = (0..20)
            .map(|_| find_factor(&n(35), &n(48), None, &mut rng))
            .find(|g| !g.is_zero())
            .expect("a factor within 20 trials");
        assert!(hit == n(5) || hit == n(7));
    }

    #[test]
    fn find_factor_results_divide() {
        let mut rng = seeded_rng(1);
        for _ in 0..200 {
            let g = find_factor(&n(35), &n(48), None, &mut rng);
            assert!(g.is_zero() || g == n(5) || g == n(7));
        }
    }

    #[test]
    fn find_factor_success_rate_on_32_bit_primes() {
        let mut rng = seeded_rng(8);
        let mut hits = 0;
        for _ in 0..20 {
            let p = gen_prime(32, &mut rng).unwrap();
            let q = gen_prime(32, &mut rng).unwrap();
            let fm = FactoredModulus::new(vec![(p, 1), (q, 1)]).unwrap();
            let psi_n = psi(&fm);
            for _ in 0..10 {
                let g = find_factor(fm.value(), &psi_n, None, &mut rng);
                if !g.is_zero() {
                    assert!(nontrivial(&g, fm.value()) && (fm.value() % &g).is_zero());
                    hits += 1;
                }
            }
        }
        assert!(hits as f64 / 200.0 >= 0.25, "{hits}/200");
    }

    #[test]
    fn find_factor_with_odd_psi_gives_up() {
        let mut rng = seeded_rng(2);
        let p = gen_prime(32, &mut rng).unwrap();
        let q = gen_prime(32, &mut rng).unwrap();
        let psi_n = (&p + 1u32) * (&q + 1u32) + 1u32;
        for _ in 0..20 {
            assert!(find_factor(&(&p * &q), &psi_n, None, &mut rng).is_zero());
        }
    }

    #[test]
    fn full_factorization_examples() {
        let mut rng = seeded_rng(3);
        assert_eq!(full_factorization(&n(35), &n(48), &mut rng, 50).unwrap(), vec![(n(5), 1), (n(7), 1)]);
        assert_eq!(
            full_factorization(&n(875), &n(1200), &mut rng, 50).unwrap(),
            vec![(n(5), 3), (n(7), 1)]
        );
        let (f, report) = full_factorization_with_report(&n(7), &n(8), &mut rng, 50).unwrap();
        assert_eq!(f, vec![(n(7), 1)]);
        assert_eq!(report.trials, 0);
        // an odd Ψ leaves only the gcd shortcut, which is hopeless at this size
        let big = n(4_294_967_291) * n(4_294_967_279);
        assert_eq!(
            full_factorization(&big, &n(49), &mut rng, 5),
            Err(Error::TrialBudgetExhausted(5))
        );
    }

    #[test]
    fn factorization_recovers_psi() {
        let mut rng = seeded_rng(4);
        for _ in 0..10 {
            let p = gen_prime(40, &mut rng).unwrap();
            let q = gen_prime(36, &mut rng).unwrap();
            let r = gen_prime(24, &mut rng).unwrap();
            let fm = FactoredModulus::new(vec![(p, 1), (q, 2), (r, 1)]).unwrap();
            let psi_n = psi(&fm);
            let (factors, report) = full_factorization_with_report(fm.value(), &psi_n, &mut rng, 200).unwrap();
            let product = factors.iter().fold(Natural::one(), |acc, (p, e)| acc * p.pow(*e));
            assert_eq!(&product, fm.value());
            assert!(factors.iter().all(|(p, _)| is_probable_prime(p)));
            assert_eq!(psi(&FactoredModulus::new(factors).unwrap()), psi_n);
            assert!(report.successes <= report.trials);
            for g in &report.factors_found {
                assert!((fm.value() % g).is_zero());
            }
        }
    }

    #[test]
    fn closed_form_probability() {
        assert!((impossible_op_probability(&[n(5), n(7)]) - 11.0 / 35.0).abs() < 1e-12);
        assert!((impossible_op_probability(&[n(101)]) - 1.0 / 101.0).abs() < 1e-15);
        let mut rng = seeded_rng(5);
        let big = [gen_prime(512, &mut rng).unwrap(), gen_prime(512, &mut rng).unwrap()];
        let pr = impossible_op_probability(&big);
        assert!(pr > 0.0 && pr < 2f64.powi(-500));
    }

    #[test]
    fn exact_fraction_counts_alpha() {
        let fm = FactoredModulus::new(vec![(n(5), 1), (n(7), 1)]).unwrap();
        assert!((noninvertible_fraction_exact(&fm) - 11.0 / 36.0).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_edge_cases() {
        let mut rng = seeded_rng(6);
        let prime = FactoredModulus::new(vec![(n(101), 1)]).unwrap();
        let rate = monte_carlo_impossible_rate(&prime, 100_000, &mut rng).unwrap();
        let p = 1.0 / 101.0;
        assert!((rate - p).abs() <= 3.0 * (p * (1.0 - p) / 1e5).sqrt());

        let big = FactoredModulus::new(vec![
            (gen_prime(64, &mut rng).unwrap(), 1),
            (gen_prime(64, &mut rng).unwrap(), 1),
        ])
        .unwrap();
        assert_eq!(monte_carlo_impossible_rate(&big, 100_000, &mut rng).unwrap(), 0.0);
        assert!(monte_carlo_impossible_rate(&prime, 10, &mut rng).is_err());
    }
}
