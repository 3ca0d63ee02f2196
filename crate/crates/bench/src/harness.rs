use std::time::Instant;

use pellrsa_core::scheme::{decrypt, decrypt_with, encrypt, keygen_sized};
use pellrsa_core::{seeded_rng, Ciphertext, DecryptionMode, Evaluator, MessagePair, Natural};

use crate::baseline::{rsa_baseline, RsaBaseline, MIN_RSA_BITS};
use crate::BenchError;

const WARMUP_RUNS: usize = 3;
const MIN_RUNS: usize = 11;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchConfig {
    pub modulus_bits: u64,
    /// Number of distinct primes in the Pell modulus.
    pub r: usize,
    /// Prime exponents, one per prime.
    pub exponents: Vec<u32>,
    /// Timed runs per scheme; raised to 11 if lower.
    pub trials: usize,
    pub seed: u64,
    /// Runs of the inversion-per-step parameter evaluator. It is much slower,
    /// so 0 skips it.
    pub param_form_runs: usize,
}

impl BenchConfig {
    pub fn new(modulus_bits: u64, r: usize, trials: usize, seed: u64) -> Self {
        BenchConfig { modulus_bits, r, exponents: vec![1; r], trials, seed, param_form_runs: 0 }
    }

    /// Bit size of every prime so that `∏ p_i^{a_i}` has `modulus_bits` bits.
    pub fn prime_sizes(&self) -> Result<Vec<u64>, BenchError> {
        if self.r < 2 || self.exponents.len() != self.r {
            return Err(BenchError::ConfigInfeasible(format!(
                "need r >= 2 and one exponent per prime (r={}, {} exponents)",
                self.r,
                self.exponents.len()
            )));
        }
        if self.modulus_bits < MIN_RSA_BITS {
            return Err(BenchError::ConfigInfeasible(format!("modulus must have at least {MIN_RSA_BITS} bits")));
        }
        let weight: u64 = self.exponents.iter().map(|&a| a as u64).sum();
        let unit = self.modulus_bits / weight;
        if unit < 16 {
            return Err(BenchError::ConfigInfeasible(format!(
                "{} bits split {weight} ways leaves primes too small to stay distinct",
                self.modulus_bits
            )));
        }
        // hand the leftover bits to the first primes with exponent 1
        let mut sizes = vec![unit; self.r];
        let mut left = self.modulus_bits - unit * weight;
        for (size, &a) in sizes.iter_mut().zip(&self.exponents) {
            if a == 1 && left > 0 {
                *size += 1;
                left -= 1;
            }
        }
        Ok(sizes)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchResult {
    pub modulus_bits: u64,
    pub r: usize,
    /// Median Pell decryption time (Lucas ladder per prime power).
    pub pell_decrypt_ns: u64,
    /// Median CRT-RSA time for the same number of plaintext bits.
    pub rsa_decrypt_ns: u64,
    pub measured_speedup: f64,
    /// `r^2 / 2`
    pub predicted_speedup: f64,
    /// Median Pell decryption time with the matrix evaluator.
    pub pell_matrix_ns: u64,
    /// Median with one inversion per `⊙` step, if requested.
    pub pell_param_ns: Option<u64>,
    /// Bit length of the private exponent after reduction, per prime.
    pub reduced_exponent_bits: Vec<u64>,
    pub plaintext_bits: u64,
}

pub fn predicted_speedup(r: usize) -> f64 {
    (r * r) as f64 / 2.0
}

fn median(mut samples: Vec<u64>) -> u64 {
    samples.sort_unstable();
    samples[samples.len() / 2]
}

/// Times `op` on inputs `0..runs` after a few discarded warmup calls.
fn time_runs(runs: usize, mut op: impl FnMut(usize)) -> u64 {
    for i in 0..WARMUP_RUNS {
        op(i);
    }
    let samples = (0..runs)
        .map(|i| {
            let start = Instant::now();
            op(i);
            (start.elapsed().as_nanos() as u64).max(1)
        })
        .collect();
    median(samples)
}

pub fn run_benchmark(cfg: &BenchConfig) -> Result<BenchResult, BenchError> {
    let sizes = cfg.prime_sizes()?;
    let mut rng = seeded_rng(cfg.seed);
    let mode = DecryptionMode::Robust;
    let (pk, sk) = keygen_sized(&sizes, &cfg.exponents, None, mode, &mut rng).map_err(|e| match e {
        pellrsa_core::Error::RandomnessExhausted => {
            BenchError::ConfigInfeasible("could not draw distinct primes".into())
        }
        other => BenchError::Core(other),
    })?;
    let rsa = rsa_baseline(cfg.modulus_bits, &mut rng)?;

    let runs = cfg.trials.max(MIN_RUNS);
    let messages: Vec<MessagePair> = (0..runs).map(|_| MessagePair::random(&pk, mode, &mut rng)).collect();
    let pell_cts: Vec<Ciphertext> = messages
        .iter()
        .map(|m| encrypt(&pk, m, mode))
        .collect::<Result<_, _>>()?;
    // RSA decrypts the same plaintext bits, split into two blocks
    let rsa_plain: Vec<[Natural; 2]> = messages.iter().map(|m| [&m.mx % &rsa.n, &m.my % &rsa.n]).collect();
    let rsa_cts: Vec<[Natural; 2]> = rsa_plain.iter().map(|b| [rsa.encrypt(&b[0]), rsa.encrypt(&b[1])]).collect();

    for (i, ct) in pell_cts.iter().enumerate() {
        if decrypt(&sk, ct)? != messages[i] {
            return Err(BenchError::Mismatch("Pell decryption"));
        }
        if decrypt_rsa(&rsa, &rsa_cts[i]) != rsa_plain[i] {
            return Err(BenchError::Mismatch("RSA decryption"));
        }
    }

    let pell_decrypt_ns = time_runs(runs, |i| {
        std::hint::black_box(decrypt(&sk, &pell_cts[i % runs]).ok());
    });
    let rsa_decrypt_ns = time_runs(runs, |i| {
        std::hint::black_box(decrypt_rsa(&rsa, &rsa_cts[i % runs]));
    });
    let pell_matrix_ns = time_runs(runs, |i| {
        std::hint::black_box(decrypt_with(&sk, &pell_cts[i % runs], Evaluator::Matrix).ok());
    });
    let pell_param_ns = (cfg.param_form_runs > 0).then(|| {
        let n = cfg.param_form_runs;
        time_runs(n, |i| {
            std::hint::black_box(decrypt_with(&sk, &pell_cts[i % runs], Evaluator::SquareMultiply).ok());
        })
    });

    let reduced_exponent_bits = sk.reduced_exponents(&pell_cts[0].d_coef)?.iter().map(|d| d.bits()).collect();
    Ok(BenchResult {
        modulus_bits: cfg.modulus_bits,
        r: cfg.r,
        pell_decrypt_ns,
        rsa_decrypt_ns,
        measured_speedup: rsa_decrypt_ns as f64 / pell_decrypt_ns as f64,
        predicted_speedup: predicted_speedup(cfg.r),
        pell_matrix_ns,
        pell_param_ns,
        reduced_exponent_bits,
        plaintext_bits: messages[0].mx.bits() + messages[0].my.bits(),
    })
}

fn decrypt_rsa(rsa: &RsaBaseline, blocks: &[Natural; 2]) -> [Natural; 2] {
    rsa.decrypt_message(blocks, &mut 0)
}

/// Runs each configuration `repetitions` times and keeps the run with the
/// median measured speedup.
pub fn run_median_of(cfg: &BenchConfig, repetitions: usize) -> Result<BenchResult, BenchError> {
    let mut results = (0..repetitions.max(1) as u64)
        .map(|i| run_benchmark(&BenchConfig { seed: cfg.seed.wrapping_add(i), ..cfg.clone() }))
        .collect::<Result<Vec<_>, _>>()?;
    results.sort_by(|a, b| a.measured_speedup.total_cmp(&b.measured_speedup));
    Ok(results.swap_remove(results.len() / 2))
}
