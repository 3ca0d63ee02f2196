//! The `pellrsa` command line: key generation, encryption, decryption, the
//! factoring demo and the decryption benchmark.
//!
//! Residues are read and written as hexadecimal. Exit codes: 0 success,
//! 1 bad flags or parameters, 2 unreadable or malformed files, 3 scheme
//! errors (the error name is printed on stderr).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use pellrsa_bench::{emit_report, run_benchmark, BenchConfig, BenchError, ReportFormat};
use pellrsa_core::cryptanalysis::full_factorization;
use pellrsa_core::scheme::{decrypt, decrypt_point, encrypt, encrypt_point, keygen, CiphertextFile};
use pellrsa_core::{entropy_rng, seeded_rng, DecryptionMode, Error, MessagePair, Natural, PrivateKey, PublicKey};

#[derive(Debug, Parser)]
#[command(name = "pellrsa", version, about = "RSA-like encryption on the Pell hyperbola")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a key pair and write PREFIX.pub and PREFIX.key
    Keygen(KeygenArgs),
    /// Encrypt a message pair (Mx, My)
    Encrypt(EncryptArgs),
    /// Decrypt a ciphertext file and print the message pair
    Decrypt(DecryptArgs),
    /// Factor N given the group order Psi(N)
    Factor(FactorArgs),
    /// Time decryption against CRT-RSA
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Strict,
    Robust,
}

impl From<ModeArg> for DecryptionMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Strict => DecryptionMode::StrictPaper,
            ModeArg::Robust => DecryptionMode::Robust,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Table,
    Csv,
}

#[derive(Debug, Args)]
struct KeygenArgs {
    /// Target modulus size in bits
    #[arg(long)]
    bits: u64,
    /// Number of distinct primes
    #[arg(long, default_value_t = 2)]
    primes: usize,
    /// Odd prime exponents, comma separated (default: all 1)
    #[arg(long, value_delimiter = ',')]
    exponents: Vec<u32>,
    #[arg(long, value_enum, default_value_t = ModeArg::Robust)]
    mode: ModeArg,
    /// Public exponent, decimal or 0x-prefixed hex
    #[arg(long)]
    pub_exp: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output path prefix
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EncryptArgs {
    /// Public key file
    #[arg(long = "pub")]
    pub_key: PathBuf,
    #[arg(long)]
    mx: String,
    #[arg(long)]
    my: String,
    /// Send the point itself instead of its parameter
    #[arg(long)]
    point: bool,
    /// Which encryption condition to enforce
    #[arg(long, value_enum, default_value_t = ModeArg::Robust)]
    mode: ModeArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DecryptArgs {
    /// Private key file
    #[arg(long)]
    key: PathBuf,
    /// Ciphertext file
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(Debug, Args)]
struct FactorArgs {
    /// Modulus, hex
    #[arg(long)]
    n: String,
    /// Psi(N) or a multiple of the group exponent, hex
    #[arg(long)]
    psi: String,
    /// Total budget of attack trials
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Modulus size in bits
    #[arg(long, default_value_t = 2048)]
    bits: u64,
    /// Prime counts to compare, comma separated
    #[arg(long, value_delimiter = ',', default_values_t = vec![2usize, 3, 4])]
    primes: Vec<usize>,
    /// Timed runs per scheme (at least 11 are made)
    #[arg(long, default_value_t = 11)]
    trials: usize,
    #[arg(long, value_enum, default_value_t = FormatArg::Table)]
    format: FormatArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also time the inversion-per-step evaluator this many times
    #[arg(long, default_value_t = 0)]
    param_form_runs: usize,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    File(String),
    Scheme(Error),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::File(_) => 2,
            CliError::Scheme(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Format(msg) => CliError::File(msg),
            Error::InvalidParameters(msg) => CliError::Usage(msg),
            other => CliError::Scheme(other),
        }
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Core(e) => e.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = match &e {
                CliError::Usage(msg) => writeln!(err, "error: {msg}"),
                CliError::File(msg) => writeln!(err, "error: {msg}"),
                CliError::Scheme(inner) => writeln!(err, "error: {}: {inner}", inner.name()),
            };
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Keygen(a) => cmd_keygen(a, out),
        Command::Encrypt(a) => cmd_encrypt(a, out),
        Command::Decrypt(a) => cmd_decrypt(a, out),
        Command::Factor(a) => cmd_factor(a, out),
        Command::Bench(a) => cmd_bench(a, out),
    }
}

fn hex_arg(flag: &str, s: &str) -> Result<Natural, CliError> {
    let digits = s.strip_prefix("0x").unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(CliError::Usage(format!("--{flag} expects a hex number, got {s:?}")));
    }
    Ok(Natural::parse_bytes(digits.as_bytes(), 16).expect("validated hex digits"))
}

fn number_arg(flag: &str, s: &str) -> Result<Natural, CliError> {
    let parsed = match s.strip_prefix("0x") {
        Some(hex) => Natural::parse_bytes(hex.as_bytes(), 16),
        None => Natural::parse_bytes(s.as_bytes(), 10),
    };
    parsed.ok_or_else(|| CliError::Usage(format!("--{flag} expects a number, got {s:?}")))
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::File(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::File(format!("cannot write {}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes()).map_err(|e| CliError::File(format!("cannot write output: {e}")))
}

fn with_extension(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn cmd_keygen(a: KeygenArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let exponents = if a.exponents.is_empty() { vec![1; a.primes] } else { a.exponents };
    if exponents.len() != a.primes {
        return Err(CliError::Usage(format!("--exponents needs {} values, got {}", a.primes, exponents.len())));
    }
    let weight: u64 = exponents.iter().map(|&e| e as u64).sum();
    let prime_bits = a.bits / weight.max(1);
    if prime_bits < 8 {
        return Err(CliError::Usage(format!("{} bits leave primes of {prime_bits} bits; need at least 8", a.bits)));
    }
    let e = a.pub_exp.as_deref().map(|s| number_arg("pub-exp", s)).transpose()?;
    let mut rng = match a.seed {
        Some(seed) => seeded_rng(seed),
        None => entropy_rng(),
    };
    let (pk, sk) = keygen(a.primes, &exponents, prime_bits, e.as_ref(), a.mode.into(), &mut rng)?;
    let pub_path = with_extension(&a.out, "pub");
    let key_path = with_extension(&a.out, "key");
    write_file(&pub_path, &pk.to_string())?;
    write_file(&key_path, &sk.to_string())?;
    emit(
        out,
        &format!(
            "wrote {} and {} ({}-bit modulus)\n",
            pub_path.display(),
            key_path.display(),
            pk.n().bits()
        ),
    )
}

fn cmd_encrypt(a: EncryptArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let msg = MessagePair::new(hex_arg("mx", &a.mx)?, hex_arg("my", &a.my)?);
    let pk: PublicKey = read_file(&a.pub_key)?.parse()?;
    let mode = a.mode.into();
    let file = if a.point {
        CiphertextFile::Point(encrypt_point(&pk, &msg, mode)?)
    } else {
        CiphertextFile::Param(encrypt(&pk, &msg, mode)?)
    };
    match a.out {
        Some(path) => write_file(&path, &file.to_string()),
        None => emit(out, &file.to_string()),
    }
}

fn cmd_decrypt(a: DecryptArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let sk: PrivateKey = read_file(&a.key)?.parse()?;
    let ct: CiphertextFile = read_file(&a.input)?.parse()?;
    let msg = match &ct {
        CiphertextFile::Param(ct) => decrypt(&sk, ct)?,
        CiphertextFile::Point(ct) => decrypt_point(&sk, ct)?,
    };
    emit(out, &format!("mx={:x} my={:x}\n", msg.mx, msg.my))
}

fn cmd_factor(a: FactorArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let n = hex_arg("n", &a.n)?;
    let psi = hex_arg("psi", &a.psi)?;
    if n < Natural::from(2u32) {
        return Err(CliError::Usage("--n must be at least 2".into()));
    }
    let mut rng = match a.seed {
        Some(seed) => seeded_rng(seed),
        None => entropy_rng(),
    };
    let factors = full_factorization(&n, &psi, &mut rng, a.trials)?;
    let text: Vec<String> = factors.iter().map(|(p, e)| format!("{p:x}^{e}")).collect();
    emit(out, &format!("{}\n", text.join(" ")))
}

fn cmd_bench(a: BenchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if a.primes.is_empty() {
        return Err(CliError::Usage("--primes needs at least one value".into()));
    }
    let results = a
        .primes
        .iter()
        .map(|&r| {
            let cfg = BenchConfig { param_form_runs: a.param_form_runs, ..BenchConfig::new(a.bits, r, a.trials, a.seed) };
            run_benchmark(&cfg)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let format = match a.format {
        FormatArg::Table => ReportFormat::Table,
        FormatArg::Csv => ReportFormat::Csv,
    };
    emit(out, &emit_report(&results, format))
}
