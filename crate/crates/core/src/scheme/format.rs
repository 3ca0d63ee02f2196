//! Line-oriented text formats for keys and ciphertexts.
//!
//! ```text
//! pellrsa-pub v1        pellrsa-priv v1          pellrsa-ct v1
//! n=<hex>               mode=<strict|robust>     kind=<param|point>
//! e=<hex>               d=<hex>                  d_coef=<hex>
//!                       factor=<p-hex>^<e-dec>   c=<hex>  |  cx=<hex> cy=<hex>
//! ```
//!
//! Numbers are written as lowercase hex without prefix; one `factor` line
//! per prime.

use std::fmt;
use std::str::FromStr;

use super::{Ciphertext, DecryptionMode, PointCiphertext, PrivateKey, PublicKey};
use crate::arith::{FactoredModulus, Natural};
use crate::error::{Error, Result};

const PUB_HEADER: &str = "pellrsa-pub v1";
const PRIV_HEADER: &str = "pellrsa-priv v1";
const CT_HEADER: &str = "pellrsa-ct v1";

/// Either ciphertext form, as stored in a ciphertext file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CiphertextFile {
    Param(Ciphertext),
    Point(PointCiphertext),
}

pub(crate) fn parse_hex(s: &str) -> Result<Natural> {
    let digits = s.strip_prefix("0x").unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(Error::Format(format!("not a hex number: {s:?}")));
    }
    Natural::parse_bytes(digits.as_bytes(), 16).ok_or_else(|| Error::Format(format!("not a hex number: {s:?}")))
}

/// Splits a document into its header and `key=value` fields, in order.
fn fields<'a>(text: &'a str, header: &str) -> Result<Vec<(&'a str, &'a str)>> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    match lines.next() {
        Some(h) if h == header => {}
        Some(h) => return Err(Error::Format(format!("expected header {header:?}, found {h:?}"))),
        None => return Err(Error::Format("empty document".into())),
    }
    lines
        .map(|l| l.split_once('=').ok_or_else(|| Error::Format(format!("malformed line {l:?}"))))
        .collect()
}

fn take_unique<'a>(fields: &[(&str, &'a str)], key: &str) -> Result<&'a str> {
    let mut found = fields.iter().filter(|(k, _)| *k == key);
    let (_, v) = found.next().ok_or_else(|| Error::Format(format!("missing field {key:?}")))?;
    if found.next().is_some() {
        return Err(Error::Format(format!("duplicate field {key:?}")));
    }
    Ok(v)
}

fn reject_unknown(fields: &[(&str, &str)], allowed: &[&str]) -> Result<()> {
    match fields.iter().find(|(k, _)| !allowed.contains(k)) {
        Some((k, _)) => Err(Error::Format(format!("unknown field {k:?}"))),
        None => Ok(()),
    }
}

impl fmt::Display for PublicKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{PUB_HEADER}")?;
        writeln!(f, "n={:x}", self.n)?;
        writeln!(f, "e={:x}", self.e)
    }
}

impl FromStr for PublicKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let fields = fields(s, PUB_HEADER)?;
        reject_unknown(&fields, &["n", "e"])?;
        let n = parse_hex(take_unique(&fields, "n")?)?;
        let e = parse_hex(take_unique(&fields, "e")?)?;
        PublicKey::new(n, e).map_err(|e| Error::Format(format!("invalid public key: {e}")))
    }
}

impl fmt::Display for PrivateKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{PRIV_HEADER}")?;
        writeln!(f, "mode={}", self.mode.as_str())?;
        writeln!(f, "d={:x}", self.d)?;
        for (p, e) in self.factors.factors() {
            writeln!(f, "factor={p:x}^{e}")?;
        }
        Ok(())
    }
}

impl FromStr for PrivateKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let fields = fields(s, PRIV_HEADER)?;
        reject_unknown(&fields, &["mode", "d", "factor"])?;
        let mode: DecryptionMode = take_unique(&fields, "mode")?.parse()?;
        let d = parse_hex(take_unique(&fields, "d")?)?;
        let factors = fields
            .iter()
            .filter(|(k, _)| *k == "factor")
            .map(|(_, v)| {
                let (p, e) = v
                    .split_once('^')
                    .ok_or_else(|| Error::Format(format!("factor needs p^e: {v:?}")))?;
                let e: u32 = e
                    .parse()
                    .map_err(|_| Error::Format(format!("bad factor exponent {e:?}")))?;
                Ok((parse_hex(p)?, e))
            })
            .collect::<Result<Vec<_>>>()?;
        let fm = FactoredModulus::new(factors).map_err(|e| Error::Format(format!("invalid factors: {e}")))?;
        PrivateKey::new(fm, d, mode).map_err(|e| Error::Format(format!("invalid private key: {e}")))
    }
}

impl fmt::Display for CiphertextFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{CT_HEADER}")?;
        match self {
            CiphertextFile::Param(ct) => {
                writeln!(f, "kind=param")?;
                writeln!(f, "d_coef={:x}", ct.d_coef)?;
                writeln!(f, "c={:x}", ct.c)
            }
            CiphertextFile::Point(ct) => {
                writeln!(f, "kind=point")?;
                writeln!(f, "d_coef={:x}", ct.d_coef)?;
                writeln!(f, "cx={:x}", ct.cx)?;
                writeln!(f, "cy={:x}", ct.cy)
            }
        }
    }
}

impl FromStr for CiphertextFile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let fields = fields(s, CT_HEADER)?;
        let d_coef = || parse_hex(take_unique(&fields, "d_coef")?);
        match take_unique(&fields, "kind")? {
            "param" => {
                reject_unknown(&fields, &["kind", "d_coef", "c"])?;
                Ok(CiphertextFile::Param(Ciphertext {
                    c: parse_hex(take_unique(&fields, "c")?)?,
                    d_coef: d_coef()?,
                }))
            }
            "point" => {
                reject_unknown(&fields, &["kind", "d_coef", "cx", "cy"])?;
                Ok(CiphertextFile::Point(PointCiphertext {
                    cx: parse_hex(take_unique(&fields, "cx")?)?,
                    cy: parse_hex(take_unique(&fields, "cy")?)?,
                    d_coef: d_coef()?,
                }))
            }
            other => Err(Error::Format(format!("unknown ciphertext kind {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{keygen, keygen_from_primes};
    use crate::seeded_rng;
    use proptest::prelude::*;

    fn n(v: u64) -> Natural {
        Natural::from(v)
    }

    #[test]
    fn exact_text_of_toy_keys() {
        let (pk, sk) = keygen_from_primes(&[n(5), n(7)], &[1, 1], Some(&n(5)), DecryptionMode::Robust).unwrap();
        assert_eq!(pk.to_string(), "pellrsa-pub v1\nn=23\ne=5\n");
        assert_eq!(sk.to_string(), "pellrsa-priv v1\nmode=robust\nd=1d\nfactor=5^1\nfactor=7^1\n");
        let ct = CiphertextFile::Param(Ciphertext { c: n(34), d_coef: n(18) });
        assert_eq!(ct.to_string(), "pellrsa-ct v1\nkind=param\nd_coef=12\nc=22\n");
        let pct = CiphertextFile::Point(PointCiphertext { cx: n(255), cy: n(10), d_coef: n(18) });
        assert_eq!(pct.to_string(), "pellrsa-ct v1\nkind=point\nd_coef=12\ncx=ff\ncy=a\n");
    }

    #[test]
    fn keys_round_trip() {
        let mut rng = seeded_rng(1);
        let (pk, sk) = keygen(3, &[1, 3, 1], 40, None, DecryptionMode::StrictPaper, &mut rng).unwrap();
        assert_eq!(pk.to_string().parse::<PublicKey>().unwrap(), pk);
        assert_eq!(sk.to_string().parse::<PrivateKey>().unwrap(), sk);
    }

    #[test]
    fn malformed_documents() {
        for bad in [
            "",
            "pellrsa-pub v2\nn=23\ne=5\n",
            "pellrsa-pub v1\nn=23\n",
            "pellrsa-pub v1\nn=23\ne=5\ne=7\n",
            "pellrsa-pub v1\nn=2g\ne=5\n",
            "pellrsa-pub v1\nn=23\ne=5\nx=1\n",
            "pellrsa-pub v1\nn=23\ne=4\n",
        ] {
            assert!(bad.parse::<PublicKey>().is_err(), "{bad:?}");
        }
        for bad in [
            "pellrsa-priv v1\nmode=fast\nd=1d\nfactor=5^1\nfactor=7^1\n",
            "pellrsa-priv v1\nmode=robust\nd=1d\nfactor=5\nfactor=7^1\n",
            "pellrsa-priv v1\nmode=robust\nd=1d\nfactor=9^1\nfactor=7^1\n",
            "pellrsa-priv v1\nmode=robust\nd=6\nfactor=5^1\nfactor=7^1\n",
        ] {
            assert!(bad.parse::<PrivateKey>().is_err(), "{bad:?}");
        }
        for bad in [
            "pellrsa-ct v1\nkind=param\nd_coef=12\n",
            "pellrsa-ct v1\nkind=curve\nd_coef=12\nc=1\n",
            "pellrsa-ct v1\nkind=param\nd_coef=12\nc=1\ncx=2\n",
        ] {
            assert!(bad.parse::<CiphertextFile>().is_err(), "{bad:?}");
        }
    }

    proptest! {
        #[test]
        fn ciphertext_round_trip(c in any::<u128>(), cy in any::<u64>(), d in 1u64.., point in any::<bool>()) {
            let file = if point {
                CiphertextFile::Point(PointCiphertext { cx: Natural::from(c), cy: n(cy), d_coef: n(d) })
            } else {
                CiphertextFile::Param(Ciphertext { c: Natural::from(c), d_coef: n(d) })
            };
            prop_assert_eq!(file.to_string().parse::<CiphertextFile>().unwrap(), file);
        }
    }
}
