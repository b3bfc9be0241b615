//! Exact dyadic-rational evaluation of the limit quotients over the stopping
//! class counts, and the binary sequence beta driving their denominators.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use num_bigint::{BigInt, BigUint};
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::core::{floor_log2_pow3, floor_log2_pow3_upto};
use crate::{Error, Result};

mod serde_biguint {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        BigUint::parse_bytes(s.as_bytes(), 10)
            .ok_or_else(|| serde::de::Error::custom("expected a decimal integer string"))
    }
}

/// `numerator / 2^exponent` in minimal-exponent form: whenever the exponent is
/// positive the numerator is odd (and zero is `0 / 2^0`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicRational {
    #[serde(with = "serde_biguint")]
    numerator: BigUint,
    exponent: u64,
}

impl DyadicRational {
    pub fn new(numerator: BigUint, exponent: u64) -> Self {
        let mut d = DyadicRational { numerator, exponent };
        d.canonicalize();
        d
    }

    pub fn zero() -> Self {
        DyadicRational { numerator: BigUint::zero(), exponent: 0 }
    }

    /// `2^e`, with `e` possibly negative.
    pub fn pow2(e: i64) -> Self {
        Self::integer_times_pow2(BigUint::one(), e)
    }

    /// `k * 2^e` for a non-negative integer `k`.
    pub fn integer_times_pow2(k: BigUint, e: i64) -> Self {
        if e >= 0 {
            DyadicRational::new(k << e as u64, 0)
        } else {
            DyadicRational::new(k, (-e) as u64)
        }
    }

    pub fn numerator(&self) -> &BigUint {
        &self.numerator
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    fn canonicalize(&mut self) {
        if self.numerator.is_zero() {
            self.exponent = 0;
            return;
        }
        let strip = self.numerator.trailing_zeros().unwrap_or(0).min(self.exponent);
        if strip > 0 {
            self.numerator >>= strip;
            self.exponent -= strip;
        }
    }

    pub fn add(&self, other: &DyadicRational) -> DyadicRational {
        let e = self.exponent.max(other.exponent);
        let a = &self.numerator << (e - self.exponent);
        let b = &other.numerator << (e - other.exponent);
        DyadicRational::new(a + b, e)
    }

    pub fn to_ratio(&self) -> Ratio<BigInt> {
        Ratio::new(
            BigInt::from(self.numerator.clone()),
            BigInt::from(BigUint::one() << self.exponent),
        )
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exponent.max(other.exponent);
        let a = &self.numerator << (e - self.exponent);
        let b = &other.numerator << (e - other.exponent);
        a.cmp(&b)
    }
}

impl fmt::Display for DyadicRational {
    /// Exact terminating decimal: `numerator * 5^e` with the point `e` places
    /// from the right.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            return write!(f, "{}", self.numerator);
        }
        let scaled = (&self.numerator * BigUint::from(5u32).pow(self.exponent as u32)).to_string();
        let e = self.exponent as usize;
        let padded = if scaled.len() <= e {
            format!("{}{}", "0".repeat(e + 1 - scaled.len()), scaled)
        } else {
            scaled
        };
        let (int, frac) = padded.split_at(padded.len() - e);
        write!(f, "{}.{}", int, frac.trim_end_matches('0'))
    }
}

/// An exact non-negative fraction in lowest terms, kept separate from the
/// dyadic type because the quotients have odd denominators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactRatio {
    #[serde(with = "serde_biguint")]
    pub numerator: BigUint,
    #[serde(with = "serde_biguint")]
    pub denominator: BigUint,
}

impl ExactRatio {
    fn from_ratio(r: &Ratio<BigInt>) -> Self {
        ExactRatio {
            numerator: r.numer().magnitude().clone(),
            denominator: r.denom().magnitude().clone(),
        }
    }

    pub fn to_ratio(&self) -> Ratio<BigInt> {
        Ratio::new(
            BigInt::from(self.numerator.clone()),
            BigInt::from(self.denominator.clone()),
        )
    }
}

/// Decimal rendering of `num / den` with `sig` significant digits (truncated).
pub fn decimal_string(num: &BigUint, den: &BigUint, sig: usize) -> String {
    assert!(!den.is_zero(), "denominator must be positive");
    let (q, mut r) = num_integer::Integer::div_rem(num, den);
    let int_part = q.to_string();
    let mut out = int_part.clone();
    let mut significant = if q.is_zero() { 0 } else { int_part.len() };
    if r.is_zero() {
        return out;
    }
    out.push('.');
    let ten = BigUint::from(10u32);
    // Emit fractional digits until the significance budget is spent.
    let mut emitted = 0;
    while !r.is_zero() && significant < sig && emitted < sig + 40 {
        r *= &ten;
        let (d, rest) = num_integer::Integer::div_rem(&r, den);
        let digit = d.to_string();
        debug_assert_eq!(digit.len(), 1);
        if significant > 0 || digit != "0" {
            significant += 1;
        }
        out.push_str(&digit);
        r = rest;
        emitted += 1;
    }
    out
}

/// `beta(n) = floor(n log2 3) - floor((n-1) log2 3) - 1`, the binary sequence
/// in the denominator exponents. Defined for n >= 2.
pub fn beta(n: u64) -> Result<u8> {
    if n < 2 {
        return Err(Error::UndefinedInput {
            value: n.into(),
            reason: "beta is defined for n >= 2",
        });
    }
    Ok((floor_log2_pow3(n) - floor_log2_pow3(n - 1) - 1) as u8)
}

/// One denominator contribution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitTerm {
    pub n: u64,
    pub contribution: DyadicRational,
}

/// Exact evaluation of one quotient `2^(G-1) / sum`: the summed denominator,
/// its per-n contributions, the reduced quotient and a display decimal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitReport {
    pub g: u64,
    pub terms: Vec<LimitTerm>,
    pub denominator: DyadicRational,
    pub quotient: ExactRatio,
    pub decimal: String,
}

impl LimitReport {
    fn assemble(g: u64, terms: Vec<LimitTerm>) -> Self {
        let denominator = terms
            .iter()
            .fold(DyadicRational::zero(), |acc, t| acc.add(&t.contribution));
        // 2^(G-1) / (num / 2^e) = 2^(G-1+e) / num
        let quotient = Ratio::new(
            BigInt::from(BigUint::one() << (g - 1 + denominator.exponent())),
            BigInt::from(denominator.numerator().clone()),
        );
        let quotient = ExactRatio::from_ratio(&quotient);
        let decimal = decimal_string(&quotient.numerator, &quotient.denominator, 15);
        LimitReport { g, terms, denominator, quotient, decimal }
    }

    /// Recomputes the denominator and quotient from `terms`; the report must
    /// reproduce itself.
    pub fn verify(&self) -> bool {
        let rebuilt = LimitReport::assemble(self.g, self.terms.clone());
        rebuilt == *self
    }

    pub fn quotient_ratio(&self) -> Ratio<BigInt> {
        self.quotient.to_ratio()
    }
}

/// `2^(G-1) / sum_{n=2}^{G} 2^(G-n-beta_n)`, exactly.
pub fn theorem5_quotient(g: u64) -> Result<LimitReport> {
    if g < 2 {
        return Err(Error::UndefinedInput {
            value: g.into(),
            reason: "the quotient needs G >= 2",
        });
    }
    let logs = floor_log2_pow3_upto(g);
    let terms: Vec<LimitTerm> = (2..=g)
        .map(|n| {
            let beta_n = (logs[n as usize] - logs[n as usize - 1] - 1) as i64;
            let exp = g as i64 - n as i64 - beta_n;
            LimitTerm { n, contribution: DyadicRational::pow2(exp) }
        })
        .collect();
    Ok(LimitReport::assemble(g, terms))
}

/// `2^(G-1) / sum_{n=2}^{G} 2^(G - floor(n log2 3)) * z(n)`, exactly, from the
/// supplied `z` values.
pub fn theorem6_quotient(g: u64, z_values: &BTreeMap<u64, u64>) -> Result<LimitReport> {
    if g < 2 {
        return Err(Error::UndefinedInput {
            value: g.into(),
            reason: "the quotient needs G >= 2",
        });
    }
    let logs = floor_log2_pow3_upto(g);
    let mut terms = Vec::new();
    for n in 2..=g {
        let z = *z_values.get(&n).ok_or(Error::MissingZ { n: n as u32 })?;
        let exp = g as i64 - logs[n as usize] as i64;
        terms.push(LimitTerm {
            n,
            contribution: DyadicRational::integer_times_pow2(BigUint::from(z), exp),
        });
    }
    Ok(LimitReport::assemble(g, terms))
}

/// Loads a z-value table: lines `n <tab> z(n)`, `#` comments allowed, and a
/// mandatory provenance header line `# source: <provenance>`.
pub fn load_z_file(path: &Path) -> Result<BTreeMap<u64, u64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::ZFileFormat {
        reason: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_z_values(&text)
}

pub fn parse_z_values(text: &str) -> Result<BTreeMap<u64, u64>> {
    let mut has_source = false;
    let mut out = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.starts_with('#') {
            if let Some(src) = line.strip_prefix("# source:") {
                if !src.trim().is_empty() {
                    has_source = true;
                }
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let parsed = (|| {
            let n = fields.next()?.parse::<u64>().ok()?;
            let z = fields.next()?.parse::<u64>().ok()?;
            fields.next().is_none().then_some((n, z))
        })();
        match parsed {
            Some((n, z)) => {
                out.insert(n, z);
            }
            None => {
                return Err(Error::ZFileFormat {
                    reason: format!("line {}: expected `n <tab> z(n)`", lineno + 1),
                })
            }
        }
    }
    if !has_source {
        return Err(Error::ZFileFormat {
            reason: "missing mandatory `# source: <provenance>` header".into(),
        });
    }
    Ok(out)
}
