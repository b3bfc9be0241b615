//! The shortcut Collatz map over arbitrary-precision integers, residue
//! arithmetic, exact floor-log computations and affine parity traces.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// One element of a Collatz sequence. Always >= 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term(BigUint);

impl Term {
    pub fn new(value: BigUint) -> Result<Self> {
        if value.is_zero() {
            return Err(Error::UndefinedInput {
                value,
                reason: "terms must be positive",
            });
        }
        Ok(Term(value))
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn into_value(self) -> BigUint {
        self.0
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    pub fn is_even(&self) -> bool {
        self.0.is_even()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    /// Residue of this term modulo `m`.
    pub fn residue(&self, m: u64) -> u64 {
        debug_assert!(m > 0);
        (&self.0 % m).to_u64().expect("residue below u64 modulus")
    }

    /// Parse from a decimal string; scientific notation is rejected.
    pub fn parse(s: &str) -> Result<Self> {
        let digits = s.trim();
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::UndefinedInput {
                value: BigUint::zero(),
                reason: "terms are decimal digit strings",
            });
        }
        let value = BigUint::parse_bytes(digits.as_bytes(), 10).expect("digits checked");
        Term::new(value)
    }
}

impl From<u64> for Term {
    fn from(v: u64) -> Self {
        assert!(v >= 1, "terms must be positive");
        Term(BigUint::from(v))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Term::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// A residue class `[residue] mod modulus` with `0 <= residue < modulus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ResidueClass {
    residue: u64,
    modulus: u64,
}

impl ResidueClass {
    pub fn new(residue: u64, modulus: u64) -> Result<Self> {
        if modulus == 0 || residue >= modulus {
            return Err(Error::UndefinedInput {
                value: BigUint::from(residue),
                reason: "residue must satisfy 0 <= residue < modulus",
            });
        }
        Ok(ResidueClass { residue, modulus })
    }

    pub fn residue(&self) -> u64 {
        self.residue
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn contains(&self, t: &Term) -> bool {
        t.residue(self.modulus) == self.residue
    }

    /// The k-th smallest positive member of the class.
    pub fn representative(&self, k: u64) -> Term {
        let v = BigUint::from(self.residue) + BigUint::from(self.modulus) * BigUint::from(k);
        if v.is_zero() {
            // [0]_m: the smallest positive member is m.
            Term(BigUint::from(self.modulus))
        } else {
            Term(v)
        }
    }
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.residue, self.modulus)
    }
}

/// Which branch of the map fired at one iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

/// Ordered record of the branches taken by the first `k` iterations.
pub type ParityVector = Vec<Parity>;

/// One step of the map: `n/2` for even `n`, `(3n+1)/2` for odd `n`.
pub fn t_step(n: &Term) -> Term {
    if n.is_even() {
        Term(&n.0 >> 1)
    } else {
        Term((&n.0 * 3u32 + 1u32) >> 1)
    }
}

/// `t_step` on a `u64`, `None` on overflow. Hot-path helper for the sieves.
#[inline]
pub(crate) fn t_step_u64(n: u64) -> Option<u64> {
    if n & 1 == 0 {
        Some(n >> 1)
    } else {
        n.checked_mul(3)?.checked_add(1).map(|v| v >> 1)
    }
}

/// `T^k(s)`; `T^0(s) = s`.
pub fn iterate(s: &Term, k: u64) -> Term {
    let mut v = s.clone();
    for _ in 0..k {
        v = t_step(&v);
    }
    v
}

/// A finite trajectory prefix plus how it ended.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trajectory {
    pub terms: Vec<Term>,
    /// False when the step cap ran out before the stop predicate fired.
    pub stopped: bool,
}

/// Terms `s, T(s), ...` up to and including the first term satisfying `stop`,
/// or exactly `cap` terms when the predicate never fires (`stopped == false`).
pub fn trajectory(
    s: &Term,
    mut stop: impl FnMut(usize, &Term) -> bool,
    cap: u64,
) -> Result<Trajectory> {
    if cap == 0 {
        return Err(Error::CapExhausted { cap });
    }
    let mut terms = Vec::new();
    let mut v = s.clone();
    loop {
        let idx = terms.len();
        let fired = stop(idx, &v);
        terms.push(v.clone());
        if fired {
            return Ok(Trajectory { terms, stopped: true });
        }
        if terms.len() as u64 == cap {
            return Ok(Trajectory { terms, stopped: false });
        }
        v = t_step(&v);
    }
}

/// Largest `k` with `2^k <= 3^n`, i.e. `floor(n * log2(3))`, by exact
/// power comparison.
pub fn floor_log2_pow3(n: u64) -> u64 {
    // 3^n has exactly floor(n log2 3) + 1 bits.
    let p = BigUint::from(3u32).pow(n.try_into().expect("exponent fits u32"));
    p.bits() - 1
}

/// `floor(n * log2(3))` for n = 0..=n_max, computed incrementally.
pub fn floor_log2_pow3_upto(n_max: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(n_max as usize + 1);
    let mut p = BigUint::one();
    out.push(0);
    for _ in 1..=n_max {
        p *= 3u32;
        out.push(p.bits() - 1);
    }
    out
}

/// `floor((limit + 5) / 6)`: the closed-form count of integers in `[1, limit]`
/// congruent to 3 or 7 (mod 12).
///
/// The formula overcounts by one exactly when `limit = 1, 2 (mod 12)`; see
/// [`count_37_direct`] for the loop oracle.
pub fn count_37(limit: &Term) -> BigUint {
    (&limit.0 + 5u32) / 6u32
}

/// Direct loop count of integers in `[1, limit]` congruent to 3 or 7 (mod 12).
pub fn count_37_direct(limit: u64) -> u64 {
    (1..=limit).filter(|m| m % 12 == 3 || m % 12 == 7).count() as u64
}

/// Affine form of `k` iterations: for every `s` whose first `k` steps follow
/// `parity`, `T^k(s) = (3^j * s + c) / 2^k` exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineTrace {
    steps: u32,
    odd_steps: u32,
    offset: BigUint,
    parity: ParityVector,
}

impl AffineTrace {
    /// The identity trace (k = 0).
    pub fn identity() -> Self {
        AffineTrace {
            steps: 0,
            odd_steps: 0,
            offset: BigUint::zero(),
            parity: Vec::new(),
        }
    }

    pub fn steps(&self) -> u32 {
        self.steps
    }

    pub fn odd_steps(&self) -> u32 {
        self.odd_steps
    }

    pub fn offset(&self) -> &BigUint {
        &self.offset
    }

    pub fn parity(&self) -> &[Parity] {
        &self.parity
    }

    /// Trace extended by one iteration of the given parity.
    pub fn advance(&self, step: Parity) -> AffineTrace {
        let mut parity = self.parity.clone();
        parity.push(step);
        match step {
            Parity::Even => AffineTrace {
                steps: self.steps + 1,
                odd_steps: self.odd_steps,
                offset: self.offset.clone(),
                parity,
            },
            Parity::Odd => AffineTrace {
                steps: self.steps + 1,
                odd_steps: self.odd_steps + 1,
                offset: &self.offset * 3u32 + (BigUint::one() << self.steps),
                parity,
            },
        }
    }

    /// The trace of the actual first `k` steps of `s`.
    pub fn of_trajectory(s: &Term, k: u32) -> AffineTrace {
        let mut tr = AffineTrace::identity();
        let mut v = s.clone();
        for _ in 0..k {
            let p = if v.is_even() { Parity::Even } else { Parity::Odd };
            tr = tr.advance(p);
            v = t_step(&v);
        }
        tr
    }

    /// `(3^j * s + c) / 2^k`, or `None` when `s` does not follow this trace's
    /// parity vector (the division is then inexact).
    pub fn apply(&self, s: &Term) -> Option<Term> {
        let numerator = BigUint::from(3u32).pow(self.odd_steps) * &s.0 + &self.offset;
        let (q, r) = numerator.div_rem(&(BigUint::one() << self.steps));
        if r.is_zero() {
            Some(Term(q))
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(v: u64) -> Term {
        Term::from(v)
    }

    #[test]
    fn t_step_examples() {
        assert_eq!(t_step(&t(11)), t(17));
        assert_eq!(t_step(&t(2)), t(1));
        assert_eq!(t_step(&t(26)), t(13));
    }

    #[test]
    fn iterate_examples() {
        assert_eq!(iterate(&t(11), 0), t(11));
        assert_eq!(iterate(&t(11), 6), t(5));
        // Oracle: step-by-step replay of the full C(27) descent.
        let mut v = t(27);
        for _ in 0..70 {
            v = t_step(&v);
        }
        assert_eq!(v, t(1));
        assert_eq!(iterate(&t(27), 70), t(1));
    }

    #[test]
    fn trajectory_of_11_matches_known_prefix() {
        let tr = trajectory(&t(11), |_, v| v.is_one(), 1 << 20).unwrap();
        let expect: Vec<Term> = [11u64, 17, 26, 13, 20, 10, 5, 8, 4, 2, 1]
            .iter()
            .map(|&v| t(v))
            .collect();
        assert!(tr.stopped);
        assert_eq!(tr.terms, expect);
    }

    #[test]
    fn trajectory_stop_on_start() {
        let tr = trajectory(&t(1), |_, v| v.is_one(), 10).unwrap();
        assert!(tr.stopped);
        assert_eq!(tr.terms, vec![t(1)]);
    }

    #[test]
    fn trajectory_of_27_reaches_one_in_71_terms() {
        let tr = trajectory(&t(27), |_, v| v.is_one(), 1 << 20).unwrap();
        assert!(tr.stopped);
        assert_eq!(tr.terms.len(), 71);
        assert_eq!(tr.terms.last(), Some(&t(1)));
    }

    #[test]
    fn trajectory_cap_exhaustion_is_distinguishable() {
        let tr = trajectory(&t(27), |_, _| false, 5).unwrap();
        assert!(!tr.stopped);
        assert_eq!(tr.terms.len(), 5);
    }

    #[test]
    fn floor_log_examples() {
        assert_eq!(floor_log2_pow3(0), 0);
        assert_eq!(floor_log2_pow3(2), 3);
        // 2^19 <= 3^12 < 2^20
        assert_eq!(floor_log2_pow3(12), 19);
    }

    #[test]
    fn floor_log_matches_exhaustive_search() {
        // Independent oracle: increment k while 2^(k+1) <= 3^n.
        let table = floor_log2_pow3_upto(200);
        let mut p = BigUint::one();
        for n in 0..=200u64 {
            if n > 0 {
                p *= 3u32;
            }
            let mut k = 0u64;
            while (BigUint::one() << (k + 1)) <= p {
                k += 1;
            }
            assert_eq!(floor_log2_pow3(n), k, "n = {n}");
            assert_eq!(table[n as usize], k, "table n = {n}");
        }
    }

    #[test]
    fn count_37_examples() {
        assert_eq!(count_37(&t(7)), BigUint::from(2u32));
        assert_eq!(count_37_direct(7), 2);
        // Formula floor((2048+5)/6) = 342 agrees with the direct count.
        assert_eq!(count_37(&t(1 << 11)), BigUint::from(342u32));
        assert_eq!(count_37_direct(1 << 11), 342);
        // Documented overcount at limit = 1.
        assert_eq!(count_37(&t(1)), BigUint::one());
        assert_eq!(count_37_direct(1), 0);
    }

    #[test]
    fn count_37_formula_valid_exactly_off_residues_1_2() {
        for limit in 1..=100_000u64 {
            let formula = count_37(&t(limit)).to_u64().unwrap();
            let direct = count_37_direct_fast(limit);
            if limit % 12 == 1 || limit % 12 == 2 {
                assert_eq!(formula, direct + 1, "limit = {limit}");
            } else {
                assert_eq!(formula, direct, "limit = {limit}");
            }
        }
    }

    // O(1) restatement of the loop count so the 10^5 sweep stays instant.
    fn count_37_direct_fast(limit: u64) -> u64 {
        let full = limit / 12;
        let rest = limit % 12;
        full * 2 + u64::from(rest >= 3) + u64::from(rest >= 7)
    }

    #[test]
    fn direct_fast_matches_loop_on_prefix() {
        for limit in 1..2_000 {
            assert_eq!(count_37_direct(limit), count_37_direct_fast(limit));
        }
    }

    #[test]
    fn affine_trace_examples() {
        let id = AffineTrace::identity();
        let odd = id.advance(Parity::Odd);
        assert_eq!((odd.steps(), odd.odd_steps()), (1, 1));
        assert_eq!(odd.offset(), &BigUint::one());

        let even = id.advance(Parity::Even);
        assert_eq!((even.steps(), even.odd_steps()), (1, 0));
        assert_eq!(even.offset(), &BigUint::zero());

        let odd_odd = odd.advance(Parity::Odd);
        assert_eq!((odd_odd.steps(), odd_odd.odd_steps()), (2, 2));
        assert_eq!(odd_odd.offset(), &BigUint::from(5u32));
        // T^2(s) = (9s + 5)/4; s = 3 gives 8, matching (3, 5, 8, ...).
        assert_eq!(odd_odd.apply(&t(3)), Some(t(8)));
    }

    #[test]
    fn affine_trace_rejects_wrong_parity() {
        let odd = AffineTrace::identity().advance(Parity::Odd);
        // s = 4 is even; (3*4 + 1)/2 is not an integer.
        assert_eq!(odd.apply(&t(4)), None);
    }

    #[test]
    fn residue_class_basics() {
        let c = ResidueClass::new(7, 12).unwrap();
        assert!(c.contains(&t(19)));
        assert!(!c.contains(&t(11)));
        assert_eq!(c.representative(0), t(7));
        assert_eq!(c.representative(2), t(31));
        assert_eq!(c.to_string(), "7 (mod 12)");
        assert!(ResidueClass::new(12, 12).is_err());
        let zero = ResidueClass::new(0, 2).unwrap();
        assert_eq!(zero.representative(0), t(2));
    }

    #[test]
    fn term_guards_zero() {
        assert!(Term::new(BigUint::zero()).is_err());
        assert!(Term::parse("0").is_err());
        assert!(Term::parse("12e3").is_err());
        assert_eq!(Term::parse("2602714556700227743").unwrap().to_u64(), Some(2602714556700227743));
    }
}
