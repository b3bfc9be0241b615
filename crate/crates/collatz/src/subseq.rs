//! Extraction, classification and validation of the finite subsequences that
//! partition every trajectory: T-kind blocks starting in `[3]_12` or `[7]_12`
//! and H-kind blocks starting in `[9]_12`.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::core::{t_step, t_step_u64, Term};
use crate::{Error, Result};

/// Step cap for a single subsequence extraction.
const EXTRACT_CAP: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kind {
    /// Starts in `[3]_12` or `[7]_12`; ends at the first term `= 6 (mod 8)`.
    T,
    /// Starts in `[9]_12`; ends at the first term `= 3 (mod 4)`.
    H,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    /// Ended structurally (`[6]_8` for T-kind, `[3]_4` for H-kind).
    A,
    /// Ended by reaching the term 1.
    B,
}

/// One finite subsequence block together with its extrema positions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subsequence {
    kind: Kind,
    variant: Variant,
    terms: Vec<Term>,
    max_odd: Option<usize>,
    max_even: Option<usize>,
}

impl Subsequence {
    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// The length index t or h, i.e. `len(terms) - 1`.
    pub fn length_index(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn start(&self) -> &Term {
        &self.terms[0]
    }

    pub fn end_term(&self) -> &Term {
        self.terms.last().expect("subsequence is never empty")
    }

    /// The odd maximum (the first term `= 1 (mod 4)`).
    pub fn max_odd(&self) -> Option<&Term> {
        self.max_odd.map(|i| &self.terms[i])
    }

    /// The even maximum (the successor of the odd maximum, `= 2 (mod 6)`).
    pub fn max_even(&self) -> Option<&Term> {
        self.max_even.map(|i| &self.terms[i])
    }

    /// Comma-separated term list, e.g. `19, 29, 44, 22`.
    pub fn terms_line(&self) -> String {
        let parts: Vec<String> = self.terms.iter().map(|t| t.to_string()).collect();
        parts.join(", ")
    }

    /// Full structural validation against the residue skeleton: monotone
    /// rising prefix in `[3]_4`, odd/even maxima, separately strictly
    /// decreasing tails and the variant-specific end.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let terms = &self.terms;
        if terms.len() < 3 {
            return Err(format!("only {} terms", terms.len()));
        }
        let start = &terms[0];
        match self.kind {
            Kind::T => {
                if start.residue(12) != 3 && start.residue(12) != 7 {
                    return Err(format!("T-kind start {} not in [3]_12 or [7]_12", start));
                }
                let mo = self.max_odd.ok_or("missing odd maximum")?;
                let me = self.max_even.ok_or("missing even maximum")?;
                if me != mo + 1 {
                    return Err("even maximum must follow the odd maximum".into());
                }
                for i in 1..mo {
                    if terms[i].residue(4) != 3 {
                        return Err(format!("prefix term {} not in [3]_4", terms[i]));
                    }
                }
                for i in 0..mo {
                    if terms[i] >= terms[i + 1] {
                        return Err("rising prefix is not strictly increasing".into());
                    }
                }
                if mo >= 2 && terms[mo - 1].residue(8) != 3 {
                    return Err(format!("term before odd maximum {} not in [3]_8", terms[mo - 1]));
                }
                if terms[mo].residue(4) != 1 {
                    return Err(format!("odd maximum {} not in [1]_4", terms[mo]));
                }
                if terms[me].residue(6) != 2 {
                    return Err(format!("even maximum {} not in [2]_6", terms[me]));
                }
                self.check_tail(me)?;
            }
            Kind::H => {
                if start.residue(12) != 9 {
                    return Err(format!("H-kind start {} not in [9]_12", start));
                }
                if self.max_odd != Some(0) || self.max_even != Some(1) {
                    return Err("H-kind maxima must sit at the first two terms".into());
                }
                if terms[1].residue(6) != 2 {
                    return Err(format!("even maximum {} not in [2]_6", terms[1]));
                }
                self.check_tail(1)?;
            }
        }
        let end = self.end_term();
        match (self.kind, self.variant) {
            (Kind::T, Variant::A) => {
                if end.residue(8) != 6 {
                    return Err(format!("variant-A end {} not in [6]_8", end));
                }
            }
            (Kind::H, Variant::A) => {
                if end.residue(4) != 3 {
                    return Err(format!("variant-A end {} not in [3]_4", end));
                }
                let before = &terms[terms.len() - 2];
                if before.residue(8) != 6 {
                    return Err(format!("term before H end {} not in [6]_8", before));
                }
            }
            (_, Variant::B) => {
                if !end.is_one() {
                    return Err(format!("variant-B end {} is not 1", end));
                }
            }
        }
        Ok(())
    }

    // Tail from `from` (the even maximum) onward: interior terms in [1]_4 or
    // [0,2,4]_8, odd and even terms separately strictly decreasing. An H-kind
    // block keeps its `[6]_8` term as the penultimate position (the halving
    // into the closing `[3]_4` term), so that slot is exempt.
    fn check_tail(&self, from: usize) -> std::result::Result<(), String> {
        let terms = &self.terms;
        let interior_end = match self.kind {
            Kind::T => terms.len() - 1,
            Kind::H => terms.len().saturating_sub(2),
        };
        let mut last_odd: Option<&Term> = None;
        let mut last_even: Option<&Term> = None;
        for (i, term) in terms.iter().enumerate().skip(from) {
            if i < interior_end && i > from {
                let ok = if term.is_even() {
                    term.residue(8) != 6
                } else {
                    term.residue(4) == 1
                };
                if !ok {
                    return Err(format!("interior tail term {} breaks the skeleton", term));
                }
            }
            let slot = if term.is_even() { &mut last_even } else { &mut last_odd };
            if let Some(prev) = slot {
                if *prev <= term {
                    return Err(format!("tail not strictly decreasing at {}", term));
                }
            }
            *slot = Some(term);
        }
        Ok(())
    }
}

fn kind_of_start(s: &Term) -> Result<Kind> {
    match s.residue(12) {
        3 | 7 => Ok(Kind::T),
        9 => Ok(Kind::H),
        _ => Err(Error::DomainResidue {
            value: s.value().clone(),
            requirement: "subsequence starts lie in [3]_12, [7]_12 or [9]_12",
        }),
    }
}

/// Cuts the trajectory of `s` into its subsequence: at the first term
/// `= 6 (mod 8)` (T-kind) or `= 3 (mod 4)` (H-kind) for variant A, or at the
/// first 1 for variant B. Fills the extrema during the same pass.
pub fn extract_subsequence(s: &Term) -> Result<Subsequence> {
    let kind = kind_of_start(s)?;
    let mut terms = vec![s.clone()];
    let mut max_odd = match kind {
        Kind::T => None,
        Kind::H => Some(0),
    };
    let mut max_even = None;
    let mut v = s.clone();
    loop {
        if terms.len() as u64 > EXTRACT_CAP {
            return Err(Error::CapExhausted { cap: EXTRACT_CAP });
        }
        v = t_step(&v);
        terms.push(v.clone());
        let idx = terms.len() - 1;
        if max_odd.is_none() && v.residue(4) == 1 {
            max_odd = Some(idx);
        }
        if max_even.is_none() {
            if let Some(mo) = max_odd {
                if idx == mo + 1 {
                    max_even = Some(idx);
                }
            }
        }
        let variant = if v.is_one() {
            Some(Variant::B)
        } else {
            let cut = match kind {
                Kind::T => v.residue(8) == 6,
                Kind::H => v.residue(4) == 3,
            };
            cut.then_some(Variant::A)
        };
        if let Some(variant) = variant {
            let length_index = terms.len() - 1;
            if length_index < 2 {
                return Err(Error::DegenerateSubsequence {
                    start: s.value().clone(),
                    length_index,
                    terms: terms.into_iter().map(Term::into_value).collect(),
                });
            }
            return Ok(Subsequence { kind, variant, terms, max_odd, max_even });
        }
    }
}

/// Fast cut classification on `u64` values, used by the enumeration sieves.
/// `None` means overflow; the caller falls back to the big-integer path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum FastCut {
    /// Structural end at this index.
    A(usize),
    /// Reached 1 at this index.
    B(usize),
    /// No cut within the probed range.
    Beyond,
}

pub(crate) fn fast_cut(kind: Kind, s: u64, max_index: usize) -> Option<FastCut> {
    let mut v = s;
    for i in 1..=max_index {
        v = t_step_u64(v)?;
        if v == 1 {
            return Some(FastCut::B(i));
        }
        let cut = match kind {
            Kind::T => v & 7 == 6,
            Kind::H => v & 3 == 3,
        };
        if cut {
            return Some(FastCut::A(i));
        }
    }
    Some(FastCut::Beyond)
}

/// Walks `x = 3 (mod 4)` backwards through `(2x - 1)/3` while `x = 11 (mod 12)`
/// and returns the canonical T-kind start together with the number of reverse
/// steps. The canonical subsequence contains `x` at that offset.
pub fn canonical_start(x: &Term) -> Result<(Term, usize)> {
    if x.residue(4) != 3 {
        return Err(Error::DomainResidue {
            value: x.value().clone(),
            requirement: "canonical starts are computed for values in [3]_4",
        });
    }
    let mut current = x.clone();
    let mut offset = 0usize;
    while current.residue(12) == 11 {
        // (2x - 1) is divisible by 3 exactly on [11]_12; the result stays in [3]_4.
        let back = (current.value() * 2u32 - 1u32) / 3u32;
        current = Term::new(back).expect("reverse step stays positive");
        offset += 1;
    }
    Ok((current, offset))
}

/// How a decomposition ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Completion {
    /// The trajectory reached 1.
    Complete,
    /// The subsequence cap was hit first.
    Truncated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionEntry {
    pub subsequence: Subsequence,
    /// Index within the canonical subsequence at which the trajectory enters.
    /// Non-zero only when the trajectory hit a term `= 11 (mod 12)`.
    pub entry_offset: usize,
}

/// A full trajectory split into preamble and subsequence chain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub source: Term,
    /// Terms before the first term in `[9]_12` or `[3]_4` (possibly empty).
    pub preamble: Vec<Term>,
    pub entries: Vec<DecompositionEntry>,
    pub completion: Completion,
}

impl Decomposition {
    /// Rebuilds the raw trajectory of `source` from the decomposition.
    ///
    /// An H-kind block ends at the very term its successor block begins with,
    /// so that shared boundary term is emitted once.
    pub fn reconstruct(&self) -> Vec<Term> {
        let mut out = self.preamble.clone();
        let mut prev_kind: Option<Kind> = None;
        for entry in &self.entries {
            let mut suffix = entry.subsequence.terms()[entry.entry_offset..].iter();
            if prev_kind == Some(Kind::H) {
                suffix.next();
            }
            out.extend(suffix.cloned());
            prev_kind = Some(entry.subsequence.kind());
        }
        out
    }
}

/// Splits the trajectory of `s` into preamble, an optional H-kind block and
/// the canonical T-kind chain, stopping at 1 or after `max_subsequences`
/// blocks (`Completion::Truncated`).
pub fn decompose(s: &Term, max_subsequences: usize) -> Result<Decomposition> {
    let mut preamble = Vec::new();
    let mut v = s.clone();
    let mut steps = 0u64;
    loop {
        let r12 = v.residue(12);
        if r12 == 9 || v.residue(4) == 3 {
            break;
        }
        preamble.push(v.clone());
        if v.is_one() {
            return Ok(Decomposition {
                source: s.clone(),
                preamble,
                entries: Vec::new(),
                completion: Completion::Complete,
            });
        }
        v = t_step(&v);
        steps += 1;
        if steps > EXTRACT_CAP {
            return Err(Error::CapExhausted { cap: EXTRACT_CAP });
        }
    }

    let mut entries = Vec::new();

    if v.residue(12) == 9 {
        let sub = extract_subsequence(&v)?;
        let is_b = sub.variant() == Variant::B;
        let end = sub.end_term().clone();
        entries.push(DecompositionEntry { subsequence: sub, entry_offset: 0 });
        if is_b {
            return Ok(Decomposition {
                source: s.clone(),
                preamble,
                entries,
                completion: Completion::Complete,
            });
        }
        // An H-kind block ends at the [3]_4 term the T-chain starts from.
        v = end;
        debug_assert_eq!(v.residue(4), 3, "H-kind variant A must end in [3]_4");
    }

    loop {
        if entries.len() >= max_subsequences {
            return Ok(Decomposition {
                source: s.clone(),
                preamble,
                entries,
                completion: Completion::Truncated,
            });
        }
        let (start, entry_offset) = canonical_start(&v)?;
        let sub = extract_subsequence(&start)?;
        debug_assert!(sub.terms().get(entry_offset) == Some(&v));
        let is_b = sub.variant() == Variant::B;
        let end = sub.end_term().clone();
        entries.push(DecompositionEntry { subsequence: sub, entry_offset });
        if is_b {
            return Ok(Decomposition {
                source: s.clone(),
                preamble,
                entries,
                completion: Completion::Complete,
            });
        }
        v = t_step(&end);
        debug_assert_eq!(v.residue(4), 3, "halved variant-A end must lie in [3]_4");
    }
}

/// True iff the block's start has subsequence-count stopping time 1: the first
/// drop below the start happens inside the block or at the single halving step
/// after a variant-A end.
pub fn is_stopping_sequence(e: &Subsequence) -> Result<bool> {
    if e.kind() != Kind::T {
        return Err(Error::DomainResidue {
            value: e.start().value().clone(),
            requirement: "stopping-sequence classification applies to T-kind blocks",
        });
    }
    let start = e.start();
    if e.terms().iter().skip(1).any(|t| t < start) {
        return Ok(true);
    }
    if e.variant() == Variant::A {
        return Ok(&t_step(e.end_term()) < start);
    }
    Ok(false)
}

/// The term lemmata as directly-checkable predicates.
///
/// Each predicate validates its residue-class domain, then recomputes the
/// asserted consequence (forward iteration for 1-6, set membership for 7,
/// reverse-map construction for 8-10).
pub mod lemmas {
    use super::*;

    fn step(n: u128) -> u128 {
        if n % 2 == 0 {
            n / 2
        } else {
            (3 * n + 1) / 2
        }
    }

    fn domain_err(n: u64, requirement: &'static str) -> Error {
        Error::DomainResidue { value: BigUint::from(n), requirement }
    }

    /// Even terms halve: `T(n) < n`.
    pub fn lemma1(n: u64) -> Result<bool> {
        if n % 2 != 0 || n == 0 {
            return Err(domain_err(n, "lemma 1 needs n = 0 (mod 2), n >= 2"));
        }
        Ok(step(n as u128) < n as u128)
    }

    /// `n = 1 (mod 4)`: `T^2(n) < n` and `T^2(n) = 1 (mod 3)`.
    pub fn lemma2(n: u64) -> Result<bool> {
        if n % 4 != 1 || n < 5 {
            return Err(domain_err(n, "lemma 2 needs n = 1 (mod 4), n >= 5"));
        }
        let t2 = step(step(n as u128));
        Ok(t2 < n as u128 && t2 % 3 == 1)
    }

    /// `n = 6 (mod 8)`: `T(n) < n` and `T(n) = 3 (mod 4)`.
    pub fn lemma3(n: u64) -> Result<bool> {
        if n % 8 != 6 {
            return Err(domain_err(n, "lemma 3 needs n = 6 (mod 8)"));
        }
        let t1 = step(n as u128);
        Ok(t1 < n as u128 && t1 % 4 == 3)
    }

    /// Powers of two reach 1 after exactly `log2(n)` iterations.
    pub fn lemma4(n: u64) -> Result<bool> {
        if n == 0 || !n.is_power_of_two() {
            return Err(domain_err(n, "lemma 4 needs a power of two"));
        }
        let mut v = n as u128;
        for _ in 0..n.trailing_zeros() {
            v = step(v);
        }
        Ok(v == 1)
    }

    // Number of trailing ones, i.e. the m with n = 2^m - 1 (mod 2^(m+1)).
    fn trailing_ones(n: u64) -> u32 {
        n.trailing_ones()
    }

    /// `n = 2^m - 1 (mod 2^(m+1))`, m >= 2: `T(n) = 2^(m-1) - 1 (mod 2^m)`.
    pub fn lemma5(n: u64) -> Result<bool> {
        let m = trailing_ones(n);
        if m < 2 {
            return Err(domain_err(n, "lemma 5 needs n = 3 (mod 4)"));
        }
        let t1 = step(n as u128);
        Ok(t1 % (1u128 << m) == (1u128 << (m - 1)) - 1)
    }

    /// Same domain as lemma 5: after `m - 1` iterations a term `= 1 (mod 4)`
    /// is reached.
    pub fn lemma6(n: u64) -> Result<bool> {
        let m = trailing_ones(n);
        if m < 2 {
            return Err(domain_err(n, "lemma 6 needs n = 3 (mod 4)"));
        }
        let mut v = n as u128;
        for _ in 0..m - 1 {
            v = step(v);
        }
        Ok(v % 4 == 1)
    }

    /// Membership in the union of the classes `[2^m - 1]_{2^(m+1)}`, m >= 2,
    /// coincides with membership in `[3]_4`.
    pub fn lemma7(n: u64) -> Result<bool> {
        if n == 0 {
            return Err(domain_err(n, "lemma 7 needs n >= 1"));
        }
        let in_union = trailing_ones(n) >= 2;
        let in_34 = n % 4 == 3;
        Ok(in_union == in_34)
    }

    /// Of the terms in `[3]_4` exactly those in `[11]_12` have a smaller odd
    /// predecessor in `[3]_4`.
    pub fn lemma8(n: u64) -> Result<bool> {
        if n % 4 != 3 {
            return Err(domain_err(n, "lemma 8 needs n = 3 (mod 4)"));
        }
        if n % 12 == 11 {
            let p = (2 * n as u128 - 1) / 3;
            Ok((2 * n as u128 - 1) % 3 == 0 && step(p) == n as u128 && p < n as u128 && p % 4 == 3)
        } else {
            // No odd predecessor exists at all: (2n - 1) is not divisible by 3.
            Ok((2 * n as u128 - 1) % 3 != 0)
        }
    }

    /// `n = 5 (mod 12)`: the odd predecessor `(2n - 1)/3` lies in `[3]_4`.
    pub fn lemma9(n: u64) -> Result<bool> {
        if n % 12 != 5 {
            return Err(domain_err(n, "lemma 9 needs n = 5 (mod 12)"));
        }
        let p = (2 * n as u128 - 1) / 3;
        Ok((2 * n as u128 - 1) % 3 == 0 && p % 4 == 3 && step(p) == n as u128)
    }

    /// `n = 1 (mod 12)`, n >= 13: the reverse chain `p -> (4p - 1)/3` exits
    /// into `[5]_12` or `[9]_12`.
    ///
    /// The chain stays in `[1]_12` for one extra level per factor of 3 in
    /// `n - 1`, so the depth is bounded but can exceed two double-steps.
    pub fn lemma10(n: u64) -> Result<bool> {
        if n % 12 != 1 || n < 13 {
            return Err(domain_err(n, "lemma 10 needs n = 1 (mod 12), n >= 13"));
        }
        let mut p = n as u128;
        for _ in 0..80 {
            if (4 * p - 1) % 3 != 0 {
                return Ok(false);
            }
            let q = (4 * p - 1) / 3;
            // Forward check: two iterations bring the predecessor back.
            if step(step(q)) != p {
                return Ok(false);
            }
            p = q;
            match p % 12 {
                5 | 9 => return Ok(true),
                1 => continue,
                _ => return Ok(false),
            }
        }
        Err(Error::CapExhausted { cap: 80 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(v: u64) -> Term {
        Term::from(v)
    }

    fn terms(vs: &[u64]) -> Vec<Term> {
        vs.iter().map(|&v| t(v)).collect()
    }

    #[test]
    fn extract_t_kind_variant_a() {
        let sub = extract_subsequence(&t(19)).unwrap();
        assert_eq!(sub.kind(), Kind::T);
        assert_eq!(sub.variant(), Variant::A);
        assert_eq!(sub.terms(), &terms(&[19, 29, 44, 22])[..]);
        assert_eq!(sub.length_index(), 3);
        assert_eq!(sub.max_odd(), Some(&t(29)));
        assert_eq!(sub.max_even(), Some(&t(44)));
        sub.check_invariants().unwrap();
    }

    #[test]
    fn extract_h_kind_variant_a() {
        let sub = extract_subsequence(&t(9)).unwrap();
        assert_eq!(sub.kind(), Kind::H);
        assert_eq!(sub.variant(), Variant::A);
        assert_eq!(sub.terms(), &terms(&[9, 14, 7])[..]);
        assert_eq!(sub.length_index(), 2);
        sub.check_invariants().unwrap();
    }

    #[test]
    fn extract_t_kind_variant_b() {
        let sub = extract_subsequence(&t(3)).unwrap();
        assert_eq!(sub.kind(), Kind::T);
        assert_eq!(sub.variant(), Variant::B);
        assert_eq!(sub.terms(), &terms(&[3, 5, 8, 4, 2, 1])[..]);
        assert_eq!(sub.length_index(), 5);
        assert_eq!(sub.max_odd(), Some(&t(5)));
        assert_eq!(sub.max_even(), Some(&t(8)));
        sub.check_invariants().unwrap();
    }

    #[test]
    fn extract_rejects_other_residues() {
        for bad in [1u64, 5, 11, 13, 2, 6] {
            assert!(extract_subsequence(&t(bad)).is_err(), "start {bad}");
        }
    }

    #[test]
    fn canonical_start_examples() {
        assert_eq!(canonical_start(&t(167)).unwrap(), (t(111), 1));
        assert_eq!(canonical_start(&t(19)).unwrap(), (t(19), 0));
        assert_eq!(canonical_start(&t(119)).unwrap(), (t(79), 1));
        // Oracle: the canonical subsequence contains 119 at the offset.
        let sub = extract_subsequence(&t(79)).unwrap();
        assert_eq!(sub.terms()[1], t(119));
        assert!(canonical_start(&t(9)).is_err());
    }

    #[test]
    fn decompose_27_matches_block_structure() {
        let d = decompose(&t(27), 100).unwrap();
        assert_eq!(d.completion, Completion::Complete);
        let starts: Vec<u64> = d
            .entries
            .iter()
            .map(|e| e.subsequence.start().to_u64().unwrap())
            .collect();
        assert_eq!(starts, vec![27, 31, 91, 103, 175, 111, 283, 319, 607, 15]);
        // The trajectory enters the 111-, 607- and 15-blocks one step in,
        // through 167, 911 and 23 respectively (all in [11]_12).
        let offsets: Vec<usize> = d.entries.iter().map(|e| e.entry_offset).collect();
        assert_eq!(offsets, vec![0, 0, 0, 0, 0, 1, 0, 0, 1, 1]);
        assert!(d.preamble.is_empty());

        let raw = crate::core::trajectory(&t(27), |_, v| v.is_one(), 1 << 20)
            .unwrap()
            .terms;
        assert_eq!(d.reconstruct(), raw);
    }

    #[test]
    fn decompose_h_start() {
        let d = decompose(&t(9), 100).unwrap();
        assert_eq!(d.entries[0].subsequence.terms(), &terms(&[9, 14, 7])[..]);
        assert_eq!(d.entries[1].subsequence.start(), &t(7));
        assert_eq!(d.entries[1].subsequence.variant(), Variant::B);
        assert_eq!(d.completion, Completion::Complete);
        let raw = crate::core::trajectory(&t(9), |_, v| v.is_one(), 1 << 20)
            .unwrap()
            .terms;
        assert_eq!(d.reconstruct(), raw);
    }

    #[test]
    fn decompose_power_of_two_is_all_preamble() {
        let d = decompose(&t(4), 100).unwrap();
        assert_eq!(d.preamble, terms(&[4, 2, 1]));
        assert!(d.entries.is_empty());
        assert_eq!(d.completion, Completion::Complete);
    }

    #[test]
    fn decompose_one_has_no_entries() {
        let d = decompose(&t(1), 100).unwrap();
        assert_eq!(d.preamble, vec![t(1)]);
        assert!(d.entries.is_empty());
        assert_eq!(d.completion, Completion::Complete);
        assert_eq!(d.reconstruct(), vec![t(1)]);
    }

    #[test]
    fn decompose_truncation() {
        let d = decompose(&t(27), 3).unwrap();
        assert_eq!(d.completion, Completion::Truncated);
        assert_eq!(d.entries.len(), 3);
    }

    #[test]
    fn decompose_entry_offset_at_source() {
        // 11 = 11 (mod 12): the chain enters C^t(7) at index 1.
        let d = decompose(&t(11), 100).unwrap();
        assert_eq!(d.entries[0].subsequence.start(), &t(7));
        assert_eq!(d.entries[0].entry_offset, 1);
        let raw = crate::core::trajectory(&t(11), |_, v| v.is_one(), 1 << 20)
            .unwrap()
            .terms;
        assert_eq!(d.reconstruct(), raw);
    }

    #[test]
    fn stopping_sequence_examples() {
        // Ends at 334; 334/2 = 167 < 175.
        let s175 = extract_subsequence(&t(175)).unwrap();
        assert!(is_stopping_sequence(&s175).unwrap());
        // Ends at 350; 175 > 103.
        let s103 = extract_subsequence(&t(103)).unwrap();
        assert!(!is_stopping_sequence(&s103).unwrap());
        // Interior crossing at 37 < 43.
        let s43 = extract_subsequence(&t(43)).unwrap();
        assert!(is_stopping_sequence(&s43).unwrap());
        // H-kind input is rejected.
        let h = extract_subsequence(&t(9)).unwrap();
        assert!(is_stopping_sequence(&h).is_err());
    }

    #[test]
    fn lemma_examples() {
        assert!(lemmas::lemma3(22).unwrap());
        assert!(lemmas::lemma5(11).unwrap());
        assert!(lemmas::lemma10(13).unwrap());
        // 109 needs three reverse double-steps: 109 -> 145 -> 193 -> 257.
        assert!(lemmas::lemma10(109).unwrap());
    }

    #[test]
    fn lemma_domains_are_enforced() {
        assert!(lemmas::lemma1(3).is_err());
        assert!(lemmas::lemma2(3).is_err());
        assert!(lemmas::lemma3(12).is_err());
        assert!(lemmas::lemma4(12).is_err());
        assert!(lemmas::lemma5(5).is_err());
        assert!(lemmas::lemma8(5).is_err());
        assert!(lemmas::lemma9(7).is_err());
        assert!(lemmas::lemma10(5).is_err());
        assert!(lemmas::lemma10(1).is_err());
    }

    #[test]
    fn fast_cut_matches_extractor() {
        for s in (3u64..5_000).filter(|s| matches!(s % 12, 3 | 7 | 9)) {
            let kind = if s % 12 == 9 { Kind::H } else { Kind::T };
            let sub = extract_subsequence(&t(s)).unwrap();
            let cut = fast_cut(kind, s, 4 * sub.length_index() + 8).unwrap();
            let expect = match sub.variant() {
                Variant::A => FastCut::A(sub.length_index()),
                Variant::B => FastCut::B(sub.length_index()),
            };
            assert_eq!(cut, expect, "s = {s}");
        }
    }
}
