//! Structural scans: the residue skeleton of every block, unique assignment
//! of `[3]_4` values to canonical blocks, full-trajectory coverage, and the
//! term lemmata over their residue classes.

use collatz::core::{t_step, trajectory, Term};
use collatz::subseq::{
    canonical_start, decompose, extract_subsequence, lemmas, Completion, Kind, Variant,
};
use std::collections::HashMap;

const SCAN_LIMIT: u64 = 100_000;

#[test]
fn t_kind_skeleton_holds_up_to_limit() {
    for s in (3..=SCAN_LIMIT).filter(|s| s % 12 == 3 || s % 12 == 7) {
        let sub = extract_subsequence(&Term::from(s)).unwrap();
        assert_eq!(sub.kind(), Kind::T);
        sub.check_invariants().unwrap_or_else(|e| panic!("s = {s}: {e}"));
        assert!(sub.length_index() >= 2, "s = {s}");
        if sub.variant() == Variant::A {
            // One halving later the chain continues below the odd maximum.
            let next = t_step(sub.end_term());
            assert_eq!(next.residue(4), 3, "s = {s}");
            assert!(&next < sub.max_odd().unwrap(), "s = {s}");
        }
    }
}

#[test]
fn h_kind_skeleton_holds_up_to_limit() {
    for s in (9..=SCAN_LIMIT).step_by(12) {
        let sub = extract_subsequence(&Term::from(s)).unwrap();
        assert_eq!(sub.kind(), Kind::H);
        sub.check_invariants().unwrap_or_else(|e| panic!("s = {s}: {e}"));
        assert!(sub.length_index() >= 2, "s = {s}");
    }
}

// Every x = 3 (mod 4) up to the limit appears in exactly one canonical T-kind
// block, at the offset canonical_start reports. All blocks containing x start
// at or below x, so scanning starts up to the limit is exhaustive.
#[test]
fn canonical_blocks_cover_3_mod_4_uniquely() {
    let mut seen: HashMap<u64, (u64, usize)> = HashMap::new();
    for s in (3..=SCAN_LIMIT).filter(|s| s % 12 == 3 || s % 12 == 7) {
        let sub = extract_subsequence(&Term::from(s)).unwrap();
        for (i, term) in sub.terms().iter().enumerate() {
            if term.residue(4) != 3 {
                continue;
            }
            let x = match term.to_u64() {
                Some(x) if x <= SCAN_LIMIT => x,
                _ => continue,
            };
            if let Some(prev) = seen.insert(x, (s, i)) {
                panic!("{x} covered twice: by {prev:?} and ({s}, {i})");
            }
        }
    }
    for x in (3..=SCAN_LIMIT).step_by(4) {
        let (start, offset) = canonical_start(&Term::from(x)).unwrap();
        let expect = (start.to_u64().unwrap(), offset);
        assert_eq!(seen.get(&x), Some(&expect), "x = {x}");
    }
}

#[test]
fn decomposition_covers_all_starts_to_10k() {
    for s in 1..=10_000u64 {
        let term = Term::from(s);
        let d = decompose(&term, 1 << 16).unwrap();
        assert_eq!(d.completion, Completion::Complete, "s = {s}");
        let raw = trajectory(&term, |_, v| v.is_one(), 1 << 20).unwrap();
        assert!(raw.stopped);
        assert_eq!(d.reconstruct(), raw.terms, "s = {s}");
    }
}

#[test]
fn lemma_predicates_hold_over_their_classes() {
    for n in 1..=SCAN_LIMIT {
        if n % 2 == 0 {
            assert!(lemmas::lemma1(n).unwrap(), "lemma1({n})");
        }
        if n % 4 == 1 && n >= 5 {
            assert!(lemmas::lemma2(n).unwrap(), "lemma2({n})");
        }
        if n % 8 == 6 {
            assert!(lemmas::lemma3(n).unwrap(), "lemma3({n})");
        }
        if n.is_power_of_two() {
            assert!(lemmas::lemma4(n).unwrap(), "lemma4({n})");
        }
        if n % 4 == 3 {
            assert!(lemmas::lemma5(n).unwrap(), "lemma5({n})");
            assert!(lemmas::lemma6(n).unwrap(), "lemma6({n})");
            assert!(lemmas::lemma8(n).unwrap(), "lemma8({n})");
        }
        assert!(lemmas::lemma7(n).unwrap(), "lemma7({n})");
        if n % 12 == 5 {
            assert!(lemmas::lemma9(n).unwrap(), "lemma9({n})");
        }
        if n % 12 == 1 && n >= 13 {
            assert!(lemmas::lemma10(n).unwrap(), "lemma10({n})");
        }
    }
}
