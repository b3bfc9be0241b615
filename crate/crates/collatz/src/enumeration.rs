//! Residue-class sieves for subsequences of equal length: the classes
//! `mod 12*2^h` (H-kind) and `mod 12*2^(t+1)` (T-kind) whose members all
//! produce variant-A blocks of the same length, and the Fibonacci counts
//! those class numbers follow.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::core::Term;
use crate::subseq::{extract_subsequence, fast_cut, FastCut, Kind, Variant};
use crate::{Error, Result, ScanGuards};

/// A variant-B start below the modulus; its termination at 1 is a property of
/// the value, not of its residue class, so it is excluded from class lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthException {
    pub value: u64,
    pub actual_length: usize,
    pub variant: Variant,
}

/// Residue classes sharing one subsequence length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthClassReport {
    pub kind: Kind,
    pub length: usize,
    pub modulus: u64,
    pub classes: Vec<u64>,
    pub exceptions: Vec<LengthException>,
}

impl LengthClassReport {
    /// `h=2` / `t=4` style header used by the text renderer.
    pub fn header(&self) -> String {
        match self.kind {
            Kind::T => format!("t={}", self.length),
            Kind::H => format!("h={}", self.length),
        }
    }
}

/// `12 * 2^h` for H-kind, `12 * 2^(t+1)` for T-kind.
pub fn class_modulus(kind: Kind, length: usize) -> u64 {
    let exp = match kind {
        Kind::H => length,
        Kind::T => length + 1,
    };
    12u64 << exp
}

fn require_length(length: usize) -> Result<()> {
    if length < 2 {
        return Err(Error::UndefinedInput {
            value: (length as u64).into(),
            reason: "length classes are defined for lengths >= 2",
        });
    }
    Ok(())
}

fn admissible(kind: Kind, r: u64) -> bool {
    match kind {
        Kind::T => r % 12 == 3 || r % 12 == 7,
        Kind::H => r % 12 == 9,
    }
}

// Cut of the full subsequence of `s` (variant and length index), following the
// u64 fast path and falling back to big integers on overflow.
fn full_cut(kind: Kind, s: u64) -> Result<(Variant, usize)> {
    match fast_cut(kind, s, 1 << 20) {
        Some(FastCut::A(i)) => Ok((Variant::A, i)),
        Some(FastCut::B(i)) => Ok((Variant::B, i)),
        Some(FastCut::Beyond) => Err(Error::CapExhausted { cap: 1 << 20 }),
        None => {
            let sub = extract_subsequence(&Term::from(s))?;
            Ok((sub.variant(), sub.length_index()))
        }
    }
}

// Cut probe bounded by `target`: anything beyond rejects membership anyway.
fn probe_cut(kind: Kind, s: u64, target: usize) -> FastCut {
    match fast_cut(kind, s, target) {
        Some(cut) => cut,
        None => {
            let sub = extract_subsequence(&Term::from(s)).expect("admissible start");
            let idx = sub.length_index();
            if idx > target {
                FastCut::Beyond
            } else if sub.variant() == Variant::A {
                FastCut::A(idx)
            } else {
                FastCut::B(idx)
            }
        }
    }
}

/// Scans every admissible residue below the modulus, sampling the
/// representatives `r` and `r + M` (and `r + 2M` when those two disagree).
/// A residue joins the class list iff all sampled representatives are
/// variant A with exactly the requested length; variant-B representatives
/// are recorded as exceptions.
pub fn brute_length_classes(
    kind: Kind,
    length: usize,
    guards: &ScanGuards,
) -> Result<LengthClassReport> {
    require_length(length)?;
    let modulus = class_modulus(kind, length);
    if modulus > guards.max_brute_modulus {
        return Err(Error::GuardExceeded {
            needed: modulus as u128,
            guard: guards.max_brute_modulus as u128,
        });
    }

    let rows: Vec<(u64, bool, Option<LengthException>)> = (0..modulus)
        .into_par_iter()
        .filter(|&r| admissible(kind, r))
        .map(|r| {
            let (variant0, len0) = full_cut(kind, r).expect("subsequence terminates");
            let exception = (variant0 == Variant::B).then_some(LengthException {
                value: r,
                actual_length: len0,
                variant: Variant::B,
            });
            let cut0 = if len0 > length {
                FastCut::Beyond
            } else {
                match variant0 {
                    Variant::A => FastCut::A(len0),
                    Variant::B => FastCut::B(len0),
                }
            };
            let cut1 = probe_cut(kind, r + modulus, length);
            let mut samples = vec![cut0, cut1];
            if cut0 != cut1 {
                samples.push(probe_cut(kind, r + 2 * modulus, length));
            }
            let member = samples.iter().all(|c| *c == FastCut::A(length));
            (r, member, exception)
        })
        .collect();

    let mut classes = Vec::new();
    let mut exceptions = Vec::new();
    for (r, member, exception) in rows {
        if member {
            classes.push(r);
        }
        if let Some(e) = exception {
            exceptions.push(e);
        }
    }
    classes.sort_unstable();
    exceptions.sort_unstable_by_key(|e| e.value);
    Ok(LengthClassReport { kind, length, modulus, classes, exceptions })
}

// One candidate class in the symbolic frontier: all starts `= r (mod 3*2^m)`.
// `v = T^i(r)` and `j` counts the odd steps among the first `i`; both stand in
// for the whole class as long as the cut tests stay within the modulus
// resolution.
#[derive(Debug, Clone, Copy)]
struct SymClass {
    r: u64,
    v: u128,
    j: u32,
}

struct SymbolicSieve {
    kind: Kind,
    level: u32,
    frontier: Vec<SymClass>,
}

impl SymbolicSieve {
    fn new(kind: Kind) -> Self {
        let seeds: &[u64] = match kind {
            Kind::T => &[3, 7],
            Kind::H => &[9],
        };
        SymbolicSieve {
            kind,
            level: 2,
            frontier: seeds
                .iter()
                .map(|&r| SymClass { r, v: r as u128, j: 0 })
                .collect(),
        }
    }

    // The cut index decided by lifting to `level + 1`: a test at index i needs
    // the class known mod 2^(i+3) for the T-kind [6]_8 test and mod 2^(i+2)
    // for the H-kind [3]_4 test.
    fn next_index(&self) -> i64 {
        let lag: i64 = match self.kind {
            Kind::T => 3,
            Kind::H => 2,
        };
        (self.level as i64 + 1) - lag
    }

    // Lifts the frontier one level and returns the classes whose blocks end
    // exactly at the newly decided index, as sorted residues mod 3*2^(level+1).
    fn step(&mut self) -> Result<Vec<u64>> {
        let new_index = self.next_index();
        let half = 3u64 << self.level; // pre-lift modulus 3 * 2^level
        let kind = self.kind;
        let overflow = Error::GuardExceeded { needed: u128::MAX, guard: u128::MAX };
        let mut emitted = Vec::new();
        let mut survivors = Vec::with_capacity(self.frontier.len() * 2);
        for class in &self.frontier {
            // Steps already materialized in v.
            let i = if new_index >= 1 { new_index as u32 - 1 } else { 0 };
            // T^i(r + 3*2^level) = T^i(r) + 3^(j+1) * 2^(level - i)
            let lift_offset = 3u128
                .checked_pow(class.j + 1)
                .and_then(|p| p.checked_mul(1u128 << (self.level - i)))
                .ok_or(overflow.clone())?;
            let children = [
                SymClass { r: class.r, v: class.v, j: class.j },
                SymClass {
                    r: class.r + half,
                    v: class.v.checked_add(lift_offset).ok_or(overflow.clone())?,
                    j: class.j,
                },
            ];
            for mut child in children {
                if new_index >= 1 {
                    child = advance(child)?;
                    let cut = match kind {
                        Kind::T => child.v & 7 == 6,
                        Kind::H => child.v & 3 == 3,
                    };
                    if cut {
                        emitted.push(child.r);
                        continue;
                    }
                }
                survivors.push(child);
            }
        }
        self.level += 1;
        self.frontier = survivors;
        emitted.sort_unstable();
        Ok(emitted)
    }
}

fn advance(class: SymClass) -> Result<SymClass> {
    if class.v & 1 == 0 {
        Ok(SymClass { v: class.v >> 1, ..class })
    } else {
        let v = class
            .v
            .checked_mul(3)
            .and_then(|v| v.checked_add(1))
            .ok_or(Error::GuardExceeded { needed: u128::MAX, guard: u128::MAX })?
            >> 1;
        Ok(SymClass { v, j: class.j + 1, ..class })
    }
}

/// Same class set as [`brute_length_classes`], computed by breadth-wise
/// refinement of candidate classes `mod 3*2^j`. The frontier stays
/// Fibonacci-sized, so no modulus guard is needed. Variant-B individuals are
/// out of scope here (the report's exception list is empty).
pub fn symbolic_length_classes(kind: Kind, length: usize) -> Result<LengthClassReport> {
    require_length(length)?;
    let modulus = class_modulus(kind, length);
    let mut sieve = SymbolicSieve::new(kind);
    loop {
        let idx = sieve.next_index();
        let classes = sieve.step()?;
        if idx == length as i64 {
            return Ok(LengthClassReport { kind, length, modulus, classes, exceptions: Vec::new() });
        }
    }
}

/// One sweep of the symbolic sieve producing the reports for every length in
/// `2..=length_max`.
pub fn symbolic_length_scan(kind: Kind, length_max: usize) -> Result<Vec<LengthClassReport>> {
    require_length(length_max)?;
    let mut sieve = SymbolicSieve::new(kind);
    let mut out = Vec::new();
    loop {
        let idx = sieve.next_index();
        let classes = sieve.step()?;
        if idx >= 2 {
            out.push(LengthClassReport {
                kind,
                length: idx as usize,
                modulus: class_modulus(kind, idx as usize),
                classes,
                exceptions: Vec::new(),
            });
        }
        if idx == length_max as i64 {
            return Ok(out);
        }
    }
}

/// Exact Fibonacci numbers with F(1) = F(2) = 1.
pub fn fibonacci(n: u64) -> u64 {
    let (mut a, mut b) = (0u64, 1u64);
    for _ in 0..n {
        let next = a.checked_add(b).expect("Fibonacci index small enough for u64");
        a = b;
        b = next;
    }
    a
}

/// Conjectured class counts: `F(h - 1)` for H-kind and `2*F(t + 1) - 2` for
/// T-kind, via the integer recurrence (the closed forms evaluated exactly).
pub fn expected_count(kind: Kind, length: usize) -> Result<u64> {
    require_length(length)?;
    Ok(match kind {
        Kind::H => fibonacci(length as u64 - 1),
        Kind::T => 2 * fibonacci(length as u64 + 1) - 2,
    })
}

/// One row of the conjecture check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FibRow {
    pub length: usize,
    pub observed: u64,
    pub expected: u64,
    pub matches: bool,
}

/// Observed class counts (symbolic path, cross-checked against brute force
/// wherever the modulus guard allows) against the Fibonacci closed forms.
pub fn verify_fibonacci_conjectures(
    kind: Kind,
    length_max: usize,
    guards: &ScanGuards,
) -> Result<Vec<FibRow>> {
    let reports = symbolic_length_scan(kind, length_max)?;
    let mut rows = Vec::new();
    for report in reports {
        if report.modulus <= guards.max_brute_modulus {
            let brute = brute_length_classes(kind, report.length, guards)?;
            assert_eq!(
                brute.classes, report.classes,
                "brute and symbolic sieves disagree at {}",
                report.header(),
            );
        }
        let expected = expected_count(kind, report.length)?;
        let observed = report.classes.len() as u64;
        rows.push(FibRow {
            length: report.length,
            observed,
            expected,
            matches: observed == expected,
        });
    }
    Ok(rows)
}
