//! Stopping time sigma(s), the subsequence-count stopping time tau(s), the
//! residue-class enumerations `mod 2^sigma` and `mod 3*2^sigma`, and the
//! conjectured count identities relating them.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::core::{floor_log2_pow3, t_step, Term};
use crate::subseq::canonical_start;
use crate::{Error, Result, ScanGuards};

/// Stopping data of one start: least `k` with `T^k(s) < s`, the number of
/// subsequence blocks charged until then, and the chain of canonical block
/// starts traversed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoppingProfile {
    pub s: Term,
    pub sigma: u64,
    pub tau: u64,
    pub crossing_value: Term,
    pub subsequence_starts: Vec<Term>,
}

/// Least `k` with `T^k(s) < s`, by direct simulation.
pub fn sigma(s: &Term, cap: u64) -> Result<u64> {
    if s.is_one() {
        return Err(Error::UndefinedInput {
            value: s.value().clone(),
            reason: "sigma(1) is undefined: no iterate drops below 1",
        });
    }
    // u64 fast path with transparent big-integer fallback on overflow.
    if let Some(s64) = s.to_u64() {
        let mut v = s64;
        for k in 1..=cap {
            match crate::core::t_step_u64(v) {
                Some(next) => {
                    v = next;
                    if v < s64 {
                        return Ok(k);
                    }
                }
                None => return sigma_resume(Term::from(v), k - 1, s, cap),
            }
        }
        return Err(Error::CapExhausted { cap });
    }
    sigma_resume(s.clone(), 0, s, cap)
}

fn sigma_resume(from: Term, done: u64, s: &Term, cap: u64) -> Result<u64> {
    let mut v = from;
    for k in done + 1..=cap {
        v = t_step(&v);
        if &v < s {
            return Ok(k);
        }
    }
    Err(Error::CapExhausted { cap })
}

fn require_tau_domain(s: &Term) -> Result<()> {
    match s.residue(12) {
        3 | 7 => Ok(()),
        _ => Err(Error::DomainResidue {
            value: s.value().clone(),
            requirement: "tau is defined for starts in [3]_12 or [7]_12",
        }),
    }
}

/// Simulates the subsequence chain from `s` until the first crossing below
/// `s`. A crossing at the halving step right after a block end (`[6]_8` term)
/// is charged to the block that just ended; interior crossings are charged to
/// the containing block.
pub fn tau(s: &Term, cap: u64) -> Result<StoppingProfile> {
    require_tau_domain(s)?;
    let mut starts = vec![s.clone()];
    let mut completed = 0u64;
    let mut prev = s.clone();
    for k in 1..=cap {
        let prev_is_end = prev.residue(8) == 6;
        if prev_is_end {
            completed += 1;
        }
        let v = t_step(&prev);
        if &v < s {
            let tau = if prev_is_end { completed } else { completed + 1 };
            return Ok(StoppingProfile {
                s: s.clone(),
                sigma: k,
                tau,
                crossing_value: v,
                subsequence_starts: starts,
            });
        }
        if prev_is_end {
            // Chain continues into the block containing prev/2.
            let (start, _) = canonical_start(&v)?;
            starts.push(start);
        }
        prev = v;
    }
    Err(Error::CapExhausted { cap })
}

/// `1 + floor(n * log2 3)`: the stopping time shared by the classes with `n`
/// odd steps.
pub fn admissible_sigma(n: u64) -> u64 {
    1 + floor_log2_pow3(n)
}

/// True iff `sigma` equals `admissible_sigma(n)` for some `n >= 0`.
pub fn is_admissible_sigma(sigma: u64) -> bool {
    let mut n = 0;
    loop {
        let v = admissible_sigma(n);
        if v == sigma {
            return true;
        }
        if v > sigma {
            return false;
        }
        n += 1;
    }
}

/// A class accepted by the coefficient criterion whose smallest members
/// disagree with it under direct simulation. Expected never; surfaced, not
/// absorbed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaDiscrepancy {
    pub representative: u64,
    pub expected_sigma: u64,
    pub simulated_sigma: Option<u64>,
}

/// Stopping residue classes `mod 2^sigma` for one `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaClassReport {
    pub n: u64,
    pub sigma: u64,
    /// `2^sigma`
    pub modulus: u64,
    pub classes: Vec<u64>,
    pub discrepancies: Vec<SigmaDiscrepancy>,
}

impl SigmaClassReport {
    pub fn z(&self) -> u64 {
        self.classes.len() as u64
    }
}

#[inline]
fn step_u128(v: u128) -> u128 {
    if v & 1 == 0 {
        v >> 1
    } else {
        (3 * v + 1) >> 1
    }
}

// Coefficient criterion for one residue: the ratio 3^j / 2^k first drops
// below 1 exactly at k = sigma with j = n odd steps. The parity vector of the
// first sigma steps is a function of r mod 2^sigma only.
fn coefficient_accepts(r: u64, n: u64, sigma: u64, pow3: &[u128]) -> bool {
    let mut v = r as u128;
    let mut j = 0u64;
    for k in 1..=sigma {
        if v & 1 == 1 {
            j += 1;
        }
        v = step_u128(v);
        if pow3[j as usize] < (1u128 << k) {
            return k == sigma && j == n;
        }
    }
    false
}

fn sigma_guard(n: u64, max_exp: u32) -> Result<u64> {
    let s = admissible_sigma(n);
    if s > max_exp as u64 {
        return Err(Error::GuardExceeded {
            needed: 1u128 << s.min(127),
            guard: 1u128 << max_exp,
        });
    }
    Ok(s)
}

/// Enumerates the residues `mod 2^sigma` whose members stop after exactly
/// `sigma = admissible_sigma(n)` iterations, by the affine-coefficient
/// criterion. Every accepted class is re-verified by direct simulation on its
/// two smallest representatives; disagreements land in `discrepancies`.
pub fn enum_sigma_classes(n: u64, guards: &ScanGuards) -> Result<SigmaClassReport> {
    let sigma_n = sigma_guard(n, guards.max_sigma_exponent)?;
    let modulus = 1u64 << sigma_n;
    let pow3: Vec<u128> = (0..=sigma_n).map(|j| 3u128.pow(j as u32)).collect();

    let mut classes: Vec<u64> = (0..modulus)
        .into_par_iter()
        .filter(|&r| coefficient_accepts(r, n, sigma_n, &pow3))
        .collect();
    classes.sort_unstable();

    let mut discrepancies = Vec::new();
    for &r in &classes {
        for lift in 0..2u64 {
            let rep = r + lift * modulus;
            let rep = if rep >= 2 { rep } else { rep + 2 * modulus };
            let simulated = sigma(&Term::from(rep), guards.iteration_cap).ok();
            if simulated != Some(sigma_n) {
                discrepancies.push(SigmaDiscrepancy {
                    representative: rep,
                    expected_sigma: sigma_n,
                    simulated_sigma: simulated,
                });
            }
        }
    }
    Ok(SigmaClassReport { n, sigma: sigma_n, modulus, classes, discrepancies })
}

/// Independent oracle for [`enum_sigma_classes`]: classifies every residue by
/// directly simulating the stopping time of its smallest representative
/// (capped at `sigma`, which suffices to decide membership).
pub fn enum_sigma_classes_direct(n: u64, guards: &ScanGuards) -> Result<Vec<u64>> {
    let sigma_n = sigma_guard(n, guards.max_sigma_exponent)?;
    let modulus = 1u64 << sigma_n;
    let mut classes: Vec<u64> = (0..modulus)
        .into_par_iter()
        .filter(|&r| {
            let rep = if r >= 2 { r } else { r + modulus };
            let s = rep as u128;
            let mut v = s;
            for k in 1..=sigma_n {
                v = step_u128(v);
                if v < s {
                    return k == sigma_n;
                }
            }
            false
        })
        .collect();
    classes.sort_unstable();
    Ok(classes)
}

/// One tau-group of residue classes `mod 3*2^sigma`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TauClassGroup {
    pub tau: u64,
    pub classes: Vec<u64>,
}

/// A residue whose lifted representatives disagree on `(sigma, tau)`.
/// Expected never; surfaced for inspection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TauUniformityViolation {
    pub residue: u64,
    pub representative: u64,
    pub expected: (u64, u64),
    pub observed: Option<(u64, u64)>,
}

/// Residue classes `mod 3*2^sigma` grouped by tau for one `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TauClassReport {
    pub n: u64,
    pub sigma: u64,
    /// `3 * 2^sigma`
    pub modulus: u64,
    pub groups: Vec<TauClassGroup>,
    pub violations: Vec<TauUniformityViolation>,
}

impl TauClassReport {
    pub fn count(&self, tau: u64) -> u64 {
        self.groups
            .iter()
            .find(|g| g.tau == tau)
            .map_or(0, |g| g.classes.len() as u64)
    }

    /// `A_tau(n)` for tau = 1..max present, dense.
    pub fn counts(&self) -> Vec<u64> {
        let max_tau = self.groups.iter().map(|g| g.tau).max().unwrap_or(0);
        (1..=max_tau).map(|t| self.count(t)).collect()
    }
}

// Bounded (sigma, tau) of `s`, `None` when no crossing happens within
// `sigma_cap` steps. u128 keeps the largest guarded scans overflow-free.
fn tau_bounded(s: u128, sigma_cap: u64) -> Option<(u64, u64)> {
    let mut completed = 0u64;
    let mut prev = s;
    for k in 1..=sigma_cap {
        let prev_is_end = prev & 7 == 6;
        if prev_is_end {
            completed += 1;
        }
        let v = step_u128(prev);
        if v < s {
            let tau = if prev_is_end { completed } else { completed + 1 };
            return Some((k, tau));
        }
        prev = v;
    }
    None
}

/// Scans the starts `= 3, 7 (mod 12)` below `3*2^sigma` and groups by tau
/// those whose representative stops after exactly `sigma` steps. Uniformity of
/// `(sigma, tau)` across each class is sampled on two lifted representatives.
/// `tau_filter` keeps only the requested group in the report.
pub fn enum_tau_classes(
    n: u64,
    tau_filter: Option<u64>,
    guards: &ScanGuards,
) -> Result<TauClassReport> {
    if n < 2 {
        return Err(Error::UndefinedInput {
            value: n.into(),
            reason: "tau classes are enumerated for n >= 2",
        });
    }
    let sigma_n = sigma_guard(n, guards.max_tau_sigma_exponent)?;
    let modulus = 3u64 << sigma_n;

    let hits: Vec<(u64, u64)> = (0..modulus)
        .into_par_iter()
        .filter(|&r| r % 12 == 3 || r % 12 == 7)
        .filter_map(|r| {
            match tau_bounded(r as u128, sigma_n) {
                Some((s, t)) if s == sigma_n => Some((r, t)),
                _ => None,
            }
        })
        .collect();

    let mut by_tau: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    let mut violations = Vec::new();
    for &(r, t) in &hits {
        for lift in 1..=2u64 {
            let rep = r + lift * modulus;
            let observed = tau_bounded(rep as u128, sigma_n + 1)
                .filter(|&(s, _)| s == sigma_n);
            if observed != Some((sigma_n, t)) {
                violations.push(TauUniformityViolation {
                    residue: r,
                    representative: rep,
                    expected: (sigma_n, t),
                    observed,
                });
            }
        }
        by_tau.entry(t).or_default().push(r);
    }

    let mut groups: Vec<TauClassGroup> = by_tau
        .into_iter()
        .filter(|(t, _)| tau_filter.is_none_or(|f| f == *t))
        .map(|(tau, mut classes)| {
            classes.sort_unstable();
            TauClassGroup { tau, classes }
        })
        .collect();
    groups.sort_by_key(|g| g.tau);
    violations.sort_unstable_by_key(|v| (v.residue, v.representative));
    Ok(TauClassReport { n, sigma: sigma_n, modulus, groups, violations })
}

/// The assembled count table: `A_tau(n)` plus the `z(n)` and `sigma(n)`
/// columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountTable {
    pub n_max: u64,
    /// tau -> n -> A_tau(n), only non-zero entries.
    pub counts: BTreeMap<u64, BTreeMap<u64, u64>>,
    pub z: BTreeMap<u64, u64>,
    pub sigma_of_n: BTreeMap<u64, u64>,
}

impl CountTable {
    pub fn a(&self, tau: u64, n: u64) -> Option<u64> {
        self.counts.get(&tau).and_then(|row| row.get(&n)).copied()
    }

    /// The dense column for one `n`: `A_1(n) ..= A_max(n)`.
    pub fn column(&self, n: u64) -> Vec<u64> {
        let max_tau = self
            .counts
            .iter()
            .filter(|(_, row)| row.contains_key(&n))
            .map(|(t, _)| *t)
            .max()
            .unwrap_or(0);
        (1..=max_tau).map(|t| self.a(t, n).unwrap_or(0)).collect()
    }
}

/// Builds the table rows for n = 2..=n_max. `z(n)` comes from the independent
/// `mod 2^sigma` coefficient scan, not from the tau sums.
pub fn tau_table(n_max: u64, guards: &ScanGuards) -> Result<CountTable> {
    if n_max < 2 {
        return Err(Error::UndefinedInput {
            value: n_max.into(),
            reason: "the table starts at n = 2",
        });
    }
    let mut counts: BTreeMap<u64, BTreeMap<u64, u64>> = BTreeMap::new();
    let mut z = BTreeMap::new();
    let mut sigma_of_n = BTreeMap::new();
    for n in 2..=n_max {
        let report = enum_tau_classes(n, None, guards)?;
        sigma_of_n.insert(n, report.sigma);
        for group in &report.groups {
            counts
                .entry(group.tau)
                .or_default()
                .insert(n, group.classes.len() as u64);
        }
        z.insert(n, enum_sigma_classes(n, guards)?.z());
    }
    Ok(CountTable { n_max, counts, z, sigma_of_n })
}

/// `z(n)` against half the sum of the `A_tau(n)`, both sides computed
/// independently.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conjecture3Report {
    pub n: u64,
    pub z: u64,
    pub tau_counts: Vec<u64>,
    pub tau_sum: u64,
    pub matches: bool,
}

pub fn verify_conjecture_3(n: u64, guards: &ScanGuards) -> Result<Conjecture3Report> {
    let z = enum_sigma_classes(n, guards)?.z();
    let tau_report = enum_tau_classes(n, None, guards)?;
    let tau_counts = tau_report.counts();
    let tau_sum: u64 = tau_counts.iter().sum();
    let matches = tau_sum % 2 == 0 && z == tau_sum / 2;
    Ok(Conjecture3Report { n, z, tau_counts, tau_sum, matches })
}

/// `A_1(n)` against the conjectured power of two `2^m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conjecture4Report {
    pub n: u64,
    pub observed: u64,
    pub m: u64,
    pub expected: u64,
    pub matches: bool,
}

pub fn verify_conjecture_4(n: u64, guards: &ScanGuards) -> Result<Conjecture4Report> {
    if n < 2 {
        return Err(Error::UndefinedInput {
            value: n.into(),
            reason: "conjecture 4 is stated for n >= 2",
        });
    }
    let m = 1 + floor_log2_pow3(n - 1) - (n - 1);
    let expected = 1u64 << m;
    let observed = enum_tau_classes(n, Some(1), guards)?.count(1);
    Ok(Conjecture4Report { n, observed, m, expected, matches: observed == expected })
}

#[cfg(test)]
mod tests {
    use super::*;

    const CAP: u64 = 1 << 20;

    fn t(v: u64) -> Term {
        Term::from(v)
    }

    fn guards() -> ScanGuards {
        ScanGuards::default()
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma(&t(6), CAP).unwrap(), 1);
        assert_eq!(sigma(&t(19), CAP).unwrap(), 4);
        assert_eq!(sigma(&t(27), CAP).unwrap(), 59);
    }

    #[test]
    fn sigma_of_one_is_undefined() {
        assert!(matches!(sigma(&t(1), CAP), Err(Error::UndefinedInput { .. })));
    }

    #[test]
    fn sigma_cap_exhaustion() {
        assert!(matches!(sigma(&t(27), 10), Err(Error::CapExhausted { .. })));
    }

    #[test]
    fn tau_examples() {
        let p19 = tau(&t(19), CAP).unwrap();
        assert_eq!((p19.sigma, p19.tau), (4, 1));
        assert_eq!(p19.crossing_value, t(11));
        assert_eq!(p19.subsequence_starts, vec![t(19)]);

        let p187 = tau(&t(187), CAP).unwrap();
        assert_eq!((p187.sigma, p187.tau), (7, 2));
        assert_eq!(p187.crossing_value, t(119));
        assert_eq!(p187.subsequence_starts, vec![t(187), t(211)]);

        let p27 = tau(&t(27), CAP).unwrap();
        assert_eq!((p27.sigma, p27.tau), (59, 9));
        assert_eq!(p27.crossing_value, t(23));
        let starts: Vec<u64> = p27
            .subsequence_starts
            .iter()
            .map(|s| s.to_u64().unwrap())
            .collect();
        assert_eq!(starts, vec![27, 31, 91, 103, 175, 111, 283, 319, 607]);
    }

    #[test]
    fn tau_domain_is_enforced() {
        for bad in [9u64, 11, 6, 1] {
            assert!(tau(&t(bad), CAP).is_err(), "start {bad}");
        }
    }

    #[test]
    fn admissible_sigma_examples() {
        assert_eq!(admissible_sigma(0), 1);
        assert_eq!(admissible_sigma(6), 10);
        assert_eq!(admissible_sigma(13), 21);
        assert!(is_admissible_sigma(4));
        assert!(!is_admissible_sigma(3));
        assert!(!is_admissible_sigma(6));
    }

    #[test]
    fn enum_sigma_examples() {
        let n2 = enum_sigma_classes(2, &guards()).unwrap();
        assert_eq!((n2.sigma, n2.modulus), (4, 16));
        assert_eq!(n2.classes, vec![3]);
        assert!(n2.discrepancies.is_empty());

        let n5 = enum_sigma_classes(5, &guards()).unwrap();
        assert_eq!(n5.modulus, 256);
        assert_eq!(n5.classes, vec![39, 79, 95, 123, 175, 199, 219]);

        let n8 = enum_sigma_classes(8, &guards()).unwrap();
        assert_eq!(n8.modulus, 8192);
        assert_eq!(n8.z(), 85);
        assert!(n8.discrepancies.is_empty());
    }

    #[test]
    fn enum_sigma_base_cases() {
        let n0 = enum_sigma_classes(0, &guards()).unwrap();
        assert_eq!((n0.sigma, n0.classes.clone()), (1, vec![0]));
        let n1 = enum_sigma_classes(1, &guards()).unwrap();
        assert_eq!((n1.sigma, n1.classes.clone()), (2, vec![1]));
    }

    #[test]
    fn coefficient_and_direct_scans_agree_small() {
        for n in 0..=7 {
            let coeff = enum_sigma_classes(n, &guards()).unwrap();
            let direct = enum_sigma_classes_direct(n, &guards()).unwrap();
            assert_eq!(coeff.classes, direct, "n = {n}");
        }
    }

    #[test]
    fn enum_tau_examples() {
        let n2 = enum_tau_classes(2, Some(1), &guards()).unwrap();
        assert_eq!(n2.modulus, 48);
        assert_eq!(n2.groups.len(), 1);
        assert_eq!(n2.groups[0].classes, vec![3, 19]);
        assert!(n2.violations.is_empty());

        let n8 = enum_tau_classes(8, None, &guards()).unwrap();
        assert_eq!(n8.counts(), vec![32, 96, 40, 2]);

        let n6 = enum_tau_classes(6, Some(3), &guards()).unwrap();
        assert_eq!(n6.modulus, 3072);
        assert_eq!(n6.groups[0].classes, vec![507, 1531]);
    }

    #[test]
    fn conjecture_3_examples() {
        let c8 = verify_conjecture_3(8, &guards()).unwrap();
        assert_eq!(c8.z, 85);
        assert_eq!(c8.tau_counts, vec![32, 96, 40, 2]);
        assert!(c8.matches);

        let c2 = verify_conjecture_3(2, &guards()).unwrap();
        assert_eq!((c2.z, c2.tau_sum), (1, 2));
        assert!(c2.matches);

        let c10 = verify_conjecture_3(10, &guards()).unwrap();
        assert_eq!(c10.z, 476);
        assert_eq!(c10.tau_counts, vec![64, 384, 416, 86, 2]);
        assert!(c10.matches);
    }

    #[test]
    fn conjecture_4_examples() {
        let c2 = verify_conjecture_4(2, &guards()).unwrap();
        assert_eq!((c2.observed, c2.m, c2.expected), (2, 1, 2));
        assert!(c2.matches);

        let c8 = verify_conjecture_4(8, &guards()).unwrap();
        assert_eq!((c8.observed, c8.m, c8.expected), (32, 5, 32));
        assert!(c8.matches);

        let c13 = verify_conjecture_4(13, &guards()).unwrap();
        assert_eq!((c13.observed, c13.m, c13.expected), (256, 8, 256));
        assert!(c13.matches);
    }

    #[test]
    fn tau_table_small() {
        let table = tau_table(5, &guards()).unwrap();
        assert_eq!(table.a(1, 2), Some(2));
        assert_eq!(table.a(2, 4), Some(2));
        assert_eq!(table.a(2, 5), Some(6));
        assert_eq!(table.column(5), vec![8, 6]);
        assert_eq!(table.z.get(&5), Some(&7));
        assert_eq!(table.sigma_of_n.get(&5), Some(&8));

        let tiny = tau_table(2, &guards()).unwrap();
        assert_eq!(tiny.column(2), vec![2]);
    }

    #[test]
    fn guards_are_enforced() {
        let tight = ScanGuards {
            max_sigma_exponent: 10,
            max_tau_sigma_exponent: 10,
            ..ScanGuards::default()
        };
        assert!(matches!(
            enum_sigma_classes(8, &tight),
            Err(Error::GuardExceeded { .. })
        ));
        assert!(matches!(
            enum_tau_classes(8, None, &tight),
            Err(Error::GuardExceeded { .. })
        ));
    }

    #[test]
    fn big_integer_stress_example() {
        let s = Term::parse("2602714556700227743").unwrap();
        let profile = tau(&s, CAP).unwrap();
        assert_eq!(profile.sigma, 1005);
        // The crossing-charged count. The full descent of this start consists
        // of 166 blocks, 165 of which end structurally; that display count is
        // not tau (it would give tau(187) = 4 instead of 2).
        assert_eq!(profile.tau, 140);
        assert_eq!(sigma(&s, CAP).unwrap(), 1005);

        let d = crate::subseq::decompose(&s, 1 << 20).unwrap();
        assert_eq!(d.entries.len(), 166);
        let structural = d
            .entries
            .iter()
            .filter(|e| e.subsequence.variant() == crate::subseq::Variant::A)
            .count();
        assert_eq!(structural, 165);
    }
}
