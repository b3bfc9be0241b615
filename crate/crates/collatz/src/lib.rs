//! Exact desk-scale toolkit for the shortcut Collatz map `T(n) = n/2` (n even),
//! `(3n+1)/2` (n odd).
//!
//! The crate decomposes trajectories into the finite subsequences that start in
//! the residue classes `[3]_12`, `[7]_12` (T-kind) and `[9]_12` (H-kind), sieves
//! the residue classes on which those subsequences share a common length,
//! enumerates stopping-time residue classes, and evaluates the related limit
//! quotients with exact dyadic arithmetic.
//!
//! All trajectory arithmetic is arbitrary precision; the enumeration sieves use
//! overflow-checked fixed-width fast paths internally.

pub mod core;
pub mod enumeration;
pub mod limits;
pub mod stopping;
pub mod subseq;

use num_bigint::BigUint;
use thiserror::Error;

/// Errors shared by all modules.
///
/// The CLI maps `Domain*`-style errors to exit code 1 and guard/cap exhaustion
/// to exit code 2.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("value {value} is not in the required residue class ({requirement})")]
    DomainResidue { value: BigUint, requirement: &'static str },

    #[error("operation undefined for input {value}: {reason}")]
    UndefinedInput { value: BigUint, reason: &'static str },

    #[error("iteration cap of {cap} steps exhausted before the stop condition fired")]
    CapExhausted { cap: u64 },

    #[error("scan guard exceeded: needs modulus {needed}, guard allows {guard}")]
    GuardExceeded { needed: u128, guard: u128 },

    #[error("degenerate subsequence of length index {length_index} extracted from {start}: {terms:?}")]
    DegenerateSubsequence {
        start: BigUint,
        length_index: usize,
        terms: Vec<BigUint>,
    },

    #[error("no z(n) value available for n = {n}")]
    MissingZ { n: u32 },

    #[error("z-value file rejected: {reason}")]
    ZFileFormat { reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for guard/cap exhaustion as opposed to a domain error.
    pub fn is_resource_exhausted(&self) -> bool {
        matches!(self, Error::CapExhausted { .. } | Error::GuardExceeded { .. })
    }
}

/// Resource guards for the enumeration scans.
///
/// Defaults keep every scan desk-scale (worst case a few hundred MB and a few
/// minutes). Raising them is safe but trades time and memory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanGuards {
    /// Largest modulus `12 * 2^(h|t+1)` the brute-force length-class scan accepts.
    pub max_brute_modulus: u64,
    /// Largest exponent for the `mod 2^sigma` stopping-class scans.
    pub max_sigma_exponent: u32,
    /// Largest exponent for the `mod 3*2^sigma` tau-class scans.
    pub max_tau_sigma_exponent: u32,
    /// Step cap for trajectory-style iteration (sigma, tau, trajectory).
    pub iteration_cap: u64,
}

impl Default for ScanGuards {
    fn default() -> Self {
        ScanGuards {
            max_brute_modulus: 1 << 28,
            max_sigma_exponent: 24,
            max_tau_sigma_exponent: 23,
            iteration_cap: 1 << 20,
        }
    }
}

impl ScanGuards {
    /// Guards with effectively unlimited moduli; iteration cap is kept.
    pub fn unrestricted() -> Self {
        ScanGuards {
            max_brute_modulus: u64::MAX,
            max_sigma_exponent: 62,
            max_tau_sigma_exponent: 60,
            iteration_cap: 1 << 20,
        }
    }
}
