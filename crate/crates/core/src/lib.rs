//! Exact verification engine for unitary-group moments and their
//! function-field analogues.
//!
//! The crate is organised bottom-up:
//!
//! * [`partitions`]: partitions / cycle types and their enumeration.
//! * [`symfunc`]: symmetric functions in Schur coordinates (Pieri,
//!   Murnaghan–Nakayama, Kostka numbers, the truncated Hall pairing).
//! * [`charmap`]: class functions on `S_n`, the divisor statistics `d_λ`
//!   and the characteristic map.
//! * [`contingency`]: non-negative integer matrices with fixed margins,
//!   counted three independent ways.
//! * [`cue`]: exact CUE moments of secular coefficients and symmetric-power
//!   traces, plus a seeded Haar sampler for Monte Carlo cross-checks.
//! * [`ffield`]: `F_q` and `F_q[T]` arithmetic, factorization, divisor
//!   correlation sums, gcd matrices.
//! * [`lfunc`]: Dirichlet characters over `F_q[T]`, character-sum moments,
//!   L-function numerics, and integer multiplicative-function moments.
//!
//! Data-parallel loops use rayon when the `rayon` feature (default) is on and
//! fall back to plain iterators otherwise. Results are identical either way.

pub mod charmap;
pub mod contingency;
pub mod cue;
mod error;
pub mod ffield;
pub mod lfunc;
pub mod par;
pub mod partitions;
pub mod symfunc;

pub use error::{Error, Result};
pub use partitions::Partition;

/// Resource caps shared by the enumeration-heavy operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of objects a single enumeration may visit
    /// (monic polynomials, product tuples, …).
    pub max_enum: u64,
    /// Maximum number of backtracking nodes in contingency-table counting.
    pub max_nodes: u64,
    /// Maximum `rows * cols` for explicit matrix enumeration.
    pub max_matrix_cells: usize,
    /// Maximum unit-group order for character computations.
    pub max_phi: u64,
    /// Maximum `x^k` for integer product-tuple counting.
    pub max_product_tuples: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_enum: 10_000_000,
            max_nodes: 50_000_000,
            max_matrix_cells: 64,
            max_phi: 100_000,
            max_product_tuples: 100_000_000,
        }
    }
}

impl Limits {
    /// Default limits with `max_enum` overridden by the `CUE_LAB_MAX_ENUM`
    /// environment variable when it parses as an integer.
    pub fn from_env() -> Self {
        let mut limits = Limits::default();
        if let Some(cap) = std::env::var("CUE_LAB_MAX_ENUM")
            .ok()
            .and_then(|v| v.trim().parse::<u64>().ok())
        {
            limits.max_enum = cap;
        }
        limits
    }

    pub(crate) fn check_enum(&self, what: &'static str, count: u128) -> Result<()> {
        if count > self.max_enum as u128 {
            return Err(Error::LimitExceeded {
                what,
                value: count,
                limit: self.max_enum as u128,
            });
        }
        Ok(())
    }
}
