//! Integer partitions, used both as shapes and as cycle types.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;

use crate::{Error, Result};

/// Default upper bound for [`enumerate_partitions`].
pub const DEFAULT_PARTITION_BOUND: usize = 30;

/// A weakly decreasing sequence of positive integers.
///
/// Ordering is lexicographic on the parts, so sorting a list of partitions of
/// the same size puts `(1,1,…)` first and `(n)` last.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    /// Builds a partition from parts that are already weakly decreasing and
    /// positive.
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidInput(format!("zero part in {parts:?}")));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput(format!("parts not weakly decreasing: {parts:?}")));
        }
        Ok(Partition { parts })
    }

    /// Sorts the parts and drops zeros.
    pub fn from_unsorted(mut parts: Vec<usize>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts }
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    /// The one-row partition `(n)`; empty when `n == 0`.
    pub fn row(n: usize) -> Self {
        if n == 0 {
            Self::empty()
        } else {
            Partition { parts: vec![n] }
        }
    }

    /// The one-column partition `(1^n)`.
    pub fn column(n: usize) -> Self {
        Partition { parts: vec![1; n] }
    }

    /// Partition with `a[j-1]` parts equal to `j`. Trailing zeros are fine.
    pub fn from_multiplicities(a: &[usize]) -> Self {
        let mut parts = Vec::with_capacity(a.iter().sum());
        for (j, &count) in a.iter().enumerate().rev() {
            parts.extend(std::iter::repeat_n(j + 1, count));
        }
        Partition { parts }
    }

    /// Inverse of [`Partition::from_multiplicities`]: `m[i-1] = #{parts == i}`,
    /// with length equal to the largest part.
    pub fn multiplicities(&self) -> Vec<usize> {
        let mut m = vec![0; self.largest()];
        for &p in &self.parts {
            m[p - 1] += 1;
        }
        m
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// `|λ|`.
    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number of parts, `ℓ(λ)`.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn largest(&self) -> usize {
        self.parts.first().copied().unwrap_or(0)
    }

    /// Part `i` (0-based), or 0 past the end.
    pub fn part(&self, i: usize) -> usize {
        self.parts.get(i).copied().unwrap_or(0)
    }

    pub fn conjugate(&self) -> Partition {
        let cols = self.largest();
        let parts = (1..=cols)
            .map(|c| self.parts.iter().take_while(|&&p| p >= c).count())
            .collect();
        Partition { parts }
    }

    /// Sign of a permutation with this cycle type: `(-1)^(n - ℓ)`.
    pub fn sign(&self) -> i32 {
        if (self.size() - self.len()).is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// Centralizer order `z_ρ = ∏ i^{m_i} m_i!`.
    pub fn z_factor(&self) -> BigUint {
        let mut z = BigUint::one();
        for (i, &m) in self.multiplicities().iter().enumerate() {
            for k in 1..=m {
                z *= BigUint::from(i + 1) * BigUint::from(k);
            }
        }
        z
    }

    /// Number of permutations with this cycle type, `n!/z_ρ`.
    pub fn class_size(&self) -> BigUint {
        factorial(self.size()) / self.z_factor()
    }

    /// True when the Young diagram of `self` contains that of `other`.
    pub fn contains(&self, other: &Partition) -> bool {
        other.len() <= self.len() && other.parts.iter().zip(&self.parts).all(|(o, s)| o <= s)
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str(")")
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Accepts `"2,1"`, `"(2,1)"`, `"2 1"`, and `""` / `"()"` for the empty
    /// partition. Parts are sorted into canonical order.
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('(').trim_end_matches(')');
        let mut parts = Vec::new();
        for tok in body.split(|c: char| c == ',' || c.is_whitespace()) {
            if tok.is_empty() {
                continue;
            }
            let v: usize = tok
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad partition part {tok:?}")))?;
            if v == 0 {
                return Err(Error::InvalidInput("partition parts must be positive".into()));
            }
            parts.push(v);
        }
        Ok(Partition::from_unsorted(parts))
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

/// All partitions of `n`, in reverse-lexicographic order (`(n)` first).
pub fn enumerate_partitions(n: usize) -> Result<Vec<Partition>> {
    enumerate_partitions_bounded(n, DEFAULT_PARTITION_BOUND)
}

pub fn enumerate_partitions_bounded(n: usize, bound: usize) -> Result<Vec<Partition>> {
    if n > bound {
        return Err(Error::LimitExceeded {
            what: "partition size",
            value: n as u128,
            limit: bound as u128,
        });
    }
    let mut out = Vec::new();
    let mut current = Vec::new();
    fill(n, n, &mut current, &mut out);
    Ok(out)
}

fn fill(remaining: usize, max_part: usize, current: &mut Vec<usize>, out: &mut Vec<Partition>) {
    if remaining == 0 {
        out.push(Partition {
            parts: current.clone(),
        });
        return;
    }
    for p in (1..=remaining.min(max_part)).rev() {
        current.push(p);
        fill(remaining - p, p, current, out);
        current.pop();
    }
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `n! / ∏ k_i!` for `n = Σ k_i`.
pub fn multinomial(ks: &[usize]) -> BigUint {
    let n: usize = ks.iter().sum();
    let denom = ks.iter().fold(BigUint::one(), |acc, &k| acc * factorial(k));
    factorial(n) / denom
}
