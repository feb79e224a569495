//! Non-negative integer matrices with prescribed row and column sums.
//!
//! `N_{μ,μ̃}` is computed three ways: direct backtracking, the Kostka sum
//! `Σ_λ K_{λ,μ} K_{λ,μ̃}`, and the `S_n` average of `d_μ d_μ̃`.

use std::collections::HashMap;
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::charmap::{d_lambda_class_function, sn_inner_product};
use crate::partitions::{enumerate_partitions, factorial, multinomial, Partition};
use crate::symfunc::{kostka, DEFAULT_DEGREE_BOUND};
use crate::{par, Error, Limits, Result};

/// Dense row-major matrix of non-negative integers.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MarginMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
}

impl MarginMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<u64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::SizeMismatch {
                left: entries.len(),
                right: rows * cols,
            });
        }
        Ok(MarginMatrix { rows, cols, entries })
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidInput("ragged matrix rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.entries.chunks(self.cols.max(1)).take(self.rows).map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<u64> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j)).sum())
            .collect()
    }

    pub fn transpose(&self) -> MarginMatrix {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j));
            }
        }
        MarginMatrix {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    /// True when the margins are exactly `μ` (rows) and `μ̃` (columns).
    pub fn has_margins(&self, mu: &Partition, mu_t: &Partition) -> bool {
        let as_u64 = |p: &Partition| p.parts().iter().map(|&x| x as u64).collect::<Vec<_>>();
        self.rows == mu.len()
            && self.cols == mu_t.len()
            && self.row_sums() == as_u64(mu)
            && self.col_sums() == as_u64(mu_t)
    }
}

impl fmt::Debug for MarginMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(",")?;
            }
            let row: Vec<u64> = (0..self.cols).map(|j| self.get(i, j)).collect();
            write!(f, "{row:?}")?;
        }
        f.write_str("]")
    }
}

/// All ways to write `total` as `cols.len()` entries bounded by `cols`.
fn row_compositions(total: u64, cols: &[u64]) -> Vec<Vec<u64>> {
    fn go(j: usize, left: u64, cols: &[u64], suffix_cap: &[u64], cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if j == cols.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        // The remaining columns must be able to absorb what is left.
        let lo = left.saturating_sub(suffix_cap[j + 1]);
        let hi = left.min(cols[j]);
        for v in lo..=hi {
            cur.push(v);
            go(j + 1, left - v, cols, suffix_cap, cur, out);
            cur.pop();
        }
    }
    let mut suffix_cap = vec![0u64; cols.len() + 1];
    for j in (0..cols.len()).rev() {
        suffix_cap[j] = suffix_cap[j + 1] + cols[j];
    }
    let mut out = Vec::new();
    if total <= suffix_cap[0] {
        go(0, total, cols, &suffix_cap, &mut Vec::with_capacity(cols.len()), &mut out);
    }
    out
}

struct Counter<'a> {
    rows: &'a [u64],
    memo: HashMap<(usize, Vec<u64>), BigUint>,
    nodes: &'a AtomicU64,
    max_nodes: u64,
}

impl Counter<'_> {
    fn count(&mut self, row: usize, cols: Vec<u64>) -> Result<BigUint> {
        if row == self.rows.len() {
            return Ok(if cols.iter().all(|&c| c == 0) {
                BigUint::one()
            } else {
                BigUint::zero()
            });
        }
        // Column order is irrelevant to the number of completions.
        let mut key_cols = cols.clone();
        key_cols.sort_unstable();
        let key = (row, key_cols);
        if let Some(hit) = self.memo.get(&key) {
            return Ok(hit.clone());
        }
        let choices = row_compositions(self.rows[row], &cols);
        let seen = self.nodes.fetch_add(choices.len() as u64 + 1, Ordering::Relaxed);
        if seen > self.max_nodes {
            return Err(Error::LimitExceeded {
                what: "contingency backtracking nodes",
                value: seen as u128,
                limit: self.max_nodes as u128,
            });
        }
        let mut total = BigUint::zero();
        for choice in choices {
            let rest: Vec<u64> = cols.iter().zip(&choice).map(|(c, v)| c - v).collect();
            total += self.count(row + 1, rest)?;
        }
        self.memo.insert(key, total.clone());
        Ok(total)
    }
}

fn to_u64(p: &Partition) -> Vec<u64> {
    p.parts().iter().map(|&x| x as u64).collect()
}

/// `N_{μ,μ̃}`: number of non-negative integer matrices with row sums `μ` and
/// column sums `μ̃`. Zero when `|μ| ≠ |μ̃|`.
///
/// Rows are filled one at a time, each entry capped by its column's
/// remainder; subproblems are memoised on the sorted column remainders. The
/// first row's choices are distributed across worker threads.
pub fn count_matrices(mu: &Partition, mu_t: &Partition, limits: &Limits) -> Result<BigUint> {
    if mu.size() != mu_t.size() {
        return Ok(BigUint::zero());
    }
    if mu.is_empty() {
        return Ok(BigUint::one());
    }
    let rows = to_u64(mu);
    let cols = to_u64(mu_t);
    let nodes = AtomicU64::new(0);
    let first = row_compositions(rows[0], &cols);
    let partials = par::try_map(&first, |choice| {
        let rest: Vec<u64> = cols.iter().zip(choice).map(|(c, v)| c - v).collect();
        let mut counter = Counter {
            rows: &rows,
            memo: HashMap::new(),
            nodes: &nodes,
            max_nodes: limits.max_nodes,
        };
        counter.count(1, rest)
    })?;
    Ok(partials.into_iter().sum())
}

/// Every matrix counted by [`count_matrices`], in lexicographic order of the
/// row-major entries.
pub fn enumerate_matrices(mu: &Partition, mu_t: &Partition, limits: &Limits) -> Result<Vec<MarginMatrix>> {
    let cells = mu.len() * mu_t.len();
    if cells > limits.max_matrix_cells {
        return Err(Error::LimitExceeded {
            what: "matrix cells",
            value: cells as u128,
            limit: limits.max_matrix_cells as u128,
        });
    }
    if mu.size() != mu_t.size() {
        return Ok(Vec::new());
    }
    let total = count_matrices(mu, mu_t, limits)?;
    let total_u128: u128 = total.try_into().unwrap_or(u128::MAX);
    limits.check_enum("enumerated matrices", total_u128)?;

    let rows = to_u64(mu);
    let cols = to_u64(mu_t);
    let mut out = Vec::new();
    let mut prefix: Vec<u64> = Vec::with_capacity(cells);
    fill_rows(&rows, 0, cols, &mut prefix, &mut out);
    out.sort();
    Ok(out)
}

fn fill_rows(rows: &[u64], row: usize, cols: Vec<u64>, prefix: &mut Vec<u64>, out: &mut Vec<MarginMatrix>) {
    if row == rows.len() {
        if cols.iter().all(|&c| c == 0) {
            out.push(MarginMatrix {
                rows: rows.len(),
                cols: cols.len(),
                entries: prefix.clone(),
            });
        }
        return;
    }
    for choice in row_compositions(rows[row], &cols) {
        let rest: Vec<u64> = cols.iter().zip(&choice).map(|(c, v)| c - v).collect();
        let mark = prefix.len();
        prefix.extend_from_slice(&choice);
        fill_rows(rows, row + 1, rest, prefix, out);
        prefix.truncate(mark);
    }
}

/// `Σ_{λ ⊢ n} K_{λ,μ} K_{λ,μ̃}`.
pub fn count_via_kostka(mu: &Partition, mu_t: &Partition) -> Result<BigUint> {
    if mu.size() != mu_t.size() {
        return Err(Error::SizeMismatch {
            left: mu.size(),
            right: mu_t.size(),
        });
    }
    let n = mu.size();
    if n > DEFAULT_DEGREE_BOUND {
        return Err(Error::LimitExceeded {
            what: "symmetric function degree",
            value: n as u128,
            limit: DEFAULT_DEGREE_BOUND as u128,
        });
    }
    let mut total = BigUint::zero();
    for lambda in enumerate_partitions(n)? {
        let a = kostka(&lambda, mu)?;
        if a.is_zero() {
            continue;
        }
        total += a * kostka(&lambda, mu_t)?;
    }
    Ok(total)
}

/// `(1/n!) Σ_{π ∈ S_n} d_μ(π) d_μ̃(π)`, kept rational. Integrality is a
/// checkable consequence, not an assumption; see [`crate::charmap::require_integer`].
pub fn count_via_sn_average(mu: &Partition, mu_t: &Partition) -> Result<BigRational> {
    if mu.size() != mu_t.size() {
        return Err(Error::SizeMismatch {
            left: mu.size(),
            right: mu_t.size(),
        });
    }
    let d_mu = d_lambda_class_function(mu)?;
    let d_mu_t = d_lambda_class_function(mu_t)?;
    sn_inner_product(&d_mu, &d_mu_t)
}

/// Both sides of the multinomial step relating the `S_n` average to the
/// matrix count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultinomialReport {
    /// `n! · (1/n!) Σ_π d_μ(π) d_μ̃(π)`.
    pub sn_side: BigRational,
    /// `Σ_C (n! / ∏ c_ij!) · ∏ c_ij!` over matrices `C` with margins `(μ, μ̃)`.
    pub matrix_side: BigUint,
    /// `n! · N_{μ,μ̃}` from the direct count.
    pub direct: BigUint,
    pub balanced: bool,
}

/// Largest `n` accepted by [`multinomial_identity_check`].
pub const MULTINOMIAL_CHECK_MAX_N: usize = 8;

/// Evaluates `n!·N = Σ_C multinomial(C)·∏ c_ij!` term by term over the
/// enumerated matrices and compares it with the `S_n` average.
pub fn multinomial_identity_check(mu: &Partition, mu_t: &Partition, limits: &Limits) -> Result<MultinomialReport> {
    let n = mu.size();
    if n > MULTINOMIAL_CHECK_MAX_N {
        return Err(Error::LimitExceeded {
            what: "multinomial check size",
            value: n as u128,
            limit: MULTINOMIAL_CHECK_MAX_N as u128,
        });
    }
    let nf = factorial(n);
    let sn_side = count_via_sn_average(mu, mu_t)? * BigRational::from_integer(BigInt::from(nf.clone()));
    let mut matrix_side = BigUint::zero();
    for c in enumerate_matrices(mu, mu_t, limits)? {
        let cells: Vec<usize> = c.entries().iter().map(|&x| x as usize).collect();
        let perms_fixing_blocks = cells.iter().fold(BigUint::one(), |acc, &x| acc * factorial(x));
        matrix_side += multinomial(&cells) * perms_fixing_blocks;
    }
    let direct = count_matrices(mu, mu_t, limits)? * &nf;
    let balanced = sn_side == BigRational::from_integer(BigInt::from(matrix_side.clone()))
        && matrix_side == direct;
    Ok(MultinomialReport {
        sn_side,
        matrix_side,
        direct,
        balanced,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    fn lim() -> Limits {
        Limits::default()
    }

    fn n(v: u32) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_matrices(&p(&[1, 1]), &p(&[1, 1]), &lim()).unwrap(), n(2));
        assert_eq!(count_matrices(&p(&[2, 2]), &p(&[2, 2]), &lim()).unwrap(), n(3));
        for k in 1..=9 {
            assert_eq!(count_matrices(&p(&[k]), &p(&[k]), &lim()).unwrap(), n(1));
        }
        assert_eq!(count_matrices(&p(&[2, 1]), &p(&[2]), &lim()).unwrap(), n(0));
        assert_eq!(count_matrices(&Partition::empty(), &Partition::empty(), &lim()).unwrap(), n(1));
        // (1^n) x (1^n): permutation matrices.
        assert_eq!(
            count_matrices(&Partition::column(8), &Partition::column(8), &lim()).unwrap(),
            factorial(8)
        );
    }

    #[test]
    fn node_limit() {
        let tight = Limits {
            max_nodes: 10,
            ..Limits::default()
        };
        let err = count_matrices(&Partition::column(8), &Partition::column(8), &tight).unwrap_err();
        assert!(err.is_resource_limit());
    }

    #[test]
    fn enumerate_examples() {
        let perms = enumerate_matrices(&p(&[1, 1]), &p(&[1, 1]), &lim()).unwrap();
        assert_eq!(
            perms,
            vec![
                MarginMatrix::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap(),
                MarginMatrix::from_rows(&[vec![1, 0], vec![0, 1]]).unwrap(),
            ]
        );
        let row = enumerate_matrices(&p(&[2]), &p(&[1, 1]), &lim()).unwrap();
        assert_eq!(row, vec![MarginMatrix::from_rows(&[vec![1, 1]]).unwrap()]);
        assert_eq!(enumerate_matrices(&p(&[2, 1]), &p(&[2, 1]), &lim()).unwrap().len(), 2);
        let small = Limits {
            max_matrix_cells: 3,
            ..Limits::default()
        };
        assert!(enumerate_matrices(&p(&[1, 1]), &p(&[1, 1]), &small).is_err());
    }

    #[test]
    fn kostka_and_average_examples() {
        assert_eq!(count_via_kostka(&p(&[1, 1]), &p(&[1, 1])).unwrap(), n(2));
        assert_eq!(count_via_kostka(&p(&[2]), &p(&[1, 1])).unwrap(), n(1));
        assert_eq!(count_via_kostka(&p(&[5]), &p(&[5])).unwrap(), n(1));
        let int = |v: i64| BigRational::from_integer(BigInt::from(v));
        assert_eq!(count_via_sn_average(&p(&[1, 1]), &p(&[1, 1])).unwrap(), int(2));
        assert_eq!(count_via_sn_average(&p(&[2]), &p(&[1, 1])).unwrap(), int(1));
        assert_eq!(count_via_sn_average(&p(&[3]), &p(&[3])).unwrap(), int(1));
        assert!(count_via_kostka(&p(&[2]), &p(&[1])).is_err());
    }

    #[test]
    fn multinomial_examples() {
        for (a, b) in [(&[1usize, 1][..], &[1usize, 1][..]), (&[2, 1], &[2, 1]), (&[3], &[1, 1, 1])] {
            let report = multinomial_identity_check(&p(a), &p(b), &lim()).unwrap();
            assert!(report.balanced, "{report:?}");
        }
        let r = multinomial_identity_check(&p(&[1, 1]), &p(&[1, 1]), &lim()).unwrap();
        assert_eq!(r.matrix_side, n(4));
        assert!(multinomial_identity_check(&Partition::column(9), &Partition::column(9), &lim()).is_err());
    }

    #[test]
    fn transpose_is_a_bijection() {
        let mu = p(&[3, 2, 1]);
        let mu_t = p(&[4, 2]);
        let forward = enumerate_matrices(&mu, &mu_t, &lim()).unwrap();
        let mut back: Vec<_> = enumerate_matrices(&mu_t, &mu, &lim())
            .unwrap()
            .iter()
            .map(MarginMatrix::transpose)
            .collect();
        back.sort();
        assert_eq!(forward, back);
        assert!(forward.iter().all(|m| m.has_margins(&mu, &mu_t)));
    }
}
