//! Homogeneous symmetric functions in Schur coordinates.
//!
//! Products with `h_k`, `e_k` and `p_k` are computed with the Pieri rule,
//! its dual (vertical strips) and the Murnaghan–Nakayama rule respectively.
//! Integration over `U(N)` is the Hall pairing restricted to shapes with at
//! most `N` rows.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::collections::HashMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::partitions::Partition;
use crate::{Error, Result};

/// Default maximum degree for basis expansions.
pub const DEFAULT_DEGREE_BOUND: usize = 16;

/// Integer combination of Schur functions `s_λ`, all with `|λ| = degree`.
#[derive(Clone, PartialEq, Eq)]
pub struct SchurVector {
    degree: usize,
    coeffs: BTreeMap<Partition, BigInt>,
}

impl SchurVector {
    pub fn zero(degree: usize) -> Self {
        SchurVector {
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    /// `s_∅ = 1`.
    pub fn one() -> Self {
        Self::basis(Partition::empty())
    }

    /// The single Schur function `s_λ`.
    pub fn basis(lambda: Partition) -> Self {
        let mut v = Self::zero(lambda.size());
        v.coeffs.insert(lambda, BigInt::one());
        v
    }

    /// Builds a vector from `(λ, c)` pairs. Zero coefficients are dropped and
    /// repeated shapes are summed.
    pub fn from_terms<I, C>(degree: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Partition, C)>,
        C: Into<BigInt>,
    {
        let mut v = Self::zero(degree);
        for (lambda, c) in terms {
            if lambda.size() != degree {
                return Err(Error::SizeMismatch {
                    left: lambda.size(),
                    right: degree,
                });
            }
            v.add_term(lambda, c.into());
        }
        Ok(v)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficient of `s_λ` (zero when absent).
    pub fn coeff(&self, lambda: &Partition) -> BigInt {
        self.coeffs.get(lambda).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Partition, &BigInt)> {
        self.coeffs.iter()
    }

    /// Number of nonzero coefficients.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    fn add_term(&mut self, lambda: Partition, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.entry(lambda) {
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    /// `self + factor * other`; degrees must agree unless one side is zero.
    pub fn add_scaled(&mut self, other: &SchurVector, factor: &BigInt) -> Result<()> {
        if other.is_zero() || factor.is_zero() {
            return Ok(());
        }
        if self.is_zero() {
            self.degree = other.degree;
        } else if self.degree != other.degree {
            return Err(Error::SizeMismatch {
                left: self.degree,
                right: other.degree,
            });
        }
        for (lambda, c) in &other.coeffs {
            self.add_term(lambda.clone(), c * factor);
        }
        Ok(())
    }

    fn map_shapes<F>(&self, k: usize, step: F) -> SchurVector
    where
        F: Fn(&Partition, &mut dyn FnMut(Partition, i32)),
    {
        let mut out = SchurVector::zero(self.degree + k);
        for (lambda, c) in &self.coeffs {
            step(lambda, &mut |mu, sign| {
                let term = if sign < 0 { -c.clone() } else { c.clone() };
                out.add_term(mu, term);
            });
        }
        out
    }

    /// Product with `h_k` (Pieri rule: add horizontal strips of size `k`).
    pub fn mul_h(&self, k: usize) -> SchurVector {
        self.map_shapes(k, |lambda, emit| {
            for mu in horizontal_strips(lambda, k, None) {
                emit(mu, 1);
            }
        })
    }

    /// Product with `e_k` (dual Pieri rule: add vertical strips of size `k`).
    pub fn mul_e(&self, k: usize) -> SchurVector {
        self.map_shapes(k, |lambda, emit| {
            for mu in vertical_strips(lambda, k) {
                emit(mu, 1);
            }
        })
    }

    /// Product with `p_k` (Murnaghan–Nakayama: add border strips of size `k`
    /// with sign `(-1)^(height)`).
    pub fn mul_p(&self, k: usize) -> SchurVector {
        self.map_shapes(k, |lambda, emit| {
            for (mu, sign) in border_strips(lambda, k) {
                emit(mu, sign);
            }
        })
    }
}

impl fmt::Debug for SchurVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for SchurVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, (lambda, c)) in self.coeffs.iter().rev().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c}·s{lambda}")?;
        }
        Ok(())
    }
}

/// Multiplicative bases whose elements are expanded into Schur functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    /// `e_μ = e_{μ_1} e_{μ_2} ⋯`
    Elementary,
    /// `h_μ = h_{μ_1} h_{μ_2} ⋯`
    Complete,
    /// `p_ρ = p_{ρ_1} p_{ρ_2} ⋯`
    PowerSum,
}

/// Expands `b_μ` in the Schur basis, refusing degrees above `bound`.
pub fn expand(basis: Basis, mu: &Partition, bound: usize) -> Result<SchurVector> {
    if mu.size() > bound {
        return Err(Error::LimitExceeded {
            what: "symmetric function degree",
            value: mu.size() as u128,
            limit: bound as u128,
        });
    }
    let mut acc = SchurVector::one();
    for &k in mu.parts() {
        acc = match basis {
            Basis::Elementary => acc.mul_e(k),
            Basis::Complete => acc.mul_h(k),
            Basis::PowerSum => acc.mul_p(k),
        };
    }
    Ok(acc)
}

/// `e_μ = Σ_λ K_{λ',μ} s_λ`.
pub fn e_to_schur(mu: &Partition) -> Result<SchurVector> {
    expand(Basis::Elementary, mu, DEFAULT_DEGREE_BOUND)
}

/// `h_μ = Σ_λ K_{λ,μ} s_λ`.
pub fn h_to_schur(mu: &Partition) -> Result<SchurVector> {
    expand(Basis::Complete, mu, DEFAULT_DEGREE_BOUND)
}

/// `p_ρ = Σ_λ χ^λ(ρ) s_λ`.
pub fn p_to_schur(rho: &Partition) -> Result<SchurVector> {
    expand(Basis::PowerSum, rho, DEFAULT_DEGREE_BOUND)
}

/// Relabels `s_λ ↦ s_{λ'}`.
pub fn omega(f: &SchurVector) -> SchurVector {
    SchurVector {
        degree: f.degree,
        coeffs: f.coeffs.iter().map(|(l, c)| (l.conjugate(), c.clone())).collect(),
    }
}

/// `Σ_{λ, ℓ(λ) ≤ n_vars} f_λ g_λ`, or zero when the degrees differ.
///
/// This is `∫_{U(N)} f · conj(g) dU` for `N = n_vars`.
pub fn hall_pairing_truncated(f: &SchurVector, g: &SchurVector, n_vars: usize) -> BigInt {
    if f.degree != g.degree {
        return BigInt::zero();
    }
    let (small, large) = if f.len() <= g.len() { (f, g) } else { (g, f) };
    small
        .coeffs
        .iter()
        .filter(|(lambda, _)| lambda.len() <= n_vars)
        .filter_map(|(lambda, c)| large.coeffs.get(lambda).map(|d| c * d))
        .sum()
}

/// Number of semistandard tableaux of shape `λ` and content `μ`.
///
/// Counts chains `∅ = ν⁰ ⊂ ν¹ ⊂ ⋯ ⊂ λ` in which each `ν^i / ν^{i-1}` is a
/// horizontal strip of size `μ_i` (the cells holding entry `i`).
pub fn kostka(lambda: &Partition, mu: &Partition) -> Result<BigUint> {
    if lambda.size() != mu.size() {
        return Err(Error::SizeMismatch {
            left: lambda.size(),
            right: mu.size(),
        });
    }
    if mu.len() < lambda.len() {
        return Ok(BigUint::zero());
    }
    let mut layer: HashMap<Partition, BigUint> = HashMap::new();
    layer.insert(Partition::empty(), BigUint::one());
    for &k in mu.parts() {
        let mut next: HashMap<Partition, BigUint> = HashMap::new();
        for (nu, count) in &layer {
            for grown in horizontal_strips(nu, k, Some(lambda)) {
                *next.entry(grown).or_default() += count;
            }
        }
        layer = next;
    }
    Ok(layer.remove(lambda).unwrap_or_default())
}

/// Shapes `μ ⊇ λ` with `μ/λ` a horizontal strip of `k` cells, optionally
/// confined inside `cap`.
fn horizontal_strips(lambda: &Partition, k: usize, cap: Option<&Partition>) -> Vec<Partition> {
    let rows = lambda.len() + 1;
    let mut out = Vec::new();
    let mut shape: Vec<usize> = (0..rows).map(|i| lambda.part(i)).collect();
    grow_horizontal(lambda, cap, 0, k, &mut shape, &mut out);
    out
}

fn grow_horizontal(
    lambda: &Partition,
    cap: Option<&Partition>,
    row: usize,
    left: usize,
    shape: &mut Vec<usize>,
    out: &mut Vec<Partition>,
) {
    if left == 0 {
        out.push(Partition::from_unsorted(shape.clone()));
        return;
    }
    if row == shape.len() {
        return;
    }
    let base = lambda.part(row);
    // A horizontal strip never puts two cells in one column: row i may grow
    // at most up to the old length of row i-1.
    let mut max_add = if row == 0 {
        left
    } else {
        (lambda.part(row - 1) - base).min(left)
    };
    if let Some(cap) = cap {
        max_add = max_add.min(cap.part(row).saturating_sub(base));
    }
    for add in (0..=max_add).rev() {
        shape[row] = base + add;
        grow_horizontal(lambda, cap, row + 1, left - add, shape, out);
    }
    shape[row] = base;
}

/// Shapes `μ ⊇ λ` with `μ/λ` a vertical strip of `k` cells.
fn vertical_strips(lambda: &Partition, k: usize) -> Vec<Partition> {
    let rows = lambda.len() + k;
    let base: Vec<usize> = (0..rows).map(|i| lambda.part(i)).collect();
    let mut out = Vec::new();
    let mut shape = base.clone();
    grow_vertical(&base, 0, k, &mut shape, &mut out);
    out
}

fn grow_vertical(base: &[usize], row: usize, left: usize, shape: &mut Vec<usize>, out: &mut Vec<Partition>) {
    if left == 0 {
        out.push(Partition::from_unsorted(shape.clone()));
        return;
    }
    if row == base.len() || base.len() - row < left {
        return;
    }
    // Add a cell in this row if the result stays a partition.
    if row == 0 || shape[row - 1] > base[row] {
        shape[row] = base[row] + 1;
        grow_vertical(base, row + 1, left - 1, shape, out);
        shape[row] = base[row];
    }
    // Skip this row. Once we are past the old length, skipping would leave a
    // gap, so only rows inside λ may be skipped.
    if base[row] > 0 {
        grow_vertical(base, row + 1, left, shape, out);
    }
}

/// Shapes reachable by adding a border strip of size `k`, with the sign
/// `(-1)^(rows spanned - 1)`. Uses the beta-number (abacus) description:
/// adding a `k`-strip moves one bead from `β` to an empty position `β + k`.
fn border_strips(lambda: &Partition, k: usize) -> Vec<(Partition, i32)> {
    if k == 0 {
        return vec![(lambda.clone(), 1)];
    }
    let len = lambda.len() + k;
    let beta: Vec<usize> = (0..len).map(|i| lambda.part(i) + (len - 1 - i)).collect();
    let mut out = Vec::new();
    for i in 0..len {
        let target = beta[i] + k;
        if beta.contains(&target) {
            continue;
        }
        let jumped = beta.iter().filter(|&&b| b > beta[i] && b < target).count();
        let mut moved = beta.clone();
        moved[i] = target;
        moved.sort_unstable_by(|a, b| b.cmp(a));
        let parts = moved
            .iter()
            .enumerate()
            .map(|(j, &b)| b - (len - 1 - j))
            .collect();
        let sign = if jumped % 2 == 0 { 1 } else { -1 };
        out.push((Partition::from_unsorted(parts), sign));
    }
    out
}
