//! Independent oracles shared by the integration tests: explicit Laurent
//! polynomials in a fixed number of variables, and brute force over `S_n`.
#![allow(dead_code)]

use std::collections::HashMap;

use cue_lab_core::partitions::enumerate_partitions;
use cue_lab_core::Partition;
use proptest::prelude::*;

/// Sparse Laurent polynomial with integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Laurent {
    pub vars: usize,
    pub terms: HashMap<Vec<i32>, i64>,
}

impl Laurent {
    pub fn constant(vars: usize, c: i64) -> Self {
        let mut terms = HashMap::new();
        if c != 0 {
            terms.insert(vec![0; vars], c);
        }
        Laurent { vars, terms }
    }

    pub fn monomial(exps: Vec<i32>, c: i64) -> Self {
        let vars = exps.len();
        Laurent {
            vars,
            terms: HashMap::from([(exps, c)]),
        }
    }

    pub fn add(&self, other: &Laurent) -> Laurent {
        let mut terms = self.terms.clone();
        for (k, v) in &other.terms {
            *terms.entry(k.clone()).or_insert(0) += v;
        }
        terms.retain(|_, v| *v != 0);
        Laurent { vars: self.vars, terms }
    }

    pub fn mul(&self, other: &Laurent) -> Laurent {
        let mut terms: HashMap<Vec<i32>, i64> = HashMap::new();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let k: Vec<i32> = a.iter().zip(b).map(|(i, j)| i + j).collect();
                *terms.entry(k).or_insert(0) += x * y;
            }
        }
        terms.retain(|_, v| *v != 0);
        Laurent { vars: self.vars, terms }
    }

    /// `f(1/x)`.
    pub fn invert(&self) -> Laurent {
        Laurent {
            vars: self.vars,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.iter().map(|e| -e).collect(), *v))
                .collect(),
        }
    }

    pub fn coeff(&self, exps: &[i32]) -> i64 {
        self.terms.get(exps).copied().unwrap_or(0)
    }
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<i32>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first as i32);
            out.push(rest);
        }
    }
    out
}

/// `h_k(x_1..x_m)`.
pub fn complete(k: usize, m: usize) -> Laurent {
    let mut f = Laurent::constant(m, 0);
    for c in compositions(k, m) {
        f = f.add(&Laurent::monomial(c, 1));
    }
    f
}

/// `e_k(x_1..x_m)`.
pub fn elementary(k: usize, m: usize) -> Laurent {
    let mut f = Laurent::constant(m, 0);
    for c in compositions(k, m) {
        if c.iter().all(|&e| e <= 1) {
            f = f.add(&Laurent::monomial(c, 1));
        }
    }
    f
}

/// `p_k(x_1..x_m)`.
pub fn power(k: usize, m: usize) -> Laurent {
    let mut f = Laurent::constant(m, 0);
    for i in 0..m {
        let mut e = vec![0; m];
        e[i] = k as i32;
        f = f.add(&Laurent::monomial(e, 1));
    }
    f
}

pub fn product_over(parts: &Partition, m: usize, gen: fn(usize, usize) -> Laurent) -> Laurent {
    parts
        .parts()
        .iter()
        .fold(Laurent::constant(m, 1), |acc, &k| acc.mul(&gen(k, m)))
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

pub fn perm_sign(p: &[usize]) -> i64 {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Vandermonde `a_δ` in `m` variables, `δ = (m−1, …, 0)`.
pub fn vandermonde(m: usize) -> Laurent {
    let mut f = Laurent::constant(m, 0);
    for p in permutations(m) {
        let exps: Vec<i32> = p.iter().map(|&i| (m - 1 - i) as i32).collect();
        f = f.add(&Laurent::monomial(exps, perm_sign(&p)));
    }
    f
}

/// Coefficient of `s_λ` in a symmetric polynomial `f` of `m` variables:
/// the coefficient of `x^{λ+δ}` in `f · a_δ`. Valid for `ℓ(λ) ≤ m`.
pub fn schur_coeff(f_times_vandermonde: &Laurent, lambda: &Partition, m: usize) -> i64 {
    let exps: Vec<i32> = (0..m).map(|i| (lambda.part(i) + m - 1 - i) as i32).collect();
    f_times_vandermonde.coeff(&exps)
}

/// `∫_{U(N)} f(U) conj(g(U)) dU` for symmetric polynomials with integer
/// coefficients, by Weyl integration: the constant term of
/// `f(x) g(1/x) ∏_{i≠j} (1 − x_i/x_j)` divided by `N!`.
pub fn weyl_integral(f: &Laurent, g: &Laurent, n: usize) -> i64 {
    let mut density = Laurent::constant(n, 1);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let mut e = vec![0; n];
                e[i] = 1;
                e[j] = -1;
                density = density.mul(&Laurent::constant(n, 1).add(&Laurent::monomial(e, -1)));
            }
        }
    }
    let ct = f.mul(&g.invert()).mul(&density).coeff(&vec![0; n]);
    let fact: i64 = (1..=n as i64).product();
    assert_eq!(ct % fact, 0, "constant term not divisible by N!");
    ct / fact
}

/// A permutation of `[0, n)` with cycle type `rho` (cycles laid out
/// consecutively).
pub fn permutation_of_type(rho: &Partition) -> Vec<usize> {
    let mut p = Vec::with_capacity(rho.size());
    let mut start = 0;
    for &len in rho.parts() {
        for i in 0..len {
            p.push(start + (i + 1) % len);
        }
        start += len;
    }
    p
}

/// `d_λ(π)` by brute force: label each point with a block index and keep
/// labellings that are `π`-invariant with block sizes `λ`.
pub fn d_lambda_brute(lambda: &Partition, perm: &[usize]) -> u64 {
    let n = perm.len();
    let l = lambda.len();
    if lambda.size() != n {
        return 0;
    }
    if n == 0 {
        return 1;
    }
    let mut label = vec![0usize; n];
    let mut count = 0;
    loop {
        let invariant = (0..n).all(|i| label[perm[i]] == label[i]);
        if invariant {
            let mut sizes = vec![0usize; l];
            for &b in &label {
                sizes[b] += 1;
            }
            if sizes == lambda.parts() {
                count += 1;
            }
        }
        // Next labelling in base l.
        let mut i = 0;
        loop {
            if i == n {
                return count;
            }
            label[i] += 1;
            if label[i] < l {
                break;
            }
            label[i] = 0;
            i += 1;
        }
    }
}

pub fn partition_strategy(max_n: usize) -> impl Strategy<Value = Partition> {
    (0..=max_n).prop_flat_map(|n| proptest::sample::select(enumerate_partitions(n).unwrap()))
}

/// Two partitions of a common size `n ≤ max_n`.
pub fn same_size_pair(max_n: usize) -> impl Strategy<Value = (Partition, Partition)> {
    (0..=max_n).prop_flat_map(|n| {
        let parts = enumerate_partitions(n).unwrap();
        (proptest::sample::select(parts.clone()), proptest::sample::select(parts))
    })
}
