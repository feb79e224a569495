//! Arithmetic in `F_q` and `F_q[T]`, factorization, and the divisor
//! correlation sums `Σ_{f ∈ M_{n,q}} d_{μ,q}(f) d_{μ̃,q}(f)`.
//!
//! Field elements are `u32` indices `0..q`. For `q = p^r` with `r > 1` the
//! index is the base-`p` digit vector of a polynomial modulo a fixed
//! irreducible of degree `r`, and products come from precomputed tables.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::charmap::d_lambda_value;
use crate::contingency::{count_matrices, MarginMatrix};
use crate::partitions::Partition;
use crate::{par, Error, Limits, Result};

/// Largest `q` for a non-prime field (size of the multiplication table).
pub const MAX_EXTENSION_ORDER: u32 = 1024;
/// Largest degree accepted by [`factorize`].
pub const MAX_FACTOR_DEGREE: usize = 24;

struct FieldInner {
    p: u32,
    r: u32,
    q: u32,
    /// Coefficients over `F_p`, low to high, monic of degree `r`.
    modulus: Vec<u32>,
    /// `q × q` tables, present only when `r > 1`.
    add: Vec<u32>,
    mul: Vec<u32>,
    inv: Vec<u32>,
}

/// The finite field `F_q`, `q = p^r`. Cheap to clone.
#[derive(Clone)]
pub struct FieldSpec(Arc<FieldInner>);

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.q == other.0.q && self.0.modulus == other.0.modulus)
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.0.q)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `q = p^r` with `p` prime, if it is one.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let mut rest = q;
    let mut r = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        r += 1;
    }
    (rest == 1).then_some((p, r))
}

impl FieldSpec {
    /// The prime field `F_p`.
    pub fn prime(p: u64) -> Result<Self> {
        if !is_prime(p) || p > u32::MAX as u64 {
            return Err(Error::InvalidInput(format!("{p} is not a supported prime")));
        }
        Ok(FieldSpec(Arc::new(FieldInner {
            p: p as u32,
            r: 1,
            q: p as u32,
            modulus: vec![0, 1],
            add: Vec::new(),
            mul: Vec::new(),
            inv: Vec::new(),
        })))
    }

    /// `F_{p^r}` with the first monic irreducible of degree `r` over `F_p`
    /// in [`enumerate_monic`] order as its modulus.
    pub fn new(p: u64, r: u32) -> Result<Self> {
        let base = Self::prime(p)?;
        if r == 0 {
            return Err(Error::InvalidInput("extension degree must be >= 1".into()));
        }
        if r == 1 {
            return Ok(base);
        }
        let q = (p as u128).pow(r);
        if q > MAX_EXTENSION_ORDER as u128 {
            return Err(Error::LimitExceeded {
                what: "extension field order",
                value: q,
                limit: MAX_EXTENSION_ORDER as u128,
            });
        }
        let q = q as u32;
        let modulus = (0..q as u64)
            .map(|i| FPoly::monic_from_index(&base, r as usize, i))
            .find(is_irreducible)
            .ok_or_else(|| Error::Numeric("no irreducible modulus found".into()))?;

        let digits = |x: u32| -> Vec<u32> {
            let mut v = Vec::with_capacity(r as usize);
            let mut x = x;
            for _ in 0..r {
                v.push(x % p as u32);
                x /= p as u32;
            }
            v
        };
        let undigits = |v: &[u32]| -> u32 { v.iter().rev().fold(0, |acc, &d| acc * p as u32 + d) };

        let qs = q as usize;
        let mut add = vec![0u32; qs * qs];
        let mut mul = vec![0u32; qs * qs];
        for a in 0..q {
            let da = digits(a);
            let pa = FPoly::from_coeffs(&base, da.clone()).expect("digits are reduced");
            for b in 0..q {
                let db = digits(b);
                let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p as u32).collect();
                add[a as usize * qs + b as usize] = undigits(&sum);
                let pb = FPoly::from_coeffs(&base, db).expect("digits are reduced");
                let prod = pa.mul(&pb).rem(&modulus);
                let mut c = prod.coeffs;
                c.resize(r as usize, 0);
                mul[a as usize * qs + b as usize] = undigits(&c);
            }
        }
        let mut inv = vec![0u32; qs];
        for a in 1..q {
            inv[a as usize] = (1..q)
                .find(|&b| mul[a as usize * qs + b as usize] == 1)
                .ok_or_else(|| Error::Numeric("modulus is not irreducible".into()))?;
        }
        Ok(FieldSpec(Arc::new(FieldInner {
            p: p as u32,
            r,
            q,
            modulus: modulus.coeffs,
            add,
            mul,
            inv,
        })))
    }

    /// `F_q` for a prime power `q`.
    pub fn from_order(q: u64) -> Result<Self> {
        let (p, r) = prime_power(q).ok_or_else(|| Error::InvalidInput(format!("{q} is not a prime power")))?;
        Self::new(p, r)
    }

    pub fn p(&self) -> u64 {
        self.0.p as u64
    }

    pub fn r(&self) -> u32 {
        self.0.r
    }

    pub fn q(&self) -> u64 {
        self.0.q as u64
    }

    /// Extension modulus over `F_p` (low to high); `T` for prime fields.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    fn is_prime_field(&self) -> bool {
        self.0.r == 1
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.is_prime_field() {
            ((a as u64 + b as u64) % self.0.p as u64) as u32
        } else {
            self.0.add[a as usize * self.0.q as usize + b as usize]
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if self.is_prime_field() {
            if a == 0 {
                0
            } else {
                self.0.p - a
            }
        } else {
            // Additive inverse digit by digit.
            let p = self.0.p;
            let mut x = a;
            let mut out = 0;
            let mut place = 1;
            for _ in 0..self.0.r {
                let d = x % p;
                out += ((p - d) % p) * place;
                place *= p;
                x /= p;
            }
            out
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if self.is_prime_field() {
            ((a as u64 * b as u64) % self.0.p as u64) as u32
        } else {
            self.0.mul[a as usize * self.0.q as usize + b as usize]
        }
    }

    /// Multiplicative inverse; `a` must be nonzero.
    pub fn inv(&self, a: u32) -> u32 {
        debug_assert!(a != 0);
        if self.is_prime_field() {
            // Extended Euclid over i64.
            let (mut t, mut new_t) = (0i64, 1i64);
            let (mut r, mut new_r) = (self.0.p as i64, a as i64);
            while new_r != 0 {
                let quot = r / new_r;
                (t, new_t) = (new_t, t - quot * new_t);
                (r, new_r) = (new_r, r - quot * new_r);
            }
            t.rem_euclid(self.0.p as i64) as u32
        } else {
            self.0.inv[a as usize]
        }
    }

    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

/// Polynomial over `F_q`, coefficients low to high with no trailing zeros.
#[derive(Clone)]
pub struct FPoly {
    field: FieldSpec,
    coeffs: Vec<u32>,
}

impl PartialEq for FPoly {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && self.field == other.field
    }
}

impl Eq for FPoly {}

impl Hash for FPoly {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl FPoly {
    /// Validates coefficients against `q` and trims trailing zeros.
    pub fn from_coeffs(field: &FieldSpec, mut coeffs: Vec<u32>) -> Result<Self> {
        if let Some(&bad) = coeffs.iter().find(|&&c| c as u64 >= field.q()) {
            return Err(Error::InvalidInput(format!("coefficient {bad} not in F_{}", field.q())));
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Ok(FPoly {
            field: field.clone(),
            coeffs,
        })
    }

    pub fn zero(field: &FieldSpec) -> Self {
        FPoly {
            field: field.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn one(field: &FieldSpec) -> Self {
        Self::constant(field, 1)
    }

    pub fn constant(field: &FieldSpec, c: u32) -> Self {
        FPoly::from_coeffs(field, vec![c]).expect("constant must be a field element")
    }

    /// `T`.
    pub fn t(field: &FieldSpec) -> Self {
        FPoly {
            field: field.clone(),
            coeffs: vec![0, 1],
        }
    }

    /// `T - c`.
    pub fn linear(field: &FieldSpec, c: u32) -> Self {
        FPoly {
            field: field.clone(),
            coeffs: vec![field.neg(c), 1],
        }
    }

    /// Monic polynomial of degree `n` whose lower coefficients are the
    /// base-`q` digits of `index` (least significant digit = constant term).
    pub fn monic_from_index(field: &FieldSpec, n: usize, index: u64) -> Self {
        let q = field.q();
        let mut coeffs = Vec::with_capacity(n + 1);
        let mut x = index;
        for _ in 0..n {
            coeffs.push((x % q) as u32);
            x /= q;
        }
        coeffs.push(1);
        FPoly {
            field: field.clone(),
            coeffs,
        }
    }

    /// Base-`q` index of the coefficient vector (inverse of
    /// [`FPoly::monic_from_index`] on the lower coefficients, and the residue
    /// index for polynomials of degree below a modulus).
    pub fn index(&self) -> u64 {
        let q = self.field.q();
        self.coeffs.iter().rev().fold(0u64, |acc, &c| acc * q + c as u64)
    }

    /// Polynomial with base-`q` digit vector `index` (no monic padding).
    pub fn from_index(field: &FieldSpec, index: u64) -> Self {
        let q = field.q();
        let mut coeffs = Vec::new();
        let mut x = index;
        while x > 0 {
            coeffs.push((x % q) as u32);
            x /= q;
        }
        FPoly {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with `deg 0 = 0` (callers that know the polynomial is nonzero).
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> u32 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == 1
    }

    pub fn constant_term(&self) -> u32 {
        self.coeffs.first().copied().unwrap_or(0)
    }

    fn trimmed(field: &FieldSpec, mut coeffs: Vec<u32>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        FPoly {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn add(&self, other: &FPoly) -> FPoly {
        let f = &self.field;
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| {
                f.add(
                    self.coeffs.get(i).copied().unwrap_or(0),
                    other.coeffs.get(i).copied().unwrap_or(0),
                )
            })
            .collect();
        Self::trimmed(f, coeffs)
    }

    pub fn sub(&self, other: &FPoly) -> FPoly {
        self.add(&other.scale(self.field.neg(1)))
    }

    pub fn scale(&self, c: u32) -> FPoly {
        let f = &self.field;
        Self::trimmed(f, self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &FPoly) -> FPoly {
        if self.is_zero() || other.is_zero() {
            return FPoly::zero(&self.field);
        }
        let f = &self.field;
        let mut out = vec![0u32; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Self::trimmed(f, out)
    }

    /// Quotient and remainder; `divisor` must be nonzero.
    pub fn div_rem(&self, divisor: &FPoly) -> (FPoly, FPoly) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let f = &self.field;
        let dd = divisor.deg();
        if self.coeffs.len() < divisor.coeffs.len() {
            return (FPoly::zero(f), self.clone());
        }
        let lead_inv = f.inv(divisor.leading());
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u32; rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = f.mul(rem[k + dd], lead_inv);
            quot[k] = c;
            if c == 0 {
                continue;
            }
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = f.sub(rem[k + j], f.mul(c, d));
            }
        }
        rem.truncate(dd);
        (Self::trimmed(f, quot), Self::trimmed(f, rem))
    }

    pub fn rem(&self, divisor: &FPoly) -> FPoly {
        self.div_rem(divisor).1
    }

    /// True when `divisor` divides `self`.
    pub fn divisible_by(&self, divisor: &FPoly) -> bool {
        self.rem(divisor).is_zero()
    }

    /// Scales to leading coefficient 1 (zero stays zero).
    pub fn monic(&self) -> FPoly {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        self.scale(self.field.inv(self.leading()))
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &FPoly) -> FPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn mul_mod(&self, other: &FPoly, modulus: &FPoly) -> FPoly {
        self.mul(other).rem(modulus)
    }

    pub fn pow_mod(&self, mut e: u64, modulus: &FPoly) -> FPoly {
        let mut base = self.rem(modulus);
        let mut acc = FPoly::one(&self.field).rem(modulus);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_mod(&base, modulus);
            }
            base = base.mul_mod(&base, modulus);
            e >>= 1;
        }
        acc
    }

    pub fn pow(&self, e: u32) -> FPoly {
        (0..e).fold(FPoly::one(&self.field), |acc, _| acc.mul(self))
    }

    /// Canonical order: by degree, then by coefficient index.
    pub fn sort_key(&self) -> (usize, u64) {
        (self.coeffs.len(), self.index())
    }
}

impl fmt::Debug for FPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for FPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                f.write_str("+")?;
            }
            first = false;
            match (k, c) {
                (0, c) => write!(f, "{c}")?,
                (1, 1) => f.write_str("T")?,
                (1, c) => write!(f, "{c}T")?,
                (k, 1) => write!(f, "T^{k}")?,
                (k, c) => write!(f, "{c}T^{k}")?,
            }
        }
        Ok(())
    }
}

/// Monic polynomials of a fixed degree, in index order.
pub struct MonicIter {
    field: FieldSpec,
    n: usize,
    next: u64,
    end: u64,
}

impl Iterator for MonicIter {
    type Item = FPoly;

    fn next(&mut self) -> Option<FPoly> {
        if self.next >= self.end {
            return None;
        }
        let f = FPoly::monic_from_index(&self.field, self.n, self.next);
        self.next += 1;
        Some(f)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for MonicIter {}

fn monic_count(field: &FieldSpec, n: usize, limits: &Limits) -> Result<u64> {
    let count = (field.q() as u128)
        .checked_pow(n as u32)
        .unwrap_or(u128::MAX);
    limits.check_enum("monic polynomial enumeration", count)?;
    Ok(count as u64)
}

/// All `q^n` monic polynomials of degree `n`. Order: by the base-`q` number
/// formed by the lower coefficients, constant term least significant.
pub fn enumerate_monic(n: usize, field: &FieldSpec, limits: &Limits) -> Result<MonicIter> {
    let end = monic_count(field, n, limits)?;
    Ok(MonicIter {
        field: field.clone(),
        n,
        next: 0,
        end,
    })
}

/// Irreducibility by trial division with every monic polynomial of degree
/// at most `deg f / 2`. Only used for small degrees.
fn is_irreducible(f: &FPoly) -> bool {
    let n = f.deg();
    if n == 0 {
        return false;
    }
    let q = f.field.q();
    for d in 1..=n / 2 {
        for i in 0..q.pow(d as u32) {
            if f.divisible_by(&FPoly::monic_from_index(&f.field, d, i)) {
                return false;
            }
        }
    }
    true
}

/// `(prime, multiplicity)` pairs, sorted canonically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    factors: Vec<(FPoly, u32)>,
}

impl Factorization {
    pub fn factors(&self) -> &[(FPoly, u32)] {
        &self.factors
    }

    /// Product of the prime powers.
    pub fn product(&self, field: &FieldSpec) -> FPoly {
        self.factors
            .iter()
            .fold(FPoly::one(field), |acc, (p, e)| acc.mul(&p.pow(*e)))
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|(_, e)| *e == 1)
    }

    /// One part of size `deg P` for each prime factor `P`, counted with
    /// multiplicity.
    pub fn cycle_type(&self) -> Partition {
        let mut parts = Vec::new();
        for (p, e) in &self.factors {
            parts.extend(std::iter::repeat_n(p.deg(), *e as usize));
        }
        Partition::from_unsorted(parts)
    }

    /// `μ(f)`: 0 unless squarefree, else `(-1)^{#primes}`.
    pub fn moebius(&self) -> i8 {
        if !self.is_squarefree() {
            0
        } else if self.factors.len().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

/// Monic irreducibles of `F_q[T]` grouped by degree, built once and then
/// shared read-only.
pub struct IrreducibleCache {
    field: FieldSpec,
    by_degree: Vec<Vec<FPoly>>,
}

impl IrreducibleCache {
    /// Irreducibles of every degree `1..=max_degree`. A polynomial of degree
    /// `d` is kept when no cached irreducible of degree `≤ d/2` divides it.
    pub fn build(field: &FieldSpec, max_degree: usize) -> Self {
        let mut by_degree: Vec<Vec<FPoly>> = vec![Vec::new()];
        let q = field.q();
        for d in 1..=max_degree {
            let found = par::map_range(q.pow(d as u32) as usize, |i| {
                let f = FPoly::monic_from_index(field, d, i as u64);
                let composite = by_degree[1..=d / 2]
                    .iter()
                    .flatten()
                    .any(|p| f.divisible_by(p));
                (!composite).then_some(f)
            });
            by_degree.push(found.into_iter().flatten().collect());
        }
        IrreducibleCache {
            field: field.clone(),
            by_degree,
        }
    }

    pub fn max_degree(&self) -> usize {
        self.by_degree.len() - 1
    }

    pub fn of_degree(&self, d: usize) -> &[FPoly] {
        self.by_degree.get(d).map_or(&[], Vec::as_slice)
    }

    /// Trial division by cached primes in degree order; whatever survives
    /// past `deg/2` is itself prime.
    pub fn factorize(&self, f: &FPoly) -> Result<Factorization> {
        if f.is_zero() || !f.is_monic() {
            return Err(Error::NonMonic);
        }
        if f.field != self.field {
            return Err(Error::InvalidInput("polynomial over a different field".into()));
        }
        let n = f.deg();
        if n > 2 * self.max_degree() + 1 {
            return Err(Error::LimitExceeded {
                what: "factorization degree",
                value: n as u128,
                limit: (2 * self.max_degree() + 1) as u128,
            });
        }
        let mut rest = f.clone();
        let mut factors = Vec::new();
        'outer: for d in 1..=self.max_degree() {
            for p in self.of_degree(d) {
                if 2 * d > rest.deg() {
                    break 'outer;
                }
                let mut e = 0;
                loop {
                    let (quot, rem) = rest.div_rem(p);
                    if !rem.is_zero() {
                        break;
                    }
                    rest = quot;
                    e += 1;
                }
                if e > 0 {
                    factors.push((p.clone(), e));
                }
            }
        }
        if rest.deg() > 0 {
            factors.push((rest, 1));
        }
        factors.sort_by_key(|(p, _)| p.sort_key());
        Ok(Factorization { factors })
    }
}

/// Factors a monic polynomial of degree at most [`MAX_FACTOR_DEGREE`].
pub fn factorize(f: &FPoly) -> Result<Factorization> {
    if f.is_zero() || !f.is_monic() {
        return Err(Error::NonMonic);
    }
    if f.deg() > MAX_FACTOR_DEGREE {
        return Err(Error::LimitExceeded {
            what: "factorization degree",
            value: f.deg() as u128,
            limit: MAX_FACTOR_DEGREE as u128,
        });
    }
    IrreducibleCache::build(&f.field, f.deg() / 2).factorize(f)
}

/// Möbius function of a monic polynomial.
pub fn moebius(f: &FPoly) -> Result<i8> {
    Ok(factorize(f)?.moebius())
}

/// `d_{λ,q}(f) = d_λ(π)` for `π` whose cycle type is the degree pattern of
/// the prime factorization of `f` (with multiplicity).
pub fn d_lambda_q(lambda: &Partition, f: &FPoly) -> Result<BigUint> {
    if lambda.size() != f.deg() || f.is_zero() {
        return Err(Error::SizeMismatch {
            left: lambda.size(),
            right: f.deg(),
        });
    }
    d_lambda_value(lambda, &factorize(f)?.cycle_type())
}

/// Number of monic polynomials of degree `n` of each factorization cycle
/// type, by enumeration and trial division.
pub fn cycle_type_census(n: usize, field: &FieldSpec, limits: &Limits) -> Result<HashMap<Partition, u64>> {
    let total = monic_count(field, n, limits)?;
    let cache = IrreducibleCache::build(field, n / 2);
    if n == 0 {
        return Ok(HashMap::from([(Partition::empty(), 1)]));
    }
    // Blocks by the coefficient of T^{n-1}.
    let q = field.q();
    let block = total / q;
    let partials = par::map_range(q as usize, |b| -> Result<HashMap<Partition, u64>> {
        let mut census = HashMap::new();
        for i in (b as u64 * block)..((b as u64 + 1) * block) {
            let f = FPoly::monic_from_index(field, n, i);
            *census.entry(cache.factorize(&f)?.cycle_type()).or_insert(0) += 1;
        }
        Ok(census)
    });
    let mut census = HashMap::new();
    for part in partials {
        for (k, v) in part? {
            *census.entry(k).or_insert(0) += v;
        }
    }
    Ok(census)
}

/// `Σ_{f ∈ M_{n,q}} d_{μ,q}(f) d_{μ̃,q}(f)`.
pub fn divisor_correlation_sum(
    mu: &Partition,
    mu_t: &Partition,
    n: usize,
    field: &FieldSpec,
    limits: &Limits,
) -> Result<BigUint> {
    for p in [mu, mu_t] {
        if p.size() != n {
            return Err(Error::SizeMismatch { left: p.size(), right: n });
        }
    }
    let census = cycle_type_census(n, field, limits)?;
    let mut total = BigUint::zero();
    for (rho, count) in census {
        let a = d_lambda_value(mu, &rho)?;
        if a.is_zero() {
            continue;
        }
        total += a * d_lambda_value(mu_t, &rho)? * BigUint::from(count);
    }
    Ok(total)
}

/// Exact polynomial through `points` (distinct abscissae), coefficients low
/// to high, with trailing zeros stripped.
pub fn interpolate(points: &[(BigRational, BigRational)]) -> Vec<BigRational> {
    let n = points.len();
    // Newton divided differences.
    let xs: Vec<_> = points.iter().map(|(x, _)| x.clone()).collect();
    let mut dd: Vec<_> = points.iter().map(|(_, y)| y.clone()).collect();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - level]);
        }
    }
    // Horner expansion of the Newton form.
    let mut coeffs: Vec<BigRational> = vec![BigRational::zero(); n];
    for i in (0..n).rev() {
        // coeffs = coeffs * (x - xs[i]) + dd[i]
        let mut next = vec![BigRational::zero(); n];
        for k in 0..n {
            if coeffs[k].is_zero() {
                continue;
            }
            if k + 1 < n {
                next[k + 1] += &coeffs[k];
            }
            next[k] -= &coeffs[k] * &xs[i];
        }
        next[0] += &dd[i];
        coeffs = next;
    }
    while coeffs.last().is_some_and(Zero::is_zero) {
        coeffs.pop();
    }
    coeffs
}

pub fn evaluate(coeffs: &[BigRational], x: &BigRational) -> BigRational {
    coeffs
        .iter()
        .rev()
        .fold(BigRational::zero(), |acc, c| acc * x + c)
}

/// Outcome of fitting `q ↦ Σ_f d_{μ,q}(f) d_{μ̃,q}(f)` by a polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolynomialityReport {
    /// `(q, sum)` at each fitting point.
    pub samples: Vec<(u64, BigUint)>,
    /// `(q, sum, value of the fitted polynomial)` at the held-out point.
    pub holdout: (u64, BigUint, BigRational),
    /// Fitted coefficients in `q`, low to high.
    pub coeffs: Vec<BigRational>,
    /// `N_{μ,μ̃}`, the expected leading coefficient.
    pub leading_target: BigUint,
    pub integral: bool,
    pub degree_ok: bool,
    pub leading_ok: bool,
    pub holdout_ok: bool,
}

impl PolynomialityReport {
    pub fn verdict(&self) -> bool {
        self.integral && self.degree_ok && self.leading_ok && self.holdout_ok
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }
}

/// Interpolates the divisor correlation sum at the field sizes `qs` and
/// checks: integer coefficients, degree exactly `n`, leading coefficient
/// `N_{μ,μ̃}`, and an exact match at `holdout`.
pub fn polynomiality_check(
    mu: &Partition,
    mu_t: &Partition,
    n: usize,
    qs: &[u64],
    holdout: u64,
    limits: &Limits,
) -> Result<PolynomialityReport> {
    let mut distinct = qs.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    distinct.retain(|&q| q != holdout);
    if distinct.len() < n + 1 {
        return Err(Error::InsufficientSamples {
            need: n + 1,
            got: distinct.len(),
        });
    }
    let eval = |q: u64| -> Result<BigUint> {
        let field = FieldSpec::from_order(q)?;
        divisor_correlation_sum(mu, mu_t, n, &field, limits)
    };
    let mut samples = Vec::with_capacity(distinct.len());
    for &q in &distinct {
        samples.push((q, eval(q)?));
    }
    let rat = |v: u64| BigRational::from_integer(BigInt::from(v));
    let points: Vec<_> = samples
        .iter()
        .map(|(q, s)| (rat(*q), BigRational::from_integer(BigInt::from(s.clone()))))
        .collect();
    let coeffs = interpolate(&points);
    let held_value = eval(holdout)?;
    let predicted = evaluate(&coeffs, &rat(holdout));
    let leading_target = count_matrices(mu, mu_t, limits)?;

    let integral = coeffs.iter().all(|c| c.is_integer());
    let degree_ok = coeffs.len() == n + 1;
    let leading_ok = coeffs
        .last()
        .is_some_and(|c| *c == BigRational::from_integer(BigInt::from(leading_target.clone())));
    let holdout_ok = predicted == BigRational::from_integer(BigInt::from(held_value.clone()));
    Ok(PolynomialityReport {
        samples,
        holdout: (holdout, held_value, predicted),
        coeffs,
        leading_target,
        integral,
        degree_ok,
        leading_ok,
        holdout_ok,
    })
}

/// `h_{i,j} = gcd(g_i, f_j)`; rows follow `gs`, columns follow `fs`.
pub fn gcd_matrix(fs: &[FPoly], gs: &[FPoly]) -> Result<Vec<Vec<FPoly>>> {
    if fs.iter().chain(gs).any(|p| p.is_zero() || !p.is_monic()) {
        return Err(Error::NonMonic);
    }
    Ok(gs
        .iter()
        .map(|g| fs.iter().map(|f| g.gcd(f)).collect())
        .collect())
}

/// Entrywise degrees of a polynomial matrix.
pub fn degree_matrix(h: &[Vec<FPoly>]) -> Result<MarginMatrix> {
    let rows: Vec<Vec<u64>> = h
        .iter()
        .map(|row| row.iter().map(|p| p.deg() as u64).collect())
        .collect();
    MarginMatrix::from_rows(&rows)
}

/// Minimal interface for the inductive gcd decomposition: a gcd domain with
/// exact division, applied to positive integers or monic polynomials.
pub trait GcdDomain: Clone + PartialEq {
    fn gcd_with(&self, other: &Self) -> Self;
    /// `self / divisor`, where the division is known to be exact.
    fn exact_div(&self, divisor: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn unit_like(&self) -> Self;
    /// Rejects elements the decomposition cannot work with (zero, non-monic).
    fn validate(&self) -> Result<()>;
}

impl GcdDomain for BigUint {
    fn gcd_with(&self, other: &Self) -> Self {
        num_integer::Integer::gcd(self, other)
    }

    fn exact_div(&self, divisor: &Self) -> Self {
        self / divisor
    }

    fn times(&self, other: &Self) -> Self {
        self * other
    }

    fn unit_like(&self) -> Self {
        BigUint::one()
    }

    fn validate(&self) -> Result<()> {
        if self.is_zero() {
            return Err(Error::InvalidInput("zero is not allowed".into()));
        }
        Ok(())
    }
}

impl GcdDomain for FPoly {
    fn gcd_with(&self, other: &Self) -> Self {
        self.gcd(other)
    }

    fn exact_div(&self, divisor: &Self) -> Self {
        self.div_rem(divisor).0
    }

    fn times(&self, other: &Self) -> Self {
        self.mul(other)
    }

    fn unit_like(&self) -> Self {
        FPoly::one(&self.field)
    }

    fn validate(&self) -> Result<()> {
        if self.is_zero() || !self.is_monic() {
            return Err(Error::NonMonic);
        }
        Ok(())
    }
}

fn product<T: GcdDomain>(items: &[T], unit: &T) -> T {
    items.iter().fold(unit.clone(), |acc, x| acc.times(x))
}

/// Matrix `a` with `∏_j a_{i,j} = m_i` and `∏_i a_{i,j} = n_j` for any
/// product-balanced pair of tuples (no coprimality assumed):
/// `a_{i,j} = gcd(m_i / ∏_{l<j} a_{i,l}, n_j / ∏_{l<i} a_{l,j})`.
pub fn vaughan_wooley_decompose<T: GcdDomain>(m: &[T], n: &[T]) -> Result<Vec<Vec<T>>> {
    let Some(any) = m.first().or(n.first()) else {
        return Ok(Vec::new());
    };
    for x in m.iter().chain(n) {
        x.validate()?;
    }
    let unit = any.unit_like();
    if product(m, &unit) != product(n, &unit) {
        return Err(Error::ProductMismatch);
    }
    // Remaining cofactors after dividing out the entries placed so far.
    let mut row_left: Vec<T> = m.to_vec();
    let mut col_left: Vec<T> = n.to_vec();
    let mut a = vec![vec![unit.clone(); n.len()]; m.len()];
    for i in 0..m.len() {
        for j in 0..n.len() {
            let entry = row_left[i].gcd_with(&col_left[j]);
            row_left[i] = row_left[i].exact_div(&entry);
            col_left[j] = col_left[j].exact_div(&entry);
            a[i][j] = entry;
        }
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> FieldSpec {
        FieldSpec::prime(2).unwrap()
    }

    fn poly(field: &FieldSpec, c: &[u32]) -> FPoly {
        FPoly::from_coeffs(field, c.to_vec()).unwrap()
    }

    fn part(p: &[usize]) -> Partition {
        Partition::new(p.to_vec()).unwrap()
    }

    #[test]
    fn field_construction() {
        assert!(FieldSpec::prime(4).is_err());
        assert!(FieldSpec::from_order(6).is_err());
        let f4 = FieldSpec::from_order(4).unwrap();
        assert_eq!((f4.p(), f4.r(), f4.q()), (2, 2, 4));
        assert_eq!(f4.modulus(), &[1, 1, 1]);
        let f8 = FieldSpec::from_order(8).unwrap();
        assert_eq!(f8.modulus(), &[1, 1, 0, 1]);
        let f9 = FieldSpec::from_order(9).unwrap();
        // T^2 + 1 is the first irreducible quadratic over F_3.
        assert_eq!(f9.modulus(), &[1, 0, 1]);
        for field in [f4, f8, f9, FieldSpec::prime(7).unwrap()] {
            for a in 1..field.q() as u32 {
                assert_eq!(field.mul(a, field.inv(a)), 1);
                assert_eq!(field.add(a, field.neg(a)), 0);
                assert_eq!(field.pow(a, field.q() - 1), 1);
            }
        }
        assert_eq!(prime_power(125), Some((5, 3)));
        assert_eq!(prime_power(1), None);
        assert_eq!(prime_power(12), None);
    }

    #[test]
    fn enumerate_examples() {
        let l = Limits::default();
        let lin: Vec<_> = enumerate_monic(1, &f2(), &l).unwrap().collect();
        assert_eq!(lin, vec![poly(&f2(), &[0, 1]), poly(&f2(), &[1, 1])]);
        assert_eq!(enumerate_monic(2, &f2(), &l).unwrap().count(), 4);
        assert_eq!(enumerate_monic(2, &FieldSpec::prime(3).unwrap(), &l).unwrap().count(), 9);
        let tiny = Limits {
            max_enum: 8,
            ..Limits::default()
        };
        assert!(enumerate_monic(4, &f2(), &tiny).is_err());
    }

    #[test]
    fn factorization_examples() {
        let f = f2();
        let t = FPoly::t(&f);
        let t1 = poly(&f, &[1, 1]);
        assert_eq!(factorize(&t.mul(&t)).unwrap().factors(), &[(t.clone(), 2)]);
        assert_eq!(factorize(&poly(&f, &[1, 0, 1])).unwrap().factors(), &[(t1.clone(), 2)]);
        let irr = poly(&f, &[1, 1, 1]);
        assert_eq!(factorize(&irr).unwrap().factors(), &[(irr.clone(), 1)]);
        assert_eq!(factorize(&poly(&f, &[0, 1, 1])).unwrap().factors(), &[(t.clone(), 1), (t1.clone(), 1)]);
        assert_eq!(factorize(&FPoly::zero(&f)).unwrap_err(), Error::NonMonic);
        assert_eq!(factorize(&poly(&FieldSpec::prime(3).unwrap(), &[1, 2])).unwrap_err(), Error::NonMonic);
    }

    #[test]
    fn factorization_remultiplies() {
        let l = Limits::default();
        for field in [f2(), FieldSpec::prime(3).unwrap()] {
            let cache = IrreducibleCache::build(&field, 3);
            for n in 1..=6 {
                for f in enumerate_monic(n, &field, &l).unwrap() {
                    let fac = cache.factorize(&f).unwrap();
                    assert_eq!(fac.product(&field), f);
                    assert!(fac.factors().iter().all(|(p, _)| is_irreducible(p)));
                    assert_eq!(fac.cycle_type().size(), n);
                }
            }
        }
    }

    #[test]
    fn irreducible_counts_match_necklace_formula() {
        // Over F_2: 2, 1, 2, 3, 6, 9, 18, 30 irreducibles of degree 1..=8.
        let cache = IrreducibleCache::build(&f2(), 8);
        let counts: Vec<usize> = (1..=8).map(|d| cache.of_degree(d).len()).collect();
        assert_eq!(counts, vec![2, 1, 2, 3, 6, 9, 18, 30]);
        let f4 = FieldSpec::from_order(4).unwrap();
        let cache = IrreducibleCache::build(&f4, 3);
        assert_eq!(cache.of_degree(2).len(), 6);
        assert_eq!(cache.of_degree(3).len(), 20);
    }

    #[test]
    fn moebius_examples() {
        let f = f2();
        assert_eq!(moebius(&FPoly::t(&f)).unwrap(), -1);
        assert_eq!(moebius(&poly(&f, &[0, 0, 1])).unwrap(), 0);
        assert_eq!(moebius(&poly(&f, &[0, 1, 1])).unwrap(), 1);
        assert_eq!(moebius(&FPoly::one(&f)).unwrap(), 1);
    }

    #[test]
    fn d_lambda_q_examples() {
        let f = f2();
        let t2 = poly(&f, &[0, 0, 1]);
        assert_eq!(d_lambda_q(&part(&[1, 1]), &t2).unwrap(), BigUint::from(2u32));
        // Ordered factorizations of T^2 into two monic linears: only (T, T).
        let literal = enumerate_monic(1, &f, &Limits::default())
            .unwrap()
            .flat_map(|a| enumerate_monic(1, &f, &Limits::default()).unwrap().map(move |b| a.mul(&b)))
            .filter(|p| *p == t2)
            .count();
        assert_eq!(literal, 1);
        let irr = poly(&f, &[1, 1, 1]);
        assert_eq!(d_lambda_q(&part(&[1, 1]), &irr).unwrap(), BigUint::zero());
        assert_eq!(d_lambda_q(&part(&[2]), &irr).unwrap(), BigUint::one());
        assert!(d_lambda_q(&part(&[1]), &irr).is_err());
    }

    #[test]
    fn correlation_sum_examples() {
        let l = Limits::default();
        let mu = part(&[1, 1]);
        assert_eq!(divisor_correlation_sum(&mu, &mu, 2, &f2(), &l).unwrap(), BigUint::from(12u32));
        let f3 = FieldSpec::prime(3).unwrap();
        assert_eq!(divisor_correlation_sum(&mu, &mu, 2, &f3, &l).unwrap(), BigUint::from(24u32));
        assert_eq!(
            divisor_correlation_sum(&part(&[2]), &mu, 2, &f2(), &l).unwrap(),
            BigUint::from(6u32)
        );
        assert!(divisor_correlation_sum(&part(&[2]), &mu, 3, &f2(), &l).is_err());
    }

    #[test]
    fn interpolation_recovers_polynomials() {
        let r = |v: i64| BigRational::from_integer(BigInt::from(v));
        let pts: Vec<_> = [2, 3, 5, 7].iter().map(|&x| (r(x), r(2 * x * x + 2 * x))).collect();
        assert_eq!(interpolate(&pts), vec![r(0), r(2), r(2)]);
        assert_eq!(interpolate(&[(r(1), r(0)), (r(2), r(0))]), Vec::<BigRational>::new());
    }

    #[test]
    fn polynomiality_examples() {
        let l = Limits::default();
        let mu = part(&[1, 1]);
        let rep = polynomiality_check(&mu, &mu, 2, &[2, 3, 5], 7, &l).unwrap();
        let r = |v: i64| BigRational::from_integer(BigInt::from(v));
        assert_eq!(rep.coeffs, vec![r(0), r(2), r(2)]);
        assert!(rep.verdict(), "{rep:?}");
        let two = part(&[2]);
        let rep = polynomiality_check(&two, &two, 2, &[2, 3, 5], 7, &l).unwrap();
        assert_eq!(rep.coeffs.last(), Some(&r(1)));
        assert!(rep.verdict());
        let one = part(&[1]);
        let rep = polynomiality_check(&one, &one, 1, &[2, 3], 5, &l).unwrap();
        assert_eq!(rep.coeffs, vec![r(0), r(1)]);
        assert!(rep.verdict());
        assert!(matches!(
            polynomiality_check(&mu, &mu, 2, &[2], 7, &l),
            Err(Error::InsufficientSamples { need: 3, got: 1 })
        ));
    }

    #[test]
    fn gcd_matrix_examples() {
        let f = f2();
        let t = FPoly::t(&f);
        let t1 = poly(&f, &[1, 1]);
        let one = FPoly::one(&f);
        let h = gcd_matrix(&[t.clone(), t1.clone()], &[t.clone(), t1.clone()]).unwrap();
        assert_eq!(h, vec![vec![t.clone(), one.clone()], vec![one.clone(), t1.clone()]]);
        let deg = degree_matrix(&h).unwrap();
        assert_eq!(deg, MarginMatrix::from_rows(&[vec![1, 0], vec![0, 1]]).unwrap());
        assert!(deg.has_margins(&part(&[1, 1]), &part(&[1, 1])));
        let col = gcd_matrix(&[t.mul(&t1)], &[t.clone(), t1.clone()]).unwrap();
        assert_eq!(col, vec![vec![t.clone()], vec![t1.clone()]]);
        assert_eq!(gcd_matrix(&[poly(&f, &[])], &[t]).unwrap_err(), Error::NonMonic);
    }

    #[test]
    fn vaughan_wooley_examples() {
        let b = |v: u32| BigUint::from(v);
        let a = vaughan_wooley_decompose(&[b(4), b(3)], &[b(6), b(2)]).unwrap();
        assert_eq!(a, vec![vec![b(2), b(2)], vec![b(3), b(1)]]);
        let f = f2();
        let t = FPoly::t(&f);
        let one = FPoly::one(&f);
        let a = vaughan_wooley_decompose(&[t.clone(), t.clone()], &[t.clone(), t.clone()]).unwrap();
        assert_eq!(a, vec![vec![t.clone(), one.clone()], vec![one, t.clone()]]);
        let g = poly(&f, &[1, 0, 1, 1]);
        assert_eq!(vaughan_wooley_decompose(std::slice::from_ref(&g), std::slice::from_ref(&g)).unwrap(), vec![vec![g]]);
        assert_eq!(
            vaughan_wooley_decompose(&[b(4)], &[b(6)]).unwrap_err(),
            Error::ProductMismatch
        );
    }

    #[test]
    fn display_and_index_roundtrip() {
        let f3 = FieldSpec::prime(3).unwrap();
        let p = poly(&f3, &[2, 0, 1, 1]);
        assert_eq!(p.to_string(), "T^3+T^2+2");
        assert_eq!(FPoly::monic_from_index(&f3, 3, p.index() - 27), p);
        assert_eq!(FPoly::from_index(&f3, p.index()), p);
        assert_eq!(FPoly::zero(&f3).to_string(), "0");
    }
}
