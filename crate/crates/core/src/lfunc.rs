//! Dirichlet characters modulo `Q ∈ F_q[T]`, their character sums and
//! L-functions, exact character moments, checks on the unitarized
//! Frobenius `Θ_χ`, and the integer counts `M_k(x)`.
//!
//! Character values are roots of unity stored as exponents modulo the group
//! exponent `E`. Sums of them live in `Z[C_E]` and are reduced modulo the
//! cyclotomic polynomial `Φ_E` only at the end, so every identity is checked
//! exactly.
//!
//! A character is *odd* when it is nontrivial on the constants `F_q^*`.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::contingency::count_matrices;
use crate::cue::{complete_from_power_sums, elementary_from_roots, power_sums};
use crate::ffield::{factorize, FPoly, FieldSpec, IrreducibleCache};
use crate::partitions::{binomial, Partition};
use crate::{par, Error, Limits, Result};

/// Largest `deg Q` accepted by [`theta_checks`].
pub const MAX_THETA_DEGREE: usize = 10;
/// Sweep budget for the simultaneous root iteration, restarts included.
pub const MAX_ROOT_SWEEPS: usize = 10_000;
pub const ROOT_MODULUS_TOL: f64 = 1e-9;
pub const COEFF_TOL: f64 = 1e-8;

fn prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            out.push(p);
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    num_integer::Integer::gcd(&a, &b)
}

/// The group `(F_q[T]/Q)^*` as a direct product of cyclic groups.
#[derive(Debug)]
pub struct UnitGroup {
    modulus: FPoly,
    /// Residues coprime to `Q`, by increasing index.
    units: Vec<FPoly>,
    position: HashMap<u64, usize>,
    /// `(generator, order)`, orders non-increasing.
    generators: Vec<(FPoly, u64)>,
    /// Exponent vector of each unit against the generators.
    logs: Vec<Vec<u64>>,
    exponent: u64,
}

impl UnitGroup {
    /// Decomposes the unit group by repeatedly taking an element of largest
    /// order modulo the subgroup found so far and correcting it so the new
    /// cyclic factor meets that subgroup trivially.
    pub fn build(modulus: &FPoly, limits: &Limits) -> Result<Self> {
        if modulus.is_zero() || !modulus.is_monic() {
            return Err(Error::NonMonic);
        }
        let field = modulus.field().clone();
        let d = modulus.deg();
        let residues = (field.q() as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
        limits.check_enum("residues modulo Q", residues)?;
        let units: Vec<FPoly> = (0..residues as u64)
            .map(|i| FPoly::from_index(&field, i))
            .filter(|r| r.gcd(modulus).is_one() || modulus.is_one())
            .collect();
        let phi = units.len() as u64;
        if phi > limits.max_phi {
            return Err(Error::LimitExceeded {
                what: "unit group order",
                value: phi as u128,
                limit: limits.max_phi as u128,
            });
        }
        let position: HashMap<u64, usize> = units.iter().enumerate().map(|(i, u)| (u.index(), i)).collect();
        let one = FPoly::one(&field).rem(modulus);
        let mul = |a: &FPoly, b: &FPoly| a.mul_mod(b, modulus);

        // Subgroup generated so far: residue index -> exponent vector.
        let mut sub: HashMap<u64, Vec<u64>> = HashMap::from([(one.index(), Vec::new())]);
        let mut generators: Vec<(FPoly, u64)> = Vec::new();
        while (sub.len() as u64) < phi {
            let quotient = phi / sub.len() as u64;
            let primes = prime_factors(quotient);
            let quotient_order = |g: &FPoly| {
                let mut ord = quotient;
                for &p in &primes {
                    while ord.is_multiple_of(p) && sub.contains_key(&g.pow_mod(ord / p, modulus).index()) {
                        ord /= p;
                    }
                }
                ord
            };
            let (g, m) = units
                .iter()
                .map(|u| (u, quotient_order(u)))
                .fold(None::<(&FPoly, u64)>, |best, (u, o)| match best {
                    Some((_, bo)) if bo >= o => best,
                    _ => Some((u, o)),
                })
                .ok_or_else(|| Error::Numeric("empty unit group".into()))?;
            let t = sub[&g.pow_mod(m, modulus).index()].clone();
            let mut lifted = g.clone();
            for ((h, ord), &ti) in generators.iter().zip(&t) {
                if ti % m != 0 {
                    return Err(Error::Numeric("unit group lift failed".into()));
                }
                lifted = mul(&lifted, &h.pow_mod((ord - ti / m) % ord, modulus));
            }
            let mut grown = HashMap::with_capacity(sub.len() * m as usize);
            for (key, vec) in &sub {
                let mut x = FPoly::from_index(&field, *key);
                for j in 0..m {
                    let mut v = vec.clone();
                    v.push(j);
                    grown.insert(x.index(), v);
                    x = mul(&x, &lifted);
                }
            }
            if grown.len() as u64 != sub.len() as u64 * m {
                return Err(Error::Numeric("unit group factors are not independent".into()));
            }
            sub = grown;
            generators.push((lifted, m));
        }

        let logs: Vec<Vec<u64>> = units
            .iter()
            .map(|u| {
                let mut v = sub[&u.index()].clone();
                v.resize(generators.len(), 0);
                v
            })
            .collect();
        let exponent = generators.iter().fold(1, |acc, (_, o)| acc / gcd_u64(acc, *o) * o);
        Ok(UnitGroup {
            modulus: modulus.clone(),
            units,
            position,
            generators,
            logs,
            exponent,
        })
    }

    pub fn modulus(&self) -> &FPoly {
        &self.modulus
    }

    pub fn field(&self) -> &FieldSpec {
        self.modulus.field()
    }

    pub fn phi(&self) -> u64 {
        self.units.len() as u64
    }

    pub fn units(&self) -> &[FPoly] {
        &self.units
    }

    pub fn generators(&self) -> &[(FPoly, u64)] {
        &self.generators
    }

    /// Least common multiple of the generator orders.
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// Position of `f mod Q` among the units, `None` when not coprime.
    pub fn unit_position(&self, f: &FPoly) -> Option<usize> {
        self.position.get(&f.rem(&self.modulus).index()).copied()
    }

    pub fn log(&self, position: usize) -> &[u64] {
        &self.logs[position]
    }

    /// Rebuilds every unit from its exponent vector and checks that the
    /// orders multiply to `φ(Q)`.
    pub fn validate(&self) -> bool {
        let product: u64 = self.generators.iter().map(|(_, o)| o).product();
        product == self.phi()
            && self.units.iter().zip(&self.logs).all(|(u, v)| {
                let rebuilt = self
                    .generators
                    .iter()
                    .zip(v)
                    .fold(FPoly::one(self.field()).rem(&self.modulus), |acc, ((g, _), &e)| {
                        acc.mul_mod(&g.pow_mod(e, &self.modulus), &self.modulus)
                    });
                rebuilt == *u
            })
    }
}

/// A Dirichlet character, given by one exponent per generator.
#[derive(Clone)]
pub struct Character {
    group: Arc<UnitGroup>,
    exps: Vec<u64>,
}

impl fmt::Debug for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Character{:?} mod {}", self.exps, self.group.modulus)
    }
}

impl Character {
    pub fn new(group: &Arc<UnitGroup>, exps: Vec<u64>) -> Result<Self> {
        if exps.len() != group.generators.len() || exps.iter().zip(&group.generators).any(|(e, (_, o))| e >= o) {
            return Err(Error::InvalidInput("exponent vector does not match the unit group".into()));
        }
        Ok(Character {
            group: Arc::clone(group),
            exps,
        })
    }

    pub fn group(&self) -> &Arc<UnitGroup> {
        &self.group
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exps
    }

    /// `χ` at the unit in `position`, as an exponent `j` of `e^{2πij/E}`.
    pub fn value_at(&self, position: usize) -> u64 {
        let e = self.group.exponent;
        self.exps
            .iter()
            .zip(self.group.log(position))
            .zip(&self.group.generators)
            .fold(0u64, |acc, ((&a, &v), (_, ord))| (acc + a * v % ord * (e / ord)) % e)
    }

    /// `χ(f)` as a root-of-unity exponent, `None` when `gcd(f, Q) ≠ 1`.
    pub fn value(&self, f: &FPoly) -> Option<u64> {
        self.group.unit_position(f).map(|p| self.value_at(p))
    }

    pub fn value_complex(&self, f: &FPoly) -> Complex64 {
        match self.value(f) {
            Some(j) => Complex64::from_polar(1.0, TAU * j as f64 / self.group.exponent as f64),
            None => Complex64::zero(),
        }
    }

    pub fn is_principal(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    /// Nontrivial on some constant `c ∈ F_q^*`. This is a convention, chosen
    /// because it makes the L-function of a primitive odd character have
    /// degree exactly `deg Q − 1`.
    pub fn is_odd(&self) -> bool {
        let field = self.group.field();
        self.group.modulus.deg() > 0 && (1..field.q() as u32).any(|c| self.value(&FPoly::constant(field, c)) != Some(0))
    }

    /// For every proper monic divisor `Q'` of `Q` some unit `u ≡ 1 mod Q'`
    /// has `χ(u) ≠ 1`.
    pub fn is_primitive(&self) -> Result<bool> {
        let group = &*self.group;
        for d in proper_divisors(&group.modulus)? {
            let one = FPoly::one(group.field()).rem(&d);
            let induced = group
                .units
                .iter()
                .enumerate()
                .all(|(i, u)| u.rem(&d) != one || self.value_at(i) == 0);
            if induced {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Monic divisors of `Q` other than `Q` itself.
fn proper_divisors(q: &FPoly) -> Result<Vec<FPoly>> {
    let fac = factorize(q)?;
    let mut divisors = vec![FPoly::one(q.field())];
    for (p, e) in fac.factors() {
        let mut next = Vec::new();
        for d in &divisors {
            let mut x = d.clone();
            for _ in 0..=*e {
                next.push(x.clone());
                x = x.mul(p);
            }
        }
        divisors = next;
    }
    divisors.retain(|d| d.deg() < q.deg());
    divisors.sort_by_key(FPoly::sort_key);
    Ok(divisors)
}

/// All `φ(Q)` characters, principal first, in lexicographic exponent order.
pub fn characters(group: &Arc<UnitGroup>) -> Vec<Character> {
    let mut out = vec![Character {
        group: Arc::clone(group),
        exps: vec![0; group.generators.len()],
    }];
    for (slot, (_, ord)) in group.generators.iter().enumerate().rev() {
        let base = std::mem::take(&mut out);
        for chi in base {
            for a in 0..*ord {
                let mut c = chi.clone();
                c.exps[slot] = a;
                out.push(c);
            }
        }
    }
    out.sort_by(|a, b| a.exps.cmp(&b.exps));
    out
}

/// Integer coefficients of the cyclotomic polynomial `Φ_m`, low to high.
/// Results are memoized per process.
pub fn cyclotomic_polynomial(m: u64) -> Arc<Vec<BigInt>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<BigInt>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().expect("cyclotomic cache poisoned").get(&m) {
        return Arc::clone(hit);
    }
    let poly = Arc::new(cyclotomic_uncached(m));
    cache
        .lock()
        .expect("cyclotomic cache poisoned")
        .insert(m, Arc::clone(&poly));
    poly
}

/// `Φ_m = ∏_{d | m} (x^d − 1)^{μ(m/d)}`.
fn cyclotomic_uncached(m: u64) -> Vec<BigInt> {
    let divisors: Vec<u64> = (1..=m).filter(|d| m.is_multiple_of(*d)).collect();
    let mobius = |n: u64| -> i32 {
        let mut n = n;
        let mut sign = 1;
        let mut p = 2;
        while p * p <= n {
            if n.is_multiple_of(p) {
                n /= p;
                if n.is_multiple_of(p) {
                    return 0;
                }
                sign = -sign;
            }
            p += 1;
        }
        if n > 1 {
            -sign
        } else {
            sign
        }
    };
    let mut poly = vec![BigInt::one()];
    let mut divide_by = Vec::new();
    for &d in &divisors {
        match mobius(m / d) {
            1 => {
                // poly *= x^d - 1
                let mut next = vec![BigInt::zero(); poly.len() + d as usize];
                for (i, c) in poly.iter().enumerate() {
                    next[i + d as usize] += c;
                    next[i] -= c;
                }
                poly = next;
            }
            -1 => divide_by.push(d),
            _ => {}
        }
    }
    for d in divide_by {
        // Exact division by x^d - 1: q_i = -a_i + q_{i-d}.
        let d = d as usize;
        let deg = poly.len() - 1 - d;
        let mut quot = vec![BigInt::zero(); deg + 1];
        for i in 0..=deg {
            quot[i] = -&poly[i] + if i >= d { quot[i - d].clone() } else { BigInt::zero() };
        }
        poly = quot;
    }
    poly
}

/// An element of `Z[ζ_E]`, reduced modulo `Φ_E`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cyclotomic {
    order: u64,
    coeffs: Vec<BigInt>,
}

impl Cyclotomic {
    /// Reduces `Σ_j c_j ζ^j` (any length; indices taken mod `order`).
    pub fn from_group_ring(order: u64, ring: &[i128]) -> Self {
        let mut folded = vec![BigInt::zero(); order as usize];
        for (j, c) in ring.iter().enumerate() {
            if *c != 0 {
                folded[j % order as usize] += BigInt::from(*c);
            }
        }
        let phi_poly = cyclotomic_polynomial(order);
        let top = phi_poly.len() - 1;
        // Φ is monic: subtract multiples of it from the top down.
        for k in (top..folded.len()).rev() {
            let c = std::mem::take(&mut folded[k]);
            if c.is_zero() {
                continue;
            }
            for (i, p) in phi_poly.iter().enumerate().take(top) {
                folded[k - top + i] -= &c * p;
            }
        }
        folded.truncate(top);
        while folded.last().is_some_and(Zero::is_zero) {
            folded.pop();
        }
        Cyclotomic { order, coeffs: folded }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Coefficients on `1, ζ, …, ζ^{φ(E)−1}`.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The value when it is a rational integer.
    pub fn as_integer(&self) -> Option<BigInt> {
        match self.coeffs.len() {
            0 => Some(BigInt::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| Complex64::from_polar(c.to_f64().unwrap_or(f64::NAN), TAU * j as f64 / self.order as f64))
            .sum()
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first && c.is_positive() {
                f.write_str("+")?;
            }
            first = false;
            match j {
                0 => write!(f, "{c}")?,
                _ => write!(f, "{c}z{j}")?,
            }
        }
        write!(f, " (z=e^(2pi i/{}))", self.order)
    }
}

/// Weighting applied to each `f` in a character sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Twist {
    None,
    Moebius,
}

impl fmt::Display for Twist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Twist::None => "none",
            Twist::Moebius => "moebius",
        })
    }
}

impl FromStr for Twist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Twist::None),
            "moebius" | "mobius" => Ok(Twist::Moebius),
            _ => Err(Error::InvalidInput(format!("unknown twist {s:?}"))),
        }
    }
}

/// Restriction on the entries of a counted tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constraint {
    None,
    Squarefree,
}

impl From<Twist> for Constraint {
    fn from(t: Twist) -> Self {
        match t {
            Twist::None => Constraint::None,
            Twist::Moebius => Constraint::Squarefree,
        }
    }
}

/// `Σ_{f ∈ M_{n,q}, gcd(f,Q)=1} w(f)` bucketed by unit position, where `w`
/// is 1 or `μ(f)`.
fn residue_weights(group: &UnitGroup, n: usize, twist: Twist, limits: &Limits) -> Result<Vec<i64>> {
    let field = group.field();
    let q = field.q();
    let total = (q as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    limits.check_enum("monic polynomial enumeration", total)?;
    let total = total as u64;
    let cache = match twist {
        Twist::Moebius => Some(IrreducibleCache::build(field, n / 2)),
        Twist::None => None,
    };
    let blocks = if n == 0 { 1 } else { q };
    let per_block = total / blocks;
    let partials = par::map_range(blocks as usize, |b| -> Result<Vec<i64>> {
        let mut w = vec![0i64; group.units.len()];
        for i in (b as u64 * per_block)..((b as u64 + 1) * per_block) {
            let f = FPoly::monic_from_index(field, n, i);
            let Some(pos) = group.unit_position(&f) else {
                continue;
            };
            let weight = match &cache {
                Some(c) => c.factorize(&f)?.moebius() as i64,
                None => 1,
            };
            w[pos] += weight;
        }
        Ok(w)
    });
    let mut weights = vec![0i64; group.units.len()];
    for part in partials {
        for (acc, x) in weights.iter_mut().zip(part?) {
            *acc += x;
        }
    }
    Ok(weights)
}

fn char_sum_ring(chi: &Character, weights: &[i64]) -> Vec<i128> {
    let mut ring = vec![0i128; chi.group.exponent as usize];
    for (pos, &w) in weights.iter().enumerate() {
        if w != 0 {
            ring[chi.value_at(pos) as usize] += w as i128;
        }
    }
    ring
}

/// `Σ_{f ∈ M_{n,q}} χ(f)`, exactly.
pub fn char_sum(chi: &Character, n: usize, limits: &Limits) -> Result<Cyclotomic> {
    twisted_char_sum(chi, n, Twist::None, limits)
}

/// `Σ_{f ∈ M_{n,q}} w(f) χ(f)` with `w` given by `twist`.
pub fn twisted_char_sum(chi: &Character, n: usize, twist: Twist, limits: &Limits) -> Result<Cyclotomic> {
    let weights = residue_weights(&chi.group, n, twist, limits)?;
    Ok(Cyclotomic::from_group_ring(chi.group.exponent, &char_sum_ring(chi, &weights)))
}

/// Coefficients `char_sum(χ, n)` for `0 ≤ n < deg Q`. For the principal
/// character the true L-function is not a polynomial of this length, which
/// `principal` records.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LCoefficients {
    pub coeffs: Vec<Cyclotomic>,
    pub principal: bool,
}

pub fn lfunction_coeffs(chi: &Character, limits: &Limits) -> Result<LCoefficients> {
    let coeffs = (0..chi.group.modulus.deg())
        .map(|n| char_sum(chi, n, limits))
        .collect::<Result<Vec<_>>>()?;
    Ok(LCoefficients {
        coeffs,
        principal: chi.is_principal(),
    })
}

fn ring_mul(a: &[i128], b: &[i128]) -> Vec<i128> {
    let e = a.len();
    let mut out = vec![0i128; e];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if y != 0 {
                out[(i + j) % e] += x * y;
            }
        }
    }
    out
}

fn ring_conj(a: &[i128]) -> Vec<i128> {
    let e = a.len();
    (0..e).map(|j| a[(e - j) % e]).collect()
}

/// `(1/φ(Q)) Σ_χ |Σ_{f ∈ M_{n,q}} w(f) χ(f)|^{2k}` as an exact rational.
pub fn char_moment(modulus: &FPoly, n: usize, k: u32, twist: Twist, limits: &Limits) -> Result<BigRational> {
    let group = Arc::new(UnitGroup::build(modulus, limits)?);
    char_moment_in(&group, n, k, twist, limits)
}

/// [`char_moment`] for a prebuilt unit group.
pub fn char_moment_in(group: &Arc<UnitGroup>, n: usize, k: u32, twist: Twist, limits: &Limits) -> Result<BigRational> {
    let weights = residue_weights(group, n, twist, limits)?;
    // |S| ≤ Σ|w|, so every group-ring coefficient below is at most
    // φ·(Σ|w|)^{2k}; refuse anything that could leave i128.
    let l1: u128 = weights.iter().map(|w| w.unsigned_abs() as u128).sum();
    let limit = i128::MAX as u128 / 2;
    let bound = l1
        .checked_pow(2 * k)
        .and_then(|b| b.checked_mul(group.phi() as u128))
        .unwrap_or(u128::MAX);
    if bound >= limit {
        return Err(Error::LimitExceeded {
            what: "character moment magnitude",
            value: bound,
            limit,
        });
    }
    let chars = characters(group);
    let e = group.exponent as usize;
    let per_char = par::map(&chars, |chi| {
        let s = char_sum_ring(chi, &weights);
        let abs2 = ring_mul(&s, &ring_conj(&s));
        let mut acc = vec![0i128; e];
        acc[0] = 1;
        for _ in 0..k {
            acc = ring_mul(&acc, &abs2);
        }
        acc
    });
    let mut total = vec![0i128; e];
    for ring in per_char {
        for (t, x) in total.iter_mut().zip(ring) {
            *t += x;
        }
    }
    let reduced = Cyclotomic::from_group_ring(group.exponent, &total);
    let value = reduced
        .as_integer()
        .ok_or_else(|| Error::Numeric("character moment is not rational".into()))?;
    Ok(BigRational::new(value, BigInt::from(group.phi())))
}

/// Monic polynomials of degree `n` coprime to `Q` (and squarefree when
/// asked).
fn admissible(modulus: &FPoly, n: usize, constraint: Constraint, limits: &Limits) -> Result<Vec<FPoly>> {
    let field = modulus.field();
    let total = (field.q() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    limits.check_enum("monic polynomial enumeration", total)?;
    let cache = match constraint {
        Constraint::Squarefree => Some(IrreducibleCache::build(field, n / 2)),
        Constraint::None => None,
    };
    let mut out = Vec::new();
    for i in 0..total as u64 {
        let f = FPoly::monic_from_index(field, n, i);
        if !f.gcd(modulus).is_one() {
            continue;
        }
        if let Some(c) = &cache {
            if !c.factorize(&f)?.is_squarefree() {
                continue;
            }
        }
        out.push(f);
    }
    Ok(out)
}

fn tuple_product_histogram<K, F>(items: &[K], k: u32, unit: K, mul: F) -> HashMap<K, u64>
where
    K: std::hash::Hash + Eq + Clone,
    F: Fn(&K, &K) -> K,
{
    let mut hist = HashMap::from([(unit, 1u64)]);
    for _ in 0..k {
        let mut next = HashMap::with_capacity(hist.len() * 2);
        for (p, c) in &hist {
            for x in items {
                *next.entry(mul(p, x)).or_insert(0) += c;
            }
        }
        hist = next;
    }
    hist
}

fn sum_of_squares(hist: HashMap<impl std::hash::Hash + Eq, u64>) -> BigUint {
    hist.into_values().map(|c| BigUint::from(c) * BigUint::from(c)).sum()
}

/// `#{(f_1..f_k, g_1..g_k) : ∏ f_i = ∏ g_i}` with every entry monic of
/// degree `n` and coprime to `Q` (and squarefree when constrained),
/// counted by grouping `k`-tuples by their product.
pub fn solution_count(n: usize, k: u32, modulus: &FPoly, constraint: Constraint, limits: &Limits) -> Result<BigUint> {
    let items = admissible(modulus, n, constraint, limits)?;
    let tuples = (items.len() as u128).checked_pow(k).unwrap_or(u128::MAX);
    if tuples > limits.max_product_tuples as u128 {
        return Err(Error::LimitExceeded {
            what: "product tuples",
            value: tuples,
            limit: limits.max_product_tuples as u128,
        });
    }
    let hist = tuple_product_histogram(&items, k, FPoly::one(modulus.field()), |a, b| a.mul(b));
    Ok(sum_of_squares(hist))
}

/// `M_k(x) = #{n_1⋯n_k = m_1⋯m_k : n_i, m_i ≤ x}`, optionally with all
/// entries squarefree.
pub fn integer_mk(x: u64, k: u32, constraint: Constraint, limits: &Limits) -> Result<BigUint> {
    let tuples = (x as u128).checked_pow(k).unwrap_or(u128::MAX);
    if tuples > limits.max_product_tuples as u128 {
        return Err(Error::LimitExceeded {
            what: "product tuples",
            value: tuples,
            limit: limits.max_product_tuples as u128,
        });
    }
    let squarefree = |m: u64| (2..).take_while(|d| d * d <= m).all(|d| !m.is_multiple_of(d * d));
    let items: Vec<u128> = (1..=x)
        .filter(|&m| constraint == Constraint::None || squarefree(m))
        .map(u128::from)
        .collect();
    let hist = tuple_product_histogram(&items, k, 1u128, |a, b| a * b);
    Ok(sum_of_squares(hist))
}

/// Result of [`theta_checks`] for one character.
#[derive(Debug, Clone)]
pub struct ThetaReport {
    pub q: u64,
    /// `deg Q − 1`.
    pub expected_degree: usize,
    /// Leading L-coefficient is exactly nonzero.
    pub degree_ok: bool,
    pub roots: Vec<Complex64>,
    /// `max ||u| − q^{−1/2}|` over the roots.
    pub max_modulus_error: f64,
    /// `max |Sc_n(Θ) − (−1)^n q^{−n/2} c_n|`.
    pub max_sc_error: f64,
    /// `max |Tr Sym^n(Θ) − q^{−n/2} [u^n](1/L)|`.
    pub max_trsym_error: f64,
    /// `max |c_n| − binom(deg Q − 1, n) q^{n/2}`, nonpositive when the
    /// Weil bound holds.
    pub max_weil_excess: f64,
}

impl ThetaReport {
    pub fn passes(&self) -> bool {
        self.degree_ok
            && self.roots.len() == self.expected_degree
            && self.max_modulus_error <= ROOT_MODULUS_TOL
            && self.max_sc_error <= COEFF_TOL
            && self.max_trsym_error <= COEFF_TOL
            && self.max_weil_excess <= COEFF_TOL
    }
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::zero(), |acc, &c| acc * z + c)
}

/// All roots of `Σ c_i z^i` (nonzero leading coefficient) by simultaneous
/// iteration, finished with Newton steps. Restarts from perturbed starting
/// points until the sweep budget runs out.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let m = coeffs.len().saturating_sub(1);
    if m == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[m];
    if lead.norm() == 0.0 {
        return Err(Error::Precondition("leading coefficient is zero".into()));
    }
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let deriv: Vec<Complex64> = monic.iter().enumerate().skip(1).map(|(i, c)| c * i as f64).collect();
    let radius = 1.0 + monic[..m].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let scale = |z: Complex64| monic.iter().rev().fold(0.0, |acc, c| acc * z.norm() + c.norm());

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut sweeps = 0;
    let mut start_radius = radius.min(1.0);
    while sweeps < MAX_ROOT_SWEEPS {
        let seed_point = Complex64::new(0.4, 0.9);
        let mut z: Vec<Complex64> = (0..m)
            .map(|i| start_radius * seed_point.powu(i as u32 + 1) / seed_point.norm().powi(i as i32 + 1))
            .collect();
        let budget = (sweeps + 500).min(MAX_ROOT_SWEEPS);
        while sweeps < budget {
            sweeps += 1;
            let mut max_step: f64 = 0.0;
            for i in 0..m {
                let denom: Complex64 = (0..m).filter(|&j| j != i).map(|j| z[i] - z[j]).product();
                if denom.norm() == 0.0 {
                    z[i] += Complex64::new(1e-8, 1e-8);
                    max_step = f64::INFINITY;
                    continue;
                }
                let step = horner(&monic, z[i]) / denom;
                z[i] -= step;
                max_step = max_step.max(step.norm());
            }
            if max_step <= 1e-15 * radius {
                break;
            }
        }
        for zi in z.iter_mut() {
            for _ in 0..3 {
                let d = horner(&deriv, *zi);
                if d.norm() > 0.0 {
                    *zi -= horner(&monic, *zi) / d;
                }
            }
        }
        let converged = z
            .iter()
            .all(|&zi| zi.is_finite() && horner(&monic, zi).norm() <= 1e-12 * scale(zi).max(1.0));
        if converged {
            return Ok(z);
        }
        start_radius = radius * rng.random_range(0.2..1.0);
    }
    Err(Error::Numeric(format!("root iteration did not converge in {MAX_ROOT_SWEEPS} sweeps")))
}

/// Checks on `L(u, χ) = det(I − u√q Θ_χ)` for an odd primitive character:
/// exact degree `deg Q − 1`, all roots on `|u| = q^{−1/2}`, the secular and
/// symmetric-power coefficients of `Θ_χ` against the L-coefficients, and
/// the Weil bound.
pub fn theta_checks(chi: &Character, limits: &Limits) -> Result<ThetaReport> {
    let group = &chi.group;
    let d = group.modulus.deg();
    if d > MAX_THETA_DEGREE {
        return Err(Error::Precondition(format!("deg Q = {d} exceeds {MAX_THETA_DEGREE}")));
    }
    if !chi.is_odd() || !chi.is_primitive()? {
        return Err(Error::Precondition("character must be odd and primitive".into()));
    }
    let q = group.field().q();
    let sq = (q as f64).sqrt();
    let lcoeffs = lfunction_coeffs(chi, limits)?;
    let exact = &lcoeffs.coeffs;
    let degree_ok = exact.last().is_some_and(|c| !c.is_zero());
    let c: Vec<Complex64> = exact.iter().map(Cyclotomic::to_complex).collect();
    let roots = polynomial_roots(&c)?;
    let m = d - 1;

    let target = 1.0 / sq;
    let max_modulus_error = roots.iter().map(|u| (u.norm() - target).abs()).fold(0.0, f64::max);

    // L(u) = ∏ (1 − u √q θ) with θ = 1/(√q u).
    let theta: Vec<Complex64> = roots.iter().map(|u| 1.0 / (sq * u)).collect();
    let sc = elementary_from_roots(&theta);
    let max_sc_error = (0..=m)
        .map(|n| (sc[n] - c[n] * (-1.0f64).powi(n as i32) / sq.powi(n as i32)).norm())
        .fold(0.0, f64::max);

    let n_max = 2 * d + 2;
    let h = complete_from_power_sums(&power_sums(&theta, n_max), n_max);
    // Series 1/L with L(0) = 1.
    let mut inv = vec![Complex64::zero(); n_max + 1];
    inv[0] = Complex64::one() / c[0];
    for n in 1..=n_max {
        let s: Complex64 = (1..=n.min(m)).map(|i| c[i] * inv[n - i]).sum();
        inv[n] = -s / c[0];
    }
    let max_trsym_error = (0..=n_max)
        .map(|n| (h[n] - inv[n] / sq.powi(n as i32)).norm())
        .fold(0.0, f64::max);

    let max_weil_excess = (0..=m)
        .map(|n| {
            let bound = binomial(m, n).to_f64().unwrap_or(f64::INFINITY) * sq.powi(n as i32);
            c[n].norm() - bound
        })
        .fold(f64::NEG_INFINITY, f64::max);

    Ok(ThetaReport {
        q,
        expected_degree: m,
        degree_ok,
        roots,
        max_modulus_error,
        max_sc_error,
        max_trsym_error,
        max_weil_excess,
    })
}

/// Odd primitive characters modulo the group's `Q`.
pub fn odd_primitive_characters(group: &Arc<UnitGroup>) -> Result<Vec<Character>> {
    let mut out = Vec::new();
    for chi in characters(group) {
        if chi.is_odd() && chi.is_primitive()? {
            out.push(chi);
        }
    }
    Ok(out)
}

/// First squarefree monic polynomial of degree `d` in enumeration order.
pub fn first_squarefree_monic(field: &FieldSpec, d: usize, limits: &Limits) -> Result<FPoly> {
    let cache = IrreducibleCache::build(field, d / 2);
    for f in crate::ffield::enumerate_monic(d, field, limits)? {
        if cache.factorize(&f)?.is_squarefree() {
            return Ok(f);
        }
    }
    Err(Error::InvalidInput(format!("no squarefree monic of degree {d}")))
}

/// One line of the large-`q` trend table.
#[derive(Debug, Clone, PartialEq)]
pub struct KatzRow {
    pub q: u64,
    pub modulus: FPoly,
    pub phi: u64,
    pub moment: BigRational,
    pub moebius_moment: BigRational,
    /// `moment / q^{nk}`.
    pub ratio: f64,
    /// `moebius_moment / q^{nk}`.
    pub moebius_ratio: f64,
    /// `N_{(n^k),(n^k)}`.
    pub target: BigUint,
}

/// Normalized character moments (plain and Möbius-twisted) beside the
/// matrix count they are expected to approach as `q` grows. Nothing is
/// asserted. `Q` is the first squarefree monic of degree `d` over each
/// `F_q`.
pub fn katz_trend_report(d: usize, n: usize, k: u32, qs: &[u64], limits: &Limits) -> Result<Vec<KatzRow>> {
    let block = Partition::new(vec![n; k as usize])?;
    let target = count_matrices(&block, &block, limits)?;
    let mut rows = Vec::with_capacity(qs.len());
    for &q in qs {
        let field = FieldSpec::from_order(q)?;
        let modulus = first_squarefree_monic(&field, d, limits)?;
        let group = Arc::new(UnitGroup::build(&modulus, limits)?);
        let moment = char_moment_in(&group, n, k, Twist::None, limits)?;
        let moebius_moment = char_moment_in(&group, n, k, Twist::Moebius, limits)?;
        let norm = BigRational::from_integer(BigInt::from(q).pow(n as u32 * k));
        let ratio = (&moment / &norm).to_f64().unwrap_or(f64::NAN);
        let moebius_ratio = (&moebius_moment / &norm).to_f64().unwrap_or(f64::NAN);
        rows.push(KatzRow {
            q,
            modulus,
            phi: group.phi(),
            moment,
            moebius_moment,
            ratio,
            moebius_ratio,
            target: target.clone(),
        });
    }
    Ok(rows)
}
