//! Class functions on `S_n`, the invariant-set counts `d_λ`, and the
//! characteristic map into symmetric functions.
//!
//! Class functions are stored by cycle type; nothing here enumerates
//! permutations.

use std::collections::BTreeMap;
use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::partitions::{enumerate_partitions, factorial, Partition};
use crate::symfunc::{p_to_schur, SchurVector};
use crate::{Error, Result};

/// Rational-valued function on the cycle types of `S_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassFunction {
    n: usize,
    values: BTreeMap<Partition, BigRational>,
}

impl ClassFunction {
    pub fn zero(n: usize) -> Self {
        ClassFunction {
            n,
            values: BTreeMap::new(),
        }
    }

    /// Builds a class function from `(ρ, value)` pairs; zero values are
    /// dropped.
    pub fn from_values<I>(n: usize, values: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Partition, BigRational)>,
    {
        let mut f = Self::zero(n);
        for (rho, v) in values {
            if rho.size() != n {
                return Err(Error::SizeMismatch {
                    left: rho.size(),
                    right: n,
                });
            }
            if !v.is_zero() {
                f.values.insert(rho, v);
            }
        }
        Ok(f)
    }

    /// The constant function `c` on `S_n`.
    pub fn constant(n: usize, c: BigRational) -> Result<Self> {
        let classes = enumerate_partitions(n)?;
        Self::from_values(n, classes.into_iter().map(|rho| (rho, c.clone())))
    }

    /// The sign character `ρ ↦ (-1)^(n - ℓ(ρ))`.
    pub fn sign(n: usize) -> Result<Self> {
        let classes = enumerate_partitions(n)?;
        Self::from_values(
            n,
            classes
                .into_iter()
                .map(|rho| (rho.clone(), BigRational::from_integer(rho.sign().into()))),
        )
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn value(&self, rho: &Partition) -> BigRational {
        self.values.get(rho).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Partition, &BigRational)> {
        self.values.iter()
    }

    /// Pointwise product.
    pub fn mul(&self, other: &ClassFunction) -> Result<ClassFunction> {
        check_degree(self.n, other.n)?;
        let values = self
            .values
            .iter()
            .filter_map(|(rho, v)| other.values.get(rho).map(|w| (rho.clone(), v * w)));
        Self::from_values(self.n, values)
    }
}

fn check_degree(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::SizeMismatch { left: a, right: b });
    }
    Ok(())
}

/// `d_λ(π)` for any `π` of cycle type `ρ`: the number of ordered tuples of
/// disjoint `π`-invariant sets `(A_1, …, A_ℓ)` covering `[n]` with
/// `|A_i| = λ_i`.
///
/// An invariant set is a union of cycles, so this distributes the cycles of
/// `ρ` into `ℓ(λ)` labelled blocks of exact sizes. Cycles of equal length are
/// distinct objects, hence the multinomial weight per length.
pub fn d_lambda_value(lambda: &Partition, rho: &Partition) -> Result<BigUint> {
    check_degree(lambda.size(), rho.size())?;
    let lengths: Vec<(usize, usize)> = rho
        .multiplicities()
        .iter()
        .enumerate()
        .filter(|(_, &m)| m > 0)
        .map(|(i, &m)| (i + 1, m))
        .collect();
    let mut memo = HashMap::new();
    Ok(assign_cycles(&lengths, 0, lambda.parts().to_vec(), &mut memo))
}

fn assign_cycles(
    lengths: &[(usize, usize)],
    idx: usize,
    capacities: Vec<usize>,
    memo: &mut HashMap<(usize, Vec<usize>), BigUint>,
) -> BigUint {
    if idx == lengths.len() {
        return if capacities.iter().all(|&c| c == 0) {
            BigUint::one()
        } else {
            BigUint::zero()
        };
    }
    // The count only depends on the multiset of remaining capacities.
    let mut key_caps = capacities.clone();
    key_caps.sort_unstable();
    let key = (idx, key_caps);
    if let Some(hit) = memo.get(&key) {
        return hit.clone();
    }

    let (len, mult) = lengths[idx];
    let mut total = BigUint::zero();
    let mut split = vec![0usize; capacities.len()];
    split_cycles(
        lengths, idx, len, mult, 0, &capacities, &mut split, memo, &mut total,
    );
    memo.insert(key, total.clone());
    total
}

/// Chooses how many of the `mult` cycles of length `len` go into each block.
#[allow(clippy::too_many_arguments)]
fn split_cycles(
    lengths: &[(usize, usize)],
    idx: usize,
    len: usize,
    left: usize,
    block: usize,
    capacities: &[usize],
    split: &mut Vec<usize>,
    memo: &mut HashMap<(usize, Vec<usize>), BigUint>,
    total: &mut BigUint,
) {
    if block == capacities.len() {
        if left != 0 {
            return;
        }
        let remaining: Vec<usize> = capacities
            .iter()
            .zip(split.iter())
            .map(|(c, k)| c - k * len)
            .collect();
        let rest = assign_cycles(lengths, idx + 1, remaining, memo);
        if !rest.is_zero() {
            *total += crate::partitions::multinomial(split) * rest;
        }
        return;
    }
    let max_here = (capacities[block] / len).min(left);
    for k in 0..=max_here {
        split[block] = k;
        split_cycles(lengths, idx, len, left - k, block + 1, capacities, split, memo, total);
    }
    split[block] = 0;
}

/// `d_λ` as a class function on `S_{|λ|}`.
pub fn d_lambda_class_function(lambda: &Partition) -> Result<ClassFunction> {
    let n = lambda.size();
    let mut values = Vec::new();
    for rho in enumerate_partitions(n)? {
        let v = d_lambda_value(lambda, &rho)?;
        values.push((rho, BigRational::from_integer(BigInt::from(v))));
    }
    ClassFunction::from_values(n, values)
}

/// Multiplies pointwise by the sign character.
pub fn sign_twist(f: &ClassFunction) -> ClassFunction {
    ClassFunction {
        n: f.n,
        values: f
            .values
            .iter()
            .map(|(rho, v)| {
                let v = if rho.sign() < 0 { -v.clone() } else { v.clone() };
                (rho.clone(), v)
            })
            .collect(),
    }
}

/// `(1/n!) Σ_π f(π) g(π) = Σ_ρ f(ρ) g(ρ) / z_ρ`.
///
/// Class functions here are real-valued, so no conjugation is applied.
pub fn sn_inner_product(f: &ClassFunction, g: &ClassFunction) -> Result<BigRational> {
    check_degree(f.n, g.n)?;
    let mut acc = BigRational::zero();
    for (rho, v) in &f.values {
        if let Some(w) = g.values.get(rho) {
            let z = BigRational::from_integer(BigInt::from(rho.z_factor()));
            acc += v * w / z;
        }
    }
    Ok(acc)
}

/// Image of a class function under the characteristic map, with rational
/// Schur coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChImage {
    degree: usize,
    coeffs: BTreeMap<Partition, BigRational>,
}

impl ChImage {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeff(&self, lambda: &Partition) -> BigRational {
        self.coeffs.get(lambda).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Partition, &BigRational)> {
        self.coeffs.iter()
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.values().all(|c| c.is_integer())
    }

    /// Integer Schur vector, or `None` if some coefficient is fractional.
    pub fn to_integral(&self) -> Option<SchurVector> {
        if !self.is_integral() {
            return None;
        }
        SchurVector::from_terms(
            self.degree,
            self.coeffs.iter().map(|(l, c)| (l.clone(), c.to_integer())),
        )
        .ok()
    }

    /// Truncated Hall pairing in rational arithmetic.
    pub fn pairing(&self, other: &ChImage, n_vars: usize) -> BigRational {
        if self.degree != other.degree {
            return BigRational::zero();
        }
        self.coeffs
            .iter()
            .filter(|(l, _)| l.len() <= n_vars)
            .filter_map(|(l, c)| other.coeffs.get(l).map(|d| c * d))
            .fold(BigRational::zero(), |a, b| a + b)
    }
}

/// `Ch^{(N)}(f) = Σ_ρ f(ρ)/z_ρ · p_ρ`, reported in untruncated Schur
/// coordinates; `n_vars` only matters once the image is paired.
pub fn characteristic_map(f: &ClassFunction, n_vars: usize) -> Result<ChImage> {
    if n_vars == 0 {
        return Err(Error::InvalidInput("characteristic map needs N >= 1".into()));
    }
    let mut coeffs: BTreeMap<Partition, BigRational> = BTreeMap::new();
    for (rho, v) in &f.values {
        let weight = v / BigRational::from_integer(BigInt::from(rho.z_factor()));
        for (lambda, c) in p_to_schur(rho)?.iter() {
            let slot = coeffs.entry(lambda.clone()).or_insert_with(BigRational::zero);
            *slot += &weight * BigRational::from_integer(c.clone());
        }
    }
    coeffs.retain(|_, c| !c.is_zero());
    Ok(ChImage {
        degree: f.n,
        coeffs,
    })
}

/// Converts an integral rational to a `BigInt`, failing otherwise.
pub fn require_integer(value: &BigRational, context: &str) -> Result<BigInt> {
    if value.is_integer() {
        Ok(value.to_integer())
    } else {
        Err(Error::Numeric(format!("{context}: expected an integer, got {value}")))
    }
}

/// `n!` as a rational, handy for clearing `1/n!` normalisations.
pub fn factorial_rational(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(factorial(n)))
}

/// Floating-point view of a rational, for reports only.
pub fn approx(value: &BigRational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symfunc::{e_to_schur, h_to_schur};

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    fn int(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    #[test]
    fn d_lambda_examples() {
        assert_eq!(d_lambda_value(&p(&[1, 1]), &p(&[1, 1])).unwrap(), BigUint::from(2u32));
        assert_eq!(d_lambda_value(&p(&[1, 1]), &p(&[2])).unwrap(), BigUint::zero());
        assert_eq!(d_lambda_value(&p(&[2, 2]), &p(&[2, 1, 1])).unwrap(), BigUint::from(2u32));
        assert_eq!(d_lambda_value(&Partition::empty(), &Partition::empty()).unwrap(), BigUint::one());
        assert!(d_lambda_value(&p(&[2]), &p(&[1])).is_err());
    }

    #[test]
    fn d_lambda_class_functions() {
        let d1 = d_lambda_class_function(&p(&[1])).unwrap();
        assert_eq!(d1.value(&p(&[1])), int(1));
        let d2 = d_lambda_class_function(&p(&[2])).unwrap();
        assert_eq!(d2.value(&p(&[2])), int(1));
        assert_eq!(d2.value(&p(&[1, 1])), int(1));
        let d11 = d_lambda_class_function(&p(&[1, 1])).unwrap();
        assert_eq!(d11.value(&p(&[1, 1])), int(2));
        assert_eq!(d11.iter().count(), 1);
    }

    #[test]
    fn inner_product_examples() {
        let d1 = d_lambda_class_function(&p(&[1])).unwrap();
        assert_eq!(sn_inner_product(&d1, &d1).unwrap(), int(1));
        let d11 = d_lambda_class_function(&p(&[1, 1])).unwrap();
        let d2 = d_lambda_class_function(&p(&[2])).unwrap();
        assert_eq!(sn_inner_product(&d11, &d11).unwrap(), int(2));
        assert_eq!(sn_inner_product(&d2, &d11).unwrap(), int(1));
        assert!(sn_inner_product(&d1, &d2).is_err());
    }

    #[test]
    fn sign_twist_examples() {
        let sgn = ClassFunction::sign(4).unwrap();
        let trivial = ClassFunction::constant(4, int(1)).unwrap();
        assert_eq!(sgn.mul(&sgn).unwrap(), trivial);
        assert_eq!(sign_twist(&trivial), sgn);
        let d2 = d_lambda_class_function(&p(&[2])).unwrap();
        assert_eq!(sign_twist(&d2).value(&p(&[2])), int(-1));
        let d11 = d_lambda_class_function(&p(&[1, 1])).unwrap();
        assert_eq!(sign_twist(&d11), d11);
        assert_eq!(sign_twist(&sign_twist(&d2)), d2);
    }

    #[test]
    fn characteristic_map_examples() {
        let d2 = d_lambda_class_function(&p(&[2])).unwrap();
        let e2 = characteristic_map(&sign_twist(&d2), 2).unwrap();
        assert_eq!(e2.to_integral().unwrap(), e_to_schur(&p(&[2])).unwrap());
        let h2 = characteristic_map(&d2, 2).unwrap();
        assert_eq!(h2.to_integral().unwrap(), h_to_schur(&p(&[2])).unwrap());
        let one = ClassFunction::constant(1, int(1)).unwrap();
        assert_eq!(
            characteristic_map(&one, 1).unwrap().to_integral().unwrap(),
            SchurVector::basis(p(&[1]))
        );
        assert!(characteristic_map(&one, 0).is_err());
    }

    #[test]
    fn non_integral_image_is_kept() {
        // Indicator of the identity class: Ch = p_1^2 / 2.
        let f = ClassFunction::from_values(2, [(p(&[1, 1]), int(1))]).unwrap();
        let image = characteristic_map(&f, 2).unwrap();
        assert!(!image.is_integral());
        assert!(image.to_integral().is_none());
        assert_eq!(
            image.coeff(&p(&[2])),
            BigRational::new(BigInt::from(1), BigInt::from(2))
        );
    }

    #[test]
    fn sign_cancellation_in_products() {
        for n in 0..=6 {
            let parts = enumerate_partitions(n).unwrap();
            let ds: Vec<_> = parts.iter().map(|l| d_lambda_class_function(l).unwrap()).collect();
            for a in &ds {
                for b in &ds {
                    assert_eq!(
                        sn_inner_product(&sign_twist(a), &sign_twist(b)).unwrap(),
                        sn_inner_product(a, b).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn approx_handles_sign() {
        assert_eq!(approx(&BigRational::new((-3).into(), 4.into())), -0.75);
        assert_eq!(require_integer(&int(5), "x").unwrap(), BigInt::from(5));
        assert!(require_integer(&BigRational::new(1.into(), 2.into()), "x").is_err());
    }
}
