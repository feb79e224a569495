mod common;

use common::{d_lambda_brute, permutation_of_type, permutations};
use cue_lab_core::charmap::{
    characteristic_map, d_lambda_class_function, d_lambda_value, sign_twist, sn_inner_product, ClassFunction,
};
use cue_lab_core::partitions::{enumerate_partitions, factorial};
use cue_lab_core::symfunc::{e_to_schur, h_to_schur};
use cue_lab_core::Partition;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;

fn cycle_type(p: &[usize]) -> Partition {
    let mut seen = vec![false; p.len()];
    let mut parts = Vec::new();
    for s in 0..p.len() {
        let mut len = 0;
        let mut i = s;
        while !seen[i] {
            seen[i] = true;
            i = p[i];
            len += 1;
        }
        if len > 0 {
            parts.push(len);
        }
    }
    Partition::from_unsorted(parts)
}

#[test]
fn d_lambda_matches_brute_force() {
    for n in 0..=6 {
        let parts = enumerate_partitions(n).unwrap();
        for lambda in &parts {
            for rho in &parts {
                let want = d_lambda_brute(lambda, &permutation_of_type(rho));
                assert_eq!(d_lambda_value(lambda, rho).unwrap(), BigUint::from(want), "d_{lambda}({rho})");
            }
        }
    }
}

#[test]
fn inner_product_matches_sum_over_group() {
    // ⟨d_λ, d_μ⟩ via class sizes equals the average over all n! permutations.
    for n in 1..=5 {
        let perms = permutations(n);
        let parts = enumerate_partitions(n).unwrap();
        for lambda in &parts {
            for mu in &parts {
                let total: u64 = perms
                    .iter()
                    .map(|p| d_lambda_brute(lambda, p) * d_lambda_brute(mu, p))
                    .sum();
                let want = BigRational::new(BigInt::from(total), BigInt::from(factorial(n)));
                let f = d_lambda_class_function(lambda).unwrap();
                let g = d_lambda_class_function(mu).unwrap();
                assert_eq!(sn_inner_product(&f, &g).unwrap(), want);
            }
        }
    }
    // Class sizes from cycle-type counting agree with the enumerated group.
    let perms = permutations(5);
    for rho in enumerate_partitions(5).unwrap() {
        let count = perms.iter().filter(|p| cycle_type(p) == rho).count();
        assert_eq!(rho.class_size(), BigUint::from(count));
    }
}

#[test]
fn characteristic_map_sends_d_lambda_to_h_and_e() {
    for n in 0..=6 {
        for lambda in enumerate_partitions(n).unwrap() {
            let d = d_lambda_class_function(&lambda).unwrap();
            let ch = characteristic_map(&d, n.max(1)).unwrap().to_integral().unwrap();
            assert_eq!(ch, h_to_schur(&lambda).unwrap());
            let ch = characteristic_map(&sign_twist(&d), n.max(1)).unwrap().to_integral().unwrap();
            assert_eq!(ch, e_to_schur(&lambda).unwrap());
        }
    }
}

#[test]
fn characteristic_map_is_an_isometry_in_range() {
    for n in 1..=5 {
        let parts = enumerate_partitions(n).unwrap();
        let family: Vec<ClassFunction> = parts
            .iter()
            .flat_map(|l| {
                let d = d_lambda_class_function(l).unwrap();
                [sign_twist(&d), d]
            })
            .collect();
        for vars in [n, n + 2] {
            let images: Vec<_> = family.iter().map(|f| characteristic_map(f, vars).unwrap()).collect();
            for (f, cf) in family.iter().zip(&images) {
                for (g, cg) in family.iter().zip(&images) {
                    assert_eq!(cf.pairing(cg, vars), sn_inner_product(f, g).unwrap());
                }
            }
        }
    }
}

#[test]
fn isometry_fails_below_range() {
    // Ch(sgn·d_(1,1)) = e_1^2 = s_(2) + s_(1,1) has norm 2 on S_2, but s_(1,1)
    // drops out in one variable.
    let lambda = Partition::new(vec![1, 1]).unwrap();
    let f = sign_twist(&d_lambda_class_function(&lambda).unwrap());
    let ch = characteristic_map(&f, 1).unwrap();
    let two = BigRational::from_integer(BigInt::from(2));
    assert_eq!(sn_inner_product(&f, &f).unwrap(), two);
    assert_eq!(ch.pairing(&ch, 1), BigRational::from_integer(BigInt::from(1)));
}
