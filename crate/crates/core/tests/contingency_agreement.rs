mod common;

use common::same_size_pair;
use cue_lab_core::contingency::{
    count_matrices, count_via_kostka, count_via_sn_average, enumerate_matrices, multinomial_identity_check,
};
use cue_lab_core::partitions::enumerate_partitions;
use cue_lab_core::{Limits, Partition};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use proptest::prelude::*;

/// Counts matrices by trying every entry in `0..=min(row, col)` cell by cell.
fn brute_count(mu: &Partition, nu: &Partition) -> u64 {
    let (r, c) = (mu.len(), nu.len());
    let bounds: Vec<u64> = (0..r * c)
        .map(|k| mu.part(k / c).min(nu.part(k % c)) as u64)
        .collect();
    let mut cells = vec![0u64; r * c];
    let mut count = 0;
    loop {
        let rows_ok = (0..r).all(|i| (0..c).map(|j| cells[i * c + j]).sum::<u64>() == mu.part(i) as u64);
        let cols_ok = (0..c).all(|j| (0..r).map(|i| cells[i * c + j]).sum::<u64>() == nu.part(j) as u64);
        if rows_ok && cols_ok {
            count += 1;
        }
        let mut k = 0;
        loop {
            if k == cells.len() {
                return count;
            }
            cells[k] += 1;
            if cells[k] <= bounds[k] {
                break;
            }
            cells[k] = 0;
            k += 1;
        }
    }
}

#[test]
fn count_matches_brute_force() {
    let limits = Limits::default();
    for n in 0..=4 {
        let parts = enumerate_partitions(n).unwrap();
        for mu in &parts {
            for nu in &parts {
                let want = BigUint::from(brute_count(mu, nu));
                assert_eq!(count_matrices(mu, nu, &limits).unwrap(), want, "{mu} {nu}");
                assert_eq!(enumerate_matrices(mu, nu, &limits).unwrap().len() as u64, brute_count(mu, nu));
            }
        }
    }
}

#[test]
fn three_way_agreement() {
    let limits = Limits::default();
    for n in 0..=6 {
        let parts = enumerate_partitions(n).unwrap();
        for mu in &parts {
            for nu in &parts {
                let direct = count_matrices(mu, nu, &limits).unwrap();
                assert_eq!(count_via_kostka(mu, nu).unwrap(), direct);
                assert_eq!(
                    count_via_sn_average(mu, nu).unwrap(),
                    BigRational::from_integer(BigInt::from(direct))
                );
            }
        }
    }
}

#[test]
fn row_and_column_extremes() {
    let limits = Limits::default();
    for n in 1..=7 {
        let row = Partition::row(n);
        let col = Partition::column(n);
        // One column of sums: a single matrix. Permutation matrices: n!.
        for mu in enumerate_partitions(n).unwrap() {
            assert_eq!(count_matrices(&mu, &row, &limits).unwrap(), BigUint::from(1u32));
        }
        assert_eq!(count_matrices(&col, &col, &limits).unwrap(), cue_lab_core::partitions::factorial(n));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn count_is_symmetric((mu, nu) in same_size_pair(7)) {
        let limits = Limits::default();
        prop_assert_eq!(count_matrices(&mu, &nu, &limits).unwrap(), count_matrices(&nu, &mu, &limits).unwrap());
    }

    #[test]
    fn enumerated_matrices_have_the_margins((mu, nu) in same_size_pair(5)) {
        let limits = Limits::default();
        let all = enumerate_matrices(&mu, &nu, &limits).unwrap();
        for m in &all {
            prop_assert!(m.has_margins(&mu, &nu));
            prop_assert!(m.transpose().has_margins(&nu, &mu));
        }
        let mut dedup = all.clone();
        dedup.dedup();
        prop_assert_eq!(dedup.len(), all.len());
    }

    #[test]
    fn multinomial_sides_agree((mu, nu) in same_size_pair(6)) {
        let report = multinomial_identity_check(&mu, &nu, &Limits::default()).unwrap();
        prop_assert!(report.balanced);
    }
}
