//! Parallel loops on the default rayon pool against the same loops pinned
//! to one thread. Built without the `rayon` feature both variants run the
//! sequential fallback.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use cue_lab_core::cue::{mc_moment_estimate, MomentKind, MomentSpec};
use cue_lab_core::ffield::{cycle_type_census, FPoly, FieldSpec};
use cue_lab_core::lfunc::{char_moment, Twist};
use cue_lab_core::Limits;
use rayon::ThreadPool;

fn single_thread() -> ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap()
}

fn compare(c: &mut Criterion, name: &str, work: impl Fn() + Sync) {
    let pool = single_thread();
    let mut group = c.benchmark_group(name);
    group.sample_size(10);
    group.bench_function("one_thread", |b| b.iter(|| pool.install(&work)));
    group.bench_function("default_pool", |b| b.iter(&work));
    group.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let spec = MomentSpec::new(vec![1, 1], vec![1, 1], 4, MomentKind::Secular).unwrap();
    compare(c, "mc_moment_estimate", || {
        black_box(mc_moment_estimate(&spec, 20_000, 5).unwrap());
    });
}

fn census(c: &mut Criterion) {
    let field = FieldSpec::prime(5).unwrap();
    let limits = Limits::default();
    compare(c, "cycle_type_census", || {
        black_box(cycle_type_census(6, &field, &limits).unwrap());
    });
}

fn character_moment(c: &mut Criterion) {
    let field = FieldSpec::prime(3).unwrap();
    let modulus = FPoly::from_coeffs(&field, vec![2, 0, 1, 0, 1]).unwrap();
    let limits = Limits::default();
    compare(c, "char_moment", || {
        black_box(char_moment(&modulus, 2, 2, Twist::None, &limits).unwrap());
    });
}

criterion_group!(benches, monte_carlo, census, character_moment);
criterion_main!(benches);
