use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dioph_core::approx::{farey_length, rationals_in};
use dioph_core::lattice::lll_reduce;
use dioph_core::rootsum::{min_sum, MinSumOptions, RootSumInstance};
use dioph_core::{Integer, Rational};

fn farey(c: &mut Criterion) {
    let (lo, hi) = (Rational::new(), Rational::from(1));
    c.bench_function("farey window T=300", |b| b.iter(|| rationals_in(black_box(300), &lo, &hi).len()));
    c.bench_function("farey length T=2000", |b| b.iter(|| farey_length(black_box(2000))));
}

fn lll(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let basis: Vec<Vec<Integer>> = (0..12)
        .map(|_| (0..12).map(|_| Integer::from(rng.gen_range(-1000i64..1000))).collect())
        .collect();
    let delta = Rational::from((3, 4));
    c.bench_function("lll 12x12", |b| b.iter(|| lll_reduce(black_box(&basis), &delta).unwrap()));
}

fn rootsum(c: &mut Criterion) {
    let opts = MinSumOptions::default();
    let three = RootSumInstance::ones(2, 499);
    let four = RootSumInstance::ones(3, 101);
    c.bench_function("min_sum f(3,499)", |b| b.iter(|| min_sum(black_box(&three), &opts).unwrap()));
    c.bench_function("min_sum f(4,101)", |b| b.iter(|| min_sum(black_box(&four), &opts).unwrap()));
}

criterion_group!(benches, farey, lll, rootsum);
criterion_main!(benches);
