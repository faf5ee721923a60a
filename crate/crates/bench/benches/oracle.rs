use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};

use lietp_core::catalog::{connected_posets, random_connected_poset};
use lietp_core::poset::{extreme_pairs, pair_classes};
use lietp_core::{
    decompose_tp, half_derivation_dimension, random_tp, structural_basis, verify_tp, Poset, DEFAULT_ORACLE_CAP,
};

fn two_diamonds() -> Arc<Poset> {
    let covers = [
        ("1", "4"),
        ("1", "5"),
        ("2", "4"),
        ("2", "5"),
        ("2", "6"),
        ("2", "7"),
        ("3", "6"),
        ("3", "7"),
    ];
    Arc::new(Poset::new(&["1", "2", "3", "4", "5", "6", "7"], &covers).unwrap())
}

fn half_derivations(c: &mut Criterion) {
    let p = two_diamonds();
    c.bench_function("oracle dimension, 7 elements", |b| {
        b.iter(|| half_derivation_dimension(black_box(&p), DEFAULT_ORACLE_CAP).unwrap())
    });
    c.bench_function("structural basis, 7 elements", |b| {
        b.iter(|| structural_basis(black_box(&p), 0).unwrap())
    });
}

fn tp_structures(c: &mut Criterion) {
    let p = Arc::new(random_connected_poset(5, 3));
    let prod = random_tp(&p, 11);
    c.bench_function("verify_tp, 5 elements", |b| b.iter(|| verify_tp(black_box(&prod))));
    c.bench_function("decompose_tp, 5 elements", |b| {
        b.iter(|| decompose_tp(black_box(&prod), 0).unwrap())
    });
}

fn combinatorics(c: &mut Criterion) {
    c.bench_function("catalog of 6-element posets", |b| b.iter(|| connected_posets(black_box(6))));
    let p = random_connected_poset(9, 1);
    c.bench_function("extreme pairs and classes, 9 elements", |b| {
        b.iter(|| (extreme_pairs(black_box(&p)), pair_classes(black_box(&p))))
    });
}

criterion_group!(benches, half_derivations, tp_structures, combinatorics);
criterion_main!(benches);
