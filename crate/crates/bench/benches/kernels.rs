use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use fixlat::classify::{classify_e8, e8_lattice};
use fixlat::enumerate::short_vectors;
use fixlat::isometry::automorphism_group;
use fixlat::leech::{build_golay, code_automorphisms, leech};
use fixlat::linalg::{lll_reduce, Rat};
use fixlat::perm::StabChain;
use fixlat_bench::{random_gram, random_lattice};

fn enumeration(c: &mut Criterion) {
    let e8 = e8_lattice();
    c.bench_function("short vectors E8 norm<=4", |b| {
        b.iter(|| short_vectors(black_box(&e8), &Rat::from_integer(4.into())))
    });
    let l = random_lattice(10, 6, 7);
    let bound = Rat::from_integer(60.into());
    c.bench_function("short vectors random rank 10", |b| b.iter(|| short_vectors(black_box(&l), &bound)));
    let leech = leech().lattice().clone();
    let mut g = c.benchmark_group("leech");
    g.sample_size(10);
    g.bench_function("short vectors Leech norm 4", |b| {
        b.iter(|| short_vectors(black_box(&leech), &Rat::from_integer(4.into())))
    });
    g.finish();
}

fn reduction(c: &mut Criterion) {
    let g12 = random_gram(12, 20, 11);
    c.bench_function("LLL rank 12", |b| b.iter(|| lll_reduce(black_box(&g12))));
    let g20 = random_gram(20, 20, 13);
    c.bench_function("LLL rank 20", |b| b.iter(|| lll_reduce(black_box(&g20))));
}

fn groups(c: &mut Criterion) {
    let m24 = code_automorphisms(&build_golay()).unwrap();
    c.bench_function("Schreier-Sims M24", |b| b.iter(|| StabChain::new(24, black_box(&m24.gens), &[]).order()));
    let weyl = automorphism_group(&e8_lattice()).unwrap();
    c.bench_function("Schreier-Sims W(E8) on 240 roots", |b| {
        b.iter(|| StabChain::new(weyl.domain.len(), black_box(&weyl.perms), &[]).order())
    });
    let mut g = c.benchmark_group("slow");
    g.sample_size(10);
    g.bench_function("O(E8) backtracking", |b| b.iter(|| automorphism_group(black_box(&e8_lattice())).unwrap().order));
    g.bench_function("E8 parabolic classification", |b| b.iter(|| classify_e8().unwrap().records.len()));
    g.finish();
}

criterion_group!(benches, enumeration, reduction, groups);
criterion_main!(benches);
