use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use zslab_bench::{odometer_window, systems};
use zslab_core::rep::fock_ball;
use zslab_core::{build_bowtie, build_tilde_bowtie, fock_for_system, is_homogeneous, validate_product_system, zs_axiom_check, Tolerance};

fn zs_axioms(c: &mut Criterion) {
    let (d, pb, gb) = odometer_window();
    c.bench_function("zs_axiom_check/odometer-4x3", |b| b.iter(|| zs_axiom_check(black_box(&d), &pb, &gb)));
}

fn bowtie(c: &mut Criterion) {
    let tol = Tolerance::default();
    let mut group = c.benchmark_group("bowtie");
    group.sample_size(10);
    for (name, s) in systems() {
        group.bench_function(format!("build/{name}"), |b| b.iter(|| build_bowtie(black_box(&s), tol).unwrap()));
        let y = build_bowtie(&s, tol).unwrap();
        group.bench_function(format!("validate/{name}"), |b| {
            b.iter(|| validate_product_system(black_box(&y.system), tol))
        });
        if is_homogeneous(&s) {
            group.bench_function(format!("build-tilde/{name}"), |b| {
                b.iter(|| build_tilde_bowtie(black_box(&s), tol).unwrap())
            });
        }
    }
    group.finish();
}

fn fock(c: &mut Criterion) {
    let mut group = c.benchmark_group("fock");
    group.sample_size(10);
    for (name, s) in systems() {
        let ball = fock_ball(&s.zs.p, 2);
        group.bench_function(name, |b| b.iter(|| fock_for_system(black_box(&s), &ball).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, zs_axioms, bowtie, fock);
criterion_main!(benches);
