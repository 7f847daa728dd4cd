use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use restriction_core::measures::paraboloid_measure;
use restriction_core::verifier::{convolution_rwt_scan, restricted_weak_type_scan};
use restriction_core::{Exponent, Group, GroupSpec, LpSystem, MeasureProfile, ScanStrategy};
use std::hint::black_box;

fn system_constants(c: &mut Criterion) {
    let mut group = c.benchmark_group("system_build");
    group.sample_size(10);
    for spec in [GroupSpec::cyclic(27, 2), GroupSpec::cyclic(25, 3), GroupSpec::prime_field(7, 3)] {
        let g = Group::new(spec.clone()).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(spec.label()), &g, |b, g| {
            b.iter(|| LpSystem::build(black_box(g)).unwrap())
        });
    }
    group.finish();
}

fn scans(c: &mut Criterion) {
    let g = Group::new(GroupSpec::cyclic(9, 2)).unwrap();
    let sys = LpSystem::build(&g).unwrap();
    let mu = paraboloid_measure(&g).unwrap();
    let one = Exponent::from_integer(1);
    let prof = MeasureProfile::analyze(&mu, &sys, one, one).unwrap();
    let mut group = c.benchmark_group("scan_z9_2");
    group.sample_size(10);
    group.bench_function("restriction_1000", |b| {
        b.iter(|| restricted_weak_type_scan(&mu, &sys, &prof, &ScanStrategy::random(1000, 1)).unwrap())
    });
    group.bench_function("convolution_1000", |b| {
        b.iter(|| convolution_rwt_scan(&mu, &sys, &prof, &ScanStrategy::random(1000, 1)).unwrap())
    });
    group.finish();

    let g3 = Group::new(GroupSpec::cyclic(3, 2)).unwrap();
    let sys3 = LpSystem::build(&g3).unwrap();
    let mu3 = paraboloid_measure(&g3).unwrap();
    let prof3 = MeasureProfile::analyze(&mu3, &sys3, one, one).unwrap();
    c.bench_function("restriction_exhaustive_z3_2", |b| {
        b.iter(|| restricted_weak_type_scan(&mu3, &sys3, &prof3, &ScanStrategy::exhaustive()).unwrap())
    });
}

criterion_group!(benches, system_constants, scans);
criterion_main!(benches);
