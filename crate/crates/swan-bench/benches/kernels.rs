use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use swan_bench::{reference_geometry, reference_rf};
use swan_core::montecarlo::{estimate_pnr, Architecture, McConfig};
use swan_core::{
    op_sa_bruteforce, place_antennas, pnr_sa, OutageSpec, SegmentedWaveguide,
};

fn closed_forms(c: &mut Criterion) {
    c.bench_function("pnr_sa_m50", |b| {
        b.iter(|| pnr_sa(black_box(0.3), black_box(50.0), black_box(50)))
    });
}

fn placement(c: &mut Criterion) {
    let rf = reference_rf();
    let mut group = c.benchmark_group("place_antennas");
    for m in [11usize, 101] {
        let geo = reference_geometry(50.0);
        let wg = SegmentedWaveguide::new(m, 50.0, -25.0).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(m), &m, |b, _| {
            b.iter(|| place_antennas(black_box(&wg), &rf, &geo).unwrap())
        });
    }
    group.finish();
}

fn subset_enumeration(c: &mut Criterion) {
    let rf = reference_rf();
    let geo = reference_geometry(50.0);
    let mut group = c.benchmark_group("op_sa_bruteforce");
    group.sample_size(10);
    for m in [11usize, 20] {
        let wg = SegmentedWaveguide::new(m, 50.0, -25.0).unwrap();
        let sol = place_antennas(&wg, &rf, &geo).unwrap();
        let peak = swan_core::snr_single_pa(0.0, &rf, &geo);
        let spec = OutageSpec::fraction_of_rate_at(0.9, peak);
        group.bench_with_input(BenchmarkId::from_parameter(m), &m, |b, _| {
            b.iter(|| op_sa_bruteforce(black_box(&sol), 0.3, &wg, &rf, &geo, &spec).unwrap())
        });
    }
    group.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let wg = SegmentedWaveguide::new(10, 50.0, -25.0).unwrap();
    let mc = McConfig::new(100_000, 7);
    let mut group = c.benchmark_group("estimate_pnr_100k");
    group.sample_size(20);
    group.bench_function("sa_m10", |b| {
        b.iter(|| estimate_pnr(Architecture::SegmentAggregation, black_box(0.3), &wg, &mc).unwrap())
    });
    group.finish();
}

criterion_group!(benches, closed_forms, placement, subset_enumeration, monte_carlo);
criterion_main!(benches);
