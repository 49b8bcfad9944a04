use criterion::{criterion_group, criterion_main, Criterion};

use mzsim_core::diffraction::{slit_pattern_fixed, ScreenGrid, SlitGeometry};
use mzsim_core::engine::{simulate, PropagationModel, SimParams, SwitchingSchedule};
use mzsim_core::network::{build_mzi, mzi_ids};

fn bench_simulate(c: &mut Criterion) {
    let net = build_mzi(15.0, 0.0, true).unwrap();
    let sched = SwitchingSchedule::off_at(mzi_ids::AOM2, 0.0, 10e-9);
    let params = SimParams::default();
    c.bench_function("simulate_fig7_local", |b| {
        b.iter(|| simulate(&net, &sched, PropagationModel::Local, &params).unwrap())
    });
    c.bench_function("simulate_fig7_nonlocal", |b| {
        b.iter(|| simulate(&net, &sched, PropagationModel::NonLocal, &params).unwrap())
    });
}

fn bench_diffraction(c: &mut Criterion) {
    let geom = SlitGeometry::standard();
    let grid = ScreenGrid::new(16e-3, 501);
    c.bench_function("slit_pattern_far_2000", |b| {
        b.iter(|| slit_pattern_fixed(&geom, 3.0, &grid, 2000).unwrap())
    });
}

criterion_group!(benches, bench_simulate, bench_diffraction);
criterion_main!(benches);
