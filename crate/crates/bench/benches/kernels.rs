//! The three kernels that dominate runtime: permanents, rotation application
//! on the truncated grid, and a full small profile.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nalgebra::{dmatrix, dvector, DMatrix};
use num_complex::Complex64 as C64;
use vibronic_core::doktorov::{MolecularParams, Units};
use vibronic_core::fock::{permanent, state_probabilities, FockBudget};
use vibronic_core::spectrum::{fcp_direct, SpectrumParams};
use vibronic_core::{OpticalCircuit, PrimitiveOp, DEFAULT_TOLERANCE};

/// Deterministic dense complex matrix with O(1) entries.
fn test_matrix(n: usize) -> DMatrix<C64> {
    DMatrix::from_fn(n, n, |i, j| {
        C64::new(
            ((i * 31 + j * 17) as f64 * 0.37).sin(),
            ((i * 13 + j * 29) as f64 * 0.23).cos(),
        ) * 0.5
    })
}

fn bench_permanent(c: &mut Criterion) {
    let mut group = c.benchmark_group("permanent");
    for n in [6_usize, 8, 10, 12] {
        let a = test_matrix(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| {
            b.iter(|| permanent(black_box(a)).unwrap())
        });
    }
    group.finish();
}

fn bench_rotation(c: &mut Criterion) {
    let mut group = c.benchmark_group("rotation_on_grid");
    let angle = 0.7_f64;
    let u = dmatrix![
        C64::new(angle.cos(), 0.0), C64::new(0.0, angle.sin());
        C64::new(0.0, angle.sin()), C64::new(angle.cos(), 0.0)
    ];
    let circuit = OpticalCircuit::new(2, vec![PrimitiveOp::Rotation(u)]).unwrap();
    let budget = FockBudget::default();
    for cutoff in [10_usize, 20, 40] {
        group.bench_with_input(BenchmarkId::from_parameter(cutoff), &cutoff, |b, &cutoff| {
            b.iter(|| {
                state_probabilities(
                    black_box(&circuit),
                    &[1, 1],
                    cutoff,
                    &budget,
                    DEFAULT_TOLERANCE,
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

fn bench_profile(c: &mut Criterion) {
    let mol = MolecularParams::new(
        dvector![1000.0, 1400.0],
        dvector![1100.0, 1250.0],
        dmatrix![0.9689124217106447, -0.24740395925452294;
                 0.24740395925452294, 0.9689124217106447],
        dvector![0.6, -0.4],
        Units::Wavenumber,
    )
    .unwrap()
    .with_thermal_occupation(dvector![0.5, 0.3])
    .unwrap();
    let sp = SpectrumParams {
        cutoff: 6,
        epsilon: 1e-4,
        bin_width: 10.0,
        tolerance: DEFAULT_TOLERANCE,
        budget: FockBudget::default(),
    };
    let mut group = c.benchmark_group("profile");
    group.sample_size(20);
    group.bench_function("two_warm_modes_direct", |b| {
        b.iter(|| fcp_direct(black_box(&mol), black_box(&sp)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_permanent, bench_rotation, bench_profile);
criterion_main!(benches);
