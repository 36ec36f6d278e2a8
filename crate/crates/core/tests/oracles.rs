//! Cross-checks of the Fock-space kernels against references computed along
//! independent paths: Laplace-expansion permanents, exponentials of truncated
//! generators, and closed-form state amplitudes.

mod common;

use common::{expm, naive_permanent, rng, standard_normal};
use nalgebra::DMatrix;
use vibronic_core::fock::{
    displacement_matrix, permanent, rotation_amplitude, squeeze_matrix, state_probabilities,
    two_mode_squeeze_matrix, two_mode_squeeze_vacuum, FockBudget,
};
use vibronic_core::transform::{OpticalCircuit, PrimitiveOp};
use vibronic_core::C64;

fn annihilation(cutoff: usize) -> DMatrix<C64> {
    DMatrix::from_fn(cutoff + 1, cutoff + 1, |i, j| {
        if j == i + 1 {
            C64::new((j as f64).sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

fn random_hermitian(rng: &mut rand_chacha::ChaCha8Rng, n: usize, scale: f64) -> DMatrix<C64> {
    let g = DMatrix::from_fn(n, n, |_, _| {
        C64::new(standard_normal(rng), standard_normal(rng)) * scale
    });
    (&g + g.adjoint()).map(|v| v / 2.0)
}

#[test]
fn ryser_matches_laplace_expansion() {
    let mut rng = rng(11);
    for case in 0..20 {
        let n = 1 + case % 7;
        let a = DMatrix::from_fn(n, n, |_, _| {
            C64::new(standard_normal(&mut rng), standard_normal(&mut rng))
        });
        let fast = permanent(&a).unwrap();
        let slow = naive_permanent(&a);
        let scale = slow.norm().max(1.0);
        assert!(
            (fast - slow).norm() / scale < 1e-12,
            "n = {n}: {fast} vs {slow}"
        );
    }
}

#[test]
fn displacement_matrix_matches_generator_exponential() {
    let alpha = C64::new(0.7, -0.4);
    let cutoff = 30;
    let a = annihilation(cutoff);
    let gen = a.adjoint().map(|v| v * alpha) - a.map(|v| v * alpha.conj());
    let reference = expm(&gen);
    let direct = displacement_matrix(alpha, cutoff);
    for m in 0..=12 {
        for n in 0..=12 {
            assert!(
                (direct[(m, n)] - reference[(m, n)]).norm() < 1e-12,
                "({m},{n})"
            );
        }
    }
}

#[test]
fn squeeze_matrix_matches_generator_exponential() {
    // the compared block sits far below the cutoff: the truncated generator
    // reflects amplitude off the boundary, with weight falling like powers
    // of tanh λ over the gap
    let lambda = 0.6;
    let cutoff = 60;
    let a = annihilation(cutoff);
    let a2 = &a * &a;
    let gen = (a2.adjoint() - a2).map(|v| v * (lambda / 2.0));
    let reference = expm(&gen);
    let direct = squeeze_matrix(lambda, cutoff);
    for m in 0..=10 {
        for n in 0..=10 {
            assert!(
                (C64::new(direct[(m, n)], 0.0) - reference[(m, n)]).norm() < 1e-10,
                "({m},{n})"
            );
        }
    }
}

#[test]
fn two_mode_squeeze_matrix_matches_generator_exponential() {
    let theta = 0.6;
    let cutoff = 20;
    let a = annihilation(cutoff);
    let pair_create = a.adjoint().kronecker(&a.adjoint());
    let pair_destroy = a.kronecker(&a);
    let gen = (pair_create - pair_destroy).map(|v| v * (theta / 2.0));
    let reference = expm(&gen);
    let direct = two_mode_squeeze_matrix(theta, cutoff);
    // rows and columns flatten as a·(cutoff+1)+b in both layouts
    let dim = cutoff + 1;
    for ma in 0..=4_usize {
        for mb in 0..=4_usize {
            for na in 0..=4_usize {
                for nb in 0..=4_usize {
                    let r = ma * dim + mb;
                    let c = na * dim + nb;
                    assert!(
                        (C64::new(direct[(r, c)], 0.0) - reference[(r, c)]).norm() < 1e-10,
                        "({ma},{mb})<-({na},{nb})"
                    );
                }
            }
        }
    }
}

#[test]
fn rotation_sector_recurrence_matches_permanent_and_exponential() {
    let mut rng = rng(23);
    let cutoff = 8;
    let budget = FockBudget::default();
    let h = random_hermitian(&mut rng, 2, 0.4);
    let u = expm(&h.map(|v| v * C64::new(0.0, 1.0)));
    let n = [1_usize, 2];

    let circuit = OpticalCircuit::new(2, vec![PrimitiveOp::Rotation(u.clone())]).unwrap();
    let table = state_probabilities(&circuit, &n, cutoff, &budget, 1e-9).unwrap();

    // permanent oracle inside the photon-number sector, zero outside
    for flat in 0..table.grid().dim() {
        let m = table.grid().occupation(flat);
        let got = table.amplitudes()[flat];
        if m.iter().sum::<usize>() == 3 {
            let want = rotation_amplitude(&u, &m, &n, 14).unwrap();
            assert!((got - want).norm() < 1e-12, "{m:?}");
        } else {
            assert!(got.norm() < 1e-14, "{m:?}");
        }
    }

    // truncated-generator oracle: R_U = exp((a†)ᵀ ln(Ū) a) with U = e^{iH},
    // so ln(Ū) = −i H̄; mode 0 is the fast flat index
    let a = annihilation(cutoff);
    let eye = DMatrix::<C64>::identity(cutoff + 1, cutoff + 1);
    let a0 = eye.kronecker(&a);
    let a1 = a.kronecker(&eye);
    let modes = [&a0, &a1];
    let log_u_conj = h.map(|v| v.conj() * C64::new(0.0, -1.0));
    let mut gen = DMatrix::<C64>::zeros(a0.nrows(), a0.ncols());
    for j in 0..2 {
        for k in 0..2 {
            gen += modes[j].adjoint() * modes[k].map(|v| v * log_u_conj[(j, k)]);
        }
    }
    let reference = expm(&gen);
    let col = table.grid().flat(&n).unwrap();
    for flat in 0..table.grid().dim() {
        if table.grid().total(flat) <= cutoff {
            assert!(
                (table.amplitudes()[flat] - reference[(flat, col)]).norm() < 1e-10,
                "flat {flat}"
            );
        }
    }
}

#[test]
fn purified_pair_amplitudes_are_geometric() {
    let nbar: f64 = 0.8;
    let theta = 2.0 * nbar.sqrt().asinh();
    let amps = two_mode_squeeze_vacuum(theta, 20);
    for m in 0..=20_usize {
        let want = nbar.powi(m as i32) / (nbar + 1.0).powi(m as i32 + 1);
        assert!((amps[m] * amps[m] - want).abs() < 1e-12, "m = {m}");
    }
}
