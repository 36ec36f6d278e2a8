//! Shared oracles and generators for the integration suites.
//!
//! Everything here reaches reference values along a different path than the
//! library: permanents by Laplace expansion, operator matrices by
//! exponentiating truncated generators, and random inputs drawn from one
//! seeded stream.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vibronic_core::doktorov::{MolecularParams, Units};
use vibronic_core::transform::{BogoliubovTransform, PrimitiveOp};
use vibronic_core::C64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Permanent by Laplace expansion along the first row. Exponential time;
/// meant for n ≤ 10.
pub fn naive_permanent(a: &DMatrix<C64>) -> C64 {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "permanent needs a square matrix");
    if n == 0 {
        return C64::new(1.0, 0.0);
    }
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..n {
        let minor = a.clone().remove_row(0).remove_column(j);
        acc += a[(0, j)] * naive_permanent(&minor);
    }
    acc
}

/// exp(A) by scaling and squaring over a plain Taylor series. The argument
/// is halved until its crude norm bound is below 1/2, where 25 terms are far
/// beyond f64 resolution.
pub fn expm(a: &DMatrix<C64>) -> DMatrix<C64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let bound = a.iter().map(|v| v.norm()).fold(0.0, f64::max) * n as f64;
    let squarings = if bound > 0.5 {
        (bound / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scale = 2f64.powi(squarings as i32);
    let scaled = a.map(|v| v / scale);
    let mut term = DMatrix::<C64>::identity(n, n);
    let mut sum = DMatrix::<C64>::identity(n, n);
    for k in 1..=25u32 {
        term = (&term * &scaled).map(|v| v / k as f64);
        sum += &term;
    }
    let mut result = sum;
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Haar-ish unitary: QR of a complex Ginibre draw with column phases fixed
/// from the R diagonal.
pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<C64> {
    let g = DMatrix::from_fn(n, n, |_, _| {
        C64::new(standard_normal(rng), standard_normal(rng))
    });
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            for i in 0..n {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

pub fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| standard_normal(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

/// One random primitive on `modes` modes. Two-mode squeezing only exists on
/// even registers, so odd ones draw from the other three kinds.
pub fn random_primitive(rng: &mut ChaCha8Rng, modes: usize) -> PrimitiveOp {
    let kinds = if modes % 2 == 0 { 4 } else { 3 };
    match rng.random_range(0..kinds) {
        0 => PrimitiveOp::Rotation(random_unitary(rng, modes)),
        1 => {
            let alpha = DVector::from_fn(modes, |_, _| {
                C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            PrimitiveOp::Displacement(alpha)
        }
        2 => {
            let lambda = DVector::from_fn(modes, |_, _| rng.random_range(-0.8..0.8));
            PrimitiveOp::Squeeze(lambda)
        }
        _ => {
            let theta = DVector::from_fn(modes / 2, |_, _| rng.random_range(0.0..1.5));
            PrimitiveOp::TwoModeSqueeze(theta)
        }
    }
}

/// A transform composed of 1..=max_ops random primitives.
pub fn random_transform(rng: &mut ChaCha8Rng, modes: usize, max_ops: usize) -> BogoliubovTransform {
    let n_ops = rng.random_range(1..=max_ops);
    let mut acc = BogoliubovTransform::identity(modes);
    for _ in 0..n_ops {
        let t = random_primitive(rng, modes).transform(1e-10).unwrap();
        acc = BogoliubovTransform::compose(&acc, &t).unwrap();
    }
    acc
}

/// A random molecule in wavenumber units with moderate frequency ratios
/// (squeeze magnitudes ≤ 0.5) and displacements within ±1.2.
pub fn random_molecule(rng: &mut ChaCha8Rng, modes: usize) -> MolecularParams {
    let omega = DVector::from_fn(modes, |_, _| rng.random_range(600.0..3500.0));
    let omega_prime = omega.map(|w| w * (2.0 * rng.random_range(-0.5_f64..0.5)).exp());
    let u = random_orthogonal(rng, modes);
    let d = DVector::from_fn(modes, |_, _| rng.random_range(-1.2..1.2));
    MolecularParams::new(omega, omega_prime, u, d, Units::Wavenumber).unwrap()
}

pub fn max_entry_difference(a: &BogoliubovTransform, b: &BogoliubovTransform) -> f64 {
    let x = (a.x() - b.x()).iter().map(|v| v.norm()).fold(0.0, f64::max);
    let y = (a.y() - b.y()).iter().map(|v| v.norm()).fold(0.0, f64::max);
    let z = (a.z() - b.z()).iter().map(|v| v.norm()).fold(0.0, f64::max);
    x.max(y).max(z)
}
