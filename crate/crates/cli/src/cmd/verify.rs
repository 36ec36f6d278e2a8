//! The verify subcommand: deterministic seeded self-checks spanning every
//! layer, from transform algebra to the full two-route spectrum comparison.
//!
//! Every random draw flows from the one seed, so two runs with the same seed
//! print byte-identical reports. Each suite compares its worst observed
//! deviation against a gate: the algebraic suites gate on the configured
//! tolerance (an injected `--tolerance 0` exercises the failure path), the
//! physical suites gate on fixed envelopes.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vibronic_core::bloch_messiah::bloch_messiah;
use vibronic_core::doktorov::{doktorov_circuit, doktorov_transform, MolecularParams, Units};
use vibronic_core::extended::purification_angles;
use vibronic_core::fock::{rotation_amplitude, state_probabilities};
use vibronic_core::spectrum::{fcp_direct, fcp_extended, SpectrumParams};
use vibronic_core::transform::BogoliubovTransform;
use vibronic_core::{C64, OpticalCircuit, PrimitiveOp, DEFAULT_TOLERANCE};

use crate::config::ConfigArgs;
use crate::Failure;

struct Suite {
    name: &'static str,
    worst: f64,
    gate: f64,
}

impl Suite {
    fn passed(&self) -> bool {
        self.worst <= self.gate
    }
}

pub fn run(seed: u64, cfg: &ConfigArgs) -> Result<(), Failure> {
    cfg.init_threads();
    let suites = [
        constraint_suite(seed, cfg)?,
        circuit_suite(seed, cfg)?,
        factorization_suite(seed, cfg)?,
        route_suite(seed, cfg)?,
        heralding_suite(seed, cfg)?,
    ];
    let mut failed = 0;
    for suite in &suites {
        let verdict = if suite.passed() {
            "PASS"
        } else {
            failed += 1;
            "FAIL"
        };
        println!(
            "suite {:<24} {verdict} (worst {:.3e}, gate {:.3e})",
            suite.name, suite.worst, suite.gate
        );
    }
    println!(
        "verification: {}/{} suites passed (seed {seed})",
        suites.len() - failed,
        suites.len()
    );
    if failed > 0 {
        Err(Failure::Mismatch(format!(
            "{failed} verification suite(s) failed"
        )))
    } else {
        Ok(())
    }
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<C64> {
    let g = DMatrix::from_fn(n, n, |_, _| C64::new(standard_normal(rng), standard_normal(rng)));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    // fix the gauge so the factor is haar-like rather than sign-biased
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
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

fn random_chain(rng: &mut ChaCha8Rng, modes: usize, ops: usize) -> Result<BogoliubovTransform, Failure> {
    let mut chain = Vec::with_capacity(ops);
    for _ in 0..ops {
        let kinds = if modes % 2 == 0 { 4 } else { 3 };
        chain.push(match rng.random_range(0..kinds) {
            0 => PrimitiveOp::Rotation(random_unitary(rng, modes)),
            1 => PrimitiveOp::Displacement(DVector::from_fn(modes, |_, _| {
                C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            })),
            2 => PrimitiveOp::Squeeze(DVector::from_fn(modes, |_, _| {
                rng.random_range(-0.8..0.8)
            })),
            _ => PrimitiveOp::TwoModeSqueeze(DVector::from_fn(modes / 2, |_, _| {
                rng.random_range(0.0..1.5)
            })),
        });
    }
    OpticalCircuit::new(modes, chain)
        .and_then(|c| c.transform(DEFAULT_TOLERANCE))
        .map_err(Failure::from_core)
}

fn random_molecule(rng: &mut ChaCha8Rng, modes: usize) -> Result<MolecularParams, Failure> {
    let omega = DVector::from_fn(modes, |_, _| rng.random_range(600.0..3500.0));
    let omega_prime = omega.map(|w| w * (2.0 * rng.random_range(-0.35_f64..0.35)).exp());
    let duschinsky = random_orthogonal(rng, modes);
    let displacement = DVector::from_fn(modes, |_, _| rng.random_range(-1.0..1.0));
    MolecularParams::new(omega, omega_prime, duschinsky, displacement, Units::Wavenumber)
        .map_err(Failure::from_core)
}

fn entry_difference(a: &BogoliubovTransform, b: &BogoliubovTransform) -> f64 {
    let dx = (a.x() - b.x()).iter().map(|e| e.norm()).fold(0.0, f64::max);
    let dy = (a.y() - b.y()).iter().map(|e| e.norm()).fold(0.0, f64::max);
    let dz = (a.z() - b.z()).iter().map(|e| e.norm()).fold(0.0, f64::max);
    dx.max(dy).max(dz)
}

/// Composed primitive chains satisfy both Bogoliubov constraints.
fn constraint_suite(seed: u64, cfg: &ConfigArgs) -> Result<Suite, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for i in 0..50 {
        let t = random_chain(&mut rng, 1 + i % 4, 4)?;
        let r = t.residuals();
        worst = worst.max(r.metric).max(r.symmetry);
    }
    Ok(Suite {
        name: "transform constraints",
        worst,
        gate: cfg.tolerance,
    })
}

/// The four-stage transition circuit composes to the closed-form transform.
fn circuit_suite(seed: u64, cfg: &ConfigArgs) -> Result<Suite, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let mut worst = 0.0f64;
    for i in 0..25 {
        let mol = random_molecule(&mut rng, 1 + i % 4)?;
        let composed = doktorov_circuit(&mol)
            .and_then(|c| c.transform(DEFAULT_TOLERANCE))
            .map_err(Failure::from_core)?;
        let direct = doktorov_transform(&mol).map_err(Failure::from_core)?;
        worst = worst.max(entry_difference(&composed, &direct));
    }
    Ok(Suite {
        name: "transition circuit",
        worst,
        gate: cfg.tolerance,
    })
}

/// Passive-squeeze-passive factors rebuild the transform they came from.
fn factorization_suite(seed: u64, cfg: &ConfigArgs) -> Result<Suite, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
    let mut worst = 0.0f64;
    for i in 0..25 {
        let t = random_chain(&mut rng, 1 + i % 4, 3)?;
        let f = bloch_messiah(&t, DEFAULT_TOLERANCE).map_err(Failure::from_core)?;
        let dx = (f.reconstruct_x() - t.x()).norm();
        let dy = (f.reconstruct_y() - t.y()).norm();
        worst = worst.max(dx).max(dy);
    }
    Ok(Suite {
        name: "factorization round trip",
        worst,
        gate: cfg.tolerance,
    })
}

/// Direct thermal enumeration and the heralded doubled-mode construction
/// produce the same histogram.
fn route_suite(seed: u64, cfg: &ConfigArgs) -> Result<Suite, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(3));
    let sp = SpectrumParams {
        cutoff: 6,
        epsilon: 1e-4,
        bin_width: 0.01,
        tolerance: DEFAULT_TOLERANCE,
        budget: cfg.budget(),
    };
    let mut worst = 0.0f64;
    for modes in [1_usize, 1, 2] {
        let omega = DVector::from_fn(modes, |_, _| rng.random_range(0.8..1.3));
        let omega_prime = omega.map(|w| w * (2.0 * rng.random_range(-0.3_f64..0.3)).exp());
        let duschinsky = random_orthogonal(&mut rng, modes);
        let displacement = DVector::from_fn(modes, |_, _| rng.random_range(-0.8..0.8));
        let nbar = DVector::from_fn(modes, |_, _| rng.random_range(0.0..0.8));
        let mol = MolecularParams::new(
            omega,
            omega_prime,
            duschinsky,
            displacement,
            Units::Dimensionless,
        )
        .and_then(|m| m.with_thermal_occupation(nbar))
        .map_err(Failure::from_core)?;
        let direct = fcp_direct(&mol, &sp).map_err(Failure::from_core)?;
        let extended = fcp_extended(&mol, &sp).map_err(Failure::from_core)?;
        worst = worst.max(
            direct
                .max_abs_difference(&extended)
                .map_err(Failure::from_core)?,
        );
    }
    Ok(Suite {
        name: "route equivalence",
        worst,
        gate: 1e-6,
    })
}

/// With purified pair inputs and a passive network, the joint readout
/// factorizes into the thermal law times a permanent amplitude.
fn heralding_suite(seed: u64, cfg: &ConfigArgs) -> Result<Suite, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(4));
    let nbar = [rng.random_range(0.2..0.8), rng.random_range(0.2..0.8)];
    let theta = purification_angles(&DVector::from_vec(nbar.to_vec()));
    let u = random_unitary(&mut rng, 2);
    let mut w = DMatrix::from_element(4, 4, C64::new(0.0, 0.0));
    w[(2, 2)] = C64::new(1.0, 0.0);
    w[(3, 3)] = C64::new(1.0, 0.0);
    w.view_mut((0, 0), (2, 2)).copy_from(&u);
    let circuit = OpticalCircuit::new(
        4,
        vec![PrimitiveOp::TwoModeSqueeze(theta), PrimitiveOp::Rotation(w)],
    )
    .map_err(Failure::from_core)?;
    let table = state_probabilities(&circuit, &[0, 0, 0, 0], 6, &cfg.budget(), DEFAULT_TOLERANCE)
        .map_err(Failure::from_core)?;

    let patterns: Vec<[usize; 2]> = (0..=2)
        .flat_map(|a| (0..=2 - a).map(move |b| [a, b]))
        .collect();
    let mut worst = 0.0f64;
    for m in &patterns {
        for n in &patterns {
            let joint = table
                .probability(&[m[0], m[1], n[0], n[1]])
                .map_err(Failure::from_core)?;
            let p_th: f64 = n
                .iter()
                .zip(&nbar)
                .map(|(&k, &nb)| nb.powi(k as i32) / (nb + 1.0).powi(k as i32 + 1))
                .product();
            let amp = rotation_amplitude(&u, m, n, 14).map_err(Failure::from_core)?;
            worst = worst.max((joint - p_th * amp.norm_sqr()).abs());
        }
    }
    Ok(Suite {
        name: "heralded factorization",
        worst,
        gate: 1e-8,
    })
}
