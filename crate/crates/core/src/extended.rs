//! Finite-temperature extension on doubled modes.
//!
//! A thermal initial state with mean occupations n̄ is purified by pairing
//! every system mode with an ancilla through a two-mode squeezer of angle
//! θ = 2 asinh(√n̄). Absorbing those squeezers into a vibronic transform T on
//! the system half yields a single zero-temperature transform on 2M modes:
//!
//! ```text
//! F = diag(√(n̄+1)),  G = diag(√n̄)
//! 𝒳 = [ X F   Y G ]     𝒴 = [ Y F   X G ]     γ = (z, 0)
//!     [  G     0  ]         [  0     F  ]
//! ```
//!
//! Synthesizing that transform and commuting its displacement to the front
//! turns the whole finite-temperature problem into vacuum input → displacement
//! → squeezers → one interferometer, with heralds on the ancilla half.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::bloch_messiah::{bloch_messiah, reorder_displacement};
use crate::doktorov::{doktorov_transform, MolecularParams};
use crate::error::{Error, Result};
use crate::transform::{BogoliubovTransform, OpticalCircuit, PrimitiveOp};

/// Two-mode squeeze angles that purify the occupations: sinh(θ/2) = √n̄.
pub fn purification_angles(nbar: &DVector<f64>) -> DVector<f64> {
    nbar.map(|n| 2.0 * n.sqrt().asinh())
}

/// Absorb a purified thermal input into `t`, producing the doubled-mode
/// transform described at the module level. Mode k is paired with ancilla
/// M + k.
pub fn extend_transform(
    t: &BogoliubovTransform,
    nbar: &DVector<f64>,
) -> Result<BogoliubovTransform> {
    let m = t.mode_count();
    if nbar.len() != m {
        return Err(Error::ModeMismatch {
            expected: m,
            got: nbar.len(),
        });
    }
    if nbar.iter().any(|n| !(*n >= 0.0) || !n.is_finite()) {
        return Err(Error::InvalidParameter(
            "mean occupations must be finite and nonnegative".into(),
        ));
    }
    let f = nbar.map(|n| (n + 1.0).sqrt());
    let g = nbar.map(|n| n.sqrt());

    let mut xx = DMatrix::<C64>::zeros(2 * m, 2 * m);
    let mut yy = DMatrix::<C64>::zeros(2 * m, 2 * m);
    for r in 0..m {
        for c in 0..m {
            xx[(r, c)] = t.x()[(r, c)] * f[c];
            xx[(r, m + c)] = t.y()[(r, c)] * g[c];
            yy[(r, c)] = t.y()[(r, c)] * f[c];
            yy[(r, m + c)] = t.x()[(r, c)] * g[c];
        }
    }
    for k in 0..m {
        xx[(m + k, k)] = C64::new(g[k], 0.0);
        yy[(m + k, m + k)] = C64::new(f[k], 0.0);
    }
    let mut gamma = DVector::<C64>::zeros(2 * m);
    for k in 0..m {
        gamma[k] = t.z()[k];
    }
    BogoliubovTransform::new(xx, yy, gamma, crate::transform::DEFAULT_TOLERANCE)
}

/// The doubled-mode transform of a molecule at its configured temperature.
pub fn extended_vibronic_transform(params: &MolecularParams) -> Result<BogoliubovTransform> {
    let t = doktorov_transform(params)?;
    extend_transform(&t, &params.thermal_occupation())
}

/// Vacuum-input preparation of the state a doubled-mode transform produces:
/// displace, squeeze each mode, then apply one interferometer.
#[derive(Debug, Clone)]
pub struct VibronicInputPrep {
    /// Per-mode displacement applied first.
    pub displacement: DVector<C64>,
    /// Per-mode squeeze parameters, in decreasing order.
    pub squeeze: DVector<f64>,
    /// Output interferometer.
    pub interferometer: DMatrix<C64>,
}

impl VibronicInputPrep {
    pub fn mode_count(&self) -> usize {
        self.displacement.len()
    }

    /// The preparation as a circuit on the doubled register.
    pub fn circuit(&self) -> Result<OpticalCircuit> {
        OpticalCircuit::new(
            self.mode_count(),
            vec![
                PrimitiveOp::Displacement(self.displacement.clone()),
                PrimitiveOp::Squeeze(self.squeeze.clone()),
                PrimitiveOp::Rotation(self.interferometer.clone()),
            ],
        )
    }
}

/// Factor a (typically doubled-mode) transform into input-prep form.
///
/// The displacement is first moved to the input side (δ with X δ + Y δ̄ = z),
/// then commuted through the input interferometer R† of the factorization,
/// which acts trivially on vacuum and drops out: δ picks up a factor Rᵀ.
pub fn synthesize_vibronic_prep(t: &BogoliubovTransform, tol: f64) -> Result<VibronicInputPrep> {
    let delta = reorder_displacement(t)?;
    let factors = bloch_messiah(t, tol)?;
    let displacement = factors.right.transpose() * delta;
    Ok(VibronicInputPrep {
        displacement,
        squeeze: factors.squeeze,
        interferometer: factors.left,
    })
}
