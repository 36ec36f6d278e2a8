//! Molecular normal-mode data and the vibronic transform between two
//! electronic surfaces.
//!
//! A molecule is described by the harmonic frequencies of both surfaces, the
//! Duschinsky rotation between their normal coordinates, and the equilibrium
//! displacement. Frequencies are rescaled internally by a fixed reference so
//! the mode operators are dimensionless:
//!
//! ```text
//! J = diag(√ω') U diag(1/√ω)          δ = diag(√ω') d
//! X = (J − J^{-T}) / 2                Y = (J + J^{-T}) / 2       z = δ/√2
//! ```
//!
//! with ω, ω' in units of the reference. The same transform is realized as a
//! circuit of per-mode squeezers around the Duschinsky rotation, which is the
//! form the Fock-space engine consumes.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::transform::{BogoliubovTransform, OpticalCircuit, PrimitiveOp};

/// Reference frequency for wavenumber inputs, in cm⁻¹. Every frequency in a
/// "cm-1" molecule is divided by this before entering mode operators, and
/// spectra report user-facing frequencies in the original wavenumbers.
pub const OMEGA_REF_WAVENUMBER: f64 = 1000.0;

/// Second radiation constant h·c/k_B in cm·K, used to convert a wavenumber
/// and a temperature in kelvin into a Bose occupation.
pub const SECOND_RADIATION_CM_K: f64 = 1.438777;

/// Unit system of a molecule's frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Units {
    /// Frequencies in cm⁻¹, temperature in kelvin.
    Wavenumber,
    /// Frequencies already dimensionless, temperature given as an energy in
    /// the same scale (the occupation uses x = ω/T directly).
    Dimensionless,
}

impl Units {
    /// The frequency that maps to 1 internally.
    pub fn omega_ref(self) -> f64 {
        match self {
            Units::Wavenumber => OMEGA_REF_WAVENUMBER,
            Units::Dimensionless => 1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Units::Wavenumber => "cm-1",
            Units::Dimensionless => "dimensionless",
        }
    }
}

/// Validated parameters of a vibronic transition.
#[derive(Debug, Clone)]
pub struct MolecularParams {
    omega: DVector<f64>,
    omega_prime: DVector<f64>,
    duschinsky: DMatrix<f64>,
    displacement: DVector<f64>,
    units: Units,
    temperature: Option<f64>,
    nbar: Option<DVector<f64>>,
    adiabatic_offset: f64,
}

impl MolecularParams {
    /// Build and validate the zero-temperature core of a molecule. `omega`
    /// and `omega_prime` are the initial- and final-surface frequencies,
    /// `duschinsky` the orthogonal mode rotation, and `displacement` the
    /// dimensionless equilibrium shift along the final-surface modes.
    pub fn new(
        omega: DVector<f64>,
        omega_prime: DVector<f64>,
        duschinsky: DMatrix<f64>,
        displacement: DVector<f64>,
        units: Units,
    ) -> Result<Self> {
        let m = omega.len();
        if m == 0 {
            return Err(Error::InvalidParameter(
                "a molecule needs at least one mode".into(),
            ));
        }
        if omega_prime.len() != m {
            return Err(Error::ModeMismatch {
                expected: m,
                got: omega_prime.len(),
            });
        }
        if displacement.len() != m {
            return Err(Error::ModeMismatch {
                expected: m,
                got: displacement.len(),
            });
        }
        if duschinsky.nrows() != m || duschinsky.ncols() != m {
            return Err(Error::NotSquare {
                what: "Duschinsky matrix",
                rows: duschinsky.nrows(),
                cols: duschinsky.ncols(),
            });
        }
        for (label, v) in [("omega", &omega), ("omega_prime", &omega_prime)] {
            if let Some(bad) = v.iter().find(|&&w| !(w > 0.0) || !w.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{label} entries must be positive and finite, got {bad}"
                )));
            }
        }
        let ortho = (duschinsky.transpose() * &duschinsky - DMatrix::<f64>::identity(m, m)).norm();
        if ortho > 1e-8 {
            return Err(Error::NotUnitary {
                what: "Duschinsky matrix",
                residual: ortho,
                tol: 1e-8,
            });
        }
        if displacement.iter().any(|d| !d.is_finite()) {
            return Err(Error::InvalidParameter(
                "displacement entries must be finite".into(),
            ));
        }
        Ok(Self {
            omega,
            omega_prime,
            duschinsky,
            displacement,
            units,
            temperature: None,
            nbar: None,
            adiabatic_offset: 0.0,
        })
    }

    /// Set the initial-state temperature (kelvin for wavenumber molecules,
    /// an energy on the frequency scale for dimensionless ones).
    pub fn with_temperature(mut self, temperature: f64) -> Result<Self> {
        if !(temperature >= 0.0) || !temperature.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "temperature must be finite and nonnegative, got {temperature}"
            )));
        }
        self.temperature = Some(temperature);
        Ok(self)
    }

    /// Pin the initial-state occupations directly, overriding `temperature`.
    pub fn with_thermal_occupation(mut self, nbar: DVector<f64>) -> Result<Self> {
        if nbar.len() != self.modes() {
            return Err(Error::ModeMismatch {
                expected: self.modes(),
                got: nbar.len(),
            });
        }
        if nbar.iter().any(|n| !(*n >= 0.0) || !n.is_finite()) {
            return Err(Error::InvalidParameter(
                "mean occupations must be finite and nonnegative".into(),
            ));
        }
        self.nbar = Some(nbar);
        Ok(self)
    }

    /// Rigid energy offset between the surfaces, added to every transition
    /// frequency (same units as the frequencies).
    pub fn with_adiabatic_offset(mut self, offset: f64) -> Result<Self> {
        if !offset.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "adiabatic offset must be finite, got {offset}"
            )));
        }
        self.adiabatic_offset = offset;
        Ok(self)
    }

    pub fn modes(&self) -> usize {
        self.omega.len()
    }

    /// Initial-surface frequencies in user units.
    pub fn omega(&self) -> &DVector<f64> {
        &self.omega
    }

    /// Final-surface frequencies in user units.
    pub fn omega_prime(&self) -> &DVector<f64> {
        &self.omega_prime
    }

    pub fn duschinsky(&self) -> &DMatrix<f64> {
        &self.duschinsky
    }

    pub fn displacement(&self) -> &DVector<f64> {
        &self.displacement
    }

    pub fn units(&self) -> Units {
        self.units
    }

    pub fn temperature(&self) -> Option<f64> {
        self.temperature
    }

    pub fn adiabatic_offset(&self) -> f64 {
        self.adiabatic_offset
    }

    /// Initial frequencies over the unit reference.
    pub fn internal_omega(&self) -> DVector<f64> {
        &self.omega / self.units.omega_ref()
    }

    /// Final frequencies over the unit reference.
    pub fn internal_omega_prime(&self) -> DVector<f64> {
        &self.omega_prime / self.units.omega_ref()
    }

    /// Mean photon occupation of each initial-surface mode: the explicit
    /// override when present, otherwise the Bose factor of the temperature,
    /// otherwise zero.
    pub fn thermal_occupation(&self) -> DVector<f64> {
        if let Some(nbar) = &self.nbar {
            return nbar.clone();
        }
        let t = match self.temperature {
            Some(t) if t > 0.0 => t,
            _ => return DVector::zeros(self.modes()),
        };
        self.omega.map(|w| {
            let x = match self.units {
                Units::Wavenumber => SECOND_RADIATION_CM_K * w / t,
                Units::Dimensionless => w / t,
            };
            let e = x.exp();
            if e.is_finite() {
                1.0 / (e - 1.0)
            } else {
                0.0
            }
        })
    }
}

/// The internal-unit Duschinsky data entering the transform.
#[derive(Debug, Clone)]
pub struct DuschinskyParams {
    /// J = diag(√ω') U diag(1/√ω).
    pub j: DMatrix<f64>,
    /// δ = diag(√ω') d.
    pub delta: DVector<f64>,
}

pub fn duschinsky_params(params: &MolecularParams) -> DuschinskyParams {
    let wi = params.internal_omega();
    let wf = params.internal_omega_prime();
    let m = params.modes();
    let mut j = params.duschinsky().clone();
    for r in 0..m {
        for c in 0..m {
            j[(r, c)] *= (wf[r] / wi[c]).sqrt();
        }
    }
    let delta = DVector::from_fn(m, |k, _| wf[k].sqrt() * params.displacement()[k]);
    DuschinskyParams { j, delta }
}

/// The Bogoliubov transform of the vibronic transition.
pub fn doktorov_transform(params: &MolecularParams) -> Result<BogoliubovTransform> {
    let dp = duschinsky_params(params);
    let j_inv_t = dp
        .j
        .clone()
        .transpose()
        .try_inverse()
        .ok_or(Error::InvalidParameter(
            "Duschinsky data produced a singular J matrix".into(),
        ))?;
    let x = (&dp.j - &j_inv_t).map(|v| C64::new(v / 2.0, 0.0));
    let y = (&dp.j + &j_inv_t).map(|v| C64::new(v / 2.0, 0.0));
    let z = dp
        .delta
        .map(|v| C64::new(v / std::f64::consts::SQRT_2, 0.0));
    BogoliubovTransform::new(x, y, z, crate::transform::DEFAULT_TOLERANCE)
}

/// The same transform as an explicit circuit: unsqueeze the initial-surface
/// scales, rotate between mode bases, squeeze into the final-surface scales,
/// then displace.
pub fn doktorov_circuit(params: &MolecularParams) -> Result<OpticalCircuit> {
    let wi = params.internal_omega();
    let wf = params.internal_omega_prime();
    let dp = duschinsky_params(params);
    let u = params.duschinsky().map(|v| C64::new(v, 0.0));
    let ops = vec![
        PrimitiveOp::Squeeze(wi.map(|w| -0.5 * w.ln())),
        PrimitiveOp::Rotation(u),
        PrimitiveOp::Squeeze(wf.map(|w| 0.5 * w.ln())),
        PrimitiveOp::Displacement(
            dp.delta
                .map(|v| C64::new(v / std::f64::consts::SQRT_2, 0.0)),
        ),
    ];
    OpticalCircuit::new(params.modes(), ops)
}
