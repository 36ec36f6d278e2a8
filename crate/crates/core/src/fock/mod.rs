//! Truncated Fock-space evaluation of optical circuits.
//!
//! Everything here works on the grid of occupation vectors with each mode
//! capped at a cutoff `c`. A circuit is evaluated as the product of the
//! per-primitive matrices truncated to that grid, applied in circuit order.
//! Matrix entries themselves are exact transition amplitudes; truncation
//! only discards amplitude that passes through occupations above the cutoff,
//! so the bias is one-sided and the captured probability of a table is ≤ 1.
//!
//! Number-conserving rotations act block-diagonally on photon-number
//! sectors, and every sector whose total is ≤ c lies entirely inside the
//! grid, so on those sectors the truncated rotation is exactly unitary.

mod apply;
mod matrices;
mod permanent;

pub use matrices::{
    displacement_matrix, squeeze_matrix, two_mode_squeeze_matrix, two_mode_squeeze_vacuum,
};
pub use permanent::{permanent, rotation_amplitude};

use nalgebra::DVector;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::transform::{OpticalCircuit, PrimitiveOp};

/// Resource guards for Fock-space work.
///
/// `basis_states` caps both the grid dimension (c+1)^M and the entry count
/// of any dense operator block the engine materializes; `permanent_limit`
/// caps the size of a single permanent evaluation.
#[derive(Debug, Clone, Copy)]
pub struct FockBudget {
    pub basis_states: usize,
    pub permanent_limit: usize,
}

impl Default for FockBudget {
    fn default() -> Self {
        Self {
            basis_states: 2_000_000,
            permanent_limit: 14,
        }
    }
}

/// The truncated occupation grid: `modes` modes, each occupation 0..=cutoff.
///
/// Flattening is little-endian in the mode index: mode 0 varies fastest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockGrid {
    modes: usize,
    cutoff: usize,
    dim: usize,
}

impl FockGrid {
    pub fn new(modes: usize, cutoff: usize, budget: &FockBudget) -> Result<Self> {
        if modes == 0 {
            return Err(Error::InvalidParameter("grid needs at least one mode".into()));
        }
        let base = cutoff as u128 + 1;
        let mut dim: u128 = 1;
        for _ in 0..modes {
            dim = dim.saturating_mul(base);
            if dim > budget.basis_states as u128 {
                return Err(Error::BasisBudget {
                    size: dim,
                    budget: budget.basis_states,
                    context: "basis grid (cutoff+1)^modes",
                });
            }
        }
        Ok(Self {
            modes,
            cutoff,
            dim: dim as usize,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn stride(&self, mode: usize) -> usize {
        (self.cutoff + 1).pow(mode as u32)
    }

    /// Linear index of an occupation vector.
    pub fn flat(&self, occ: &[usize]) -> Result<usize> {
        if occ.len() != self.modes {
            return Err(Error::ModeMismatch {
                expected: self.modes,
                got: occ.len(),
            });
        }
        let mut f = 0usize;
        let mut stride = 1usize;
        for &o in occ {
            if o > self.cutoff {
                return Err(Error::InvalidParameter(format!(
                    "occupation {o} exceeds cutoff {}",
                    self.cutoff
                )));
            }
            f += o * stride;
            stride *= self.cutoff + 1;
        }
        Ok(f)
    }

    /// Occupation vector for a linear index.
    pub fn occupation(&self, mut flat: usize) -> Vec<usize> {
        let mut occ = vec![0; self.modes];
        for slot in occ.iter_mut() {
            *slot = flat % (self.cutoff + 1);
            flat /= self.cutoff + 1;
        }
        occ
    }

    pub fn total(&self, mut flat: usize) -> usize {
        let mut t = 0;
        while flat > 0 {
            t += flat % (self.cutoff + 1);
            flat /= self.cutoff + 1;
        }
        t
    }
}

/// Amplitudes of a state over a [`FockGrid`], in flat-index order.
#[derive(Debug, Clone)]
pub struct FockAmplitudeTable {
    grid: FockGrid,
    amplitudes: Vec<C64>,
}

impl FockAmplitudeTable {
    pub(crate) fn new(grid: FockGrid, amplitudes: Vec<C64>) -> Self {
        debug_assert_eq!(grid.dim(), amplitudes.len());
        Self { grid, amplitudes }
    }

    pub fn grid(&self) -> &FockGrid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, occ: &[usize]) -> Result<C64> {
        Ok(self.amplitudes[self.grid.flat(occ)?])
    }

    pub fn probability(&self, occ: &[usize]) -> Result<f64> {
        Ok(self.amplitude(occ)?.norm_sqr())
    }

    /// Total probability retained on the grid; ≤ 1, and the deficit is the
    /// mass lost to truncation.
    pub fn captured_probability(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// ⟨m| C |n⟩ for a circuit, evaluated on the truncated grid.
pub fn circuit_amplitude(
    circuit: &OpticalCircuit,
    m: &[usize],
    n: &[usize],
    cutoff: usize,
    budget: &FockBudget,
    tol: f64,
) -> Result<C64> {
    let grid = FockGrid::new(circuit.mode_count(), cutoff, budget)?;
    let target = grid.flat(m)?;
    let table = evolve_basis_state(circuit, grid, n, budget, tol)?;
    Ok(table.amplitudes[target])
}

/// The full amplitude table of C|n⟩ on the truncated grid.
pub fn state_probabilities(
    circuit: &OpticalCircuit,
    n: &[usize],
    cutoff: usize,
    budget: &FockBudget,
    tol: f64,
) -> Result<FockAmplitudeTable> {
    let grid = FockGrid::new(circuit.mode_count(), cutoff, budget)?;
    evolve_basis_state(circuit, grid, n, budget, tol)
}

/// The amplitude table of C|n⟩ restricted to occupations of at most
/// `readout_cutoff` per mode, evolved on a grid with the larger per-mode
/// cutoff `evolve_cutoff` so truncation happens far from the reported block.
///
/// When the circuit ends in a rotation, that stage is evaluated with the
/// readout restriction built in: only amplitude rows inside the readout block
/// are formed, so the evolution grid's sector blocks never materialize.
pub fn readout_probabilities(
    circuit: &OpticalCircuit,
    n: &[usize],
    evolve_cutoff: usize,
    readout_cutoff: usize,
    budget: &FockBudget,
    tol: f64,
) -> Result<FockAmplitudeTable> {
    if readout_cutoff > evolve_cutoff {
        return Err(Error::InvalidParameter(format!(
            "readout cutoff {readout_cutoff} exceeds evolution cutoff {evolve_cutoff}"
        )));
    }
    let grid = FockGrid::new(circuit.mode_count(), evolve_cutoff, budget)?;
    let out_grid = FockGrid::new(circuit.mode_count(), readout_cutoff, budget)?;
    let start = grid.flat(n)?;
    let mut psi = vec![C64::new(0.0, 0.0); grid.dim()];
    psi[start] = C64::new(1.0, 0.0);
    let ops = circuit.ops();
    for (i, op) in ops.iter().enumerate() {
        if i + 1 == ops.len() {
            if let PrimitiveOp::Rotation(u) = op {
                let out = apply::rotation_readout(&psi, &grid, u, &out_grid, budget, tol)?;
                return Ok(FockAmplitudeTable::new(out_grid, out));
            }
        }
        apply::apply_op(op, &grid, &mut psi, budget, tol)?;
    }
    let mut out = vec![C64::new(0.0, 0.0); out_grid.dim()];
    for (flat_out, slot) in out.iter_mut().enumerate() {
        *slot = psi[grid.flat(&out_grid.occupation(flat_out))?];
    }
    Ok(FockAmplitudeTable::new(out_grid, out))
}

fn evolve_basis_state(
    circuit: &OpticalCircuit,
    grid: FockGrid,
    n: &[usize],
    budget: &FockBudget,
    tol: f64,
) -> Result<FockAmplitudeTable> {
    let start = grid.flat(n)?;
    let mut psi = vec![C64::new(0.0, 0.0); grid.dim()];
    psi[start] = C64::new(1.0, 0.0);
    for op in circuit.ops() {
        apply::apply_op(op, &grid, &mut psi, budget, tol)?;
    }
    Ok(FockAmplitudeTable::new(grid, psi))
}

/// ln(n!), exact through the f64 table and by log-sum beyond 20!.
pub(crate) fn ln_factorial(n: usize) -> f64 {
    const EXACT: [f64; 21] = [
        1.0,
        1.0,
        2.0,
        6.0,
        24.0,
        120.0,
        720.0,
        5040.0,
        40320.0,
        362880.0,
        3628800.0,
        39916800.0,
        479001600.0,
        6227020800.0,
        87178291200.0,
        1307674368000.0,
        20922789888000.0,
        355687428096000.0,
        6402373705728000.0,
        121645100408832000.0,
        2432902008176640000.0,
    ];
    if n <= 20 {
        EXACT[n].ln()
    } else {
        EXACT[20].ln() + (21..=n).map(|k| (k as f64).ln()).sum::<f64>()
    }
}

/// exp(−½ Σ ln(occ_i!)), the inverse square-root factorial normalization.
pub(crate) fn inv_sqrt_factorial_product(occ: &[usize]) -> f64 {
    let ln: f64 = occ.iter().map(|&o| ln_factorial(o)).sum();
    (-0.5 * ln).exp()
}

pub(crate) fn real_to_complex_matrix(m: &nalgebra::DMatrix<f64>) -> nalgebra::DMatrix<C64> {
    m.map(|v| C64::new(v, 0.0))
}

#[allow(dead_code)]
pub(crate) fn basis_vector(grid: &FockGrid, occ: &[usize]) -> Result<DVector<C64>> {
    let mut v = DVector::zeros(grid.dim());
    v[grid.flat(occ)?] = C64::new(1.0, 0.0);
    Ok(v)
}
