//! Franck-Condon profiles at zero or finite temperature.
//!
//! A profile is a histogram over transition frequency: every pair of an
//! initial occupation n (Boltzmann-weighted on the initial surface) and a
//! final occupation m contributes its transition probability at
//!
//! ```text
//! ω(m, n) = Σ_j m_j ω'_j − Σ_j n_j ω_j + ω_ad
//! ```
//!
//! in the molecule's own frequency units. Two routes produce the histogram:
//!
//! * [`fcp_direct`] enumerates the thermal ensemble down to coverage 1 − ε
//!   and pushes each |n⟩ through the vibronic circuit separately;
//! * [`fcp_extended`] prepares one pure state on doubled modes whose ancilla
//!   half heralds n, reading the whole ensemble out of a single pass.
//!
//! Both routes bin identical (m, n) pairs — the extended route restricts its
//! heralds to the same ε-ensemble — so their histograms agree up to Fock
//! truncation and can be cross-checked bin by bin.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::collections::BTreeMap;

use nalgebra::DVector;
use rayon::prelude::*;

use crate::doktorov::{doktorov_circuit, MolecularParams};
use crate::error::{Error, Result};
use crate::extended::{extended_vibronic_transform, synthesize_vibronic_prep};
use crate::fock::{readout_probabilities, FockAmplitudeTable, FockBudget, FockGrid};
use crate::transform::OpticalCircuit;

/// Knobs shared by both spectrum routes.
#[derive(Debug, Clone)]
pub struct SpectrumParams {
    /// Per-mode Fock cutoff of the truncated grids.
    pub cutoff: usize,
    /// Thermal ensemble tail mass left out (coverage target 1 − ε).
    pub epsilon: f64,
    /// Histogram bin width in the molecule's frequency units.
    pub bin_width: f64,
    /// Numerical tolerance handed to transform validation and synthesis.
    pub tolerance: f64,
    /// Cost guards for grids and ensembles.
    pub budget: FockBudget,
}

impl SpectrumParams {
    pub fn validate(&self) -> Result<()> {
        if self.cutoff == 0 {
            return Err(Error::InvalidParameter("cutoff must be at least 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        if !(self.bin_width > 0.0) || !self.bin_width.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "bin width must be positive and finite, got {}",
                self.bin_width
            )));
        }
        if !(self.tolerance > 0.0) || !self.tolerance.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be positive and finite, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }
}

/// Which pipeline produced a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Direct,
    Extended,
}

impl Route {
    pub fn label(self) -> &'static str {
        match self {
            Route::Direct => "direct",
            Route::Extended => "extended",
        }
    }
}

/// Initial-state occupations with their thermal weights, heaviest first,
/// covering at least 1 − ε of the Boltzmann distribution.
#[derive(Debug, Clone)]
pub struct ThermalEnsemble {
    entries: Vec<(Vec<usize>, f64)>,
    coverage: f64,
}

impl ThermalEnsemble {
    /// Occupation patterns and weights, in decreasing weight order.
    pub fn entries(&self) -> &[(Vec<usize>, f64)] {
        &self.entries
    }

    /// Total weight of the retained patterns.
    pub fn coverage(&self) -> f64 {
        self.coverage
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

struct HeapEntry {
    weight: f64,
    occ: Vec<usize>,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.weight == other.weight && self.occ == other.occ
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // max-heap on weight; on ties the lexicographically smaller pattern
        // pops first, which keeps the enumeration fully deterministic
        self.weight
            .partial_cmp(&other.weight)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.occ.cmp(&self.occ))
    }
}

/// Enumerate thermal occupation patterns in decreasing weight until their
/// cumulative probability reaches 1 − ε, or fail against `limit`.
///
/// Patterns form a tree in which each node appends quanta only at or beyond
/// its last occupied mode, so every pattern is generated exactly once, and
/// child weights never exceed the parent's; a max-heap then yields a globally
/// nonincreasing stream.
pub fn thermal_ensemble(
    nbar: &DVector<f64>,
    epsilon: f64,
    limit: usize,
) -> Result<ThermalEnsemble> {
    let m = nbar.len();
    if nbar.iter().any(|n| !(*n >= 0.0) || !n.is_finite()) {
        return Err(Error::InvalidParameter(
            "mean occupations must be finite and nonnegative".into(),
        ));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "ensemble epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    let ratio: Vec<f64> = nbar.iter().map(|&n| n / (n + 1.0)).collect();
    let vacuum_weight: f64 = nbar.iter().map(|&n| 1.0 / (n + 1.0)).product();

    let mut heap = BinaryHeap::new();
    heap.push(HeapEntry {
        weight: vacuum_weight,
        occ: vec![0; m],
    });
    let mut entries = Vec::new();
    let mut coverage = 0.0;
    let target = 1.0 - epsilon;
    while coverage < target {
        let Some(HeapEntry { weight, occ }) = heap.pop() else {
            break; // only reachable when every ratio is zero
        };
        coverage += weight;
        let first_growable = occ.iter().rposition(|&o| o > 0).unwrap_or(0);
        for k in first_growable..m {
            if ratio[k] > 0.0 {
                let mut child = occ.clone();
                child[k] += 1;
                heap.push(HeapEntry {
                    weight: weight * ratio[k],
                    occ: child,
                });
            }
        }
        entries.push((occ, weight));
        if entries.len() > limit {
            return Err(Error::BasisBudget {
                size: entries.len() as u128,
                budget: limit,
                context: "thermal ensemble enumeration",
            });
        }
    }
    Ok(ThermalEnsemble { entries, coverage })
}

/// A binned Franck-Condon profile. Bin i covers frequencies
/// [(first_bin + i)·w, (first_bin + i + 1)·w); the bins are contiguous.
#[derive(Debug, Clone)]
pub struct Spectrum {
    route: Route,
    bin_width: f64,
    first_bin: i64,
    intensities: Vec<f64>,
    captured_probability: f64,
    cutoff: usize,
    epsilon: f64,
    temperature: Option<f64>,
}

impl Spectrum {
    fn from_accumulator(
        route: Route,
        sp: &SpectrumParams,
        temperature: Option<f64>,
        bins: BTreeMap<i64, f64>,
        captured_probability: f64,
    ) -> Self {
        let (first_bin, intensities) = match (bins.keys().next(), bins.keys().next_back()) {
            (Some(&lo), Some(&hi)) => {
                let mut dense = vec![0.0; (hi - lo + 1) as usize];
                for (k, v) in &bins {
                    dense[(k - lo) as usize] = *v;
                }
                (lo, dense)
            }
            _ => (0, Vec::new()),
        };
        Self {
            route,
            bin_width: sp.bin_width,
            first_bin,
            intensities,
            captured_probability,
            cutoff: sp.cutoff,
            epsilon: sp.epsilon,
            temperature,
        }
    }

    pub fn route(&self) -> Route {
        self.route
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_width
    }

    /// Per-mode Fock cutoff the profile was computed at.
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Thermal truncation ε the ensemble was enumerated with.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Temperature of the molecule, if it was given as one.
    pub fn temperature(&self) -> Option<f64> {
        self.temperature
    }

    /// Index of the first stored bin (bin k covers [k·w, (k+1)·w)).
    pub fn first_bin(&self) -> i64 {
        self.first_bin
    }

    pub fn intensities(&self) -> &[f64] {
        &self.intensities
    }

    pub fn len(&self) -> usize {
        self.intensities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intensities.is_empty()
    }

    /// Lower frequency edge of stored bin i.
    pub fn bin_start(&self, i: usize) -> f64 {
        (self.first_bin + i as i64) as f64 * self.bin_width
    }

    /// Intensity of the absolute bin index k, zero outside the stored range.
    pub fn intensity_at(&self, k: i64) -> f64 {
        if k < self.first_bin {
            return 0.0;
        }
        let i = (k - self.first_bin) as usize;
        self.intensities.get(i).copied().unwrap_or(0.0)
    }

    /// Probability mass that survived ensemble and Fock truncation; at most 1,
    /// and also the sum of all bin intensities.
    pub fn captured_probability(&self) -> f64 {
        self.captured_probability
    }

    pub fn total_intensity(&self) -> f64 {
        self.intensities.iter().sum()
    }

    /// Largest bin-wise intensity difference against another spectrum with
    /// the same bin width.
    pub fn max_abs_difference(&self, other: &Spectrum) -> Result<f64> {
        if self.bin_width != other.bin_width {
            return Err(Error::InvalidParameter(format!(
                "bin widths differ: {} vs {}",
                self.bin_width, other.bin_width
            )));
        }
        let lo = self.first_bin.min(other.first_bin);
        let hi = (self.first_bin + self.intensities.len() as i64)
            .max(other.first_bin + other.intensities.len() as i64);
        let mut worst = 0.0f64;
        for k in lo..hi {
            worst = worst.max((self.intensity_at(k) - other.intensity_at(k)).abs());
        }
        Ok(worst)
    }

    /// The profile smoothed with a normalized Gaussian of standard deviation
    /// `sigma`, sampled at `samples_per_bin` points per bin width across the
    /// stored range padded by 6σ. Presentation only: each bin's mass is
    /// placed as a stick at the bin center, so the samples integrate back to
    /// the captured probability (up to the 6σ tails), but nothing downstream
    /// consumes them.
    pub fn gaussian_broadened(
        &self,
        sigma: f64,
        samples_per_bin: usize,
    ) -> Result<Vec<(f64, f64)>> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "broadening width must be positive and finite, got {sigma}"
            )));
        }
        if samples_per_bin == 0 {
            return Err(Error::InvalidParameter(
                "samples_per_bin must be at least 1".into(),
            ));
        }
        if self.intensities.is_empty() {
            return Ok(Vec::new());
        }
        let sticks: Vec<(f64, f64)> = self
            .intensities
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, &v)| (self.bin_start(i) + 0.5 * self.bin_width, v))
            .collect();
        let lo = self.first_bin as f64 * self.bin_width - 6.0 * sigma;
        let hi = (self.first_bin + self.intensities.len() as i64) as f64 * self.bin_width
            + 6.0 * sigma;
        let step = self.bin_width / samples_per_bin as f64;
        let count = ((hi - lo) / step).ceil() as usize + 1;
        let norm = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
        Ok((0..count)
            .map(|i| {
                let x = lo + i as f64 * step;
                let y: f64 = sticks
                    .iter()
                    .map(|&(c, mass)| {
                        let t = (x - c) / sigma;
                        mass * norm * (-0.5 * t * t).exp()
                    })
                    .sum();
                (x, y)
            })
            .collect())
    }
}

fn bin_index(freq: f64, width: f64) -> i64 {
    (freq / width).floor() as i64
}

/// Sum of occupation-weighted frequencies for every state of a grid.
fn grid_energies(grid: &FockGrid, omega: &DVector<f64>) -> Vec<f64> {
    (0..grid.dim())
        .map(|flat| {
            grid.occupation(flat)
                .iter()
                .zip(omega.iter())
                .map(|(&n, &w)| n as f64 * w)
                .sum()
        })
        .collect()
}

/// Ensemble entries that fit on the grid, in enumeration order. Entries above
/// the cutoff are dropped; their weight simply never reaches the histogram.
fn entries_within_cutoff<'a>(
    ensemble: &'a ThermalEnsemble,
    cutoff: usize,
) -> Vec<(&'a Vec<usize>, f64)> {
    ensemble
        .entries()
        .iter()
        .filter(|(occ, _)| occ.iter().all(|&o| o <= cutoff))
        .map(|(occ, w)| (occ, *w))
        .collect()
}

/// Per-total state counts of a grid with `modes` modes and the given cutoff.
fn sector_counts(modes: usize, cutoff: usize) -> Vec<u128> {
    let mut counts = vec![1u128];
    for _ in 0..modes {
        let mut next = vec![0u128; counts.len() + cutoff];
        for (t, &c) in counts.iter().enumerate() {
            for add in 0..=cutoff {
                next[t + add] += c;
            }
        }
        counts = next;
    }
    counts
}

fn grid_dim_fits(modes: usize, cutoff: usize, budget: &FockBudget) -> bool {
    ((cutoff + 1) as u128)
        .checked_pow(modes as u32)
        .is_some_and(|d| d <= budget.basis_states as u128)
}

/// Whether a full evolution at this cutoff stays under the budget, counting
/// both the grid and the square photon-number-sector blocks a rotation builds.
fn fits_direct(modes: usize, cutoff: usize, budget: &FockBudget) -> bool {
    grid_dim_fits(modes, cutoff, budget)
        && sector_counts(modes, cutoff)
            .iter()
            .all(|&d| d.checked_mul(d).is_some_and(|sq| sq <= budget.basis_states as u128))
}

/// Whether evolving at this cutoff and reading out at `out_cutoff` stays under
/// the budget: the final rotation is applied as rectangular sector blocks with
/// rows from the readout grid and columns from the evolution grid.
fn fits_readout(modes: usize, out_cutoff: usize, cutoff: usize, budget: &FockBudget) -> bool {
    if !grid_dim_fits(modes, cutoff, budget) {
        return false;
    }
    let rows = sector_counts(modes, out_cutoff);
    let cols = sector_counts(modes, cutoff);
    rows.iter()
        .zip(&cols)
        .all(|(&r, &c)| r.checked_mul(c).is_some_and(|b| b <= budget.basis_states as u128))
}

fn widen_while_feasible(from: usize, desired: usize, fits: impl Fn(usize) -> bool) -> usize {
    let mut c = from;
    while c < desired && fits(c + 1) {
        c += 1;
    }
    c
}

const EVOLVE_HEADROOM: usize = 4;
const EVOLVE_STEP: usize = 6;
const EVOLVE_ROUNDS: usize = 16;
const CONVERGENCE_DELTA: f64 = 1e-12;

/// Probabilities of reading every |m⟩ with per-mode occupation ≤
/// `readout_cutoff` after evolving |n⟩, on an evolution grid widened until
/// the readout stops moving.
///
/// Displacements and squeezes route amplitude through occupations above any
/// fixed cutoff and back down, so evolving on the readout grid itself biases
/// exactly the states the histogram keeps. Starting from `start_desired`
/// (clamped to what `fits` allows) and stepping until the largest readout
/// change falls below [`CONVERGENCE_DELTA`] removes the bias without
/// guessing a universal margin. The budget caps the widening instead of
/// failing it; the readout grid itself is still guarded downstream.
fn converged_readout(
    circuit: &OpticalCircuit,
    occ: &[usize],
    start_desired: usize,
    fits: impl Fn(usize) -> bool,
    sp: &SpectrumParams,
) -> Result<FockAmplitudeTable> {
    let mut cutoff = widen_while_feasible(sp.cutoff, start_desired, &fits);
    let mut table =
        readout_probabilities(circuit, occ, cutoff, sp.cutoff, &sp.budget, sp.tolerance)?;
    for _ in 0..EVOLVE_ROUNDS {
        let next_cutoff = widen_while_feasible(cutoff, cutoff + EVOLVE_STEP, &fits);
        if next_cutoff == cutoff {
            break;
        }
        let next =
            readout_probabilities(circuit, occ, next_cutoff, sp.cutoff, &sp.budget, sp.tolerance)?;
        let drift = table
            .amplitudes()
            .iter()
            .zip(next.amplitudes())
            .map(|(a, b)| (a.norm_sqr() - b.norm_sqr()).abs())
            .fold(0.0, f64::max);
        table = next;
        cutoff = next_cutoff;
        if drift < CONVERGENCE_DELTA {
            break;
        }
    }
    Ok(table)
}

/// Franck-Condon profile by direct enumeration of the thermal ensemble.
pub fn fcp_direct(params: &MolecularParams, sp: &SpectrumParams) -> Result<Spectrum> {
    sp.validate()?;
    let m = params.modes();
    let grid = FockGrid::new(m, sp.cutoff, &sp.budget)?;
    let ensemble = thermal_ensemble(
        &params.thermal_occupation(),
        sp.epsilon,
        sp.budget.basis_states,
    )?;
    let kept = entries_within_cutoff(&ensemble, sp.cutoff);
    let circuit = doktorov_circuit(params)?;

    let tables = kept
        .par_iter()
        .map(|(occ, _)| {
            let total: usize = occ.iter().sum();
            converged_readout(
                &circuit,
                occ,
                sp.cutoff + total + EVOLVE_HEADROOM,
                |c| fits_direct(m, c, &sp.budget),
                sp,
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let energy_final = grid_energies(&grid, params.omega_prime());
    let omega_initial = params.omega();
    let mut bins = BTreeMap::new();
    let mut captured = 0.0;
    for ((occ, weight), table) in kept.iter().zip(&tables) {
        let offset: f64 = params.adiabatic_offset()
            - occ
                .iter()
                .zip(omega_initial.iter())
                .map(|(&n, &w)| n as f64 * w)
                .sum::<f64>();
        for (flat, amp) in table.amplitudes().iter().enumerate() {
            let p = weight * amp.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let k = bin_index(energy_final[flat] + offset, sp.bin_width);
            *bins.entry(k).or_insert(0.0) += p;
        }
        captured += weight * table.captured_probability();
    }
    Ok(Spectrum::from_accumulator(
        Route::Direct,
        sp,
        params.temperature(),
        bins,
        captured,
    ))
}

/// Franck-Condon profile through the doubled-mode route: one vacuum-input
/// preparation, with the ancilla half heralding the initial occupation.
///
/// Heralds are restricted to the same ε-ensemble the direct route uses, so
/// both routes integrate identical (m, n) sets. The preparation ends in an
/// interferometer, which conserves total photon number, so the evolution
/// grid starts at per-mode cutoff M·cutoff + max Σn: wide enough to hold
/// every readout sector in full. From there it widens until the readout
/// stops moving, absorbing the amplitude the displacement and squeeze
/// stages route through higher occupations and back. The cost budget caps
/// the widening instead of failing it.
pub fn fcp_extended(params: &MolecularParams, sp: &SpectrumParams) -> Result<Spectrum> {
    sp.validate()?;
    let m = params.modes();
    let system_grid = FockGrid::new(m, sp.cutoff, &sp.budget)?;
    let ensemble = thermal_ensemble(
        &params.thermal_occupation(),
        sp.epsilon,
        sp.budget.basis_states,
    )?;
    let kept = entries_within_cutoff(&ensemble, sp.cutoff);
    let margin = kept
        .iter()
        .map(|(occ, _)| occ.iter().sum::<usize>())
        .max()
        .unwrap_or(0);

    let ext = extended_vibronic_transform(params)?;
    let prep = synthesize_vibronic_prep(&ext, sp.tolerance)?;
    let table = converged_readout(
        &prep.circuit()?,
        &vec![0; 2 * m],
        m * sp.cutoff + margin,
        |c| fits_readout(2 * m, sp.cutoff, c, &sp.budget),
        sp,
    )?;

    let energy_final = grid_energies(&system_grid, params.omega_prime());
    let system_dim = system_grid.dim();
    let amps = table.amplitudes();

    let omega_initial = params.omega();
    let mut bins = BTreeMap::new();
    let mut captured = 0.0;
    for (occ, _) in &kept {
        let offset: f64 = params.adiabatic_offset()
            - occ
                .iter()
                .zip(omega_initial.iter())
                .map(|(&n, &w)| n as f64 * w)
                .sum::<f64>();
        let herald_base = system_dim * system_grid.flat(occ)?;
        for flat in 0..system_dim {
            let p = amps[herald_base + flat].norm_sqr();
            if p == 0.0 {
                continue;
            }
            let k = bin_index(energy_final[flat] + offset, sp.bin_width);
            *bins.entry(k).or_insert(0.0) += p;
            captured += p;
        }
    }
    Ok(Spectrum::from_accumulator(
        Route::Extended,
        sp,
        params.temperature(),
        bins,
        captured,
    ))
}
