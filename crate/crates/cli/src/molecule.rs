//! Molecule files: JSON documents checked against a fixed schema, then
//! validated into [`MolecularParams`].

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::Deserialize;
use vibronic_core::doktorov::{MolecularParams, Units};

use crate::Failure;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MoleculeFile {
    modes: usize,
    omega: Vec<f64>,
    omega_prime: Vec<f64>,
    /// Row-major modes x modes matrix.
    duschinsky: Vec<Vec<f64>>,
    displacement: Vec<f64>,
    /// "cm-1" or "dimensionless".
    units: String,
    #[serde(default, rename = "temperature_K")]
    temperature_k: Option<f64>,
    /// Mean occupation per mode; overrides temperature_K when present.
    #[serde(default)]
    nbar: Option<Vec<f64>>,
    #[serde(default)]
    adiabatic_offset: Option<f64>,
}

pub fn load(path: &Path) -> Result<MolecularParams, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    // serde_json's message carries the line and column of the defect
    let file: MoleculeFile = serde_json::from_str(&text)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    build(file).map_err(|m| Failure::Input(format!("{}: {m}", path.display())))
}

fn check_len(name: &str, got: usize, want: usize) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{name} has {got} entries, expected {want}"))
    }
}

fn build(file: MoleculeFile) -> Result<MolecularParams, String> {
    let m = file.modes;
    if m == 0 {
        return Err("modes must be positive".into());
    }
    check_len("omega", file.omega.len(), m)?;
    check_len("omega_prime", file.omega_prime.len(), m)?;
    check_len("displacement", file.displacement.len(), m)?;
    check_len("duschinsky", file.duschinsky.len(), m)?;
    for (i, row) in file.duschinsky.iter().enumerate() {
        check_len(&format!("duschinsky row {i}"), row.len(), m)?;
    }
    let units = match file.units.as_str() {
        "cm-1" => Units::Wavenumber,
        "dimensionless" => Units::Dimensionless,
        other => {
            return Err(format!(
                "unknown units '{other}' (expected \"cm-1\" or \"dimensionless\")"
            ))
        }
    };

    let duschinsky = DMatrix::from_fn(m, m, |i, j| file.duschinsky[i][j]);
    let mut params = MolecularParams::new(
        DVector::from_vec(file.omega),
        DVector::from_vec(file.omega_prime),
        duschinsky,
        DVector::from_vec(file.displacement),
        units,
    )
    .map_err(|e| e.to_string())?;
    if let Some(t) = file.temperature_k {
        params = params.with_temperature(t).map_err(|e| e.to_string())?;
    }
    if let Some(nbar) = file.nbar {
        check_len("nbar", nbar.len(), m)?;
        params = params
            .with_thermal_occupation(DVector::from_vec(nbar))
            .map_err(|e| e.to_string())?;
    }
    if let Some(offset) = file.adiabatic_offset {
        params = params.with_adiabatic_offset(offset).map_err(|e| e.to_string())?;
    }
    Ok(params)
}
