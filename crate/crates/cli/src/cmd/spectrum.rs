//! The spectrum subcommand: profile a molecule and emit CSV.
//!
//! The CSV is deterministic for fixed input and configuration: bins are
//! accumulated in index order and every float is printed in full round-trip
//! precision, so repeated runs (at any thread count) are byte-identical.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use vibronic_core::doktorov::MolecularParams;
use vibronic_core::spectrum::{fcp_direct, fcp_extended, Spectrum};

use crate::config::ConfigArgs;
use crate::molecule;
use crate::{Failure, RouteArg};

/// Largest bin-wise gap tolerated between the two constructions before
/// `--route both` reports a mismatch: far above honest truncation noise at
/// default settings, far below any structural disagreement.
const ROUTE_MISMATCH_GATE: f64 = 1e-4;

pub fn run(
    file: &Path,
    route: RouteArg,
    out: Option<&Path>,
    cfg: &ConfigArgs,
) -> Result<(), Failure> {
    let mol = molecule::load(file)?;
    cfg.init_threads();
    let sp = cfg.spectrum_params(mol.units());

    let mut csv = String::new();
    match route {
        RouteArg::Direct => {
            let spec = fcp_direct(&mol, &sp).map_err(Failure::from_core)?;
            render_single(&mut csv, &spec, &mol, "direct");
        }
        RouteArg::Extended => {
            let spec = fcp_extended(&mol, &sp).map_err(Failure::from_core)?;
            render_single(&mut csv, &spec, &mol, "extended");
        }
        RouteArg::Both => {
            let direct = fcp_direct(&mol, &sp).map_err(Failure::from_core)?;
            let extended = fcp_extended(&mol, &sp).map_err(Failure::from_core)?;
            let gap = direct
                .max_abs_difference(&extended)
                .map_err(Failure::from_core)?;
            if gap > ROUTE_MISMATCH_GATE {
                return Err(Failure::Mismatch(format!(
                    "routes disagree: bin-wise gap {gap:.3e} exceeds {ROUTE_MISMATCH_GATE:.0e}"
                )));
            }
            render_both(&mut csv, &direct, &extended, &mol);
        }
    }

    match out {
        Some(path) => fs::write(path, csv)
            .map_err(|e| Failure::Internal(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn header(out: &mut String, spec: &Spectrum, mol: &MolecularParams, route: &str) {
    let _ = writeln!(out, "# captured_probability: {}", spec.captured_probability());
    let _ = writeln!(out, "# cutoff: {}", spec.cutoff());
    let _ = writeln!(out, "# route: {route}");
    let _ = writeln!(out, "# units: {}", mol.units().label());
    let _ = writeln!(out, "# epsilon: {}", spec.epsilon());
    let _ = writeln!(out, "# bin_width: {}", spec.bin_width());
    let _ = writeln!(
        out,
        "# bins: [k*bin_width, (k+1)*bin_width) anchored at 0, listed by center"
    );
}

fn render_single(out: &mut String, spec: &Spectrum, mol: &MolecularParams, route: &str) {
    header(out, spec, mol, route);
    let _ = writeln!(out, "omega_v_bin_center,intensity");
    let w = spec.bin_width();
    for (i, intensity) in spec.intensities().iter().enumerate() {
        let center = (spec.first_bin() + i as i64) as f64 * w + 0.5 * w;
        let _ = writeln!(out, "{center},{intensity}");
    }
}

fn render_both(out: &mut String, direct: &Spectrum, extended: &Spectrum, mol: &MolecularParams) {
    header(out, direct, mol, "both");
    let _ = writeln!(
        out,
        "# captured_probability_extended: {}",
        extended.captured_probability()
    );
    let _ = writeln!(out, "omega_v_bin_center,intensity,intensity_extended");
    let lo = direct.first_bin().min(extended.first_bin());
    let hi = (direct.first_bin() + direct.len() as i64)
        .max(extended.first_bin() + extended.len() as i64);
    let w = direct.bin_width();
    for k in lo..hi {
        let center = k as f64 * w + 0.5 * w;
        let _ = writeln!(
            out,
            "{center},{},{}",
            direct.intensity_at(k),
            extended.intensity_at(k)
        );
    }
}
