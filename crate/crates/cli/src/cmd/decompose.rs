//! The decompose subcommand: print every optical layer of a transition, from
//! the Duschinsky data through the Bogoliubov transform and its
//! passive-squeeze-passive factors, plus the purified input preparation when
//! the molecule is warm.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use vibronic_core::bloch_messiah::bloch_messiah;
use vibronic_core::doktorov::{doktorov_transform, duschinsky_params};
use vibronic_core::extended::{extended_vibronic_transform, synthesize_vibronic_prep};
use vibronic_core::C64;

use crate::config::ConfigArgs;
use crate::molecule;
use crate::Failure;

pub fn run(file: &Path, cfg: &ConfigArgs) -> Result<(), Failure> {
    let mol = molecule::load(file)?;
    let mut out = String::new();

    let _ = writeln!(out, "modes: {}", mol.modes());
    let _ = writeln!(out, "units: {}", mol.units().label());

    let dus = duschinsky_params(&mol);
    let _ = writeln!(out, "\nduschinsky rotation J:");
    write_real_matrix(&mut out, &dus.j);
    let _ = writeln!(out, "shifted displacement delta:");
    write_real_vector(&mut out, &dus.delta);

    let t = doktorov_transform(&mol).map_err(Failure::from_core)?;
    let r = t.residuals();
    let _ = writeln!(out, "\ntransition transform (a -> X a + Y a† + z):");
    let _ = writeln!(out, "X:");
    write_matrix(&mut out, t.x());
    let _ = writeln!(out, "Y:");
    write_matrix(&mut out, t.y());
    let _ = writeln!(out, "z:");
    write_vector(&mut out, t.z());
    let _ = writeln!(
        out,
        "constraint residuals: metric {:.3e}, symmetry {:.3e} (tolerance {:.1e})",
        r.metric, r.symmetry, cfg.tolerance
    );

    let f = bloch_messiah(&t, cfg.tolerance).map_err(Failure::from_core)?;
    let dx = (f.reconstruct_x() - t.x()).norm();
    let dy = (f.reconstruct_y() - t.y()).norm();
    let _ = writeln!(out, "\npassive-squeeze-passive factors:");
    let _ = writeln!(out, "left interferometer:");
    write_matrix(&mut out, &f.left);
    let _ = writeln!(out, "squeeze parameters:");
    write_real_vector(&mut out, &f.squeeze);
    let _ = writeln!(out, "right interferometer:");
    write_matrix(&mut out, &f.right);
    let _ = writeln!(out, "reconstruction residual: {:.3e}", dx.max(dy));

    let nbar = mol.thermal_occupation();
    if nbar.iter().any(|&n| n > 0.0) {
        let _ = writeln!(out, "\nthermal input, mean occupations:");
        write_real_vector(&mut out, &nbar);

        let ext = extended_vibronic_transform(&mol).map_err(Failure::from_core)?;
        let er = ext.residuals();
        let prep = synthesize_vibronic_prep(&ext, cfg.tolerance).map_err(Failure::from_core)?;
        let _ = writeln!(
            out,
            "purified input preparation on {} modes (displace, squeeze, interfere):",
            prep.mode_count()
        );
        let _ = writeln!(out, "displacement:");
        write_vector(&mut out, &prep.displacement);
        let _ = writeln!(out, "squeeze parameters:");
        write_real_vector(&mut out, &prep.squeeze);
        let _ = writeln!(out, "interferometer:");
        write_matrix(&mut out, &prep.interferometer);
        let _ = writeln!(
            out,
            "constraint residuals: metric {:.3e}, symmetry {:.3e} (tolerance {:.1e})",
            er.metric, er.symmetry, cfg.tolerance
        );
    }

    print!("{out}");
    Ok(())
}

fn write_real_matrix(out: &mut String, m: &DMatrix<f64>) {
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:+.6e}", m[(i, j)])).collect();
        let _ = writeln!(out, "  [ {} ]", row.join(", "));
    }
}

fn write_real_vector(out: &mut String, v: &DVector<f64>) {
    let row: Vec<String> = v.iter().map(|x| format!("{x:+.6e}")).collect();
    let _ = writeln!(out, "  [ {} ]", row.join(", "));
}

fn write_matrix(out: &mut String, m: &DMatrix<C64>) {
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| fmt_c(m[(i, j)])).collect();
        let _ = writeln!(out, "  [ {} ]", row.join(", "));
    }
}

fn write_vector(out: &mut String, v: &DVector<C64>) {
    let row: Vec<String> = v.iter().map(|&x| fmt_c(x)).collect();
    let _ = writeln!(out, "  [ {} ]", row.join(", "));
}

fn fmt_c(z: C64) -> String {
    format!("{:+.6e}{:+.6e}i", z.re, z.im)
}
