//! In-place application of circuit primitives to a truncated amplitude table.
//!
//! Displacements and squeezes factor over modes, so each is applied as a
//! (cutoff+1)-dimensional matrix along one axis of the grid. Two-mode
//! squeezers act the same way on a pair of axes. Rotations conserve total
//! photon number and are applied sector by sector: the block for total N is
//! built from the block for total N−1 through the one-photon-removal
//! recurrence
//!
//! ```text
//! ⟨m| R |n⟩ = m_j^{-1/2} Σ_k Ū[j,k] √n_k ⟨m−e_j| R |n−e_k⟩,   j = first mode with m_j > 0
//! ```
//!
//! which is the Laplace expansion of the underlying matrix permanent, amortized
//! across the whole sector. Only two sector blocks are alive at a time.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::transform::{unitarity_residual, PrimitiveOp};

use super::{matrices, real_to_complex_matrix, FockBudget, FockGrid};

pub(super) fn apply_op(
    op: &PrimitiveOp,
    grid: &FockGrid,
    psi: &mut [C64],
    budget: &FockBudget,
    tol: f64,
) -> Result<()> {
    match op {
        PrimitiveOp::Displacement(alpha) => {
            ensure_modes(grid, alpha.len())?;
            for k in 0..alpha.len() {
                if alpha[k] != C64::new(0.0, 0.0) {
                    let m = matrices::displacement_matrix(alpha[k], grid.cutoff());
                    apply_axis(psi, grid.cutoff() + 1, grid.stride(k), &m);
                }
            }
            Ok(())
        }
        PrimitiveOp::Squeeze(lambda) => {
            ensure_modes(grid, lambda.len())?;
            for k in 0..lambda.len() {
                if lambda[k] != 0.0 {
                    let m =
                        real_to_complex_matrix(&matrices::squeeze_matrix(lambda[k], grid.cutoff()));
                    apply_axis(psi, grid.cutoff() + 1, grid.stride(k), &m);
                }
            }
            Ok(())
        }
        PrimitiveOp::TwoModeSqueeze(theta) => {
            let pairs = theta.len();
            ensure_modes(grid, 2 * pairs)?;
            for k in 0..pairs {
                if theta[k] != 0.0 {
                    let m = real_to_complex_matrix(&matrices::two_mode_squeeze_matrix(
                        theta[k],
                        grid.cutoff(),
                    ));
                    apply_pair(
                        psi,
                        grid.cutoff() + 1,
                        grid.stride(k),
                        grid.stride(pairs + k),
                        &m,
                    );
                }
            }
            Ok(())
        }
        PrimitiveOp::Rotation(u) => {
            ensure_modes(grid, u.nrows())?;
            let residual = unitarity_residual(u);
            if residual > tol.max(1e-12) {
                return Err(Error::NotUnitary {
                    what: "rotation matrix",
                    residual,
                    tol: tol.max(1e-12),
                });
            }
            apply_rotation(psi, grid, u, budget)
        }
    }
}

fn ensure_modes(grid: &FockGrid, got: usize) -> Result<()> {
    if grid.modes() != got {
        return Err(Error::ModeMismatch {
            expected: grid.modes(),
            got,
        });
    }
    Ok(())
}

/// Multiply one axis of the grid by `matrix`, in place. The grid factorizes as
/// (outer blocks) × (axis digit) × (inner offset of size `stride`), so chunks
/// of `dim * stride` entries are independent and processed in parallel.
fn apply_axis(psi: &mut [C64], dim: usize, stride: usize, matrix: &DMatrix<C64>) {
    let block = dim * stride;
    psi.par_chunks_mut(block).for_each(|chunk| {
        let mut gathered = vec![C64::new(0.0, 0.0); dim];
        for b in 0..stride {
            for m in 0..dim {
                gathered[m] = chunk[b + m * stride];
            }
            for m in 0..dim {
                let mut acc = C64::new(0.0, 0.0);
                for n in 0..dim {
                    acc += matrix[(m, n)] * gathered[n];
                }
                chunk[b + m * stride] = acc;
            }
        }
    });
}

/// Multiply a pair of axes by a (dim²)×(dim²) matrix whose row/column index is
/// `a_digit * dim + b_digit`.
fn apply_pair(psi: &mut [C64], dim: usize, stride_a: usize, stride_b: usize, matrix: &DMatrix<C64>) {
    let pair = dim * dim;
    let mut gathered = vec![C64::new(0.0, 0.0); pair];
    let mut out = vec![C64::new(0.0, 0.0); pair];
    for base in 0..psi.len() {
        if (base / stride_a) % dim != 0 || (base / stride_b) % dim != 0 {
            continue;
        }
        for ma in 0..dim {
            for mb in 0..dim {
                gathered[ma * dim + mb] = psi[base + ma * stride_a + mb * stride_b];
            }
        }
        for (r, slot) in out.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (c, g) in gathered.iter().enumerate() {
                acc += matrix[(r, c)] * g;
            }
            *slot = acc;
        }
        for ma in 0..dim {
            for mb in 0..dim {
                psi[base + ma * stride_a + mb * stride_b] = out[ma * dim + mb];
            }
        }
    }
}

/// Rotation amplitudes read out on a smaller grid: computes ⟨m|R|ψ⟩ for every
/// m with per-mode occupation at most `out_grid.cutoff()`, with ψ living on
/// the full evolution grid. The sector recurrence runs over rectangular
/// blocks (readout rows × full-grid columns), which stay small even when the
/// evolution grid's own sector blocks would not.
pub(super) fn rotation_readout(
    psi: &[C64],
    grid: &FockGrid,
    u: &DMatrix<C64>,
    out_grid: &FockGrid,
    budget: &FockBudget,
    tol: f64,
) -> Result<Vec<C64>> {
    debug_assert_eq!(grid.modes(), out_grid.modes());
    debug_assert!(out_grid.cutoff() <= grid.cutoff());
    ensure_modes(grid, u.nrows())?;
    let residual = unitarity_residual(u);
    if residual > tol.max(1e-12) {
        return Err(Error::NotUnitary {
            what: "rotation matrix",
            residual,
            tol: tol.max(1e-12),
        });
    }
    let modes = grid.modes();
    let max_total = out_grid.cutoff() * modes;

    let mut sectors_in: Vec<Vec<usize>> = vec![Vec::new(); max_total + 1];
    let mut pos_in = vec![0u32; grid.dim()];
    for flat in 0..grid.dim() {
        let t = grid.total(flat);
        if t <= max_total {
            pos_in[flat] = sectors_in[t].len() as u32;
            sectors_in[t].push(flat);
        }
    }
    let mut sectors_out: Vec<Vec<usize>> = vec![Vec::new(); max_total + 1];
    let mut pos_out = vec![0u32; out_grid.dim()];
    for flat in 0..out_grid.dim() {
        let t = out_grid.total(flat);
        pos_out[flat] = sectors_out[t].len() as u32;
        sectors_out[t].push(flat);
    }

    let u_conj = u.map(|v| v.conj());
    let mut out = vec![C64::new(0.0, 0.0); out_grid.dim()];
    out[0] = psi[0];

    let mut prev_block: Vec<C64> = vec![C64::new(1.0, 0.0)];
    for n_tot in 1..=max_total {
        let rows = &sectors_out[n_tot];
        let cols = &sectors_in[n_tot];
        let prev_cols = sectors_in[n_tot - 1].len();
        let (r_dim, c_dim) = (rows.len(), cols.len());
        if r_dim * c_dim > budget.basis_states {
            return Err(Error::BasisBudget {
                size: (r_dim as u128) * (c_dim as u128),
                budget: budget.basis_states,
                context: "photon-number sector block of a rotation",
            });
        }

        let adjacency: Vec<Vec<(usize, usize, f64)>> = cols
            .iter()
            .map(|&flat| {
                grid.occupation(flat)
                    .iter()
                    .enumerate()
                    .filter(|&(_, &o)| o > 0)
                    .map(|(k, &o)| (k, pos_in[flat - grid.stride(k)] as usize, (o as f64).sqrt()))
                    .collect()
            })
            .collect();
        let row_meta: Vec<(usize, usize, f64)> = rows
            .iter()
            .map(|&flat| {
                let occ = out_grid.occupation(flat);
                let j = occ.iter().position(|&o| o > 0).expect("nonzero sector");
                (
                    j,
                    pos_out[flat - out_grid.stride(j)] as usize,
                    1.0 / (occ[j] as f64).sqrt(),
                )
            })
            .collect();

        let mut block = vec![C64::new(0.0, 0.0); r_dim * c_dim];
        block
            .par_chunks_mut(c_dim)
            .enumerate()
            .for_each(|(r, row_out)| {
                let (j, prev_row, inv_sqrt_mj) = row_meta[r];
                let prev_row = &prev_block[prev_row * prev_cols..(prev_row + 1) * prev_cols];
                for (c, entries) in adjacency.iter().enumerate() {
                    let mut acc = C64::new(0.0, 0.0);
                    for &(k, prev_col, sqrt_nk) in entries {
                        acc += u_conj[(j, k)] * sqrt_nk * prev_row[prev_col];
                    }
                    row_out[c] = acc * inv_sqrt_mj;
                }
            });

        let gathered: Vec<C64> = cols.iter().map(|&f| psi[f]).collect();
        for (i, &f) in rows.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (b, a) in block[i * c_dim..(i + 1) * c_dim].iter().zip(&gathered) {
                acc += b * a;
            }
            out[f] = acc;
        }
        prev_block = block;
    }
    Ok(out)
}

fn apply_rotation(
    psi: &mut [C64],
    grid: &FockGrid,
    u: &DMatrix<C64>,
    budget: &FockBudget,
) -> Result<()> {
    let modes = grid.modes();
    let max_total = grid.cutoff() * modes;

    // Bucket every grid state by total photon number and record its position
    // within the bucket; the buckets are ascending in flat index.
    let mut sectors: Vec<Vec<usize>> = vec![Vec::new(); max_total + 1];
    let mut pos = vec![0u32; grid.dim()];
    for flat in 0..grid.dim() {
        let t = grid.total(flat);
        pos[flat] = sectors[t].len() as u32;
        sectors[t].push(flat);
    }

    let u_conj = u.map(|v| v.conj());

    // Sector 0 is ⟨0|R|0⟩ = 1; the vacuum amplitude is untouched.
    let mut prev_block: Vec<C64> = vec![C64::new(1.0, 0.0)];
    for n_tot in 1..=max_total {
        let cur = &sectors[n_tot];
        let prev_dim = sectors[n_tot - 1].len();
        let d = cur.len();
        if d * d > budget.basis_states {
            return Err(Error::BasisBudget {
                size: (d as u128).pow(2),
                budget: budget.basis_states,
                context: "photon-number sector block of a rotation",
            });
        }

        // Column adjacency: removing one photon from mode k of state n lands
        // in the previous sector at a known position, with weight √n_k.
        let adjacency: Vec<Vec<(usize, usize, f64)>> = cur
            .iter()
            .map(|&flat| {
                grid.occupation(flat)
                    .iter()
                    .enumerate()
                    .filter(|&(_, &o)| o > 0)
                    .map(|(k, &o)| (k, pos[flat - grid.stride(k)] as usize, (o as f64).sqrt()))
                    .collect()
            })
            .collect();

        // Row metadata: the expansion mode j (first occupied), the previous
        // sector row reached by removing one photon there, and 1/√m_j.
        let rows: Vec<(usize, usize, f64)> = cur
            .iter()
            .map(|&flat| {
                let occ = grid.occupation(flat);
                let j = occ.iter().position(|&o| o > 0).expect("nonzero sector");
                (
                    j,
                    pos[flat - grid.stride(j)] as usize,
                    1.0 / (occ[j] as f64).sqrt(),
                )
            })
            .collect();

        let mut block = vec![C64::new(0.0, 0.0); d * d];
        block
            .par_chunks_mut(d)
            .enumerate()
            .for_each(|(r, row_out)| {
                let (j, prev_row, inv_sqrt_mj) = rows[r];
                let prev_row = &prev_block[prev_row * prev_dim..(prev_row + 1) * prev_dim];
                for (c, entries) in adjacency.iter().enumerate() {
                    let mut acc = C64::new(0.0, 0.0);
                    for &(k, prev_col, sqrt_nk) in entries {
                        acc += u_conj[(j, k)] * sqrt_nk * prev_row[prev_col];
                    }
                    row_out[c] = acc * inv_sqrt_mj;
                }
            });

        // In-sector matrix-vector product; sectors are disjoint, so writing
        // back immediately is safe.
        let gathered: Vec<C64> = cur.iter().map(|&f| psi[f]).collect();
        let transformed: Vec<C64> = block
            .par_chunks(d)
            .map(|row| {
                let mut acc = C64::new(0.0, 0.0);
                for (b, a) in row.iter().zip(&gathered) {
                    acc += b * a;
                }
                acc
            })
            .collect();
        for (i, &f) in cur.iter().enumerate() {
            psi[f] = transformed[i];
        }
        prev_block = block;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    fn vacuum(grid: &FockGrid) -> Vec<C64> {
        let mut psi = vec![C64::new(0.0, 0.0); grid.dim()];
        psi[0] = C64::new(1.0, 0.0);
        psi
    }

    #[test]
    fn displacement_gives_coherent_state() {
        let budget = FockBudget::default();
        let grid = FockGrid::new(1, 18, &budget).unwrap();
        let mut psi = vacuum(&grid);
        let alpha = C64::new(0.7, 0.4);
        let op = PrimitiveOp::Displacement(DVector::from_element(1, alpha));
        apply_op(&op, &grid, &mut psi, &budget, 1e-9).unwrap();
        let x = alpha.norm_sqr();
        for m in 0..=18 {
            let expect = (-x / 2.0).exp() * alpha.powu(m as u32)
                * (-0.5 * super::super::ln_factorial(m)).exp();
            assert!((psi[m] - expect).norm() < 1e-12, "m = {m}");
        }
    }

    #[test]
    fn beamsplitter_balances_single_photon() {
        let budget = FockBudget::default();
        let grid = FockGrid::new(2, 3, &budget).unwrap();
        let mut psi = vec![C64::new(0.0, 0.0); grid.dim()];
        psi[grid.flat(&[1, 0]).unwrap()] = C64::new(1.0, 0.0);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let u = DMatrix::from_row_slice(2, 2, &[r, r, -r, r]).map(|v| C64::new(v, 0.0));
        apply_op(&PrimitiveOp::Rotation(u.clone()), &grid, &mut psi, &budget, 1e-9).unwrap();
        // single-photon sector transforms by conj(U)
        let a10 = psi[grid.flat(&[1, 0]).unwrap()];
        let a01 = psi[grid.flat(&[0, 1]).unwrap()];
        assert!((a10 - u[(0, 0)].conj()).norm() < 1e-14);
        assert!((a01 - u[(1, 0)].conj()).norm() < 1e-14);
    }

    #[test]
    fn hong_ou_mandel_null() {
        let budget = FockBudget::default();
        let grid = FockGrid::new(2, 4, &budget).unwrap();
        let mut psi = vec![C64::new(0.0, 0.0); grid.dim()];
        psi[grid.flat(&[1, 1]).unwrap()] = C64::new(1.0, 0.0);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let u = DMatrix::from_row_slice(2, 2, &[r, r, r, -r]).map(|v| C64::new(v, 0.0));
        apply_op(&PrimitiveOp::Rotation(u), &grid, &mut psi, &budget, 1e-9).unwrap();
        let coincidence = psi[grid.flat(&[1, 1]).unwrap()];
        assert!(coincidence.norm() < 1e-14);
        let bunched = psi[grid.flat(&[2, 0]).unwrap()].norm_sqr();
        assert!((bunched - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rotation_preserves_norm_per_sector() {
        let budget = FockBudget::default();
        let grid = FockGrid::new(3, 4, &budget).unwrap();
        let mut psi = vec![C64::new(0.0, 0.0); grid.dim()];
        psi[grid.flat(&[2, 1, 0]).unwrap()] = C64::new(1.0, 0.0);
        // a made-up unitary: product of two Givens-like complex rotations
        let c = 0.6;
        let s = 0.8;
        let mut u = DMatrix::identity(3, 3).map(|v: f64| C64::new(v, 0.0));
        u[(0, 0)] = C64::new(c, 0.0);
        u[(0, 1)] = C64::new(0.0, s);
        u[(1, 0)] = C64::new(0.0, s);
        u[(1, 1)] = C64::new(c, 0.0);
        let g = DMatrix::from_row_slice(
            3,
            3,
            &[
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.28, 0.0),
                C64::new(0.0, -0.96),
                C64::new(0.0, 0.0),
                C64::new(0.0, -0.96),
                C64::new(0.28, 0.0),
            ],
        );
        let u = g * u;
        apply_op(&PrimitiveOp::Rotation(u), &grid, &mut psi, &budget, 1e-9).unwrap();
        let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-12, "norm = {norm}");
        // support stays inside the total-3 sector
        for flat in 0..grid.dim() {
            if grid.total(flat) != 3 {
                assert_eq!(psi[flat], C64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn two_mode_squeeze_from_vacuum_is_diagonal_geometric() {
        let budget = FockBudget::default();
        let grid = FockGrid::new(2, 12, &budget).unwrap();
        let mut psi = vacuum(&grid);
        let nbar: f64 = 0.8;
        let theta = 2.0 * nbar.sqrt().asinh();
        let op = PrimitiveOp::TwoModeSqueeze(DVector::from_element(1, theta));
        apply_op(&op, &grid, &mut psi, &budget, 1e-9).unwrap();
        for m in 0..=12_usize {
            for n in 0..=12_usize {
                let got = psi[grid.flat(&[m, n]).unwrap()].norm_sqr();
                let expect = if m == n {
                    nbar.powi(m as i32) / (nbar + 1.0).powi(m as i32 + 1)
                } else {
                    0.0
                };
                assert!((got - expect).abs() < 1e-12, "({m},{n})");
            }
        }
    }

    #[test]
    fn squeeze_axis_matches_single_mode_matrix() {
        let budget = FockBudget::default();
        let grid = FockGrid::new(2, 9, &budget).unwrap();
        let mut psi = vec![C64::new(0.0, 0.0); grid.dim()];
        psi[grid.flat(&[0, 2]).unwrap()] = C64::new(1.0, 0.0);
        let op = PrimitiveOp::Squeeze(DVector::from_row_slice(&[0.0, 0.5]));
        apply_op(&op, &grid, &mut psi, &budget, 1e-9).unwrap();
        let reference = matrices::squeeze_matrix(0.5, 9);
        for n in 0..=9 {
            let got = psi[grid.flat(&[0, n]).unwrap()];
            assert!((got.re - reference[(n, 2)]).abs() < 1e-13, "n = {n}");
            assert_eq!(got.im, 0.0);
        }
    }

    #[test]
    fn restricted_readout_matches_full_rotation() {
        let budget = FockBudget::default();
        let grid = FockGrid::new(2, 6, &budget).unwrap();
        let out_grid = FockGrid::new(2, 3, &budget).unwrap();
        // support spread over several sectors, including states the readout
        // never reports
        let mut psi = vec![C64::new(0.0, 0.0); grid.dim()];
        for (i, occ) in [[0, 0], [1, 0], [2, 1], [0, 3], [4, 2], [6, 6]]
            .iter()
            .enumerate()
        {
            psi[grid.flat(occ).unwrap()] = C64::new(0.3 + 0.1 * i as f64, 0.2 - 0.05 * i as f64);
        }
        let u = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.6, 0.0),
                C64::new(0.0, 0.8),
                C64::new(0.0, 0.8),
                C64::new(0.6, 0.0),
            ],
        );
        let restricted = rotation_readout(&psi, &grid, &u, &out_grid, &budget, 1e-9).unwrap();
        let mut full = psi.clone();
        apply_rotation(&mut full, &grid, &u, &budget).unwrap();
        for flat_out in 0..out_grid.dim() {
            let occ = out_grid.occupation(flat_out);
            let want = full[grid.flat(&occ).unwrap()];
            assert!((restricted[flat_out] - want).norm() < 1e-14, "{occ:?}");
        }
    }

    #[test]
    fn restricted_readout_guards_block_size() {
        let budget = FockBudget {
            basis_states: 350,
            permanent_limit: 14,
        };
        let grid = FockGrid::new(3, 6, &budget).unwrap();
        let out_grid = FockGrid::new(3, 6, &budget).unwrap();
        let psi = vacuum(&grid);
        let u = DMatrix::identity(3, 3).map(|v: f64| C64::new(v, 0.0));
        let err = rotation_readout(&psi, &grid, &u, &out_grid, &budget, 1e-9).unwrap_err();
        assert!(err.is_resource_guard());
    }

    #[test]
    fn wrong_mode_count_is_rejected() {
        let budget = FockBudget::default();
        let grid = FockGrid::new(2, 3, &budget).unwrap();
        let mut psi = vacuum(&grid);
        let op = PrimitiveOp::Displacement(DVector::from_element(3, C64::new(0.1, 0.0)));
        assert!(matches!(
            apply_op(&op, &grid, &mut psi, &budget, 1e-9),
            Err(Error::ModeMismatch { .. })
        ));
    }
}
