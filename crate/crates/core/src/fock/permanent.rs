//! Matrix permanents and permanent-based rotation amplitudes.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::inv_sqrt_factorial_product;
use crate::error::{Error, Result};

/// Permanent by Ryser's formula with Gray-code subset updates, O(2^n n).
///
/// Exponential by nature; callers that expose this to sized input go through
/// the `permanent_limit` budget (see [`rotation_amplitude`]).
pub fn permanent(a: &DMatrix<C64>) -> Result<C64> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            what: "permanent input",
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(C64::new(1.0, 0.0));
    }
    if n >= 64 {
        return Err(Error::PermanentLimit { n, limit: 63 });
    }
    // Per(A) = (−1)^n Σ_{S ⊆ rows} (−1)^{|S|} Π_j Σ_{i∈S} a[i,j]
    let mut col_sums = vec![C64::new(0.0, 0.0); n];
    let mut total = C64::new(0.0, 0.0);
    let mut prev: u64 = 0;
    for k in 1..(1u64 << n) {
        let gray = k ^ (k >> 1);
        let row = (gray ^ prev).trailing_zeros() as usize;
        if gray >> row & 1 == 1 {
            for (j, s) in col_sums.iter_mut().enumerate() {
                *s += a[(row, j)];
            }
        } else {
            for (j, s) in col_sums.iter_mut().enumerate() {
                *s -= a[(row, j)];
            }
        }
        prev = gray;
        let mut prod = C64::new(1.0, 0.0);
        for s in &col_sums {
            prod *= *s;
        }
        if (n as u32).wrapping_sub(gray.count_ones()) % 2 == 0 {
            total += prod;
        } else {
            total -= prod;
        }
    }
    Ok(total)
}

/// ⟨m| R_U |n⟩ for a photon-number-conserving rotation.
///
/// Zero unless the totals match; otherwise Per(U*[m|n]) / √(Πm_j! Πn_k!),
/// where U*[m|n] repeats row j of conj(U) m_j times and column k n_k times.
/// The conjugation matches R_U = exp((a†)ᵀ ln(U*) a): on the single-photon
/// sector the matrix elements are exactly conj(U).
pub fn rotation_amplitude(
    u: &DMatrix<C64>,
    m: &[usize],
    n: &[usize],
    permanent_limit: usize,
) -> Result<C64> {
    let modes = u.nrows();
    if u.ncols() != modes {
        return Err(Error::NotSquare {
            what: "rotation matrix",
            rows: u.nrows(),
            cols: u.ncols(),
        });
    }
    if m.len() != modes || n.len() != modes {
        return Err(Error::ModeMismatch {
            expected: modes,
            got: m.len().max(n.len()),
        });
    }
    let total_m: usize = m.iter().sum();
    let total_n: usize = n.iter().sum();
    if total_m != total_n {
        return Ok(C64::new(0.0, 0.0));
    }
    if total_m > permanent_limit {
        return Err(Error::PermanentLimit {
            n: total_m,
            limit: permanent_limit,
        });
    }
    let rows = expand_multiplicities(m);
    let cols = expand_multiplicities(n);
    let sub = DMatrix::from_fn(total_m, total_m, |r, c| u[(rows[r], cols[c])].conj());
    let per = permanent(&sub)?;
    let norm = inv_sqrt_factorial_product(m) * inv_sqrt_factorial_product(n);
    Ok(per * norm)
}

fn expand_multiplicities(occ: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(occ.iter().sum());
    for (mode, &count) in occ.iter().enumerate() {
        out.extend(std::iter::repeat(mode).take(count));
    }
    out
}
