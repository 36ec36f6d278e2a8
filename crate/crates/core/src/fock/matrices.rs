//! Exact truncated matrices of the single-mode and pair primitives.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use super::ln_factorial;

/// ⟨m| D(α) |n⟩ on 0..=cutoff, with D(α) = exp(α a† − α* a).
///
/// Closed form via associated Laguerre polynomials, e.g. for m ≥ n
/// ```text
/// ⟨m|D|n⟩ = e^{−|α|²/2} √(n!/m!) α^{m−n} L_n^{(m−n)}(|α|²)
/// ```
/// The column at n = 0 is the coherent state, ⟨m|D|0⟩ = e^{−|α|²/2} α^m/√m!.
pub fn displacement_matrix(alpha: C64, cutoff: usize) -> DMatrix<C64> {
    let dim = cutoff + 1;
    let x = alpha.norm_sqr();
    let pref = (-x / 2.0).exp();
    DMatrix::from_fn(dim, dim, |m, n| {
        let (lo, hi) = (m.min(n), m.max(n));
        let s = hi - lo;
        let ratio = (0.5 * (ln_factorial(lo) - ln_factorial(hi))).exp();
        let lag = associated_laguerre(lo, s, x);
        let phase = if m >= n {
            alpha.powu(s as u32)
        } else {
            (-alpha.conj()).powu(s as u32)
        };
        phase * (pref * ratio * lag)
    })
}

/// L_k^(s)(x) by the stable three-term recurrence in the degree.
fn associated_laguerre(k: usize, s: usize, x: f64) -> f64 {
    let sf = s as f64;
    let mut prev = 1.0; // L_0
    if k == 0 {
        return prev;
    }
    let mut cur = 1.0 + sf - x; // L_1
    for j in 1..k {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + sf - x) * cur - (jf + sf) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// ⟨m| S(λ) |n⟩ on 0..=cutoff, with S(λ) = exp(λ (a†² − a²) / 2).
///
/// Entries vanish unless m ≡ n (mod 2). The squeezed vacuum column is
/// ⟨2m|S|0⟩ = sech^{1/2}λ tanh^m λ √(2m)!/(2^m m!), and the interior is
/// filled by the recurrence
/// ```text
/// cosh λ √m ⟨m|S|n⟩ = √n ⟨m−1|S|n−1⟩ + sinh λ √(m−1) ⟨m−2|S|n⟩
/// ```
pub fn squeeze_matrix(lambda: f64, cutoff: usize) -> DMatrix<f64> {
    let dim = cutoff + 1;
    if lambda == 0.0 {
        return DMatrix::identity(dim, dim);
    }
    let t = lambda.tanh();
    let (sh, ch) = (lambda.sinh(), lambda.cosh());
    let sqrt_sech = (1.0 / ch).sqrt();
    let mut s = DMatrix::zeros(dim, dim);
    // column n = 0 and row m = 0 (the latter from S(λ)† = S(−λ))
    let mut a = 1.0; // √(2m)! / (2^m m!)
    for m in 0..=cutoff / 2 {
        if m > 0 {
            let mf = m as f64;
            a *= ((2.0 * mf - 1.0) / (2.0 * mf)).sqrt();
        }
        s[(2 * m, 0)] = sqrt_sech * t.powi(m as i32) * a;
        s[(0, 2 * m)] = sqrt_sech * (-t).powi(m as i32) * a;
    }
    for n in 1..dim {
        for m in 1..dim {
            let mut v = (n as f64).sqrt() * s[(m - 1, n - 1)];
            if m >= 2 {
                v += sh * ((m - 1) as f64).sqrt() * s[(m - 2, n)];
            }
            s[(m, n)] = v / (ch * (m as f64).sqrt());
        }
    }
    s
}

/// Per-pair amplitudes ⟨m, m| V(θ) |0, 0⟩ = tanh^m(θ/2) / cosh(θ/2) for a
/// two-mode squeezer; off-diagonal pairs vanish on vacuum input.
pub fn two_mode_squeeze_vacuum(theta: f64, cutoff: usize) -> DVector<f64> {
    let t = (theta / 2.0).tanh();
    let sech = 1.0 / (theta / 2.0).cosh();
    DVector::from_fn(cutoff + 1, |m, _| t.powi(m as i32) * sech)
}

/// The full pair matrix ⟨m_a m_b| V(θ) |n_a n_b⟩ with rows and columns
/// flattened as a·(cutoff+1)+b.
///
/// From the normal-ordered factorization V = e^{T a†b†} (cosh θ/2)^{−(n_a+n_b+1)}
/// e^{−T ab} with T = tanh(θ/2); the photon-number difference a−b is
/// conserved, and each entry is a short alternating sum.
pub fn two_mode_squeeze_matrix(theta: f64, cutoff: usize) -> DMatrix<f64> {
    let dim = cutoff + 1;
    if theta == 0.0 {
        return DMatrix::identity(dim * dim, dim * dim);
    }
    let t = (theta / 2.0).tanh();
    let ln_abs_t = t.abs().ln();
    let ln_cosh = (theta / 2.0).cosh().ln();
    let t_sign = t.signum();
    let mut v = DMatrix::zeros(dim * dim, dim * dim);
    for na in 0..dim {
        for nb in 0..dim {
            let col = na * dim + nb;
            for ma in 0..dim {
                // a − b conservation fixes mb
                let mb = match (ma + nb).checked_sub(na) {
                    Some(mb) if mb < dim => mb,
                    _ => continue,
                };
                let row = ma * dim + mb;
                let j_min = na.saturating_sub(ma);
                let j_max = na.min(nb);
                let mut acc = 0.0;
                for j in j_min..=j_max {
                    let k = ma + j - na;
                    let ln_mag = ((j + k) as f64) * ln_abs_t
                        - ln_factorial(j)
                        - ln_factorial(k)
                        - ((na + nb - 2 * j + 1) as f64) * ln_cosh
                        + 0.5
                            * (ln_factorial(na)
                                + ln_factorial(nb)
                                + ln_factorial(ma)
                                + ln_factorial(mb))
                        - ln_factorial(na - j)
                        - ln_factorial(nb - j);
                    let mut sign = t_sign.powi((j + k) as i32);
                    if j % 2 == 1 {
                        sign = -sign;
                    }
                    acc += sign * ln_mag.exp();
                }
                v[(row, col)] = acc;
            }
        }
    }
    v
}
