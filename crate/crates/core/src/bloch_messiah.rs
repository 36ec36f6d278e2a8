//! Factoring a Bogoliubov transform into passive-squeeze-passive form and
//! synthesizing an optical circuit from the factors.
//!
//! Every valid transform (X, Y, z) factors as
//!
//! ```text
//! X = L sinh(Σ) Rᵀ,   Y = L cosh(Σ) R†
//! ```
//!
//! with L, R unitary and Σ ≥ 0 diagonal. The factorization starts from the
//! singular value decomposition Y = A Λ B†, which fixes Λ = cosh(Σ) but leaves
//! a unitary gauge free on every repeated singular value. The gauge is pinned
//! by C = A† X B̄: in exact arithmetic C is complex symmetric with con-eigen
//! decomposition C = W diag(sinh Σ) Wᵀ, and L = A W, R = B W. The con-eigen
//! problem is solved through the real symmetric embedding
//!
//! ```text
//! M = [ Re C   Im C ]      M (x; y) = s (x; y)  ⇔  C (x − iy) = s (x + iy)
//!     [ Im C  −Re C ],
//! ```
//!
//! whose spectrum is ±-symmetric; one vector per ± pair is kept. This handles
//! repeated and zero squeeze values in one code path, because degeneracies of
//! Λ never have to be resolved explicitly.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::transform::{BogoliubovTransform, OpticalCircuit, PrimitiveOp};

/// The passive-squeeze-passive factors of a transform.
///
/// `left` and `right` are unitary and `squeeze` is nonnegative, sorted in
/// decreasing order; the blocks reconstruct as X = left·sinh(Σ)·rightᵀ and
/// Y = left·cosh(Σ)·right†.
#[derive(Debug, Clone)]
pub struct BlochMessiahFactors {
    pub left: DMatrix<C64>,
    pub squeeze: DVector<f64>,
    pub right: DMatrix<C64>,
}

impl BlochMessiahFactors {
    /// The X block rebuilt from the factors.
    pub fn reconstruct_x(&self) -> DMatrix<C64> {
        let sinh = DMatrix::from_fn(self.squeeze.len(), self.squeeze.len(), |i, j| {
            if i == j {
                C64::new(self.squeeze[i].sinh(), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        &self.left * sinh * self.right.transpose()
    }

    /// The Y block rebuilt from the factors.
    pub fn reconstruct_y(&self) -> DMatrix<C64> {
        let cosh = DMatrix::from_fn(self.squeeze.len(), self.squeeze.len(), |i, j| {
            if i == j {
                C64::new(self.squeeze[i].cosh(), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        &self.left * cosh * self.right.adjoint()
    }
}

/// Factor a transform's linear part; `tol` bounds the accepted reconstruction
/// residual.
pub fn bloch_messiah(t: &BogoliubovTransform, tol: f64) -> Result<BlochMessiahFactors> {
    let svd = t.y().clone().svd(true, true);
    let a = svd.u.as_ref().expect("SVD with u requested").clone();
    let b_dagger = svd.v_t.as_ref().expect("SVD with v_t requested").clone();
    let b = b_dagger.adjoint();

    // C = A† X B̄ is symmetric when the transform satisfies its constraints;
    // symmetrize to suppress roundoff, but reject structural violations.
    let c = a.adjoint() * t.x() * b.map(|v| v.conj());
    let asym = (&c - c.transpose()).norm() / 2.0;
    let scale = t.x().norm().max(1.0);
    if asym > 1e-7 * scale {
        return Err(Error::DecompositionFailed {
            what: "gauge matrix is not symmetric",
            residual: asym,
            tol: 1e-7 * scale,
        });
    }
    let c_sym = (&c + c.transpose()).map(|v| v / 2.0);

    let (w, s) = con_eigen(&c_sym)?;

    let left = &a * &w;
    let right = &b * &w;
    let squeeze = s.map(f64::asinh);
    let mut factors = BlochMessiahFactors {
        left,
        squeeze,
        right,
    };
    normalize_column_signs(&mut factors);

    let residual = (factors.reconstruct_x() - t.x())
        .norm()
        .max((factors.reconstruct_y() - t.y()).norm());
    if residual > tol.max(1e-12 * scale) {
        return Err(Error::DecompositionFailed {
            what: "factor reconstruction",
            residual,
            tol: tol.max(1e-12 * scale),
        });
    }
    Ok(factors)
}

/// Con-eigen decomposition C = W diag(s) Wᵀ of a complex symmetric matrix,
/// with W unitary and s sorted in decreasing order (s ≥ 0 up to roundoff on
/// zero modes, where the sign is absorbed into W).
fn con_eigen(c: &DMatrix<C64>) -> Result<(DMatrix<C64>, DVector<f64>)> {
    let n = c.nrows();
    let re = c.map(|v| v.re);
    let im = c.map(|v| v.im);
    let mut big = DMatrix::<f64>::zeros(2 * n, 2 * n);
    big.view_mut((0, 0), (n, n)).copy_from(&re);
    big.view_mut((0, n), (n, n)).copy_from(&im);
    big.view_mut((n, 0), (n, n)).copy_from(&im);
    big.view_mut((n, n), (n, n)).copy_from(&(-&re));

    let eig = SymmetricEigen::new(big);
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .partial_cmp(&eig.eigenvalues[i])
            .expect("finite eigenvalues")
    });

    // Greedily keep one vector per ±s pair: a candidate is rejected when it
    // lies in the span of the kept vectors and their J-images, J(x;y)=(−y;x).
    let mut kept: Vec<DVector<f64>> = Vec::with_capacity(n);
    let mut kept_j: Vec<DVector<f64>> = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for &idx in &order {
        if kept.len() == n {
            break;
        }
        let mut v: DVector<f64> = eig.eigenvectors.column(idx).into_owned();
        for basis in kept.iter().chain(kept_j.iter()) {
            let coeff = basis.dot(&v);
            v -= basis * coeff;
        }
        let norm = v.norm();
        if norm < 0.5 {
            continue;
        }
        v /= norm;
        let j_image = apply_j(&v, n);
        kept.push(v);
        kept_j.push(j_image);
        values.push(eig.eigenvalues[idx]);
    }
    if kept.len() < n {
        return Err(Error::DecompositionFailed {
            what: "con-eigenvector selection",
            residual: (n - kept.len()) as f64,
            tol: 0.0,
        });
    }

    let mut w = DMatrix::<C64>::zeros(n, n);
    let mut s = DVector::<f64>::zeros(n);
    for (k, (v, &val)) in kept.iter().zip(values.iter()).enumerate() {
        let flip = val < 0.0;
        for i in 0..n {
            let entry = C64::new(v[i], v[n + i]);
            // a negative pair value is absorbed by rotating the vector by i
            w[(i, k)] = if flip { entry * C64::new(0.0, 1.0) } else { entry };
        }
        s[k] = val.abs();
    }
    Ok((w, s))
}

fn apply_j(v: &DVector<f64>, n: usize) -> DVector<f64> {
    let mut out = DVector::zeros(2 * n);
    for i in 0..n {
        out[i] = -v[n + i];
        out[n + i] = v[i];
    }
    out
}

/// Flip paired column signs so each left column's largest entry has a
/// nonnegative real part (ties broken by the imaginary part). A joint flip of
/// the same column in both factors leaves the reconstruction unchanged.
fn normalize_column_signs(factors: &mut BlochMessiahFactors) {
    let (rows, cols) = (factors.left.nrows(), factors.left.ncols());
    for j in 0..cols {
        let mut lead = C64::new(0.0, 0.0);
        let mut best = -1.0;
        for i in 0..rows {
            let v = factors.left[(i, j)];
            if v.norm_sqr() > best + 1e-15 {
                best = v.norm_sqr();
                lead = v;
            }
        }
        if lead.re < -1e-12 || (lead.re.abs() <= 1e-12 && lead.im < 0.0) {
            for i in 0..rows {
                factors.left[(i, j)] = -factors.left[(i, j)];
                factors.right[(i, j)] = -factors.right[(i, j)];
            }
        }
    }
}

/// Synthesize a circuit realizing the transform: an input interferometer,
/// one squeezer per mode, an output interferometer, then a displacement.
pub fn synthesize_circuit(t: &BogoliubovTransform, tol: f64) -> Result<OpticalCircuit> {
    let factors = bloch_messiah(t, tol)?;
    let ops = vec![
        PrimitiveOp::Rotation(factors.right.adjoint()),
        PrimitiveOp::Squeeze(factors.squeeze.clone()),
        PrimitiveOp::Rotation(factors.left.clone()),
        PrimitiveOp::Displacement(t.z().map(|v| v.conj())),
    ];
    OpticalCircuit::new(t.mode_count(), ops)
}

/// Move the displacement of a transform to the front: find δ such that
/// displacing the vacuum by δ first and then applying the displacement-free
/// remainder reproduces the full transform. δ solves X δ + Y δ̄ = z, split
/// into real and imaginary parts:
///
/// ```text
/// [ Re X + Re Y   −Im X + Im Y ] [Re δ]   [Re z]
/// [ Im X + Im Y    Re X − Re Y ] [Im δ] = [Im z]
/// ```
pub fn reorder_displacement(t: &BogoliubovTransform) -> Result<DVector<C64>> {
    let m = t.mode_count();
    let z = t.z();
    let z_norm = z.norm();
    if z_norm == 0.0 {
        return Ok(DVector::zeros(m));
    }
    let xr = t.x().map(|v| v.re);
    let xi = t.x().map(|v| v.im);
    let yr = t.y().map(|v| v.re);
    let yi = t.y().map(|v| v.im);

    let mut a = DMatrix::<f64>::zeros(2 * m, 2 * m);
    a.view_mut((0, 0), (m, m)).copy_from(&(&xr + &yr));
    a.view_mut((0, m), (m, m)).copy_from(&(&yi - &xi));
    a.view_mut((m, 0), (m, m)).copy_from(&(&xi + &yi));
    a.view_mut((m, m), (m, m)).copy_from(&(&xr - &yr));

    let mut b = DVector::<f64>::zeros(2 * m);
    for k in 0..m {
        b[k] = z[k].re;
        b[m + k] = z[k].im;
    }

    let svd = a.clone().svd(true, true);
    let s_max = svd.singular_values.max();
    let s_min = svd.singular_values.min();
    let condition = if s_min > 0.0 { s_max / s_min } else { f64::INFINITY };
    let sol = svd
        .solve(&b, s_max * 1e-14)
        .map_err(|_| Error::IllConditionedSolve {
            condition,
            residual: f64::INFINITY,
            threshold: 1e-8 * z_norm,
        })?;
    let residual = (&a * &sol - &b).norm();
    let threshold = 1e-8 * z_norm;
    if residual > threshold {
        return Err(Error::IllConditionedSolve {
            condition,
            residual,
            threshold,
        });
    }
    Ok(DVector::from_fn(m, |k, _| C64::new(sol[k], sol[m + k])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::DEFAULT_TOLERANCE;
    use nalgebra::dvector;

    fn complex_unitary_2() -> DMatrix<C64> {
        // exp of a fixed anti-Hermitian matrix, written out explicitly
        let c = 0.6;
        let s = 0.8;
        DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(c, 0.0),
                C64::new(0.0, s),
                C64::new(0.0, s),
                C64::new(c, 0.0),
            ],
        )
    }

    #[test]
    fn identity_factors_cleanly() {
        let t = BogoliubovTransform::identity(3);
        let f = bloch_messiah(&t, DEFAULT_TOLERANCE).unwrap();
        assert!(f.squeeze.iter().all(|&s| s.abs() < 1e-12));
        assert!((f.reconstruct_y() - t.y()).norm() < 1e-12);
    }

    #[test]
    fn recovers_squeeze_values_through_rotations() {
        let u = complex_unitary_2();
        let circuit = OpticalCircuit::new(
            2,
            vec![
                PrimitiveOp::Rotation(u.adjoint()),
                PrimitiveOp::Squeeze(dvector![0.9, 0.4]),
                PrimitiveOp::Rotation(u.clone()),
            ],
        )
        .unwrap();
        let t = circuit.transform(DEFAULT_TOLERANCE).unwrap();
        let f = bloch_messiah(&t, DEFAULT_TOLERANCE).unwrap();
        assert!((f.squeeze[0] - 0.9).abs() < 1e-10);
        assert!((f.squeeze[1] - 0.4).abs() < 1e-10);
    }

    #[test]
    fn handles_degenerate_and_zero_squeezes() {
        let u = complex_unitary_2();
        let mut big = DMatrix::<C64>::identity(3, 3);
        big.view_mut((0, 0), (2, 2)).copy_from(&u);
        let circuit = OpticalCircuit::new(
            3,
            vec![
                PrimitiveOp::Squeeze(dvector![0.5, 0.5, 0.0]),
                PrimitiveOp::Rotation(big),
            ],
        )
        .unwrap();
        let t = circuit.transform(DEFAULT_TOLERANCE).unwrap();
        let f = bloch_messiah(&t, DEFAULT_TOLERANCE).unwrap();
        let resid = (f.reconstruct_x() - t.x())
            .norm()
            .max((f.reconstruct_y() - t.y()).norm());
        assert!(resid < 1e-10, "residual {resid}");
        assert!((f.squeeze[0] - 0.5).abs() < 1e-10);
        assert!((f.squeeze[1] - 0.5).abs() < 1e-10);
        assert!(f.squeeze[2].abs() < 1e-10);
    }

    #[test]
    fn two_mode_squeezer_factors_with_paired_values() {
        let theta = 1.1;
        let op = PrimitiveOp::TwoModeSqueeze(dvector![theta]);
        let t = op.transform(DEFAULT_TOLERANCE).unwrap();
        let f = bloch_messiah(&t, DEFAULT_TOLERANCE).unwrap();
        assert!((f.squeeze[0] - theta / 2.0).abs() < 1e-10);
        assert!((f.squeeze[1] - theta / 2.0).abs() < 1e-10);
        let resid = (f.reconstruct_x() - t.x())
            .norm()
            .max((f.reconstruct_y() - t.y()).norm());
        assert!(resid < 1e-10, "residual {resid}");
    }

    #[test]
    fn synthesized_circuit_reproduces_transform() {
        let u = complex_unitary_2();
        let circuit = OpticalCircuit::new(
            2,
            vec![
                PrimitiveOp::Displacement(dvector![C64::new(0.3, -0.2), C64::new(0.0, 0.5)]),
                PrimitiveOp::Squeeze(dvector![0.3, 0.7]),
                PrimitiveOp::Rotation(u),
                PrimitiveOp::Displacement(dvector![C64::new(-0.1, 0.4), C64::new(0.2, 0.0)]),
            ],
        )
        .unwrap();
        let t = circuit.transform(DEFAULT_TOLERANCE).unwrap();
        let resynth = synthesize_circuit(&t, DEFAULT_TOLERANCE).unwrap();
        let t2 = resynth.transform(DEFAULT_TOLERANCE).unwrap();
        assert!((t2.x() - t.x()).norm() < 1e-10);
        assert!((t2.y() - t.y()).norm() < 1e-10);
        assert!((t2.z() - t.z()).norm() < 1e-10);
    }

    #[test]
    fn reordered_displacement_recovers_initial_offset() {
        // displacing first by α and then squeezing is the reference; the
        // reorder of the composed transform must return exactly α.
        let alpha = C64::new(0.4, -0.7);
        let circuit = OpticalCircuit::new(
            1,
            vec![
                PrimitiveOp::Displacement(dvector![alpha]),
                PrimitiveOp::Squeeze(dvector![0.35]),
            ],
        )
        .unwrap();
        let t = circuit.transform(DEFAULT_TOLERANCE).unwrap();
        let delta = reorder_displacement(&t).unwrap();
        assert!((delta[0] - alpha).norm() < 1e-12);
    }

    #[test]
    fn zero_displacement_reorders_to_zero() {
        let t = BogoliubovTransform::identity(2);
        let delta = reorder_displacement(&t).unwrap();
        assert!(delta.norm() == 0.0);
    }

    #[test]
    fn rejects_asymmetric_gauge_input() {
        // a transform violating the symmetry constraint sneaks past `new`
        // only through from_parts; bloch_messiah must still catch it
        let x = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.5, 0.0),
                C64::new(0.3, 0.0),
                C64::new(-0.3, 0.0),
                C64::new(0.5, 0.0),
            ],
        );
        let mut y = DMatrix::<C64>::identity(2, 2);
        let norm = (1.0f64 + 0.25 + 0.09).sqrt();
        y[(0, 0)] = C64::new(norm, 0.0);
        y[(1, 1)] = C64::new(norm, 0.0);
        let t = BogoliubovTransform::from_parts(x, y, DVector::zeros(2)).unwrap();
        assert!(matches!(
            bloch_messiah(&t, DEFAULT_TOLERANCE),
            Err(Error::DecompositionFailed { .. })
        ));
    }
}
