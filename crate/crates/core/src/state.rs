//! Gaussian states as first and second moments of the mode operators.
//!
//! The covariance is kept in the (a, a†) ordering: with ξ = (a_1..a_M,
//! a_1†..a_M†) and Δξ = ξ − ⟨ξ⟩,
//! ```text
//! σ[i,j] = ⟨Δξ_i Δξ_j† + Δξ_j† Δξ_i⟩ / 2
//! ```
//! so the vacuum has σ = I/2. Physical states satisfy σ − K/2 ⪰ 0 with
//! K = diag(I, −I), and pure states additionally (Kσ)² = I/4.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::transform::BogoliubovTransform;

#[derive(Debug, Clone)]
pub struct GaussianState {
    mean: DVector<C64>,
    cov: DMatrix<C64>,
}

impl GaussianState {
    pub fn vacuum(modes: usize) -> Self {
        Self {
            mean: DVector::zeros(modes),
            cov: DMatrix::identity(2 * modes, 2 * modes) * C64::new(0.5, 0.0),
        }
    }

    pub fn mode_count(&self) -> usize {
        self.mean.len()
    }

    /// First moments ⟨a_k⟩.
    pub fn mean(&self) -> &DVector<C64> {
        &self.mean
    }

    /// Symmetrized second moments in the (a, a†) basis, 2M x 2M.
    pub fn covariance(&self) -> &DMatrix<C64> {
        &self.cov
    }

    /// ⟨a_j† a_k⟩ − ⟨a_j†⟩⟨a_k⟩ as an M x M matrix (the "number" block).
    pub fn number_block(&self) -> DMatrix<C64> {
        let m = self.mode_count();
        let mut n = DMatrix::zeros(m, m);
        for j in 0..m {
            for k in 0..m {
                // top-left block is N + I/2 with N[j,k] = ⟨Δa_k† Δa_j⟩
                let half = if j == k { 0.5 } else { 0.0 };
                n[(j, k)] = self.cov[(k, j)] - C64::new(half, 0.0);
            }
        }
        n
    }

    /// Mean photon number per mode, ⟨a_k† a_k⟩.
    pub fn mean_photon_numbers(&self) -> Vec<f64> {
        let n = self.number_block();
        (0..self.mode_count())
            .map(|k| n[(k, k)].re + self.mean[k].norm_sqr())
            .collect()
    }

    /// Keeps only the listed modes, tracing out the rest.
    pub fn reduce_modes(&self, keep: &[usize]) -> Result<Self> {
        let m = self.mode_count();
        if keep.is_empty() {
            return Err(Error::InvalidParameter("must keep at least one mode".into()));
        }
        for &k in keep {
            if k >= m {
                return Err(Error::InvalidParameter(format!(
                    "mode index {k} out of range for {m} modes"
                )));
            }
        }
        let r = keep.len();
        let mean = DVector::from_fn(r, |i, _| self.mean[keep[i]]);
        let pick = |i: usize| if i < r { keep[i] } else { m + keep[i - r] };
        let cov = DMatrix::from_fn(2 * r, 2 * r, |i, j| self.cov[(pick(i), pick(j))]);
        Ok(Self { mean, cov })
    }

    /// Frobenius distance of (Kσ)² from I/4; zero for pure states.
    pub fn purity_defect(&self) -> f64 {
        let n = self.cov.nrows();
        let ks = k_matrix(n / 2) * &self.cov;
        (&ks * &ks - DMatrix::<C64>::identity(n, n) * C64::new(0.25, 0.0)).norm()
    }

    /// Most negative eigenvalue of σ − K/2, clamped at zero for physical
    /// states (up to rounding).
    pub fn physicality_defect(&self) -> f64 {
        let n = self.cov.nrows();
        let h = &self.cov - k_matrix(n / 2) * C64::new(0.5, 0.0);
        // enforce exact hermiticity before the eigensolve
        let h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
        let eig = nalgebra::SymmetricEigen::new(h);
        let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        (-min).max(0.0)
    }

    /// Symplectic spectrum: the M positive eigenvalues of Kσ, each 1/2 for
    /// pure modes and n̄ + 1/2 for thermal ones.
    pub fn symplectic_eigenvalues(&self) -> Vec<f64> {
        let n = self.cov.nrows();
        let herm = (&self.cov + self.cov.adjoint()) * C64::new(0.5, 0.0);
        let eig = nalgebra::SymmetricEigen::new(herm);
        // σ^{1/2} K σ^{1/2} is Hermitian and shares the ±ν spectrum of Kσ
        let vals = eig.eigenvalues.map(|v| C64::new(v.max(0.0).sqrt(), 0.0));
        let sqrt = &eig.eigenvectors * DMatrix::from_diagonal(&vals) * eig.eigenvectors.adjoint();
        let h = &sqrt * k_matrix(n / 2) * &sqrt;
        let h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
        let mut nu: Vec<f64> = nalgebra::SymmetricEigen::new(h)
            .eigenvalues
            .iter()
            .filter(|v| **v > 0.0)
            .cloned()
            .collect();
        nu.sort_by(|a, b| b.partial_cmp(a).unwrap());
        nu
    }

    /// Largest absolute difference in mean or covariance entries.
    pub fn max_difference(&self, other: &Self) -> f64 {
        let dm = (&self.mean - &other.mean)
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        let dc = (&self.cov - &other.cov)
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        dm.max(dc)
    }
}

/// K = diag(I_M, −I_M), the commutation metric in the (a, a†) basis.
fn k_matrix(modes: usize) -> DMatrix<C64> {
    DMatrix::from_fn(2 * modes, 2 * modes, |i, j| {
        if i != j {
            C64::new(0.0, 0.0)
        } else if i < modes {
            C64::new(1.0, 0.0)
        } else {
            C64::new(-1.0, 0.0)
        }
    })
}

/// The Gaussian state T|0⟩ described by its moments.
///
/// With O† a† O = X a + Y a† + z the Heisenberg images give
/// mean ⟨a⟩ = z* and covariance σ = T_c σ_vac T_c† where
/// T_c = [[Y*, X*], [X, Y]] is the transform's action on (a, a†).
pub fn apply_to_vacuum(t: &BogoliubovTransform) -> GaussianState {
    let m = t.mode_count();
    let mut tc = DMatrix::zeros(2 * m, 2 * m);
    tc.view_mut((0, 0), (m, m)).copy_from(&t.y().conjugate());
    tc.view_mut((0, m), (m, m)).copy_from(&t.x().conjugate());
    tc.view_mut((m, 0), (m, m)).copy_from(t.x());
    tc.view_mut((m, m), (m, m)).copy_from(t.y());
    let cov = &tc * tc.adjoint() * C64::new(0.5, 0.0);
    GaussianState {
        mean: t.z().conjugate(),
        cov,
    }
}
