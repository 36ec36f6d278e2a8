//! Bogoliubov transforms of bosonic mode operators and the primitive optical
//! operations that generate them.
//!
//! A Gaussian unitary `O` on `M` modes acts on creation operators as
//! ```text
//! O† a_i† O = Σ_j X[i,j] a_j + Y[i,j] a_j† + z[i]
//! ```
//! and is represented here by the triple `(X, Y, z)`. Every physical
//! transform satisfies
//! ```text
//! Y Y† − X X† = I      (metric)
//! X Yᵀ = Y Xᵀ          (symmetry)
//! ```
//! which [`BogoliubovTransform::residuals`] measures in Frobenius norm.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Default Frobenius-norm tolerance for constraint and unitarity checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Frobenius residuals of the two Bogoliubov constraints.
#[derive(Debug, Clone, Copy)]
pub struct ConstraintResiduals {
    /// ‖Y Y† − X X† − I‖_F
    pub metric: f64,
    /// ‖X Yᵀ − Y Xᵀ‖_F
    pub symmetry: f64,
}

impl ConstraintResiduals {
    pub fn max(&self) -> f64 {
        self.metric.max(self.symmetry)
    }
}

/// The affine action of a Gaussian unitary on creation operators.
#[derive(Debug, Clone, PartialEq)]
pub struct BogoliubovTransform {
    x: DMatrix<C64>,
    y: DMatrix<C64>,
    z: DVector<C64>,
}

impl BogoliubovTransform {
    /// Builds a transform from its parts, checking shapes and the Bogoliubov
    /// constraints at tolerance `tol`.
    pub fn new(x: DMatrix<C64>, y: DMatrix<C64>, z: DVector<C64>, tol: f64) -> Result<Self> {
        let t = Self::from_parts(x, y, z)?;
        t.validate(tol)?;
        Ok(t)
    }

    /// Shape-checked construction without the constraint check. Used where
    /// validity is guaranteed algebraically (primitives, composition).
    pub(crate) fn from_parts(x: DMatrix<C64>, y: DMatrix<C64>, z: DVector<C64>) -> Result<Self> {
        let m = y.nrows();
        if y.ncols() != m {
            return Err(Error::NotSquare {
                what: "Y",
                rows: y.nrows(),
                cols: y.ncols(),
            });
        }
        if x.nrows() != m || x.ncols() != m {
            return Err(Error::ModeMismatch {
                expected: m,
                got: x.nrows().max(x.ncols()),
            });
        }
        if z.len() != m {
            return Err(Error::ModeMismatch {
                expected: m,
                got: z.len(),
            });
        }
        Ok(Self { x, y, z })
    }

    /// The identity transform on `modes` modes.
    pub fn identity(modes: usize) -> Self {
        Self {
            x: DMatrix::zeros(modes, modes),
            y: DMatrix::identity(modes, modes),
            z: DVector::zeros(modes),
        }
    }

    pub fn mode_count(&self) -> usize {
        self.y.nrows()
    }

    pub fn x(&self) -> &DMatrix<C64> {
        &self.x
    }

    pub fn y(&self) -> &DMatrix<C64> {
        &self.y
    }

    pub fn z(&self) -> &DVector<C64> {
        &self.z
    }

    /// Frobenius residuals of the metric and symmetry constraints.
    pub fn residuals(&self) -> ConstraintResiduals {
        let m = self.mode_count();
        let metric =
            (&self.y * self.y.adjoint() - &self.x * self.x.adjoint() - DMatrix::identity(m, m))
                .norm();
        let symmetry = (&self.x * self.y.transpose() - &self.y * self.x.transpose()).norm();
        ConstraintResiduals { metric, symmetry }
    }

    /// Errors unless both constraint residuals are within `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let r = self.residuals();
        if r.metric > tol || r.symmetry > tol {
            return Err(Error::ConstraintViolation {
                metric: r.metric,
                symmetry: r.symmetry,
                tol,
            });
        }
        Ok(())
    }

    /// Embeds an `M`-mode transform on the first `M` modes of a register with
    /// `extra` additional modes that are left untouched.
    pub fn embed_leading(&self, extra: usize) -> Self {
        let m = self.mode_count();
        let n = m + extra;
        let mut x = DMatrix::zeros(n, n);
        let mut y = DMatrix::identity(n, n);
        let mut z = DVector::zeros(n);
        x.view_mut((0, 0), (m, m)).copy_from(&self.x);
        y.view_mut((0, 0), (m, m)).copy_from(&self.y);
        z.rows_mut(0, m).copy_from(&self.z);
        Self { x, y, z }
    }

    /// Composition: the transform of "apply `first`, then `then`".
    ///
    /// With O = O_then · O_first,
    /// ```text
    /// X = X_then Y_first* + Y_then X_first
    /// Y = X_then X_first* + Y_then Y_first
    /// z = X_then z_first* + Y_then z_first + z_then
    /// ```
    pub fn compose(first: &Self, then: &Self) -> Result<Self> {
        let m = first.mode_count();
        if then.mode_count() != m {
            return Err(Error::ModeMismatch {
                expected: m,
                got: then.mode_count(),
            });
        }
        let xf_conj = first.x.conjugate();
        let yf_conj = first.y.conjugate();
        let zf_conj = first.z.conjugate();
        let x = &then.x * &yf_conj + &then.y * &first.x;
        let y = &then.x * &xf_conj + &then.y * &first.y;
        let z = &then.x * &zf_conj + &then.y * &first.z + &then.z;
        Ok(Self { x, y, z })
    }
}

/// Frobenius distance from unitarity, ‖U†U − I‖_F.
pub fn unitarity_residual(u: &DMatrix<C64>) -> f64 {
    let n = u.ncols();
    (u.adjoint() * u - DMatrix::<C64>::identity(n, n)).norm()
}

fn check_unitary(u: &DMatrix<C64>, what: &'static str, tol: f64) -> Result<()> {
    if u.nrows() != u.ncols() {
        return Err(Error::NotSquare {
            what,
            rows: u.nrows(),
            cols: u.ncols(),
        });
    }
    let residual = unitarity_residual(u);
    if residual > tol {
        return Err(Error::NotUnitary {
            what,
            residual,
            tol,
        });
    }
    Ok(())
}

/// A primitive Gaussian operation. Parameters are the operator subscripts,
/// not the transform entries; see [`PrimitiveOp::transform`] for the map.
#[derive(Debug, Clone)]
pub enum PrimitiveOp {
    /// R_U = exp((a†)ᵀ ln(U*) a), with O† a† O = U a†. `U` must be unitary.
    Rotation(DMatrix<C64>),
    /// D_α = exp(αᵀ a† − α† a), with O† a† O = a† + α*.
    ///
    /// Stores the operator subscript α; the transform offset is z = α*.
    Displacement(DVector<C64>),
    /// S_Σ = exp(((a†)ᵀ Σ a† − aᵀ Σ a) / 2) with Σ = diag(λ) real, giving
    /// O† a† O = sinh(Σ) a + cosh(Σ) a†.
    Squeeze(DVector<f64>),
    /// V(θ) = ⊗_k exp(θ_k (a_k† b_k† − a_k b_k) / 2) on a 2M-mode register,
    /// pairing modes (k, M+k). `θ` has length M.
    TwoModeSqueeze(DVector<f64>),
}

impl PrimitiveOp {
    /// Number of modes the operation acts on.
    pub fn mode_count(&self) -> usize {
        match self {
            PrimitiveOp::Rotation(u) => u.nrows(),
            PrimitiveOp::Displacement(a) => a.len(),
            PrimitiveOp::Squeeze(l) => l.len(),
            PrimitiveOp::TwoModeSqueeze(t) => 2 * t.len(),
        }
    }

    /// The Bogoliubov transform of this operation.
    pub fn transform(&self, tol: f64) -> Result<BogoliubovTransform> {
        match self {
            PrimitiveOp::Rotation(u) => {
                check_unitary(u, "rotation matrix", tol)?;
                let m = u.nrows();
                Ok(BogoliubovTransform {
                    x: DMatrix::zeros(m, m),
                    y: u.clone(),
                    z: DVector::zeros(m),
                })
            }
            PrimitiveOp::Displacement(alpha) => {
                let m = alpha.len();
                Ok(BogoliubovTransform {
                    x: DMatrix::zeros(m, m),
                    y: DMatrix::identity(m, m),
                    z: alpha.conjugate(),
                })
            }
            PrimitiveOp::Squeeze(lambda) => {
                let m = lambda.len();
                let x = DMatrix::from_fn(m, m, |i, j| {
                    if i == j {
                        C64::new(lambda[i].sinh(), 0.0)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                });
                let y = DMatrix::from_fn(m, m, |i, j| {
                    if i == j {
                        C64::new(lambda[i].cosh(), 0.0)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                });
                Ok(BogoliubovTransform {
                    x,
                    y,
                    z: DVector::zeros(m),
                })
            }
            PrimitiveOp::TwoModeSqueeze(theta) => {
                let m = theta.len();
                let n = 2 * m;
                let mut x = DMatrix::zeros(n, n);
                let mut y = DMatrix::zeros(n, n);
                for k in 0..m {
                    let sh = C64::new((theta[k] / 2.0).sinh(), 0.0);
                    let ch = C64::new((theta[k] / 2.0).cosh(), 0.0);
                    x[(k, m + k)] = sh;
                    x[(m + k, k)] = sh;
                    y[(k, k)] = ch;
                    y[(m + k, m + k)] = ch;
                }
                Ok(BogoliubovTransform {
                    x,
                    y,
                    z: DVector::zeros(n),
                })
            }
        }
    }
}

/// A sequence of primitive operations on a fixed register; `ops[0]` is
/// applied first.
#[derive(Debug, Clone)]
pub struct OpticalCircuit {
    mode_count: usize,
    ops: Vec<PrimitiveOp>,
}

impl OpticalCircuit {
    pub fn new(mode_count: usize, ops: Vec<PrimitiveOp>) -> Result<Self> {
        if mode_count == 0 {
            return Err(Error::InvalidParameter(
                "circuit needs at least one mode".into(),
            ));
        }
        for op in &ops {
            if op.mode_count() != mode_count {
                return Err(Error::ModeMismatch {
                    expected: mode_count,
                    got: op.mode_count(),
                });
            }
        }
        Ok(Self { mode_count, ops })
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn ops(&self) -> &[PrimitiveOp] {
        &self.ops
    }

    /// Folds the circuit into a single transform, first op innermost.
    pub fn transform(&self, tol: f64) -> Result<BogoliubovTransform> {
        let mut acc = BogoliubovTransform::identity(self.mode_count);
        for op in &self.ops {
            let t = op.transform(tol)?;
            acc = BogoliubovTransform::compose(&acc, &t)?;
        }
        Ok(acc)
    }
}
