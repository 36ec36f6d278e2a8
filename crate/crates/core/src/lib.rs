//! Gaussian optical circuits for molecular vibronic spectroscopy.
//!
//! The crate models linear-optical networks acting on bosonic modes at three
//! levels that stay in exact correspondence:
//!
//! * [`transform`]: the Heisenberg-picture action of a circuit on mode
//!   operators, as an affine Bogoliubov transform (X, Y, z).
//! * [`state`]: Gaussian states through their first and second moments, for
//!   moment-level checks that avoid any Fock truncation.
//! * [`fock`]: exact amplitudes on a truncated Fock grid, the slow but
//!   direct oracle the fast paths are tested against.
//!
//! On top of those sit [`bloch_messiah`] (circuit synthesis from a transform),
//! [`doktorov`] (the vibronic transform of a molecule between two electronic
//! surfaces), [`extended`] (finite-temperature purification on doubled modes),
//! and [`spectrum`] (Franck-Condon profiles by direct enumeration and by the
//! single-pass doubled-mode route).

pub mod bloch_messiah;
pub mod doktorov;
pub mod error;
pub mod extended;
pub mod fock;
pub mod spectrum;
pub mod state;
pub mod transform;

pub use error::{Error, Result};
pub use transform::{BogoliubovTransform, OpticalCircuit, PrimitiveOp, DEFAULT_TOLERANCE};

/// Complex double-precision scalar used throughout.
pub type C64 = num_complex::Complex64;
