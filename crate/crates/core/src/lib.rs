//! Valley-pseudospin qubit toolkit: simulate polarization-resolved PL of a
//! prepared qubit state, reconstruct the density matrix from scans, check
//! uncertainty relations, and model coherent precession in a magnetic field.

#![forbid(unsafe_code)]

pub mod dynamics;
pub mod error;
pub mod mat2;
pub mod plmodel;
pub mod qstate;
pub mod tol;
pub mod tomography;
pub mod uncertainty;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use mat2::Mat2;
pub use num_complex::Complex64;
pub use qstate::{DensityMatrix, Observable, PureStateAngles};

pub use dynamics::{FieldParams, PrecessionResult, QuadratureCheck};
pub use plmodel::{NoiseSpec, PLScan, PhysicalParams};
pub use tomography::{NormalizedScan, ReconstructionConfig, TomographyResult};
pub use uncertainty::{ObservablePair, UncertaintyReport};
