//! Covariance-matrix toolkit for permutation-invariant multipartite
//! Gaussian states: preparation, Gaussian LOCC transformation protocols,
//! tripartite entanglement classification, and assisted-teleportation
//! fidelity.
//!
//! Quadrature convention: `x = a + a^dag`, vacuum variance 1, so the
//! vacuum covariance matrix is the identity. Other common conventions
//! differ by factors of 2; all formulas here assume this normalization.

pub mod cubic;
pub mod entanglement;
pub mod error;
pub mod linalg;
pub mod protocols;
pub mod states;
pub mod symplectic;
pub mod teleportation;

pub use error::{Error, Result};
pub use states::{EffectiveScheme, StateDescriptor, SymmetricState};
pub use symplectic::{CovarianceMatrix, Quadrature, SymplecticForm, SymplecticOp};
