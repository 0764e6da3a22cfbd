//! Two-qutrit Bell-diagonal states ("magic simplex"): Weyl operators, the
//! affine symmetry group of the 3x3 phase space, partial transposition,
//! entanglement witnesses and separability boundaries.

pub mod boundary;
pub mod eig3;
pub mod error;
pub mod io;
pub mod linalg;
pub mod optim;
pub mod phase_space;
pub mod ppt;
pub mod simplex;
pub mod verify;
pub mod weyl_bell;
pub mod witness;

pub use error::{Error, Result};
