//! Exact construction of the Maslov index of a cyclic tuple of Lagrangian subspaces
//! as a quadratic space, with the surrounding structural identities, a cellular
//! cochain oracle and the finite-field Weil-representation comparison.

pub mod error;
pub mod field;
pub mod instances;
pub mod maslov;
pub mod matrix;
pub mod properties;
pub mod sheaf;
pub mod subspace;
pub mod symplectic;
pub mod weil;
pub mod witt;

pub use error::{MaslovError, Result};
pub use field::{Field, Fp, PrimeField, Rationals, Scalar};
pub use matrix::Matrix;
pub use subspace::Subspace;
pub use symplectic::{LagrangianTuple, SymplecticSpace};
