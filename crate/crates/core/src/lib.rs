//! Volume-constrained optimal design of Steklov eigenvalues of the
//! g-Laplacian on Orlicz–Sobolev spaces, discretized with P1 finite elements.
//!
//! The crate is organised bottom-up:
//!
//! - [`young`]: Young functions, conjugates, inverses, Luxemburg norms.
//! - [`mesh`]: triangulations of the unit square and the unit disk.
//! - [`modular`]: modulars and assembled weak-form residuals on the P1 space.
//! - [`state`]: the inner constrained minimization `Λ(α, φ)`.
//! - [`design`]: bathtub rearrangement, alternating minimization, derivative
//!   and level-set diagnostics, spherical symmetrization on the disk.
//! - [`limits`]: the `α → ∞` limit and the hole problem `λ(∞, c)`.

pub mod design;
pub mod error;
pub mod limits;
pub mod mesh;
pub mod modular;
pub mod quad;
pub mod sparse;
pub mod state;
pub mod young;

pub use error::{Error, Result};
