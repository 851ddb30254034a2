//! Poisson-Lie dynamical r-matrices by Dirac reduction of dual Poisson-Lie
//! groups, with numerical certificates for the equations they satisfy.

pub mod bialgebra;
pub mod catalog;
pub mod dual_group;
pub mod error;
pub mod fd;
pub mod lie_core;
pub mod linalg;
pub mod reduction;
pub mod specfile;
pub mod suite;
pub mod verify;

pub use error::{Error, Result};
pub use lie_core::{LieAlgebra, SlotPair, Subspace, Tensor2, Tensor3};
pub use linalg::{Matrix, Vector};
