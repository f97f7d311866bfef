//! Tracking of smooth eigen- and singular-value decompositions along the
//! affine homotopies `A + tΔA` and `B + tΔB`, and evaluation of combined
//! eigenvalue/eigenspace and singular value/subspace perturbation bounds.

pub mod bounds;
pub mod error;
pub mod harness;
pub mod homotopy;
pub mod matcore;
pub mod pipeline;

pub use error::{Error, Result};
