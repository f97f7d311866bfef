//! Dense complex matrix kernel: arithmetic, norms, sorted Hermitian
//! eigendecomposition, sorted SVD and canonical angles.

mod angles;
mod eigh;
mod matrix;
mod phase;
mod qr;
mod svd;

pub use angles::{matrix_norm, sin_theta, spectral_norm, NormKind, SinTheta, ORTHONORMAL_TOLERANCE};
pub use eigh::{eigh_sorted, SpectralDecomposition};
pub use matrix::{affine, ComplexMatrix, C64, HERMITIAN_TOLERANCE};
pub use phase::{canonical_phase, fix_column_phases};
pub use qr::{complete_orthonormal, thin_qr};
pub use svd::{svd_sorted, SingularDecomposition};
