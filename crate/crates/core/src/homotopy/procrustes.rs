use crate::error::{Error, Result};
use crate::matcore::{svd_sorted, ComplexMatrix, ORTHONORMAL_TOLERANCE};

/// Smallest singular value of `nextᴴ·prev` below which consecutive
/// subspaces are treated as numerically orthogonal.
pub const COLLAPSE_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct Alignment {
    /// `next · rotation`.
    pub aligned: ComplexMatrix,
    /// Unitary `r x r` minimizer of `‖next·P − prev‖_F`.
    pub rotation: ComplexMatrix,
}

/// Rotates the basis `next` within its span to be as close as possible to
/// `prev`.
///
/// The minimizer is the unitary polar factor of `nextᴴ·prev`; afterwards
/// `prevᴴ·aligned` is Hermitian positive semidefinite, which is the discrete
/// form of the gauge condition `Uᴴ·dU/dt = 0`.
pub fn align_procrustes(prev: &ComplexMatrix, next: &ComplexMatrix) -> Result<Alignment> {
    if prev.shape() != next.shape() {
        return Err(Error::Shape(format!(
            "cannot align a {:?} basis to a {:?} basis",
            next.shape(),
            prev.shape()
        )));
    }
    prev.require_orthonormal(ORTHONORMAL_TOLERANCE)?;
    next.require_orthonormal(ORTHONORMAL_TOLERANCE)?;
    align_unchecked(prev, next)
}

/// [`align_procrustes`] without the orthonormality checks, for trusted
/// inputs inside the trackers.
pub(crate) fn align_unchecked(prev: &ComplexMatrix, next: &ComplexMatrix) -> Result<Alignment> {
    if prev == next {
        return Ok(Alignment {
            aligned: next.clone(),
            rotation: ComplexMatrix::identity(next.cols()),
        });
    }
    let cross = next.adjoint_mul(prev);
    let svd = svd_sorted(&cross)?;
    let smallest = *svd.singulars.last().expect("nonempty block");
    if smallest < COLLAPSE_THRESHOLD {
        return Err(Error::RankCollapse {
            smallest_cosine: smallest,
        });
    }
    let rotation = svd.left.matmul(&svd.right.adjoint());
    let aligned = next.matmul(&rotation);
    Ok(Alignment { aligned, rotation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{thin_qr, C64};

    fn unitary(n: usize, seed: f64) -> ComplexMatrix {
        let g = ComplexMatrix::from_fn(n, n, |i, j| {
            C64::new(
                ((i * 7 + j * 3) as f64 + seed).sin(),
                ((i * 5 + j * 11) as f64 * seed).cos(),
            )
        });
        thin_qr(&g).0
    }

    #[test]
    fn identity_alignment() {
        let prev = unitary(4, 0.3).column_block(0, 2);
        let a = align_procrustes(&prev, &prev).unwrap();
        assert!((&a.rotation - &ComplexMatrix::identity(2)).frobenius_norm() < 1e-14);
        assert!((&a.aligned - &prev).frobenius_norm() < 1e-14);
    }

    #[test]
    fn recovers_a_pure_gauge_rotation() {
        let prev = unitary(5, 1.7).column_block(0, 3);
        let q = unitary(3, 0.9);
        let next = prev.matmul(&q);
        let a = align_procrustes(&prev, &next).unwrap();
        assert!((&a.rotation - &q.adjoint()).frobenius_norm() < 1e-12);
        assert!((&a.aligned - &prev).frobenius_norm() < 1e-12);
    }

    #[test]
    fn orthogonal_subspaces_collapse() {
        let i = ComplexMatrix::identity(2);
        let e1 = i.column_block(0, 1);
        let e2 = i.column_block(1, 1);
        assert!(matches!(
            align_procrustes(&e1, &e2),
            Err(Error::RankCollapse { .. })
        ));
    }

    #[test]
    fn rejects_non_orthonormal_input() {
        let prev = ComplexMatrix::identity(2).column_block(0, 1);
        let bad = prev.scale(2.0);
        assert!(matches!(
            align_procrustes(&prev, &bad),
            Err(Error::NotOrthonormal { .. })
        ));
    }
}
