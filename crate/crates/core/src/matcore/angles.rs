use super::matrix::ComplexMatrix;
use super::svd::svd_sorted;
use crate::error::{Error, Result};

/// Orthonormality tolerance for subspace bases handed to angle routines.
pub const ORTHONORMAL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    Frobenius,
    Spectral,
}

pub fn matrix_norm(m: &ComplexMatrix, kind: NormKind) -> Result<f64> {
    m.check_finite()?;
    Ok(match kind {
        NormKind::Frobenius => m.frobenius_norm(),
        NormKind::Spectral => spectral_norm_unchecked(m)?,
    })
}

/// Largest singular value.
pub fn spectral_norm(m: &ComplexMatrix) -> Result<f64> {
    matrix_norm(m, NormKind::Spectral)
}

fn spectral_norm_unchecked(m: &ComplexMatrix) -> Result<f64> {
    let d = if m.rows() >= m.cols() {
        svd_sorted(m)?
    } else {
        svd_sorted(&m.adjoint())?
    };
    Ok(d.singulars[0])
}

/// Sines of the canonical angles between two `r`-dimensional subspaces.
#[derive(Debug, Clone, PartialEq)]
pub struct SinTheta {
    /// `‖sinΘ‖_F`.
    pub fro: f64,
    /// `‖sinΘ‖₂`.
    pub spec: f64,
    /// Sorted nondecreasing.
    pub angle_sines: Vec<f64>,
}

/// Canonical angles between `R(U1)` and `R(U1t)`.
///
/// Cosines are the singular values of `U1ᴴ·U1t` clamped to `[0, 1]`. For
/// angles below π/4 the sine is taken from the singular values of the
/// projection residual `U1t − U1·(U1ᴴ·U1t)`, which stays accurate where
/// `sqrt(1 − cos²)` loses all digits.
pub fn sin_theta(u1: &ComplexMatrix, u1t: &ComplexMatrix) -> Result<SinTheta> {
    if u1.cols() != u1t.cols() {
        return Err(Error::RankMismatch {
            left: u1.cols(),
            right: u1t.cols(),
        });
    }
    if u1.rows() != u1t.rows() {
        return Err(Error::Shape(format!(
            "bases live in different spaces: {} vs {} rows",
            u1.rows(),
            u1t.rows()
        )));
    }
    u1.check_finite()?;
    u1t.check_finite()?;
    u1.require_orthonormal(ORTHONORMAL_TOLERANCE)?;
    u1t.require_orthonormal(ORTHONORMAL_TOLERANCE)?;
    if u1 == u1t {
        return Ok(SinTheta {
            fro: 0.0,
            spec: 0.0,
            angle_sines: vec![0.0; u1.cols()],
        });
    }

    let overlap = u1.adjoint_mul(u1t);
    let mut cosines = svd_sorted(&overlap)?.singulars;
    for c in cosines.iter_mut() {
        *c = c.clamp(0.0, 1.0);
    }
    // cosines nonincreasing, so sines from them are nondecreasing
    let mut sines: Vec<f64> = cosines.iter().map(|c| (1.0 - c * c).sqrt()).collect();

    if cosines.iter().any(|&c| c * c >= 0.5) {
        let residual = u1t - &u1.matmul(&overlap);
        // n >= r holds for any orthonormal n x r basis
        let mut residual_sines = svd_sorted(&residual)?.singulars;
        residual_sines.reverse();
        for (i, c) in cosines.iter().enumerate() {
            if c * c >= 0.5 {
                sines[i] = residual_sines[i].clamp(0.0, 1.0);
            }
        }
    }
    sines.sort_by(f64::total_cmp);
    let fro = sines.iter().map(|s| s * s).sum::<f64>().sqrt();
    let spec = sines.last().copied().unwrap_or(0.0);
    Ok(SinTheta {
        fro,
        spec,
        angle_sines: sines,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::C64;

    fn col(entries: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_fn(entries.len(), 1, |i, _| C64::new(entries[i], 0.0))
    }

    #[test]
    fn identical_and_orthogonal_subspaces() {
        let e1 = col(&[1.0, 0.0]);
        let e2 = col(&[0.0, 1.0]);
        let same = sin_theta(&e1, &e1).unwrap();
        assert_eq!((same.fro, same.spec), (0.0, 0.0));
        assert_eq!(same.angle_sines, vec![0.0]);
        let orth = sin_theta(&e1, &e2).unwrap();
        assert_eq!((orth.fro, orth.spec), (1.0, 1.0));
    }

    #[test]
    fn planar_rotation_by_pi_over_six() {
        let a = std::f64::consts::FRAC_PI_6;
        let s = sin_theta(&col(&[1.0, 0.0]), &col(&[a.cos(), a.sin()])).unwrap();
        assert!((s.fro - 0.5).abs() < 1e-15);
        assert!((s.spec - 0.5).abs() < 1e-15);
        assert!((s.angle_sines[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn tiny_angles_are_resolved() {
        let a = 1e-12f64;
        let s = sin_theta(&col(&[1.0, 0.0]), &col(&[a.cos(), a.sin()])).unwrap();
        assert!((s.spec - 1e-12).abs() < 1e-20);
    }

    #[test]
    fn errors() {
        let e1 = col(&[1.0, 0.0]);
        let two = ComplexMatrix::identity(2);
        assert!(matches!(sin_theta(&e1, &two), Err(Error::RankMismatch { .. })));
        let not_unit = col(&[2.0, 0.0]);
        assert!(matches!(
            sin_theta(&e1, &not_unit),
            Err(Error::NotOrthonormal { .. })
        ));
    }

    #[test]
    fn norms_of_simple_matrices() {
        let i3 = ComplexMatrix::identity(3);
        assert!((matrix_norm(&i3, NormKind::Frobenius).unwrap() - 3f64.sqrt()).abs() < 1e-15);
        assert!((matrix_norm(&i3, NormKind::Spectral).unwrap() - 1.0).abs() < 1e-15);
        let r1 = ComplexMatrix::from_real_rows(&[&[3.0, 4.0], &[0.0, 0.0]]);
        assert!((matrix_norm(&r1, NormKind::Frobenius).unwrap() - 5.0).abs() < 1e-15);
        assert!((matrix_norm(&r1, NormKind::Spectral).unwrap() - 5.0).abs() < 1e-14);
    }
}
