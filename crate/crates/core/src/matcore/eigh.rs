//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.

use super::matrix::{ComplexMatrix, C64};
use super::phase::fix_column_phases;
use crate::error::{Error, Result};

const OFF_DIAGONAL_TOLERANCE: f64 = 1e-14;
const MAX_SWEEPS: usize = 30;

/// Eigenvalues sorted nonincreasing with a unitary eigenbasis.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub basis: ComplexMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `U·diag(λ)·Uᴴ`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let scaled = ComplexMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            self.basis[(i, j)] * self.eigenvalues[j]
        });
        scaled.matmul(&self.basis.adjoint())
    }
}

/// Sorted eigendecomposition of a Hermitian matrix.
///
/// The input is symmetrized before iterating. Columns are phase-normalized so
/// that each column's largest-magnitude entry (lowest row on ties) is real and
/// nonnegative.
pub fn eigh_sorted(a: &ComplexMatrix) -> Result<SpectralDecomposition> {
    a.require_hermitian()?;
    let n = a.rows();
    let mut work = a.hermitian_part();
    let mut basis = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();

    let mut converged = off_diagonal_norm(&work) <= OFF_DIAGONAL_TOLERANCE * scale;
    let mut sweeps = 0;
    while !converged && sweeps < MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                rotated |= rotate(&mut work, &mut basis, p, q);
            }
        }
        sweeps += 1;
        converged = !rotated || off_diagonal_norm(&work) <= OFF_DIAGONAL_TOLERANCE * scale;
    }
    if !converged {
        return Err(Error::NoConvergence {
            method: "Hermitian Jacobi",
            sweeps,
        });
    }

    let diag = work.real_diagonal();
    let mut order: Vec<usize> = (0..n).collect();
    // stable: equal eigenvalues keep Jacobi's column order
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]));
    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let mut basis = basis.select_columns(&order);
    fix_column_phases(&mut basis);
    Ok(SpectralDecomposition { eigenvalues, basis })
}

fn off_diagonal_norm(m: &ComplexMatrix) -> f64 {
    let n = m.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Annihilates `work[(p, q)]` with `J = [[c, s·e^{iφ}], [−s·e^{−iφ}, c]]`,
/// updating `work ← Jᴴ·work·J` and `basis ← basis·J`.
fn rotate(work: &mut ComplexMatrix, basis: &mut ComplexMatrix, p: usize, q: usize) -> bool {
    let apq = work[(p, q)];
    let magnitude = apq.norm();
    if magnitude == 0.0 {
        return false;
    }
    let app = work[(p, p)].re;
    let aqq = work[(q, q)].re;
    let phase = apq / magnitude;
    let tau = (aqq - app) / (2.0 * magnitude);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let j_pq = phase * s;
    let j_qp = -phase.conj() * s;

    let n = work.rows();
    // work ← work·J (columns p, q)
    for k in 0..n {
        let wkp = work[(k, p)];
        let wkq = work[(k, q)];
        work[(k, p)] = wkp * c + wkq * j_qp;
        work[(k, q)] = wkp * j_pq + wkq * c;
    }
    // work ← Jᴴ·work (rows p, q)
    for k in 0..n {
        let wpk = work[(p, k)];
        let wqk = work[(q, k)];
        work[(p, k)] = wpk * c + wqk * j_qp.conj();
        work[(q, k)] = wpk * j_pq.conj() + wqk * c;
    }
    work[(p, q)] = C64::new(0.0, 0.0);
    work[(q, p)] = C64::new(0.0, 0.0);
    work[(p, p)] = C64::new(work[(p, p)].re, 0.0);
    work[(q, q)] = C64::new(work[(q, q)].re, 0.0);

    for k in 0..basis.rows() {
        let bkp = basis[(k, p)];
        let bkq = basis[(k, q)];
        basis[(k, p)] = bkp * c + bkq * j_qp;
        basis[(k, q)] = bkp * j_pq + bkq * c;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn diagonal_input_is_sorted_by_permutation() {
        let a = ComplexMatrix::from_real_diagonal(&[1.0, 3.0, 2.0]);
        let d = eigh_sorted(&a).unwrap();
        assert_eq!(d.eigenvalues, vec![3.0, 2.0, 1.0]);
        let expected = ComplexMatrix::from_real_rows(&[
            &[0.0, 0.0, 1.0],
            &[1.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0],
        ]);
        assert_eq!(d.basis, expected);
    }

    #[test]
    fn swap_matrix_eigenvectors() {
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let d = eigh_sorted(&a).unwrap();
        assert!((d.eigenvalues[0] - 1.0).abs() < 1e-15);
        assert!((d.eigenvalues[1] + 1.0).abs() < 1e-15);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        // phase convention: largest entry real nonnegative, lowest row on ties
        assert!((d.basis[(0, 0)] - c(r, 0.0)).norm() < 1e-15);
        assert!((d.basis[(1, 0)] - c(r, 0.0)).norm() < 1e-15);
        assert!((d.basis[(0, 1)] - c(r, 0.0)).norm() < 1e-15);
        assert!((d.basis[(1, 1)] - c(-r, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn complex_hermitian_two_by_two() {
        let a = ComplexMatrix::from_complex_rows(&[&[c(2.0, 0.0), c(0.0, 1.0)], &[
            c(0.0, -1.0),
            c(2.0, 0.0),
        ]]);
        let d = eigh_sorted(&a).unwrap();
        assert!((d.eigenvalues[0] - 3.0).abs() < 1e-14);
        assert!((d.eigenvalues[1] - 1.0).abs() < 1e-14);
        assert!((&d.reconstruct() - &a).frobenius_norm() < 1e-14);
    }

    #[test]
    fn rejects_bad_input() {
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(eigh_sorted(&rect), Err(Error::NotSquare { .. })));
        let skew = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        assert!(matches!(eigh_sorted(&skew), Err(Error::NotHermitian { .. })));
        let mut nan = ComplexMatrix::identity(2);
        nan[(0, 0)] = c(f64::INFINITY, 0.0);
        assert!(matches!(eigh_sorted(&nan), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn zero_matrix_is_identity_basis() {
        let d = eigh_sorted(&ComplexMatrix::zeros(3, 3)).unwrap();
        assert_eq!(d.eigenvalues, vec![0.0; 3]);
        assert_eq!(d.basis, ComplexMatrix::identity(3));
    }
}
