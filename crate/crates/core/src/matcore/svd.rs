//! One-sided (Hestenes) Jacobi SVD.

use super::matrix::{ComplexMatrix, C64};
use super::phase::canonical_phase;
use super::qr::{complete_orthonormal, dot, thin_qr};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 60;
/// Singular values at or below this fraction of the largest one get a
/// completed left vector instead of `B·v / σ`.
const RANK_TOLERANCE: f64 = 1e-13;

/// `B = W·[diag(σ); 0]·Vᴴ` with `σ` sorted nonincreasing.
#[derive(Debug, Clone)]
pub struct SingularDecomposition {
    /// `m x m` unitary.
    pub left: ComplexMatrix,
    /// Length `n`, nonincreasing, nonnegative.
    pub singulars: Vec<f64>,
    /// `n x n` unitary.
    pub right: ComplexMatrix,
}

impl SingularDecomposition {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let (m, n) = (self.left.rows(), self.right.rows());
        let sigma = ComplexMatrix::rectangular_diagonal(m, n, &self.singulars);
        self.left.matmul(&sigma).matmul(&self.right.adjoint())
    }
}

/// Sorted SVD of an `m x n` matrix with `m >= n`.
///
/// Right singular vectors are phase-normalized (largest entry real
/// nonnegative); each paired left vector carries the same phase so the
/// factorization is unchanged. A zero matrix yields identity factors.
pub fn svd_sorted(b: &ComplexMatrix) -> Result<SingularDecomposition> {
    b.check_finite()?;
    let (m, n) = b.shape();
    if m < n {
        return Err(Error::Shape(format!(
            "svd_sorted needs rows >= cols, got {m}x{n}; transpose first"
        )));
    }
    let mut work = b.clone();
    let mut right = ComplexMatrix::identity(n);
    let tolerance = f64::EPSILON * (m as f64).max(8.0);

    let mut sweeps = 0;
    loop {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                rotated |= orthogonalize_pair(&mut work, &mut right, p, q, tolerance);
            }
        }
        sweeps += 1;
        if !rotated {
            break;
        }
        if sweeps >= MAX_SWEEPS {
            return Err(Error::NoConvergence {
                method: "one-sided Jacobi SVD",
                sweeps,
            });
        }
    }

    let norms: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|i| work[(i, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let singulars: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let mut right = right.select_columns(&order);
    let work = work.select_columns(&order);

    let sigma_max = singulars[0];
    let rank = singulars
        .iter()
        .take_while(|&&s| s > RANK_TOLERANCE * sigma_max && s > 0.0)
        .count();

    let mut phases = Vec::with_capacity(n);
    for j in 0..n {
        let col = right.column(j);
        let u = canonical_phase(&col);
        let fixed: Vec<C64> = col.iter().map(|z| z * u).collect();
        right.set_column(j, &fixed);
        phases.push(u);
    }

    let left = if rank == 0 {
        ComplexMatrix::identity(m)
    } else {
        let range = ComplexMatrix::from_fn(m, rank, |i, j| work[(i, j)] * phases[j] / singulars[j]);
        let (q, _) = thin_qr(&range);
        complete_orthonormal(&q)
    };

    Ok(SingularDecomposition {
        left,
        singulars,
        right,
    })
}

/// One Hestenes rotation making columns `p` and `q` of `work` orthogonal.
fn orthogonalize_pair(
    work: &mut ComplexMatrix,
    right: &mut ComplexMatrix,
    p: usize,
    q: usize,
    tolerance: f64,
) -> bool {
    let col_p = work.column(p);
    let col_q = work.column(q);
    let alpha: f64 = col_p.iter().map(|z| z.norm_sqr()).sum();
    let beta: f64 = col_q.iter().map(|z| z.norm_sqr()).sum();
    if alpha == 0.0 || beta == 0.0 {
        return false;
    }
    let gamma = dot(&col_p, &col_q);
    let magnitude = gamma.norm();
    if magnitude <= tolerance * (alpha * beta).sqrt() {
        return false;
    }
    // Jacobi rotation diagonalizing the Gram block [[α, γ], [γ̄, β]]
    let phase = gamma / magnitude;
    let tau = (beta - alpha) / (2.0 * magnitude);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let j_pq = phase * s;
    let j_qp = -phase.conj() * s;
    for mat in [work, right] {
        for k in 0..mat.rows() {
            let a = mat[(k, p)];
            let b = mat[(k, q)];
            mat[(k, p)] = a * c + b * j_qp;
            mat[(k, q)] = a * j_pq + b * c;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_with_negative_entry() {
        let b = ComplexMatrix::from_real_diagonal(&[2.0, -3.0]);
        let d = svd_sorted(&b).unwrap();
        assert_eq!(d.singulars, vec![3.0, 2.0]);
        // right factor is a pure permutation, the sign lands on the left
        let perm = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert_eq!(d.right, perm);
        assert!((d.left[(1, 0)] - C64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!((&d.reconstruct() - &b).frobenius_norm() < 1e-15);
    }

    #[test]
    fn zero_matrix_gives_identity_factors() {
        let d = svd_sorted(&ComplexMatrix::zeros(2, 2)).unwrap();
        assert_eq!(d.singulars, vec![0.0, 0.0]);
        assert_eq!(d.left, ComplexMatrix::identity(2));
        assert_eq!(d.right, ComplexMatrix::identity(2));
    }

    #[test]
    fn rank_one_tall_matrix() {
        let b = ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[0.0, 0.0], &[3.0, 4.0]]);
        let d = svd_sorted(&b).unwrap();
        assert!((d.singulars[0] - 5.0).abs() < 1e-14);
        assert!(d.singulars[1].abs() < 1e-14);
        assert!(d.left.orthonormality_defect() < 1e-14);
        assert!(d.right.orthonormality_defect() < 1e-14);
        assert!((&d.reconstruct() - &b).frobenius_norm() < 1e-14);
    }

    #[test]
    fn wide_input_is_rejected() {
        assert!(matches!(
            svd_sorted(&ComplexMatrix::zeros(2, 3)),
            Err(Error::Shape(_))
        ));
    }
}
