use super::matrix::{vec_norm, ComplexMatrix, C64};

/// Thin QR by classical Gram–Schmidt with one full reorthogonalization pass.
///
/// Returns `(Q, R)` with `Q` `m x n` having orthonormal columns and `R` upper
/// triangular. A column that is numerically dependent on its predecessors
/// gets a zero diagonal in `R` and is replaced in `Q` by a completion vector,
/// so `Q` always has orthonormal columns.
pub fn thin_qr(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let (m, n) = a.shape();
    assert!(m >= n, "thin_qr needs rows >= cols");
    let mut q_cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    let mut r = ComplexMatrix::zeros(n, n);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
    for j in 0..n {
        let mut v = a.column(j);
        for _pass in 0..2 {
            for (i, q) in q_cols.iter().enumerate() {
                let c = dot(q, &v);
                r[(i, j)] += c;
                axpy(&mut v, -c, q);
            }
        }
        let norm = vec_norm(&v);
        if norm > 1e-14 * scale {
            r[(j, j)] = C64::new(norm, 0.0);
            q_cols.push(v.iter().map(|z| z / norm).collect());
        } else {
            r[(j, j)] = C64::new(0.0, 0.0);
            q_cols.push(next_completion_vector(&q_cols, m));
        }
    }
    let q = ComplexMatrix::from_fn(m, n, |i, j| q_cols[j][i]);
    (q, r)
}

/// Extends the orthonormal columns of `basis` (`m x r`) to an `m x m` unitary
/// matrix. The first `r` columns are `basis` unchanged.
pub fn complete_orthonormal(basis: &ComplexMatrix) -> ComplexMatrix {
    let (m, r) = basis.shape();
    assert!(r <= m);
    let mut cols: Vec<Vec<C64>> = (0..r).map(|j| basis.column(j)).collect();
    while cols.len() < m {
        let next = next_completion_vector(&cols, m);
        cols.push(next);
    }
    ComplexMatrix::from_fn(m, m, |i, j| cols[j][i])
}

/// Orthonormal completion vector, built from standard basis vectors. Picks
/// the `e_i` with the largest residual after projecting out `cols`; ties go
/// to the lowest index so the choice is deterministic.
fn next_completion_vector(cols: &[Vec<C64>], m: usize) -> Vec<C64> {
    let mut best: Option<(f64, Vec<C64>)> = None;
    for i in 0..m {
        let mut v = vec![C64::new(0.0, 0.0); m];
        v[i] = C64::new(1.0, 0.0);
        for _pass in 0..2 {
            for q in cols {
                let c = dot(q, &v);
                axpy(&mut v, -c, q);
            }
        }
        let norm = vec_norm(&v);
        let better = match &best {
            None => true,
            Some((b, _)) => norm > *b * (1.0 + 1e-12),
        };
        if better {
            best = Some((norm, v));
        }
    }
    let (norm, v) = best.expect("m >= 1");
    assert!(norm > 1e-8, "cannot complete a full-rank basis");
    v.iter().map(|z| z / norm).collect()
}

/// `xᴴ y`.
pub(crate) fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// `y += alpha · x`.
pub(crate) fn axpy(y: &mut [C64], alpha: C64, x: &[C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
