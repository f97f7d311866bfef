use super::matrix::{ComplexMatrix, C64};

/// Unit scalar `u` such that `column · u` has its largest-magnitude entry real
/// and nonnegative. Near-ties (relative 1e-12) resolve to the lowest row.
pub fn canonical_phase(column: &[C64]) -> C64 {
    let mut best = 0usize;
    let mut best_mag = -1.0f64;
    for (i, z) in column.iter().enumerate() {
        let mag = z.norm();
        if mag > best_mag * (1.0 + 1e-12) + f64::MIN_POSITIVE {
            best = i;
            best_mag = mag;
        }
    }
    if best_mag <= 0.0 {
        return C64::new(1.0, 0.0);
    }
    column[best].conj() / best_mag
}

/// Applies [`canonical_phase`] to every column in place and returns the
/// factors used.
pub fn fix_column_phases(m: &mut ComplexMatrix) -> Vec<C64> {
    let mut phases = Vec::with_capacity(m.cols());
    for j in 0..m.cols() {
        let col = m.column(j);
        let u = canonical_phase(&col);
        if u != C64::new(1.0, 0.0) {
            let fixed: Vec<C64> = col.iter().map(|z| z * u).collect();
            m.set_column(j, &fixed);
        }
        phases.push(u);
    }
    phases
}
