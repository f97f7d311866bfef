mod common;

use common::{gaussian, hermitian, rng};
use mptk::matcore::{
    eigh_sorted, matrix_norm, sin_theta, svd_sorted, thin_qr, ComplexMatrix, NormKind, C64,
};

#[test]
fn eigh_examples() {
    let d = eigh_sorted(&ComplexMatrix::from_real_diagonal(&[1.0, 3.0, 2.0])).unwrap();
    assert_eq!(d.eigenvalues, vec![3.0, 2.0, 1.0]);
    let perm = ComplexMatrix::from_real_rows(&[&[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
    assert_eq!(d.basis, perm);

    let swap = eigh_sorted(&ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap();
    assert!((swap.eigenvalues[0] - 1.0).abs() < 1e-15);
    assert!((swap.eigenvalues[1] + 1.0).abs() < 1e-15);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let top = swap.basis.column(0);
    assert!((top[0] - C64::new(h, 0.0)).norm() < 1e-15 && (top[1] - C64::new(h, 0.0)).norm() < 1e-15);

    let i = C64::new(0.0, 1.0);
    let two = C64::new(2.0, 0.0);
    let a = ComplexMatrix::from_complex_rows(&[&[two, i], &[-i, two]]);
    let d = eigh_sorted(&a).unwrap();
    assert!((d.eigenvalues[0] - 3.0).abs() < 1e-14);
    assert!((d.eigenvalues[1] - 1.0).abs() < 1e-14);
}

#[test]
fn eigh_rejects_bad_input() {
    use mptk::Error;
    assert!(matches!(
        eigh_sorted(&ComplexMatrix::zeros(2, 3)),
        Err(Error::NotSquare { .. })
    ));
    let skew = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
    assert!(matches!(eigh_sorted(&skew), Err(Error::NotHermitian { .. })));
    let mut bad = ComplexMatrix::identity(2);
    bad[(0, 0)] = C64::new(f64::NAN, 0.0);
    assert!(matches!(eigh_sorted(&bad), Err(Error::NonFinite { .. })));
}

#[test]
fn eigh_random_hermitian_residuals() {
    let mut r = rng(7);
    for trial in 0..200 {
        let n = 1 + trial % 12;
        let a = hermitian(&mut r, n);
        let d = eigh_sorted(&a).unwrap();
        let lambda = ComplexMatrix::from_real_diagonal(&d.eigenvalues);
        let residual = (&a.matmul(&d.basis) - &d.basis.matmul(&lambda)).frobenius_norm();
        assert!(residual <= 1e-10 * a.frobenius_norm(), "trial {trial}: {residual}");
        assert!(d.basis.orthonormality_defect() <= 1e-12 * n as f64);
        assert!(d.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }
}

#[test]
fn svd_random_against_gram_eigenvalues() {
    let mut r = rng(11);
    for _ in 0..50 {
        let b = gaussian(&mut r, 12, 8);
        let d = svd_sorted(&b).unwrap();
        assert!((&d.reconstruct() - &b).frobenius_norm() <= 1e-10 * b.frobenius_norm());
        assert!(d.left.orthonormality_defect() <= 1e-12 * 12.0);
        assert!(d.right.orthonormality_defect() <= 1e-12 * 12.0);
        let gram = eigh_sorted(&b.adjoint_mul(&b).hermitian_part()).unwrap();
        for (s, l) in d.singulars.iter().zip(&gram.eigenvalues) {
            assert!((s - l.max(0.0).sqrt()).abs() < 1e-8);
        }
    }
}

#[test]
fn frobenius_matches_singular_values() {
    let b = gaussian(&mut rng(4), 4, 4);
    let fro2 = matrix_norm(&b, NormKind::Frobenius).unwrap().powi(2);
    let sum: f64 = svd_sorted(&b).unwrap().singulars.iter().map(|s| s * s).sum();
    assert!((fro2 - sum).abs() <= 1e-12 * fro2);
}

#[test]
fn norm_equivalence() {
    let mut r = rng(5);
    for trial in 0..40 {
        let (m, n) = (1 + trial % 5, 1 + trial % 3);
        let b = gaussian(&mut r, m, n);
        let spec = matrix_norm(&b, NormKind::Spectral).unwrap();
        let fro = matrix_norm(&b, NormKind::Frobenius).unwrap();
        assert!(spec <= fro * (1.0 + 1e-14));
        assert!(fro <= (m.min(n) as f64).sqrt() * spec * (1.0 + 1e-14));
    }
}

fn random_orthonormal(r: &mut rand_chacha::ChaCha8Rng, n: usize, k: usize) -> ComplexMatrix {
    thin_qr(&gaussian(r, n, k)).0
}

#[test]
fn sin_theta_symmetry_and_unitary_invariance() {
    let mut r = rng(9);
    for _ in 0..30 {
        let u = random_orthonormal(&mut r, 6, 3);
        let v = random_orthonormal(&mut r, 6, 3);
        let q = random_orthonormal(&mut r, 3, 3);
        let a = sin_theta(&u, &v).unwrap();
        let b = sin_theta(&v, &u).unwrap();
        assert!((a.fro - b.fro).abs() < 1e-12 && (a.spec - b.spec).abs() < 1e-12);
        let c = sin_theta(&u.matmul(&q), &v).unwrap();
        let d = sin_theta(&u, &v.matmul(&q)).unwrap();
        for s in [c, d] {
            assert!((a.fro - s.fro).abs() < 1e-12 && (a.spec - s.spec).abs() < 1e-12);
        }
    }
}
