mod common;

use common::{gaussian, hermitian, real_sym, rng, with_norm};
use mptk::homotopy::{
    gap_profile_eig, gap_profile_svd, gauge_defect, track_eig_path, track_svd_path,
    BlockPartition, EigPath, SvdPath, TrackOptions,
};
use mptk::matcore::{affine, eigh_sorted, svd_sorted, ComplexMatrix};
use proptest::prelude::*;

fn part(sizes: &[usize]) -> BlockPartition {
    BlockPartition::new(sizes.to_vec()).unwrap()
}

fn check_eig_invariants(a: &ComplexMatrix, da: &ComplexMatrix, path: &EigPath) {
    let n = a.rows();
    for s in &path.samples {
        let at = affine(a, da, s.t);
        let scale = at.frobenius_norm().max(f64::MIN_POSITIVE);
        assert!(s.basis().orthonormality_defect() <= 1e-10 * n as f64);
        for (i, ui) in s.basis_blocks.iter().enumerate() {
            let lam = ui.adjoint_mul(&at.matmul(ui));
            assert!((&lam - &s.lambda_blocks[i]).frobenius_norm() <= 1e-10 * scale);
            for (j, uj) in s.basis_blocks.iter().enumerate() {
                if i != j {
                    assert!(ui.adjoint_mul(&at.matmul(uj)).frobenius_norm() <= 1e-8 * scale);
                }
            }
        }
        let direct = eigh_sorted(&at).unwrap().eigenvalues;
        for (x, y) in s.pooled_eigenvalues().iter().zip(&direct) {
            assert!((x - y).abs() <= 1e-10 * scale.max(1.0));
        }
    }
    for w in path.samples.windows(2) {
        for (p, q) in w[0].basis_blocks.iter().zip(&w[1].basis_blocks) {
            let (asym, min_eig) = gauge_defect(p, q).unwrap();
            assert!(asym <= 1e-8 && min_eig >= -1e-8);
        }
    }
    assert!(path.meta.gauge.passes(1e-8));
}

fn check_svd_invariants(b: &ComplexMatrix, db: &ComplexMatrix, path: &SvdPath) {
    let (m, n) = b.shape();
    for s in &path.samples {
        let bt = affine(b, db, s.t);
        let scale = bt.frobenius_norm().max(1.0);
        let (w, v) = (s.left(), s.right());
        assert_eq!(w.shape(), (m, m));
        assert!(w.orthonormality_defect() <= 1e-10 * m as f64);
        assert!(v.orthonormality_defect() <= 1e-10 * n as f64);
        let rebuilt = w.matmul(&s.middle()).matmul(&v.adjoint());
        assert!((&rebuilt - &bt).frobenius_norm() <= 1e-10 * scale);
        let direct = svd_sorted(&bt).unwrap().singulars;
        for (x, y) in s.pooled_singulars().iter().zip(&direct) {
            assert!((x - y).abs() <= 1e-10 * scale);
        }
    }
    assert!(path.meta.gauge.passes(1e-8));
}

#[test]
fn constant_eig_path() {
    let mut r = rng(1);
    let a = hermitian(&mut r, 4);
    let da = ComplexMatrix::zeros(4, 4);
    let path = track_eig_path(&a, &da, &part(&[2, 1, 1]), TrackOptions::uniform(33)).unwrap();
    for s in &path.samples {
        assert_eq!(s.basis_blocks, path.start().basis_blocks);
        assert_eq!(s.block_eigs, path.start().block_eigs);
    }
    for j in 0..3 {
        assert_eq!(path.endpoint_distance(j), 0.0);
    }
}

#[test]
fn two_by_two_closed_form() {
    let a = ComplexMatrix::from_real_diagonal(&[0.0, 3.0]);
    let da = real_sym(&[&[0.0, 0.5], &[0.5, 0.0]]);
    let path = track_eig_path(&a, &da, &part(&[1, 1]), TrackOptions::uniform(101)).unwrap();
    assert_eq!(path.samples.len(), 101);
    for s in &path.samples {
        let root = (9.0 + s.t * s.t).sqrt();
        assert!((s.block_eigs[0][0] - (3.0 + root) / 2.0).abs() <= 1e-10);
        assert!((s.block_eigs[1][0] - (3.0 - root) / 2.0).abs() <= 1e-10);
    }
    let gaps = gap_profile_eig(&path);
    for (i, t) in gaps.grid.iter().enumerate() {
        assert!((gaps.per_block_gaps[0][i] - (9.0 + t * t).sqrt()).abs() <= 1e-10);
    }
    assert!((gaps.path_minima[0] - 3.0).abs() <= 1e-12);
    assert_eq!(gaps.argmin[0], 0.0);
    check_eig_invariants(&a, &da, &path);
}

#[test]
fn single_block_gauge_freezes_basis() {
    let mut r = rng(2);
    let n = 5;
    let a = hermitian(&mut r, n);
    let da = hermitian(&mut r, n);
    let path = track_eig_path(&a, &da, &BlockPartition::whole(n), TrackOptions::default()).unwrap();
    assert!(path.endpoint_distance(0) <= 1e-12 * n as f64);
    let gaps = gap_profile_eig(&path);
    assert!(gaps.path_minima[0].is_infinite());
}

#[test]
fn random_eig_paths_hold_invariants() {
    let mut r = rng(3);
    for trial in 0..6 {
        let n = 3 + trial % 3;
        let a = hermitian(&mut r, n);
        let da = with_norm(&hermitian(&mut r, n), 0.3);
        let sizes: &[usize] = if n == 3 { &[1, 2] } else { &[2, 1, n - 3] };
        let path = track_eig_path(&a, &da, &part(sizes), TrackOptions::uniform(257)).unwrap();
        check_eig_invariants(&a, &da, &path);
    }
}

#[test]
fn adaptive_refinement_inserts_near_a_dip() {
    // avoided crossing of width 1e-3 near t = 0.5
    let a = real_sym(&[&[1.0, 1e-3], &[1e-3, -1.0]]);
    let da = ComplexMatrix::from_real_diagonal(&[-4.0, 4.0]);
    let path = track_eig_path(&a, &da, &part(&[1, 1]), TrackOptions::default()).unwrap();
    assert!(path.meta.adaptive_insertions > 0);
    assert_eq!(path.samples.len(), 1025 + path.meta.adaptive_insertions);
    assert!(path.grid().windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn exact_crossing_is_flagged() {
    let a = ComplexMatrix::from_real_diagonal(&[2.0, 1.0]);
    let da = ComplexMatrix::from_real_diagonal(&[-2.0, 0.0]);
    let path = track_eig_path(&a, &da, &part(&[1, 1]), TrackOptions::uniform(5)).unwrap();
    assert!(path.meta.block_ambiguity());
    assert!(path.meta.ambiguity.iter().any(|f| f.t == 0.5));
}

#[test]
fn block_reordering() {
    let a = ComplexMatrix::from_real_diagonal(&[5.0, 3.0, 2.0, 0.0]);
    let da = ComplexMatrix::zeros(4, 4);
    let path = track_eig_path(&a, &da, &part(&[1, 2, 1]), TrackOptions::uniform(3)).unwrap();
    let moved = path.with_block_first(1);
    assert_eq!(moved.partition.sizes(), &[2, 1, 1]);
    assert_eq!(moved.start().block_eigs, vec![vec![3.0, 2.0], vec![5.0], vec![0.0]]);
    let gaps = gap_profile_eig(&path);
    assert_eq!(gaps.path_minima, vec![2.0, 2.0, 2.0]);
}

#[test]
fn invalid_inputs() {
    use mptk::Error;
    let a = ComplexMatrix::identity(2);
    assert!(matches!(
        track_eig_path(&a, &a, &part(&[1, 2]), TrackOptions::default()),
        Err(Error::CountMismatch(_))
    ));
    assert!(matches!(
        track_eig_path(&a, &a, &part(&[1, 1]), TrackOptions::uniform(1)),
        Err(Error::InvalidSpec(_))
    ));
    assert!(matches!(
        track_svd_path(&ComplexMatrix::zeros(2, 3), &ComplexMatrix::zeros(2, 3), &part(&[3]), TrackOptions::default()),
        Err(Error::Shape(_))
    ));
}

#[test]
fn constant_svd_path() {
    let mut r = rng(4);
    let b = gaussian(&mut r, 5, 3);
    let db = ComplexMatrix::zeros(5, 3);
    let path = track_svd_path(&b, &db, &part(&[1, 2]), TrackOptions::uniform(17)).unwrap();
    for j in 0..2 {
        assert_eq!(path.left_distance(j), 0.0);
        assert_eq!(path.right_distance(j), 0.0);
    }
    assert_eq!(path.null_distance(), 0.0);
}

#[test]
fn decoupled_diagonal_svd_path() {
    let b = ComplexMatrix::from_real_diagonal(&[3.0, 1.0]);
    let db = ComplexMatrix::from_real_diagonal(&[0.5, 0.0]);
    let path = track_svd_path(&b, &db, &part(&[1, 1]), TrackOptions::uniform(101)).unwrap();
    for s in &path.samples {
        assert!((s.block_sings[0][0] - (3.0 + 0.5 * s.t)).abs() <= 1e-14);
        assert!((s.block_sings[1][0] - 1.0).abs() <= 1e-14);
    }
    let gaps = gap_profile_svd(&path);
    for (i, t) in gaps.rho.grid.iter().enumerate() {
        assert!((gaps.rho.per_block_gaps[0][i] - (2.0 + 0.5 * t)).abs() <= 1e-14);
    }
    assert!((gaps.rho.path_minima[0] - 2.0).abs() <= 1e-14);
    assert!((gaps.rho_hat.path_minima[0] - 2.0).abs() <= 1e-14);
    assert!((gaps.rho_hat.path_minima[1] - 1.0).abs() <= 1e-14);
    assert!((gaps.sigma_min - 1.0).abs() <= 1e-14);
    check_svd_invariants(&b, &db, &path);
}

#[test]
fn tall_svd_path_reconstructs() {
    let mut r = rng(5);
    let b = gaussian(&mut r, 4, 2);
    let db = with_norm(&gaussian(&mut r, 4, 2), 0.05);
    let path = track_svd_path(&b, &db, &part(&[1, 1]), TrackOptions::default()).unwrap();
    for s in &path.samples {
        assert_eq!(s.null_block.as_ref().unwrap().cols(), 2);
        let bt = affine(&b, &db, s.t);
        let core = s.left().adjoint_mul(&bt.matmul(&s.right()));
        assert!((&core - &s.middle()).frobenius_norm() <= 1e-9);
    }
    check_svd_invariants(&b, &db, &path);
}

#[test]
fn zero_singular_value_zeroes_rho_hat() {
    let b = ComplexMatrix::from_real_diagonal(&[2.0, 0.0]);
    let db = ComplexMatrix::zeros(2, 2);
    let path = track_svd_path(&b, &db, &part(&[1, 1]), TrackOptions::uniform(3)).unwrap();
    let gaps = gap_profile_svd(&path);
    assert_eq!(gaps.rho_hat.path_minima[1], 0.0);
    assert_eq!(gaps.sigma_min, 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gauge_holds_on_random_paths(seed in any::<u64>(), n in 2usize..6, scale in 0.01f64..0.5) {
        let mut r = rng(seed);
        let a = hermitian(&mut r, n);
        let da = with_norm(&hermitian(&mut r, n), scale);
        let path = track_eig_path(&a, &da, &BlockPartition::singletons(n), TrackOptions::uniform(129)).unwrap();
        prop_assert!(path.meta.gauge.passes(1e-8));
        let b = gaussian(&mut r, n + 1, n);
        let db = with_norm(&gaussian(&mut r, n + 1, n), scale);
        let spath = track_svd_path(&b, &db, &BlockPartition::singletons(n), TrackOptions::uniform(129)).unwrap();
        prop_assert!(spath.meta.gauge.passes(1e-8));
    }
}
