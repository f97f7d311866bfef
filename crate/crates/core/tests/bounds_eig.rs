mod common;

use common::{hermitian, real_sym, rng, with_norm};
use mptk::bounds::{
    combined_all_blocks, combined_single_block, davis_kahan, delta_tilde, endpoint_blocks,
    gap_lower_bound, gap_lower_reports, hoffman_wielandt, li_sun_combined, mvt_check,
    total_bound, BoundId,
};
use mptk::homotopy::{gap_profile_eig, track_eig_path, BlockPartition, TrackOptions};
use mptk::matcore::{eigh_sorted, ComplexMatrix};

fn instance() -> (ComplexMatrix, ComplexMatrix) {
    (
        ComplexMatrix::from_real_diagonal(&[0.0, 3.0]),
        real_sym(&[&[0.0, 0.1], &[0.1, 0.0]]),
    )
}

/// Closed-form rotation angle of the eigenvectors of
/// `[[0, 0.1], [0.1, 3]]`: `tan 2θ = 0.2 / 3`.
fn oracle_theta() -> f64 {
    0.5 * (0.2f64 / 3.0).atan()
}

fn oracle_lambda() -> (f64, f64) {
    let root = 9.04f64.sqrt();
    ((3.0 + root) / 2.0, (3.0 - root) / 2.0)
}

#[test]
fn hoffman_wielandt_examples() {
    let a = ComplexMatrix::from_real_diagonal(&[1.0, 2.0]);
    let same = hoffman_wielandt(&a, &a).unwrap();
    assert_eq!((same.lhs, same.rhs, same.slack), (0.0, 0.0, 0.0));

    let swap = real_sym(&[&[0.0, 1.0], &[1.0, 0.0]]);
    let tight = hoffman_wielandt(&ComplexMatrix::zeros(2, 2), &swap).unwrap();
    assert!((tight.lhs - 2f64.sqrt()).abs() < 1e-15);
    assert!((tight.rhs - 2f64.sqrt()).abs() < 1e-15);
    assert!(tight.satisfied());

    let perm = hoffman_wielandt(&a, &ComplexMatrix::from_real_diagonal(&[2.0, 1.0])).unwrap();
    assert_eq!(perm.lhs, 0.0);
    assert!((perm.rhs - 2f64.sqrt()).abs() < 1e-15);
}

#[test]
fn davis_kahan_and_li_sun_on_two_by_two() {
    let (a, da) = instance();
    let at = &a + &da;
    let u1 = ComplexMatrix::from_real_rows(&[&[1.0], &[0.0]]);
    let dec = eigh_sorted(&at).unwrap();
    let u1t = dec.basis.column_block(1, 1);

    let theta = oracle_theta();
    let (hi, lo) = oracle_lambda();
    let dk = davis_kahan(&a, &at, &u1, &u1t).unwrap();
    assert!(dk.applicable);
    assert!((dk.components["sin_theta_fro"] - theta.sin()).abs() < 1e-12);
    assert!((dk.components["delta_12"] - hi).abs() < 1e-12);
    assert!((dk.lhs - hi * theta.sin()).abs() < 1e-12);
    assert!((dk.rhs - 0.1).abs() < 1e-15);
    assert!((dk.lhs - 0.0999).abs() < 1e-4);
    assert!(dk.slack > 0.0);

    let ls = li_sun_combined(&a, &at, &u1, &u1t).unwrap();
    let s = theta.sin();
    let expected = (1.0 - s * s) * lo * lo + hi * hi * s * s;
    assert!((ls.lhs - expected).abs() < 1e-12);
    assert!((ls.rhs - 0.01).abs() < 1e-15);
    assert!(ls.slack > 0.0);
}

#[test]
fn comparators_on_trivial_inputs() {
    let a = hermitian(&mut rng(1), 3);
    let dec = eigh_sorted(&a).unwrap();
    let u1 = dec.basis.column_block(0, 2);
    let dk = davis_kahan(&a, &a, &u1, &u1).unwrap();
    assert_eq!((dk.lhs, dk.rhs), (0.0, 0.0));
    let ls = li_sun_combined(&a, &a, &u1, &u1).unwrap();
    assert_eq!((ls.lhs, ls.rhs), (0.0, 0.0));

    // full space: no angle, and Li–Sun collapses to Hoffman–Wielandt squared
    let da = with_norm(&hermitian(&mut rng(2), 3), 0.2);
    let at = &a + &da;
    let full = davis_kahan(&a, &at, &dec.basis, &eigh_sorted(&at).unwrap().basis).unwrap();
    assert!(full.lhs == 0.0 && full.applicable);
    let ls = li_sun_combined(&a, &at, &dec.basis, &eigh_sorted(&at).unwrap().basis).unwrap();
    let hw = hoffman_wielandt(&a, &at).unwrap().squared();
    assert!((ls.lhs - hw.lhs).abs() < 1e-12);
    assert!((ls.rhs - hw.rhs).abs() < 1e-12);
}

#[test]
fn davis_kahan_rejects_non_invariant_bases() {
    let (a, da) = instance();
    let tilted = ComplexMatrix::from_real_rows(&[&[0.6], &[0.8]]);
    let e1 = ComplexMatrix::from_real_rows(&[&[1.0], &[0.0]]);
    assert!(matches!(
        davis_kahan(&a, &(&a + &da), &tilted, &e1),
        Err(mptk::Error::NotInvariant { .. })
    ));
}

#[test]
fn path_bounds_on_two_by_two() {
    let (a, da) = instance();
    let path = track_eig_path(&a, &da, &BlockPartition::singletons(2), TrackOptions::default()).unwrap();
    let gaps = gap_profile_eig(&path);
    assert!((gaps.path_minima[0] - 3.0).abs() < 1e-12);

    let theta = oracle_theta();
    let chord = 2.0 * (theta / 2.0).sin();
    for j in 0..2 {
        assert!((path.endpoint_distance(j) - chord).abs() < 1e-8);
    }

    let all = combined_all_blocks(&path, &gaps).unwrap();
    let (hi, lo) = oracle_lambda();
    let eig_term = (hi - 3.0).powi(2) + lo * lo;
    assert!((all.components["eigenvalue_term"] - eig_term).abs() < 1e-12);
    assert!((all.components["subspace[1]"] - 9.0 * chord * chord).abs() < 1e-7);
    assert!((all.rhs - 0.02).abs() < 1e-15);
    assert!(all.slack > 0.0);

    let single = combined_single_block(&path, &gaps, 0).unwrap();
    for r in single.all() {
        assert!(r.applicable && r.slack > 0.0, "{r:?}");
    }
    assert_eq!(single.cor_sin_only.bound_id, BoundId::CorSinOnly);

    let total = total_bound(&path).unwrap();
    assert!(total.slack > 0.0 && total.condition_note.is_empty());
    for e in endpoint_blocks(&path).unwrap() {
        assert!(e.distance >= e.sin_theta_fro - 1e-10);
    }

    let preds = gap_lower_bound(&gaps.at_start(), 0.1);
    assert!((preds[0].lower_bound - 2.8).abs() < 1e-12 && preds[0].condition_holds);
    for r in gap_lower_reports(&preds, &gaps) {
        assert!(r.applicable && r.satisfied());
    }

    let mvt = mvt_check(&path, &gaps, 0).unwrap();
    assert!((mvt.rhs - 0.01).abs() < 1e-12);
    assert!(mvt.slack > 0.0);
}

#[test]
fn zero_perturbation_gives_zero_reports() {
    let a = hermitian(&mut rng(3), 4);
    let da = ComplexMatrix::zeros(4, 4);
    let path = track_eig_path(&a, &da, &BlockPartition::new(vec![1, 3]).unwrap(), TrackOptions::uniform(9)).unwrap();
    let gaps = gap_profile_eig(&path);
    let mut reports = vec![
        combined_all_blocks(&path, &gaps).unwrap(),
        total_bound(&path).unwrap(),
        mvt_check(&path, &gaps, 1).unwrap(),
    ];
    reports.extend(combined_single_block(&path, &gaps, 1).unwrap().all().into_iter().cloned());
    for r in reports {
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0), "{r:?}");
        assert!(r.applicable);
    }
    let preds = gap_lower_bound(&gaps.at_start(), 0.0);
    assert_eq!(preds[0].lower_bound, gaps.at_start()[0]);
}

#[test]
fn single_block_hypothesis_gate() {
    let a = ComplexMatrix::from_real_diagonal(&[0.0, 0.1]);
    let da = real_sym(&[&[0.0, 0.3], &[0.3, 0.0]]);
    let path = track_eig_path(&a, &da, &BlockPartition::singletons(2), TrackOptions::uniform(65)).unwrap();
    let gaps = gap_profile_eig(&path);
    let single = combined_single_block(&path, &gaps, 0).unwrap();
    assert!(!single.main.applicable);
    assert!(single.main.condition_note.contains("||dA||_2 < delta_min"));
    let preds = gap_lower_bound(&[0.1], 0.2);
    assert!(!preds[0].condition_holds);
}

#[test]
fn single_block_reduces_to_hoffman_wielandt() {
    let mut r = rng(4);
    let a = hermitian(&mut r, 5);
    let da = with_norm(&hermitian(&mut r, 5), 0.7);
    let path = track_eig_path(&a, &da, &BlockPartition::whole(5), TrackOptions::default()).unwrap();
    let gaps = gap_profile_eig(&path);
    let all = combined_all_blocks(&path, &gaps).unwrap();
    let hw = hoffman_wielandt(&a, &(&a + &da)).unwrap().squared();
    assert!((all.lhs - hw.lhs).abs() < 1e-12);
    assert!((all.rhs - hw.rhs).abs() < 1e-12);
    let total = total_bound(&path).unwrap();
    assert!((total.lhs - hw.lhs).abs() < 1e-12);
}

#[test]
fn commuting_family_mvt() {
    let a = ComplexMatrix::from_real_diagonal(&[4.0, 1.0, -2.0]);
    let da = ComplexMatrix::from_real_diagonal(&[0.3, -0.2, 0.1]);
    let path = track_eig_path(&a, &da, &BlockPartition::new(vec![1, 2]).unwrap(), TrackOptions::uniform(33)).unwrap();
    let gaps = gap_profile_eig(&path);
    let mvt = mvt_check(&path, &gaps, 0).unwrap();
    assert_eq!(path.endpoint_distance(0), 0.0);
    assert!((mvt.lhs - 0.09).abs() < 1e-14 && (mvt.rhs - 0.09).abs() < 1e-14);
    assert!(mvt.satisfied());
}

#[test]
fn random_paths_satisfy_every_bound() {
    let mut r = rng(5);
    for trial in 0..8 {
        let n = 3 + trial % 4;
        let a = hermitian(&mut r, n);
        let da = with_norm(&hermitian(&mut r, n), 0.05);
        let partition = BlockPartition::new(vec![1, n - 1]).unwrap();
        let path = track_eig_path(&a, &da, &partition, TrackOptions::uniform(513)).unwrap();
        let gaps = gap_profile_eig(&path);
        let all = combined_all_blocks(&path, &gaps).unwrap();
        let hw = hoffman_wielandt(&a, &(&a + &da)).unwrap().squared();
        assert!(all.satisfied() && all.slack <= hw.slack + 1e-15);
        assert!(total_bound(&path).unwrap().satisfied());
        assert!(mvt_check(&path, &gaps, 0).unwrap().satisfied());
        for r in combined_single_block(&path, &gaps, 0).unwrap().all() {
            assert!(r.passes(), "{r:?}");
        }
        let tilde = delta_tilde(&path);
        assert_eq!(tilde.per_block.len(), 2);
    }
}
