//! End-to-end verification: track the path, profile the gaps and evaluate
//! every bound that applies to it.

use serde::Serialize;

use crate::bounds::{
    combined_all_blocks, combined_all_svd, combined_single_block, combined_single_svd,
    davis_kahan, delta_tilde, endpoint_blocks, gap_lower_bound, gap_lower_reports,
    hoffman_wielandt, li_sun_combined, mirsky, mvt_check, svd_endpoint_blocks,
    svd_gap_lower_bound, svd_gap_lower_reports, svd_mvt_check, total_bound, BlockEndpoint,
    BoundId, BoundReport, DeltaTilde, GapPrediction, SvdBlockEndpoint, SvdGapPrediction,
};
use crate::error::{Error, Result};
use crate::homotopy::{
    gap_profile_eig, gap_profile_svd, track_eig_path, track_svd_path, AmbiguityFlag,
    BlockPartition, EigPath, GapProfile, GaugeResidual, SvdGapProfile, SvdPath, TrackOptions,
};
use crate::matcore::{affine, spectral_norm, ComplexMatrix};

/// What to evaluate and on which grid.
#[derive(Debug, Clone, Copy, PartialEq)]
#[derive(Default)]
pub struct VerifyOptions {
    pub track: TrackOptions,
    /// Block for the single-block bounds; `None` evaluates every block.
    pub target_block: Option<usize>,
}


/// Grid and tracking diagnostics of a path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSummary {
    pub points_requested: usize,
    pub points: usize,
    pub adaptive_insertions: usize,
    /// Largest grid spacing.
    pub resolution: f64,
    pub block_ambiguity: Vec<AmbiguityFlag>,
    pub continuity_flags: usize,
    pub gauge: GaugeResidual,
}

impl GridSummary {
    pub fn new(meta: &crate::homotopy::PathMeta, grid: &[f64]) -> Self {
        Self {
            points_requested: meta.grid_points_requested,
            points: grid.len(),
            adaptive_insertions: meta.adaptive_insertions,
            resolution: grid.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max),
            block_ambiguity: meta.ambiguity.clone(),
            continuity_flags: meta.continuity_flags,
            gauge: meta.gauge,
        }
    }
}

fn targets(options: &VerifyOptions, k: usize) -> Result<Vec<usize>> {
    match options.target_block {
        Some(j) if j >= k => Err(Error::InvalidPartition(format!(
            "target block {} out of range for {k} blocks",
            j + 1
        ))),
        Some(j) => Ok(vec![j]),
        None => Ok((0..k).collect()),
    }
}

fn tag_block(report: BoundReport, j: usize) -> BoundReport {
    report.component("block", (j + 1) as f64)
}

/// Outcome of the Hermitian pipeline.
#[derive(Debug, Clone, Serialize)]
pub struct EigVerification {
    pub partition: BlockPartition,
    pub grid: GridSummary,
    pub gaps: GapProfile,
    pub perturbation_norm_2: f64,
    pub reports: Vec<BoundReport>,
    pub endpoints: Vec<BlockEndpoint>,
    pub delta_tilde: DeltaTilde,
    pub gap_predictions: Vec<GapPrediction>,
}

impl EigVerification {
    pub fn report(&self, id: BoundId) -> Option<&BoundReport> {
        self.reports.iter().find(|r| r.bound_id == id)
    }

    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(BoundReport::passes)
    }
}

/// Tracks `A + tΔA` and evaluates every Hermitian bound on it.
pub fn verify_eig(
    a: &ComplexMatrix,
    da: &ComplexMatrix,
    partition: &BlockPartition,
    options: VerifyOptions,
) -> Result<(EigPath, EigVerification)> {
    let path = track_eig_path(a, da, partition, options.track)?;
    let verification = evaluate_eig(&path, &options)?;
    Ok((path, verification))
}

/// Evaluates every Hermitian bound on an already tracked path.
pub fn evaluate_eig(path: &EigPath, options: &VerifyOptions) -> Result<EigVerification> {
    let k = path.num_blocks();
    let targets = targets(options, k)?;
    let (a, da) = (&path.base, &path.direction);
    let at = affine(a, da, 1.0);
    let gaps = gap_profile_eig(path);
    let eps = spectral_norm(da)?;

    let mut reports = vec![hoffman_wielandt(a, &at)?];
    for j in 0..k {
        let (u, ut) = (&path.start().basis_blocks[j], &path.end().basis_blocks[j]);
        reports.push(tag_block(davis_kahan(a, &at, u, ut)?, j));
        reports.push(tag_block(li_sun_combined(a, &at, u, ut)?, j));
    }
    reports.push(combined_all_blocks(path, &gaps)?);
    for &j in &targets {
        let single = combined_single_block(path, &gaps, j)?;
        reports.extend(single.all().into_iter().map(|r| tag_block(r.clone(), j)));
    }
    reports.push(total_bound(path)?);
    let gap_predictions = gap_lower_bound(&gaps.at_start(), eps);
    reports.extend(gap_lower_reports(&gap_predictions, &gaps));
    for &j in &targets {
        reports.push(tag_block(mvt_check(path, &gaps, j)?, j));
    }

    Ok(EigVerification {
        partition: path.partition.clone(),
        grid: GridSummary::new(&path.meta, &gaps.grid),
        perturbation_norm_2: eps,
        endpoints: endpoint_blocks(path)?,
        delta_tilde: delta_tilde(path),
        gap_predictions,
        gaps,
        reports,
    })
}

/// Outcome of the SVD pipeline.
#[derive(Debug, Clone, Serialize)]
pub struct SvdVerification {
    pub partition: BlockPartition,
    pub rows: usize,
    pub cols: usize,
    pub grid: GridSummary,
    pub gaps: SvdGapProfile,
    pub perturbation_norm_2: f64,
    pub reports: Vec<BoundReport>,
    pub endpoints: Vec<SvdBlockEndpoint>,
    /// `‖W̃_{k+1} − W_{k+1}‖_F`; absent for square inputs.
    pub nullspace_distance: Option<f64>,
    pub gap_predictions: Vec<SvdGapPrediction>,
}

impl SvdVerification {
    pub fn report(&self, id: BoundId) -> Option<&BoundReport> {
        self.reports.iter().find(|r| r.bound_id == id)
    }

    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(BoundReport::passes)
    }
}

/// Tracks `B + tΔB` and evaluates every SVD bound on it.
pub fn verify_svd(
    b: &ComplexMatrix,
    db: &ComplexMatrix,
    partition: &BlockPartition,
    options: VerifyOptions,
) -> Result<(SvdPath, SvdVerification)> {
    let path = track_svd_path(b, db, partition, options.track)?;
    let verification = evaluate_svd(&path, &options)?;
    Ok((path, verification))
}

/// Evaluates every SVD bound on an already tracked path.
pub fn evaluate_svd(path: &SvdPath, options: &VerifyOptions) -> Result<SvdVerification> {
    let k = path.num_blocks();
    let targets = targets(options, k)?;
    let (b, db) = (&path.base, &path.direction);
    let gaps = gap_profile_svd(path);
    let eps = spectral_norm(db)?;

    let mut reports = vec![mirsky(b, &affine(b, db, 1.0))?];
    reports.push(combined_all_svd(path, &gaps)?);
    for &j in &targets {
        let single = combined_single_svd(path, &gaps, j)?;
        reports.extend(single.all().into_iter().map(|r| tag_block(r.clone(), j)));
    }
    let gap_predictions =
        svd_gap_lower_bound(&gaps.rho.at_start(), &gaps.block_sigma_min.at_start(), eps);
    reports.extend(svd_gap_lower_reports(&gap_predictions, &gaps));
    for &j in &targets {
        reports.push(tag_block(svd_mvt_check(path, &gaps, j)?, j));
    }

    Ok(SvdVerification {
        partition: path.partition.clone(),
        rows: path.rows,
        cols: path.cols,
        grid: GridSummary::new(&path.meta, &gaps.rho.grid),
        perturbation_norm_2: eps,
        endpoints: svd_endpoint_blocks(path)?,
        nullspace_distance: (!path.is_square()).then(|| path.null_distance()),
        gap_predictions,
        gaps,
        reports,
    })
}
