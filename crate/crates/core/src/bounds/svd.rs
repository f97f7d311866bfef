use serde::Serialize;

use super::report::{block_key, sq_distance, weighted, BoundId, BoundReport};
use crate::error::{Error, Result};
use crate::homotopy::{SvdGapProfile, SvdPath};
use crate::matcore::{sin_theta, spectral_norm, svd_sorted, ComplexMatrix};

fn singular_values(b: &ComplexMatrix) -> Result<Vec<f64>> {
    if b.rows() >= b.cols() {
        Ok(svd_sorted(b)?.singulars)
    } else {
        Ok(svd_sorted(&b.adjoint())?.singulars)
    }
}

/// `‖Sing↓(B̃) − Sing↓(B)‖_F ≤ ‖B̃ − B‖_F`.
pub fn mirsky(b: &ComplexMatrix, bt: &ComplexMatrix) -> Result<BoundReport> {
    if b.shape() != bt.shape() {
        return Err(Error::Shape(format!(
            "Mirsky operands: {:?} vs {:?}",
            b.shape(),
            bt.shape()
        )));
    }
    let lhs = sq_distance(&singular_values(bt)?, &singular_values(b)?).sqrt();
    Ok(BoundReport::new(BoundId::Mirsky, lhs, (bt - b).frobenius_norm()))
}

fn check_profile(path: &SvdPath, gaps: &SvdGapProfile) -> Result<()> {
    if gaps.rho.num_blocks() != path.num_blocks() {
        return Err(Error::CountMismatch(format!(
            "gap profile has {} blocks, path has {}",
            gaps.rho.num_blocks(),
            path.num_blocks()
        )));
    }
    Ok(())
}

/// All-blocks combined bound. For `m > n`:
///
/// `‖Sing↓(B̃) − Sing↓(B)‖_F² + Σ_j ρ̂_{j,min}²/2·‖W̃_j − W_j‖_F²
///  + σ_min²/2·‖W̃_{k+1} − W_{k+1}‖_F² + Σ_j ρ_{j,min}²/2·‖Ṽ_j − V_j‖_F² ≤ ‖ΔB‖_F²`;
///
/// for `m = n` both factors carry the `ρ_{j,min}²/2` weight and there is no
/// nullspace term.
pub fn combined_all_svd(path: &SvdPath, gaps: &SvdGapProfile) -> Result<BoundReport> {
    check_profile(path, gaps)?;
    let sing_term = sq_distance(
        &path.end().pooled_singulars(),
        &path.start().pooled_singulars(),
    );
    let mut report =
        BoundReport::new(BoundId::SvdCombinedAll, 0.0, path.direction.frobenius_norm_sqr())
            .component("singular_value_term", sing_term);
    let mut lhs = sing_term;
    let square = path.is_square();
    for j in 0..path.num_blocks() {
        let left_weight = if square {
            gaps.rho.path_minima[j]
        } else {
            gaps.rho_hat.path_minima[j]
        };
        let left = weighted(left_weight, path.left_distance(j)) / 2.0;
        let right = weighted(gaps.rho.path_minima[j], path.right_distance(j)) / 2.0;
        report = report
            .component(block_key("left", j), left)
            .component(block_key("right", j), right);
        lhs += left + right;
    }
    if !square {
        let null = weighted(gaps.sigma_min, path.null_distance()) / 2.0;
        report = report.component("nullspace", null);
        lhs += null;
    }
    report.lhs = lhs;
    report.slack = report.rhs - lhs;
    Ok(report)
}

/// The single-block SVD bound and its `sinΘ` corollary.
#[derive(Debug, Clone, Serialize)]
pub struct SvdSingleBlockReports {
    pub main: BoundReport,
    pub cor_sin: BoundReport,
}

impl SvdSingleBlockReports {
    pub fn all(&self) -> [&BoundReport; 2] {
        [&self.main, &self.cor_sin]
    }
}

struct SingleBlockData {
    eps: f64,
    rho: f64,
    rho_hat: f64,
    sing_diff: f64,
    left_distance: f64,
    right_distance: f64,
    sin_left: f64,
    sin_right: f64,
    coupling: f64,
}

fn single_block_data(path: &SvdPath, gaps: &SvdGapProfile, target: usize) -> Result<SingleBlockData> {
    check_profile(path, gaps)?;
    let (start, end) = (path.start(), path.end());
    let (w, v) = (&start.left_blocks[target], &start.right_blocks[target]);
    let db = &path.direction;
    let rho = gaps.rho.path_minima[target];
    Ok(SingleBlockData {
        eps: spectral_norm(db)?,
        rho,
        rho_hat: if path.is_square() {
            rho
        } else {
            gaps.rho_hat.path_minima[target]
        },
        sing_diff: sq_distance(&end.block_sings[target], &start.block_sings[target]),
        left_distance: path.left_distance(target),
        right_distance: path.right_distance(target),
        sin_left: sin_theta(w, &end.left_blocks[target])?.fro,
        sin_right: sin_theta(v, &end.right_blocks[target])?.fro,
        coupling: db.matmul(v).frobenius_norm_sqr() + w.adjoint_mul(db).frobenius_norm_sqr(),
    })
}

/// Bounds for block `target` alone.
///
/// For `m > n`, valid when `‖ΔB‖₂ < ρ̂_{min}`:
/// `2‖Sing↓(Σ̃) − Sing↓(Σ)‖_F² + ρ̂_{min}²‖W̃ − W‖_F² + ρ_{min}²‖Ṽ − V‖_F²
///  ≤ (ρ̂_{min}/(ρ̂_{min} − ‖ΔB‖₂))²·(‖ΔB·V‖_F² + ‖Wᴴ·ΔB‖_F²)`.
///
/// For `m = n`, valid when `‖ΔB‖₂ < ρ_{min}`:
/// `2(1 − ‖ΔB‖₂/ρ_{min})²‖Sing↓(Σ̃) − Sing↓(Σ)‖_F²
///  + (ρ_{min} − ‖ΔB‖₂)²(‖W̃ − W‖_F² + ‖Ṽ − V‖_F²) ≤ ‖ΔB·V‖_F² + ‖Wᴴ·ΔB‖_F²`.
///
/// The corollary replaces the basis distances by `‖sinΘ‖_F`.
pub fn combined_single_svd(
    path: &SvdPath,
    gaps: &SvdGapProfile,
    target: usize,
) -> Result<SvdSingleBlockReports> {
    let d = single_block_data(path, gaps, target)?;
    let square = path.is_square();
    let (gate, gate_name) = if square {
        (d.rho, "rho_min")
    } else {
        (d.rho_hat, "rho_hat_min")
    };
    let holds = d.eps < gate;
    let note = format!("requires ||dB||_2 < {gate_name} of block {}", target + 1);

    let build = |id: BoundId, left: f64, right: f64| {
        let (sing_term, left_term, right_term, rhs) = if square {
            let sing_term = if d.sing_diff == 0.0 {
                0.0
            } else {
                2.0 * (1.0 - d.eps / d.rho).powi(2) * d.sing_diff
            };
            let margin = d.rho - d.eps;
            (sing_term, weighted(margin, left), weighted(margin, right), d.coupling)
        } else {
            let factor = d.rho_hat / (d.rho_hat - d.eps);
            (
                2.0 * d.sing_diff,
                weighted(d.rho_hat, left),
                weighted(d.rho, right),
                factor * factor * d.coupling,
            )
        };
        BoundReport::new(id, sing_term + left_term + right_term, rhs)
            .with_condition(holds, note.clone())
            .component("singular_value_term", sing_term)
            .component("left_term", left_term)
            .component("right_term", right_term)
            .component("rho_min", d.rho)
            .component("rho_hat_min", d.rho_hat)
            .component("perturbation_norm_2", d.eps)
    };
    Ok(SvdSingleBlockReports {
        main: build(BoundId::SvdCombinedSingle, d.left_distance, d.right_distance),
        cor_sin: build(BoundId::SvdCorSin, d.sin_left, d.sin_right),
    })
}

/// Sufficient conditions and implied lower bounds for one block's SVD gaps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SvdGapPrediction {
    pub rho_at_zero: f64,
    pub sigma_min_at_zero: f64,
    /// `‖ΔB‖₂ ≤ min{ρ_j(0)/2, σ_{j,min}(0)}`, sufficient for `ρ̂_{j,min} > 0`.
    pub positive_condition: bool,
    /// `‖ΔB‖₂ < min{ρ_j(0)/3, σ_{j,min}(0)/2}`, sufficient for `‖ΔB‖₂ < ρ̂_{j,min}`.
    pub local_condition: bool,
    /// `ρ_j(0) > 3‖ΔB‖₂`, sufficient for `‖ΔB‖₂ < ρ_{j,min}`.
    pub square_condition: bool,
    /// `ρ_j(0) − 2‖ΔB‖₂`.
    pub rho_lower: f64,
    /// `min{ρ_j(0) − 2‖ΔB‖₂, σ_{j,min}(0) − ‖ΔB‖₂}`.
    pub rho_hat_lower: f64,
}

pub fn svd_gap_lower_bound(
    rho_at_zero: &[f64],
    sigma_min_at_zero: &[f64],
    perturbation_norm_2: f64,
) -> Vec<SvdGapPrediction> {
    let eps = perturbation_norm_2;
    rho_at_zero
        .iter()
        .zip(sigma_min_at_zero)
        .map(|(&rho, &sigma)| SvdGapPrediction {
            rho_at_zero: rho,
            sigma_min_at_zero: sigma,
            positive_condition: eps <= (rho / 2.0).min(sigma),
            local_condition: eps < (rho / 3.0).min(sigma / 2.0),
            square_condition: rho > 3.0 * eps,
            rho_lower: rho - 2.0 * eps,
            rho_hat_lower: (rho - 2.0 * eps).min(sigma - eps),
        })
        .collect()
}

/// Compares each predicted `ρ̂` lower bound (lhs) with the tracked
/// `ρ̂_{j,min}` (rhs); applicable under the positivity condition.
pub fn svd_gap_lower_reports(
    predictions: &[SvdGapPrediction],
    gaps: &SvdGapProfile,
) -> Vec<BoundReport> {
    predictions
        .iter()
        .enumerate()
        .map(|(j, p)| {
            let tracked = gaps.rho_hat.path_minima[j];
            BoundReport::new(BoundId::SvdGapLower, p.rho_hat_lower, tracked)
                .with_condition(
                    p.positive_condition,
                    format!("requires ||dB||_2 <= min(rho_{0}(0)/2, sigma_{0},min(0))", j + 1),
                )
                .component("block", (j + 1) as f64)
                .component("tracked_rho_min", gaps.rho.path_minima[j])
                .component("rho_lower", p.rho_lower)
                .component("local_condition", f64::from(u8::from(p.local_condition)))
                .component("square_condition", f64::from(u8::from(p.square_condition)))
        })
        .collect()
}

/// Checkable form of the SVD mean-value bound for block `target`, with
/// `max_i (‖ΔB·V(t_i)‖_F² + ‖W(t_i)ᴴ·ΔB‖_F²)` on the right.
pub fn svd_mvt_check(path: &SvdPath, gaps: &SvdGapProfile, target: usize) -> Result<BoundReport> {
    let d = single_block_data(path, gaps, target)?;
    let sing_term = 2.0 * d.sing_diff;
    let left_term = weighted(d.rho_hat, d.left_distance);
    let right_term = weighted(d.rho, d.right_distance);
    let db = &path.direction;
    let (mut rhs, mut t_max) = (0.0f64, 0.0);
    for s in &path.samples {
        let v = db.matmul(&s.right_blocks[target]).frobenius_norm_sqr()
            + s.left_blocks[target].adjoint_mul(db).frobenius_norm_sqr();
        if v > rhs {
            rhs = v;
            t_max = s.t;
        }
    }
    Ok(
        BoundReport::new(BoundId::SvdMVT, sing_term + left_term + right_term, rhs)
            .component("singular_value_term", sing_term)
            .component("left_term", left_term)
            .component("right_term", right_term)
            .component("t_max", t_max),
    )
}

/// Endpoint distances and canonical angles of one SVD block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SvdBlockEndpoint {
    pub left_distance: f64,
    pub right_distance: f64,
    pub left_sin_theta_fro: f64,
    pub right_sin_theta_fro: f64,
}

pub fn svd_endpoint_blocks(path: &SvdPath) -> Result<Vec<SvdBlockEndpoint>> {
    let (start, end) = (path.start(), path.end());
    (0..path.num_blocks())
        .map(|j| {
            Ok(SvdBlockEndpoint {
                left_distance: path.left_distance(j),
                right_distance: path.right_distance(j),
                left_sin_theta_fro: sin_theta(&start.left_blocks[j], &end.left_blocks[j])?.fro,
                right_sin_theta_fro: sin_theta(&start.right_blocks[j], &end.right_blocks[j])?.fro,
            })
        })
        .collect()
}
