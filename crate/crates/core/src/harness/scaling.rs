use serde::Serialize;

use super::generate::{gen_problem, ProblemKind, ProblemSpec};
use crate::bounds::delta_tilde;
use crate::error::{Error, Result};
use crate::homotopy::{gap_profile_eig, track_eig_path, BlockPartition, TrackOptions};
use crate::matcore::ComplexMatrix;

/// A ratio sequence counts as bounded if its magnitude never increases, or
/// if `|δ_{j,min} − δ̃_j|` decays at least this fast in `‖ΔA‖_F` on a
/// log-log fit.
pub const BOUNDED_SLOPE: f64 = 0.9;

/// Differences below this multiple of the gap scale are treated as zero.
const ZERO_DIFFERENCE: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub perturb_norm: f64,
    pub delta_min: Vec<f64>,
    pub delta_tilde: Vec<f64>,
    /// `δ_{j,min} − δ̃_j`; `None` where either side is infinite.
    pub difference: Vec<Option<f64>>,
    /// `difference / ‖ΔA‖_F`; `None` at zero norm.
    pub ratio: Vec<Option<f64>>,
    /// Gap collapse or tracking failure; excluded from the fit.
    pub flagged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingTable {
    pub rows: Vec<ScalingRow>,
    /// Least-squares slope of `log|difference|` against `log ‖ΔA‖_F`.
    pub slopes: Vec<Option<f64>>,
    pub ratio_bounded: Vec<bool>,
}

/// Runs [`scaling_study_matrices`] on the Hermitian problem of `spec`,
/// whose perturbation supplies the direction.
pub fn scaling_study(spec: &ProblemSpec, norms: &[f64], options: TrackOptions) -> Result<ScalingTable> {
    if spec.kind != ProblemKind::Hermitian {
        return Err(Error::InvalidSpec("scaling studies need a Hermitian problem".into()));
    }
    let unit = ProblemSpec {
        perturb_norm: 1.0,
        ..spec.clone()
    };
    let (a, direction) = gen_problem(&unit)?;
    scaling_study_matrices(&a, &direction, &spec.partition, norms, options)
}

/// Tabulates `δ_{j,min} − δ̃_j` for `ΔA = s·D/‖D‖_F` over the nonincreasing
/// sequence `norms`.
pub fn scaling_study_matrices(
    a: &ComplexMatrix,
    direction: &ComplexMatrix,
    partition: &BlockPartition,
    norms: &[f64],
    options: TrackOptions,
) -> Result<ScalingTable> {
    if norms.is_empty() {
        return Err(Error::InvalidSpec("scaling study needs at least one norm".into()));
    }
    if norms.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
        return Err(Error::InvalidSpec("norms must be finite and nonnegative".into()));
    }
    if norms.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::InvalidSpec("norms must be nonincreasing".into()));
    }
    let dnorm = direction.frobenius_norm();
    if dnorm == 0.0 && norms.iter().any(|&s| s > 0.0) {
        return Err(Error::InvalidSpec("zero direction with a positive norm".into()));
    }

    let k = partition.num_blocks();
    let rows: Vec<ScalingRow> = norms
        .iter()
        .map(|&s| {
            let da = if s == 0.0 {
                ComplexMatrix::zeros(a.rows(), a.cols())
            } else {
                direction.scale(s / dnorm)
            };
            scaling_row(a, &da, partition, s, options)
        })
        .collect::<Result<_>>()?;

    let mut slopes = Vec::with_capacity(k);
    let mut ratio_bounded = Vec::with_capacity(k);
    for j in 0..k {
        let usable: Vec<&ScalingRow> = rows
            .iter()
            .filter(|r| !r.flagged && r.perturb_norm > 0.0)
            .collect();
        let scale = usable
            .iter()
            .map(|r| r.delta_min[j])
            .filter(|d| d.is_finite())
            .fold(0.0, f64::max);
        let points: Vec<(f64, f64)> = usable
            .iter()
            .filter_map(|r| r.difference[j].map(|d| (r.perturb_norm, d.abs())))
            .filter(|&(_, d)| d > ZERO_DIFFERENCE * scale.max(1.0))
            .map(|(s, d)| (s.ln(), d.ln()))
            .collect();
        let slope = fit_slope(&points);
        let ratios: Vec<Option<f64>> = usable.iter().map(|r| r.ratio[j]).collect();
        let all_finite = usable.iter().all(|r| r.difference[j].is_some())
            && ratios.iter().all(|q| q.is_some_and(f64::is_finite));
        let magnitudes: Vec<f64> = ratios.iter().flatten().map(|q| q.abs()).collect();
        let non_increasing = magnitudes
            .windows(2)
            .all(|w| w[1] <= w[0] + ZERO_DIFFERENCE * scale.max(1.0));
        let fast_decay = slope.is_none_or(|p| p >= BOUNDED_SLOPE);
        // k = 1 has no gap, so there is nothing to bound
        let vacuous = usable.iter().all(|r| r.difference[j].is_none());
        slopes.push(slope);
        ratio_bounded.push(vacuous || (all_finite && (non_increasing || fast_decay)));
    }

    Ok(ScalingTable {
        rows,
        slopes,
        ratio_bounded,
    })
}

fn scaling_row(
    a: &ComplexMatrix,
    da: &ComplexMatrix,
    partition: &BlockPartition,
    s: f64,
    options: TrackOptions,
) -> Result<ScalingRow> {
    let k = partition.num_blocks();
    let path = match track_eig_path(a, da, partition, options) {
        Ok(path) => path,
        Err(e @ Error::RankCollapse { .. }) => {
            return Ok(ScalingRow {
                perturb_norm: s,
                delta_min: vec![f64::NAN; k],
                delta_tilde: vec![f64::NAN; k],
                difference: vec![None; k],
                ratio: vec![None; k],
                flagged: true,
                note: Some(e.to_string()),
            })
        }
        Err(e) => return Err(e),
    };
    let gaps = gap_profile_eig(&path);
    let tilde = delta_tilde(&path);
    let difference: Vec<Option<f64>> = gaps
        .path_minima
        .iter()
        .zip(&tilde.per_block)
        .map(|(&m, &d)| {
            let diff = m - d;
            diff.is_finite().then_some(diff)
        })
        .collect();
    let ratio = difference
        .iter()
        .map(|d| d.and_then(|d| (s > 0.0).then(|| d / s)))
        .collect();
    let collapse = gaps.path_minima.contains(&0.0);
    Ok(ScalingRow {
        perturb_norm: s,
        delta_min: gaps.path_minima,
        delta_tilde: tilde.per_block,
        difference,
        ratio,
        flagged: collapse || path.meta.block_ambiguity(),
        note: collapse.then(|| "gap collapse along the path".to_string()),
    })
}

fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
