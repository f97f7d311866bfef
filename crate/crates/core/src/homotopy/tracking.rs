use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{eigh_sorted, ComplexMatrix};

pub const DEFAULT_GRID_POINTS: usize = 1025;

/// A block gap dropping below this fraction of both neighbouring samples
/// triggers midpoint insertion.
const DIP_RATIO: f64 = 0.25;

/// Gaps below this fraction of `‖A(t)‖₂` make block identity conventional.
pub const AMBIGUITY_RELATIVE: f64 = 1e-12;

/// Constant in the continuity diagnostic
/// `‖U_j(t+h) − U_j(t)‖_F ≤ C·h·‖Δ‖_F / δ_j(t)`.
pub const CONTINUITY_CONSTANT: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrackOptions {
    pub grid_points: usize,
    /// One round of midpoint insertion around sharp gap dips.
    pub adaptive: bool,
}

impl Default for TrackOptions {
    fn default() -> Self {
        Self {
            grid_points: DEFAULT_GRID_POINTS,
            adaptive: true,
        }
    }
}

impl TrackOptions {
    pub fn uniform(grid_points: usize) -> Self {
        Self {
            grid_points,
            adaptive: false,
        }
    }
}

/// Sample/block where the gap was numerically zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmbiguityFlag {
    pub sample: usize,
    pub t: f64,
    pub block: usize,
}

/// Worst deviation from the discrete gauge over all steps and blocks, where
/// `M = U_j(t_i)ᴴ·U_j(t_{i+1})` should be Hermitian positive semidefinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeResidual {
    /// Max `‖M − Mᴴ‖_F`.
    pub max_asymmetry: f64,
    /// Min eigenvalue of `(M + Mᴴ)/2`.
    pub min_eigenvalue: f64,
}

impl GaugeResidual {
    fn new() -> Self {
        Self {
            max_asymmetry: 0.0,
            min_eigenvalue: f64::INFINITY,
        }
    }

    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_asymmetry <= tolerance && self.min_eigenvalue >= -tolerance
    }

    pub(crate) fn record(&mut self, prev: &ComplexMatrix, aligned: &ComplexMatrix) -> Result<()> {
        let (asymmetry, min_eig) = gauge_defect(prev, aligned)?;
        self.max_asymmetry = self.max_asymmetry.max(asymmetry);
        self.min_eigenvalue = self.min_eigenvalue.min(min_eig);
        Ok(())
    }
}

/// `(‖M − Mᴴ‖_F, λ_min((M + Mᴴ)/2))` for `M = prevᴴ·next`.
pub fn gauge_defect(prev: &ComplexMatrix, next: &ComplexMatrix) -> Result<(f64, f64)> {
    let m = prev.adjoint_mul(next);
    let asymmetry = m.hermitian_defect();
    let sym = m.hermitian_part();
    let eig = eigh_sorted(&sym)?;
    Ok((asymmetry, *eig.eigenvalues.last().expect("nonempty")))
}

/// Tracking metadata shared by eigen and SVD paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathMeta {
    pub grid_points_requested: usize,
    pub adaptive_insertions: usize,
    pub ambiguity: Vec<AmbiguityFlag>,
    /// Steps where a block basis moved further than the continuity
    /// diagnostic allows. Informational.
    pub continuity_flags: usize,
    pub gauge: GaugeResidual,
    /// `max_i ‖M(t_i)‖₂` over the grid.
    pub norm_scale: f64,
}

impl PathMeta {
    pub(crate) fn new(grid_points_requested: usize) -> Self {
        Self {
            grid_points_requested,
            adaptive_insertions: 0,
            ambiguity: Vec::new(),
            continuity_flags: 0,
            gauge: GaugeResidual::new(),
            norm_scale: 0.0,
        }
    }

    pub fn block_ambiguity(&self) -> bool {
        !self.ambiguity.is_empty()
    }
}

pub(crate) fn uniform_grid(points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::InvalidSpec(format!(
            "grid needs at least 2 points, got {points}"
        )));
    }
    let last = (points - 1) as f64;
    Ok((0..points).map(|i| i as f64 / last).collect())
}

/// Inserts midpoints on both sides of every interior sample whose gap for
/// some block is below `DIP_RATIO` times both neighbours. Returns the
/// refined grid and the number of inserted points.
pub(crate) fn refine_grid(grid: &[f64], gaps: &[Vec<f64>]) -> (Vec<f64>, usize) {
    let mut extra = Vec::new();
    for i in 1..grid.len().saturating_sub(1) {
        let dips = (0..gaps[i].len()).any(|j| {
            let (left, mid, right) = (gaps[i - 1][j], gaps[i][j], gaps[i + 1][j]);
            mid.is_finite() && mid < DIP_RATIO * left.min(right)
        });
        if dips {
            extra.push(0.5 * (grid[i - 1] + grid[i]));
            extra.push(0.5 * (grid[i] + grid[i + 1]));
        }
    }
    if extra.is_empty() {
        return (grid.to_vec(), 0);
    }
    let mut refined: Vec<f64> = grid.iter().copied().chain(extra).collect();
    refined.sort_by(f64::total_cmp);
    refined.dedup();
    let inserted = refined.len() - grid.len();
    (refined, inserted)
}

/// Records blocks whose gap at this sample is numerically zero.
pub(crate) fn flag_ambiguity(meta: &mut PathMeta, sample: usize, t: f64, gaps: &[f64], norm: f64) {
    for (block, &g) in gaps.iter().enumerate() {
        if g.is_finite() && g < AMBIGUITY_RELATIVE * norm {
            meta.ambiguity.push(AmbiguityFlag { sample, t, block });
        }
    }
}

/// Counts blocks whose basis moved further over one step than
/// `C·h·‖Δ‖_F / gap` allows, with the gap taken at the start of the step.
pub(crate) fn count_continuity(
    meta: &mut PathMeta,
    displacement: &[f64],
    step: f64,
    delta_norm: f64,
    start_gaps: &[f64],
) {
    for (&d, &g) in displacement.iter().zip(start_gaps) {
        if g > 0.0 && g.is_finite() && d > CONTINUITY_CONSTANT * step * delta_norm / g {
            meta.continuity_flags += 1;
        }
    }
}
