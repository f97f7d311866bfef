use serde::{Deserialize, Serialize};

use super::eig_path::EigPath;
use super::svd_path::SvdPath;

/// Path minima at or below this fraction of the path's spectral scale are
/// reported as exactly zero.
pub const ZERO_GAP_RELATIVE: f64 = 1e-12;

/// Per-block gap values along a grid, with their grid minima.
///
/// A single-block path has no competing block; its gaps are `+∞`
/// ("unconstrained").
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapProfile {
    pub grid: Vec<f64>,
    /// `per_block_gaps[j][i]` is the gap of block `j` at `grid[i]`.
    pub per_block_gaps: Vec<Vec<f64>>,
    pub path_minima: Vec<f64>,
    /// Parameter value where each minimum is attained.
    pub argmin: Vec<f64>,
    /// Largest grid spacing; the minima are grid minima at this resolution.
    pub resolution: f64,
}

impl GapProfile {
    fn from_samples(grid: Vec<f64>, per_sample: Vec<Vec<f64>>, scale: f64) -> Self {
        let k = per_sample.first().map_or(0, Vec::len);
        let per_block_gaps: Vec<Vec<f64>> = (0..k)
            .map(|j| per_sample.iter().map(|g| g[j]).collect())
            .collect();
        let mut path_minima = Vec::with_capacity(k);
        let mut argmin = Vec::with_capacity(k);
        for row in &per_block_gaps {
            let (i, &m) = row
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(b.1))
                .expect("nonempty grid");
            let m = if m <= ZERO_GAP_RELATIVE * scale { 0.0 } else { m };
            path_minima.push(m);
            argmin.push(grid[i]);
        }
        let resolution = grid.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        Self {
            grid,
            per_block_gaps,
            path_minima,
            argmin,
            resolution,
        }
    }

    pub fn num_blocks(&self) -> usize {
        self.path_minima.len()
    }

    /// Gap values at the first grid point (`t = 0`).
    pub fn at_start(&self) -> Vec<f64> {
        self.per_block_gaps.iter().map(|row| row[0]).collect()
    }

    /// Reorders blocks by `perm` (`new[i] = old[perm[i]]`).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            grid: self.grid.clone(),
            per_block_gaps: perm.iter().map(|&j| self.per_block_gaps[j].clone()).collect(),
            path_minima: perm.iter().map(|&j| self.path_minima[j]).collect(),
            argmin: perm.iter().map(|&j| self.argmin[j]).collect(),
            resolution: self.resolution,
        }
    }
}

/// Gap functionals of an SVD path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvdGapProfile {
    /// `ρ_j(t)`: distance between block `j`'s singular values and every
    /// other block's.
    pub rho: GapProfile,
    /// `σ_{j,min}(t)`: smallest singular value of `Σ_j(t)`.
    pub block_sigma_min: GapProfile,
    /// `ρ̂_j(t) = min(ρ_j(t), σ_{j,min}(t))`.
    pub rho_hat: GapProfile,
    /// `min_t min_j σ_{j,min}(t)`.
    pub sigma_min: f64,
}

impl SvdGapProfile {
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            rho: self.rho.permuted(perm),
            block_sigma_min: self.block_sigma_min.permuted(perm),
            rho_hat: self.rho_hat.permuted(perm),
            sigma_min: self.sigma_min,
        }
    }
}

/// `δ_j = min_{i≠j} min |λ − μ|` over `λ ∈ blocks[j]`, `μ ∈ blocks[i]`.
pub fn block_gaps(blocks: &[Vec<f64>]) -> Vec<f64> {
    (0..blocks.len())
        .map(|j| {
            blocks
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .map(|(_, other)| pair_gap(&blocks[j], other))
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// Smallest distance between two value sets.
pub fn pair_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| (x - y).abs()))
        .fold(f64::INFINITY, f64::min)
}

/// `δ_j(t)` profile of a Hermitian path.
pub fn gap_profile_eig(path: &EigPath) -> GapProfile {
    let grid = path.grid();
    let per_sample = path.samples.iter().map(|s| block_gaps(&s.block_eigs)).collect();
    GapProfile::from_samples(grid, per_sample, path.meta.norm_scale)
}

/// `ρ`, `σ_{j,min}`, `ρ̂` profiles and `σ_min` of an SVD path.
pub fn gap_profile_svd(path: &SvdPath) -> SvdGapProfile {
    let grid = path.grid();
    let scale = path.meta.norm_scale;
    let rho_samples: Vec<Vec<f64>> = path.samples.iter().map(|s| block_gaps(&s.block_sings)).collect();
    let sigma_samples: Vec<Vec<f64>> = path
        .samples
        .iter()
        .map(|s| {
            s.block_sings
                .iter()
                .map(|v| v.iter().copied().fold(f64::INFINITY, f64::min))
                .collect()
        })
        .collect();
    let hat_samples: Vec<Vec<f64>> = rho_samples
        .iter()
        .zip(&sigma_samples)
        .map(|(r, s)| r.iter().zip(s).map(|(a, b)| a.min(*b)).collect())
        .collect();
    let sigma_min_raw = sigma_samples
        .iter()
        .flatten()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let sigma_min = if sigma_min_raw <= ZERO_GAP_RELATIVE * scale {
        0.0
    } else {
        sigma_min_raw
    };
    SvdGapProfile {
        rho: GapProfile::from_samples(grid.clone(), rho_samples, scale),
        block_sigma_min: GapProfile::from_samples(grid.clone(), sigma_samples, scale),
        rho_hat: GapProfile::from_samples(grid, hat_samples, scale),
        sigma_min,
    }
}
