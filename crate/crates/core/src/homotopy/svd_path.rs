use super::assign::assign_to_blocks;
use super::gaps::block_gaps;
use super::partition::BlockPartition;
use super::procrustes::align_unchecked;
use super::tracking::{
    count_continuity, flag_ambiguity, refine_grid, uniform_grid, PathMeta, TrackOptions,
};
use crate::error::{Error, Result};
use crate::matcore::{affine, svd_sorted, ComplexMatrix};

/// Block factorization `B(t) = W(t)·[Σ(t); 0]·V(t)ᴴ` at one grid point.
#[derive(Debug, Clone)]
pub struct SvdPathSample {
    pub t: f64,
    /// `W_j(t)`, `m x r_j`.
    pub left_blocks: Vec<ComplexMatrix>,
    /// `W_{k+1}(t)`, `m x (m − n)`; present iff `m > n`.
    pub null_block: Option<ComplexMatrix>,
    /// `V_j(t)`, `n x r_j`.
    pub right_blocks: Vec<ComplexMatrix>,
    /// `Σ_j(t) = W_j(t)ᴴ·B(t)·V_j(t)`, not necessarily diagonal.
    pub sigma_blocks: Vec<ComplexMatrix>,
    /// Singular values of each `Σ_j(t)`, nonincreasing.
    pub block_sings: Vec<Vec<f64>>,
}

impl SvdPathSample {
    /// Full `m x m` left factor `[W_1, …, W_k, W_{k+1}]`.
    pub fn left(&self) -> ComplexMatrix {
        let mut parts: Vec<&ComplexMatrix> = self.left_blocks.iter().collect();
        if let Some(null) = &self.null_block {
            parts.push(null);
        }
        ComplexMatrix::hstack(&parts)
    }

    /// Full `n x n` right factor `[V_1, …, V_k]`.
    pub fn right(&self) -> ComplexMatrix {
        let parts: Vec<&ComplexMatrix> = self.right_blocks.iter().collect();
        ComplexMatrix::hstack(&parts)
    }

    /// Block-diagonal `m x n` middle factor `[Σ(t); 0]`.
    pub fn middle(&self) -> ComplexMatrix {
        let m = self.left_blocks[0].rows();
        let n = self.right_blocks[0].rows();
        let mut out = ComplexMatrix::zeros(m, n);
        let mut off = 0;
        for s in &self.sigma_blocks {
            for i in 0..s.rows() {
                for j in 0..s.cols() {
                    out[(off + i, off + j)] = s[(i, j)];
                }
            }
            off += s.rows();
        }
        out
    }

    pub fn pooled_singulars(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self.block_sings.iter().flatten().copied().collect();
        all.sort_by(|a, b| b.total_cmp(a));
        all
    }
}

#[derive(Debug, Clone)]
pub struct SvdPath {
    pub partition: BlockPartition,
    /// `B`.
    pub base: ComplexMatrix,
    /// `ΔB`.
    pub direction: ComplexMatrix,
    pub rows: usize,
    pub cols: usize,
    pub samples: Vec<SvdPathSample>,
    pub meta: PathMeta,
}

impl SvdPath {
    pub fn grid(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn start(&self) -> &SvdPathSample {
        &self.samples[0]
    }

    pub fn end(&self) -> &SvdPathSample {
        self.samples.last().expect("paths have at least two samples")
    }

    pub fn num_blocks(&self) -> usize {
        self.partition.num_blocks()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// `‖W̃_j − W_j‖_F`.
    pub fn left_distance(&self, j: usize) -> f64 {
        (&self.end().left_blocks[j] - &self.start().left_blocks[j]).frobenius_norm()
    }

    /// `‖Ṽ_j − V_j‖_F`.
    pub fn right_distance(&self, j: usize) -> f64 {
        (&self.end().right_blocks[j] - &self.start().right_blocks[j]).frobenius_norm()
    }

    /// `‖W̃_{k+1} − W_{k+1}‖_F`, zero for square paths.
    pub fn null_distance(&self) -> f64 {
        match (&self.end().null_block, &self.start().null_block) {
            (Some(e), Some(s)) => (e - s).frobenius_norm(),
            _ => 0.0,
        }
    }

    pub fn with_block_first(&self, j: usize) -> Self {
        let perm = self.partition.permutation_with_first(j);
        let sizes = perm.iter().map(|&i| self.partition.sizes()[i]).collect();
        let pick = |v: &Vec<ComplexMatrix>| perm.iter().map(|&i| v[i].clone()).collect();
        let mut meta = self.meta.clone();
        for flag in meta.ambiguity.iter_mut() {
            flag.block = perm.iter().position(|&i| i == flag.block).expect("valid block");
        }
        Self {
            partition: BlockPartition::new(sizes).expect("permuted partition stays valid"),
            base: self.base.clone(),
            direction: self.direction.clone(),
            rows: self.rows,
            cols: self.cols,
            samples: self
                .samples
                .iter()
                .map(|s| SvdPathSample {
                    t: s.t,
                    left_blocks: pick(&s.left_blocks),
                    null_block: s.null_block.clone(),
                    right_blocks: pick(&s.right_blocks),
                    sigma_blocks: pick(&s.sigma_blocks),
                    block_sings: perm.iter().map(|&i| s.block_sings[i].clone()).collect(),
                })
                .collect(),
            meta,
        }
    }
}

/// Tracks the block SVD of `B + tΔB` (`m >= n`) over `[0, 1]`.
///
/// Blocks are formed and followed as in [`super::track_eig_path`], using
/// singular values. The left blocks, the nullspace block (when `m > n`) and
/// the right blocks are each gauge-aligned independently, so `Σ_j(t)` is in
/// general a full `r_j x r_j` matrix.
pub fn track_svd_path(
    b: &ComplexMatrix,
    db: &ComplexMatrix,
    partition: &BlockPartition,
    options: TrackOptions,
) -> Result<SvdPath> {
    b.check_finite()?;
    db.check_finite()?;
    if b.shape() != db.shape() {
        return Err(Error::Shape(format!(
            "B is {:?} but dB is {:?}",
            b.shape(),
            db.shape()
        )));
    }
    if b.rows() < b.cols() {
        return Err(Error::Shape(format!(
            "SVD paths need rows >= cols, got {}x{}; transpose first",
            b.rows(),
            b.cols()
        )));
    }
    partition.check_dim(b.cols())?;

    let grid = uniform_grid(options.grid_points)?;
    let path = track_on_grid(b, db, partition, &grid, options.grid_points)?;
    if !options.adaptive {
        return Ok(path);
    }
    let gaps: Vec<Vec<f64>> = path.samples.iter().map(rho_hat).collect();
    let (refined, inserted) = refine_grid(&grid, &gaps);
    if inserted == 0 {
        return Ok(path);
    }
    let mut path = track_on_grid(b, db, partition, &refined, options.grid_points)?;
    path.meta.adaptive_insertions = inserted;
    Ok(path)
}

fn rho_hat(sample: &SvdPathSample) -> Vec<f64> {
    block_gaps(&sample.block_sings)
        .into_iter()
        .zip(&sample.block_sings)
        .map(|(rho, s)| rho.min(s.iter().copied().fold(f64::INFINITY, f64::min)))
        .collect()
}

fn track_on_grid(
    b: &ComplexMatrix,
    db: &ComplexMatrix,
    partition: &BlockPartition,
    grid: &[f64],
    requested: usize,
) -> Result<SvdPath> {
    let (m, n) = b.shape();
    let mut meta = PathMeta::new(requested);
    let db_norm = db.frobenius_norm();
    let mut samples: Vec<SvdPathSample> = Vec::with_capacity(grid.len());

    for (i, &t) in grid.iter().enumerate() {
        let bt = affine(b, db, t);
        let dec = svd_sorted(&bt)?;
        let norm = dec.singulars[0];
        meta.norm_scale = meta.norm_scale.max(norm);
        let raw_null = (m > n).then(|| dec.left.column_block(n, m - n));

        let (left_blocks, right_blocks, null_block, block_sings) = match samples.last() {
            None => {
                let mut lefts = Vec::new();
                let mut rights = Vec::new();
                let mut sings = Vec::new();
                for (&start, &r) in partition.offsets().iter().zip(partition.sizes()) {
                    lefts.push(dec.left.column_block(start, r));
                    rights.push(dec.right.column_block(start, r));
                    sings.push(dec.singulars[start..start + r].to_vec());
                }
                (lefts, rights, raw_null, sings)
            }
            Some(prev) => {
                let assignment = assign_to_blocks(&prev.block_sings, &dec.singulars)?;
                let mut lefts = Vec::with_capacity(assignment.len());
                let mut rights = Vec::with_capacity(assignment.len());
                let mut sings = Vec::with_capacity(assignment.len());
                for (j, idx) in assignment.iter().enumerate() {
                    let w = align_unchecked(&prev.left_blocks[j], &dec.left.select_columns(idx))?.aligned;
                    let v = align_unchecked(&prev.right_blocks[j], &dec.right.select_columns(idx))?.aligned;
                    meta.gauge.record(&prev.left_blocks[j], &w)?;
                    meta.gauge.record(&prev.right_blocks[j], &v)?;
                    lefts.push(w);
                    rights.push(v);
                    sings.push(idx.iter().map(|&q| dec.singulars[q]).collect());
                }
                let null = match (&prev.null_block, raw_null) {
                    (Some(p), Some(raw)) => {
                        let aligned = align_unchecked(p, &raw)?.aligned;
                        meta.gauge.record(p, &aligned)?;
                        Some(aligned)
                    }
                    _ => None,
                };
                (lefts, rights, null, sings)
            }
        };

        let sigma_blocks = left_blocks
            .iter()
            .zip(&right_blocks)
            .map(|(w, v)| w.adjoint_mul(&bt.matmul(v)))
            .collect();

        let gaps = block_gaps(&block_sings);
        flag_ambiguity(&mut meta, i, t, &gaps, norm);
        if let Some(prev) = samples.last() {
            // left and right displacements both answer to the same gap
            let displacement: Vec<f64> = (0..left_blocks.len())
                .map(|j| {
                    let dw = (&left_blocks[j] - &prev.left_blocks[j]).frobenius_norm();
                    let dv = (&right_blocks[j] - &prev.right_blocks[j]).frobenius_norm();
                    dw.max(dv)
                })
                .collect();
            let start_gaps = rho_hat(prev);
            count_continuity(&mut meta, &displacement, t - prev.t, db_norm, &start_gaps);
        }

        samples.push(SvdPathSample {
            t,
            left_blocks,
            null_block,
            right_blocks,
            sigma_blocks,
            block_sings,
        });
    }

    Ok(SvdPath {
        partition: partition.clone(),
        base: b.clone(),
        direction: db.clone(),
        rows: m,
        cols: n,
        samples,
        meta,
    })
}
