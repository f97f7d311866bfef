use super::assign::assign_to_blocks;
use super::gaps::block_gaps;
use super::partition::BlockPartition;
use super::procrustes::align_unchecked;
use super::tracking::{
    count_continuity, flag_ambiguity, refine_grid, uniform_grid, PathMeta, TrackOptions,
};
use crate::error::{Error, Result};
use crate::matcore::{affine, eigh_sorted, ComplexMatrix};

/// Decomposition of `A(t)` at one grid point.
#[derive(Debug, Clone)]
pub struct EigPathSample {
    pub t: f64,
    /// `U_j(t)`, `n x r_j`.
    pub basis_blocks: Vec<ComplexMatrix>,
    /// `Λ_j(t) = U_j(t)ᴴ·A(t)·U_j(t)`.
    pub lambda_blocks: Vec<ComplexMatrix>,
    /// Eigenvalues of each `Λ_j(t)`, nonincreasing.
    pub block_eigs: Vec<Vec<f64>>,
}

impl EigPathSample {
    /// `[U_1(t), …, U_k(t)]`.
    pub fn basis(&self) -> ComplexMatrix {
        let parts: Vec<&ComplexMatrix> = self.basis_blocks.iter().collect();
        ComplexMatrix::hstack(&parts)
    }

    /// All block eigenvalues pooled and sorted nonincreasing.
    pub fn pooled_eigenvalues(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self.block_eigs.iter().flatten().copied().collect();
        all.sort_by(|a, b| b.total_cmp(a));
        all
    }
}

/// Gauge-tracked block spectral decomposition of `A + tΔA` on `t ∈ [0, 1]`.
#[derive(Debug, Clone)]
pub struct EigPath {
    pub partition: BlockPartition,
    /// `A`.
    pub base: ComplexMatrix,
    /// `ΔA`.
    pub direction: ComplexMatrix,
    pub samples: Vec<EigPathSample>,
    pub meta: PathMeta,
}

impl EigPath {
    pub fn grid(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn start(&self) -> &EigPathSample {
        &self.samples[0]
    }

    pub fn end(&self) -> &EigPathSample {
        self.samples.last().expect("paths have at least two samples")
    }

    pub fn num_blocks(&self) -> usize {
        self.partition.num_blocks()
    }

    /// `‖Ũ_j − U_j‖_F` between the endpoint bases.
    pub fn endpoint_distance(&self, j: usize) -> f64 {
        (&self.end().basis_blocks[j] - &self.start().basis_blocks[j]).frobenius_norm()
    }

    /// The same path with block `j` listed first, others in original order.
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
            samples: self
                .samples
                .iter()
                .map(|s| EigPathSample {
                    t: s.t,
                    basis_blocks: pick(&s.basis_blocks),
                    lambda_blocks: pick(&s.lambda_blocks),
                    block_eigs: perm.iter().map(|&i| s.block_eigs[i].clone()).collect(),
                })
                .collect(),
            meta,
        }
    }
}

/// Tracks the block spectral decomposition of `A + tΔA` over `[0, 1]`.
///
/// At `t = 0` block 1 takes the `r_1` largest eigenvalues, block 2 the next
/// `r_2`, and so on. At each later grid point the eigenvalues are matched to
/// the previous blocks with [`assign_to_blocks`] and each block basis is
/// rotated within its span by orthogonal Procrustes against the previous
/// sample, which realizes the gauge `U_jᴴ·dU_j/dt = 0` discretely.
pub fn track_eig_path(
    a: &ComplexMatrix,
    da: &ComplexMatrix,
    partition: &BlockPartition,
    options: TrackOptions,
) -> Result<EigPath> {
    a.require_hermitian()?;
    da.require_hermitian()?;
    if a.shape() != da.shape() {
        return Err(Error::Shape(format!(
            "A is {:?} but dA is {:?}",
            a.shape(),
            da.shape()
        )));
    }
    partition.check_dim(a.rows())?;

    let grid = uniform_grid(options.grid_points)?;
    let path = track_on_grid(a, da, partition, &grid, options.grid_points)?;
    if !options.adaptive {
        return Ok(path);
    }
    let gaps: Vec<Vec<f64>> = path.samples.iter().map(|s| block_gaps(&s.block_eigs)).collect();
    let (refined, inserted) = refine_grid(&grid, &gaps);
    if inserted == 0 {
        return Ok(path);
    }
    let mut path = track_on_grid(a, da, partition, &refined, options.grid_points)?;
    path.meta.adaptive_insertions = inserted;
    Ok(path)
}

fn track_on_grid(
    a: &ComplexMatrix,
    da: &ComplexMatrix,
    partition: &BlockPartition,
    grid: &[f64],
    requested: usize,
) -> Result<EigPath> {
    let mut meta = PathMeta::new(requested);
    let da_norm = da.frobenius_norm();
    let mut samples: Vec<EigPathSample> = Vec::with_capacity(grid.len());

    for (i, &t) in grid.iter().enumerate() {
        let at = affine(a, da, t);
        let dec = eigh_sorted(&at)?;
        let norm = dec.eigenvalues[0].abs().max(dec.eigenvalues[dec.dim() - 1].abs());
        meta.norm_scale = meta.norm_scale.max(norm);

        let (basis_blocks, block_eigs) = match samples.last() {
            None => {
                let mut bases = Vec::new();
                let mut eigs = Vec::new();
                for (&start, &r) in partition.offsets().iter().zip(partition.sizes()) {
                    bases.push(dec.basis.column_block(start, r));
                    eigs.push(dec.eigenvalues[start..start + r].to_vec());
                }
                (bases, eigs)
            }
            Some(prev) => {
                let assignment = assign_to_blocks(&prev.block_eigs, &dec.eigenvalues)?;
                let mut bases = Vec::with_capacity(assignment.len());
                let mut eigs = Vec::with_capacity(assignment.len());
                for (j, idx) in assignment.iter().enumerate() {
                    let raw = dec.basis.select_columns(idx);
                    let aligned = align_unchecked(&prev.basis_blocks[j], &raw)?.aligned;
                    meta.gauge.record(&prev.basis_blocks[j], &aligned)?;
                    bases.push(aligned);
                    eigs.push(idx.iter().map(|&q| dec.eigenvalues[q]).collect());
                }
                (bases, eigs)
            }
        };

        let lambda_blocks = basis_blocks
            .iter()
            .map(|u| u.adjoint_mul(&at.matmul(u)).hermitian_part())
            .collect();
        let gaps = block_gaps(&block_eigs);
        flag_ambiguity(&mut meta, i, t, &gaps, norm);
        if let Some(prev) = samples.last() {
            let displacement: Vec<f64> = prev
                .basis_blocks
                .iter()
                .zip(&basis_blocks)
                .map(|(p, q)| (q - p).frobenius_norm())
                .collect();
            let start_gaps = block_gaps(&prev.block_eigs);
            count_continuity(&mut meta, &displacement, t - prev.t, da_norm, &start_gaps);
        }

        samples.push(EigPathSample {
            t,
            basis_blocks,
            lambda_blocks,
            block_eigs,
        });
    }

    Ok(EigPath {
        partition: partition.clone(),
        base: a.clone(),
        direction: da.clone(),
        samples,
        meta,
    })
}
