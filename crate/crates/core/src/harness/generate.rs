use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homotopy::BlockPartition;
use crate::matcore::{thin_qr, ComplexMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Hermitian,
    General,
}

/// Recipe for a seeded test problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    pub n: usize,
    /// Row count for general problems; defaults to `n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    pub partition: BlockPartition,
    /// Eigenvalues (Hermitian) or singular values (general) of the base.
    pub spectrum_plan: Vec<f64>,
    /// Frobenius norm of the generated perturbation.
    pub perturb_norm: f64,
    pub seed: u64,
}

impl ProblemSpec {
    pub fn rows(&self) -> usize {
        match self.kind {
            ProblemKind::Hermitian => self.n,
            ProblemKind::General => self.m.unwrap_or(self.n),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidSpec("dimension must be positive".into()));
        }
        self.partition.check_dim(self.n)?;
        if self.spectrum_plan.len() != self.n {
            return Err(Error::CountMismatch(format!(
                "spectrum plan has {} values for dimension {}",
                self.spectrum_plan.len(),
                self.n
            )));
        }
        if self.spectrum_plan.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec("spectrum plan must be finite".into()));
        }
        if !(self.perturb_norm.is_finite() && self.perturb_norm >= 0.0) {
            return Err(Error::InvalidSpec(format!(
                "perturbation norm must be finite and nonnegative, got {}",
                self.perturb_norm
            )));
        }
        match self.kind {
            ProblemKind::Hermitian => {
                if self.m.is_some_and(|m| m != self.n) {
                    return Err(Error::Shape("Hermitian problems are square".into()));
                }
            }
            ProblemKind::General => {
                if self.rows() < self.n {
                    return Err(Error::Shape(format!(
                        "general problems need m >= n, got {}x{}",
                        self.rows(),
                        self.n
                    )));
                }
                if self.spectrum_plan.iter().any(|&s| s < 0.0) {
                    return Err(Error::InvalidSpec("singular values must be nonnegative".into()));
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn complex_gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re, im)
    })
}

/// Haar-distributed `n x n` unitary: QR of a complex Gaussian with the
/// phases of `R`'s diagonal moved into `Q`.
pub fn haar_unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let (mut q, r) = thin_qr(&complex_gaussian(rng, n, n));
    for j in 0..n {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            for i in 0..n {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

fn scaled_to(m: ComplexMatrix, fro: f64) -> ComplexMatrix {
    if fro == 0.0 {
        return ComplexMatrix::zeros(m.rows(), m.cols());
    }
    m.scale(fro / m.frobenius_norm())
}

/// Base matrix and perturbation described by `spec`. Deterministic in the
/// spec.
pub fn gen_problem(spec: &ProblemSpec) -> Result<(ComplexMatrix, ComplexMatrix)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n;
    match spec.kind {
        ProblemKind::Hermitian => {
            let q = haar_unitary(&mut rng, n);
            let base = q
                .matmul(&ComplexMatrix::from_real_diagonal(&spec.spectrum_plan))
                .matmul(&q.adjoint())
                .hermitian_part();
            let delta = complex_gaussian(&mut rng, n, n).hermitian_part();
            Ok((base, scaled_to(delta, spec.perturb_norm)))
        }
        ProblemKind::General => {
            let m = spec.rows();
            let w = haar_unitary(&mut rng, m);
            let v = haar_unitary(&mut rng, n);
            let base = w
                .matmul(&ComplexMatrix::rectangular_diagonal(m, n, &spec.spectrum_plan))
                .matmul(&v.adjoint());
            let delta = complex_gaussian(&mut rng, m, n);
            Ok((base, scaled_to(delta, spec.perturb_norm)))
        }
    }
}

/// Random composition of `n` into at most `max_blocks` positive parts.
pub fn random_partition<R: Rng>(rng: &mut R, n: usize, max_blocks: usize) -> BlockPartition {
    let k = rng.gen_range(1..=max_blocks.clamp(1, n));
    let mut cuts: Vec<usize> = rand::seq::index::sample(rng, n - 1, k - 1)
        .into_iter()
        .map(|c| c + 1)
        .collect();
    cuts.sort_unstable();
    cuts.push(n);
    let mut prev = 0;
    let sizes = cuts
        .into_iter()
        .map(|c| {
            let r = c - prev;
            prev = c;
            r
        })
        .collect();
    BlockPartition::new(sizes).expect("cuts are strictly increasing")
}

/// Nonincreasing spectrum grouped by `partition`: each block spans at most
/// `cluster_width`, consecutive blocks are separated by a gap drawn from
/// `gap_range`, and the smallest value is `floor`.
pub fn clustered_spectrum<R: Rng>(
    rng: &mut R,
    partition: &BlockPartition,
    gap_range: [f64; 2],
    cluster_width: f64,
    floor: f64,
) -> Vec<f64> {
    let mut values = Vec::with_capacity(partition.dim());
    let mut level = floor;
    for (j, &r) in partition.sizes().iter().enumerate().rev() {
        if j + 1 < partition.num_blocks() {
            level += uniform(rng, gap_range);
        }
        for i in 0..r {
            if i > 0 {
                level += rng.gen::<f64>() * cluster_width / r as f64;
            }
            values.push(level);
        }
    }
    values.reverse();
    values
}

pub(crate) fn uniform<R: Rng>(rng: &mut R, range: [f64; 2]) -> f64 {
    if range[1] > range[0] {
        rng.gen_range(range[0]..range[1])
    } else {
        range[0]
    }
}
