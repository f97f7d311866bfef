use serde::Serialize;

use super::report::{block_key, sq_distance, weighted, BoundId, BoundReport};
use crate::error::{Error, Result};
use crate::homotopy::{pair_gap, EigPath, GapProfile};
use crate::matcore::{eigh_sorted, sin_theta, spectral_norm, ComplexMatrix};

/// Residual tolerance, relative to `‖A‖_F`, for accepting a basis as an
/// invariant subspace.
pub const INVARIANCE_TOLERANCE: f64 = 1e-8;
/// Pairing tolerance, relative to `‖Ã‖₂`, for removing `λ(Ũ₁ᴴÃŨ₁)` from
/// `λ(Ã)`.
pub const PAIRING_TOLERANCE: f64 = 1e-9;

fn same_shape(a: &ComplexMatrix, b: &ComplexMatrix, what: &str) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::Shape(format!(
            "{what}: {:?} vs {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(())
}

/// `‖Eig↓(Ã) − Eig↓(A)‖_F ≤ ‖Ã − A‖_F`.
pub fn hoffman_wielandt(a: &ComplexMatrix, at: &ComplexMatrix) -> Result<BoundReport> {
    same_shape(a, at, "Hoffman-Wielandt operands")?;
    let ev = eigh_sorted(a)?.eigenvalues;
    let evt = eigh_sorted(at)?.eigenvalues;
    let lhs = sq_distance(&evt, &ev).sqrt();
    let rhs = (at - a).frobenius_norm();
    Ok(BoundReport::new(BoundId::HW, lhs, rhs))
}

/// Quantities shared by the Davis–Kahan and Li–Sun comparators.
struct SubspacePair {
    block_eigs: Vec<f64>,
    block_eigs_t: Vec<f64>,
    delta: f64,
    sin_fro: f64,
    sin_spec: f64,
    residual: f64,
}

fn block_spectrum(a: &ComplexMatrix, u: &ComplexMatrix) -> Result<Vec<f64>> {
    let au = a.matmul(u);
    let lambda = u.adjoint_mul(&au).hermitian_part();
    let defect = (&au - &u.matmul(&lambda)).frobenius_norm();
    if defect > INVARIANCE_TOLERANCE * a.frobenius_norm().max(f64::MIN_POSITIVE) {
        return Err(Error::NotInvariant { residual: defect });
    }
    Ok(eigh_sorted(&lambda)?.eigenvalues)
}

fn subspace_pair(
    a: &ComplexMatrix,
    at: &ComplexMatrix,
    u1: &ComplexMatrix,
    u1t: &ComplexMatrix,
) -> Result<SubspacePair> {
    same_shape(a, at, "matrices")?;
    a.require_hermitian()?;
    at.require_hermitian()?;
    if u1.rows() != a.rows() {
        return Err(Error::Shape(format!(
            "basis has {} rows but the matrix is {}x{}",
            u1.rows(),
            a.rows(),
            a.cols()
        )));
    }
    let angles = sin_theta(u1, u1t)?;
    let block_eigs = block_spectrum(a, u1)?;
    let block_eigs_t = block_spectrum(at, u1t)?;

    let mut rest = eigh_sorted(at)?.eigenvalues;
    let tolerance = PAIRING_TOLERANCE * rest[0].abs().max(rest[rest.len() - 1].abs());
    for mu in &block_eigs_t {
        let (pos, dist) = rest
            .iter()
            .enumerate()
            .map(|(i, x)| (i, (x - mu).abs()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .expect("block is no larger than the matrix");
        if dist > tolerance {
            return Err(Error::NotInvariant { residual: dist });
        }
        rest.remove(pos);
    }
    let delta = pair_gap(&block_eigs, &rest);
    let residual = (at - a).matmul(u1).frobenius_norm();
    Ok(SubspacePair {
        block_eigs,
        block_eigs_t,
        delta,
        sin_fro: angles.fro,
        sin_spec: angles.spec,
        residual,
    })
}

/// `δ₁₂·‖sinΘ(U₁,Ũ₁)‖_F ≤ ‖(Ã − A)·U₁‖_F`, applicable when `δ₁₂ > 0`.
///
/// `δ₁₂` separates `λ(U₁ᴴAU₁)` from the eigenvalues of `Ã` outside
/// `λ(Ũ₁ᴴÃŨ₁)`. When `U₁` spans the whole space there is nothing to
/// separate from and the left side is zero.
pub fn davis_kahan(
    a: &ComplexMatrix,
    at: &ComplexMatrix,
    u1: &ComplexMatrix,
    u1t: &ComplexMatrix,
) -> Result<BoundReport> {
    let p = subspace_pair(a, at, u1, u1t)?;
    let lhs = if p.delta.is_finite() {
        p.delta * p.sin_fro
    } else {
        0.0
    };
    Ok(BoundReport::new(BoundId::DK, lhs, p.residual)
        .with_condition(p.delta > 0.0, "requires delta_12 > 0")
        .component("delta_12", p.delta)
        .component("sin_theta_fro", p.sin_fro))
}

/// Li–Sun combined form:
/// `(1 − ‖sinΘ‖₂²)·‖Eig↓(Λ̃₁) − Eig↓(Λ₁)‖_F² + δ₁₂²·‖sinΘ‖_F² ≤ ‖(Ã − A)·U₁‖_F²`.
pub fn li_sun_combined(
    a: &ComplexMatrix,
    at: &ComplexMatrix,
    u1: &ComplexMatrix,
    u1t: &ComplexMatrix,
) -> Result<BoundReport> {
    let p = subspace_pair(a, at, u1, u1t)?;
    let eig_term = (1.0 - p.sin_spec * p.sin_spec) * sq_distance(&p.block_eigs_t, &p.block_eigs);
    let sub_term = weighted(p.delta, p.sin_fro);
    Ok(
        BoundReport::new(BoundId::LiSun, eig_term + sub_term, p.residual * p.residual)
            .with_condition(p.delta > 0.0, "requires delta_12 > 0")
            .component("eigenvalue_term", eig_term)
            .component("subspace_term", sub_term)
            .component("delta_12", p.delta),
    )
}

fn check_profile(path: &EigPath, gaps: &GapProfile) -> Result<()> {
    if gaps.num_blocks() != path.num_blocks() {
        return Err(Error::CountMismatch(format!(
            "gap profile has {} blocks, path has {}",
            gaps.num_blocks(),
            path.num_blocks()
        )));
    }
    Ok(())
}

/// Eigenvalue term `‖Eig↓(Ã) − Eig↓(A)‖_F²` from the path endpoints.
fn endpoint_eigenvalue_term(path: &EigPath) -> f64 {
    sq_distance(
        &path.end().pooled_eigenvalues(),
        &path.start().pooled_eigenvalues(),
    )
}

/// `‖Eig↓(Ã) − Eig↓(A)‖_F² + Σ_j δ_{j,min}²·‖Ũ_j − U_j‖_F² ≤ ‖ΔA‖_F²`.
pub fn combined_all_blocks(path: &EigPath, gaps: &GapProfile) -> Result<BoundReport> {
    check_profile(path, gaps)?;
    let eig_term = endpoint_eigenvalue_term(path);
    let mut report = BoundReport::new(BoundId::CombinedAll, 0.0, path.direction.frobenius_norm_sqr())
        .component("eigenvalue_term", eig_term);
    let mut lhs = eig_term;
    for j in 0..path.num_blocks() {
        let term = weighted(gaps.path_minima[j], path.endpoint_distance(j));
        report = report.component(block_key("subspace", j), term);
        lhs += term;
    }
    if path.num_blocks() == 1 {
        report.condition_note = "single block: no subspace terms".into();
    }
    report.lhs = lhs;
    report.slack = report.rhs - lhs;
    Ok(report)
}

/// The three single-block reports: the main bound and its two corollaries.
#[derive(Debug, Clone, Serialize)]
pub struct SingleBlockReports {
    pub main: BoundReport,
    pub cor_sin_f: BoundReport,
    pub cor_sin_only: BoundReport,
}

impl SingleBlockReports {
    pub fn all(&self) -> [&BoundReport; 3] {
        [&self.main, &self.cor_sin_f, &self.cor_sin_only]
    }
}

/// Bounds for block `target` alone, valid when `‖ΔA‖₂ < δ_{target,min}`:
///
/// `(1 − ‖ΔA‖₂/δ)²·‖Eig↓(Λ̃) − Eig↓(Λ)‖_F² + (δ − ‖ΔA‖₂)²·‖Ũ − U‖_F² ≤ ‖ΔA·U‖_F²`,
/// the same with `‖sinΘ(U,Ũ)‖_F` in place of `‖Ũ − U‖_F`, and
/// `‖sinΘ(U,Ũ)‖_F ≤ ‖ΔA·U‖_F / (δ − ‖ΔA‖₂)`.
pub fn combined_single_block(
    path: &EigPath,
    gaps: &GapProfile,
    target: usize,
) -> Result<SingleBlockReports> {
    check_profile(path, gaps)?;
    let delta = gaps.path_minima[target];
    let eps = spectral_norm(&path.direction)?;
    let u = &path.start().basis_blocks[target];
    let ut = &path.end().basis_blocks[target];
    let rhs = path.direction.matmul(u).frobenius_norm_sqr();
    let eig_diff = sq_distance(
        &path.end().block_eigs[target],
        &path.start().block_eigs[target],
    );
    let distance = path.endpoint_distance(target);
    let sin_fro = sin_theta(u, ut)?.fro;

    let holds = eps < delta;
    let note = format!("requires ||dA||_2 < delta_min of block {}", target + 1);
    let eig_term = if eig_diff == 0.0 {
        0.0
    } else {
        (1.0 - eps / delta).powi(2) * eig_diff
    };
    let margin = delta - eps;
    let build = |id: BoundId, sub_term: f64| {
        BoundReport::new(id, eig_term + sub_term, rhs)
            .with_condition(holds, note.clone())
            .component("eigenvalue_term", eig_term)
            .component("subspace_term", sub_term)
            .component("delta_min", delta)
            .component("perturbation_norm_2", eps)
    };
    let main = build(BoundId::CombinedSingle, weighted(margin, distance));
    let cor_sin_f = build(BoundId::CorSinF, weighted(margin, sin_fro));
    let cor_sin_only = BoundReport::new(BoundId::CorSinOnly, sin_fro, rhs.sqrt() / margin)
        .with_condition(holds, note)
        .component("delta_min", delta)
        .component("perturbation_norm_2", eps);
    Ok(SingleBlockReports {
        main,
        cor_sin_f,
        cor_sin_only,
    })
}

/// `δ̃_j` built from the mixed gap between `λ(Λ_j)` and `∪_{i≠j} λ(Λ̃_i)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaTilde {
    /// `δ̃_j`, zero where `δ̃_j²` came out negative.
    pub per_block: Vec<f64>,
    /// `δ_j = min |λ₁ − λ₂|`, `λ₁ ∈ λ(Λ_j)`, `λ₂ ∈ ∪_{i≠j} λ(Λ̃_i)`.
    pub mixed_gap: Vec<f64>,
    /// `‖Eig↓(Λ_j(1)) − Eig↓(Λ_j(0))‖_F²`.
    pub eigen_shift: Vec<f64>,
    /// Blocks whose `δ̃_j²` was negative.
    pub dropped: Vec<usize>,
}

pub fn delta_tilde(path: &EigPath) -> DeltaTilde {
    let (start, end) = (path.start(), path.end());
    let k = path.num_blocks();
    let mut out = DeltaTilde {
        per_block: Vec::with_capacity(k),
        mixed_gap: Vec::with_capacity(k),
        eigen_shift: Vec::with_capacity(k),
        dropped: Vec::new(),
    };
    for j in 0..k {
        let others: Vec<f64> = (0..k)
            .filter(|&i| i != j)
            .flat_map(|i| end.block_eigs[i].iter().copied())
            .collect();
        let gap = pair_gap(&start.block_eigs[j], &others);
        let shift = sq_distance(&end.block_eigs[j], &start.block_eigs[j]);
        let squared = gap * gap - shift;
        if squared < 0.0 {
            out.dropped.push(j);
        }
        out.per_block.push(squared.max(0.0).sqrt());
        out.mixed_gap.push(gap);
        out.eigen_shift.push(shift);
    }
    out
}

/// `‖Eig↓(Ã) − Eig↓(A)‖_F² + Σ_j δ̃_j²·‖sinΘ(U_j,Ũ_j)‖₂² ≤ ‖ΔA‖_F²`.
pub fn total_bound(path: &EigPath) -> Result<BoundReport> {
    let tilde = delta_tilde(path);
    let eig_term = endpoint_eigenvalue_term(path);
    let mut report = BoundReport::new(BoundId::TotalB, 0.0, path.direction.frobenius_norm_sqr())
        .component("eigenvalue_term", eig_term);
    let mut lhs = eig_term;
    for j in 0..path.num_blocks() {
        let sin_spec = sin_theta(&path.start().basis_blocks[j], &path.end().basis_blocks[j])?.spec;
        let term = weighted(tilde.per_block[j], sin_spec);
        report = report
            .component(block_key("subspace", j), term)
            .component(block_key("delta_tilde", j), tilde.per_block[j]);
        lhs += term;
    }
    if !tilde.dropped.is_empty() {
        let blocks: Vec<String> = tilde.dropped.iter().map(|j| (j + 1).to_string()).collect();
        report.condition_note = format!(
            "negative delta_tilde^2 for block(s) {}; term dropped",
            blocks.join(",")
        );
    }
    report.lhs = lhs;
    report.slack = report.rhs - lhs;
    Ok(report)
}

/// Predicted lower bound on a block's path-minimum gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapPrediction {
    pub gap_at_zero: f64,
    /// `δ_j(0) − 2‖ΔA‖₂`.
    pub lower_bound: f64,
    /// `2‖ΔA‖₂ < δ_j(0)`.
    pub condition_holds: bool,
}

pub fn gap_lower_bound(gaps_at_zero: &[f64], perturbation_norm_2: f64) -> Vec<GapPrediction> {
    gaps_at_zero
        .iter()
        .map(|&g| GapPrediction {
            gap_at_zero: g,
            lower_bound: g - 2.0 * perturbation_norm_2,
            condition_holds: 2.0 * perturbation_norm_2 < g,
        })
        .collect()
}

/// Compares each prediction (lhs) with the tracked minimum (rhs).
/// Unconstrained single-block gaps are reported as inapplicable.
pub fn gap_lower_reports(predictions: &[GapPrediction], gaps: &GapProfile) -> Vec<BoundReport> {
    predictions
        .iter()
        .zip(&gaps.path_minima)
        .enumerate()
        .map(|(j, (p, &tracked))| {
            let (holds, note) = if p.gap_at_zero.is_infinite() {
                (false, "single block: gap unconstrained".to_string())
            } else {
                (p.condition_holds, format!("requires 2||dA||_2 < delta_{}(0)", j + 1))
            };
            BoundReport::new(BoundId::GapLower, p.lower_bound, tracked)
                .with_condition(holds, note)
                .component("block", (j + 1) as f64)
                .component("gap_at_zero", p.gap_at_zero)
        })
        .collect()
}

/// Checkable form of the mean-value bound for block `target`:
/// `‖Eig↓(Λ̃) − Eig↓(Λ)‖_F² + δ_{min}²·‖Ũ − U‖_F² ≤ max_i ‖ΔA·U(t_i)‖_F²`.
pub fn mvt_check(path: &EigPath, gaps: &GapProfile, target: usize) -> Result<BoundReport> {
    check_profile(path, gaps)?;
    let eig_term = sq_distance(
        &path.end().block_eigs[target],
        &path.start().block_eigs[target],
    );
    let sub_term = weighted(gaps.path_minima[target], path.endpoint_distance(target));
    let (mut rhs, mut t_max) = (0.0f64, 0.0);
    for s in &path.samples {
        let v = path.direction.matmul(&s.basis_blocks[target]).frobenius_norm_sqr();
        if v > rhs {
            rhs = v;
            t_max = s.t;
        }
    }
    Ok(BoundReport::new(BoundId::MVT, eig_term + sub_term, rhs)
        .component("eigenvalue_term", eig_term)
        .component("subspace_term", sub_term)
        .component("t_max", t_max))
}

/// Endpoint basis distance and canonical angles of one block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockEndpoint {
    /// `‖Ũ_j − U_j‖_F`.
    pub distance: f64,
    pub sin_theta_fro: f64,
    pub sin_theta_spec: f64,
}

pub fn endpoint_blocks(path: &EigPath) -> Result<Vec<BlockEndpoint>> {
    (0..path.num_blocks())
        .map(|j| {
            let s = sin_theta(&path.start().basis_blocks[j], &path.end().basis_blocks[j])?;
            Ok(BlockEndpoint {
                distance: path.endpoint_distance(j),
                sin_theta_fro: s.fro,
                sin_theta_spec: s.spec,
            })
        })
        .collect()
}
