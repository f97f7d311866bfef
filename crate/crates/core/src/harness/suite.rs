use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::generate::{
    clustered_spectrum, gen_problem, random_partition, uniform, ProblemKind, ProblemSpec,
};
use crate::bounds::{BoundId, BoundReport, ABSOLUTE_RHS_FLOOR};
use crate::error::{Error, Result};
use crate::homotopy::{block_gaps, BlockPartition, TrackOptions};
use crate::matcore::{eigh_sorted, spectral_norm, svd_sorted, ComplexMatrix};
use crate::pipeline::{verify_eig, verify_svd, VerifyOptions};

/// Allowance, relative to the classical right-hand side, when comparing the
/// slack of a combined bound with its classical counterpart.
pub const DOMINANCE_TOLERANCE: f64 = 1e-12;
/// Agreement required between a single-block combined bound and the
/// classical bound it reduces to.
pub const REDUCTION_TOLERANCE: f64 = 1e-12;
/// `‖Ũ_j − U_j‖_F ≥ ‖sinΘ‖_F − ESIN_TOLERANCE`.
pub const ESIN_TOLERANCE: f64 = 1e-10;
/// Tracked gap minima may undershoot their predicted lower bound by this.
pub const GAP_PREDICTION_TOLERANCE: f64 = 1e-9;
/// Per-step tolerance of the discrete gauge check.
pub const GAUGE_TOLERANCE: f64 = 1e-8;

pub const CHECK_DOMINANCE: &str = "dominance";
pub const CHECK_ESIN: &str = "esin";
pub const CHECK_REDUCTION: &str = "reduction";
pub const CHECK_GAP_PREDICTION: &str = "gap_prediction";
pub const CHECK_GAUGE: &str = "gauge";

/// How the perturbation size is chosen per trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Regime {
    /// `‖Δ‖₂ = f·bound` with `f` drawn from `fraction`, where `bound` is
    /// `min_j δ_j(0)/4` (Hermitian) or `min_j min{ρ_j(0)/4, σ_{j,min}(0)/3}`
    /// (general). The single-block hypotheses then hold with a 2x margin.
    Enforced { fraction: [f64; 2] },
    /// `‖Δ‖_F = perturb_norm`, no rescaling.
    Fixed { perturb_norm: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub kind: ProblemKind,
    pub trials: usize,
    pub seed: u64,
    /// Inclusive range of `n`.
    pub n_range: [usize; 2],
    /// General problems draw `m − n` from `0..=extra_rows`.
    pub extra_rows: usize,
    pub max_blocks: usize,
    /// Range of the spacing between consecutive blocks of the spectrum.
    pub gap_range: [f64; 2],
    /// Spread of the values inside one block.
    pub cluster_width: f64,
    pub regime: Regime,
    pub grid_points: usize,
    pub adaptive: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            kind: ProblemKind::Hermitian,
            trials: 200,
            seed: 0,
            n_range: [2, 10],
            extra_rows: 3,
            max_blocks: 4,
            gap_range: [0.5, 3.0],
            cluster_width: 0.5,
            regime: Regime::Enforced {
                fraction: [0.25, 1.0],
            },
            grid_points: 1025,
            adaptive: true,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        let [lo, hi] = self.n_range;
        if lo == 0 || lo > hi {
            return Err(Error::InvalidSpec(format!("bad size range [{lo}, {hi}]")));
        }
        if self.max_blocks == 0 {
            return Err(Error::InvalidSpec("max_blocks must be positive".into()));
        }
        let [g0, g1] = self.gap_range;
        if !(g0.is_finite() && g1.is_finite() && g0 > 0.0 && g0 <= g1) {
            return Err(Error::InvalidSpec(format!("bad gap range [{g0}, {g1}]")));
        }
        if !(self.cluster_width.is_finite() && self.cluster_width >= 0.0) {
            return Err(Error::InvalidSpec("cluster width must be nonnegative".into()));
        }
        match self.regime {
            Regime::Enforced { fraction: [f0, f1] } => {
                if !(f0 > 0.0 && f0 <= f1 && f1 <= 1.0) {
                    return Err(Error::InvalidSpec(format!(
                        "regime fraction must satisfy 0 < lo <= hi <= 1, got [{f0}, {f1}]"
                    )));
                }
            }
            Regime::Fixed { perturb_norm } => {
                if !(perturb_norm.is_finite() && perturb_norm >= 0.0) {
                    return Err(Error::InvalidSpec("perturb_norm must be nonnegative".into()));
                }
            }
        }
        if self.grid_points < 2 {
            return Err(Error::InvalidSpec("grid needs at least 2 points".into()));
        }
        Ok(())
    }

    fn verify_options(&self) -> VerifyOptions {
        VerifyOptions {
            track: TrackOptions {
                grid_points: self.grid_points,
                adaptive: self.adaptive,
            },
            target_block: None,
        }
    }
}

/// Per-bound summary; minima are over applicable reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundTally {
    pub evaluated: usize,
    pub applicable: usize,
    pub satisfied: usize,
    pub min_slack: f64,
    pub min_relative_slack: f64,
}

impl Default for BoundTally {
    fn default() -> Self {
        Self {
            evaluated: 0,
            applicable: 0,
            satisfied: 0,
            min_slack: f64::INFINITY,
            min_relative_slack: f64::INFINITY,
        }
    }
}

impl BoundTally {
    fn add(&mut self, r: &BoundReport) {
        self.evaluated += 1;
        if !r.applicable {
            return;
        }
        self.applicable += 1;
        self.satisfied += usize::from(r.satisfied());
        self.min_slack = self.min_slack.min(r.slack);
        self.min_relative_slack = self.min_relative_slack.min(r.relative_slack());
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CheckTally {
    pub checked: usize,
    pub passed: usize,
}

impl CheckTally {
    pub fn all_passed(&self) -> bool {
        self.checked == self.passed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub trial: usize,
    pub seed: u64,
    pub bound_id: BoundId,
    pub block: Option<usize>,
    pub lhs: f64,
    pub rhs: f64,
    pub relative_slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckFailure {
    pub trial: usize,
    pub seed: u64,
    pub check: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialFailure {
    pub trial: usize,
    pub seed: u64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub trials: usize,
    pub completed: usize,
    /// Trials with a single block (square ones for general suites).
    pub single_block_trials: usize,
    pub tallies: BTreeMap<BoundId, BoundTally>,
    pub checks: BTreeMap<String, CheckTally>,
    pub block_ambiguity_flags: usize,
    pub continuity_flags: usize,
    pub adaptive_insertions: usize,
    pub violations: Vec<Violation>,
    pub check_failures: Vec<CheckFailure>,
    pub failures: Vec<TrialFailure>,
    pub wall_time_seconds: f64,
}

impl SuiteReport {
    /// Every trial ran, every applicable bound held and every check passed.
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
            && self.violations.is_empty()
            && self.check_failures.is_empty()
            && self.tallies.values().all(|t| t.satisfied == t.applicable)
    }

    pub fn check(&self, name: &str) -> CheckTally {
        self.checks.get(name).copied().unwrap_or_default()
    }

    /// Copy with the wall time zeroed, for comparing runs.
    pub fn without_timing(&self) -> Self {
        Self {
            wall_time_seconds: 0.0,
            ..self.clone()
        }
    }
}

struct CheckResult {
    name: &'static str,
    passed: bool,
    detail: String,
}

impl CheckResult {
    fn new(name: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name,
            passed,
            detail: detail.into(),
        }
    }
}

struct TrialOutcome {
    reports: Vec<BoundReport>,
    checks: Vec<CheckResult>,
    single_block: bool,
    ambiguity_flags: usize,
    continuity_flags: usize,
    adaptive_insertions: usize,
}

/// Seed of trial `index`, independent of execution order.
pub fn trial_seed(suite_seed: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(suite_seed);
    rng.set_stream(index as u64);
    rng.gen()
}

/// Runs the suite, in parallel when the `parallel` feature is enabled.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    #[cfg(feature = "parallel")]
    {
        run_suite_parallel(config)
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_suite_sequential(config)
    }
}

pub fn run_suite_sequential(config: &SuiteConfig) -> Result<SuiteReport> {
    config.validate()?;
    let started = Instant::now();
    let outcomes = (0..config.trials)
        .map(|i| {
            let seed = trial_seed(config.seed, i);
            (seed, run_trial(config, seed))
        })
        .collect();
    Ok(merge(config, outcomes, started))
}

#[cfg(feature = "parallel")]
pub fn run_suite_parallel(config: &SuiteConfig) -> Result<SuiteReport> {
    use rayon::prelude::*;

    config.validate()?;
    let started = Instant::now();
    let outcomes = (0..config.trials)
        .into_par_iter()
        .map(|i| {
            let seed = trial_seed(config.seed, i);
            (seed, run_trial(config, seed))
        })
        .collect();
    Ok(merge(config, outcomes, started))
}

fn merge(
    config: &SuiteConfig,
    outcomes: Vec<(u64, Result<TrialOutcome>)>,
    started: Instant,
) -> SuiteReport {
    let mut report = SuiteReport {
        config: config.clone(),
        trials: config.trials,
        completed: 0,
        single_block_trials: 0,
        tallies: BTreeMap::new(),
        checks: BTreeMap::new(),
        block_ambiguity_flags: 0,
        continuity_flags: 0,
        adaptive_insertions: 0,
        violations: Vec::new(),
        check_failures: Vec::new(),
        failures: Vec::new(),
        wall_time_seconds: 0.0,
    };
    for (trial, (seed, outcome)) in outcomes.into_iter().enumerate() {
        let outcome = match outcome {
            Ok(o) => o,
            Err(e) => {
                report.failures.push(TrialFailure {
                    trial,
                    seed,
                    error: e.to_string(),
                });
                continue;
            }
        };
        report.completed += 1;
        report.single_block_trials += usize::from(outcome.single_block);
        report.block_ambiguity_flags += outcome.ambiguity_flags;
        report.continuity_flags += outcome.continuity_flags;
        report.adaptive_insertions += outcome.adaptive_insertions;
        for r in &outcome.reports {
            report.tallies.entry(r.bound_id).or_default().add(r);
            if r.applicable && !r.satisfied() {
                report.violations.push(Violation {
                    trial,
                    seed,
                    bound_id: r.bound_id,
                    block: r.components.get("block").map(|&b| b as usize),
                    lhs: r.lhs,
                    rhs: r.rhs,
                    relative_slack: r.relative_slack(),
                });
            }
        }
        for c in outcome.checks {
            let tally = report.checks.entry(c.name.to_string()).or_default();
            tally.checked += 1;
            tally.passed += usize::from(c.passed);
            if !c.passed {
                report.check_failures.push(CheckFailure {
                    trial,
                    seed,
                    check: c.name.to_string(),
                    detail: c.detail,
                });
            }
        }
    }
    report.wall_time_seconds = started.elapsed().as_secs_f64();
    report
}

/// Problem drawn for one trial, before the regime is applied.
pub fn trial_problem(config: &SuiteConfig, seed: u64) -> Result<ProblemSpec> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let [lo, hi] = config.n_range;
    let n = rng.gen_range(lo..=hi);
    let m = match config.kind {
        ProblemKind::Hermitian => None,
        ProblemKind::General => Some(n + rng.gen_range(0..=config.extra_rows)),
    };
    let partition = random_partition(&mut rng, n, config.max_blocks);
    let floor = match config.kind {
        ProblemKind::Hermitian => uniform(&mut rng, [-3.0, 1.0]),
        ProblemKind::General => uniform(&mut rng, config.gap_range),
    };
    let spectrum_plan =
        clustered_spectrum(&mut rng, &partition, config.gap_range, config.cluster_width, floor);
    let perturb_norm = match config.regime {
        Regime::Enforced { .. } => 1.0,
        Regime::Fixed { perturb_norm } => perturb_norm,
    };
    Ok(ProblemSpec {
        kind: config.kind,
        n,
        m,
        partition,
        spectrum_plan,
        perturb_norm,
        seed: rng.gen(),
    })
}

/// Generated trial matrices with the regime applied.
pub fn trial_matrices(
    config: &SuiteConfig,
    seed: u64,
) -> Result<(ProblemSpec, ComplexMatrix, ComplexMatrix)> {
    let spec = trial_problem(config, seed)?;
    let (base, delta) = gen_problem(&spec)?;
    let Regime::Enforced { fraction } = config.regime else {
        return Ok((spec, base, delta));
    };
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(1);
    let f = uniform(&mut rng, fraction);
    let bound = match config.kind {
        ProblemKind::Hermitian => hermitian_regime_bound(&base, &spec.partition)?,
        ProblemKind::General => svd_regime_bound(&base, &spec.partition)?,
    };
    let target = f * bound;
    let delta = delta.scale(target / spectral_norm(&delta)?);
    let spec = ProblemSpec {
        perturb_norm: delta.frobenius_norm(),
        ..spec
    };
    Ok((spec, base, delta))
}

fn split(values: &[f64], partition: &BlockPartition) -> Vec<Vec<f64>> {
    partition
        .offsets()
        .iter()
        .zip(partition.sizes())
        .map(|(&s, &r)| values[s..s + r].to_vec())
        .collect()
}

/// `min_j δ_j(0)/4`, or `max(‖A‖₂, 1)/4` for a single block.
fn hermitian_regime_bound(a: &ComplexMatrix, partition: &BlockPartition) -> Result<f64> {
    let eig = eigh_sorted(a)?;
    let gaps = block_gaps(&split(&eig.eigenvalues, partition));
    let min_gap = gaps.into_iter().fold(f64::INFINITY, f64::min);
    if min_gap.is_finite() {
        Ok(min_gap / 4.0)
    } else {
        let scale = eig.eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        Ok(scale.max(1.0) / 4.0)
    }
}

/// `min_j min{ρ_j(0)/4, σ_{j,min}(0)/3}`.
fn svd_regime_bound(b: &ComplexMatrix, partition: &BlockPartition) -> Result<f64> {
    let svd = svd_sorted(b)?;
    let blocks = split(&svd.singulars, partition);
    let rho = block_gaps(&blocks);
    Ok(blocks
        .iter()
        .zip(rho)
        .map(|(s, r)| (r / 4.0).min(s.last().copied().unwrap_or(0.0) / 3.0))
        .fold(f64::INFINITY, f64::min))
}

fn run_trial(config: &SuiteConfig, seed: u64) -> Result<TrialOutcome> {
    let (spec, base, delta) = trial_matrices(config, seed)?;
    match config.kind {
        ProblemKind::Hermitian => hermitian_trial(config, &spec.partition, &base, &delta),
        ProblemKind::General => general_trial(config, &spec.partition, &base, &delta),
    }
}

fn agree(x: f64, y: f64) -> bool {
    (x - y).abs() <= REDUCTION_TOLERANCE * x.abs().max(y.abs()).max(1.0)
}

fn dominance(combined: &BoundReport, classical: &BoundReport) -> CheckResult {
    let allowance = DOMINANCE_TOLERANCE * classical.rhs.abs().max(ABSOLUTE_RHS_FLOOR);
    CheckResult::new(
        CHECK_DOMINANCE,
        combined.slack <= classical.slack + allowance,
        format!(
            "{} slack {:e} exceeds {} squared slack {:e}",
            combined.bound_id, combined.slack, classical.bound_id, classical.slack
        ),
    )
}

fn reduction(combined: &BoundReport, classical: &BoundReport) -> CheckResult {
    CheckResult::new(
        CHECK_REDUCTION,
        agree(combined.lhs, classical.lhs) && agree(combined.rhs, classical.rhs),
        format!(
            "{} (lhs {:e}, rhs {:e}) differs from {} squared (lhs {:e}, rhs {:e})",
            combined.bound_id,
            combined.lhs,
            combined.rhs,
            classical.bound_id,
            classical.lhs,
            classical.rhs
        ),
    )
}

fn esin(block: usize, side: &str, distance: f64, sin_fro: f64) -> CheckResult {
    CheckResult::new(
        CHECK_ESIN,
        distance >= sin_fro - ESIN_TOLERANCE,
        format!("block {} {side}: distance {distance:e} < sin theta {sin_fro:e}", block + 1),
    )
}

fn gauge(residual: &crate::homotopy::GaugeResidual) -> CheckResult {
    CheckResult::new(
        CHECK_GAUGE,
        residual.passes(GAUGE_TOLERANCE),
        format!(
            "asymmetry {:e}, min eigenvalue {:e}",
            residual.max_asymmetry, residual.min_eigenvalue
        ),
    )
}

fn required(reports: &[BoundReport], id: BoundId) -> Result<&BoundReport> {
    reports
        .iter()
        .find(|r| r.bound_id == id)
        .ok_or_else(|| Error::InvalidSpec(format!("pipeline produced no {id} report")))
}

fn hermitian_trial(
    config: &SuiteConfig,
    partition: &BlockPartition,
    a: &ComplexMatrix,
    da: &ComplexMatrix,
) -> Result<TrialOutcome> {
    let (_, v) = verify_eig(a, da, partition, config.verify_options())?;
    let hw2 = required(&v.reports, BoundId::HW)?.squared();
    let all = required(&v.reports, BoundId::CombinedAll)?;
    let single_block = partition.num_blocks() == 1;

    let mut checks = vec![dominance(all, &hw2), gauge(&v.grid.gauge)];
    if single_block {
        checks.push(reduction(all, &hw2));
    }
    for (j, e) in v.endpoints.iter().enumerate() {
        checks.push(esin(j, "basis", e.distance, e.sin_theta_fro));
    }
    for (j, p) in v.gap_predictions.iter().enumerate() {
        if p.condition_holds {
            let tracked = v.gaps.path_minima[j];
            checks.push(CheckResult::new(
                CHECK_GAP_PREDICTION,
                tracked >= p.lower_bound - GAP_PREDICTION_TOLERANCE,
                format!("block {}: tracked {tracked:e} < predicted {:e}", j + 1, p.lower_bound),
            ));
        }
    }

    Ok(TrialOutcome {
        checks,
        single_block,
        ambiguity_flags: v.grid.block_ambiguity.len(),
        continuity_flags: v.grid.continuity_flags,
        adaptive_insertions: v.grid.adaptive_insertions,
        reports: v.reports,
    })
}

fn general_trial(
    config: &SuiteConfig,
    partition: &BlockPartition,
    b: &ComplexMatrix,
    db: &ComplexMatrix,
) -> Result<TrialOutcome> {
    let (_, v) = verify_svd(b, db, partition, config.verify_options())?;
    let mirsky2 = required(&v.reports, BoundId::Mirsky)?.squared();
    let all = required(&v.reports, BoundId::SvdCombinedAll)?;
    let single_block = partition.num_blocks() == 1 && v.rows == v.cols;

    let mut checks = vec![dominance(all, &mirsky2), gauge(&v.grid.gauge)];
    if single_block {
        checks.push(reduction(all, &mirsky2));
    }
    for (j, e) in v.endpoints.iter().enumerate() {
        checks.push(esin(j, "left", e.left_distance, e.left_sin_theta_fro));
        checks.push(esin(j, "right", e.right_distance, e.right_sin_theta_fro));
    }
    for (j, p) in v.gap_predictions.iter().enumerate() {
        if p.positive_condition {
            let tracked = v.gaps.rho_hat.path_minima[j];
            checks.push(CheckResult::new(
                CHECK_GAP_PREDICTION,
                tracked > 0.0,
                format!("block {}: tracked rho_hat minimum {tracked:e} is not positive", j + 1),
            ));
        }
    }

    Ok(TrialOutcome {
        checks,
        single_block,
        ambiguity_flags: v.grid.block_ambiguity.len(),
        continuity_flags: v.grid.continuity_flags,
        adaptive_insertions: v.grid.adaptive_insertions,
        reports: v.reports,
    })
}
