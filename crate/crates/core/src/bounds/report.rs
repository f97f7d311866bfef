use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

/// Relative slack tolerance used by every inequality check.
pub const SLACK_TOLERANCE: f64 = 1e-8;
/// Below this right-hand side the slack tolerance is applied absolutely.
pub const ABSOLUTE_RHS_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum BoundId {
    HW,
    DK,
    LiSun,
    CombinedAll,
    CombinedSingle,
    CorSinF,
    CorSinOnly,
    TotalB,
    GapLower,
    MVT,
    Mirsky,
    SvdCombinedAll,
    SvdCombinedSingle,
    SvdCorSin,
    SvdGapLower,
    SvdMVT,
}

impl BoundId {
    pub const ALL: [BoundId; 16] = [
        BoundId::HW,
        BoundId::DK,
        BoundId::LiSun,
        BoundId::CombinedAll,
        BoundId::CombinedSingle,
        BoundId::CorSinF,
        BoundId::CorSinOnly,
        BoundId::TotalB,
        BoundId::GapLower,
        BoundId::MVT,
        BoundId::Mirsky,
        BoundId::SvdCombinedAll,
        BoundId::SvdCombinedSingle,
        BoundId::SvdCorSin,
        BoundId::SvdGapLower,
        BoundId::SvdMVT,
    ];
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// One evaluated inequality `lhs <= rhs`.
///
/// Non-finite values serialize as `null`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub bound_id: BoundId,
    pub lhs: f64,
    pub rhs: f64,
    /// False when a hypothesis of the bound fails; `lhs` and `rhs` are still
    /// reported.
    pub applicable: bool,
    pub condition_note: String,
    /// `rhs − lhs`.
    pub slack: f64,
    pub components: BTreeMap<String, f64>,
}

impl BoundReport {
    pub fn new(bound_id: BoundId, lhs: f64, rhs: f64) -> Self {
        Self {
            bound_id,
            lhs,
            rhs,
            applicable: true,
            condition_note: String::new(),
            slack: rhs - lhs,
            components: BTreeMap::new(),
        }
    }

    pub fn with_condition(mut self, holds: bool, note: impl Into<String>) -> Self {
        self.applicable = holds;
        self.condition_note = note.into();
        self
    }

    pub fn component(mut self, name: impl Into<String>, value: f64) -> Self {
        self.components.insert(name.into(), value);
        self
    }

    /// Slack relative to `rhs`, or absolute when `rhs` is below
    /// [`ABSOLUTE_RHS_FLOOR`].
    pub fn relative_slack(&self) -> f64 {
        if self.rhs.abs() < ABSOLUTE_RHS_FLOOR {
            self.slack
        } else {
            self.slack / self.rhs.abs()
        }
    }

    /// Whether the inequality holds within [`SLACK_TOLERANCE`]. Infinite
    /// right-hand sides hold trivially.
    pub fn satisfied(&self) -> bool {
        if self.rhs == f64::INFINITY && self.lhs.is_finite() {
            return true;
        }
        self.relative_slack() >= -SLACK_TOLERANCE
    }

    /// `applicable ⟹ satisfied`.
    pub fn passes(&self) -> bool {
        !self.applicable || self.satisfied()
    }

    /// The same inequality with both sides squared.
    pub fn squared(&self) -> Self {
        let mut out = self.clone();
        out.lhs = self.lhs * self.lhs;
        out.rhs = self.rhs * self.rhs;
        out.slack = out.rhs - out.lhs;
        out
    }
}

/// `‖x − y‖₂²` for equally long vectors.
pub(crate) fn sq_distance(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// `weight²·value²`; an unconstrained (infinite) weight drops the term.
pub(crate) fn weighted(weight: f64, value: f64) -> f64 {
    if weight.is_finite() {
        weight * weight * value * value
    } else {
        0.0
    }
}

/// Label for block `j` (0-based) as shown in reports.
pub(crate) fn block_key(prefix: &str, j: usize) -> String {
    format!("{prefix}[{}]", j + 1)
}
