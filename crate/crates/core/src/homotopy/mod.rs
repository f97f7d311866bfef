//! Gauge-tracked decompositions of `A + tΔA` and `B + tΔB` on a grid over
//! `[0, 1]`, and the gap functionals along them.

mod assign;
mod eig_path;
mod gaps;
mod partition;
mod procrustes;
mod svd_path;
mod tracking;

pub use assign::assign_to_blocks;
pub use eig_path::{track_eig_path, EigPath, EigPathSample};
pub use gaps::{
    block_gaps, gap_profile_eig, gap_profile_svd, pair_gap, GapProfile, SvdGapProfile,
    ZERO_GAP_RELATIVE,
};
pub use partition::BlockPartition;
pub use procrustes::{align_procrustes, Alignment, COLLAPSE_THRESHOLD};
pub use svd_path::{track_svd_path, SvdPath, SvdPathSample};
pub use tracking::{
    gauge_defect, AmbiguityFlag, GaugeResidual, PathMeta, TrackOptions, AMBIGUITY_RELATIVE,
    CONTINUITY_CONSTANT, DEFAULT_GRID_POINTS,
};
