//! Classical and combined perturbation bounds, each evaluated as a
//! [`BoundReport`].

mod eig;
mod report;
mod svd;

pub use eig::{
    combined_all_blocks, combined_single_block, davis_kahan, delta_tilde, endpoint_blocks,
    gap_lower_bound, gap_lower_reports, hoffman_wielandt, li_sun_combined, mvt_check,
    total_bound, BlockEndpoint, DeltaTilde, GapPrediction, SingleBlockReports,
    INVARIANCE_TOLERANCE, PAIRING_TOLERANCE,
};
pub use report::{BoundId, BoundReport, ABSOLUTE_RHS_FLOOR, SLACK_TOLERANCE};
pub use svd::{
    combined_all_svd, combined_single_svd, mirsky, svd_endpoint_blocks, svd_gap_lower_bound,
    svd_gap_lower_reports, svd_mvt_check, SvdBlockEndpoint, SvdGapPrediction,
    SvdSingleBlockReports,
};
