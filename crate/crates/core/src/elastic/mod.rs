//! Elastic (square-root velocity) alignment of landscapes.

mod dp;
pub mod grid;
mod karcher;
mod srvf;
mod warp;

pub use dp::{dp_align, steps, DpResult, MAX_STEP, SLOPE_MAX};
pub use karcher::{
    align_srvf, center_warps, elastic_distance, karcher_mean, AlignmentResult, KarcherOptions, SrvfAlignment,
    CENTER_TOL, DEFAULT_MAX_ITER, DEFAULT_TOL,
};
pub use srvf::{inverse_srvf, srvf, SrvfCurve, FLAT_SPEED_RTOL};
pub use warp::{compose_landscape, compose_warps, invert_warp, warp_action, warp_from_samples, Warp};
