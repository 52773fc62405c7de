//! Topological summaries of point clouds with elastic alignment of
//! persistence landscapes.

pub mod analysis;
pub mod elastic;
pub mod error;
pub mod fpca;
pub mod io;
pub mod landscape;
pub mod par;
pub mod persistence;
pub mod pipeline;
pub mod simgen;

pub use error::{Error, Result};
