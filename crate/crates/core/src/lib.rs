//! Continuous-curvature target-tree planning for automated parking.
//!
//! The crate builds obstacle-aware trees of backward drive-out paths from a
//! parking spot, plans curvature-continuous paths into them with an anytime
//! RRT* sampler, and checks how well a steering-rate-limited vehicle can
//! follow the result.

pub mod bench;
pub mod cc_paths;
pub mod environment;
pub mod error;
pub mod geometry;
pub mod io;
pub mod planner;
pub mod render;
pub mod target_tree;
pub mod tracking;
