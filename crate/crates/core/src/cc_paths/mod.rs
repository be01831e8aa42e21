//! Continuous-curvature path primitives and steering.

pub mod fresnel;
pub mod path;
pub mod segment;
pub mod steer;

pub use fresnel::fresnel;
pub use path::{check_curvature_profile, path_curvature_profile, path_length, Path, PathSample, PathViolation};
pub use segment::{clothoid_endpoint, stations, ClothoidError, Direction, PathSegment, SegmentKind};
pub use steer::{cc_steer, CcSteer};
