//! Obstacles, scenario documents and footprint collision checking.

pub mod collision;
pub mod polygon;
pub mod scenario;

pub use collision::{CollisionChecker, DEFAULT_CELL_SIZE};
pub use polygon::{polygon_distance, polygons_intersect, Aabb, ConvexPolygon};
pub use scenario::{ParkingMode, ParkingSpot, Scenario};
