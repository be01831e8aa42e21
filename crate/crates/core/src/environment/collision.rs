use super::polygon::{polygon_distance, polygons_intersect, Aabb, ConvexPolygon};
use crate::cc_paths::{stations, Path};
use crate::geometry::{footprint_at, Point, Pose, VehicleParams};

/// Footprint collision queries against a fixed set of obstacles.
///
/// A uniform grid maps each cell to the obstacles whose bounding boxes touch
/// it. The grid only prunes candidates; every reported contact comes from the
/// exact polygon test, so answers do not depend on the cell size.
#[derive(Debug, Clone)]
pub struct CollisionChecker {
    bounds: Aabb,
    obstacles: Vec<ConvexPolygon>,
    cell: f64,
    nx: usize,
    ny: usize,
    cells: Vec<Vec<u32>>,
}

pub const DEFAULT_CELL_SIZE: f64 = 2.0;

impl CollisionChecker {
    pub fn new(bounds: Aabb, obstacles: Vec<ConvexPolygon>, cell: f64) -> Self {
        assert!(cell > 0.0, "cell size must be positive");
        let nx = ((bounds.width() / cell).ceil() as usize).max(1);
        let ny = ((bounds.height() / cell).ceil() as usize).max(1);
        let mut cells = vec![Vec::new(); nx * ny];
        let mut checker = Self {
            bounds,
            obstacles: Vec::new(),
            cell,
            nx,
            ny,
            cells: Vec::new(),
        };
        for (id, ob) in obstacles.iter().enumerate() {
            if let Some((x0, y0, x1, y1)) = checker.cell_range(ob.aabb()) {
                for iy in y0..=y1 {
                    for ix in x0..=x1 {
                        cells[iy * nx + ix].push(id as u32);
                    }
                }
            }
        }
        checker.cells = cells;
        checker.obstacles = obstacles;
        checker
    }

    pub fn bounds(&self) -> &Aabb {
        &self.bounds
    }

    pub fn obstacles(&self) -> &[ConvexPolygon] {
        &self.obstacles
    }

    fn cell_range(&self, b: &Aabb) -> Option<(usize, usize, usize, usize)> {
        if !b.overlaps(&self.bounds) {
            return None;
        }
        let clamp_x = |v: f64| (((v - self.bounds.min_x) / self.cell).floor().max(0.0) as usize).min(self.nx - 1);
        let clamp_y = |v: f64| (((v - self.bounds.min_y) / self.cell).floor().max(0.0) as usize).min(self.ny - 1);
        Some((clamp_x(b.min_x), clamp_y(b.min_y), clamp_x(b.max_x), clamp_y(b.max_y)))
    }

    fn inside_bounds(&self, corners: &[Point]) -> bool {
        corners.iter().all(|c| self.bounds.contains(*c))
    }

    /// Indexed obstacle test for an arbitrary convex shape inside the bounds.
    pub fn shape_free(&self, shape: &[Point]) -> bool {
        let b = Aabb::of_points(shape);
        let Some((x0, y0, x1, y1)) = self.cell_range(&b) else {
            return true;
        };
        let mut seen: [u32; 16] = [u32::MAX; 16];
        let mut n_seen = 0usize;
        for iy in y0..=y1 {
            for &id in self.cells[iy * self.nx + x0..=iy * self.nx + x1].iter().flatten() {
                if seen[..n_seen.min(16)].contains(&id) {
                    continue;
                }
                if n_seen < 16 {
                    seen[n_seen] = id;
                }
                n_seen += 1;
                let ob = &self.obstacles[id as usize];
                if ob.aabb().overlaps(&b) && polygons_intersect(shape, ob.vertices()) {
                    return false;
                }
            }
        }
        true
    }

    /// Footprint inside the bounds and touching no obstacle.
    pub fn pose_free(&self, params: &VehicleParams, pose: &Pose) -> bool {
        let corners = footprint_at(params, pose);
        self.inside_bounds(&corners) && self.shape_free(&corners)
    }

    /// Same answer as [`pose_free`](Self::pose_free) by testing every obstacle.
    pub fn pose_free_unindexed(&self, params: &VehicleParams, pose: &Pose) -> bool {
        let corners = footprint_at(params, pose);
        self.inside_bounds(&corners)
            && self
                .obstacles
                .iter()
                .all(|o| !polygons_intersect(&corners, o.vertices()))
    }

    /// Every pose sampled at step `ds_col` (ends included) is free.
    pub fn path_free(&self, params: &VehicleParams, path: &Path, ds_col: f64) -> bool {
        assert!(ds_col > 0.0, "collision step must be positive");
        if path.is_empty() {
            return true;
        }
        // Stations are k·ds_col, so halving the step keeps every old sample.
        path.segments.iter().all(|seg| {
            stations(seg.length, ds_col)
                .into_iter()
                .all(|s| self.pose_free(params, &seg.pose_at(s)))
        })
    }

    /// Smallest distance from the footprint to any obstacle; infinite with no
    /// obstacles. Bounds are ignored.
    pub fn clearance(&self, params: &VehicleParams, pose: &Pose) -> f64 {
        let corners = footprint_at(params, pose);
        self.obstacles
            .iter()
            .map(|o| polygon_distance(&corners, o.vertices()))
            .fold(f64::INFINITY, f64::min)
    }
}
