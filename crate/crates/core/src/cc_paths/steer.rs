//! Exact continuous-curvature steering between two poses.
//!
//! Paths are built from CC turns: a clothoid from zero to maximum curvature,
//! an arc, and a clothoid back to zero. Every CC turn keeps the pose on a fixed
//! circle around its turning center, so the entry and exit poses of a turn
//! are tied to that center by constant offsets. Words of up to three turns or
//! turn-straight-turn are solved in closed form on those centers, sorted by
//! length, and the shortest one that reaches the goal is returned. Poses with
//! non-zero curvature get a clothoid prefix or suffix that brings the
//! curvature to zero first.

use std::f64::consts::TAU;
use std::ops::{Add, Sub};

use super::fresnel::clothoid_integrals;
use super::path::Path;
use super::segment::{clothoid_endpoint, Direction, PathSegment};
use crate::geometry::{angle_diff, Point, Pose, VehicleParams};

const ENDPOINT_TOL: f64 = 1e-6;
const CENTER_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Piece {
    Turn { side: f64, dir: Direction, delta: f64 },
    Line { dir: Direction, len: f64 },
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    length: f64,
    prefix: Option<Direction>,
    suffix: Option<Direction>,
    pieces: [Piece; 3],
    n: usize,
}

/// Precomputed CC-turn geometry for one set of vehicle limits.
#[derive(Debug, Clone, Copy)]
pub struct CcSteer {
    kappa: f64,
    sigma: f64,
    /// Turning center in the frame of a forward-left entry pose.
    xc: f64,
    yc: f64,
    r: f64,
    mu: f64,
    delta_min: f64,
    max_switches: usize,
    /// Indexed by [first side][d1][d2][d3].
    links: [[[[Links; 2]; 2]; 2]; 2],
}

impl CcSteer {
    pub fn new(params: &VehicleParams, max_switches: usize) -> Self {
        let kappa = params.kappa_max;
        let sigma = params.sigma_max;
        let cl = clothoid_endpoint(sigma, kappa).expect("positive limits");
        let xc = cl.x - cl.theta.sin() / kappa;
        let yc = cl.y + cl.theta.cos() / kappa;
        let mut s = Self {
            kappa,
            sigma,
            xc,
            yc,
            r: xc.hypot(yc),
            mu: (xc / yc).atan(),
            delta_min: kappa * kappa / sigma,
            max_switches,
            links: Default::default(),
        };
        let dirs = [Direction::Forward, Direction::Backward];
        for (i1, s1) in [1.0, -1.0].into_iter().enumerate() {
            for (j1, &d1) in dirs.iter().enumerate() {
                for (j2, &d2) in dirs.iter().enumerate() {
                    for (j3, &d3) in dirs.iter().enumerate() {
                        let j12 = s.entry_offset(-s1, d2).sub(s.exit_offset(s1, d1));
                        let j23 = s.entry_offset(s1, d3).sub(s.exit_offset(-s1, d2));
                        s.links[i1][j1][j2][j3] = Links {
                            ra: j12.norm(),
                            rb: j23.norm(),
                            a12: j12.y.atan2(j12.x),
                            a23: j23.y.atan2(j23.x),
                        };
                    }
                }
            }
        }
        s
    }

    /// Radius of the circle the entry and exit poses of every turn lie on.
    pub fn outer_radius(&self) -> f64 {
        self.r
    }

    /// Turning center of a turn entered at the pose, in that pose's frame.
    fn entry_offset(&self, side: f64, dir: Direction) -> Point {
        Point::new(dir.sign() * self.xc, side * self.yc)
    }

    /// Turning center of a turn left at the pose, in that pose's frame.
    fn exit_offset(&self, side: f64, dir: Direction) -> Point {
        Point::new(-dir.sign() * self.xc, side * self.yc)
    }

    /// Length of a CC turn with deflection `delta ∈ [0, 2π)`.
    fn turn_length(&self, delta: f64) -> Option<f64> {
        if delta == 0.0 {
            Some(2.0 * self.xc)
        } else if delta >= self.delta_min {
            Some(2.0 * self.kappa / self.sigma + (delta - self.delta_min) / self.kappa)
        } else {
            self.elementary(delta).map(|(_, lambda)| 2.0 * lambda)
        }
    }

    /// Symmetric clothoid pair for small deflections: `(sharpness, half length)`.
    fn elementary(&self, delta: f64) -> Option<(f64, f64)> {
        let (x1, y1) = clothoid_integrals(0.0, 0.0, 0.5 * delta, 1.0);
        let half = 0.5 * delta;
        let proj = x1 * half.cos() + y1 * half.sin();
        let chord = 2.0 * self.r * (self.mu + half).sin();
        let lambda = chord / (2.0 * proj);
        let sig = delta / (lambda * lambda);
        let kap = delta / lambda;
        if sig > self.sigma * (1.0 + 1e-9) || kap > self.kappa * (1.0 + 1e-9) {
            return None;
        }
        Some((sig, lambda))
    }

    fn push_turn(&self, path: &mut Path, start: Pose, side: f64, dir: Direction, delta: f64) -> Pose {
        if delta == 0.0 {
            let seg = PathSegment::straight(start, 2.0 * self.xc, dir);
            path.push(seg);
            return seg.end_pose();
        }
        let (sig, lam, arc) = if delta >= self.delta_min {
            (
                self.sigma,
                self.kappa / self.sigma,
                (delta - self.delta_min) / self.kappa,
            )
        } else {
            let (sig, lam) = self.elementary(delta).expect("checked during enumeration");
            (sig, lam, 0.0)
        };
        let k = sig * lam;
        let a = PathSegment::clothoid(start, 0.0, side * sig, lam, dir);
        let mut p = a.end_pose();
        path.push(a);
        if arc > 0.0 {
            let b = PathSegment::arc(p, side * k, arc, dir);
            p = b.end_pose();
            path.push(b);
        }
        let c = PathSegment::clothoid(p, side * k, -side * sig, lam, dir);
        path.push(c);
        c.end_pose().with_kappa(0.0)
    }

    /// Shortest continuous-curvature path from `from` to `to`, or `None` when
    /// no word of the family connects them within the switch limit.
    pub fn steer(&self, from: Pose, to: Pose) -> Option<Path> {
        self.steer_within(from, to, f64::INFINITY)
    }

    /// Like [`steer`](Self::steer), but gives up when the shortest connection
    /// is longer than `max_length`.
    pub fn steer_within(&self, from: Pose, to: Pose, max_length: f64) -> Option<Path> {
        if from.approx_eq(&to, 1e-12) && (from.kappa - to.kappa).abs() < 1e-12 {
            return Some(Path::new());
        }
        let prefixes = self.curvature_ramps(from, true);
        let suffixes = self.curvature_ramps(to, false);
        let mut cands: Vec<Candidate> = Vec::with_capacity(256);
        for &(pdir, pstart, plen) in &prefixes {
            for &(sdir, sgoal, slen) in &suffixes {
                self.enumerate(pstart, sgoal, &mut |pieces: &[Piece]| {
                    let mut length = plen + slen;
                    for p in pieces {
                        length += match *p {
                            Piece::Line { len, .. } => len,
                            Piece::Turn { delta, .. } => match self.turn_length(delta) {
                                Some(l) => l,
                                None => return,
                            },
                        };
                    }
                    let mut arr = [Piece::Line {
                        dir: Direction::Forward,
                        len: 0.0,
                    }; 3];
                    arr[..pieces.len()].copy_from_slice(pieces);
                    let c = Candidate {
                        length,
                        prefix: pdir,
                        suffix: sdir,
                        pieces: arr,
                        n: pieces.len(),
                    };
                    if self.switches(&c) <= self.max_switches {
                        cands.push(c);
                    }
                });
            }
        }
        // The shortest candidate almost always verifies, so pick minima one at
        // a time instead of sorting.
        while !cands.is_empty() {
            let (i, c) = cands
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.length.total_cmp(&b.1.length))
                .map(|(i, c)| (i, *c))
                .expect("non-empty");
            if c.length > max_length {
                return None;
            }
            let path = self.build(from, to, &c);
            let end = path.end_pose().unwrap_or(from);
            if end.approx_eq(&to, ENDPOINT_TOL) && (end.kappa - to.kappa).abs() < 1e-9 {
                return Some(path.simplified());
            }
            cands.swap_remove(i);
        }
        None
    }

    /// Clothoids that ramp the curvature at `pose` to zero, for each direction.
    /// Returns `(direction, pose with zero curvature, length)`; a single entry
    /// with no direction when the curvature is already zero.
    fn curvature_ramps(&self, pose: Pose, leaving: bool) -> Vec<(Option<Direction>, Pose, f64)> {
        if pose.kappa == 0.0 {
            return vec![(None, pose, 0.0)];
        }
        let len = pose.kappa.abs() / self.sigma;
        let sig = -pose.kappa.signum() * self.sigma;
        [Direction::Forward, Direction::Backward]
            .into_iter()
            .map(|d| {
                // For the suffix, run the ramp backward from the goal.
                let run = if leaving { d } else { d.opposite() };
                let seg = PathSegment::clothoid(pose, pose.kappa, sig, len, run);
                (Some(d), seg.end_pose().with_kappa(0.0), len)
            })
            .collect()
    }

    fn switches(&self, c: &Candidate) -> usize {
        let mut count = 0;
        let mut last: Option<Direction> = None;
        let mut visit = |d: Direction| {
            if last.is_some_and(|l| l != d) {
                count += 1;
            }
            last = Some(d);
        };
        if let Some(d) = c.prefix {
            visit(d);
        }
        for p in &c.pieces[..c.n] {
            match *p {
                Piece::Turn { dir, .. } => visit(dir),
                Piece::Line { dir, len } if len > 0.0 => visit(dir),
                Piece::Line { .. } => {}
            }
        }
        if let Some(d) = c.suffix {
            visit(d);
        }
        count
    }

    fn build(&self, from: Pose, to: Pose, c: &Candidate) -> Path {
        let mut path = Path::new();
        let mut p = from;
        if let Some(d) = c.prefix {
            let seg = PathSegment::clothoid(
                from,
                from.kappa,
                -from.kappa.signum() * self.sigma,
                from.kappa.abs() / self.sigma,
                d,
            );
            p = seg.end_pose().with_kappa(0.0);
            path.push(seg);
        }
        for piece in &c.pieces[..c.n] {
            p = match *piece {
                Piece::Turn { side, dir, delta } => self.push_turn(&mut path, p, side, dir, delta),
                Piece::Line { dir, len } => {
                    let seg = PathSegment::straight(p, len, dir);
                    path.push(seg);
                    seg.end_pose()
                }
            };
        }
        if let Some(d) = c.suffix {
            let seg = PathSegment::clothoid(p, 0.0, to.kappa.signum() * self.sigma, to.kappa.abs() / self.sigma, d);
            path.push(seg);
        }
        path
    }

    /// Calls `f` with every word connecting two zero-curvature poses.
    fn enumerate(&self, start: Pose, goal: Pose, f: &mut dyn FnMut(&[Piece])) {
        const DIRS: [Direction; 2] = [Direction::Forward, Direction::Backward];
        const SIDES: [f64; 2] = [1.0, -1.0];
        let (ss, cs) = start.theta.sin_cos();
        let (sg, cg) = goal.theta.sin_cos();
        let at = |x: f64, y: f64, s: f64, c: f64, p: Point| Point::new(x + c * p.x - s * p.y, y + s * p.x + c * p.y);
        // Entry centers at the start and exit centers at the goal, indexed by
        // [side][direction].
        let mut o1 = [[Point::new(0.0, 0.0); 2]; 2];
        let mut o3 = [[Point::new(0.0, 0.0); 2]; 2];
        for (i, &side) in SIDES.iter().enumerate() {
            for (j, &d) in DIRS.iter().enumerate() {
                o1[i][j] = at(start.x, start.y, ss, cs, self.entry_offset(side, d));
                o3[i][j] = at(goal.x, goal.y, sg, cg, self.exit_offset(side, d));
            }
        }

        // Pure straight.
        let local = start.inverse_transform_point(goal.position());
        if local.y.abs() < 1e-9 && angle_diff(goal.theta, start.theta).abs() < 1e-9 {
            f(&[Piece::Line {
                dir: Direction::from_sign(local.x),
                len: local.x.abs(),
            }]);
        }

        // Single turn.
        for (i, &side) in SIDES.iter().enumerate() {
            for (j, &d) in DIRS.iter().enumerate() {
                if o1[i][j].distance(o3[i][j]) < CENTER_TOL {
                    let delta = mod2pi(d.sign() * side * (goal.theta - start.theta));
                    f(&[Piece::Turn { side, dir: d, delta }]);
                }
            }
        }

        // Turn, straight, turn.
        for (i1, &s1) in SIDES.iter().enumerate() {
            for (i3, &s3) in SIDES.iter().enumerate() {
                let b = (s3 - s1) * self.yc;
                for (j1, &d1) in DIRS.iter().enumerate() {
                    for (j3, &d3) in DIRS.iter().enumerate() {
                        let v = o3[i3][j3].sub(o1[i1][j1]);
                        let dd = v.dot(v);
                        let a = (d1.sign() + d3.sign()) * self.xc;
                        if dd < b * b {
                            continue;
                        }
                        let root = (dd - b * b).sqrt();
                        let v_angle = v.y.atan2(v.x);
                        for t in [root, -root] {
                            if t == -root && root == 0.0 {
                                continue;
                            }
                            if t == 0.0 && b == 0.0 {
                                continue;
                            }
                            let tilt = if b == 0.0 {
                                if t > 0.0 {
                                    0.0
                                } else {
                                    std::f64::consts::PI
                                }
                            } else {
                                b.atan2(t)
                            };
                            let heading = v_angle - tilt;
                            let delta1 = mod2pi(d1.sign() * s1 * (heading - start.theta));
                            let delta3 = mod2pi(d3.sign() * s3 * (goal.theta - heading));
                            for &d2 in &DIRS {
                                let len = d2.sign() * (t - a);
                                if len < -1e-12 {
                                    continue;
                                }
                                f(&[
                                    Piece::Turn {
                                        side: s1,
                                        dir: d1,
                                        delta: delta1,
                                    },
                                    Piece::Line {
                                        dir: d2,
                                        len: len.max(0.0),
                                    },
                                    Piece::Turn {
                                        side: s3,
                                        dir: d3,
                                        delta: delta3,
                                    },
                                ]);
                            }
                        }
                    }
                }
            }
        }

        // Three turns alternating sides, any directions.
        for (i1, &s1) in SIDES.iter().enumerate() {
            let s2 = -s1;
            let s3 = s1;
            for (j1, &d1) in DIRS.iter().enumerate() {
                for (j2, &d2) in DIRS.iter().enumerate() {
                    for (j3, &d3) in DIRS.iter().enumerate() {
                        let links = &self.links[i1][j1][j2][j3];
                        let (ra, rb) = (links.ra, links.rb);
                        let v = o3[i1][j3].sub(o1[i1][j1]);
                        let dist = v.norm();
                        if ra == 0.0 || rb == 0.0 || dist == 0.0 {
                            continue;
                        }
                        if dist > ra + rb || dist < (ra - rb).abs() {
                            continue;
                        }
                        let u = v.scale(1.0 / dist);
                        let along = (dist * dist + ra * ra - rb * rb) / (2.0 * dist);
                        let h = (ra * ra - along * along).max(0.0).sqrt();
                        for sgn in [1.0, -1.0] {
                            if sgn < 0.0 && h == 0.0 {
                                continue;
                            }
                            let o2 = o1[i1][j1].add(u.scale(along)).add(Point::new(-u.y, u.x).scale(sgn * h));
                            let w12 = o2.sub(o1[i1][j1]);
                            let w23 = o3[i1][j3].sub(o2);
                            let h1 = w12.y.atan2(w12.x) - links.a12;
                            let h2 = w23.y.atan2(w23.x) - links.a23;
                            f(&[
                                Piece::Turn {
                                    side: s1,
                                    dir: d1,
                                    delta: mod2pi(d1.sign() * s1 * (h1 - start.theta)),
                                },
                                Piece::Turn {
                                    side: s2,
                                    dir: d2,
                                    delta: mod2pi(d2.sign() * s2 * (h2 - h1)),
                                },
                                Piece::Turn {
                                    side: s3,
                                    dir: d3,
                                    delta: mod2pi(d3.sign() * s3 * (goal.theta - h2)),
                                },
                            ]);
                        }
                    }
                }
            }
        }
    }
}

/// Center-to-center offsets between consecutive turns of a three-turn word,
/// in the frame of the pose where they meet.
#[derive(Debug, Clone, Copy, Default)]
struct Links {
    ra: f64,
    rb: f64,
    a12: f64,
    a23: f64,
}

/// Deflection in `[0, 2π)`, with values within 1e−9 of either end snapped to 0.
fn mod2pi(a: f64) -> f64 {
    let mut m = a;
    while m < 0.0 {
        m += TAU;
    }
    while m >= TAU {
        m -= TAU;
    }
    if !(1e-10..=TAU - 1e-9).contains(&m) {
        0.0
    } else {
        m
    }
}

/// Continuous-curvature path from `from` to `to` with at most two direction
/// switches, or `None` when no connection exists.
pub fn cc_steer(from: Pose, to: Pose, params: &VehicleParams) -> Option<Path> {
    CcSteer::new(params, 2).steer(from, to)
}
