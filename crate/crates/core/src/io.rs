//! Plain-text artifacts: path, history, tree and tracking CSVs plus
//! `key=value` summaries.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so equal
//! inputs give byte-identical files and reading a file back recovers every
//! value exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path as FsPath;

use crate::cc_paths::{Direction, Path, PathSegment};
use crate::error::IoError;
use crate::geometry::Pose;
use crate::planner::{HistoryEntry, PlanResult};
use crate::target_tree::TargetTree;
use crate::tracking::TrackingReport;

/// Sampling step of exported paths and tree branches.
pub const EXPORT_DS: f64 = 0.05;

pub const PATH_HEADER: &str = "idx,s,x,y,theta,kappa,direction";
pub const HISTORY_HEADER: &str = "t_seconds,best_length_m";
pub const TREE_HEADER: &str = "branch_id,s,x,y,theta,kappa,remaining_length";
pub const TRACKING_HEADER: &str = "t,x,y,theta,delta_cmd,delta_actual,v,cross_track";

fn direction_name(d: Direction) -> &'static str {
    match d {
        Direction::Forward => "forward",
        Direction::Backward => "backward",
    }
}

/// Path sampled at [`EXPORT_DS`]; segment ends are always included. A path
/// with a target-tree suffix starts with a `# tree_suffix_from=` comment.
pub fn path_to_csv(path: &Path) -> String {
    let mut out = String::new();
    if let Some(split) = path.tree_suffix_from {
        writeln!(out, "# tree_suffix_from={split}").unwrap();
    }
    out.push_str(PATH_HEADER);
    out.push('\n');
    for (i, smp) in path.sample(EXPORT_DS).iter().enumerate() {
        let p = smp.pose;
        writeln!(
            out,
            "{i},{},{},{},{},{},{}",
            smp.s,
            p.x,
            p.y,
            p.theta,
            p.kappa,
            direction_name(smp.direction)
        )
        .unwrap();
    }
    out
}

struct Row {
    s: f64,
    pose: Pose,
    direction: Direction,
}

fn parse_f64(field: &str, line: usize, name: &str) -> Result<f64, IoError> {
    field.trim().parse::<f64>().map_err(|_| IoError::Format {
        line,
        message: format!("`{name}` is not a number: {field:?}"),
    })
}

fn check_header(found: Option<(usize, &str)>, expected: &str) -> Result<(), IoError> {
    match found {
        Some((_, h)) if h.replace(' ', "") == expected => Ok(()),
        Some((line, h)) => Err(IoError::Format {
            line,
            message: format!("expected header `{expected}`, found `{h}`"),
        }),
        None => Err(IoError::Format {
            line: 1,
            message: "empty file".into(),
        }),
    }
}

/// Data lines with their 1-based numbers; blank and `#` lines are skipped.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Rebuilds a path from its CSV. Consecutive samples become one segment each
/// with curvature varying linearly between them, which is exact for
/// straights, arcs and clothoids sampled at their ends.
pub fn path_from_csv(text: &str) -> Result<Path, IoError> {
    let mut split = None;
    for (i, line) in text.lines().enumerate() {
        if let Some(v) = line.trim().strip_prefix("# tree_suffix_from=") {
            split = Some(parse_f64(v, i + 1, "tree_suffix_from")?);
        }
    }
    let mut lines = data_lines(text);
    check_header(lines.next(), PATH_HEADER)?;
    let mut rows = Vec::new();
    for (n, line) in lines {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 7 {
            return Err(IoError::Format {
                line: n,
                message: format!("expected 7 fields, found {}", f.len()),
            });
        }
        let direction = match f[6].trim() {
            "forward" => Direction::Forward,
            "backward" => Direction::Backward,
            other => {
                return Err(IoError::Format {
                    line: n,
                    message: format!("unknown direction {other:?}"),
                })
            }
        };
        rows.push(Row {
            s: parse_f64(f[1], n, "s")?,
            pose: Pose::new(
                parse_f64(f[2], n, "x")?,
                parse_f64(f[3], n, "y")?,
                parse_f64(f[4], n, "theta")?,
                parse_f64(f[5], n, "kappa")?,
            ),
            direction,
        });
    }
    let mut path = Path::new();
    for w in rows.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let len = b.s - a.s;
        if len < -1e-12 {
            return Err(IoError::Format {
                line: 0,
                message: format!("arc length decreases at s = {}", b.s),
            });
        }
        if len <= 1e-12 || a.direction != b.direction && len <= 1e-9 {
            continue;
        }
        let dk = b.pose.kappa - a.pose.kappa;
        let seg = if dk.abs() <= 1e-12 {
            if a.pose.kappa == 0.0 {
                PathSegment::straight(a.pose, len, b.direction)
            } else {
                PathSegment::arc(a.pose, a.pose.kappa, len, b.direction)
            }
        } else {
            PathSegment::clothoid(a.pose, a.pose.kappa, dk / len, len, b.direction)
        };
        path.push(seg);
    }
    path.tree_suffix_from = split;
    Ok(path)
}

pub fn history_to_csv(history: &[HistoryEntry]) -> String {
    let mut out = String::from(HISTORY_HEADER);
    out.push('\n');
    for h in history {
        writeln!(out, "{},{}", h.elapsed, h.best_length).unwrap();
    }
    out
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), |x| x.to_string())
}

/// Summary of a planning run as `key=value` lines.
pub fn stats_to_text(r: &PlanResult) -> String {
    let s = &r.stats;
    let mut out = String::new();
    let mut kv = |k: &str, v: String| writeln!(out, "{k}={v}").unwrap();
    kv("variant", r.variant.name());
    kv("success", r.succeeded().to_string());
    kv("best_length_m", opt(r.best_length));
    kv("iterations", s.iterations.to_string());
    kv("nodes", s.nodes.to_string());
    kv(
        "first_solution_iteration",
        s.first_solution_iteration.map_or("none".into(), |i| i.to_string()),
    );
    kv("solutions", r.q_soln.len().to_string());
    kv("t_tfs_ms", (s.t_tfs * 1e3).to_string());
    kv("t_ttfp_ms", opt(s.t_ttfp.map(|t| t * 1e3)));
    kv("t_total_ms", (s.t_total * 1e3).to_string());
    kv("tree_cost", r.tree_cost.to_string());
    kv("tree_straight_length_m", r.tree_straight_length.to_string());
    kv(
        "direction_switches",
        r.best_path
            .as_ref()
            .map_or("none".into(), |p| p.direction_switches().to_string()),
    );
    out
}

/// Branches sampled in the parking direction: `s` runs from the branch tip,
/// `remaining_length` is what is left to the goal.
pub fn tree_to_csv(tree: &TargetTree) -> String {
    let mut out = String::from(TREE_HEADER);
    out.push('\n');
    for (id, b) in tree.branches.iter().enumerate() {
        let parking = b.path.reversed();
        let total = parking.length();
        for smp in parking.sample(EXPORT_DS) {
            let p = smp.pose;
            writeln!(
                out,
                "{id},{},{},{},{},{},{}",
                smp.s,
                p.x,
                p.y,
                p.theta,
                p.kappa,
                (total - smp.s).max(0.0)
            )
            .unwrap();
        }
    }
    out
}

/// Branch poses grouped by branch id, in file order.
pub fn tree_from_csv(text: &str) -> Result<Vec<Vec<Pose>>, IoError> {
    let mut lines = data_lines(text);
    check_header(lines.next(), TREE_HEADER)?;
    let mut branches: Vec<(usize, Vec<Pose>)> = Vec::new();
    for (n, line) in lines {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 7 {
            return Err(IoError::Format {
                line: n,
                message: format!("expected 7 fields, found {}", f.len()),
            });
        }
        let id: usize = f[0].trim().parse().map_err(|_| IoError::Format {
            line: n,
            message: format!("bad branch id {:?}", f[0]),
        })?;
        let pose = Pose::new(
            parse_f64(f[2], n, "x")?,
            parse_f64(f[3], n, "y")?,
            parse_f64(f[4], n, "theta")?,
            parse_f64(f[5], n, "kappa")?,
        );
        match branches.last_mut() {
            Some((last, poses)) if *last == id => poses.push(pose),
            _ => branches.push((id, vec![pose])),
        }
    }
    Ok(branches.into_iter().map(|(_, p)| p).collect())
}

pub fn tracking_to_csv(report: &TrackingReport) -> String {
    let mut out = String::from(TRACKING_HEADER);
    out.push('\n');
    for r in &report.trace {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.t, r.x, r.y, r.theta, r.delta_cmd, r.delta, r.v, r.cross_track
        )
        .unwrap();
    }
    out
}

pub fn tracking_summary(report: &TrackingReport) -> String {
    let mut out = String::new();
    let mut kv = |k: &str, v: f64| writeln!(out, "{k}={v}").unwrap();
    kv("max_cross_track_m", report.max_cross_track);
    kv("mean_cross_track_m", report.mean_cross_track);
    kv("lateral_alignment_error_m", report.lateral_alignment_error);
    kv("orientation_alignment_error_rad", report.orientation_alignment_error);
    kv("duration_s", report.duration);
    out
}

/// Parses `key=value` lines, skipping blanks and `#` comments.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>, IoError> {
    data_lines(text)
        .map(|(n, l)| {
            l.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or(IoError::Format {
                    line: n,
                    message: format!("expected key=value, found {l:?}"),
                })
        })
        .collect()
}

pub fn read_path_csv(file: impl AsRef<FsPath>) -> Result<Path, IoError> {
    path_from_csv(&fs::read_to_string(file)?)
}

pub fn read_tree_csv(file: impl AsRef<FsPath>) -> Result<Vec<Vec<Pose>>, IoError> {
    tree_from_csv(&fs::read_to_string(file)?)
}
