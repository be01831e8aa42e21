use crate::cc_paths::Path;
use crate::geometry::{angle_diff, Pose};

#[derive(Debug, Clone)]
pub struct Node {
    pub pose: Pose,
    pub parent: Option<usize>,
    /// Path from the parent to this node; empty for the root.
    pub edge: Path,
    pub cost: f64,
    pub children: Vec<usize>,
}

/// RRT* node set. Costs are path lengths from the root.
#[derive(Debug, Clone)]
pub struct PlannerTree {
    nodes: Vec<Node>,
    /// Positions and headings kept contiguous for the linear scans.
    xs: Vec<f64>,
    ys: Vec<f64>,
    thetas: Vec<f64>,
}

/// Weighted pose distance `sqrt(w_xy·(Δx² + Δy²)) + w_θ·|Δθ|`.
pub fn pose_distance(a: &Pose, b: &Pose, w_xy: f64, w_theta: f64) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    (w_xy * (dx * dx + dy * dy)).sqrt() + w_theta * angle_diff(a.theta, b.theta).abs()
}

impl PlannerTree {
    pub fn new(root: Pose) -> Self {
        let mut t = Self {
            nodes: Vec::new(),
            xs: Vec::new(),
            ys: Vec::new(),
            thetas: Vec::new(),
        };
        t.push(Node {
            pose: root,
            parent: None,
            edge: Path::new(),
            cost: 0.0,
            children: Vec::new(),
        });
        t
    }

    fn push(&mut self, node: Node) -> usize {
        self.xs.push(node.pose.x);
        self.ys.push(node.pose.y);
        self.thetas.push(node.pose.theta);
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn insert(&mut self, parent: usize, pose: Pose, edge: Path, cost: f64) -> usize {
        let id = self.push(Node {
            pose,
            parent: Some(parent),
            edge,
            cost,
            children: Vec::new(),
        });
        self.nodes[parent].children.push(id);
        id
    }

    /// Node closest to `q` under [`pose_distance`]; ties go to the lower index.
    pub fn nearest(&self, q: &Pose, w_xy: f64, w_theta: f64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for i in 0..self.nodes.len() {
            let dx = self.xs[i] - q.x;
            let dy = self.ys[i] - q.y;
            let d2 = w_xy * (dx * dx + dy * dy);
            // Position alone already rules this node out.
            if d2 >= best_d * best_d {
                continue;
            }
            let d = d2.sqrt() + w_theta * angle_diff(self.thetas[i], q.theta).abs();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// Indices of nodes within planar distance `r` of `q`.
    pub fn near(&self, q: &Pose, r: f64) -> Vec<usize> {
        let r2 = r * r;
        (0..self.nodes.len())
            .filter(|&i| {
                let dx = self.xs[i] - q.x;
                let dy = self.ys[i] - q.y;
                dx * dx + dy * dy <= r2
            })
            .collect()
    }

    pub fn is_ancestor(&self, maybe_ancestor: usize, mut node: usize) -> bool {
        loop {
            if node == maybe_ancestor {
                return true;
            }
            match self.nodes[node].parent {
                Some(p) => node = p,
                None => return false,
            }
        }
    }

    /// Moves `node` under `new_parent` and shifts the cost of its whole
    /// subtree. Returns the indices whose cost changed.
    pub fn rewire(&mut self, node: usize, new_parent: usize, edge: Path, cost: f64) -> Vec<usize> {
        assert!(!self.is_ancestor(node, new_parent), "rewire would create a cycle");
        if let Some(old) = self.nodes[node].parent {
            self.nodes[old].children.retain(|&c| c != node);
        }
        self.nodes[new_parent].children.push(node);
        let delta = cost - self.nodes[node].cost;
        let n = &mut self.nodes[node];
        n.parent = Some(new_parent);
        n.edge = edge;
        n.cost = cost;
        let mut changed = vec![node];
        let mut stack: Vec<usize> = self.nodes[node].children.clone();
        while let Some(c) = stack.pop() {
            self.nodes[c].cost += delta;
            changed.push(c);
            stack.extend_from_slice(&self.nodes[c].children);
        }
        changed
    }

    /// Root-to-node path.
    pub fn path_to(&self, node: usize) -> Path {
        let mut chain = Vec::new();
        let mut cur = node;
        while let Some(p) = self.nodes[cur].parent {
            chain.push(cur);
            cur = p;
        }
        let mut path = Path::new();
        for &i in chain.iter().rev() {
            path.extend(&self.nodes[i].edge);
        }
        path
    }

    /// Every parent walk reaches the root without revisiting a node, and the
    /// child lists mirror the parent links.
    pub fn is_acyclic(&self) -> bool {
        let n = self.nodes.len();
        for start in 0..n {
            let mut cur = start;
            let mut steps = 0;
            while let Some(p) = self.nodes[cur].parent {
                cur = p;
                steps += 1;
                if steps > n {
                    return false;
                }
            }
            if cur != 0 {
                return false;
            }
        }
        let children_match = self
            .nodes
            .iter()
            .enumerate()
            .all(|(i, node)| node.children.iter().all(|&c| self.nodes[c].parent == Some(i)));
        let listed_once = (1..n).all(|i| {
            let p = self.nodes[i].parent.expect("checked above");
            self.nodes[p].children.iter().filter(|&&c| c == i).count() == 1
        });
        children_match && listed_once
    }

    /// Largest gap between stored costs and costs summed along parent links.
    pub fn max_cost_error(&self) -> f64 {
        (0..self.nodes.len())
            .map(|i| {
                let mut sum = 0.0;
                let mut cur = i;
                while let Some(p) = self.nodes[cur].parent {
                    sum += self.nodes[cur].edge.length();
                    cur = p;
                }
                (sum - self.nodes[i].cost).abs()
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cc_paths::{Direction, PathSegment};

    fn straight(from: Pose, len: f64) -> Path {
        Path::from_segments([PathSegment::straight(from, len, Direction::Forward)])
    }

    #[test]
    fn nearest_prefers_lowest_index_on_ties() {
        let mut t = PlannerTree::new(Pose::new(1.0, 0.0, 0.0, 0.0));
        t.insert(0, Pose::new(-1.0, 0.0, 0.0, 0.0), Path::new(), 0.0);
        assert_eq!(t.nearest(&Pose::identity(), 1.0, 1.0), 0);
        assert_eq!(t.nearest(&Pose::new(-1.0, 0.0, 0.0, 0.0), 1.0, 1.0), 1);
    }

    #[test]
    fn rewire_moves_subtree_costs() {
        let mut t = PlannerTree::new(Pose::identity());
        let a = t.insert(0, Pose::new(2.0, 0.0, 0.0, 0.0), straight(Pose::identity(), 2.0), 2.0);
        let b = t.insert(
            a,
            Pose::new(3.0, 0.0, 0.0, 0.0),
            straight(Pose::new(2.0, 0.0, 0.0, 0.0), 1.0),
            3.0,
        );
        let c = t.insert(0, Pose::new(5.0, 0.0, 0.0, 0.0), straight(Pose::identity(), 5.0), 5.0);
        let changed = t.rewire(c, b, straight(Pose::new(3.0, 0.0, 0.0, 0.0), 2.0), 5.0);
        assert_eq!(changed, vec![c]);
        assert!(t.is_acyclic());
        assert!(t.max_cost_error() < 1e-12);
        assert_eq!(t.path_to(c).length(), 5.0);
    }
}
