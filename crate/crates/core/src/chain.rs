//! Chain graphs, chain components, the hop metric `d_r`, and r-convexity.
//!
//! At scale `r` two points are chained when their distance is strictly below
//! `r`; a chain is a finite sequence of such steps. The hop metric `d_r(x,y)`
//! counts the minimum number of steps and is undefined across components.
//! The strict `<` convention is used everywhere, so the boundary case
//! `d(x,y) = r` never produces an edge.

use serde::Serialize;

use crate::error::{CoarseError, Result};
use crate::metric::{FiniteMetricSpace, PointId, Subset};

/// How many convexity violations a report stores verbatim; the total count
/// is always exact.
pub const MAX_STORED_VIOLATIONS: usize = 64;

/// Adjacency of the strict r-neighborhood graph. Neighbor lists are sorted
/// ascending, which makes every BFS in the crate deterministic.
#[derive(Clone, Debug)]
pub struct ChainGraph {
    scale_r: f64,
    adjacency: Vec<Vec<u32>>,
}

impl ChainGraph {
    pub fn build(space: &FiniteMetricSpace, r: f64) -> Result<Self> {
        if !(r > 0.0) {
            return Err(CoarseError::InvalidScale {
                name: "r",
                value: r,
                reason: "chain scale must be positive",
            });
        }
        let n = space.len();
        let mut adjacency = vec![Vec::new(); n];
        for i in 0..n {
            for j in (i + 1)..n {
                if space.dist(i, j) < r {
                    adjacency[i].push(j as u32);
                    adjacency[j].push(i as u32);
                }
            }
        }
        Ok(ChainGraph {
            scale_r: r,
            adjacency,
        })
    }

    pub fn scale(&self) -> f64 {
        self.scale_r
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, x: PointId) -> &[u32] {
        &self.adjacency[x]
    }

    /// Hop counts from `x` to every node; `None` marks unreachable nodes.
    pub fn hops_from(&self, x: PointId) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.adjacency.len()];
        if x >= self.adjacency.len() {
            return dist;
        }
        let mut queue = std::collections::VecDeque::new();
        dist[x] = Some(0);
        queue.push_back(x);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].expect("queued nodes have distances");
            for &v in &self.adjacency[u] {
                let v = v as usize;
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Multi-source hop counts restricted to `allowed` nodes. Sources outside
    /// the mask are ignored.
    pub fn hops_from_sources(&self, sources: &[PointId], allowed: &[bool]) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.adjacency.len()];
        let mut queue = std::collections::VecDeque::new();
        for &s in sources {
            if allowed[s] && dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u].expect("queued nodes have distances");
            for &v in &self.adjacency[u] {
                let v = v as usize;
                if allowed[v] && dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Shortest chain (as a point-id sequence) from any source to any target,
    /// staying inside `allowed`; `None` when no such chain exists. Ties break
    /// toward lower ids through the sorted adjacency.
    pub fn path_between(
        &self,
        sources: &[PointId],
        targets: &[bool],
        allowed: &[bool],
    ) -> Option<Vec<PointId>> {
        let n = self.adjacency.len();
        let mut parent: Vec<Option<PointId>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = std::collections::VecDeque::new();
        for &s in sources {
            if allowed[s] && !seen[s] {
                seen[s] = true;
                queue.push_back(s);
                if targets[s] {
                    return Some(vec![s]);
                }
            }
        }
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[u] {
                let v = v as usize;
                if !allowed[v] || seen[v] {
                    continue;
                }
                seen[v] = true;
                parent[v] = Some(u);
                if targets[v] {
                    let mut path = vec![v];
                    let mut cur = v;
                    while let Some(p) = parent[cur] {
                        path.push(p);
                        cur = p;
                    }
                    path.reverse();
                    return Some(path);
                }
                queue.push_back(v);
            }
        }
        None
    }

    /// Component label per node; labels are assigned in ascending order of
    /// each component's lowest id.
    pub fn component_labels(&self) -> Vec<u32> {
        let n = self.adjacency.len();
        let mut label = vec![u32::MAX; n];
        let mut next = 0u32;
        for start in 0..n {
            if label[start] != u32::MAX {
                continue;
            }
            let mut queue = std::collections::VecDeque::new();
            label[start] = next;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adjacency[u] {
                    let v = v as usize;
                    if label[v] == u32::MAX {
                        label[v] = next;
                        queue.push_back(v);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn component_of(&self, x: PointId) -> Subset {
        let hops = self.hops_from(x);
        let mut out = Subset::empty();
        for (id, h) in hops.iter().enumerate() {
            if h.is_some() {
                out.insert(id);
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        let n = self.adjacency.len();
        if n <= 1 {
            return true;
        }
        self.hops_from(0).iter().all(|h| h.is_some())
    }
}

/// Builds the strict r-neighborhood graph of a space.
pub fn build_chain_graph(space: &FiniteMetricSpace, r: f64) -> Result<ChainGraph> {
    ChainGraph::build(space, r)
}

/// The chain component `[x]_r`: everything reachable from `x` by chains at
/// scale `r`, including `x` itself.
pub fn chain_component(space: &FiniteMetricSpace, x: PointId, r: f64) -> Result<Subset> {
    space.check_point(x)?;
    Ok(ChainGraph::build(space, r)?.component_of(x))
}

/// Minimum chain length from `x` to `y` at scale `r`; `None` when `y` lies
/// outside `[x]_r`. The empty chain gives `d_r(x,x) = 0`.
pub fn chain_metric(space: &FiniteMetricSpace, x: PointId, y: PointId, r: f64) -> Result<Option<u32>> {
    space.check_point(x)?;
    space.check_point(y)?;
    Ok(ChainGraph::build(space, r)?.hops_from(x)[y])
}

/// Whether every pair of points is joined by a chain at scale `r`. Empty and
/// singleton spaces count as connected.
pub fn is_r_connected(space: &FiniteMetricSpace, r: f64) -> Result<bool> {
    Ok(ChainGraph::build(space, r)?.is_connected())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvexityViolation {
    pub x: PointId,
    pub y: PointId,
    pub distance: f64,
    /// `None` when no chain joins the pair at this scale.
    pub hops: Option<u32>,
}

/// Outcome of [`check_r_convexity`]. A space is r-convex when it is
/// r-connected and every pair at distance `>= r` admits a chain of at most
/// `d(x,y)` steps. `violation_count` is exact; `violations` keeps the first
/// [`MAX_STORED_VIOLATIONS`] witnesses in (x, y) id order.
#[derive(Clone, Debug, Serialize)]
pub struct ConvexityReport {
    pub scale_r: f64,
    pub connected: bool,
    pub violation_count: usize,
    pub violations: Vec<ConvexityViolation>,
}

impl ConvexityReport {
    pub fn is_r_convex(&self) -> bool {
        self.connected && self.violation_count == 0
    }
}

/// Scans every pair with `d(x,y) >= r` and records a violation when the hop
/// metric is undefined or exceeds the distance.
pub fn check_r_convexity(space: &FiniteMetricSpace, r: f64) -> Result<ConvexityReport> {
    let graph = ChainGraph::build(space, r)?;
    let n = space.len();
    let mut count = 0usize;
    let mut stored = Vec::new();
    for x in 0..n {
        let hops = graph.hops_from(x);
        for y in (x + 1)..n {
            let d = space.dist(x, y);
            if d < r {
                continue;
            }
            let bad = match hops[y] {
                None => true,
                Some(h) => (h as f64) > d,
            };
            if bad {
                count += 1;
                if stored.len() < MAX_STORED_VIOLATIONS {
                    stored.push(ConvexityViolation {
                        x,
                        y,
                        distance: d,
                        hops: hops[y],
                    });
                }
            }
        }
    }
    Ok(ConvexityReport {
        scale_r: r,
        connected: graph.is_connected(),
        violation_count: count,
        violations: stored,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Norm;

    fn line(n: usize) -> FiniteMetricSpace {
        FiniteMetricSpace::from_coords(
            "line",
            (0..n).map(|i| vec![i as f64]).collect(),
            Norm::L2,
        )
        .unwrap()
    }

    #[test]
    fn strictness_at_the_boundary() {
        let space = line(6);
        // Unit steps are not edges at r = 1.
        let g = ChainGraph::build(&space, 1.0).unwrap();
        assert!(g.neighbors(0).is_empty());
        // They are at r = 1.5, giving the path graph.
        let g = ChainGraph::build(&space, 1.5).unwrap();
        assert_eq!(g.neighbors(0), &[1]);
        assert_eq!(g.neighbors(3), &[2, 4]);
        assert!(ChainGraph::build(&space, 0.0).is_err());
    }

    #[test]
    fn two_clusters_stay_apart() {
        let mut pts: Vec<Vec<f64>> = (0..3).map(|i| vec![i as f64]).collect();
        pts.extend((0..3).map(|i| vec![10.0 + i as f64]));
        let space = FiniteMetricSpace::from_coords("clusters", pts, Norm::L2).unwrap();
        let g = ChainGraph::build(&space, 2.0).unwrap();
        let labels = g.component_labels();
        assert_eq!(labels[0], labels[2]);
        assert_ne!(labels[0], labels[3]);
        assert!(!g.is_connected());
    }

    #[test]
    fn chain_metric_counts_hops() {
        let space = line(11);
        assert_eq!(chain_metric(&space, 0, 0, 2.0).unwrap(), Some(0));
        assert_eq!(chain_metric(&space, 0, 10, 2.0).unwrap(), Some(10));
        assert_eq!(chain_metric(&space, 0, 10, 3.0).unwrap(), Some(5));
        assert!(chain_metric(&space, 0, 99, 2.0).is_err());
    }

    #[test]
    fn disconnected_pair_has_no_hop_count() {
        let space =
            FiniteMetricSpace::from_coords("far", vec![vec![0.0], vec![10.0]], Norm::L2).unwrap();
        assert_eq!(chain_metric(&space, 0, 1, 2.0).unwrap(), None);
    }

    #[test]
    fn connectivity_conventions() {
        let single = line(1);
        assert!(is_r_connected(&single, 1.0).unwrap());
        assert!(is_r_connected(&line(51), 1.5).unwrap());
    }

    #[test]
    fn isolated_point_component() {
        let space = line(1);
        assert_eq!(
            chain_component(&space, 0, 5.0).unwrap(),
            Subset::from_ids([0])
        );
    }

    #[test]
    fn line_window_is_convex() {
        let report = check_r_convexity(&line(30), 2.0).unwrap();
        assert!(report.is_r_convex(), "violations: {:?}", report.violations);
    }

    #[test]
    fn unreachable_pair_is_a_violation() {
        let space =
            FiniteMetricSpace::from_coords("far", vec![vec![0.0], vec![10.0]], Norm::L2).unwrap();
        let report = check_r_convexity(&space, 3.0).unwrap();
        assert!(!report.is_r_convex());
        assert_eq!(report.violation_count, 1);
        assert_eq!(report.violations[0].hops, None);
    }
}
