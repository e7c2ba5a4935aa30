//! Graph families: Clos, complete bipartite and clique.
//!
//! All three are immutable after construction and answer adjacency queries in closed form,
//! so they can be shared freely between trial workers.

mod bipartite;
mod clique;
mod clos;
mod span;

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use bipartite::{BipartiteNode, BipartiteParams, BipartiteTopology, Side};
pub use clique::CliqueTopology;
pub use clos::{BlockRange, ClosNode, ClosParams, ClosTopology, Location, Sequence};
pub use span::Span;

/// Global node index, dense in `0..node_count`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(i as u32)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Topology {
    Clos(ClosTopology),
    Bipartite(BipartiteTopology),
    Clique(CliqueTopology),
}

impl Topology {
    pub fn clos(k: u32, levels: u32, intervals: Option<u32>) -> crate::Result<Self> {
        ClosTopology::new(k, levels, intervals).map(Topology::Clos)
    }

    pub fn bipartite(n: u32, c: f64, intervals: Option<u32>) -> crate::Result<Self> {
        BipartiteTopology::new(n, c, intervals).map(Topology::Bipartite)
    }

    pub fn clique(n: u32) -> crate::Result<Self> {
        CliqueTopology::new(n).map(Topology::Clique)
    }

    pub fn family(&self) -> &'static str {
        match self {
            Topology::Clos(_) => "clos",
            Topology::Bipartite(_) => "bipartite",
            Topology::Clique(_) => "clique",
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Topology::Clos(t) => t.node_count(),
            Topology::Bipartite(t) => t.node_count(),
            Topology::Clique(t) => t.node_count(),
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.node_count() as u32).map(NodeId)
    }

    pub fn contains(&self, v: NodeId) -> bool {
        v.index() < self.node_count()
    }

    /// Neighborhood `Γ(v)` as a handful of disjoint progressions.
    pub fn neighbor_spans(&self, v: NodeId) -> Vec<Span> {
        match self {
            Topology::Clos(t) => t.neighbor_spans(v),
            Topology::Bipartite(t) => t.neighbor_spans(v),
            Topology::Clique(t) => t.neighbor_spans(v),
        }
    }

    pub fn neighbors(&self, v: NodeId) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self.neighbor_spans(v).iter().flat_map(|s| s.iter().collect::<Vec<_>>()).collect();
        out.sort_unstable();
        out
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.neighbor_spans(v).iter().map(|s| s.len as usize).sum()
    }

    pub fn is_edge(&self, a: NodeId, b: NodeId) -> bool {
        match self {
            Topology::Clos(t) => t.is_edge(a, b),
            Topology::Bipartite(t) => t.is_edge(a, b),
            Topology::Clique(t) => t.is_edge(a, b),
        }
    }

    /// Interval size `I`, when the family carries an interval partition.
    pub fn interval_size(&self) -> Option<u32> {
        match self {
            Topology::Clos(t) => Some(t.interval_size()),
            Topology::Bipartite(t) => Some(t.interval_size()),
            Topology::Clique(_) => None,
        }
    }

    pub fn intervals(&self) -> Option<u32> {
        match self {
            Topology::Clos(t) => Some(t.intervals()),
            Topology::Bipartite(t) => Some(t.intervals()),
            Topology::Clique(_) => None,
        }
    }

    /// Default all-to-one destination: the last node (a level-`L` node for Clos, a `W` node
    /// for the bipartite graph).
    pub fn default_destination(&self) -> NodeId {
        NodeId(self.node_count() as u32 - 1)
    }

    /// Hop distances to `target` by breadth-first search, ignoring the listed edges.
    /// Unreachable nodes get `None`.
    pub fn bfs_distances(&self, target: NodeId, removed: &[(NodeId, NodeId)]) -> Vec<Option<u32>> {
        let is_removed = |a: NodeId, b: NodeId| {
            removed.iter().any(|&(x, y)| (x == a && y == b) || (x == b && y == a))
        };
        let mut dist = vec![None; self.node_count()];
        let mut queue = VecDeque::new();
        dist[target.index()] = Some(0);
        queue.push_back(target);
        while let Some(u) = queue.pop_front() {
            let du = dist[u.index()].unwrap_or(0);
            for span in self.neighbor_spans(u) {
                for w in span.iter() {
                    if dist[w.index()].is_none() && !is_removed(u, w) {
                        dist[w.index()] = Some(du + 1);
                        queue.push_back(w);
                    }
                }
            }
        }
        dist
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Topology::Clos(t) => {
                let p = t.params();
                write!(f, "Clos(k={}, L={}, K={}, I={})", p.k, p.levels, p.intervals, p.interval_size)
            }
            Topology::Bipartite(t) => {
                let p = t.params();
                write!(f, "Bipartite(n={}, K={}, I={})", p.n, p.intervals, p.interval_size)
            }
            Topology::Clique(t) => write!(f, "Clique(n={})", t.n()),
        }
    }
}

/// Divisor of `n` closest to `target`; ties go to the smaller divisor.
pub(crate) fn nearest_divisor(n: u64, target: u64) -> u64 {
    let mut best: u64 = 1;
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            for cand in [d, n / d] {
                let (db, dc) = (best.abs_diff(target), cand.abs_diff(target));
                if dc < db || (dc == db && cand < best) {
                    best = cand;
                }
            }
        }
        d += 1;
    }
    best
}
