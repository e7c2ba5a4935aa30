use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::FailoverProtocol;
use crate::topology::{NodeId, Topology};

/// `lg x` with the base used throughout the crate.
pub fn lg(x: f64) -> f64 {
    x.log2()
}

/// Directed graph of predictable failover edges: `(v, w)` whenever `v` picks `w` with
/// probability above `threshold` once its direct link to the destination is down.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogGraph {
    pub destination: NodeId,
    pub threshold: f64,
    /// `out[v]` sorted by target; empty for the destination.
    out: Vec<Vec<(NodeId, f64)>>,
}

impl LogGraph {
    /// Builds the graph from explicit adjacency; `out[d]` must be empty.
    pub fn from_edges(destination: NodeId, threshold: f64, mut out: Vec<Vec<(NodeId, f64)>>) -> Result<Self> {
        let n = out.len();
        if destination.index() >= n || !out[destination.index()].is_empty() {
            return Err(Error::param("the destination has no outgoing edges"));
        }
        for row in &mut out {
            if row.iter().any(|&(w, _)| w.index() >= n || w == destination) {
                return Err(Error::param("edge target outside V \\ {d}"));
            }
            row.sort_by_key(|&(w, _)| w);
            row.dedup_by_key(|&mut (w, _)| w);
        }
        Ok(LogGraph { destination, threshold, out })
    }

    /// Size of the underlying topology, destination included.
    pub fn topology_size(&self) -> usize {
        self.out.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        let d = self.destination;
        (0..self.out.len()).map(NodeId::from).filter(move |&v| v != d)
    }

    pub fn out_edges(&self, v: NodeId) -> &[(NodeId, f64)] {
        &self.out[v.index()]
    }

    pub fn out_degree(&self, v: NodeId) -> usize {
        self.out[v.index()].len()
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }

    /// `V_R`: nodes without outgoing edges, in index order.
    pub fn roots(&self) -> Vec<NodeId> {
        self.nodes().filter(|&v| self.out_degree(v) == 0).collect()
    }
}

/// Queries `D(v, {d} ∩ Γ(v), d)` for every `v != d` and keeps targets above `1 / (lg n)^exponent`.
pub fn build_glog(protocol: &dyn FailoverProtocol, topo: &Topology, d: NodeId, exponent: f64) -> Result<LogGraph> {
    if !protocol.supports_pdf() {
        return Err(Error::Capability(protocol.name().to_string()));
    }
    if !topo.contains(d) {
        return Err(Error::param(format!("destination {d} outside the topology")));
    }
    let n = topo.node_count();
    let threshold = 1.0 / lg(n as f64).powf(exponent);
    let mut out = vec![Vec::new(); n];
    for v in topo.nodes().filter(|&v| v != d) {
        let failed: &[NodeId] = if topo.is_edge(v, d) { &[d] } else { &[] };
        let dist = protocol.distribution(topo, v, failed, d)?;
        out[v.index()] = dist.heavy_targets(threshold).into_iter().filter(|&(w, _)| w != d).collect();
    }
    LogGraph::from_edges(d, threshold, out)
}

/// `G_log^t`: every node keeps its smallest target, then each remaining cycle loses the
/// edge leaving its smallest node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReverseForest {
    pub destination: NodeId,
    parent: Vec<Option<NodeId>>,
    roots: Vec<NodeId>,
    /// Broken cycles, each starting at its smallest node and following the kept edges.
    removed_cycles: Vec<Vec<NodeId>>,
    child_start: Vec<u32>,
    child_list: Vec<NodeId>,
    subtree: Vec<u64>,
}

pub fn build_glogt(glog: &LogGraph) -> ReverseForest {
    let n = glog.topology_size();
    let d = glog.destination;
    let mut parent: Vec<Option<NodeId>> =
        (0..n).map(|v| glog.out_edges(NodeId::from(v)).first().map(|&(w, _)| w)).collect();

    // 0 = unvisited, 1 = on the current walk, 2 = done
    let mut state = vec![0u8; n];
    let mut removed_cycles = Vec::new();
    for start in 0..n {
        if state[start] != 0 {
            continue;
        }
        let mut walk = Vec::new();
        let mut u = start;
        loop {
            if state[u] == 1 {
                let at = walk.iter().position(|&x| x == u).expect("walk contains u");
                let cycle: Vec<usize> = walk[at..].to_vec();
                let min_pos = (0..cycle.len()).min_by_key(|&i| cycle[i]).expect("non-empty cycle");
                let ordered: Vec<NodeId> =
                    (0..cycle.len()).map(|i| NodeId::from(cycle[(min_pos + i) % cycle.len()])).collect();
                parent[ordered[0].index()] = None;
                removed_cycles.push(ordered);
                break;
            }
            if state[u] == 2 {
                break;
            }
            state[u] = 1;
            walk.push(u);
            match parent[u] {
                Some(w) => u = w.index(),
                None => break,
            }
        }
        for x in walk {
            state[x] = 2;
        }
    }
    removed_cycles.sort();

    let roots: Vec<NodeId> = (0..n).map(NodeId::from).filter(|&v| v != d && parent[v.index()].is_none()).collect();

    let mut child_count = vec![0u32; n + 1];
    for p in parent.iter().flatten() {
        child_count[p.index() + 1] += 1;
    }
    let mut child_start = child_count;
    for i in 0..n {
        child_start[i + 1] += child_start[i];
    }
    let mut fill = child_start.clone();
    let mut child_list = vec![NodeId(0); child_start[n] as usize];
    for (v, p) in parent.iter().enumerate() {
        if let Some(p) = p {
            child_list[fill[p.index()] as usize] = NodeId::from(v);
            fill[p.index()] += 1;
        }
    }

    // Subtree sizes, children before parents: a BFS from the roots reversed.
    let mut order = Vec::with_capacity(n);
    order.extend(roots.iter().map(|r| r.index()));
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        let (a, b) = (child_start[v] as usize, child_start[v + 1] as usize);
        order.extend(child_list[a..b].iter().map(|c| c.index()));
    }
    let mut subtree = vec![1u64; n];
    subtree[d.index()] = 0;
    for &v in order.iter().rev() {
        if let Some(p) = parent[v] {
            subtree[p.index()] += subtree[v];
        }
    }

    ReverseForest { destination: d, parent, roots, removed_cycles, child_start, child_list, subtree }
}

impl ReverseForest {
    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.parent[v.index()]
    }

    /// `V_R^t` in index order.
    pub fn roots(&self) -> &[NodeId] {
        &self.roots
    }

    pub fn removed_cycles(&self) -> &[Vec<NodeId>] {
        &self.removed_cycles
    }

    /// Children in ascending order.
    pub fn children(&self, v: NodeId) -> &[NodeId] {
        let (a, b) = (self.child_start[v.index()] as usize, self.child_start[v.index() + 1] as usize);
        &self.child_list[a..b]
    }

    pub fn subtree_size(&self, v: NodeId) -> u64 {
        self.subtree[v.index()]
    }

    /// `(root, size)` of every reverse tree.
    pub fn trees(&self) -> Vec<(NodeId, u64)> {
        self.roots.iter().map(|&r| (r, self.subtree[r.index()])).collect()
    }

    pub fn node_count(&self) -> usize {
        self.parent.len() - 1
    }

    /// Every parent chain ends at a root within `n` steps.
    pub fn is_acyclic(&self) -> bool {
        let n = self.parent.len();
        let mut done = vec![false; n];
        for v in 0..n {
            let mut u = v;
            let mut steps = 0;
            while let Some(p) = self.parent[u] {
                if done[u] {
                    break;
                }
                u = p.index();
                steps += 1;
                if steps > n {
                    return false;
                }
            }
            done[v] = true;
        }
        true
    }
}
