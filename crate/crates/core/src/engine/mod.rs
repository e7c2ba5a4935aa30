//! Exact all-to-one load evaluation on the functional graph of a sampled routing table.
//!
//! Every node except the destination injects one flow. Flows follow the table entries and
//! merge where their paths meet, so the load of a node is the number of nodes whose path
//! passes through it, its own flow included. Nodes on a forwarding cycle carry infinite
//! load; a node whose entry is itself is a blackhole that absorbs everything upstream.

mod trace;

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

pub use trace::{default_max_hops, trace_flow, FlowOutcome, FlowTrace};

use crate::error::{Error, Result};
use crate::failure::FailureSet;
use crate::topology::{NodeId, Topology};

const NO_ENTRY: u32 = u32::MAX;

/// One sampled entry `α(v)` per node `v != d`; the destination row is absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutingTable {
    destination: NodeId,
    next: Vec<u32>,
}

impl RoutingTable {
    /// `next[d]` is ignored; every other slot must be filled.
    pub fn new(destination: NodeId, next: Vec<Option<NodeId>>) -> Result<Self> {
        if destination.index() >= next.len() {
            return Err(Error::param(format!("destination {destination} outside a table of {} rows", next.len())));
        }
        let mut raw = Vec::with_capacity(next.len());
        for (i, e) in next.into_iter().enumerate() {
            let v = NodeId::from(i);
            match e {
                _ if v == destination => raw.push(NO_ENTRY),
                Some(w) => raw.push(w.0),
                None => return Err(Error::MissingEntry(v)),
            }
        }
        Ok(RoutingTable { destination, next: raw })
    }

    pub fn from_fn(node_count: usize, destination: NodeId, mut f: impl FnMut(NodeId) -> NodeId) -> Result<Self> {
        let next = (0..node_count).map(NodeId::from).map(|v| (v != destination).then(|| f(v))).collect();
        RoutingTable::new(destination, next)
    }

    pub fn destination(&self) -> NodeId {
        self.destination
    }

    pub fn len(&self) -> usize {
        self.next.len()
    }

    pub fn is_empty(&self) -> bool {
        self.next.is_empty()
    }

    /// `α(v)`, or `None` for the destination.
    pub fn entry(&self, v: NodeId) -> Option<NodeId> {
        match self.next.get(v.index()) {
            Some(&w) if w != NO_ENTRY => Some(NodeId(w)),
            _ => None,
        }
    }

    /// Checks `α(v) ∈ (Γ(v) \ F_v) ∪ {v}` for every row.
    pub fn validate(&self, topo: &Topology, failures: &FailureSet) -> Result<()> {
        if self.len() != topo.node_count() {
            return Err(Error::param(format!("table has {} rows, topology {} nodes", self.len(), topo.node_count())));
        }
        for v in topo.nodes() {
            let Some(w) = self.entry(v) else { continue };
            if w != v && (!topo.is_edge(v, w) || failures.contains(v, w)) {
                return Err(Error::NotAnEdge(v, w));
            }
        }
        Ok(())
    }
}

/// Load of a single node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeLoad {
    Finite(u64),
    /// The node lies on a forwarding cycle.
    Infinite,
    /// The node forwards to itself and absorbs this many flows, its own included.
    Blackhole(u64),
}

impl NodeLoad {
    /// Number of flows crossing the node; `None` when infinite.
    pub fn flows(self) -> Option<u64> {
        match self {
            NodeLoad::Finite(x) | NodeLoad::Blackhole(x) => Some(x),
            NodeLoad::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == NodeLoad::Infinite
    }

    /// `self <= other`, with infinity above every count.
    pub fn at_most(self, other: NodeLoad) -> bool {
        match (self.flows(), other.flows()) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(a), Some(b)) => a <= b,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LoadReport {
    pub destination: NodeId,
    pub node_load: Vec<NodeLoad>,
    /// Number of injected flows, `|V| - 1`.
    pub senders: u64,
    pub delivered: u64,
    pub absorbed_by_cycles: u64,
    pub absorbed_by_blackholes: u64,
    /// Each cycle starts at its smallest node and follows the table.
    pub cycles: Vec<Vec<NodeId>>,
    pub blackholes: Vec<NodeId>,
    /// Largest finite load over `V \ {d}`.
    pub max_finite_load: u64,
    /// Hop counts of delivered flows.
    pub hop_histogram: BTreeMap<u32, u64>,
    #[serde(skip)]
    forward: Vec<u32>,
}

impl LoadReport {
    pub fn load(&self, v: NodeId) -> NodeLoad {
        self.node_load[v.index()]
    }

    pub fn has_cycle(&self) -> bool {
        !self.cycles.is_empty()
    }

    pub fn has_blackhole(&self) -> bool {
        !self.blackholes.is_empty()
    }

    pub fn conserves_flows(&self) -> bool {
        self.delivered + self.absorbed_by_cycles + self.absorbed_by_blackholes == self.senders
    }

    /// Load carried by each forwarding edge `(v, α(v))`, which is every flow crossing `v`.
    /// Self-loops carry nothing and are skipped.
    pub fn edge_loads(&self) -> impl Iterator<Item = ((NodeId, NodeId), NodeLoad)> + '_ {
        self.forward.iter().enumerate().filter_map(move |(i, &w)| {
            (w != NO_ENTRY && w as usize != i).then(|| ((NodeId::from(i), NodeId(w)), self.node_load[i]))
        })
    }

    /// Largest edge load; `None` for infinity, `Some(0)` when there are no edges.
    pub fn max_edge_load(&self) -> Option<u64> {
        let mut best = 0;
        for (_, l) in self.edge_loads() {
            best = best.max(l.flows()?);
        }
        Some(best)
    }

    pub fn delivered_flows(&self) -> u64 {
        self.hop_histogram.values().sum()
    }

    /// Smallest hop count `h` such that at least a `q` fraction of delivered flows use at most `h` hops.
    pub fn hop_quantile(&self, q: f64) -> Option<u32> {
        let total = self.delivered_flows();
        if total == 0 {
            return None;
        }
        let need = ((q * total as f64).ceil() as u64).clamp(1, total);
        let mut acc = 0;
        for (&h, &c) in &self.hop_histogram {
            acc += c;
            if acc >= need {
                return Some(h);
            }
        }
        self.hop_histogram.keys().next_back().copied()
    }

    pub fn max_hops(&self) -> Option<u32> {
        self.hop_histogram.keys().next_back().copied()
    }
}

/// Loads of all nodes under `table`.
pub fn compute_loads(topo: &Topology, table: &RoutingTable) -> Result<LoadReport> {
    compute_loads_with_stops(topo, table, &[])
}

/// Like [`compute_loads`], with the `stopped` nodes treated as temporary blackholes whose
/// entries are still covered.
pub fn compute_loads_with_stops(topo: &Topology, table: &RoutingTable, stopped: &[NodeId]) -> Result<LoadReport> {
    let n = topo.node_count();
    if table.len() != n {
        return Err(Error::param(format!("table has {} rows, topology {n} nodes", table.len())));
    }
    let d = table.destination.index();
    let mut forward = table.next.clone();
    for (v, &w) in forward.iter().enumerate() {
        if v != d && w as usize >= n {
            return Err(Error::MissingEntry(NodeId::from(v)));
        }
    }
    for s in stopped {
        if s.index() != d && s.index() < n {
            forward[s.index()] = s.0;
        }
    }
    let terminal = |v: usize| v == d || forward[v] as usize == v;

    let mut indeg = vec![0u32; n];
    for v in 0..n {
        if !terminal(v) {
            indeg[forward[v] as usize] += 1;
        }
    }
    let mut acc: Vec<u64> = vec![1; n];
    acc[d] = 0;
    let mut order = Vec::with_capacity(n);
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    while let Some(v) = queue.pop_front() {
        order.push(v);
        if terminal(v) {
            continue;
        }
        let w = forward[v] as usize;
        acc[w] += acc[v];
        indeg[w] -= 1;
        if indeg[w] == 0 {
            queue.push_back(w);
        }
    }
    let mut on_cycle = vec![true; n];
    for &v in &order {
        on_cycle[v] = false;
    }

    let mut node_load = vec![NodeLoad::Finite(0); n];
    let mut blackholes = Vec::new();
    let mut absorbed_by_blackholes = 0;
    let mut absorbed_by_cycles = 0;
    let mut max_finite_load = 0;
    for v in 0..n {
        if on_cycle[v] {
            node_load[v] = NodeLoad::Infinite;
            absorbed_by_cycles += 1;
            continue;
        }
        if v != d && terminal(v) {
            node_load[v] = NodeLoad::Blackhole(acc[v]);
            blackholes.push(NodeId::from(v));
            absorbed_by_blackholes += acc[v];
        } else {
            node_load[v] = NodeLoad::Finite(acc[v]);
            if !terminal(v) && on_cycle[forward[v] as usize] {
                absorbed_by_cycles += acc[v];
            }
        }
        if v != d {
            max_finite_load = max_finite_load.max(acc[v]);
        }
    }
    node_load[d] = NodeLoad::Finite(acc[d]);

    // Depth to the terminal reached, filled from terminals outward.
    let mut depth = vec![0u32; n];
    let mut delivers = vec![false; n];
    let mut hop_histogram = BTreeMap::new();
    for &v in order.iter().rev() {
        if v == d {
            delivers[v] = true;
            continue;
        }
        if terminal(v) {
            continue;
        }
        let w = forward[v] as usize;
        if on_cycle[w] {
            continue;
        }
        depth[v] = depth[w] + 1;
        delivers[v] = delivers[w];
        if delivers[v] {
            *hop_histogram.entry(depth[v]).or_insert(0) += 1;
        }
    }

    let mut cycles = Vec::new();
    let mut seen = vec![false; n];
    for v in 0..n {
        if !on_cycle[v] || seen[v] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut u = v;
        while !seen[u] {
            seen[u] = true;
            cycle.push(NodeId::from(u));
            u = forward[u] as usize;
        }
        // v is the smallest unseen cycle node, so the cycle already starts at its minimum
        cycles.push(cycle);
    }

    Ok(LoadReport {
        destination: table.destination,
        node_load,
        senders: n as u64 - 1,
        delivered: acc[d],
        absorbed_by_cycles,
        absorbed_by_blackholes,
        cycles,
        blackholes,
        max_finite_load,
        hop_histogram,
        forward,
    })
}

/// Fraction of injected flows that need at least `bound` hops; undelivered flows count as
/// exceeding every bound.
pub fn hop_bound_check(report: &LoadReport, bound: u32) -> f64 {
    if report.senders == 0 {
        return 0.0;
    }
    let within: u64 = report.hop_histogram.range(..bound).map(|(_, &c)| c).sum();
    (report.senders - within) as f64 / report.senders as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(n: usize, d: u32, next: &[(u32, u32)]) -> RoutingTable {
        let mut rows = vec![None; n];
        for &(v, w) in next {
            rows[v as usize] = Some(NodeId(w));
        }
        RoutingTable::new(NodeId(d), rows).unwrap()
    }

    #[test]
    fn chain_loads() {
        let topo = Topology::clique(4).unwrap();
        let t = table(4, 3, &[(0, 1), (1, 2), (2, 3)]);
        let r = compute_loads(&topo, &t).unwrap();
        assert_eq!(r.node_load, vec![NodeLoad::Finite(1), NodeLoad::Finite(2), NodeLoad::Finite(3), NodeLoad::Finite(3)]);
        assert_eq!(r.delivered, 3);
        assert_eq!(r.max_finite_load, 3);
        assert_eq!(r.max_edge_load(), Some(3));
        assert!(r.conserves_flows());
        assert_eq!(hop_bound_check(&r, 2), 2.0 / 3.0);
        assert_eq!(hop_bound_check(&r, 0), 1.0);
        assert_eq!(hop_bound_check(&r, 4), 0.0);
    }

    #[test]
    fn two_cycle_is_infinite() {
        let topo = Topology::clique(4).unwrap();
        let t = table(4, 3, &[(0, 1), (1, 0), (2, 0)]);
        let r = compute_loads(&topo, &t).unwrap();
        assert_eq!(r.load(NodeId(0)), NodeLoad::Infinite);
        assert_eq!(r.load(NodeId(1)), NodeLoad::Infinite);
        assert_eq!(r.load(NodeId(2)), NodeLoad::Finite(1));
        assert_eq!(r.cycles, vec![vec![NodeId(0), NodeId(1)]]);
        assert_eq!(r.delivered, 0);
        assert_eq!(r.absorbed_by_cycles, 3);
        assert!(r.conserves_flows());
        assert_eq!(r.max_edge_load(), None);
    }

    #[test]
    fn blackholes_absorb_upstream() {
        let topo = Topology::clique(5).unwrap();
        let t = table(5, 4, &[(0, 1), (1, 1), (2, 4), (3, 2)]);
        let r = compute_loads(&topo, &t).unwrap();
        assert_eq!(r.load(NodeId(1)), NodeLoad::Blackhole(2));
        assert_eq!(r.blackholes, vec![NodeId(1)]);
        assert_eq!((r.delivered, r.absorbed_by_blackholes), (2, 2));
        assert!(!r.has_cycle());
        assert!(r.conserves_flows());
    }

    #[test]
    fn missing_rows_are_rejected() {
        let rows = vec![Some(NodeId(1)), None, None];
        assert!(matches!(RoutingTable::new(NodeId(2), rows), Err(Error::MissingEntry(NodeId(1)))));
    }

    #[test]
    fn stopping_nodes_never_raises_loads() {
        let topo = Topology::clique(6).unwrap();
        let t = table(6, 5, &[(0, 1), (1, 2), (2, 5), (3, 2), (4, 3)]);
        let full = compute_loads(&topo, &t).unwrap();
        let part = compute_loads_with_stops(&topo, &t, &[NodeId(3)]).unwrap();
        for v in topo.nodes() {
            assert!(part.load(v).at_most(full.load(v)));
        }
        assert_eq!(part.load(NodeId(2)), NodeLoad::Finite(3));
    }
}
