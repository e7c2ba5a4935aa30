use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::RoutingTable;
use crate::error::{Error, Result};
use crate::topology::{NodeId, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlowOutcome {
    Delivered,
    /// Revisited `cycle_start`, the first node of the path seen twice.
    Cycled { cycle_start: NodeId },
    Blackholed { at: NodeId },
    HopLimit,
}

/// One flow followed hop by hop.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowTrace {
    pub source: NodeId,
    /// Nodes entered after leaving the source, in order.
    pub path: Vec<NodeId>,
    pub outcome: FlowOutcome,
}

impl FlowTrace {
    pub fn hops(&self) -> usize {
        self.path.len()
    }

    /// The source followed by the path.
    pub fn visited(&self) -> impl Iterator<Item = NodeId> + '_ {
        std::iter::once(self.source).chain(self.path.iter().copied())
    }
}

/// Default hop budget `4 K (L + 1)`; the bipartite graph counts as one level above its
/// base, the clique uses its node count.
pub fn default_max_hops(topo: &Topology) -> usize {
    match topo {
        Topology::Clos(t) => 4 * t.intervals() as usize * (t.levels() as usize + 1),
        Topology::Bipartite(t) => 8 * t.intervals() as usize,
        Topology::Clique(t) => t.node_count(),
    }
}

/// Follows the table from `source` until the destination, a self-loop, a revisited node or
/// the hop budget.
pub fn trace_flow(topo: &Topology, table: &RoutingTable, source: NodeId, max_hops: usize) -> Result<FlowTrace> {
    if !topo.contains(source) || table.len() != topo.node_count() {
        return Err(Error::param(format!("source {source} or table does not match the topology")));
    }
    let d = table.destination();
    let mut path = Vec::new();
    let mut seen = HashSet::from([source]);
    let mut cur = source;
    let outcome = loop {
        if cur == d {
            break FlowOutcome::Delivered;
        }
        let next = table.entry(cur).ok_or(Error::MissingEntry(cur))?;
        if next == cur {
            break FlowOutcome::Blackholed { at: cur };
        }
        if !seen.insert(next) {
            break FlowOutcome::Cycled { cycle_start: next };
        }
        if path.len() == max_hops {
            break FlowOutcome::HopLimit;
        }
        path.push(next);
        cur = next;
    };
    Ok(FlowTrace { source, path, outcome })
}
