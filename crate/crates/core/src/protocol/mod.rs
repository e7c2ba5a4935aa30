//! Failover protocols as queryable distributions over surviving neighbors plus the
//! self-loop, and routing-table sampling.

mod baseline;
mod distribution;
mod interval;

use std::fmt;
use std::str::FromStr;

use rand::RngCore;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use baseline::{DeterministicFailover, ExplicitProtocol, UniformFailover};
pub use distribution::{FailoverDistribution, UniformChoice, PROBABILITY_TOLERANCE};
pub use interval::{IntervalBipartite, IntervalClos};

use crate::engine::RoutingTable;
use crate::error::{Error, Result};
use crate::failure::FailureSet;
use crate::topology::{NodeId, Topology};

/// A failover rule `(v, F_v, d) -> D(v, F_v, d)`.
///
/// `failed` is `F_v` sorted ascending. Answers are deterministic; randomness enters only
/// through [`FailoverProtocol::sample`].
pub trait FailoverProtocol: Send + Sync {
    fn name(&self) -> &str;

    fn distribution(&self, topo: &Topology, v: NodeId, failed: &[NodeId], d: NodeId) -> Result<FailoverDistribution>;

    /// Whether [`FailoverProtocol::distribution`] returns exact probabilities.
    fn supports_pdf(&self) -> bool {
        true
    }

    fn sample(&self, topo: &Topology, v: NodeId, failed: &[NodeId], d: NodeId, rng: &mut dyn RngCore) -> Result<NodeId> {
        Ok(self.distribution(topo, v, failed, d)?.sample(rng))
    }
}

impl<P: FailoverProtocol + ?Sized> FailoverProtocol for &P {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn distribution(&self, topo: &Topology, v: NodeId, failed: &[NodeId], d: NodeId) -> Result<FailoverDistribution> {
        (**self).distribution(topo, v, failed, d)
    }

    fn supports_pdf(&self) -> bool {
        (**self).supports_pdf()
    }

    fn sample(&self, topo: &Topology, v: NodeId, failed: &[NodeId], d: NodeId, rng: &mut dyn RngCore) -> Result<NodeId> {
        (**self).sample(topo, v, failed, d, rng)
    }
}

/// Protocols selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolKind {
    Pb,
    Pc,
    Uniform,
    Deterministic,
}

impl ProtocolKind {
    pub fn build(self) -> Box<dyn FailoverProtocol> {
        match self {
            ProtocolKind::Pb => Box::new(IntervalBipartite),
            ProtocolKind::Pc => Box::new(IntervalClos),
            ProtocolKind::Uniform => Box::new(UniformFailover),
            ProtocolKind::Deterministic => Box::new(DeterministicFailover::new()),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ProtocolKind::Pb => "pb",
            ProtocolKind::Pc => "pc",
            ProtocolKind::Uniform => "uniform",
            ProtocolKind::Deterministic => "deterministic",
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProtocolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pb" => Ok(ProtocolKind::Pb),
            "pc" => Ok(ProtocolKind::Pc),
            "uniform" => Ok(ProtocolKind::Uniform),
            "deterministic" => Ok(ProtocolKind::Deterministic),
            other => Err(Error::param(format!("unknown protocol `{other}`"))),
        }
    }
}

/// Samples one entry per node `v != d`, in node order, from a generator seeded with `seed`.
pub fn sample_routing_table(
    protocol: &dyn FailoverProtocol,
    topo: &Topology,
    failures: &FailureSet,
    d: NodeId,
    seed: u64,
) -> Result<RoutingTable> {
    sample_routing_table_with(protocol, topo, failures, d, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn sample_routing_table_with(
    protocol: &dyn FailoverProtocol,
    topo: &Topology,
    failures: &FailureSet,
    d: NodeId,
    rng: &mut dyn RngCore,
) -> Result<RoutingTable> {
    if !topo.contains(d) {
        return Err(Error::param(format!("destination {d} outside the topology")));
    }
    let mut next = Vec::with_capacity(topo.node_count());
    for v in topo.nodes() {
        if v == d {
            next.push(None);
        } else {
            next.push(Some(protocol.sample(topo, v, failures.incident(v), d, rng)?));
        }
    }
    RoutingTable::new(d, next)
}

/// Whether `target` lies on a shortest `v -> d` path once the edges from `v` to `failed`
/// are removed.
pub fn is_shortest_path_entry(topo: &Topology, v: NodeId, failed: &[NodeId], d: NodeId, target: NodeId) -> bool {
    if target == v || !topo.is_edge(v, target) || failed.contains(&target) {
        return false;
    }
    let removed: Vec<(NodeId, NodeId)> = failed.iter().map(|&w| (v, w)).collect();
    let dist = topo.bfs_distances(d, &removed);
    match (dist[v.index()], dist[target.index()]) {
        (Some(dv), Some(dt)) => dt + 1 == dv,
        _ => false,
    }
}
