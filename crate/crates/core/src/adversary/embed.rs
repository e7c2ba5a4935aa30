use rand::RngCore;

use crate::error::Result;
use crate::protocol::{FailoverDistribution, FailoverProtocol};
use crate::topology::{NodeId, Topology};

/// A protocol for a graph `G` viewed on the clique over the same nodes: failures on
/// non-edges of `G` are ignored and non-edges never receive probability.
pub struct CliqueEmbedding<'a> {
    inner: &'a dyn FailoverProtocol,
    graph: &'a Topology,
}

pub fn clique_embed<'a>(protocol: &'a dyn FailoverProtocol, graph: &'a Topology) -> CliqueEmbedding<'a> {
    CliqueEmbedding { inner: protocol, graph }
}

impl CliqueEmbedding<'_> {
    /// The clique the embedding answers queries on.
    pub fn clique(&self) -> Result<Topology> {
        Topology::clique(self.graph.node_count() as u32)
    }

    fn restrict(&self, v: NodeId, failed: &[NodeId]) -> Vec<NodeId> {
        failed.iter().copied().filter(|&w| self.graph.is_edge(v, w)).collect()
    }
}

impl FailoverProtocol for CliqueEmbedding<'_> {
    fn name(&self) -> &str {
        self.inner.name()
    }

    fn distribution(&self, _clique: &Topology, v: NodeId, failed: &[NodeId], d: NodeId) -> Result<FailoverDistribution> {
        self.inner.distribution(self.graph, v, &self.restrict(v, failed), d)
    }

    fn supports_pdf(&self) -> bool {
        self.inner.supports_pdf()
    }

    fn sample(&self, _clique: &Topology, v: NodeId, failed: &[NodeId], d: NodeId, rng: &mut dyn RngCore) -> Result<NodeId> {
        self.inner.sample(self.graph, v, &self.restrict(v, failed), d, rng)
    }
}
