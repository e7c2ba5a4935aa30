use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{FailoverDistribution, FailoverProtocol};
use crate::error::{Error, Result};
use crate::topology::{NodeId, Topology};

fn check_row(topo: &Topology, v: NodeId, d: NodeId) -> Result<()> {
    if !topo.contains(v) || !topo.contains(d) {
        return Err(Error::param(format!("nodes ({v}, {d}) outside the topology")));
    }
    if v == d {
        return Err(Error::param("the destination has no failover entry"));
    }
    Ok(())
}

fn direct_hop(topo: &Topology, v: NodeId, failed: &[NodeId], d: NodeId) -> bool {
    topo.is_edge(v, d) && failed.binary_search(&d).is_err()
}

/// Direct hop when possible, otherwise a uniformly random surviving neighbor.
#[derive(Debug, Clone, Copy, Default)]
pub struct UniformFailover;

impl FailoverProtocol for UniformFailover {
    fn name(&self) -> &str {
        "uniform"
    }

    fn distribution(&self, topo: &Topology, v: NodeId, failed: &[NodeId], d: NodeId) -> Result<FailoverDistribution> {
        check_row(topo, v, d)?;
        if direct_hop(topo, v, failed, d) {
            return Ok(FailoverDistribution::PointMass(d));
        }
        Ok(FailoverDistribution::uniform_or_self(v, topo.neighbor_spans(v), failed))
    }
}

/// Direct hop when possible, otherwise the surviving neighbor of lowest rank.
///
/// Ranks are node ids unless a seeded permutation is supplied.
#[derive(Debug, Clone, Default)]
pub struct DeterministicFailover {
    ranking: Option<Ranking>,
}

#[derive(Debug, Clone)]
struct Ranking {
    order: Vec<NodeId>,
    rank: Vec<u32>,
}

/// Above this degree a permuted ranking is scanned in rank order instead of scanning
/// the neighborhood.
const RANK_SCAN_DEGREE: usize = 4096;

impl DeterministicFailover {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn permuted(node_count: usize, seed: u64) -> Self {
        let mut order: Vec<NodeId> = (0..node_count).map(NodeId::from).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let mut rank = vec![0u32; node_count];
        for (r, w) in order.iter().enumerate() {
            rank[w.index()] = r as u32;
        }
        DeterministicFailover { ranking: Some(Ranking { order, rank }) }
    }

    pub fn rank(&self, w: NodeId) -> u32 {
        self.ranking.as_ref().map_or(w.0, |r| r.rank[w.index()])
    }
}

impl FailoverProtocol for DeterministicFailover {
    fn name(&self) -> &str {
        "deterministic"
    }

    fn distribution(&self, topo: &Topology, v: NodeId, failed: &[NodeId], d: NodeId) -> Result<FailoverDistribution> {
        check_row(topo, v, d)?;
        if direct_hop(topo, v, failed, d) {
            return Ok(FailoverDistribution::PointMass(d));
        }
        let alive = |w: &NodeId| failed.binary_search(w).is_err();
        let pick = match &self.ranking {
            None => {
                let mut spans = topo.neighbor_spans(v);
                spans.sort_by_key(|s| s.start);
                spans.iter().flat_map(|s| s.iter().collect::<Vec<_>>()).filter(alive).min()
            }
            Some(r) => {
                if r.rank.len() != topo.node_count() {
                    return Err(Error::param("ranking size does not match the topology"));
                }
                if topo.degree(v) <= RANK_SCAN_DEGREE {
                    topo.neighbors(v).into_iter().filter(alive).min_by_key(|w| r.rank[w.index()])
                } else {
                    r.order.iter().copied().find(|&w| topo.is_edge(v, w) && alive(&w))
                }
            }
        };
        Ok(FailoverDistribution::PointMass(pick.unwrap_or(v)))
    }
}

/// A protocol given by explicit rows `v -> [(w, p)]`, used when the direct hop to the
/// destination is unavailable. Failed or non-adjacent targets are dropped and the rest
/// renormalized; rows that lose all mass fall back to the self-loop, and nodes without a
/// row behave like [`UniformFailover`].
#[derive(Debug, Clone, Default)]
pub struct ExplicitProtocol {
    name: String,
    rows: BTreeMap<NodeId, Vec<(NodeId, f64)>>,
}

impl ExplicitProtocol {
    pub fn new(name: impl Into<String>) -> Self {
        ExplicitProtocol { name: name.into(), rows: BTreeMap::new() }
    }

    pub fn with_row(mut self, v: NodeId, row: Vec<(NodeId, f64)>) -> Self {
        self.rows.insert(v, row);
        self
    }
}

impl FailoverProtocol for ExplicitProtocol {
    fn name(&self) -> &str {
        &self.name
    }

    fn distribution(&self, topo: &Topology, v: NodeId, failed: &[NodeId], d: NodeId) -> Result<FailoverDistribution> {
        check_row(topo, v, d)?;
        if direct_hop(topo, v, failed, d) {
            return Ok(FailoverDistribution::PointMass(d));
        }
        let Some(row) = self.rows.get(&v) else {
            return UniformFailover.distribution(topo, v, failed, d);
        };
        let kept: Vec<(NodeId, f64)> = row
            .iter()
            .copied()
            .filter(|&(w, p)| p > 0.0 && w != v && topo.is_edge(v, w) && failed.binary_search(&w).is_err())
            .collect();
        let mass: f64 = kept.iter().map(|&(_, p)| p).sum();
        if kept.is_empty() || mass <= 0.0 {
            return Ok(FailoverDistribution::PointMass(v));
        }
        let mut normalized: Vec<(NodeId, f64)> = kept.iter().map(|&(w, p)| (w, p / mass)).collect();
        // absorb rounding into the last entry so the weights sum to one exactly enough
        let sum: f64 = normalized.iter().map(|&(_, p)| p).sum();
        if let Some(last) = normalized.last_mut() {
            last.1 += 1.0 - sum;
        }
        FailoverDistribution::weighted(normalized)
    }
}
