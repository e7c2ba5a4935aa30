//! Interval failover protocols.
//!
//! Both protocols push a packet whose direct link is down into the next interval of the
//! opposite side, so a packet that keeps missing makes progress around a ring of `K`
//! intervals instead of bouncing between the same few nodes.

use super::{FailoverDistribution, FailoverProtocol};
use crate::error::{Error, Result};
use crate::topology::{NodeId, Side, Topology};

/// Interval routing on the complete bipartite graph; the destination must lie in `W`.
#[derive(Debug, Clone, Copy, Default)]
pub struct IntervalBipartite;

impl FailoverProtocol for IntervalBipartite {
    fn name(&self) -> &str {
        "pb"
    }

    fn distribution(&self, topo: &Topology, v: NodeId, failed: &[NodeId], d: NodeId) -> Result<FailoverDistribution> {
        let Topology::Bipartite(t) = topo else {
            return Err(Error::param(format!("protocol pb needs a bipartite topology, got {}", topo.family())));
        };
        if !topo.contains(d) || t.side(d) != Side::W {
            return Err(Error::param(format!("destination {d} is not on side W")));
        }
        if v == d {
            return Err(Error::param("the destination has no failover entry"));
        }
        let k = t.intervals();
        let i = t.interval_of(v);
        Ok(match t.side(v) {
            Side::V if failed.binary_search(&d).is_err() => FailoverDistribution::PointMass(d),
            Side::V => FailoverDistribution::uniform_or_self(v, vec![t.interval_span(Side::W, i)], failed),
            Side::W => FailoverDistribution::uniform_or_self(v, vec![t.interval_span(Side::V, (i + 1) % k)], failed),
        })
    }
}

/// Interval routing on Clos topologies; the destination must lie on level `L`.
///
/// A node outside the blocks on the destination's path forwards upward into the next
/// interval of its parent-side cluster. A node on the path hops directly to the next
/// waypoint when that link is alive and otherwise bounces down into its own interval of
/// the vertical cluster.
#[derive(Debug, Clone, Copy, Default)]
pub struct IntervalClos;

impl FailoverProtocol for IntervalClos {
    fn name(&self) -> &str {
        "pc"
    }

    fn distribution(&self, topo: &Topology, v: NodeId, failed: &[NodeId], d: NodeId) -> Result<FailoverDistribution> {
        let Topology::Clos(t) = topo else {
            return Err(Error::param(format!("protocol pc needs a Clos topology, got {}", topo.family())));
        };
        let dloc = t.checked_destination(d)?;
        if v == d {
            return Err(Error::param("the destination has no failover entry"));
        }
        if !topo.contains(v) {
            return Err(Error::param(format!("node {v} outside the topology")));
        }
        let loc = t.locate(v);
        let k = u64::from(t.intervals());
        let on_path = t.destination_prefix_block(dloc.block, loc.level) == loc.block;
        if !on_path {
            // Level 0 is always on the path, so a parent exists here.
            let (parent, child) = t.parent_of(loc.level, loc.block);
            let width = t.vertical_interval_width(loc.level - 1);
            let next = (child / width + 1) % k;
            let span = t.cluster_span(loc.level - 1, parent, loc.pos, Some(next));
            return Ok(FailoverDistribution::uniform_or_self(v, vec![span], failed));
        }
        let cluster = loc.pos / t.half();
        let target = t.global(loc.level + 1, t.destination_prefix_block(dloc.block, loc.level + 1), cluster);
        if failed.binary_search(&target).is_err() {
            return Ok(FailoverDistribution::PointMass(target));
        }
        let j = (loc.pos % t.half()) / u64::from(t.interval_size());
        let span = t.vertical_span(loc.level, loc.block, cluster, Some(j));
        Ok(FailoverDistribution::uniform_or_self(v, vec![span], failed))
    }
}
