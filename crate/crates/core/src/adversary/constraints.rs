//! Failure budgets of the interval protocols.
//!
//! For every interval and every node on the other side of the complete bipartite piece the
//! interval belongs to, at most `floor(I / 3)` interval members may have lost their link to
//! that node. Both orientations of each complete bipartite piece are checked.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::failure::FailureSet;
use crate::topology::{NodeId, Side, Topology};

/// `(orientation, level, block, cluster, interval)` plus the counterpart node.
type Key = (u8, u32, u64, u64, u64, NodeId);

/// Incremental per-(interval, counterpart) failure counter.
#[derive(Debug, Clone)]
pub struct ConstraintTracker {
    topo: Topology,
    limit: u32,
    counts: HashMap<Key, u32>,
}

impl ConstraintTracker {
    /// `None` for families without an interval partition.
    pub fn new(topo: &Topology) -> Option<Self> {
        let i = topo.interval_size()?;
        Some(ConstraintTracker { topo: topo.clone(), limit: i / 3, counts: HashMap::new() })
    }

    /// `floor(I / 3)`.
    pub fn limit(&self) -> u32 {
        self.limit
    }

    fn keys(&self, a: NodeId, b: NodeId) -> [Key; 2] {
        match &self.topo {
            Topology::Bipartite(t) => {
                let (v, w) = if t.side(a) == Side::V { (a, b) } else { (b, a) };
                [
                    (0, 0, 0, 0, u64::from(t.interval_of(v)), w),
                    (1, 0, 0, 0, u64::from(t.interval_of(w)), v),
                ]
            }
            Topology::Clos(t) => {
                let (la, lb) = (t.locate(a), t.locate(b));
                let ((x, lx), (y, ly)) = if la.level < lb.level { ((a, la), (b, lb)) } else { ((b, lb), (a, la)) };
                let h = t.half();
                let cluster = lx.pos / h;
                let upper_interval = (lx.pos % h) / u64::from(t.interval_size());
                let (_, child) = t.parent_of(ly.level, ly.block);
                let lower_interval = child / t.vertical_interval_width(lx.level);
                [
                    (0, lx.level, lx.block, cluster, upper_interval, y),
                    (1, lx.level, lx.block, cluster, lower_interval, x),
                ]
            }
            Topology::Clique(_) => unreachable!("cliques carry no intervals"),
        }
    }

    /// Records the failed edge if both of its counters stay within the limit.
    pub fn try_add(&mut self, a: NodeId, b: NodeId) -> bool {
        let keys = self.keys(a, b);
        if keys.iter().any(|k| self.counts.get(k).copied().unwrap_or(0) >= self.limit) {
            return false;
        }
        for k in keys {
            *self.counts.entry(k).or_insert(0) += 1;
        }
        true
    }

    /// Records the failed edge unconditionally.
    pub fn add(&mut self, a: NodeId, b: NodeId) {
        for k in self.keys(a, b) {
            *self.counts.entry(k).or_insert(0) += 1;
        }
    }

    pub fn max_count(&self) -> u32 {
        self.counts.values().copied().max().unwrap_or(0)
    }

    pub fn is_valid(&self) -> bool {
        self.max_count() <= self.limit
    }
}

fn validate(f: &FailureSet, topo: &Topology) -> bool {
    let mut t = ConstraintTracker::new(topo).expect("interval topology");
    for (a, b) in f.edges() {
        t.add(a, b);
    }
    t.is_valid()
}

pub fn validate_bipartite_constraints(f: &FailureSet, topo: &Topology) -> Result<bool> {
    match topo {
        Topology::Bipartite(_) => Ok(validate(f, topo)),
        _ => Err(Error::param(format!("bipartite constraints on a {} topology", topo.family()))),
    }
}

pub fn validate_clos_constraints(f: &FailureSet, topo: &Topology) -> Result<bool> {
    match topo {
        Topology::Clos(_) => Ok(validate(f, topo)),
        _ => Err(Error::param(format!("Clos constraints on a {} topology", topo.family()))),
    }
}

/// Constraints of whichever interval family `topo` is; cliques are unconstrained.
pub fn validate_constraints(f: &FailureSet, topo: &Topology) -> bool {
    match topo {
        Topology::Clique(_) => true,
        _ => validate(f, topo),
    }
}
