use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::{NodeId, Topology};

/// A sparse set of failed undirected edges with a per-node view `F_v`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FailureSet {
    edges: BTreeSet<(NodeId, NodeId)>,
    incident: HashMap<NodeId, Vec<NodeId>>,
}

fn normalized(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl FailureSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_edges<I>(topo: &Topology, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut f = FailureSet::new();
        for (a, b) in edges {
            f.insert(topo, a, b)?;
        }
        Ok(f)
    }

    /// Adds a failed edge; returns `false` when it was already present.
    pub fn insert(&mut self, topo: &Topology, a: NodeId, b: NodeId) -> Result<bool> {
        if !topo.is_edge(a, b) {
            return Err(Error::NotAnEdge(a, b));
        }
        Ok(self.insert_unchecked(a, b))
    }

    pub(crate) fn insert_unchecked(&mut self, a: NodeId, b: NodeId) -> bool {
        if !self.edges.insert(normalized(a, b)) {
            return false;
        }
        for (x, y) in [(a, b), (b, a)] {
            let list = self.incident.entry(x).or_default();
            let at = list.binary_search(&y).unwrap_or_else(|e| e);
            list.insert(at, y);
        }
        true
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, a: NodeId, b: NodeId) -> bool {
        self.edges.contains(&normalized(a, b))
    }

    /// `F_v`, sorted ascending.
    pub fn incident(&self, v: NodeId) -> &[NodeId] {
        self.incident.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Edges as `(smaller, larger)` pairs in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.edges.iter().copied()
    }

    /// Every failed edge has `d` as an endpoint.
    pub fn all_incident_to(&self, d: NodeId) -> bool {
        self.edges.iter().all(|&(a, b)| a == d || b == d)
    }

    /// Keeps only the edges that also exist in `topo`.
    pub fn restricted_to(&self, topo: &Topology) -> FailureSet {
        let mut f = FailureSet::new();
        for (a, b) in self.edges() {
            if topo.is_edge(a, b) {
                f.insert_unchecked(a, b);
            }
        }
        f
    }
}

impl Serialize for FailureSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let list: Vec<[u32; 2]> = self.edges.iter().map(|&(a, b)| [a.0, b.0]).collect();
        list.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FailureSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let list: Vec<[u32; 2]> = Vec::deserialize(d)?;
        let mut f = FailureSet::new();
        for [a, b] in list {
            if a == b {
                return Err(serde::de::Error::custom(format!("self-loop ({a}, {a}) cannot fail")));
            }
            f.insert_unchecked(NodeId(a), NodeId(b));
        }
        Ok(f)
    }
}
