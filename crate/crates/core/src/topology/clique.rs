use serde::{Deserialize, Serialize};

use super::{NodeId, Span};
use crate::error::{Error, Result};

/// Complete graph on `n` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliqueTopology {
    n: u32,
}

impl CliqueTopology {
    pub fn new(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::param(format!("clique needs at least two nodes, got {n}")));
        }
        Ok(CliqueTopology { n })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn node_count(&self) -> usize {
        self.n as usize
    }

    pub fn neighbor_spans(&self, v: NodeId) -> Vec<Span> {
        let mut spans = Vec::with_capacity(2);
        if v.0 > 0 {
            spans.push(Span::contiguous(0, v.0));
        }
        if v.0 + 1 < self.n {
            spans.push(Span::contiguous(v.0 + 1, self.n - v.0 - 1));
        }
        spans
    }

    pub fn is_edge(&self, a: NodeId, b: NodeId) -> bool {
        a != b && a.0 < self.n && b.0 < self.n
    }
}
