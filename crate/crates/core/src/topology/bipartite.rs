//! Complete bipartite graph `V ∪ W` with `n` nodes per side, each side cut into `K`
//! consecutive intervals of size `I = n / K`.
//!
//! Node ids `0..n` are the side `V`, ids `n..2n` are the side `W`.

use serde::{Deserialize, Serialize};

use super::{nearest_divisor, NodeId, Span};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    V,
    W,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BipartiteNode {
    pub side: Side,
    /// 1-based position on its side.
    pub index: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BipartiteParams {
    pub n: u32,
    /// Interval-count multiplier `C`; only used for the default `K`.
    pub c: f64,
    pub intervals: u32,
    pub interval_size: u32,
}

impl BipartiteParams {
    /// `round(C lg n)`, moved to the nearest divisor of `n`.
    pub fn default_intervals(n: u32, c: f64) -> u32 {
        let target = (c * f64::from(n).log2()).round().max(1.0) as u64;
        nearest_divisor(u64::from(n), target) as u32
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteTopology {
    params: BipartiteParams,
}

impl BipartiteTopology {
    pub fn new(n: u32, c: f64, intervals_override: Option<u32>) -> Result<Self> {
        if n == 0 || n > u32::MAX / 2 {
            return Err(Error::param(format!("bipartite side size {n} out of range")));
        }
        let intervals = match intervals_override {
            Some(0) => return Err(Error::param("interval count must be positive")),
            Some(kk) if n % kk != 0 => {
                return Err(Error::param(format!("interval count {kk} does not divide n = {n}")))
            }
            Some(kk) => kk,
            None => {
                if !(c > 4.0) {
                    return Err(Error::param(format!("interval multiplier C must exceed 4, got {c}")));
                }
                BipartiteParams::default_intervals(n, c)
            }
        };
        Ok(BipartiteTopology {
            params: BipartiteParams { n, c, intervals, interval_size: n / intervals },
        })
    }

    pub fn params(&self) -> BipartiteParams {
        self.params
    }

    pub fn n(&self) -> u32 {
        self.params.n
    }

    pub fn intervals(&self) -> u32 {
        self.params.intervals
    }

    pub fn interval_size(&self) -> u32 {
        self.params.interval_size
    }

    pub fn node_count(&self) -> usize {
        2 * self.params.n as usize
    }

    pub fn node(&self, side: Side, index: u32) -> Result<NodeId> {
        if index == 0 || index > self.params.n {
            return Err(Error::param(format!("no bipartite node {side:?}{index}")));
        }
        Ok(match side {
            Side::V => NodeId(index - 1),
            Side::W => NodeId(self.params.n + index - 1),
        })
    }

    pub fn coords(&self, v: NodeId) -> BipartiteNode {
        if v.0 < self.params.n {
            BipartiteNode { side: Side::V, index: v.0 + 1 }
        } else {
            BipartiteNode { side: Side::W, index: v.0 - self.params.n + 1 }
        }
    }

    pub fn side(&self, v: NodeId) -> Side {
        if v.0 < self.params.n {
            Side::V
        } else {
            Side::W
        }
    }

    /// 0-based interval of `v` on its own side.
    pub fn interval_of(&self, v: NodeId) -> u32 {
        (v.0 % self.params.n) / self.params.interval_size
    }

    /// `V(i)` or `W(i)`, `i` 0-based.
    pub fn interval_span(&self, side: Side, i: u32) -> Span {
        let base = match side {
            Side::V => 0,
            Side::W => self.params.n,
        };
        let size = self.params.interval_size;
        Span::contiguous(base + (i % self.params.intervals) * size, size)
    }

    pub fn side_span(&self, side: Side) -> Span {
        match side {
            Side::V => Span::contiguous(0, self.params.n),
            Side::W => Span::contiguous(self.params.n, self.params.n),
        }
    }

    pub fn neighbor_spans(&self, v: NodeId) -> Vec<Span> {
        match self.side(v) {
            Side::V => vec![self.side_span(Side::W)],
            Side::W => vec![self.side_span(Side::V)],
        }
    }

    pub fn is_edge(&self, a: NodeId, b: NodeId) -> bool {
        let n2 = 2 * self.params.n;
        a.0 < n2 && b.0 < n2 && self.side(a) != self.side(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_intervals_round_to_divisor() {
        // 5 lg 4096 = 60 -> 64
        let t = BipartiteTopology::new(4096, 5.0, None).unwrap();
        assert_eq!((t.intervals(), t.interval_size()), (64, 64));
        assert!(BipartiteTopology::new(64, 4.0, None).is_err());
        assert!(BipartiteTopology::new(64, 4.0, Some(8)).is_ok());
        assert!(BipartiteTopology::new(64, 5.0, Some(7)).is_err());
    }

    #[test]
    fn intervals_partition_sides() {
        let t = BipartiteTopology::new(48, 5.0, Some(6)).unwrap();
        let mut seen: Vec<u32> = (0..6)
            .flat_map(|i| t.interval_span(Side::W, i).iter().map(|v| v.0).collect::<Vec<_>>())
            .collect();
        seen.sort_unstable();
        assert_eq!(seen, (48..96).collect::<Vec<_>>());
        for v in t.interval_span(Side::V, 4).iter() {
            assert_eq!(t.interval_of(v), 4);
        }
    }

    #[test]
    fn complete_bipartite_neighbors() {
        let t = BipartiteTopology::new(4, 5.0, Some(1)).unwrap();
        let v = t.node(Side::V, 2).unwrap();
        let ns: Vec<_> = t.neighbor_spans(v).iter().flat_map(|s| s.iter().collect::<Vec<_>>()).collect();
        assert_eq!(ns, (4..8).map(NodeId).collect::<Vec<_>>());
        assert!(!t.is_edge(v, NodeId(0)));
        assert!(t.is_edge(v, NodeId(7)));
    }
}
