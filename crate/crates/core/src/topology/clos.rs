//! Clos topology with degree `k` and levels `0..=L`.
//!
//! Level 0 holds `(k/2)^L` nodes and every level `1..=L` holds `2 (k/2)^L` nodes. Nodes of
//! level `l` are grouped into blocks `B(S)` addressed by sequences `S` of length `l`; a
//! block holds `(k/2)^(L-l)` consecutive nodes and is split into clusters of `k/2` nodes.
//! Cluster `C(S, i)` is completely connected to the vertical cluster `VC(S, i)`, the `i`-th
//! node of every child block of `B(S)`. Nothing is materialized: all membership and
//! adjacency questions are answered by index arithmetic.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{nearest_divisor, NodeId, Span};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosParams {
    /// Node degree (even).
    pub k: u32,
    /// Deepest level `L`; the topology has levels `0..=L`.
    pub levels: u32,
    /// Number of intervals `K` per cluster.
    pub intervals: u32,
    /// Interval size `I`, with `intervals * interval_size == k / 2`.
    pub interval_size: u32,
}

impl ClosParams {
    /// `round((4 + L) lg k)`, moved to the nearest divisor of `k/2`.
    pub fn default_intervals(k: u32, levels: u32) -> u32 {
        let target = (f64::from(4 + levels) * f64::from(k).log2()).round() as u64;
        nearest_divisor(u64::from(k / 2), target) as u32
    }
}

/// A block sequence `(s_1, ..., s_l)` with `s_1 in [1, k]` and `s_i in [1, k/2]` for `i > 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Sequence(Vec<u32>);

impl Sequence {
    pub fn empty() -> Self {
        Sequence(Vec::new())
    }

    pub fn new(entries: impl Into<Vec<u32>>) -> Self {
        Sequence(entries.into())
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The length-`i` prefix (the whole sequence if `i >= len`).
    pub fn prefix(&self, i: usize) -> Sequence {
        Sequence(self.0[..i.min(self.0.len())].to_vec())
    }

    pub fn is_prefix_of(&self, other: &Sequence) -> bool {
        other.0.starts_with(&self.0)
    }

    /// `S ∘ c`
    pub fn child(&self, c: u32) -> Sequence {
        let mut entries = self.0.clone();
        entries.push(c);
        Sequence(entries)
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "∅");
        }
        write!(f, "(")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, ")")
    }
}

/// A node addressed by level and 1-based position inside the level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClosNode {
    pub level: u32,
    pub index: u64,
}

/// Zero-based coordinates of a node: its level, the index of its block among the blocks
/// of that level, and its position inside the block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Location {
    pub level: u32,
    pub block: u64,
    pub pos: u64,
}

/// Consecutive nodes of one level, 1-based and inclusive like the block definition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockRange {
    pub level: u32,
    pub first: u64,
    pub len: u64,
    span: Span,
}

impl BlockRange {
    pub fn last(&self) -> u64 {
        self.first + self.len - 1
    }

    pub fn span(&self) -> Span {
        self.span
    }

    pub fn nodes(&self) -> Vec<NodeId> {
        self.span.iter().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosTopology {
    params: ClosParams,
    half: u64,
    /// `pow[j] = (k/2)^j` for `j in 0..=L`.
    pow: Vec<u64>,
    offsets: Vec<u64>,
    sizes: Vec<u64>,
    total: u64,
}

impl ClosTopology {
    pub fn new(k: u32, levels: u32, intervals_override: Option<u32>) -> Result<Self> {
        if k < 4 || k % 2 != 0 {
            return Err(Error::param(format!("Clos degree k must be even and >= 4, got {k}")));
        }
        if levels < 1 {
            return Err(Error::param("Clos topology needs L >= 1"));
        }
        let half = u64::from(k / 2);
        let intervals = match intervals_override {
            Some(0) => return Err(Error::param("interval count must be positive")),
            Some(kk) if half % u64::from(kk) != 0 => {
                return Err(Error::param(format!("interval count {kk} does not divide k/2 = {half}")))
            }
            Some(kk) => kk,
            None => ClosParams::default_intervals(k, levels),
        };
        let interval_size = (half / u64::from(intervals)) as u32;

        let overflow = || Error::param(format!("Clos(k={k}, L={levels}) has too many nodes"));
        let mut pow = Vec::with_capacity(levels as usize + 1);
        let mut p = 1u64;
        for _ in 0..=levels {
            pow.push(p);
            p = p.checked_mul(half).ok_or_else(overflow)?;
        }
        let top = pow[levels as usize];
        let mut offsets = Vec::with_capacity(levels as usize + 1);
        let mut sizes = Vec::with_capacity(levels as usize + 1);
        let mut total = 0u64;
        for level in 0..=levels {
            let size = if level == 0 { top } else { top.checked_mul(2).ok_or_else(overflow)? };
            offsets.push(total);
            sizes.push(size);
            total = total.checked_add(size).ok_or_else(overflow)?;
        }
        if total > u64::from(u32::MAX) {
            return Err(overflow());
        }
        Ok(ClosTopology {
            params: ClosParams { k, levels, intervals, interval_size },
            half,
            pow,
            offsets,
            sizes,
            total,
        })
    }

    pub fn params(&self) -> ClosParams {
        self.params
    }

    pub fn k(&self) -> u32 {
        self.params.k
    }

    pub fn levels(&self) -> u32 {
        self.params.levels
    }

    pub fn half(&self) -> u64 {
        self.half
    }

    pub fn intervals(&self) -> u32 {
        self.params.intervals
    }

    pub fn interval_size(&self) -> u32 {
        self.params.interval_size
    }

    pub fn node_count(&self) -> usize {
        self.total as usize
    }

    pub fn level_sizes(&self) -> Vec<u64> {
        self.sizes.clone()
    }

    pub fn block_size(&self, level: u32) -> u64 {
        self.pow[(self.params.levels - level) as usize]
    }

    pub fn block_count(&self, level: u32) -> u64 {
        if level == 0 {
            1
        } else {
            u64::from(self.params.k) * self.pow[level as usize - 1]
        }
    }

    /// Clusters per block at `level`; blocks on level `L` are single nodes without clusters.
    pub fn clusters_per_block(&self, level: u32) -> u64 {
        if level >= self.params.levels {
            0
        } else {
            self.block_size(level) / self.half
        }
    }

    pub fn children_per_block(&self, level: u32) -> u64 {
        if level == 0 {
            u64::from(self.params.k)
        } else {
            self.half
        }
    }

    /// Width of one interval of a vertical cluster hanging below `level`
    /// (`2I` below level 0, whose block has `k` children).
    pub fn vertical_interval_width(&self, level: u32) -> u64 {
        let i = u64::from(self.params.interval_size);
        if level == 0 {
            2 * i
        } else {
            i
        }
    }

    pub fn node(&self, level: u32, index: u64) -> Result<NodeId> {
        if level > self.params.levels || index == 0 || index > self.sizes[level as usize] {
            return Err(Error::param(format!("no Clos node with level {level} and index {index}")));
        }
        Ok(NodeId((self.offsets[level as usize] + index - 1) as u32))
    }

    pub fn coords(&self, v: NodeId) -> ClosNode {
        let level = self.level_of(v);
        ClosNode { level, index: u64::from(v.0) - self.offsets[level as usize] + 1 }
    }

    pub fn level_of(&self, v: NodeId) -> u32 {
        let x = u64::from(v.0);
        debug_assert!(x < self.total);
        // At most L + 1 levels; a linear scan beats a binary search here.
        let mut level = 0;
        while (level as usize + 1) < self.offsets.len() && self.offsets[level as usize + 1] <= x {
            level += 1;
        }
        level
    }

    pub fn locate(&self, v: NodeId) -> Location {
        let level = self.level_of(v);
        let idx = u64::from(v.0) - self.offsets[level as usize];
        let bs = self.block_size(level);
        Location { level, block: idx / bs, pos: idx % bs }
    }

    pub(crate) fn global(&self, level: u32, block: u64, pos: u64) -> NodeId {
        NodeId((self.offsets[level as usize] + block * self.block_size(level) + pos) as u32)
    }

    /// Parent block index and 0-based child number of a block on `level >= 1`.
    pub fn parent_of(&self, level: u32, block: u64) -> (u64, u64) {
        debug_assert!(level >= 1);
        if level == 1 {
            (0, block)
        } else {
            (block / self.half, block % self.half)
        }
    }

    pub(crate) fn first_child(&self, level: u32, block: u64) -> u64 {
        if level == 0 {
            0
        } else {
            block * self.half
        }
    }

    /// Nodes of cluster `cluster` (0-based) of a block, optionally restricted to interval `interval`.
    pub fn cluster_span(&self, level: u32, block: u64, cluster: u64, interval: Option<u64>) -> Span {
        let start = self.global(level, block, cluster * self.half).0;
        match interval {
            Some(j) => {
                let i = self.params.interval_size;
                Span::contiguous(start + (j as u32) * i, i)
            }
            None => Span::contiguous(start, self.half as u32),
        }
    }

    /// Vertical cluster `cluster` (0-based) below a block, optionally restricted to an interval.
    pub fn vertical_span(&self, level: u32, block: u64, cluster: u64, interval: Option<u64>) -> Span {
        let child_size = self.block_size(level + 1);
        let first = self.first_child(level, block);
        let (c0, len) = match interval {
            Some(j) => {
                let w = self.vertical_interval_width(level);
                (j * w, w)
            }
            None => (0, self.children_per_block(level)),
        };
        let start = self.offsets[level as usize + 1] + (first + c0) * child_size + cluster;
        Span::strided(start as u32, child_size as u32, len as u32)
    }

    fn check_sequence(&self, s: &Sequence) -> Result<()> {
        let k = self.params.k;
        if s.len() > self.params.levels as usize {
            return Err(Error::param(format!("sequence {s} longer than L = {}", self.params.levels)));
        }
        for (i, &e) in s.entries().iter().enumerate() {
            let max = if i == 0 { k } else { k / 2 };
            if e == 0 || e > max {
                return Err(Error::param(format!("sequence {s}: entry {} must lie in [1, {max}]", i + 1)));
            }
        }
        Ok(())
    }

    /// Index of `B(S)` among the blocks of level `|S|`.
    pub fn block_index(&self, s: &Sequence) -> Result<u64> {
        self.check_sequence(s)?;
        let l = s.len();
        Ok(s.entries()
            .iter()
            .enumerate()
            .map(|(i, &e)| u64::from(e - 1) * self.pow[l - 1 - i])
            .sum())
    }

    pub fn block_sequence(&self, level: u32, block: u64) -> Sequence {
        let mut entries = vec![0u32; level as usize];
        let mut b = block;
        for slot in entries.iter_mut().skip(1).rev() {
            *slot = (b % self.half) as u32 + 1;
            b /= self.half;
        }
        if level > 0 {
            entries[0] = b as u32 + 1;
        }
        Sequence(entries)
    }

    pub fn sequence_of(&self, v: NodeId) -> Sequence {
        let loc = self.locate(v);
        self.block_sequence(loc.level, loc.block)
    }

    pub fn block_nodes(&self, s: &Sequence) -> Result<BlockRange> {
        let block = self.block_index(s)?;
        let level = s.len() as u32;
        let len = self.block_size(level);
        let first = block * len + 1;
        let span = Span::contiguous(self.global(level, block, 0).0, len as u32);
        Ok(BlockRange { level, first, len, span })
    }

    fn cluster_args(&self, s: &Sequence, i: u64) -> Result<(u32, u64, u64)> {
        let block = self.block_index(s)?;
        let level = s.len() as u32;
        if level >= self.params.levels {
            return Err(Error::param(format!("blocks on level L have no clusters (S = {s})")));
        }
        let m = self.clusters_per_block(level);
        if i == 0 || i > m {
            return Err(Error::param(format!("cluster index {i} outside [1, {m}] for B({s})")));
        }
        Ok((level, block, i - 1))
    }

    fn check_interval(&self, j: u64) -> Result<()> {
        if j >= u64::from(self.params.intervals) {
            return Err(Error::param(format!(
                "interval index {j} outside [0, {})",
                self.params.intervals
            )));
        }
        Ok(())
    }

    /// `C(S, i)`, `i` 1-based.
    pub fn cluster_nodes(&self, s: &Sequence, i: u64) -> Result<Vec<NodeId>> {
        let (level, block, c) = self.cluster_args(s, i)?;
        Ok(self.cluster_span(level, block, c, None).iter().collect())
    }

    /// `VC(S, i)`, `i` 1-based: the `i`-th node of every child block of `B(S)`.
    pub fn vertical_cluster_nodes(&self, s: &Sequence, i: u64) -> Result<Vec<NodeId>> {
        let (level, block, c) = self.cluster_args(s, i)?;
        Ok(self.vertical_span(level, block, c, None).iter().collect())
    }

    /// `C(S, i, j)`, `i` 1-based and `j` 0-based.
    pub fn interval_nodes(&self, s: &Sequence, i: u64, j: u64) -> Result<Vec<NodeId>> {
        let (level, block, c) = self.cluster_args(s, i)?;
        self.check_interval(j)?;
        Ok(self.cluster_span(level, block, c, Some(j)).iter().collect())
    }

    /// `VC(S, i, j)`, `i` 1-based and `j` 0-based.
    pub fn vertical_interval_nodes(&self, s: &Sequence, i: u64, j: u64) -> Result<Vec<NodeId>> {
        let (level, block, c) = self.cluster_args(s, i)?;
        self.check_interval(j)?;
        Ok(self.vertical_span(level, block, c, Some(j)).iter().collect())
    }

    pub fn destination_sequence(&self, d: NodeId) -> Result<Sequence> {
        let loc = self.checked_destination(d)?;
        Ok(self.block_sequence(loc.level, loc.block))
    }

    pub(crate) fn checked_destination(&self, d: NodeId) -> Result<Location> {
        if u64::from(d.0) >= self.total {
            return Err(Error::param(format!("node {d} outside the topology")));
        }
        let loc = self.locate(d);
        if loc.level != self.params.levels {
            return Err(Error::param(format!("destination {d} is on level {}, not L", loc.level)));
        }
        Ok(loc)
    }

    /// Block index of `B(S_d|level)` for a destination with level-`L` block index `d_block`.
    pub fn destination_prefix_block(&self, d_block: u64, level: u32) -> u64 {
        if level == 0 {
            0
        } else {
            d_block / self.block_size(level)
        }
    }

    /// `d_{level, j}`: the `j`-th node (1-based) of `B(S_d|level)`.
    pub fn waypoint(&self, d: NodeId, level: u32, j: u64) -> Result<NodeId> {
        let loc = self.checked_destination(d)?;
        if level > self.params.levels || j == 0 || j > self.block_size(level) {
            return Err(Error::param(format!("no waypoint d_({level},{j})")));
        }
        let block = self.destination_prefix_block(loc.block, level);
        Ok(self.global(level, block, j - 1))
    }

    pub fn neighbor_spans(&self, v: NodeId) -> Vec<Span> {
        let loc = self.locate(v);
        let mut spans = Vec::with_capacity(2);
        if loc.level >= 1 {
            let (pb, _) = self.parent_of(loc.level, loc.block);
            spans.push(self.cluster_span(loc.level - 1, pb, loc.pos, None));
        }
        if loc.level < self.params.levels {
            spans.push(self.vertical_span(loc.level, loc.block, loc.pos / self.half, None));
        }
        spans
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.neighbor_spans(v).iter().map(|s| s.len as usize).sum()
    }

    pub fn is_edge(&self, a: NodeId, b: NodeId) -> bool {
        if u64::from(a.0) >= self.total || u64::from(b.0) >= self.total {
            return false;
        }
        let (la, lb) = (self.locate(a), self.locate(b));
        let (upper, lower) = if la.level + 1 == lb.level {
            (la, lb)
        } else if lb.level + 1 == la.level {
            (lb, la)
        } else {
            return false;
        };
        let (pb, _) = self.parent_of(lower.level, lower.block);
        upper.block == pb && upper.pos / self.half == lower.pos
    }
}
