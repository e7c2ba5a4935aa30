use serde::{Deserialize, Serialize};

use super::NodeId;

/// An arithmetic progression of node ids `start, start + stride, ...` with `len` members.
///
/// Clusters and intervals are contiguous (stride 1); vertical clusters pick the same
/// position out of every child block and therefore have the child-block size as stride.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub start: u32,
    pub stride: u32,
    pub len: u32,
}

impl Span {
    pub fn contiguous(start: u32, len: u32) -> Self {
        Span { start, stride: 1, len }
    }

    pub fn strided(start: u32, stride: u32, len: u32) -> Self {
        Span { start, stride, len }
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn nth(&self, i: u32) -> NodeId {
        debug_assert!(i < self.len);
        NodeId(self.start + i * self.stride)
    }

    /// Position of `v` inside the progression, if it is a member.
    pub fn position(&self, v: NodeId) -> Option<u32> {
        let x = v.0;
        if self.len == 0 || x < self.start {
            return None;
        }
        let delta = x - self.start;
        if delta % self.stride != 0 {
            return None;
        }
        let i = delta / self.stride;
        (i < self.len).then_some(i)
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.position(v).is_some()
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.len).map(move |i| self.nth(i))
    }
}
