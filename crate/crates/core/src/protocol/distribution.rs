use rand::Rng;
use rand::RngCore;

use crate::error::{Error, Result};
use crate::topology::{NodeId, Span};

/// Probability tolerance for explicitly weighted distributions.
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;

/// Uniform choice over a union of disjoint progressions minus an excluded set.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformChoice {
    pool: Vec<Span>,
    excluded: Vec<NodeId>,
    total: u64,
}

impl UniformChoice {
    pub fn count(&self) -> u64 {
        self.total - self.excluded.len() as u64
    }

    pub fn pool(&self) -> &[Span] {
        &self.pool
    }

    pub fn contains(&self, w: NodeId) -> bool {
        self.pool.iter().any(|s| s.contains(w)) && self.excluded.binary_search(&w).is_err()
    }

    fn pool_nth(&self, mut i: u64) -> NodeId {
        for s in &self.pool {
            if i < u64::from(s.len) {
                return s.nth(i as u32);
            }
            i -= u64::from(s.len);
        }
        unreachable!("index beyond the uniform pool")
    }

    pub fn members(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.pool
            .iter()
            .flat_map(|s| s.iter())
            .filter(move |w| self.excluded.binary_search(w).is_err())
    }

    fn sample(&self, rng: &mut dyn RngCore) -> NodeId {
        if self.excluded.is_empty() {
            return self.pool_nth(rng.random_range(0..self.total));
        }
        if (self.excluded.len() as u64) * 2 <= self.total {
            loop {
                let w = self.pool_nth(rng.random_range(0..self.total));
                if self.excluded.binary_search(&w).is_err() {
                    return w;
                }
            }
        }
        let i = rng.random_range(0..self.count()) as usize;
        self.members().nth(i).expect("uniform pool has survivors")
    }
}

/// `D(v, F_v, d)`: a finite distribution over `(Γ(v) \ F_v) ∪ {v}`.
#[derive(Debug, Clone, PartialEq)]
pub enum FailoverDistribution {
    PointMass(NodeId),
    Uniform(UniformChoice),
    /// Explicit `(node, probability)` pairs, sorted by node, summing to one.
    Weighted(Vec<(NodeId, f64)>),
}

impl FailoverDistribution {
    /// Uniform over `pool \ failed`, or the self-loop on `v` if nothing survives.
    pub fn uniform_or_self(v: NodeId, pool: Vec<Span>, failed: &[NodeId]) -> Self {
        let pool: Vec<Span> = pool.into_iter().filter(|s| !s.is_empty()).collect();
        let total: u64 = pool.iter().map(|s| u64::from(s.len)).sum();
        let excluded: Vec<NodeId> = failed.iter().copied().filter(|&w| pool.iter().any(|s| s.contains(w))).collect();
        let choice = UniformChoice { pool, excluded, total };
        match choice.count() {
            0 => FailoverDistribution::PointMass(v),
            1 => FailoverDistribution::PointMass(choice.members().next().expect("one survivor")),
            _ => FailoverDistribution::Uniform(choice),
        }
    }

    /// Explicit weights; entries with zero weight are dropped.
    pub fn weighted(mut entries: Vec<(NodeId, f64)>) -> Result<Self> {
        entries.retain(|&(_, p)| p > 0.0);
        entries.sort_by_key(|&(w, _)| w);
        entries.dedup_by(|a, b| {
            if a.0 == b.0 {
                b.1 += a.1;
                true
            } else {
                false
            }
        });
        let sum: f64 = entries.iter().map(|&(_, p)| p).sum();
        if entries.is_empty() || (sum - 1.0).abs() > PROBABILITY_TOLERANCE {
            return Err(Error::param(format!("weights sum to {sum}, expected 1")));
        }
        if entries.len() == 1 {
            return Ok(FailoverDistribution::PointMass(entries[0].0));
        }
        Ok(FailoverDistribution::Weighted(entries))
    }

    pub fn point_mass(&self) -> Option<NodeId> {
        match self {
            FailoverDistribution::PointMass(w) => Some(*w),
            _ => None,
        }
    }

    pub fn probability(&self, w: NodeId) -> f64 {
        match self {
            FailoverDistribution::PointMass(x) => f64::from(u8::from(*x == w)),
            FailoverDistribution::Uniform(u) => {
                if u.contains(w) {
                    1.0 / u.count() as f64
                } else {
                    0.0
                }
            }
            FailoverDistribution::Weighted(entries) => {
                entries.binary_search_by_key(&w, |&(x, _)| x).map(|i| entries[i].1).unwrap_or(0.0)
            }
        }
    }

    pub fn support_size(&self) -> usize {
        match self {
            FailoverDistribution::PointMass(_) => 1,
            FailoverDistribution::Uniform(u) => u.count() as usize,
            FailoverDistribution::Weighted(e) => e.len(),
        }
    }

    /// Full support with probabilities, sorted by node.
    pub fn support(&self) -> Vec<(NodeId, f64)> {
        match self {
            FailoverDistribution::PointMass(w) => vec![(*w, 1.0)],
            FailoverDistribution::Uniform(u) => {
                let p = 1.0 / u.count() as f64;
                let mut s: Vec<(NodeId, f64)> = u.members().map(|w| (w, p)).collect();
                s.sort_by_key(|&(w, _)| w);
                s
            }
            FailoverDistribution::Weighted(e) => e.clone(),
        }
    }

    /// Support entries whose probability strictly exceeds `threshold`, without enumerating
    /// large uniform pools whose common probability is too small.
    pub fn heavy_targets(&self, threshold: f64) -> Vec<(NodeId, f64)> {
        match self {
            FailoverDistribution::Uniform(u) if 1.0 / (u.count() as f64) <= threshold => Vec::new(),
            _ => self.support().into_iter().filter(|&(_, p)| p > threshold).collect(),
        }
    }

    pub fn sample(&self, rng: &mut dyn RngCore) -> NodeId {
        match self {
            FailoverDistribution::PointMass(w) => *w,
            FailoverDistribution::Uniform(u) => u.sample(rng),
            FailoverDistribution::Weighted(entries) => {
                let x: f64 = rng.random();
                let mut acc = 0.0;
                for &(w, p) in entries {
                    acc += p;
                    if x < acc {
                        return w;
                    }
                }
                entries.last().expect("non-empty weights").0
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn uniform_excludes_failed_members() {
        let d = FailoverDistribution::uniform_or_self(
            NodeId(100),
            vec![Span::contiguous(0, 8)],
            &[NodeId(1), NodeId(3), NodeId(42)],
        );
        assert_eq!(d.support_size(), 6);
        assert!((d.probability(NodeId(0)) - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(d.probability(NodeId(1)), 0.0);
        assert_eq!(d.probability(NodeId(42)), 0.0);
        let total: f64 = d.support().iter().map(|&(_, p)| p).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_pool_is_the_self_loop() {
        let d = FailoverDistribution::uniform_or_self(NodeId(9), vec![Span::contiguous(0, 2)], &[NodeId(0), NodeId(1)]);
        assert_eq!(d, FailoverDistribution::PointMass(NodeId(9)));
    }

    #[test]
    fn sampling_stays_in_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        // dense exclusion exercises the enumeration branch
        let failed: Vec<NodeId> = (0..9).map(NodeId).collect();
        let d = FailoverDistribution::uniform_or_self(NodeId(50), vec![Span::contiguous(0, 12)], &failed);
        for _ in 0..200 {
            let w = d.sample(&mut rng);
            assert!(w.0 >= 9 && w.0 < 12);
        }
        let d = FailoverDistribution::uniform_or_self(NodeId(50), vec![Span::strided(1, 10, 5)], &[NodeId(11)]);
        for _ in 0..200 {
            let w = d.sample(&mut rng);
            assert!([1, 21, 31, 41].contains(&w.0));
        }
    }

    #[test]
    fn heavy_targets_skip_thin_uniforms() {
        let d = FailoverDistribution::uniform_or_self(NodeId(0), vec![Span::contiguous(1, 1000)], &[]);
        assert!(d.heavy_targets(0.01).is_empty());
        assert_eq!(d.heavy_targets(0.0001).len(), 1000);
        let w = FailoverDistribution::weighted(vec![(NodeId(3), 0.5), (NodeId(1), 0.5)]).unwrap();
        assert_eq!(w.heavy_targets(0.25).len(), 2);
        assert!(FailoverDistribution::weighted(vec![(NodeId(3), 0.5)]).is_err());
    }
}
