use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::constraints::ConstraintTracker;
use crate::error::{Error, Result};
use crate::failure::FailureSet;
use crate::protocol::FailoverProtocol;
use crate::topology::{NodeId, Topology};

/// A uniformly random `budget`-subset of the edges at `d`.
pub fn random_attack_incident_to_d(topo: &Topology, d: NodeId, budget: usize, seed: u64) -> Result<FailureSet> {
    if !topo.contains(d) {
        return Err(Error::param(format!("destination {d} outside the topology")));
    }
    let neighbors = topo.neighbors(d);
    if budget > neighbors.len() {
        return Err(Error::param(format!("budget {budget} exceeds the degree {} of {d}", neighbors.len())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = index::sample(&mut rng, neighbors.len(), budget).into_vec();
    picked.sort_unstable();
    let mut f = FailureSet::new();
    for i in picked {
        f.insert_unchecked(neighbors[i], d);
    }
    Ok(f)
}

/// Random failures at `d` inside the complete bipartite piece joining `d` to its parent
/// block, with at most `floor(I / 3)` edges.
pub fn clos_bipartite_attack(topo: &Topology, d: NodeId, budget: usize, seed: u64) -> Result<FailureSet> {
    let Topology::Clos(t) = topo else {
        return Err(Error::param(format!("Clos attack on a {} topology", topo.family())));
    };
    t.checked_destination(d)?;
    let limit = (t.interval_size() / 3) as usize;
    if budget > limit {
        return Err(Error::param(format!("budget {budget} exceeds floor(I/3) = {limit}")));
    }
    random_attack_incident_to_d(topo, d, budget, seed)
}

/// Random failures that respect the interval constraints of `topo`.
///
/// Half of the attempts target critical links, the point-mass hops `protocol` takes when
/// nothing has failed; the rest pick a uniform node and a uniform neighbor. Attempts that
/// would break a constraint are skipped, and the search stops after `50 * budget` attempts.
pub fn constrained_random_attack(
    topo: &Topology,
    protocol: &dyn FailoverProtocol,
    d: NodeId,
    budget: usize,
    seed: u64,
) -> Result<FailureSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tracker = ConstraintTracker::new(topo);
    let n = topo.node_count();
    let mut f = FailureSet::new();
    let mut attempts = 0;
    while f.len() < budget && attempts < 50 * budget {
        attempts += 1;
        let v = NodeId(rng.random_range(0..n as u32));
        let w = if rng.random_bool(0.5) {
            if v == d {
                continue;
            }
            match protocol.distribution(topo, v, &[], d)?.point_mass() {
                Some(w) if w != v => w,
                _ => continue,
            }
        } else {
            let spans = topo.neighbor_spans(v);
            let deg: u32 = spans.iter().map(|s| s.len).sum();
            if deg == 0 {
                continue;
            }
            let mut i = rng.random_range(0..deg);
            let mut pick = None;
            for s in &spans {
                if i < s.len {
                    pick = Some(s.nth(i));
                    break;
                }
                i -= s.len;
            }
            pick.expect("index within degree")
        };
        if f.contains(v, w) {
            continue;
        }
        if tracker.as_mut().is_none_or(|t| t.try_add(v, w)) {
            f.insert_unchecked(v, w);
        }
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn incident_attack_sizes() {
        let t = Topology::clique(10).unwrap();
        let d = NodeId(9);
        assert!(random_attack_incident_to_d(&t, d, 0, 1).unwrap().is_empty());
        let all = random_attack_incident_to_d(&t, d, 9, 1).unwrap();
        assert_eq!(all.len(), 9);
        assert!(all.all_incident_to(d));
        assert_eq!(random_attack_incident_to_d(&t, d, 4, 5).unwrap(), random_attack_incident_to_d(&t, d, 4, 5).unwrap());
        assert!(random_attack_incident_to_d(&t, d, 10, 1).is_err());
    }

    #[test]
    fn clos_attack_budget() {
        let t = Topology::clos(12, 2, Some(1)).unwrap(); // I = 6, limit 2
        let d = t.default_destination();
        assert_eq!(clos_bipartite_attack(&t, d, 2, 3).unwrap().len(), 2);
        assert!(clos_bipartite_attack(&t, d, 3, 3).is_err());
    }
}
