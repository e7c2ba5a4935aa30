//! Brute-force references shared by the integration tests. None of these reuse the
//! library's fast paths beyond single adjacency queries.

#![allow(dead_code)]

pub mod structural;

use std::collections::VecDeque;

use failover_lab::engine::{trace_flow, FlowOutcome, NodeLoad, RoutingTable};
use failover_lab::protocol::{
    DeterministicFailover, ExplicitProtocol, FailoverProtocol, IntervalBipartite, IntervalClos, UniformFailover,
};
use failover_lab::{FailureSet, NodeId, Topology};
use rand::seq::IndexedRandom;
use rand::Rng;

/// Adjacency lists by testing every pair.
pub fn adjacency_by_pairs(topo: &Topology) -> Vec<Vec<NodeId>> {
    let n = topo.node_count();
    (0..n)
        .map(|a| (0..n).filter(|&b| topo.is_edge(NodeId::from(a), NodeId::from(b))).map(NodeId::from).collect())
        .collect()
}

/// Hop distances to `target` on explicit adjacency with the given edges removed.
pub fn bfs(adj: &[Vec<NodeId>], target: NodeId, removed: &[(NodeId, NodeId)]) -> Vec<Option<u32>> {
    let mut dist = vec![None; adj.len()];
    dist[target.index()] = Some(0);
    let mut q = VecDeque::from([target]);
    while let Some(u) = q.pop_front() {
        for &w in &adj[u.index()] {
            let cut = removed.iter().any(|&(a, b)| (a, b) == (u, w) || (a, b) == (w, u));
            if !cut && dist[w.index()].is_none() {
                dist[w.index()] = Some(dist[u.index()].unwrap() + 1);
                q.push_back(w);
            }
        }
    }
    dist
}

/// Node loads by tracing every flow separately and summing.
pub fn loads_by_tracing(topo: &Topology, table: &RoutingTable) -> Vec<NodeLoad> {
    let n = topo.node_count();
    let d = table.destination();
    let mut count = vec![0u64; n];
    let mut infinite = vec![false; n];
    for s in topo.nodes().filter(|&s| s != d) {
        let tr = trace_flow(topo, table, s, n + 1).unwrap();
        let visited: Vec<NodeId> = tr.visited().collect();
        match tr.outcome {
            FlowOutcome::Delivered | FlowOutcome::Blackholed { .. } => {
                for v in visited {
                    count[v.index()] += 1;
                }
            }
            FlowOutcome::Cycled { cycle_start } => {
                let at = visited.iter().position(|&v| v == cycle_start).unwrap();
                for (i, v) in visited.into_iter().enumerate() {
                    if i >= at {
                        infinite[v.index()] = true;
                    } else {
                        count[v.index()] += 1;
                    }
                }
            }
            FlowOutcome::HopLimit => panic!("hop limit above n reached"),
        }
    }
    (0..n)
        .map(|v| {
            let id = NodeId::from(v);
            if infinite[v] {
                NodeLoad::Infinite
            } else if id != d && table.entry(id) == Some(id) {
                NodeLoad::Blackhole(count[v])
            } else {
                NodeLoad::Finite(count[v])
            }
        })
        .collect()
}

/// Random failed edges: `attempts` uniform (node, neighbor) picks.
pub fn random_failures<R: Rng>(topo: &Topology, rng: &mut R, attempts: usize) -> FailureSet {
    let mut f = FailureSet::new();
    for _ in 0..attempts {
        let v = NodeId(rng.random_range(0..topo.node_count() as u32));
        let nb = topo.neighbors(v);
        if let Some(&w) = nb.choose(rng) {
            f.insert(topo, v, w).unwrap();
        }
    }
    f
}

/// Random explicit protocol: each node gets random weights over a random neighbor subset.
pub fn random_explicit<R: Rng>(topo: &Topology, rng: &mut R) -> ExplicitProtocol {
    let mut p = ExplicitProtocol::new("random-rows");
    for v in topo.nodes() {
        let nb = topo.neighbors(v);
        let take = rng.random_range(1..=nb.len().min(4));
        let row: Vec<(NodeId, f64)> =
            nb.choose_multiple(rng, take).map(|&w| (w, rng.random_range(0.05..1.0))).collect();
        p = p.with_row(v, row);
    }
    p
}

/// A protocol valid for `topo`, chosen at random.
pub fn random_protocol<R: Rng>(topo: &Topology, rng: &mut R) -> Box<dyn FailoverProtocol> {
    match (topo, rng.random_range(0..4)) {
        (Topology::Bipartite(_), 0) => Box::new(IntervalBipartite),
        (Topology::Clos(_), 0) => Box::new(IntervalClos),
        (_, 1) => Box::new(UniformFailover),
        (_, 2) => Box::new(DeterministicFailover::permuted(topo.node_count(), rng.random())),
        _ => Box::new(random_explicit(topo, rng)),
    }
}

/// A random small instance of one of the three families, at most `max_nodes` nodes.
pub fn random_topology<R: Rng>(rng: &mut R, max_nodes: usize) -> Topology {
    loop {
        let t = match rng.random_range(0..3) {
            0 => Topology::clique(rng.random_range(4..=64)).unwrap(),
            1 => {
                let n = [4u32, 8, 12, 16, 24, 32, 64, 128, 256][rng.random_range(0..9)];
                let divisors: Vec<u32> = (1..=n).filter(|k| n % k == 0).collect();
                Topology::bipartite(n, 5.0, Some(*divisors.choose(rng).unwrap())).unwrap()
            }
            _ => {
                let k = [4u32, 6, 8, 12, 16][rng.random_range(0..5)];
                let levels = rng.random_range(1..=3);
                let half = k / 2;
                let divisors: Vec<u32> = (1..=half).filter(|x| half % x == 0).collect();
                match Topology::clos(k, levels, Some(*divisors.choose(rng).unwrap())) {
                    Ok(t) => t,
                    Err(_) => continue,
                }
            }
        };
        if t.node_count() <= max_nodes {
            return t;
        }
    }
}

/// A destination the interval protocols accept: the last node.
pub fn destination(topo: &Topology) -> NodeId {
    topo.default_destination()
}

/// Exact binomial tail `P[X >= k]` for `X ~ Bin(n, 1/2)`.
pub fn sign_test_p(wins: u64, trials: u64) -> f64 {
    let mut p = 0.0;
    for i in wins..=trials {
        p += binom(trials, i) * 0.5f64.powi(trials as i32);
    }
    p
}

fn binom(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
