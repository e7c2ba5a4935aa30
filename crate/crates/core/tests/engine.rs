mod common;

use failover_lab::engine::{
    compute_loads_with_stops, default_max_hops, hop_bound_check, trace_flow, FlowOutcome, NodeLoad,
};
use failover_lab::{compute_loads, sample_routing_table, Error, FailureSet, NodeId, RoutingTable, Topology};
use proptest::prelude::*;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn table(n: usize, d: u32, next: &[(u32, u32)]) -> RoutingTable {
    let mut rows = vec![None; n];
    for &(v, w) in next {
        rows[v as usize] = Some(NodeId(w));
    }
    RoutingTable::new(NodeId(d), rows).unwrap()
}

/// A random small instance with its sampled table.
fn instance(seed: u64, max_nodes: usize) -> (Topology, RoutingTable) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let topo = common::random_topology(&mut rng, max_nodes);
    let protocol = common::random_protocol(&topo, &mut rng);
    let attempts = rng.random_range(0..=3 * topo.node_count());
    let f = common::random_failures(&topo, &mut rng, attempts);
    let d = common::destination(&topo);
    let t = sample_routing_table(protocol.as_ref(), &topo, &f, d, rng.random()).unwrap();
    (topo, t)
}

#[test]
fn chain_and_cycle_examples() {
    let topo = Topology::clique(4).unwrap();
    let r = compute_loads(&topo, &table(4, 3, &[(0, 1), (1, 2), (2, 3)])).unwrap();
    assert_eq!(&r.node_load[..3], &[NodeLoad::Finite(1), NodeLoad::Finite(2), NodeLoad::Finite(3)]);
    assert_eq!(r.delivered, 3);
    assert_eq!(r.max_finite_load, 3);

    let r = compute_loads(&topo, &table(4, 3, &[(0, 1), (1, 0), (2, 3)])).unwrap();
    assert_eq!(r.load(NodeId(0)), NodeLoad::Infinite);
    assert_eq!(r.load(NodeId(1)), NodeLoad::Infinite);
    assert_eq!(r.cycles, vec![vec![NodeId(0), NodeId(1)]]);
    assert_eq!((r.delivered, r.absorbed_by_cycles), (1, 2));
    assert_eq!(r.max_edge_load(), None);

    let r = compute_loads(&topo, &table(4, 3, &[(0, 1), (1, 1), (2, 3)])).unwrap();
    assert_eq!(r.load(NodeId(1)), NodeLoad::Blackhole(2));
    assert_eq!(r.blackholes, vec![NodeId(1)]);
    assert!(!r.has_cycle());
    assert!(r.conserves_flows());
}

#[test]
fn trace_examples() {
    let topo = Topology::clique(4).unwrap();
    let chain = table(4, 3, &[(0, 1), (1, 2), (2, 3)]);
    let at_d = trace_flow(&topo, &chain, NodeId(3), 10).unwrap();
    assert!(at_d.path.is_empty());
    assert_eq!(at_d.outcome, FlowOutcome::Delivered);
    let t = trace_flow(&topo, &chain, NodeId(0), 10).unwrap();
    assert_eq!((t.hops(), t.outcome), (3, FlowOutcome::Delivered));
    assert_eq!(trace_flow(&topo, &chain, NodeId(0), 2).unwrap().outcome, FlowOutcome::HopLimit);

    let cyc = table(4, 3, &[(0, 1), (1, 2), (2, 1)]);
    let t = trace_flow(&topo, &cyc, NodeId(0), 10).unwrap();
    assert_eq!(t.outcome, FlowOutcome::Cycled { cycle_start: NodeId(1) });
    let hole = table(4, 3, &[(0, 1), (1, 1), (2, 3)]);
    assert_eq!(trace_flow(&topo, &hole, NodeId(0), 10).unwrap().outcome, FlowOutcome::Blackholed { at: NodeId(1) });
}

#[test]
fn hop_bound_examples() {
    let topo = Topology::clique(4).unwrap();
    let r = compute_loads(&topo, &table(4, 3, &[(0, 1), (1, 2), (2, 3)])).unwrap();
    assert_eq!(hop_bound_check(&r, 0), 1.0);
    // hop counts 3, 2, 1: two of them reach the bound
    assert!((hop_bound_check(&r, 2) - 2.0 / 3.0).abs() < 1e-12);
    assert_eq!(hop_bound_check(&r, 4), 0.0);
    assert_eq!(r.hop_quantile(0.5), Some(2));
    assert_eq!(r.max_hops(), Some(3));

    let r = compute_loads(&topo, &table(4, 3, &[(0, 1), (1, 0), (2, 3)])).unwrap();
    // the two cycled flows never arrive
    assert!((hop_bound_check(&r, 100) - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn table_errors() {
    assert!(matches!(
        RoutingTable::new(NodeId(2), vec![Some(NodeId(1)), None, None]),
        Err(Error::MissingEntry(NodeId(1)))
    ));
    let topo = Topology::bipartite(4, 5.0, Some(1)).unwrap();
    let d = NodeId(4);
    // node 0 forwarding to node 1 is not an edge of the bipartite graph
    let bad = RoutingTable::from_fn(8, d, |v| if v == NodeId(0) { NodeId(1) } else { v }).unwrap();
    assert!(bad.validate(&topo, &FailureSet::new()).is_err());
    let mut f = FailureSet::new();
    f.insert(&topo, NodeId(0), d).unwrap();
    let through_failed = RoutingTable::from_fn(8, d, |v| if v == NodeId(0) { d } else { v }).unwrap();
    assert!(through_failed.validate(&topo, &f).is_err());
    assert!(through_failed.validate(&topo, &FailureSet::new()).is_ok());
    assert!(compute_loads(&Topology::clique(5).unwrap(), &through_failed).is_err());
}

#[test]
fn default_hop_budgets() {
    assert_eq!(default_max_hops(&Topology::clos(8, 2, Some(2)).unwrap()), 4 * 2 * 3);
    assert_eq!(default_max_hops(&Topology::bipartite(16, 5.0, Some(4)).unwrap()), 32);
    assert_eq!(default_max_hops(&Topology::clique(9).unwrap()), 9);
}

#[test]
fn oracle_equivalence_on_fuzzed_tables() {
    for seed in 0..300 {
        let (topo, t) = instance(seed, 128);
        let r = compute_loads(&topo, &t).unwrap();
        let want = common::loads_by_tracing(&topo, &t);
        for v in topo.nodes().filter(|&v| v != t.destination()) {
            assert_eq!(r.load(v), want[v.index()], "seed {seed}, node {v}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn reports_conserve_flows(seed in any::<u64>()) {
        let (topo, t) = instance(seed, 256);
        let r = compute_loads(&topo, &t).unwrap();
        prop_assert!(r.conserves_flows());
        prop_assert_eq!(r.senders, topo.node_count() as u64 - 1);
        prop_assert_eq!(r.delivered, r.delivered_flows());
        if !r.has_cycle() && !r.has_blackhole() {
            prop_assert_eq!(r.delivered, r.senders);
            prop_assert_eq!(r.load(t.destination()), NodeLoad::Finite(r.senders));
        }
        // the busiest node forwards everything it carries over one edge
        let node_max = topo.nodes().filter(|&v| v != t.destination() && t.entry(v) != Some(v)).try_fold(0u64, |m, v| r.load(v).flows().map(|x| m.max(x)));
        prop_assert_eq!(r.max_edge_load(), node_max);
    }

    #[test]
    fn stopping_nodes_never_raises_load(seed in any::<u64>()) {
        let (topo, t) = instance(seed, 256);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let candidates: Vec<NodeId> = topo.nodes().filter(|&v| v != t.destination()).collect();
        let take = rng.random_range(0..=candidates.len());
        let stopped: Vec<NodeId> = candidates.choose_multiple(&mut rng, take).copied().collect();
        let full = compute_loads(&topo, &t).unwrap();
        let partial = compute_loads_with_stops(&topo, &t, &stopped).unwrap();
        prop_assert!(partial.conserves_flows());
        for v in topo.nodes() {
            prop_assert!(partial.load(v).at_most(full.load(v)), "node {v}: {:?} > {:?}", partial.load(v), full.load(v));
        }
    }
}
