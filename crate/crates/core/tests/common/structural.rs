//! Exhaustive structural checks, shared by the topology tests and the acceptance run.

#![allow(dead_code)]

use std::collections::BTreeSet;

use failover_lab::adversary::{build_glogt, LogGraph};
use failover_lab::topology::{ClosTopology, Sequence};
use failover_lab::{NodeId, Topology};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

pub const KS: [u32; 3] = [4, 8, 12];
pub const LEVELS: [u32; 3] = [1, 2, 3];

/// Every valid sequence of length `len`.
pub fn sequences(k: u32, len: usize) -> Vec<Sequence> {
    let mut out = vec![Vec::<u32>::new()];
    for i in 0..len {
        let max = if i == 0 { k } else { k / 2 };
        out = out.into_iter().flat_map(|s| (1..=max).map(move |e| [s.clone(), vec![e]].concat())).collect();
    }
    out.into_iter().map(Sequence::new).collect()
}

fn clos(k: u32, levels: u32) -> ClosTopology {
    match Topology::clos(k, levels, Some(1)).unwrap() {
        Topology::Clos(t) => t,
        _ => unreachable!(),
    }
}

/// Level sizes follow `(k/2)^L, 2 (k/2)^L, ...`.
pub fn level_sizes() -> Check {
    for k in KS {
        for l in LEVELS {
            let t = clos(k, l);
            let base = u64::from(k / 2).pow(l);
            let mut want = vec![base];
            want.extend(std::iter::repeat_n(2 * base, l as usize));
            ensure!(t.level_sizes() == want, "k={k} L={l}: level sizes {:?}", t.level_sizes());
        }
    }
    Ok("level sizes match for 9 (k, L) pairs".into())
}

/// Blocks split into clusters, clusters into intervals, vertical clusters into vertical intervals.
pub fn partitions() -> Check {
    let mut checked = 0;
    for k in KS {
        for l in LEVELS {
            let h = k / 2;
            let divisors: Vec<u32> = (1..=h).filter(|x| h % x == 0).collect();
            for kk in divisors {
                let Topology::Clos(t) = Topology::clos(k, l, Some(kk)).unwrap() else { unreachable!() };
                for len in 0..l as usize {
                    for s in sequences(k, len) {
                        let block: BTreeSet<NodeId> = t.block_nodes(&s).unwrap().nodes().into_iter().collect();
                        let clusters = t.clusters_per_block(len as u32);
                        let mut union = BTreeSet::new();
                        let mut vunion = BTreeSet::new();
                        for i in 1..=clusters {
                            let c = t.cluster_nodes(&s, i).unwrap();
                            ensure!(c.len() == h as usize, "cluster size {} at k={k}", c.len());
                            let vc = t.vertical_cluster_nodes(&s, i).unwrap();
                            let want_vc = if len == 0 { k } else { h } as usize;
                            ensure!(vc.len() == want_vc, "vertical cluster size {} at S={s}", vc.len());
                            let mut iu = Vec::new();
                            let mut viu = Vec::new();
                            for j in 0..u64::from(kk) {
                                iu.extend(t.interval_nodes(&s, i, j).unwrap());
                                viu.extend(t.vertical_interval_nodes(&s, i, j).unwrap());
                            }
                            ensure!(iu == c, "intervals of C({s},{i}) do not partition it");
                            let (mut a, mut b) = (viu.clone(), vc.clone());
                            a.sort();
                            b.sort();
                            ensure!(a == b && viu.len() == vc.len(), "vertical intervals of VC({s},{i})");
                            for v in c {
                                ensure!(union.insert(v), "clusters overlap in B({s})");
                            }
                            for v in vc {
                                ensure!(vunion.insert(v), "vertical clusters overlap below B({s})");
                            }
                            checked += 1;
                        }
                        ensure!(union == block, "clusters do not cover B({s})");
                        let children: BTreeSet<NodeId> = (1..=if len == 0 { k } else { h })
                            .flat_map(|c| t.block_nodes(&s.child(c)).unwrap().nodes())
                            .collect();
                        ensure!(vunion == children, "vertical clusters do not cover the children of B({s})");
                    }
                }
            }
        }
    }
    Ok(format!("{checked} clusters partitioned exactly"))
}

/// Adjacency is symmetric, agrees with the pairwise edge test, and has the expected degrees.
pub fn symmetry_and_degrees() -> Check {
    let mut pairs = 0u64;
    for k in KS {
        for l in LEVELS {
            let topo = Topology::clos(k, l, Some(1)).unwrap();
            let Topology::Clos(t) = &topo else { unreachable!() };
            let n = topo.node_count();
            let nbs: Vec<BTreeSet<NodeId>> = topo.nodes().map(|v| topo.neighbors(v).into_iter().collect()).collect();
            for a in 0..n {
                let va = NodeId::from(a);
                let level = t.level_of(va);
                let want = if level == l { k / 2 } else { k } as usize;
                ensure!(nbs[a].len() == want, "k={k} L={l}: node {a} on level {level} has degree {}", nbs[a].len());
                for b in 0..n {
                    let vb = NodeId::from(b);
                    let listed = nbs[a].contains(&vb);
                    ensure!(listed == nbs[b].contains(&va), "asymmetric pair ({a}, {b})");
                    ensure!(listed == topo.is_edge(va, vb), "edge test disagrees on ({a}, {b})");
                    pairs += 1;
                }
            }
        }
    }
    Ok(format!("{pairs} ordered pairs symmetric and consistent"))
}

/// Full-length sequences round-trip through their single node.
pub fn offset_inversion() -> Check {
    let mut count = 0;
    for k in KS {
        for l in LEVELS {
            let t = clos(k, l);
            for s in sequences(k, l as usize) {
                let r = t.block_nodes(&s).unwrap();
                ensure!(r.len == 1, "block of {s} has {} nodes", r.len);
                let back = t.destination_sequence(r.span().nth(0)).unwrap();
                ensure!(back == s, "{s} came back as {back}");
                count += 1;
            }
        }
    }
    Ok(format!("{count} destination sequences round-trip"))
}

/// Random functional graphs (each node at most one edge) through the trimming step.
pub fn glogt_fuzz(instances: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..instances {
        let n = rng.random_range(2..=64usize);
        let d = rng.random_range(0..n);
        let p_edge: f64 = rng.random();
        let mut out = vec![Vec::new(); n];
        for (v, row) in out.iter_mut().enumerate() {
            if v != d && rng.random_bool(p_edge) {
                let mut w = rng.random_range(0..n);
                while w == d {
                    w = rng.random_range(0..n);
                }
                row.push((NodeId::from(w), 1.0));
            }
        }
        let brute_cycles = count_functional_cycles(&out);
        let g = LogGraph::from_edges(NodeId::from(d), 0.5, out).unwrap();
        let f = build_glogt(&g);
        ensure!(f.is_acyclic(), "case {case}: trimmed graph has a cycle");
        ensure!(
            f.roots().len() == g.roots().len() + f.removed_cycles().len(),
            "case {case}: {} roots after trimming, {} before, {} cycles",
            f.roots().len(),
            g.roots().len(),
            f.removed_cycles().len()
        );
        ensure!(f.removed_cycles().len() == brute_cycles, "case {case}: {} cycles broken, {brute_cycles} exist", f.removed_cycles().len());
        for v in g.nodes() {
            ensure!(f.parent(v).is_some() != f.roots().contains(&v), "case {case}: root set mismatch at {v}");
        }
    }
    Ok(format!("{instances} functional graphs trimmed to forests"))
}

/// Cycles of a functional graph by walking from every node with a step budget.
pub fn count_functional_cycles(out: &[Vec<(NodeId, f64)>]) -> usize {
    let n = out.len();
    let next = |v: usize| out[v].first().map(|&(w, _)| w.index());
    let mut on_cycle = BTreeSet::new();
    for start in 0..n {
        // after n steps a walk that has not stopped is inside a cycle
        let mut u = start;
        let mut alive = true;
        for _ in 0..n {
            match next(u) {
                Some(w) => u = w,
                None => {
                    alive = false;
                    break;
                }
            }
        }
        if alive {
            let mut cycle = vec![u];
            let mut w = next(u).unwrap();
            while w != u {
                cycle.push(w);
                w = next(w).unwrap();
            }
            on_cycle.insert(*cycle.iter().min().unwrap());
        }
    }
    on_cycle.len()
}
