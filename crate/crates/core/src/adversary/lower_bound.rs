//! The case-analyzed adversary that fails only edges into the destination.
//!
//! With the predictable-edge graph trimmed to a reverse forest, one of three structures is
//! always large: many broken cycles, many roots, or large reverse trees. Each case has a
//! failure set that makes many nodes route into a short predictable structure.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::embed::clique_embed;
use super::loggraph::{build_glog, build_glogt, lg, LogGraph, ReverseForest};
use crate::error::{Error, Result};
use crate::failure::FailureSet;
use crate::protocol::FailoverProtocol;
use crate::topology::{NodeId, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundParams {
    pub epsilon: f64,
    /// Predictable edges need probability above `1 / (lg n)^threshold_exponent`.
    pub threshold_exponent: f64,
    /// Case 3b shortcut fires at in-degree `(lg n)^indegree_exponent`.
    pub indegree_exponent: f64,
}

impl Default for LowerBoundParams {
    fn default() -> Self {
        LowerBoundParams { epsilon: 0.5, threshold_exponent: 4.0, indegree_exponent: 5.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AttackCase {
    Case1,
    Case2,
    Case3a,
    Case3b,
}

/// Counts behind a case decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub case: AttackCase,
    pub n: usize,
    pub roots: usize,
    pub roots_after_trim: usize,
    pub removed_cycles: usize,
    /// Trees with more than [`tree_threshold`] nodes.
    pub large_trees: usize,
    pub largest_tree: u64,
}

fn sqrt_n(n: usize) -> f64 {
    (n as f64).sqrt()
}

/// Number of structures the attacks harvest, `ceil(sqrt n)`.
pub fn harvest_count(n: usize) -> usize {
    sqrt_n(n).ceil() as usize
}

/// `(1/10) lg n / lg lg n`.
pub fn tree_threshold(n: usize) -> f64 {
    0.1 * lg(n as f64) / lg(lg(n as f64))
}

/// Size of every cut path or subtree, `ceil` of [`tree_threshold`] and at least one.
pub fn cut_size(n: usize) -> usize {
    (tree_threshold(n).ceil() as usize).max(1)
}

/// `floor(ε n / lg n)`.
pub fn root_budget(n: usize, epsilon: f64) -> usize {
    (epsilon * n as f64 / lg(n as f64)).floor() as usize
}

fn check_size(n: usize) -> Result<()> {
    if n < 4 {
        return Err(Error::param(format!("the adversary needs at least 4 nodes, got {n}")));
    }
    Ok(())
}

pub fn classify_case(glog: &LogGraph, forest: &ReverseForest, epsilon: f64) -> Result<Classification> {
    let n = glog.topology_size();
    check_size(n)?;
    let roots = glog.roots().len();
    let roots_after_trim = forest.roots().len();
    let removed_cycles = forest.removed_cycles().len();
    if roots_after_trim != roots + removed_cycles {
        return Err(Error::Invariant(format!(
            "{roots_after_trim} roots after trimming, expected {roots} + {removed_cycles}"
        )));
    }
    let trees = forest.trees();
    let threshold = tree_threshold(n);
    let large_trees = trees.iter().filter(|&&(_, s)| s as f64 > threshold).count();
    let largest_tree = trees.iter().map(|&(_, s)| s).max().unwrap_or(0);
    let root_n = sqrt_n(n);
    let case = if removed_cycles as f64 >= root_n {
        AttackCase::Case1
    } else if roots as f64 >= epsilon * n as f64 / lg(n as f64) {
        AttackCase::Case2
    } else if large_trees as f64 >= root_n {
        AttackCase::Case3a
    } else if largest_tree as f64 > root_n / 2.0 {
        AttackCase::Case3b
    } else {
        return Err(Error::Invariant(format!(
            "no case applies: {removed_cycles} cycles, {roots} roots, {large_trees} large trees, largest tree {largest_tree}"
        )));
    };
    Ok(Classification { case, n, roots, roots_after_trim, removed_cycles, large_trees, largest_tree })
}

fn toward(d: NodeId, victims: impl IntoIterator<Item = NodeId>) -> FailureSet {
    let mut f = FailureSet::new();
    for v in victims {
        if v != d {
            f.insert_unchecked(v, d);
        }
    }
    f
}

/// Fails the edges into `d` along a prefix of up to [`cut_size`] nodes of each of the first
/// `ceil(sqrt n)` broken cycles; short cycles are failed entirely.
pub fn attack_case1(forest: &ReverseForest) -> FailureSet {
    let n = forest.node_count() + 1;
    let len = cut_size(n);
    let victims = forest
        .removed_cycles()
        .iter()
        .take(harvest_count(n))
        .flat_map(|c| c.iter().copied().take(len));
    toward(forest.destination, victims)
}

/// Fails the edges into `d` of the first `floor(ε n / lg n)` roots in index order.
pub fn attack_case2(glog: &LogGraph, epsilon: f64) -> FailureSet {
    let n = glog.topology_size();
    toward(glog.destination, glog.roots().into_iter().take(root_budget(n, epsilon)))
}

/// Result of cutting a reverse subtree off the top of a tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeCut {
    /// The `target` nodes nearest the root, in breadth-first order.
    pub cut: Vec<NodeId>,
    /// Roots and sizes of the hanging subtrees that still have at least `target` nodes.
    pub rest: Vec<(NodeId, u64)>,
    /// Nodes in hanging subtrees too small to keep.
    pub dropped: u64,
}

pub fn cut_tree(forest: &ReverseForest, root: NodeId, target: usize) -> Result<TreeCut> {
    let size = forest.subtree_size(root);
    if target == 0 || size < target as u64 {
        return Err(Error::param(format!("subtree of {root} has {size} nodes, cannot cut {target}")));
    }
    let mut cut = Vec::with_capacity(target);
    let mut queue = VecDeque::from([root]);
    while cut.len() < target {
        let v = queue.pop_front().expect("subtree holds enough nodes");
        cut.push(v);
        queue.extend(forest.children(v).iter().copied());
    }
    // The frontier is exactly the set of hanging subtree roots.
    let mut rest = Vec::new();
    let mut dropped = 0;
    let mut frontier: Vec<NodeId> = queue.into_iter().collect();
    frontier.sort();
    for r in frontier {
        let s = forest.subtree_size(r);
        if s >= target as u64 {
            rest.push((r, s));
        } else {
            dropped += s;
        }
    }
    Ok(TreeCut { cut, rest, dropped })
}

/// Cuts [`cut_size`] nodes off the first `ceil(sqrt n)` trees larger than [`tree_threshold`].
pub fn attack_case3a(forest: &ReverseForest) -> Result<FailureSet> {
    let n = forest.node_count() + 1;
    let threshold = tree_threshold(n);
    let size = cut_size(n);
    let mut victims = Vec::new();
    for (root, _) in forest.trees().into_iter().filter(|&(_, s)| s as f64 > threshold).take(harvest_count(n)) {
        victims.extend(cut_tree(forest, root, size)?.cut);
    }
    Ok(toward(forest.destination, victims))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case3bRoute {
    /// Failed the edges of many in-neighbors of one node.
    HighIndegree { hub: NodeId },
    /// Harvested this many cut subtrees.
    Harvest { cuts: usize },
}

/// Works on the largest tree: a hub with in-degree at least `(lg n)^indegree_exponent`
/// gets that many in-neighbors failed, otherwise subtrees are cut repeatedly.
pub fn attack_case3b(forest: &ReverseForest, indegree_exponent: f64) -> Result<(FailureSet, Case3bRoute)> {
    let n = forest.node_count() + 1;
    let Some(&(big, _)) = forest.trees().iter().max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0))) else {
        return Ok((FailureSet::new(), Case3bRoute::Harvest { cuts: 0 }));
    };
    let hub_degree = lg(n as f64).powf(indegree_exponent).ceil() as usize;

    let mut members = vec![big];
    let mut head = 0;
    while head < members.len() {
        let v = members[head];
        head += 1;
        members.extend(forest.children(v).iter().copied());
    }
    members.sort();
    if let Some(&hub) = members.iter().find(|&&v| forest.children(v).len() >= hub_degree) {
        let victims = forest.children(hub).iter().copied().take(hub_degree);
        return Ok((toward(forest.destination, victims), Case3bRoute::HighIndegree { hub }));
    }

    let size = cut_size(n);
    let limit = harvest_count(n);
    let mut victims = Vec::new();
    let mut cuts = 0;
    let mut queue = VecDeque::from([big]);
    while cuts < limit {
        let Some(root) = queue.pop_front() else { break };
        if forest.subtree_size(root) < size as u64 {
            continue;
        }
        let c = cut_tree(forest, root, size)?;
        victims.extend(c.cut);
        queue.extend(c.rest.into_iter().map(|(r, _)| r));
        cuts += 1;
    }
    Ok((toward(forest.destination, victims), Case3bRoute::Harvest { cuts }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundReport {
    pub classification: Classification,
    pub case3b_route: Option<Case3bRoute>,
    /// Largest failure count the chosen case may emit.
    pub budget: usize,
    pub failures: FailureSet,
}

/// Runs the full adversary against `protocol` on `topo`, embedding into the clique when
/// `topo` is not one; the emitted failures are edges of `topo` incident to `d`.
pub fn lower_bound_attack(
    protocol: &dyn FailoverProtocol,
    topo: &Topology,
    d: NodeId,
    params: &LowerBoundParams,
) -> Result<LowerBoundReport> {
    if !protocol.supports_pdf() {
        return Err(Error::Capability(protocol.name().to_string()));
    }
    let n = topo.node_count();
    check_size(n)?;
    let glog = match topo {
        Topology::Clique(_) => build_glog(protocol, topo, d, params.threshold_exponent)?,
        _ => {
            let embedded = clique_embed(protocol, topo);
            build_glog(&embedded, &embedded.clique()?, d, params.threshold_exponent)?
        }
    };
    let forest = build_glogt(&glog);
    let classification = classify_case(&glog, &forest, params.epsilon)?;
    let per_structure = harvest_count(n) * cut_size(n);
    let (failures, route, budget) = match classification.case {
        AttackCase::Case1 => (attack_case1(&forest), None, per_structure),
        AttackCase::Case2 => (attack_case2(&glog, params.epsilon), None, root_budget(n, params.epsilon)),
        AttackCase::Case3a => (attack_case3a(&forest)?, None, per_structure),
        AttackCase::Case3b => {
            let (f, route) = attack_case3b(&forest, params.indegree_exponent)?;
            let hub = lg(n as f64).powf(params.indegree_exponent).ceil() as usize;
            (f, Some(route), per_structure.max(hub))
        }
    };
    let failures = failures.restricted_to(topo);
    if failures.len() > budget || !failures.all_incident_to(d) {
        return Err(Error::Invariant(format!("attack emitted {} edges, budget {budget}", failures.len())));
    }
    Ok(LowerBoundReport { classification, case3b_route: route, budget, failures })
}
