//! Failure-set construction: the lower-bound adversary, random budgeted attacks, and the
//! interval-protocol failure constraints.

mod constraints;
mod embed;
mod loggraph;
mod lower_bound;
mod random;

pub use constraints::{
    validate_bipartite_constraints, validate_clos_constraints, validate_constraints, ConstraintTracker,
};
pub use embed::{clique_embed, CliqueEmbedding};
pub use loggraph::{build_glog, build_glogt, lg, LogGraph, ReverseForest};
pub use lower_bound::{
    attack_case1, attack_case2, attack_case3a, attack_case3b, classify_case, cut_size, cut_tree, harvest_count,
    lower_bound_attack, root_budget, tree_threshold, AttackCase, Case3bRoute, Classification, LowerBoundParams,
    LowerBoundReport, TreeCut,
};
pub use random::{clos_bipartite_attack, constrained_random_attack, random_attack_incident_to_d};
