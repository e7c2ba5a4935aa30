//! Randomized local failover routing under adversarial link failures.
//!
//! The crate builds Clos, complete bipartite and clique topologies from index arithmetic,
//! samples destination-based failover tables from interval protocols and baselines,
//! constructs adversarial and random failure sets, and evaluates the resulting all-to-one
//! forwarding graph exactly.

pub mod adversary;
pub mod calibration;
pub mod engine;
pub mod error;
pub mod failure;
pub mod harness;
pub mod markov;
pub mod protocol;
pub mod topology;

pub use engine::{compute_loads, trace_flow, FlowOutcome, FlowTrace, LoadReport, NodeLoad, RoutingTable};
pub use error::{Error, Result};
pub use failure::FailureSet;
pub use protocol::{sample_routing_table, FailoverDistribution, FailoverProtocol, ProtocolKind};
pub use topology::{NodeId, Topology};
