use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::adversary::LowerBoundParams;
use crate::error::{Error, Result};
use crate::protocol::ProtocolKind;
use crate::topology::{NodeId, Topology};

fn default_c() -> f64 {
    5.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum TopologySpec {
    Clos {
        k: u32,
        levels: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        intervals: Option<u32>,
    },
    Bipartite {
        n: u32,
        #[serde(default = "default_c")]
        c: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        intervals: Option<u32>,
    },
    Clique {
        n: u32,
    },
}

impl TopologySpec {
    pub fn build(&self) -> Result<Topology> {
        match *self {
            TopologySpec::Clos { k, levels, intervals } => Topology::clos(k, levels, intervals),
            TopologySpec::Bipartite { n, c, intervals } => Topology::bipartite(n, c, intervals),
            TopologySpec::Clique { n } => Topology::clique(n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AttackSpec {
    #[default]
    None,
    /// Uniform subset of the edges at the destination.
    IncidentRandom { budget: usize },
    /// Random edges at a level-`L` destination, within `floor(I/3)`.
    ClosBipartite { budget: usize },
    /// Random edges anywhere, kept within the interval constraints.
    ConstrainedRandom { budget: usize },
    LowerBound {
        #[serde(default = "default_epsilon")]
        epsilon: f64,
        #[serde(default = "default_threshold_exponent")]
        threshold_exponent: f64,
        #[serde(default = "default_indegree_exponent")]
        indegree_exponent: f64,
    },
}

fn default_epsilon() -> f64 {
    LowerBoundParams::default().epsilon
}

fn default_threshold_exponent() -> f64 {
    LowerBoundParams::default().threshold_exponent
}

fn default_indegree_exponent() -> f64 {
    LowerBoundParams::default().indegree_exponent
}

impl AttackSpec {
    pub fn budget(&self) -> Option<usize> {
        match *self {
            AttackSpec::IncidentRandom { budget }
            | AttackSpec::ClosBipartite { budget }
            | AttackSpec::ConstrainedRandom { budget } => Some(budget),
            _ => None,
        }
    }

    pub fn with_budget(&self, b: usize) -> Result<AttackSpec> {
        Ok(match self {
            AttackSpec::IncidentRandom { .. } => AttackSpec::IncidentRandom { budget: b },
            AttackSpec::ClosBipartite { .. } => AttackSpec::ClosBipartite { budget: b },
            AttackSpec::ConstrainedRandom { .. } => AttackSpec::ConstrainedRandom { budget: b },
            other => return Err(Error::Config(format!("attack {other:?} has no budget"))),
        })
    }
}

/// Pass/fail thresholds evaluated on the aggregate of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    /// Per-trial max finite load must stay at or below this in a `load_quantile` fraction of trials.
    pub max_load: Option<f64>,
    pub load_quantile: f64,
    pub max_cycle_frequency: Option<f64>,
    pub max_blackhole_frequency: Option<f64>,
    /// At least `min_within_hop_bound` of all flows must need fewer than `hop_bound` hops.
    pub hop_bound: Option<u32>,
    pub min_within_hop_bound: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            max_load: None,
            load_quantile: 0.99,
            max_cycle_frequency: None,
            max_blackhole_frequency: None,
            hop_bound: None,
            min_within_hop_bound: 0.99,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct Outputs {
    pub trials_csv: Option<PathBuf>,
    pub summary_json: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub topology: TopologySpec,
    pub protocol: ProtocolKind,
    #[serde(default)]
    pub attack: AttackSpec,
    /// Defaults to the last node of the topology.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub destination: Option<u32>,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub master_seed: u64,
    /// Reject trials whose failures break the interval constraints.
    #[serde(default)]
    pub validate_constraints: bool,
    #[serde(default)]
    pub outputs: Outputs,
    #[serde(default)]
    pub thresholds: Thresholds,
}

fn default_trials() -> u64 {
    1
}

impl ExperimentConfig {
    pub fn new(topology: TopologySpec, protocol: ProtocolKind) -> Self {
        ExperimentConfig {
            topology,
            protocol,
            attack: AttackSpec::None,
            destination: None,
            trials: 1,
            master_seed: 0,
            validate_constraints: false,
            outputs: Outputs::default(),
            thresholds: Thresholds::default(),
        }
    }

    pub fn destination(&self, topo: &Topology) -> NodeId {
        self.destination.map(NodeId).unwrap_or_else(|| topo.default_destination())
    }

    /// Reads JSON or TOML, chosen by file extension.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => Self::from_toml(&text),
            Some("json") => Self::from_json(&text),
            _ => Err(Error::Config(format!("{}: expected a .json or .toml file", path.display()))),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }
}
