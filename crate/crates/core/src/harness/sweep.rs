use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, TopologySpec};
use super::trials::run_trials;
use crate::adversary::lg;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParameter {
    /// Side size of the bipartite graph or size of the clique. Attack budgets are rescaled
    /// in proportion to the node count so the failure density stays fixed.
    N,
    /// Clos degree.
    K,
    /// Attack budget.
    Budget,
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n" => Ok(SweepParameter::N),
            "k" => Ok(SweepParameter::K),
            "budget" => Ok(SweepParameter::Budget),
            other => Err(Error::Config(format!("unknown sweep parameter `{other}`"))),
        }
    }
}

impl SweepParameter {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParameter::N => "n",
            SweepParameter::K => "k",
            SweepParameter::Budget => "budget",
        }
    }

    /// `config` with the parameter set to `value`; derived interval counts are recomputed.
    pub fn apply(self, config: &ExperimentConfig, value: u64) -> Result<ExperimentConfig> {
        let mut c = config.clone();
        let v = u32::try_from(value).map_err(|_| Error::Config(format!("sweep value {value} too large")))?;
        c.destination = None;
        let before = config.topology.build()?.node_count() as f64;
        match (self, &mut c.topology) {
            (SweepParameter::N, TopologySpec::Bipartite { n, intervals, .. }) => {
                *n = v;
                *intervals = None;
            }
            (SweepParameter::N, TopologySpec::Clique { n }) => *n = v,
            (SweepParameter::K, TopologySpec::Clos { k, intervals, .. }) => {
                *k = v;
                *intervals = None;
            }
            (SweepParameter::Budget, _) => c.attack = c.attack.with_budget(value as usize)?,
            (p, t) => return Err(Error::Config(format!("cannot sweep `{}` on {t:?}", p.as_str()))),
        }
        if self == SweepParameter::N {
            if let Some(b) = c.attack.budget() {
                let after = c.topology.build()?.node_count() as f64;
                c.attack = c.attack.with_budget((b as f64 * after / before).round() as usize)?;
            }
        }
        Ok(c)
    }
}

/// One aggregate row per swept value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub parameter: String,
    pub value: u64,
    pub nodes: u64,
    pub trials: u64,
    pub rejected: u64,
    pub mean_max_load: f64,
    pub p99_max_load: f64,
    pub max_max_load: f64,
    pub cycle_frequency: f64,
    pub blackhole_frequency: f64,
    pub hop_p99: Option<u32>,
    /// `lg s lg lg s` for the size parameter `s`: side size, clique size or Clos degree.
    pub log_scale: f64,
}

pub fn sweep(config: &ExperimentConfig, parameter: SweepParameter, values: &[u64]) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(values.len());
    for &value in values {
        let c = parameter.apply(config, value)?;
        let nodes = c.topology.build()?.node_count() as u64;
        let report = run_trials(&c)?;
        let s = report.summary;
        let spread = s.max_load.as_ref();
        let size = f64::from(match c.topology {
            TopologySpec::Bipartite { n, .. } | TopologySpec::Clique { n } => n,
            TopologySpec::Clos { k, .. } => k,
        });
        rows.push(SweepRow {
            parameter: parameter.as_str().to_string(),
            value,
            nodes,
            trials: s.trials,
            rejected: s.rejected,
            mean_max_load: spread.map_or(f64::NAN, |x| x.mean),
            p99_max_load: spread.map_or(f64::NAN, |x| x.p99),
            max_max_load: spread.map_or(f64::NAN, |x| x.max),
            cycle_frequency: s.cycle_frequency,
            blackhole_frequency: s.blackhole_frequency,
            hop_p99: s.hop_p99,
            log_scale: lg(size) * lg(lg(size)),
        });
    }
    Ok(rows)
}
