use std::collections::BTreeMap;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{AttackSpec, ExperimentConfig, Thresholds};
use crate::adversary::{
    clos_bipartite_attack, constrained_random_attack, lower_bound_attack, random_attack_incident_to_d,
    validate_constraints, LowerBoundParams,
};
use crate::engine::compute_loads;
use crate::error::Result;
use crate::failure::FailureSet;
use crate::protocol::{sample_routing_table, FailoverProtocol};
use crate::topology::{NodeId, Topology};

/// Randomized stages of a trial; each gets its own stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Failures = 0,
    Table = 1,
}

/// Seed for `stage` of `trial`, independent of scheduling.
pub fn derive_seed(master: u64, trial: u64, stage: Stage) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(trial * 16 + stage as u64);
    rng.next_u64()
}

/// One CSV row per accepted trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub trial: u64,
    pub seed: u64,
    pub max_load: u64,
    pub delivered: u64,
    pub cycles: usize,
    pub blackholes: usize,
    pub p99_hops: Option<u32>,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spread {
    pub min: f64,
    pub mean: f64,
    pub p50: f64,
    pub p99: f64,
    pub max: f64,
}

impl Spread {
    pub fn of(values: &[f64]) -> Option<Spread> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let q = |p: f64| v[((p * v.len() as f64).ceil() as usize).clamp(1, v.len()) - 1];
        Some(Spread {
            min: v[0],
            mean: v.iter().sum::<f64>() / v.len() as f64,
            p50: q(0.5),
            p99: q(0.99),
            max: v[v.len() - 1],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub topology: String,
    pub protocol: String,
    pub destination: NodeId,
    pub trials: u64,
    pub rejected: u64,
    pub senders: u64,
    pub cycle_frequency: f64,
    pub blackhole_frequency: f64,
    pub full_delivery_frequency: f64,
    pub max_load: Option<Spread>,
    pub hop_p50: Option<u32>,
    pub hop_p99: Option<u32>,
    pub hop_max: Option<u32>,
    /// Hop counts of delivered flows, pooled over trials.
    pub hop_histogram: BTreeMap<u32, u64>,
    pub thresholds: Vec<ThresholdResult>,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct TrialsReport {
    pub rows: Vec<TrialRow>,
    pub summary: Summary,
}

struct TrialOutcome {
    row: TrialRow,
    hops: BTreeMap<u32, u64>,
}

fn failures_for(
    spec: &AttackSpec,
    topo: &Topology,
    protocol: &dyn FailoverProtocol,
    d: NodeId,
    seed: u64,
    fixed: Option<&FailureSet>,
) -> Result<FailureSet> {
    match *spec {
        AttackSpec::None => Ok(FailureSet::new()),
        AttackSpec::IncidentRandom { budget } => random_attack_incident_to_d(topo, d, budget, seed),
        AttackSpec::ClosBipartite { budget } => clos_bipartite_attack(topo, d, budget, seed),
        AttackSpec::ConstrainedRandom { budget } => constrained_random_attack(topo, protocol, d, budget, seed),
        AttackSpec::LowerBound { .. } => Ok(fixed.cloned().unwrap_or_default()),
    }
}

fn hop_quantile(hist: &BTreeMap<u32, u64>, q: f64) -> Option<u32> {
    let total: u64 = hist.values().sum();
    if total == 0 {
        return None;
    }
    let need = ((q * total as f64).ceil() as u64).clamp(1, total);
    let mut acc = 0;
    hist.iter().find(|&(_, &c)| {
        acc += c;
        acc >= need
    })
    .map(|(&h, _)| h)
}

/// Runs every trial of `config` in parallel; results are in trial order and depend only on
/// the master seed.
pub fn run_trials(config: &ExperimentConfig) -> Result<TrialsReport> {
    let topo = config.topology.build()?;
    let protocol = config.protocol.build();
    let d = config.destination(&topo);
    let fixed = match config.attack {
        AttackSpec::LowerBound { epsilon, threshold_exponent, indegree_exponent } => {
            let params = LowerBoundParams { epsilon, threshold_exponent, indegree_exponent };
            Some(lower_bound_attack(protocol.as_ref(), &topo, d, &params)?.failures)
        }
        _ => None,
    };

    let outcomes: Vec<Result<Option<TrialOutcome>>> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let fseed = derive_seed(config.master_seed, trial, Stage::Failures);
            let tseed = derive_seed(config.master_seed, trial, Stage::Table);
            let failures = failures_for(&config.attack, &topo, protocol.as_ref(), d, fseed, fixed.as_ref())?;
            if config.validate_constraints && !validate_constraints(&failures, &topo) {
                log::warn!("trial {trial}: failure set violates the interval constraints, rejected");
                return Ok(None);
            }
            let table = sample_routing_table(protocol.as_ref(), &topo, &failures, d, tseed)?;
            let report = compute_loads(&topo, &table)?;
            let row = TrialRow {
                trial,
                seed: tseed,
                max_load: report.max_finite_load,
                delivered: report.delivered,
                cycles: report.cycles.len(),
                blackholes: report.blackholes.len(),
                p99_hops: report.hop_quantile(0.99),
                failures: failures.len(),
            };
            Ok(Some(TrialOutcome { row, hops: report.hop_histogram }))
        })
        .collect();

    let mut rows = Vec::new();
    let mut hop_histogram = BTreeMap::new();
    let mut rejected = 0;
    for o in outcomes {
        match o? {
            Some(t) => {
                for (h, c) in t.hops {
                    *hop_histogram.entry(h).or_insert(0) += c;
                }
                rows.push(t.row);
            }
            None => rejected += 1,
        }
    }
    let summary = summarize(config, &topo, protocol.name(), d, &rows, rejected, hop_histogram);
    Ok(TrialsReport { rows, summary })
}

fn summarize(
    config: &ExperimentConfig,
    topo: &Topology,
    protocol: &str,
    d: NodeId,
    rows: &[TrialRow],
    rejected: u64,
    hop_histogram: BTreeMap<u32, u64>,
) -> Summary {
    let senders = topo.node_count() as u64 - 1;
    let count = rows.len().max(1) as f64;
    let freq = |pred: &dyn Fn(&TrialRow) -> bool| rows.iter().filter(|r| pred(r)).count() as f64 / count;
    let loads: Vec<f64> = rows.iter().map(|r| r.max_load as f64).collect();
    let mut summary = Summary {
        topology: topo.to_string(),
        protocol: protocol.to_string(),
        destination: d,
        trials: rows.len() as u64,
        rejected,
        senders,
        cycle_frequency: freq(&|r| r.cycles > 0),
        blackhole_frequency: freq(&|r| r.blackholes > 0),
        full_delivery_frequency: freq(&|r| r.delivered == senders),
        max_load: Spread::of(&loads),
        hop_p50: hop_quantile(&hop_histogram, 0.5),
        hop_p99: hop_quantile(&hop_histogram, 0.99),
        hop_max: hop_histogram.keys().next_back().copied(),
        hop_histogram,
        thresholds: Vec::new(),
        passed: true,
    };
    summary.thresholds = evaluate_thresholds(&config.thresholds, rows, &summary);
    summary.passed = summary.thresholds.iter().all(|t| t.passed);
    summary
}

fn evaluate_thresholds(t: &Thresholds, rows: &[TrialRow], s: &Summary) -> Vec<ThresholdResult> {
    let mut out = Vec::new();
    if let Some(bound) = t.max_load {
        let ok = rows.iter().filter(|r| r.max_load as f64 <= bound).count() as f64 / rows.len().max(1) as f64;
        out.push(ThresholdResult {
            name: "max_load".into(),
            passed: !rows.is_empty() && ok >= t.load_quantile,
            detail: format!("{ok:.4} of trials within {bound}, need {}", t.load_quantile),
        });
    }
    if let Some(limit) = t.max_cycle_frequency {
        out.push(ThresholdResult {
            name: "cycle_frequency".into(),
            passed: s.cycle_frequency <= limit,
            detail: format!("{} vs limit {limit}", s.cycle_frequency),
        });
    }
    if let Some(limit) = t.max_blackhole_frequency {
        out.push(ThresholdResult {
            name: "blackhole_frequency".into(),
            passed: s.blackhole_frequency <= limit,
            detail: format!("{} vs limit {limit}", s.blackhole_frequency),
        });
    }
    if let Some(bound) = t.hop_bound {
        let total = s.senders * rows.len() as u64;
        let within: u64 = s.hop_histogram.range(..bound).map(|(_, &c)| c).sum();
        let frac = if total == 0 { 0.0 } else { within as f64 / total as f64 };
        out.push(ThresholdResult {
            name: "hop_bound".into(),
            passed: frac >= t.min_within_hop_bound,
            detail: format!("{frac:.6} of flows under {bound} hops, need {}", t.min_within_hop_bound),
        });
    }
    out
}
