use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use failover_lab::adversary::{
    clos_bipartite_attack, lower_bound_attack, random_attack_incident_to_d, LowerBoundParams, LowerBoundReport,
};
use failover_lab::harness::{
    run_and_write, sweep, write_csv, write_csv_file, AttackSpec, ExperimentConfig, SweepParameter, Thresholds,
    TopologySpec, TrialsReport,
};
use failover_lab::markov::{aggregate_check, run_chains, ChainParams};
use failover_lab::{FailureSet, NodeId, ProtocolKind, Result};

#[derive(Parser)]
#[command(name = "failover-lab", version, about = "Randomized local failover routing experiments")]
struct Cli {
    /// Experiment file (.json or .toml); runs it when no subcommand is given.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Interval protocol on the complete bipartite graph.
    SimulateBipartite(BipartiteArgs),
    /// Interval protocol on a Clos topology.
    SimulateClos(ClosArgs),
    /// Build a failure set and print it as JSON.
    Attack(AttackArgs),
    /// Drift-chain aggregation check.
    MarkovCheck(MarkovArgs),
    /// Run the configured experiment once per parameter value.
    Sweep(SweepArgs),
}

#[derive(Args, Clone)]
struct RunArgs {
    #[arg(long, default_value_t = 1)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Failure budget; zero disables failures.
    #[arg(long, default_value_t = 0)]
    budget: usize,
    /// Reject trials whose failures break the interval constraints.
    #[arg(long)]
    validate: bool,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
    /// Fail unless 99% of trials keep their max load at or below this.
    #[arg(long)]
    max_load: Option<f64>,
    #[arg(long)]
    max_cycle_frequency: Option<f64>,
    #[arg(long)]
    hop_bound: Option<u32>,
}

#[derive(Args)]
struct BipartiteArgs {
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = 5.0)]
    c: f64,
    #[arg(long)]
    intervals: Option<u32>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct ClosArgs {
    #[arg(long)]
    k: u32,
    #[arg(long, default_value_t = 2)]
    levels: u32,
    #[arg(long)]
    intervals: Option<u32>,
    /// Confine failures to the destination's edges within floor(I/3).
    #[arg(long)]
    destination_attack: bool,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Clique,
    Bipartite,
    Clos,
}

#[derive(Clone, Copy, ValueEnum)]
enum AttackKind {
    LowerBound,
    Incident,
    ClosBipartite,
}

#[derive(Args)]
struct AttackArgs {
    #[arg(long, value_enum, default_value = "lower-bound")]
    kind: AttackKind,
    #[arg(long, value_enum, default_value = "clique")]
    family: Family,
    /// Node count (clique) or side size (bipartite).
    #[arg(long, default_value_t = 1024)]
    n: u32,
    #[arg(long, default_value_t = 16)]
    k: u32,
    #[arg(long, default_value_t = 2)]
    levels: u32,
    #[arg(long)]
    intervals: Option<u32>,
    #[arg(long, default_value = "uniform")]
    protocol: ProtocolKind,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    #[arg(long, default_value_t = 4.0)]
    threshold_exponent: f64,
    #[arg(long, default_value_t = 0)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct MarkovArgs {
    #[arg(long, default_value_t = 1.5)]
    phi: f64,
    #[arg(long, default_value_t = 0.5)]
    psi: f64,
    #[arg(long, default_value_t = 1)]
    x0: u64,
    #[arg(long, default_value_t = 100)]
    r: u32,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = failover_lab::calibration::MARKOV_SUM)]
    c: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    pool_multiplier: u32,
    /// Per-trial sums.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    parameter: SweepParameter,
    #[arg(long, value_delimiter = ',')]
    values: Vec<u64>,
    /// Long-format CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn thresholds(&self) -> Thresholds {
        Thresholds {
            max_load: self.max_load,
            max_cycle_frequency: self.max_cycle_frequency,
            hop_bound: self.hop_bound,
            ..Thresholds::default()
        }
    }

    fn into_config(self, topology: TopologySpec, protocol: ProtocolKind, attack: AttackSpec) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(topology, protocol);
        c.attack = attack;
        c.trials = self.trials;
        c.master_seed = self.seed;
        c.validate_constraints = self.validate;
        c.outputs.trials_csv = self.csv.clone();
        c.outputs.summary_json = self.json.clone();
        c.thresholds = self.thresholds();
        c
    }
}

fn budgeted(budget: usize, make: impl FnOnce(usize) -> AttackSpec) -> AttackSpec {
    if budget == 0 {
        AttackSpec::None
    } else {
        make(budget)
    }
}

fn simulate(config: &ExperimentConfig) -> Result<bool> {
    let TrialsReport { summary, .. } = run_and_write(config)?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(summary.passed)
}

#[derive(Serialize)]
struct AttackOutput {
    failures: FailureSet,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<LowerBoundReport>,
}

fn attack(a: AttackArgs) -> Result<bool> {
    let topo = match a.family {
        Family::Clique => TopologySpec::Clique { n: a.n },
        Family::Bipartite => TopologySpec::Bipartite { n: a.n, c: 5.0, intervals: a.intervals },
        Family::Clos => TopologySpec::Clos { k: a.k, levels: a.levels, intervals: a.intervals },
    }
    .build()?;
    let d: NodeId = topo.default_destination();
    let out = match a.kind {
        AttackKind::LowerBound => {
            let params =
                LowerBoundParams { epsilon: a.epsilon, threshold_exponent: a.threshold_exponent, ..Default::default() };
            let report = lower_bound_attack(a.protocol.build().as_ref(), &topo, d, &params)?;
            AttackOutput { failures: report.failures.clone(), report: Some(report) }
        }
        AttackKind::Incident => {
            AttackOutput { failures: random_attack_incident_to_d(&topo, d, a.budget, a.seed)?, report: None }
        }
        AttackKind::ClosBipartite => {
            AttackOutput { failures: clos_bipartite_attack(&topo, d, a.budget, a.seed)?, report: None }
        }
    };
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(true)
}

fn markov(m: MarkovArgs) -> Result<bool> {
    let params = ChainParams {
        trials: m.trials,
        seed: m.seed,
        pool_multiplier: m.pool_multiplier,
        ..ChainParams::new(m.phi, m.psi, m.x0, m.r)
    };
    if let Some(path) = &m.csv {
        #[derive(Serialize)]
        struct Row {
            trial: usize,
            sum: u64,
        }
        let run = run_chains(&params)?;
        let rows: Vec<Row> = run.sums.iter().enumerate().map(|(trial, &sum)| Row { trial, sum }).collect();
        write_csv_file(&rows, path)?;
    }
    let check = aggregate_check(&params, m.c)?;
    println!("{}", serde_json::to_string_pretty(&check)?);
    Ok(true)
}

fn run(cli: Cli) -> Result<bool> {
    let loaded = cli.config.as_deref().map(ExperimentConfig::load).transpose()?;
    match cli.command {
        None => match loaded {
            Some(c) => simulate(&c),
            None => Err(failover_lab::Error::Config("give a subcommand or --config".into())),
        },
        Some(Command::SimulateBipartite(b)) => {
            let attack = budgeted(b.run.budget, |budget| AttackSpec::ConstrainedRandom { budget });
            let topo = TopologySpec::Bipartite { n: b.n, c: b.c, intervals: b.intervals };
            simulate(&b.run.into_config(topo, ProtocolKind::Pb, attack))
        }
        Some(Command::SimulateClos(c)) => {
            let attack = if c.destination_attack {
                budgeted(c.run.budget, |budget| AttackSpec::ClosBipartite { budget })
            } else {
                budgeted(c.run.budget, |budget| AttackSpec::ConstrainedRandom { budget })
            };
            let topo = TopologySpec::Clos { k: c.k, levels: c.levels, intervals: c.intervals };
            simulate(&c.run.into_config(topo, ProtocolKind::Pc, attack))
        }
        Some(Command::Attack(a)) => attack(a),
        Some(Command::MarkovCheck(m)) => markov(m),
        Some(Command::Sweep(s)) => {
            let config =
                loaded.ok_or_else(|| failover_lab::Error::Config("sweep needs --config".into()))?;
            let rows = sweep(&config, s.parameter, &s.values)?;
            match &s.out {
                Some(p) => write_csv_file(&rows, p)?,
                None => write_csv(&rows, std::io::stdout())?,
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("threshold check failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
