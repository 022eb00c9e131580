//! Command-line front end: `run`, `compare`, `graph` and `sweep`.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::decision::{plan, DecisionInput, PolicyConfig, PolicyKind};
use crate::error::{AgentId, Error, Result};
use crate::graph::{build_interaction_graph, decompose, extract_branches, to_dot, GraphOptions, Snapshot};
use crate::scenario::{load_scenario, Scenario};
use crate::sim::{compute_metrics, generate_random_scenario, run, update_ledger, ArrivalLedger, Metrics, RegionTemplate};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 1;
pub const EXIT_COLLISION: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "hgame", version, about = "Game-based go/yield decisions at an all-way stop")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one scenario and write trace.csv plus metrics.
    Run {
        scenario: PathBuf,
        #[command(flatten)]
        policy: PolicyFlags,
        /// Also write the payoff tables of the ego's first decision.
        #[arg(long)]
        dump_tables: bool,
        #[arg(long, default_value = "hgame-out")]
        out: PathBuf,
    },
    /// Run one scenario under every policy and tabulate the results.
    Compare {
        scenario: PathBuf,
        #[command(flatten)]
        policy: PolicyFlags,
        /// Print the first-decision payoff tables of each policy.
        #[arg(long)]
        dump_tables: bool,
    },
    /// Print the interaction graph at t=0 as DOT, then its decomposition.
    Graph {
        scenario: PathBuf,
        #[arg(long)]
        no_cluster: bool,
        /// Write graph.dot here instead of printing it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Batch runs over a directory of scenario files or a seed range.
    Sweep {
        /// Directory of scenario files; omit to use random scenarios.
        dir: Option<PathBuf>,
        /// Inclusive seed range, e.g. 1..500.
        #[arg(long, default_value = "1..100")]
        seeds: IntRange,
        /// Inclusive agent-count range for random scenarios.
        #[arg(long, default_value = "3..10")]
        agents: IntRange,
        #[command(flatten)]
        policy: PolicyFlags,
        /// Write metrics.csv here instead of printing it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Overrides applied on top of the scenario's own policy settings.
#[derive(Debug, Clone, Default, Args)]
pub struct PolicyFlags {
    #[arg(long)]
    pub policy: Option<PolicyKind>,
    #[arg(long)]
    pub nmax: Option<usize>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub no_cluster: bool,
}

impl PolicyFlags {
    pub fn apply(&self, base: &PolicyConfig) -> PolicyConfig {
        let mut cfg = *base;
        if let Some(p) = self.policy {
            cfg.policy = p;
        }
        if let Some(n) = self.nmax {
            cfg.n_max = n;
        }
        if let Some(b) = self.beta {
            cfg.game.beta = b;
        }
        if self.no_cluster {
            cfg.cluster = false;
        }
        cfg
    }
}

/// `a..b`, both ends included.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntRange {
    pub lo: u64,
    pub hi: u64,
}

impl IntRange {
    pub fn iter(self) -> impl Iterator<Item = u64> {
        self.lo..=self.hi
    }
}

impl FromStr for IntRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("expected a range like 1..10, got `{s}`"));
        let (a, b) = s.split_once("..").ok_or_else(bad)?;
        let lo: u64 = a.trim().parse().map_err(|_| bad())?;
        let hi: u64 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        Ok(IntRange { lo, hi })
    }
}

/// Runs a parsed command line, printing to `out`, and returns the exit code.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> u8 {
    let result = match &cli.command {
        Command::Run { scenario, policy, dump_tables, out: dir } => cmd_run(scenario, policy, *dump_tables, dir, out),
        Command::Compare { scenario, policy, dump_tables } => cmd_compare(scenario, policy, *dump_tables, out),
        Command::Graph { scenario, no_cluster, out: dir } => cmd_graph(scenario, *no_cluster, dir.as_deref(), out),
        Command::Sweep { dir, seeds, agents, policy, out: dest } => {
            cmd_sweep(dir.as_deref(), *seeds, *agents, policy, dest.as_deref(), out)
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

fn collision_code(m: &Metrics) -> u8 {
    if m.ego_collisions > 0 {
        EXIT_COLLISION
    } else {
        EXIT_OK
    }
}

/// Decision-layer tables at t=0, with arrival stamps as the simulator sets them.
fn first_plan_tables(s: &Scenario, cfg: &PolicyConfig) -> Result<String> {
    let params = s.params();
    let table = s.conflict_table();
    let mut states = s.states();
    let ledger = update_ledger(ArrivalLedger::from_states(&states), &states, &params, 0.0);
    for st in &mut states {
        st.arrival_time = ledger.arrival(st.id);
    }
    let snap = Snapshot::new(&states, &params, &s.region, &table);
    let p = plan(&DecisionInput::new(snap, s.ego_index()?), cfg)?;
    Ok(p.dump_tables())
}

pub fn cmd_run(path: &Path, flags: &PolicyFlags, dump_tables: bool, dir: &Path, out: &mut dyn Write) -> Result<u8> {
    let s = load_scenario(path)?;
    let cfg = flags.apply(&s.policy);
    let trace = run(&s, &s.sim, &cfg)?;
    let m = compute_metrics(&trace);
    fs::create_dir_all(dir).map_err(io)?;
    fs::write(dir.join("trace.csv"), trace.to_csv()).map_err(io)?;
    fs::write(dir.join("metrics.txt"), m.summary()).map_err(io)?;
    let json = serde_json::to_string_pretty(&m).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(dir.join("metrics.json"), json + "\n").map_err(io)?;
    if dump_tables {
        fs::write(dir.join("tables.txt"), first_plan_tables(&s, &cfg)?).map_err(io)?;
    }
    write!(out, "{}: policy {}\n{}", s.name, cfg.policy, m.summary()).map_err(io)?;
    Ok(collision_code(&m))
}

pub fn cmd_compare(path: &Path, flags: &PolicyFlags, dump_tables: bool, out: &mut dyn Write) -> Result<u8> {
    let s = load_scenario(path)?;
    let base = flags.apply(&s.policy);
    let mut text = format!(
        "{:<13} {:<10} {:<10} {:<9} {:<12} {:<12}\n",
        "policy", "first", "crossing", "max_game", "lat_mean_ms", "lat_max_ms"
    );
    let mut tables = String::new();
    let mut code = EXIT_OK;
    for kind in PolicyKind::ALL {
        let cfg = PolicyConfig { policy: kind, ..base };
        match run(&s, &s.sim, &cfg) {
            Ok(trace) => {
                let m = compute_metrics(&trace);
                let first = m.first_decision.map(|a| a.to_string()).unwrap_or_else(|| "none".into());
                let crossing = m.ego_crossing_time.map(|t| format!("{t:.2}")).unwrap_or_else(|| "none".into());
                writeln!(
                    text,
                    "{:<13} {:<10} {:<10} {:<9} {:<12.4} {:<12.4}",
                    kind.name(),
                    first,
                    crossing,
                    m.max_game_size(),
                    m.latency_mean * 1e3,
                    m.latency_max * 1e3
                )
                .unwrap();
                code = code.max(collision_code(&m));
                if dump_tables {
                    writeln!(tables, "== {kind} ==\n{}", first_plan_tables(&s, &cfg)?).unwrap();
                }
            }
            Err(Error::PlayerCapExceeded { players, .. }) => {
                writeln!(text, "{:<13} skipped: {players} players exceeds cap", kind.name()).unwrap();
            }
            Err(e) => return Err(e),
        }
    }
    write!(out, "{text}{tables}").map_err(io)?;
    Ok(code)
}

fn braces(ids: &[AgentId]) -> String {
    let inner: Vec<String> = ids.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

/// DOT text followed by `branches:` and `decomposition:` lines.
pub fn graph_report(s: &Scenario, cluster: bool) -> Result<String> {
    let states = s.states();
    let params = s.params();
    let table = s.conflict_table();
    let snap = Snapshot::new(&states, &params, &s.region, &table);
    let opts = GraphOptions { cluster, heading_tol: s.policy.heading_tol };
    let graph = build_interaction_graph(&snap, s.ego_index()?, opts);
    let branches = extract_branches(&graph, graph.depth());
    let groups = decompose(&branches, s.ego_id);
    let mut text = to_dot(&graph);
    let b: Vec<String> = branches.iter().map(|b| braces(&b.members)).collect();
    let g: Vec<String> = groups.iter().map(|g| braces(g)).collect();
    writeln!(text, "// levels: {:?}", graph.level_sizes()).unwrap();
    writeln!(text, "// branches: {}", b.join(", ")).unwrap();
    writeln!(text, "// decomposition: {}", g.join(", ")).unwrap();
    Ok(text)
}

pub fn cmd_graph(path: &Path, no_cluster: bool, dir: Option<&Path>, out: &mut dyn Write) -> Result<u8> {
    let s = load_scenario(path)?;
    let cluster = s.policy.cluster && !no_cluster;
    let text = graph_report(&s, cluster)?;
    match dir {
        Some(d) => {
            fs::create_dir_all(d).map_err(io)?;
            fs::write(d.join("graph.dot"), &text).map_err(io)?;
        }
        None => out.write_all(text.as_bytes()).map_err(io)?,
    }
    Ok(EXIT_OK)
}

/// Agent count used for `seed` within an inclusive range.
pub fn agents_for_seed(seed: u64, agents: IntRange) -> usize {
    (agents.lo + seed % (agents.hi - agents.lo + 1)) as usize
}

pub fn cmd_sweep(
    dir: Option<&Path>,
    seeds: IntRange,
    agents: IntRange,
    flags: &PolicyFlags,
    dest: Option<&Path>,
    out: &mut dyn Write,
) -> Result<u8> {
    let items: Vec<(String, Scenario)> = match dir {
        Some(d) => {
            let mut paths: Vec<PathBuf> = fs::read_dir(d)
                .map_err(io)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            paths.sort();
            paths
                .iter()
                .map(|p| Ok((p.file_name().unwrap_or_default().to_string_lossy().into_owned(), load_scenario(p)?)))
                .collect::<Result<_>>()?
        }
        None => seeds
            .iter()
            .map(|seed| {
                let n = agents_for_seed(seed, agents);
                (seed.to_string(), generate_random_scenario(seed, n, RegionTemplate::default()))
            })
            .collect(),
    };
    let rows: Vec<Result<(String, usize, Metrics)>> = items
        .par_iter()
        .map(|(name, s)| {
            let cfg = flags.apply(&s.policy);
            let trace = run(s, &s.sim, &cfg)?;
            Ok((name.clone(), s.agents.len(), compute_metrics(&trace)))
        })
        .collect();
    let key = if dir.is_some() { "scenario" } else { "seed" };
    let mut csv = format!("{key},agents,{}\n", Metrics::CSV_HEADER);
    let mut code = EXIT_OK;
    for row in rows {
        let (name, n, m) = row?;
        code = code.max(collision_code(&m));
        writeln!(csv, "{name},{n},{}", m.csv_row()).unwrap();
    }
    match dest {
        Some(d) => {
            fs::create_dir_all(d).map_err(io)?;
            fs::write(d.join("metrics.csv"), &csv).map_err(io)?;
        }
        None => out.write_all(csv.as_bytes()).map_err(io)?,
    }
    Ok(code)
}
