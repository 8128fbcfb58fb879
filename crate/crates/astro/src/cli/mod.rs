//! The `astro` command line: `mine`, `gen`, `run`, `compare`, `export`.
//!
//! Layering: global flags (`--seed`, `--config`, `--jobs`, `--json`/`--csv`)
//! resolve into [`Settings`], individual subcommand flags refine them, and
//! each `cmd_*` function does the work. Machine-readable output goes to
//! stdout (or to `--out`); diagnostics go to stderr, so piping stdout into
//! another tool is always safe. Exit code 0 means the command succeeded;
//! any error message comes with a nonzero code.

mod config;
mod report;

pub use config::{OutputFormat, Settings};
pub use report::{
    compute_report, CompareReport, CompareRow, COMPARE_FORMAT_VERSION, COMPARE_SCHEMA,
};

use std::ffi::OsString;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand};

use crate::mine::{build_phase_map, parse_program, Program};
use crate::model::Topology;
use crate::qlearn::{Agent, AgentParams};
use crate::schedule::{emit_pseudo, export_hybrid, export_static, replay_schedule, Schedule};
use crate::sim::{
    best_fixed, greedy_oracle, run_astro, run_fixed, run_random, Metric, RunResult, RunSummary,
    SimParams,
};
use crate::trace::{
    generate_synthetic, read_manifest, read_trace_set, write_trace_set, SyntheticSpec, TraceSet,
};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "astro",
    version,
    about = "Phase mining, trace-driven scheduling simulation and schedule export for big.LITTLE machines"
)]
pub struct Cli {
    /// Seed for every stochastic component (overrides the config file)
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Defaults file with `key = value` lines
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Worker threads for `run --all-policies`
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Machine output as JSON (the default)
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,

    /// Machine output as CSV
    #[arg(long, global = true)]
    pub csv: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse .sir sources and classify every function into a program phase
    Mine(MineArgs),
    /// Generate a synthetic trace set from a spec file
    Gen(GenArgs),
    /// Run a scheduling policy over a trace set
    Run(RunArgs),
    /// Score run results against energy/slowdown thresholds
    Compare(CompareArgs),
    /// Freeze a trained agent into a schedule table
    Export(ExportArgs),
}

#[derive(Debug, Args)]
pub struct MineArgs {
    /// Input .sir files
    #[arg(required = true, value_name = "FILE")]
    pub inputs: Vec<PathBuf>,

    /// Where to write the phase map JSON
    #[arg(short, long, value_name = "FILE")]
    pub out: Option<PathBuf>,

    /// Print the phase map to stdout instead of writing a file
    #[arg(long, conflicts_with = "out")]
    pub stdout: bool,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Trace spec JSON file
    #[arg(value_name = "SPEC")]
    pub spec: PathBuf,

    /// Output directory for the trace set
    #[arg(short, long, value_name = "DIR")]
    pub out: PathBuf,

    /// Replace the output directory if it exists
    #[arg(long)]
    pub overwrite: bool,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Trace set directory
    #[arg(value_name = "TRACE_DIR")]
    pub trace: PathBuf,

    /// Policy to run: fixed:<id>, best-fixed-time, best-fixed-energy,
    /// oracle-time, oracle-energy, random, astro, or replay
    #[arg(long, conflicts_with = "all_policies")]
    pub policy: Option<String>,

    /// Run the six named policies (best-fixed-time, best-fixed-energy,
    /// oracle-time, oracle-energy, random, astro) and merge the summaries
    #[arg(long)]
    pub all_policies: bool,

    /// Summary destination: a file for --policy, a directory for
    /// --all-policies (stdout when omitted)
    #[arg(short, long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Also write the per-checkpoint log as CSV (single policy only)
    #[arg(long, value_name = "FILE")]
    pub log: Option<PathBuf>,

    /// Where to save the trained agent (required whenever astro runs)
    #[arg(long, value_name = "FILE")]
    pub agent_out: Option<PathBuf>,

    /// Schedule file for the replay policy
    #[arg(long, value_name = "FILE")]
    pub schedule: Option<PathBuf>,

    /// Training episodes for astro
    #[arg(long)]
    pub episodes: Option<usize>,

    /// Seconds charged per configuration switch
    #[arg(long, value_name = "SECONDS")]
    pub switch_time: Option<f64>,

    /// Joules charged per configuration switch
    #[arg(long, value_name = "JOULES")]
    pub switch_energy: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Run summary JSON files (at least two, same trace set)
    #[arg(required = true, value_name = "RESULT")]
    pub results: Vec<PathBuf>,

    /// Required energy saving in percent
    #[arg(long, value_name = "PCT")]
    pub energy_threshold: Option<f64>,

    /// Allowed slowdown in percent
    #[arg(long, value_name = "PCT")]
    pub slowdown_threshold: Option<f64>,

    /// Policy whose energy anchors the savings column
    #[arg(long, value_name = "POLICY")]
    pub baseline: Option<String>,

    /// Where to write the report (stdout when omitted)
    #[arg(short, long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    /// Trained agent JSON file
    #[arg(long, value_name = "FILE")]
    pub agent: PathBuf,

    /// Trace set directory naming the machine the agent was trained for
    #[arg(long, value_name = "DIR")]
    pub trace: PathBuf,

    /// Table granularity
    #[arg(long, value_parser = ["static", "hybrid"])]
    pub kind: String,

    /// Where to write the schedule JSON
    #[arg(short, long, value_name = "FILE")]
    pub out: PathBuf,

    /// Also render the schedule as a C-like listing into this file
    #[arg(long, value_name = "FILE")]
    pub emit_pseudo: Option<PathBuf>,

    /// Benchmark name for the listing header (default: from the manifest)
    #[arg(long, value_name = "NAME")]
    pub benchmark: Option<String>,
}

/// Parses `args` and runs the selected command. Returns the process exit
/// code; all diagnostics are printed before it returns.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            if matches!(&e, Error::Io(io) if io.kind() == std::io::ErrorKind::BrokenPipe) {
                // the reader closed the pipe (`astro … | head`); nothing
                // is wrong and nobody is left to print to
                return 0;
            }
            eprintln!("error: {e}");
            1
        }
    }
}

/// Machine output goes through this instead of `println!` so a reader that
/// stops consuming surfaces as a catchable `BrokenPipe` error instead of a
/// panic mid-print.
fn emit_stdout(text: &str) -> Result<()> {
    use std::io::Write as _;
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<()> {
    let mut settings = Settings::default();
    if let Some(path) = &cli.config {
        settings.apply_file(path)?;
    }
    if let Some(seed) = cli.seed {
        settings.set_seed(seed);
    }
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Error::Invalid("--jobs must be at least 1".into()));
        }
        settings.jobs = jobs;
    }
    if cli.csv {
        settings.format = OutputFormat::Csv;
    } else if cli.json {
        settings.format = OutputFormat::Json;
    }
    match &cli.command {
        Command::Mine(args) => cmd_mine(args, &settings),
        Command::Gen(args) => cmd_gen(args, &settings),
        Command::Run(args) => cmd_run(args, &settings),
        Command::Compare(args) => cmd_compare(args, &settings),
        Command::Export(args) => cmd_export(args, &settings),
    }
}

/// `astro mine`: parse the inputs, classify every function, and write the
/// phase map (or print it with `--stdout`).
pub fn cmd_mine(args: &MineArgs, _settings: &Settings) -> Result<()> {
    let mut functions = Vec::new();
    for path in &args.inputs {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
        let program = parse_program(&text).map_err(|e| match e {
            Error::Parse { line, message } => Error::Parse {
                line,
                message: format!("{}: {message}", path.display()),
            },
            other => other,
        })?;
        functions.extend(program.functions);
    }
    let map = build_phase_map(&Program { functions })?;
    if args.stdout {
        emit_stdout(&format!("{}\n", serde_json::to_string_pretty(&map)?))?;
    } else {
        let out = args
            .out
            .as_ref()
            .ok_or_else(|| Error::Invalid("pass --out FILE or --stdout".into()))?;
        map.write_json(out)?;
        eprintln!(
            "mined {} functions into {}",
            map.functions.len(),
            out.display()
        );
    }
    Ok(())
}

/// `astro gen`: generate a synthetic trace set from a spec file.
pub fn cmd_gen(args: &GenArgs, settings: &Settings) -> Result<()> {
    let mut spec = SyntheticSpec::read_json(&args.spec)?;
    if let Some(seed) = settings.seed {
        spec.seed = seed;
    }
    let ts = generate_synthetic(&spec)?;
    write_trace_set(&ts, &args.out, args.overwrite)?;
    eprintln!(
        "wrote {} configurations x {} segments to {}",
        ts.n_configs(),
        ts.k(),
        args.out.display()
    );
    Ok(())
}

/// What `--policy` strings resolve to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PolicySpec {
    Fixed(usize),
    BestFixedTime,
    BestFixedEnergy,
    OracleTime,
    OracleEnergy,
    Random,
    Astro,
    Replay,
}

const NAMED_POLICIES: [PolicySpec; 6] = [
    PolicySpec::BestFixedTime,
    PolicySpec::BestFixedEnergy,
    PolicySpec::OracleTime,
    PolicySpec::OracleEnergy,
    PolicySpec::Random,
    PolicySpec::Astro,
];

impl PolicySpec {
    fn display_name(&self) -> String {
        match self {
            PolicySpec::Fixed(id) => format!("fixed:{id}"),
            PolicySpec::BestFixedTime => "best-fixed-time".into(),
            PolicySpec::BestFixedEnergy => "best-fixed-energy".into(),
            PolicySpec::OracleTime => "oracle-time".into(),
            PolicySpec::OracleEnergy => "oracle-energy".into(),
            PolicySpec::Random => "random".into(),
            PolicySpec::Astro => "astro".into(),
            PolicySpec::Replay => "replay".into(),
        }
    }
}

fn parse_policy(name: &str) -> Result<PolicySpec> {
    if let Some(id) = name.strip_prefix("fixed:") {
        let id = id.parse().map_err(|_| {
            Error::Invalid(format!("fixed:<id> needs a configuration id, found {name:?}"))
        })?;
        return Ok(PolicySpec::Fixed(id));
    }
    match name {
        "best-fixed-time" => Ok(PolicySpec::BestFixedTime),
        "best-fixed-energy" => Ok(PolicySpec::BestFixedEnergy),
        "oracle-time" => Ok(PolicySpec::OracleTime),
        "oracle-energy" => Ok(PolicySpec::OracleEnergy),
        "random" => Ok(PolicySpec::Random),
        "astro" => Ok(PolicySpec::Astro),
        "replay" => Ok(PolicySpec::Replay),
        other => Err(Error::Invalid(format!(
            "unknown policy {other:?}; valid policies: fixed:<id>, best-fixed-time, \
             best-fixed-energy, oracle-time, oracle-energy, random, astro, replay"
        ))),
    }
}

fn execute_policy(
    ts: &TraceSet,
    spec: PolicySpec,
    sim: &SimParams,
    agent_params: &AgentParams,
    schedule: Option<&Schedule>,
) -> Result<(RunResult, Option<Agent>)> {
    match spec {
        PolicySpec::Fixed(id) => Ok((run_fixed(ts, id, sim)?, None)),
        PolicySpec::BestFixedTime => Ok((best_fixed(ts, Metric::Time, sim)?.1, None)),
        PolicySpec::BestFixedEnergy => Ok((best_fixed(ts, Metric::Energy, sim)?.1, None)),
        PolicySpec::OracleTime => Ok((greedy_oracle(ts, Metric::Time, sim)?, None)),
        PolicySpec::OracleEnergy => Ok((greedy_oracle(ts, Metric::Energy, sim)?, None)),
        PolicySpec::Random => Ok((run_random(ts, sim, sim.seed)?, None)),
        PolicySpec::Astro => {
            let (result, agent) = run_astro(ts, agent_params.clone(), sim)?;
            Ok((result, Some(agent)))
        }
        PolicySpec::Replay => {
            let schedule =
                schedule.ok_or_else(|| Error::Invalid("replay needs --schedule FILE".into()))?;
            Ok((replay_schedule(ts, schedule, sim)?, None))
        }
    }
}

/// Run summaries as CSV, one row per policy.
pub fn summaries_to_csv(summaries: &[RunSummary]) -> String {
    let mut out = String::from(
        "policy,seed,benchmark,k,total_time_s,total_energy_j,total_instructions,manifest_sha256\n",
    );
    for s in summaries {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            s.policy,
            s.seed,
            s.benchmark,
            s.k,
            s.total_time_s,
            s.total_energy_j,
            s.total_instructions,
            s.manifest_sha256,
        ));
    }
    out
}

/// `astro run`: execute one policy (or all six named ones) over a trace set
/// and emit run summaries.
pub fn cmd_run(args: &RunArgs, settings: &Settings) -> Result<()> {
    let ts = read_trace_set(&args.trace)?;
    let mut sim = settings.sim.clone();
    if let Some(episodes) = args.episodes {
        sim.episodes = episodes;
    }
    if let Some(seconds) = args.switch_time {
        sim.switch_time_s = seconds;
    }
    if let Some(joules) = args.switch_energy {
        sim.switch_energy_j = joules;
    }

    if args.all_policies {
        if args.log.is_some() {
            return Err(Error::Invalid(
                "--log applies to single-policy runs; --all-policies writes summaries only"
                    .into(),
            ));
        }
        let agent_out = args.agent_out.as_ref().ok_or_else(|| {
            Error::Invalid("--all-policies trains astro; pass --agent-out FILE".into())
        })?;
        let outcomes = run_all_policies(&ts, &sim, &settings.agent, settings.jobs)?;

        let mut summaries = Vec::with_capacity(outcomes.len());
        for (result, agent) in &outcomes {
            summaries.push(result.summary(&ts)?);
            if let Some(agent) = agent {
                agent.save(agent_out)?;
                eprintln!("saved trained agent to {}", agent_out.display());
            }
        }
        if let Some(dir) = &args.out {
            std::fs::create_dir_all(dir)?;
            for summary in &summaries {
                summary.write_json(&dir.join(format!("{}.json", summary.policy)))?;
            }
            eprintln!("wrote {} summaries to {}", summaries.len(), dir.display());
        }
        match settings.format {
            OutputFormat::Json => emit_stdout(&format!(
                "{}\n",
                serde_json::to_string_pretty(&summaries)?
            ))?,
            OutputFormat::Csv => emit_stdout(&summaries_to_csv(&summaries))?,
        }
        return Ok(());
    }

    let name = args.policy.as_deref().ok_or_else(|| {
        Error::Invalid("pass --policy NAME or --all-policies".into())
    })?;
    let spec = parse_policy(name)?;
    let schedule = match (spec, &args.schedule) {
        (PolicySpec::Replay, Some(path)) => Some(Schedule::read_json(path)?),
        (PolicySpec::Replay, None) => {
            return Err(Error::Invalid("replay needs --schedule FILE".into()));
        }
        (_, Some(_)) => {
            return Err(Error::Invalid(
                "--schedule only applies to the replay policy".into(),
            ));
        }
        (_, None) => None,
    };
    if spec == PolicySpec::Astro && args.agent_out.is_none() {
        return Err(Error::Invalid(
            "the astro policy trains an agent; pass --agent-out FILE".into(),
        ));
    }

    let (result, agent) = execute_policy(&ts, spec, &sim, &settings.agent, schedule.as_ref())?;
    if let (Some(agent), Some(path)) = (&agent, &args.agent_out) {
        agent.save(path)?;
        eprintln!("saved trained agent to {}", path.display());
    }
    if let Some(path) = &args.log {
        std::fs::write(path, result.to_csv())?;
        eprintln!("wrote checkpoint log to {}", path.display());
    }
    let summary = result.summary(&ts)?;
    if let Some(path) = &args.out {
        summary.write_json(path)?;
        eprintln!("wrote summary to {}", path.display());
    } else {
        match settings.format {
            OutputFormat::Json => emit_stdout(&format!(
                "{}\n",
                serde_json::to_string_pretty(&summary)?
            ))?,
            OutputFormat::Csv => {
                emit_stdout(&summaries_to_csv(std::slice::from_ref(&summary)))?
            }
        }
    }
    Ok(())
}

/// Runs the six named policies, up to `jobs` at a time. Each simulation
/// owns its whole state, so the only shared data is the read-only trace
/// set; results keep the fixed policy order regardless of completion order.
fn run_all_policies(
    ts: &TraceSet,
    sim: &SimParams,
    agent_params: &AgentParams,
    jobs: usize,
) -> Result<Vec<(RunResult, Option<Agent>)>> {
    let n = NAMED_POLICIES.len();
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Result<(RunResult, Option<Agent>)>>>> =
        (0..n).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..jobs.clamp(1, n) {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, Ordering::Relaxed);
                if index >= n {
                    break;
                }
                let spec = NAMED_POLICIES[index];
                let outcome = execute_policy(ts, spec, sim, agent_params, None)
                    .map_err(|e| Error::Invalid(format!("{}: {e}", spec.display_name())));
                *slots[index].lock().expect("no poisoned slots") = Some(outcome);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| {
            slot.into_inner()
                .expect("no poisoned slots")
                .expect("every index was claimed")
        })
        .collect()
}

/// `astro compare`: score run summaries against the thresholds and emit a
/// [`CompareReport`].
pub fn cmd_compare(args: &CompareArgs, settings: &Settings) -> Result<()> {
    let summaries: Vec<RunSummary> = args
        .results
        .iter()
        .map(|path| {
            RunSummary::read_json(path)
                .map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
        })
        .collect::<Result<_>>()?;
    let baseline = args.baseline.as_deref().unwrap_or(&settings.baseline);
    let energy_threshold = args.energy_threshold.unwrap_or(settings.energy_threshold);
    let slowdown_threshold = args
        .slowdown_threshold
        .unwrap_or(settings.slowdown_threshold);
    let report = compute_report(&summaries, baseline, energy_threshold, slowdown_threshold)?;
    let rendered = match settings.format {
        OutputFormat::Json => {
            let mut text = serde_json::to_string_pretty(&report)?;
            text.push('\n');
            text
        }
        OutputFormat::Csv => report.to_csv(),
    };
    if let Some(path) = &args.out {
        std::fs::write(path, rendered)?;
        eprintln!("wrote report to {}", path.display());
    } else {
        emit_stdout(&rendered)?;
    }
    Ok(())
}

/// `astro export`: freeze a trained agent into a schedule table for the
/// machine a trace set was recorded on.
pub fn cmd_export(args: &ExportArgs, _settings: &Settings) -> Result<()> {
    let agent = Agent::load(&args.agent)?;
    let manifest = read_manifest(&args.trace)?;
    let topology = Topology::new(manifest.n_big.into(), manifest.n_little.into())?;
    let schedule: Schedule = match args.kind.as_str() {
        "static" => export_static(&agent, &topology)?.into(),
        "hybrid" => export_hybrid(&agent, &topology)?.into(),
        other => {
            return Err(Error::Invalid(format!(
                "unknown schedule kind {other:?} (static or hybrid)"
            )));
        }
    };
    schedule.write_json(&args.out)?;
    eprintln!("wrote {} schedule to {}", schedule.kind(), args.out.display());
    if let Some(path) = &args.emit_pseudo {
        let benchmark = args
            .benchmark
            .clone()
            .unwrap_or_else(|| manifest.benchmark.clone());
        std::fs::write(path, emit_pseudo(&schedule, &benchmark))?;
        eprintln!("wrote listing to {}", path.display());
    }
    Ok(())
}
