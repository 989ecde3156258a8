// SPDX-License-Identifier: Apache-2.0

//! `pdbench`: build buggy-program datasets, run debuggers on them, and score
//! the answers at the edit level.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use pdbench_core::composer::{compose_task, easy_filter, independence_probe, subsample};
use pdbench_core::config::Config;
use pdbench_core::dataset::{read_jsonl, write_jsonl, BuggyVariant, Task};
use pdbench_core::exec::{ProcessBackend, Sandbox, ToyBackend};
use pdbench_core::gateway::{
    env_model, rewrite_ground_truth, HttpProvider, ModelBugGenerator, PromptStyle, RetryingClient,
};
use pdbench_core::harness::{
    ingest, mock_debugger, rescore, run_benchmark, DebugMode, Debugger, EvalConfig, EvalRecord, ModelDebugger,
    SourceFormat,
};
use pdbench_core::metrics::{aggregate, LabeledScore};
use pdbench_core::synthesis::{generate_bugs, BugGenerator, GenerationMode, LanguageRules, MutationGenerator};
use pdbench_core::toy::toy_tasks;

#[derive(Parser)]
#[command(name = "pdbench", version, about = "Precise-debugging benchmark forge and scorer")]
struct Cli {
    /// Overrides the seed in the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// TOML config; defaults are used for anything it leaves out.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Parallel examples (evaluation) and concurrent sandbox runs.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// `toy` or `toy:<step budget>` for the built-in interpreter, or
    /// `process:<runner command>`.
    #[arg(long, global = true, default_value = "toy")]
    backend: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize a source dataset into verified tasks.
    Ingest {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "native")]
        format: SourceFormat,
        #[arg(long)]
        out: PathBuf,
    },
    /// Inject single-line bugs.
    Inject(InjectArgs),
    /// Inject multi-line (block) bugs.
    InjectMulti(InjectArgs),
    /// Combine single-bug variants into multi-bug variants.
    Compose {
        #[arg(long)]
        tasks: PathBuf,
        #[arg(long)]
        pool: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Use the multi-line composition settings.
        #[arg(long)]
        multi: bool,
    },
    /// Check that no strict subset of a variant's fixes already passes.
    ProbeIndependence {
        #[arg(long)]
        tasks: PathBuf,
        #[arg(long)]
        variants: PathBuf,
        /// Executions allowed per variant.
        #[arg(long, default_value_t = 64)]
        budget: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Keep at most m3 variants per (task, bug count).
    Subsample {
        #[arg(long, required = true, num_args = 1..)]
        variants: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        multi: bool,
    },
    /// Drop variants that enough systems solve perfectly.
    FilterEasy {
        #[arg(long)]
        variants: PathBuf,
        /// Evaluation record files, one or more per system.
        #[arg(long, required = true, num_args = 1..)]
        records: Vec<PathBuf>,
        /// Defaults to the config's easy_threshold.
        #[arg(long)]
        threshold: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Ask a model to restate each ground-truth solution.
    RewriteGt {
        #[arg(long)]
        tasks: PathBuf,
        /// Defaults to PDB_PROVIDER_MODEL.
        #[arg(long)]
        model: Option<String>,
        #[arg(long, default_value_t = 3)]
        tries: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a debugger over a dataset and score every answer.
    Evaluate {
        #[arg(long)]
        tasks: PathBuf,
        #[arg(long)]
        variants: PathBuf,
        /// `mock:<oracle|noop|regenerator|partial_fixer(j)>` or `provider:<model>`.
        #[arg(long)]
        system: String,
        #[arg(long, value_enum, default_value_t = Mode::Single)]
        mode: Mode,
        #[arg(long, value_enum, default_value_t = Style::Minimal)]
        prompt: Style,
        #[command(flatten)]
        scoring: ScoringArgs,
        /// Record file; an existing file is resumed.
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-score stored answers without calling any debugger.
    Score {
        #[arg(long)]
        tasks: PathBuf,
        #[arg(long)]
        variants: PathBuf,
        #[arg(long)]
        records: PathBuf,
        #[command(flatten)]
        scoring: ScoringArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Summarize evaluation records.
    Report {
        #[arg(long, required = true, num_args = 1..)]
        records: Vec<PathBuf>,
        /// Also write the summary as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Write the built-in toy tasks.
    ToyTasks {
        #[arg(long)]
        out: PathBuf,
        /// Keep only the first N tasks.
        #[arg(long)]
        limit: Option<usize>,
    },
}

#[derive(Args)]
struct InjectArgs {
    #[arg(long)]
    tasks: PathBuf,
    /// `mutation`, or `provider:<model>` to ask a completion provider.
    #[arg(long, default_value = "mutation")]
    generator: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ScoringArgs {
    /// Slack per bug in the essential-edit cap; defaults to the preset's.
    #[arg(long)]
    epsilon: Option<usize>,
    /// Score with the multi-line preset.
    #[arg(long)]
    multi: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Single,
    Iterative,
    Agentic,
}

#[derive(Clone, Copy, ValueEnum)]
enum Style {
    Minimal,
    Freeform,
}

impl From<Mode> for DebugMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Single => DebugMode::Single,
            Mode::Iterative => DebugMode::Iterative,
            Mode::Agentic => DebugMode::Agentic,
        }
    }
}

impl From<Style> for PromptStyle {
    fn from(s: Style) -> Self {
        match s {
            Style::Minimal => PromptStyle::Minimal,
            Style::Freeform => PromptStyle::Freeform,
        }
    }
}

fn load_config(cli: &Cli) -> Result<Config> {
    let mut cfg = match &cli.config {
        Some(p) => Config::load(p).with_context(|| format!("loading {}", p.display()))?,
        None => Config::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn sandbox(backend: &str, workers: usize) -> Result<Sandbox> {
    if backend == "toy" {
        return Ok(Sandbox::with_workers(ToyBackend::default(), workers));
    }
    if let Some(fuel) = backend.strip_prefix("toy:") {
        let fuel = fuel.parse().with_context(|| format!("bad step budget in {backend:?}"))?;
        return Ok(Sandbox::with_workers(ToyBackend { fuel }, workers));
    }
    match backend.strip_prefix("process:") {
        Some(cmd) if !cmd.trim().is_empty() => {
            Ok(Sandbox::with_workers(ProcessBackend::from_command_line(cmd), workers))
        }
        _ => bail!("unknown backend {backend:?}; use `toy`, `toy:<steps>` or `process:<command>`"),
    }
}

fn read<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    read_jsonl(path).with_context(|| format!("reading {}", path.display()))
}

fn write<T: serde::Serialize>(path: &Path, items: &[T]) -> Result<()> {
    write_jsonl(path, items).with_context(|| format!("writing {}", path.display()))
}

fn http_client(workers: usize) -> Result<RetryingClient<HttpProvider>> {
    Ok(RetryingClient::new(HttpProvider::from_env()?).with_concurrency(workers))
}

fn generator(spec: &str, workers: usize) -> Result<Box<dyn BugGenerator>> {
    if spec == "mutation" {
        return Ok(Box::new(MutationGenerator::default()));
    }
    match spec.strip_prefix("provider:") {
        Some(model) => Ok(Box::new(ModelBugGenerator::new(http_client(workers)?, model))),
        None => bail!("unknown generator {spec:?}; use `mutation` or `provider:<model>`"),
    }
}

fn debugger(system: &str, workers: usize) -> Result<Box<dyn Debugger>> {
    if let Some(name) = system.strip_prefix("mock:") {
        return mock_debugger(name).with_context(|| format!("unknown mock debugger {name:?}"));
    }
    match system.strip_prefix("provider:") {
        Some(model) => Ok(Box::new(ModelDebugger::new(http_client(workers)?, model))),
        None => bail!("system must be `mock:<name>` or `provider:<model>`, got {system:?}"),
    }
}

fn by_task(variants: Vec<BuggyVariant>) -> BTreeMap<String, Vec<BuggyVariant>> {
    let mut map: BTreeMap<String, Vec<BuggyVariant>> = BTreeMap::new();
    for v in variants {
        map.entry(v.task_id.clone()).or_default().push(v);
    }
    map
}

fn inject(args: &InjectArgs, multi: bool, cfg: &Config, sb: &Sandbox, workers: usize) -> Result<()> {
    let tasks: Vec<Task> = read(&args.tasks)?;
    let generator = generator(&args.generator, workers)?;
    let rules = LanguageRules::python();
    let mode = if multi { GenerationMode::MultiLine(&cfg.multi) } else { GenerationMode::SingleLine(&cfg.single) };
    let mut out = Vec::new();
    let mut attempts = 0;
    for task in &tasks {
        let report = generate_bugs(task, mode, generator.as_ref(), &rules, sb, cfg.seed)?;
        attempts += report.attempts;
        for (reason, n) in &report.rejected {
            log::info!("{}: {n} rejected ({reason:?})", task.task_id);
        }
        out.extend(report.variants);
    }
    write(&args.out, &out)?;
    eprintln!("{} bugs from {attempts} attempts over {} tasks", out.len(), tasks.len());
    Ok(())
}

fn scoring(args: &ScoringArgs, cfg: &Config) -> (usize, usize) {
    if args.multi {
        (args.epsilon.unwrap_or(cfg.multi.epsilon), cfg.multi.compose.stride)
    } else {
        (args.epsilon.unwrap_or(cfg.single.epsilon), cfg.single.compose.stride)
    }
}

fn summarize(records: &[EvalRecord], json: Option<&Path>) -> Result<()> {
    let labeled: Vec<LabeledScore> = records.iter().map(EvalRecord::labeled).collect();
    let report = aggregate(&labeled)?;
    print!("{}", report.render());
    if let Some(path) = json {
        std::fs::write(path, serde_json::to_string_pretty(&report)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let cfg = load_config(&cli)?;
    let workers = cli.workers.max(1);
    let sb = sandbox(&cli.backend, workers)?;
    match &cli.command {
        Command::Ingest { input, format, out } => {
            let report = ingest(input, *format, &sb)?;
            for (row, reason) in &report.rejected {
                log::warn!("rejected {row}: {reason}");
            }
            write(out, &report.tasks)?;
            eprintln!("{} tasks kept, {} rejected", report.tasks.len(), report.rejected.len());
        }
        Command::Inject(args) => inject(args, false, &cfg, &sb, workers)?,
        Command::InjectMulti(args) => inject(args, true, &cfg, &sb, workers)?,
        Command::Compose { tasks, pool, out, multi } => {
            let tasks: Vec<Task> = read(tasks)?;
            let pools = by_task(read(pool)?);
            let compose_cfg = if *multi { &cfg.multi.compose } else { &cfg.single.compose };
            let mut variants = Vec::new();
            for task in &tasks {
                let Some(pool) = pools.get(&task.task_id) else { continue };
                let report = compose_task(task, pool, compose_cfg, &sb, cfg.seed)?;
                variants.extend(report.variants);
            }
            write(out, &variants)?;
            eprintln!("{} composed variants", variants.len());
        }
        Command::ProbeIndependence { tasks, variants, budget, out } => {
            let tasks: Vec<Task> = read(tasks)?;
            let index: BTreeMap<&str, &Task> = tasks.iter().map(|t| (t.task_id.as_str(), t)).collect();
            let mut variants: Vec<BuggyVariant> = read(variants)?;
            let mut tally: BTreeMap<String, usize> = BTreeMap::new();
            for v in &mut variants {
                let task = index.get(v.task_id.as_str()).with_context(|| format!("{}: unknown task", v.bug_id))?;
                let verdict = independence_probe(v, &task.suite, *budget, &sb)?;
                *tally.entry(format!("{verdict:?}").to_lowercase()).or_default() += 1;
                v.independence = Some(verdict);
            }
            write(out, &variants)?;
            eprintln!("{tally:?}");
        }
        Command::Subsample { variants, out, multi } => {
            let mut all: Vec<BuggyVariant> = Vec::new();
            for p in variants {
                all.extend(read::<BuggyVariant>(p)?);
            }
            let m3 = if *multi { cfg.multi.compose.m3 } else { cfg.single.compose.m3 };
            let kept = subsample(&all, m3, cfg.seed);
            write(out, &kept)?;
            eprintln!("kept {} of {}", kept.len(), all.len());
        }
        Command::FilterEasy { variants, records, threshold, out } => {
            let variants: Vec<BuggyVariant> = read(variants)?;
            let mut rows = Vec::new();
            for p in records {
                rows.extend(read::<EvalRecord>(p)?.into_iter().map(|r| (r.bug_id, r.system, r.score)));
            }
            let outcome = easy_filter(&rows, threshold.unwrap_or(cfg.easy_threshold))?;
            let kept: Vec<&BuggyVariant> = variants.iter().filter(|v| outcome.retained.contains(&v.bug_id)).collect();
            write(out, &kept)?;
            eprintln!("kept {}, removed {}", kept.len(), outcome.removed);
        }
        Command::RewriteGt { tasks, model, tries, out } => {
            let model = model.clone().or_else(env_model).context("no model given and PDB_PROVIDER_MODEL is unset")?;
            let client = http_client(workers)?;
            let mut rewritten = Vec::new();
            for task in read::<Task>(tasks)? {
                match rewrite_ground_truth(&task, &client, &model, &sb, *tries) {
                    Ok(t) => rewritten.push(t),
                    Err(e) => log::warn!("{}: {e}; dropped", task.task_id),
                }
            }
            write(out, &rewritten)?;
            eprintln!("{} tasks rewritten", rewritten.len());
        }
        Command::Evaluate { tasks, variants, system, mode, prompt, scoring: s, out } => {
            let tasks: Vec<Task> = read(tasks)?;
            let variants: Vec<BuggyVariant> = read(variants)?;
            let debugger = debugger(system, workers)?;
            let (epsilon, stride) = scoring(s, &cfg);
            let mut eval = EvalConfig::new((*mode).into(), (*prompt).into(), epsilon, stride);
            eval.max_attempts = cfg.max_attempts;
            let outcome = run_benchmark(&variants, &tasks, debugger.as_ref(), &eval, &sb, Some(out), workers)?;
            if !outcome.skipped.is_empty() {
                eprintln!("skipped {} examples with hidden suites", outcome.skipped.len());
            }
            summarize(&outcome.records, None)?;
        }
        Command::Score { tasks, variants, records, scoring: s, out } => {
            let tasks: Vec<Task> = read(tasks)?;
            let variants: Vec<BuggyVariant> = read(variants)?;
            let records: Vec<EvalRecord> = read(records)?;
            let (epsilon, stride) = scoring(s, &cfg);
            let rescored = rescore(&records, &variants, &tasks, epsilon, stride, &sb)?;
            write(out, &rescored)?;
            summarize(&rescored, None)?;
        }
        Command::Report { records, json } => {
            let mut all: Vec<EvalRecord> = Vec::new();
            for p in records {
                all.extend(read::<EvalRecord>(p)?);
            }
            summarize(&all, json.as_deref())?;
        }
        Command::ToyTasks { out, limit } => {
            let mut tasks = toy_tasks();
            tasks.truncate(limit.unwrap_or(tasks.len()));
            write(out, &tasks)?;
            eprintln!("{} toy tasks", tasks.len());
        }
    }
    Ok(())
}

fn main() -> std::process::ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::ExitCode::FAILURE
        }
    }
}
