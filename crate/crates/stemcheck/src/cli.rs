//! Command-line surface. `run` returns the process exit status.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context as _, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::engine::{check_full_compliance, EngineOptions, Verdict};
use crate::gen::{balanced_model, generate_instance, random_obligation, GenParams};
use crate::io::{self, InstanceDocument, ModelDocument, ReportDocument};
use crate::model::{compute_trace, ModelError, ProcessModel, DEFAULT_EXECUTION_BUDGET};
use crate::obligation::ConditionalObligation;
use crate::oracle::{classify_process_compliance, ComplianceLevel};

pub const EXIT_FULLY_COMPLIANT: i32 = 0;
pub const EXIT_NOT_FULLY_COMPLIANT: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_DIVERGENCE: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Engine,
    Oracle,
    Both,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::Engine => "engine",
            Mode::Oracle => "oracle",
            Mode::Both => "both",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Debug, Parser)]
#[command(
    name = "stemcheck",
    version,
    about = "Full-compliance checking of structured process models"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Common {
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Upper bound on executions the oracle may enumerate.
    #[arg(long, default_value_t = DEFAULT_EXECUTION_BUDGET)]
    budget: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide full compliance of a model with an obligation framework.
    Check {
        model: PathBuf,
        obligations: PathBuf,
        #[arg(long, value_enum, default_value = "engine")]
        mode: Mode,
        #[arg(long)]
        no_early_exit: bool,
        #[command(flatten)]
        common: Common,
    },
    /// List every execution with its trace.
    Enumerate {
        model: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Classify compliance by exhaustive enumeration.
    Oracle {
        model: PathBuf,
        obligations: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Generate a seeded random model and obligations.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        max_tasks: usize,
        #[arg(long, default_value_t = 3)]
        max_depth: usize,
        #[arg(long, default_value_t = 4)]
        atoms: usize,
        #[arg(long, default_value_t = 1)]
        obligations: usize,
        /// Write the model document here instead of printing the instance.
        #[arg(long)]
        model_out: Option<PathBuf>,
        #[arg(long)]
        obligations_out: Option<PathBuf>,
    },
    /// Engine cost on balanced models of growing size, and the oracle on
    /// the largest. Every stem is walked to the root.
    Bench {
        #[arg(long, default_value_t = 10_000)]
        max_tasks: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn load(model: &Path, obligations: &Path) -> Result<(ProcessModel, Vec<ConditionalObligation>)> {
    let m =
        io::parse_model_file(&read(model)?).with_context(|| format!("in {}", model.display()))?;
    let obs = io::parse_obligations_file(&read(obligations)?)
        .with_context(|| format!("in {}", obligations.display()))?;
    Ok((m, obs))
}

fn exit_for(full: bool) -> i32 {
    if full {
        EXIT_FULLY_COMPLIANT
    } else {
        EXIT_NOT_FULLY_COMPLIANT
    }
}

/// Parses `args` (program name first), runs the command and writes its
/// output to `out`. Errors are written to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => EXIT_ERROR,
            };
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_ERROR
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Check {
            model,
            obligations,
            mode,
            no_early_exit,
            common,
        } => {
            let (m, obs) = load(&model, &obligations)?;
            check(
                &m,
                &obs,
                mode,
                EngineOptions {
                    early_exit: !no_early_exit,
                },
                &common,
                out,
            )
        }
        Command::Oracle {
            model,
            obligations,
            common,
        } => {
            let (m, obs) = load(&model, &obligations)?;
            check(
                &m,
                &obs,
                Mode::Oracle,
                EngineOptions::default(),
                &common,
                out,
            )
        }
        Command::Enumerate { model, common } => {
            let m = io::parse_model_file(&read(&model)?)?;
            enumerate(&m, &common, out)?;
            Ok(0)
        }
        Command::Gen {
            seed,
            max_tasks,
            max_depth,
            atoms,
            obligations,
            model_out,
            obligations_out,
        } => {
            let p = GenParams {
                max_tasks,
                max_depth,
                atom_count: atoms,
                obligations,
                ..GenParams::default()
            };
            let inst = generate_instance(seed, &p);
            if model_out.is_none() && obligations_out.is_none() {
                let doc = InstanceDocument {
                    seed,
                    model: ModelDocument::from(&inst.model),
                    obligations: inst.obligations,
                };
                writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
            } else {
                if let Some(p) = model_out {
                    std::fs::write(&p, io::print_model(&inst.model))?;
                }
                if let Some(p) = obligations_out {
                    std::fs::write(&p, io::print_obligations(&inst.obligations))?;
                }
            }
            Ok(0)
        }
        Command::Bench {
            max_tasks,
            seed,
            common,
        } => {
            bench(max_tasks, seed, &common, out)?;
            Ok(0)
        }
    }
}

fn check(
    m: &ProcessModel,
    obs: &[ConditionalObligation],
    mode: Mode,
    options: EngineOptions,
    common: &Common,
    out: &mut dyn Write,
) -> Result<i32> {
    let engine = match mode {
        Mode::Engine | Mode::Both => Some(check_full_compliance(m, obs, options)?),
        Mode::Oracle => None,
    };
    let oracle = match mode {
        Mode::Oracle | Mode::Both => Some(classify_process_compliance(m, obs, common.budget)?),
        Mode::Engine => None,
    };
    let report = ReportDocument::new(mode.name(), m, obs, engine.as_ref(), oracle.as_ref());
    match common.format {
        Format::Text => write!(out, "{}", report.to_text())?,
        Format::Machine => writeln!(out, "{}", report.to_json())?,
    }
    if let (Some(e), Some(o)) = (&engine, &oracle) {
        if (e.verdict == Verdict::FullyCompliant) != (o.level == ComplianceLevel::Full) {
            return Ok(EXIT_DIVERGENCE);
        }
    }
    Ok(exit_for(report.is_fully_compliant()))
}

#[derive(Serialize)]
struct TraceRow {
    execution: Vec<String>,
    states: Vec<Vec<String>>,
}

fn enumerate(m: &ProcessModel, common: &Common, out: &mut dyn Write) -> Result<()> {
    match common.format {
        Format::Text => write!(out, "{}", io::render_traces(m, common.budget)?)?,
        Format::Machine => {
            let mut rows = Vec::new();
            for exe in m.executions(common.budget)? {
                let trace = compute_trace(m, &exe)?;
                rows.push(TraceRow {
                    execution: m.ids(&exe).into_iter().map(str::to_string).collect(),
                    states: trace
                        .steps
                        .iter()
                        .map(|s| s.state.iter().map(|l| l.to_string()).collect())
                        .collect(),
                });
            }
            rows.sort_by(|a, b| a.execution.cmp(&b.execution));
            writeln!(out, "{}", serde_json::to_string_pretty(&rows)?)?;
        }
    }
    Ok(())
}

/// One row of the scaling table.
#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub tasks: usize,
    pub nodes: usize,
    pub aggregations: usize,
    pub trigger_leaves: usize,
    /// Largest count of a single (constraint, trigger leaf) run.
    pub max_per_run: usize,
    pub millis: f64,
    pub verdict: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub obligation: String,
    pub rows: Vec<BenchRow>,
    pub oracle_budget: usize,
    /// `None` when the oracle ran out of budget.
    pub oracle_executions: Option<usize>,
}

/// Engine runs on balanced models of 10, 100, ... up to `max_tasks`
/// tasks, then one oracle attempt on the largest.
pub fn bench_report(max_tasks: usize, seed: u64, budget: usize) -> Result<BenchReport> {
    let options = EngineOptions { early_exit: false };
    let mut sizes: Vec<usize> = std::iter::successors(Some(10usize), |n| n.checked_mul(10))
        .take_while(|&n| n < max_tasks)
        .collect();
    sizes.push(max_tasks.max(1));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = balanced_model(seed, sizes[0], 4);
    let ob = random_obligation(&mut rng, &first);
    let mut rows = Vec::new();
    let mut largest = first;
    for &n in &sizes {
        let m = balanced_model(seed, n, 4);
        let t0 = Instant::now();
        let r = check_full_compliance(&m, std::slice::from_ref(&ob), options)?;
        rows.push(BenchRow {
            tasks: n,
            nodes: r.nodes,
            aggregations: r.aggregations,
            trigger_leaves: r.trigger_leaves,
            max_per_run: r
                .obligations
                .iter()
                .flat_map(|o| o.outcomes.iter().map(|l| l.aggregations))
                .max()
                .unwrap_or(0),
            millis: t0.elapsed().as_secs_f64() * 1e3,
            verdict: r.verdict.text(),
        });
        largest = m;
    }
    let oracle_executions =
        match classify_process_compliance(&largest, std::slice::from_ref(&ob), budget) {
            Ok(v) => Some(v.executions),
            Err(ModelError::ExecutionBudgetExceeded(_)) => None,
            Err(e) => return Err(e.into()),
        };
    Ok(BenchReport {
        obligation: ob.to_string(),
        rows,
        oracle_budget: budget,
        oracle_executions,
    })
}

fn bench(max_tasks: usize, seed: u64, common: &Common, out: &mut dyn Write) -> Result<()> {
    let r = bench_report(max_tasks, seed, common.budget)?;
    match common.format {
        Format::Machine => writeln!(out, "{}", serde_json::to_string_pretty(&r)?)?,
        Format::Text => {
            writeln!(out, "obligation {}", r.obligation)?;
            writeln!(
                out,
                "{:>8} {:>8} {:>12} {:>8} {:>8} {:>10}  verdict",
                "tasks", "nodes", "aggregations", "leaves", "max/run", "ms"
            )?;
            for row in &r.rows {
                writeln!(
                    out,
                    "{:>8} {:>8} {:>12} {:>8} {:>8} {:>10.2}  {}",
                    row.tasks,
                    row.nodes,
                    row.aggregations,
                    row.trigger_leaves,
                    row.max_per_run,
                    row.millis,
                    row.verdict
                )?;
            }
            match r.oracle_executions {
                Some(n) => writeln!(
                    out,
                    "oracle: {n} executions within budget {}",
                    r.oracle_budget
                )?,
                None => writeln!(
                    out,
                    "oracle: budget of {} executions exceeded",
                    r.oracle_budget
                )?,
            }
        }
    }
    Ok(())
}
