use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use coordforge::decoder::read_samples;
use coordforge::geometry::{extract_pairs, read_paths, DEFAULT_RESOLUTION};
use coordforge::harness::{bench, eval_samples, read_bench_csv, report, write_bench_csv, write_report};
use coordforge::instances::{
    export_dataset, gen_dataset, gen_stitched, import_dataset, label_instance, GenParams,
};
use coordforge::solvers::{export_milp, solve, SolverConfig, SolverKind};
use coordforge::{Objective, ProblemInstance};

const EXIT_VALIDATION: u8 = 2;
const EXIT_DEGRADED: u8 = 3;

#[derive(Parser)]
#[command(name = "coordforge", version, about = "Multi-robot coordination on coordination graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate and label a random dataset (JSON Lines).
    Gen(GenArgs),
    /// Build an instance from a JSON path file.
    Extract(ExtractArgs),
    /// Solve one instance and write the assignment as JSON.
    Solve(SolveArgs),
    /// Run solvers over a dataset and write per-run CSV rows.
    Bench(BenchArgs),
    /// Decode and score externally produced bid samples for one instance.
    EvalSamples(EvalArgs),
    /// Write the mixed-integer program for an instance in LP format.
    ExportMilp(MilpArgs),
    /// Aggregate a bench CSV into summary tables.
    Report(ReportArgs),
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, default_value = "avg")]
    objective: Objective,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Wall-clock budget per solve, seconds.
    #[arg(long, default_value_t = 60.0)]
    time_budget: f64,
    /// Number of best assignments kept by the exact solver.
    #[arg(long, default_value_t = 1)]
    top_l: usize,
    /// Decoded samples drawn by the random baseline.
    #[arg(long, default_value_t = 1)]
    random_samples: usize,
    #[arg(long, default_value_t = 100)]
    cmaes_generations: usize,
    #[arg(long, default_value_t = 1000)]
    bbts_candidates: usize,
}

impl SolverArgs {
    fn config(&self) -> Result<SolverConfig> {
        let config = SolverConfig {
            objective: self.objective,
            seed: self.seed,
            time_budget: self.time_budget,
            top_l: self.top_l,
            random_samples: self.random_samples,
            cmaes_generations: self.cmaes_generations,
            bbts_candidates: self.bbts_candidates,
            ..SolverConfig::default()
        };
        config.check()?;
        Ok(config)
    }
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Robot count range `MIN:MAX`.
    #[arg(long, default_value = "2:8", value_parser = parse_range)]
    robots: (usize, usize),
    /// Maximum number of interfering sections per instance.
    #[arg(long, default_value_t = 14)]
    sections: usize,
    #[arg(long, default_value_t = 60.0)]
    horizon: f64,
    #[arg(long)]
    out: PathBuf,
    /// Stitch several generated instances into each record.
    #[arg(long)]
    stitch: bool,
    #[arg(long, default_value_t = 10, requires = "stitch")]
    parts: usize,
    #[arg(long, default_value_t = 0, requires = "stitch")]
    extra_edges: usize,
    /// Larger instances are labelled with tabu search instead of the exact solver.
    #[arg(long, default_value_t = 14)]
    exact_max_edges: usize,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct ExtractArgs {
    paths: PathBuf,
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    resolution: usize,
    /// Density assigned to every node.
    #[arg(long, default_value_t = 1)]
    density: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, default_value = "exact")]
    solver: SolverKind,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    solver_args: SolverArgs,
}

#[derive(Args)]
struct BenchArgs {
    dataset: PathBuf,
    /// Comma-separated solver names.
    #[arg(long, value_delimiter = ',', default_value = "random,fcfs,bbts,tabu,cmaes")]
    solvers: Vec<SolverKind>,
    #[arg(long)]
    out: PathBuf,
    /// Also write summary tables to this directory.
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct EvalArgs {
    dataset: PathBuf,
    /// Dataset record id.
    #[arg(long)]
    id: u64,
    #[arg(long)]
    samples: PathBuf,
    /// Use the first N samples for the instance.
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Defaults to the record's objective.
    #[arg(long)]
    objective: Option<Objective>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MilpArgs {
    instance: PathBuf,
    #[arg(long, default_value = "avg")]
    objective: Objective,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    csv: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn parse_range(s: &str) -> std::result::Result<(usize, usize), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected MIN:MAX")?;
    let lo = lo.trim().parse().map_err(|e| format!("{e}"))?;
    let hi = hi.trim().parse().map_err(|e| format!("{e}"))?;
    Ok((lo, hi))
}

fn read_instance(path: &Path) -> Result<ProblemInstance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let inst = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(inst)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}

/// Returns whether the result was degraded by a time budget.
fn run(command: Command) -> Result<bool> {
    match command {
        Command::Gen(args) => {
            let params = GenParams {
                robots_min: args.robots.0,
                robots_max: args.robots.1,
                sections_max: args.sections,
                time_horizon: args.horizon,
                seed: args.solver.seed,
                ..GenParams::default()
            };
            let config = args.solver.config()?;
            let records = if args.stitch {
                (0..args.n as u64)
                    .map(|k| {
                        let p = GenParams {
                            seed: params.seed.wrapping_add(k),
                            ..params.clone()
                        };
                        let inst = gen_stitched(&p, args.parts, args.extra_edges)?;
                        label_instance(k, inst, &config, args.exact_max_edges)
                    })
                    .collect::<coordforge::Result<Vec<_>>>()?
            } else {
                gen_dataset(&params, args.n, &config, args.exact_max_edges)?
            };
            export_dataset(&records, &args.out)?;
            let heuristic = records.iter().filter(|r| r.oracle_cost().is_none()).count();
            eprintln!(
                "wrote {} records to {} ({heuristic} labelled heuristically)",
                records.len(),
                args.out.display()
            );
            Ok(false)
        }
        Command::Extract(args) => {
            let paths = read_paths(&args.paths)?;
            let pairs = extract_pairs(&paths, args.resolution)?;
            if pairs.is_empty() {
                bail!("paths do not interfere; nothing to coordinate");
            }
            let inst = ProblemInstance::from_pairs(&pairs, args.density)?;
            eprintln!(
                "{} robots, {} nodes, {} edges",
                inst.robots().len(),
                inst.num_nodes(),
                inst.num_edges()
            );
            emit(args.out.as_deref(), &serde_json::to_string_pretty(&inst)?)?;
            Ok(false)
        }
        Command::Solve(args) => {
            let inst = read_instance(&args.instance)?;
            let config = args.solver_args.config()?;
            let out = solve(args.solver, &inst, &config)?;
            let doc = json!({
                "solver": args.solver,
                "objective": config.objective,
                "cost": out.cost,
                "assignment": out.best,
                "top": out.top,
                "stats": out.stats,
            });
            emit(args.out.as_deref(), &serde_json::to_string_pretty(&doc)?)?;
            Ok(out.stats.incomplete)
        }
        Command::Bench(args) => {
            let dataset = import_dataset(&args.dataset)?;
            let config = args.solver.config()?;
            let records = bench(&dataset, &args.solvers, &config)?;
            write_bench_csv(&records, &args.out)?;
            if let Some(dir) = &args.report {
                fs::create_dir_all(dir)?;
                write_report(&report(&records), dir)?;
            }
            let incomplete = records.iter().filter(|r| r.incomplete).count();
            eprintln!("{} runs, {incomplete} hit the time budget", records.len());
            Ok(incomplete > 0)
        }
        Command::EvalSamples(args) => {
            let dataset = import_dataset(&args.dataset)?;
            let Some(record) = dataset.iter().find(|r| r.id == args.id) else {
                bail!("dataset has no record with id {}", args.id);
            };
            let samples: Vec<_> = read_samples(&args.samples)?
                .into_iter()
                .filter(|s| s.instance == args.id)
                .map(|s| s.sample())
                .collect();
            if samples.is_empty() {
                bail!("sample file has no samples for instance {}", args.id);
            }
            let objective = args.objective.unwrap_or(record.objective);
            let eval = eval_samples(&record.instance, &samples, objective, args.n)?;
            // stored costs only apply to the objective they were labelled with
            let reference = (objective == record.objective)
                .then(|| record.reference_cost())
                .flatten();
            let doc = json!({
                "instance": args.id,
                "objective": objective,
                "samples_used": eval.samples_used(),
                "cost": eval.cost,
                "best_index": eval.best_index,
                "reference_cost": reference,
                "optimality_ratio": reference.map(|r| coordforge::harness::optimality_ratio(r, eval.cost)),
                "decode_s": eval.total_decode_s(),
                "evaluate_s": eval.total_evaluate_s(),
                "assignment": eval.best,
                "best_so_far": eval.per_sample.iter().map(|t| t.best_so_far).collect::<Vec<_>>(),
            });
            emit(args.out.as_deref(), &serde_json::to_string_pretty(&doc)?)?;
            Ok(false)
        }
        Command::ExportMilp(args) => {
            let inst = read_instance(&args.instance)?;
            emit(args.out.as_deref(), &export_milp(&inst, args.objective))?;
            Ok(false)
        }
        Command::Report(args) => {
            let records = read_bench_csv(&args.csv)?;
            fs::create_dir_all(&args.out)?;
            write_report(&report(&records), &args.out)?;
            eprintln!("wrote summary.csv and buckets.csv to {}", args.out.display());
            Ok(false)
        }
    }
}

fn is_validation(err: &anyhow::Error) -> bool {
    use coordforge::Error as E;
    err.chain().any(|cause| {
        if cause.is::<serde_json::Error>() {
            return true;
        }
        matches!(
            cause.downcast_ref::<E>(),
            Some(
                E::InvalidPair { .. }
                    | E::InvalidInstance(_)
                    | E::InvalidPath { .. }
                    | E::NonPositiveBid { .. }
                    | E::DimensionMismatch { .. }
                    | E::IncompleteAssignment { .. }
                    | E::Infeasible(_)
                    | E::EventOrderContradiction
                    | E::InvalidParams(_)
                    | E::Parse { .. }
                    | E::Json(_)
            )
        )
    })
}

fn is_broken_pipe(err: &anyhow::Error) -> bool {
    err.chain()
        .filter_map(|c| c.downcast_ref::<io::Error>())
        .any(|e| e.kind() == io::ErrorKind::BrokenPipe)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("warning: time budget exhausted; result may be suboptimal");
            ExitCode::from(EXIT_DEGRADED)
        }
        Err(err) if is_broken_pipe(&err) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if is_validation(&err) {
                ExitCode::from(EXIT_VALIDATION)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
