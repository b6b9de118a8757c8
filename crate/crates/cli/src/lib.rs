//! Benchmark harness around the `ubqp` solver: solve single instances,
//! run manifests of instances with best-known references, generate random
//! instances, and emit anytime trajectory CSVs.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ubqp::instance::{self, WeightSpec};
use ubqp::search::{self, Clock, DiversifyStrategy, LambdaPolicy, LogicalClock, WallClock};
use ubqp::{QuboInstance, SearchConfig, SearchResult};

/// Errors mapped to process exit codes: usage → 2, runtime/data → 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => m,
        }
    }
}

#[derive(Parser)]
#[command(name = "ubqp", version, about = "Multi-start heuristic solver for binary quadratic problems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Solve one instance and print a summary line.
    Solve(SolveArgs),
    /// Run every instance in a manifest and print per-run and average rows.
    Bench(BenchArgs),
    /// Generate a seeded random instance file.
    Gen(GenArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Orlib,
    Single,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DiversifyArg {
    Perturb,
    Blend,
}

/// Search flags shared by `solve` and `bench`.
#[derive(Args, Clone)]
pub struct SearchFlags {
    /// Instance file format.
    #[arg(long, value_enum, default_value_t = FormatArg::Orlib)]
    pub format: FormatArg,
    /// Number of diversify-screen-ascend iterations.
    #[arg(long, default_value_t = 2500)]
    pub iterations: usize,
    /// Wall-time budget in seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Random starts used to estimate the screening mean.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Screening λ: "paper" (start/mean, clamped) or a fixed float.
    #[arg(long, default_value = "paper")]
    pub lambda: String,
    /// Flip budget per ascent (default 10·n).
    #[arg(long)]
    pub max_flips: Option<usize>,
    #[arg(long, value_enum, default_value_t = DiversifyArg::Perturb)]
    pub diversify: DiversifyArg,
    /// Use a deterministic logical clock instead of wall time, making
    /// summary and trajectory output byte-reproducible.
    #[arg(long)]
    pub fixed_clock: bool,
}

#[derive(Args)]
pub struct SolveArgs {
    /// Instance file (plain or gzip).
    #[arg(long)]
    pub instance: PathBuf,
    /// 1-based instance ordinal within a multi-instance file.
    #[arg(long, default_value_t = 1)]
    pub index: usize,
    /// Best-known objective value for gap reporting.
    #[arg(long, allow_negative_numbers = true)]
    pub best_known: Option<i64>,
    /// Write the anytime trajectory CSV here.
    #[arg(long)]
    pub trajectory: Option<PathBuf>,
    #[command(flatten)]
    pub flags: SearchFlags,
}

#[derive(Args)]
pub struct BenchArgs {
    /// Tab-separated manifest: instance_path, index, best_known.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Run up to N manifest entries concurrently.
    #[arg(long)]
    pub parallel: Option<usize>,
    #[command(flatten)]
    pub flags: SearchFlags,
}

#[derive(Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub density: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub low: i64,
    #[arg(long, allow_negative_numbers = true)]
    pub high: i64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

/// One benchmark run outcome, printed as a tab-separated summary line.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub instance_name: String,
    pub seed: u64,
    pub best_value: i64,
    pub reference_value: Option<i64>,
    pub gap_percent: Option<f64>,
    pub time_to_best: f64,
    pub iterations_run: usize,
    pub wall_time: f64,
}

impl RunRecord {
    pub fn from_result(
        name: &str,
        seed: u64,
        result: &SearchResult,
        reference: Option<i64>,
    ) -> Self {
        let gap_percent = reference.map(|r| {
            assert!(r != 0, "reference value must be nonzero for gaps");
            (r - result.best_value) as f64 / r as f64 * 100.0
        });
        let time_to_best = result
            .trajectory
            .last()
            .map(|p| p.elapsed)
            .unwrap_or(0.0);
        RunRecord {
            instance_name: name.to_string(),
            seed,
            best_value: result.best_value,
            reference_value: reference,
            gap_percent,
            time_to_best,
            iterations_run: result.iterations_run,
            wall_time: result.wall_time,
        }
    }

    /// Tab-separated fields; absent optionals render as "-".
    pub fn summary_line(&self) -> String {
        let reference = self
            .reference_value
            .map(|v| v.to_string())
            .unwrap_or_else(|| "-".to_string());
        let gap = self
            .gap_percent
            .map(|g| format!("{g:.2}"))
            .unwrap_or_else(|| "-".to_string());
        format!(
            "{}\t{}\t{}\t{}\t{}\t{:.3}\t{}\t{:.3}",
            self.instance_name,
            self.seed,
            self.best_value,
            reference,
            gap,
            self.time_to_best,
            self.iterations_run,
            self.wall_time,
        )
    }
}

/// Writes the trajectory CSV: `elapsed_s,iteration,best_value,percent_of_reference`.
/// The percent column is empty when no reference is given.
pub fn write_trajectory_csv(
    result: &SearchResult,
    reference: Option<i64>,
    sink: &mut impl Write,
) -> std::io::Result<()> {
    writeln!(sink, "elapsed_s,iteration,best_value,percent_of_reference")?;
    for p in &result.trajectory {
        let mut line = String::new();
        write!(line, "{:.3},{},{},", p.elapsed, p.iteration, p.best_value).unwrap();
        if let Some(r) = reference {
            write!(line, "{:.4}", p.best_value as f64 / r as f64 * 100.0).unwrap();
        }
        writeln!(sink, "{line}")?;
    }
    Ok(())
}

fn parse_lambda(s: &str) -> Result<LambdaPolicy, CliError> {
    if s == "paper" {
        return Ok(LambdaPolicy::PaperClamped);
    }
    s.parse::<f64>()
        .map(LambdaPolicy::Fixed)
        .map_err(|_| CliError::Usage(format!("--lambda must be 'paper' or a float, got '{s}'")))
}

fn build_config(flags: &SearchFlags, seed: u64) -> Result<SearchConfig, CliError> {
    if flags.iterations < 1 {
        return Err(CliError::Usage("iterations must be ≥ 1".into()));
    }
    if flags.samples < 1 {
        return Err(CliError::Usage("samples must be ≥ 1".into()));
    }
    Ok(SearchConfig {
        num_iterations: flags.iterations,
        time_limit: flags.time_limit,
        num_samples: flags.samples,
        seed,
        lambda_policy: parse_lambda(&flags.lambda)?,
        max_flips: flags.max_flips,
        diversify_strategy: match flags.diversify {
            DiversifyArg::Perturb => DiversifyStrategy::Perturb,
            DiversifyArg::Blend => DiversifyStrategy::Blend,
        },
    })
}

fn make_clock(fixed: bool) -> Box<dyn Clock> {
    if fixed {
        Box::new(LogicalClock::new(0.001))
    } else {
        Box::new(WallClock::new())
    }
}

fn load_instance(path: &Path, format: FormatArg, index: usize) -> Result<QuboInstance, CliError> {
    if index < 1 {
        return Err(CliError::Usage("index must be ≥ 1".into()));
    }
    match format {
        FormatArg::Single => instance::load_single_file(path)
            .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display()))),
        FormatArg::Orlib => {
            let instances = instance::load_orlib_file(path)
                .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
            instances.into_iter().nth(index - 1).ok_or_else(|| {
                CliError::Runtime(format!(
                    "{}: instance index {index} beyond file contents",
                    path.display()
                ))
            })
        }
    }
}

fn execute_run(
    inst: &QuboInstance,
    flags: &SearchFlags,
    seed: u64,
    reference: Option<i64>,
) -> Result<(RunRecord, SearchResult), CliError> {
    if reference == Some(0) {
        return Err(CliError::Usage("best-known reference must be nonzero".into()));
    }
    let config = build_config(flags, seed)?;
    let mut clock = make_clock(flags.fixed_clock);
    let result = search::run(inst, &config, clock.as_mut());
    // Re-check the reported incumbent before printing.
    let recheck = ubqp::eval::evaluate(inst, result.best.bits());
    if recheck != result.best_value {
        return Err(CliError::Runtime(format!(
            "internal error: incumbent re-evaluation {recheck} != reported {}",
            result.best_value
        )));
    }
    let record = RunRecord::from_result(inst.name(), seed, &result, reference);
    Ok((record, result))
}

pub fn cmd_solve(args: &SolveArgs, out: &mut impl Write) -> Result<(), CliError> {
    let inst = load_instance(&args.instance, args.flags.format, args.index)?;
    let (record, result) = execute_run(&inst, &args.flags, args.flags.seed, args.best_known)?;
    if let Some(path) = &args.trajectory {
        let mut file = fs::File::create(path)
            .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
        write_trajectory_csv(&result, args.best_known, &mut file)
            .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    }
    writeln!(out, "{}", record.summary_line())
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    Ok(())
}

#[derive(Debug, Clone)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub index: usize,
    pub best_known: i64,
    pub line: usize,
}

/// Parses the benchmark manifest: one `path<TAB>index<TAB>best_known`
/// entry per line, `#` comments and blank lines ignored.
pub fn parse_manifest(text: &str) -> Result<Vec<ManifestEntry>, CliError> {
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(CliError::Runtime(format!(
                "manifest line {}: expected 3 tab-separated fields, got {}",
                idx + 1,
                fields.len()
            )));
        }
        let index = fields[1].trim().parse::<usize>().map_err(|_| {
            CliError::Runtime(format!("manifest line {}: bad index '{}'", idx + 1, fields[1]))
        })?;
        let best_known = fields[2].trim().parse::<i64>().map_err(|_| {
            CliError::Runtime(format!(
                "manifest line {}: bad best-known value '{}'",
                idx + 1,
                fields[2]
            ))
        })?;
        entries.push(ManifestEntry {
            path: PathBuf::from(fields[0].trim()),
            index,
            best_known,
            line: idx + 1,
        });
    }
    Ok(entries)
}

fn run_entry(entry: &ManifestEntry, flags: &SearchFlags) -> Result<RunRecord, CliError> {
    let inst = load_instance(&entry.path, flags.format, entry.index)?;
    execute_run(&inst, flags, flags.seed, Some(entry.best_known)).map(|(record, _)| record)
}

pub fn cmd_bench(
    args: &BenchArgs,
    out: &mut impl Write,
    err: &mut impl Write,
) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.manifest)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", args.manifest.display())))?;
    let entries = parse_manifest(&text)?;
    if entries.is_empty() {
        return Err(CliError::Runtime("empty manifest".into()));
    }

    let outcomes: Vec<Result<RunRecord, CliError>> = match args.parallel {
        Some(workers) if workers > 1 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            pool.install(|| {
                use rayon::prelude::*;
                entries
                    .par_iter()
                    .map(|e| run_entry(e, &args.flags))
                    .collect()
            })
        }
        _ => entries.iter().map(|e| run_entry(e, &args.flags)).collect(),
    };

    let mut failed = false;
    let mut gaps = Vec::new();
    let mut times = Vec::new();
    for (entry, outcome) in entries.iter().zip(&outcomes) {
        match outcome {
            Ok(record) => {
                writeln!(out, "{}", record.summary_line())
                    .map_err(|e| CliError::Runtime(e.to_string()))?;
                if let Some(g) = record.gap_percent {
                    gaps.push(g);
                }
                times.push(record.time_to_best);
            }
            Err(e) => {
                failed = true;
                writeln!(err, "manifest line {}: {}", entry.line, e.message())
                    .map_err(|e| CliError::Runtime(e.to_string()))?;
            }
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
    writeln!(
        out,
        "AVERAGE\t-\t-\t-\t{:.2}\t{:.3}\t-\t-",
        mean(&gaps),
        mean(&times)
    )
    .map_err(|e| CliError::Runtime(e.to_string()))?;
    if failed {
        return Err(CliError::Runtime("one or more manifest entries failed".into()));
    }
    Ok(())
}

pub fn cmd_gen(args: &GenArgs) -> Result<(), CliError> {
    let weights = WeightSpec::new(args.low, args.high)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let inst = instance::generate_random(args.n, args.density, weights, args.seed)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut file = fs::File::create(&args.out)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", args.out.display())))?;
    inst.write_single(&mut file)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", args.out.display())))?;
    Ok(())
}
