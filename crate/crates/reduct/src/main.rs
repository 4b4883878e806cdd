//! Command-line front end: ingest data, run reductions, verify against the
//! object-level oracles, generate synthetic tables, and emit timing tables.
//! All orchestration lives in the library; this binary parses flags, wires
//! the pieces together, and writes one JSON report per run to stdout (or
//! `--output`). Diagnostics go to stderr; a nonzero exit means no result.

use std::fs::File;
use std::io::{self, BufReader, Write};
use std::num::NonZeroUsize;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use reduct::engine::{self, ReductionConfig};
use reduct::error::{Error, Result};
use reduct::granule::build_granularity;
use reduct::measures::{self, Metric};
use reduct::report::{
    attribute_refs, significance_entries, BenchReport, BenchRow, ConfigEcho, CoreReport,
    DatasetSummary, EvaluateReport, EvaluateVerify, ReductionSummary, RunReport, VerifySummary,
};
use reduct::synth::SyntheticSpec;
use reduct::table::{
    parse_table, AttributeSubset, ColumnSelector, DecisionTable, HeaderMode, MissingPolicy,
    Parsed, SchemaConfig,
};

const VERIFY_TOLERANCE: f64 = 1e-9;

#[derive(Parser)]
#[command(name = "reduct", version, about = "Attribute reduction for categorical decision tables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Select a reduct by parallel forward selection
    Reduce(ReduceArgs),
    /// Compute the attribute core and per-attribute significances
    Core(CoreArgs),
    /// Evaluate a subset under one measure
    Evaluate(EvaluateArgs),
    /// Generate a seeded uniform random table as CSV
    Gen(GenArgs),
    /// Time the same reduction across parallelism levels and chunk counts
    Bench(BenchArgs),
}

#[derive(Args)]
struct SchemaArgs {
    /// Input file; "-" reads stdin
    input: PathBuf,
    /// Header handling: auto, yes or no
    #[arg(long, default_value = "auto")]
    header: String,
    /// Decision column by name or 0-based index (default: last column)
    #[arg(long = "decision-col")]
    decision_col: Option<String>,
    /// Missing-value policy: keep or drop
    #[arg(long, default_value = "keep")]
    missing: String,
    /// Token treated as a missing value
    #[arg(long = "missing-token", default_value = "?")]
    missing_token: String,
    /// Field delimiter: one character, or comma|tab|space|semicolon
    #[arg(long, default_value = ",")]
    delimiter: String,
}

#[derive(Args)]
struct RunArgs {
    /// Significance measure: pr, sce, lce or cce
    #[arg(long, default_value = "pr")]
    metric: String,
    /// Core threshold on inner significance
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    /// Absolute stopping tolerance on the evaluation value
    #[arg(long = "stop-tol", default_value_t = 1e-10)]
    stop_tol: f64,
    /// Candidate evaluations in flight (default: available cores)
    #[arg(long = "model-parallelism")]
    model_parallelism: Option<usize>,
    /// Chunks per evaluation fold (default: available cores)
    #[arg(long = "data-chunks")]
    data_chunks: Option<usize>,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ReduceArgs {
    #[command(flatten)]
    schema: SchemaArgs,
    #[command(flatten)]
    run: RunArgs,
    /// Re-run sequentially on object-level partitions and fail on mismatch
    #[arg(long)]
    verify: bool,
}

#[derive(Args)]
struct CoreArgs {
    #[command(flatten)]
    schema: SchemaArgs,
    #[command(flatten)]
    run: RunArgs,
    /// Recompute every significance from the object-level oracle
    #[arg(long)]
    verify: bool,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    schema: SchemaArgs,
    /// Comma-separated condition attributes (names or 0-based indices);
    /// an empty string evaluates the empty subset
    #[arg(long)]
    attrs: String,
    /// Significance measure: pr, sce, lce or cce
    #[arg(long, default_value = "pr")]
    metric: String,
    /// Chunks per evaluation fold (default: available cores)
    #[arg(long = "data-chunks")]
    data_chunks: Option<usize>,
    /// Also compute the object-level oracle and fail if they disagree
    #[arg(long)]
    verify: bool,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    objects: usize,
    #[arg(long)]
    attrs: usize,
    /// Distinct values per condition attribute
    #[arg(long, default_value_t = 2)]
    values: u32,
    /// Distinct decision classes
    #[arg(long, default_value_t = 2)]
    classes: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    schema: SchemaArgs,
    /// Significance measure: pr, sce, lce or cce
    #[arg(long, default_value = "pr")]
    metric: String,
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    #[arg(long = "stop-tol", default_value_t = 1e-10)]
    stop_tol: f64,
    /// Comma-separated parallelism levels (default: powers of two up to the
    /// core count)
    #[arg(long)]
    levels: Option<String>,
    /// Comma-separated data-chunk counts
    #[arg(long, default_value = "1")]
    chunks: String,
    /// Time only the first N selection iterations
    #[arg(long = "max-iterations")]
    max_iterations: Option<usize>,
    /// Start selection from the empty set instead of computing the core
    #[arg(long = "skip-core")]
    skip_core: bool,
    /// Repetitions per grid cell; the fastest run is reported
    #[arg(long, default_value_t = 1)]
    repeat: usize,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Reduce(args) => cmd_reduce(args),
        Command::Core(args) => cmd_core(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Bench(args) => cmd_bench(args),
    };
    if let Err(e) = outcome {
        eprintln!("error: {e}");
        let mut source = std::error::Error::source(&e);
        while let Some(cause) = source {
            eprintln!("  caused by: {cause}");
            source = cause.source();
        }
        std::process::exit(1);
    }
}

fn parse_delimiter(s: &str) -> Result<char> {
    match s {
        "comma" => Ok(','),
        "tab" | "\\t" => Ok('\t'),
        "space" => Ok(' '),
        "semicolon" => Ok(';'),
        other => {
            let mut chars = other.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => Ok(c),
                _ => Err(Error::domain(format!("delimiter must be a single character, got {other:?}"))),
            }
        }
    }
}

fn schema_config(args: &SchemaArgs) -> Result<SchemaConfig> {
    let header = match args.header.as_str() {
        "auto" => HeaderMode::Auto,
        "yes" => HeaderMode::Yes,
        "no" => HeaderMode::No,
        other => return Err(Error::domain(format!("--header must be auto|yes|no, got {other:?}"))),
    };
    let missing = match args.missing.as_str() {
        "keep" => MissingPolicy::Keep,
        "drop" => MissingPolicy::Drop,
        other => return Err(Error::domain(format!("--missing must be keep|drop, got {other:?}"))),
    };
    let decision = match &args.decision_col {
        None => ColumnSelector::Last,
        Some(token) => match token.parse::<usize>() {
            Ok(index) => ColumnSelector::Index(index),
            Err(_) => ColumnSelector::Name(token.clone()),
        },
    };
    Ok(SchemaConfig {
        delimiter: parse_delimiter(&args.delimiter)?,
        header,
        decision,
        missing_token: args.missing_token.clone(),
        missing,
    })
}

fn load_table(args: &SchemaArgs) -> Result<(Parsed, String)> {
    let cfg = schema_config(args)?;
    let source = args.input.display().to_string();
    let parsed = if args.input.as_os_str() == "-" {
        let stdin = io::stdin();
        parse_table(stdin.lock(), &cfg)?
    } else {
        parse_table(BufReader::new(File::open(&args.input)?), &cfg)?
    };
    if parsed.dropped_rows > 0 {
        eprintln!("dropped {} row(s) containing the missing token", parsed.dropped_rows);
    }
    Ok((parsed, source))
}

fn reduction_config(run: &RunArgs) -> Result<ReductionConfig> {
    let cores = std::thread::available_parallelism().unwrap_or(NonZeroUsize::MIN);
    let level = match run.model_parallelism {
        None => cores,
        Some(n) => NonZeroUsize::new(n)
            .ok_or_else(|| Error::domain("--model-parallelism must be at least 1"))?,
    };
    let chunks = match run.data_chunks {
        None => cores,
        Some(n) => NonZeroUsize::new(n).ok_or_else(|| Error::domain("--data-chunks must be at least 1"))?,
    };
    Ok(ReductionConfig {
        metric: run.metric.parse()?,
        epsilon: run.epsilon,
        stop_tolerance: run.stop_tol,
        model_parallelism_level: level,
        data_chunks: chunks,
        max_iterations: None,
    })
}

fn write_report<T: Serialize>(output: &Option<PathBuf>, report: &T) -> Result<()> {
    let json = serde_json::to_string_pretty(report)
        .map_err(|e| Error::domain(format!("report serialization failed: {e}")))?;
    match output {
        Some(path) => {
            let mut file = File::create(path)?;
            file.write_all(json.as_bytes())?;
            file.write_all(b"\n")?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(json.as_bytes())?;
            lock.write_all(b"\n")?;
        }
    }
    Ok(())
}

fn cmd_reduce(args: ReduceArgs) -> Result<()> {
    let started = Instant::now();
    let (parsed, source) = load_table(&args.schema)?;
    let table = parsed.table;
    let cfg = reduction_config(&args.run)?;
    let g = build_granularity(&table);
    let result = engine::reduce(&g, &cfg)?;

    let verify = if args.verify {
        let baseline = engine::reduce_baseline(&table, &cfg)?;
        if baseline.reduct != result.reduct {
            return Err(Error::domain(format!(
                "verification failed: object-level baseline selected {:?}, granularity path selected {:?}",
                baseline.reduct, result.reduct
            )));
        }
        let diff = (baseline.theta_full - result.theta_full).abs();
        if diff > VERIFY_TOLERANCE {
            return Err(Error::domain(format!(
                "verification failed: full-set evaluations differ by {diff:e}"
            )));
        }
        Some(VerifySummary {
            checks: 1 + result.reduct.len(),
            max_abs_diff: diff,
            tolerance: VERIFY_TOLERANCE,
        })
    } else {
        None
    };

    let report = RunReport {
        dataset: DatasetSummary::new(&source, &table, &g, parsed.dropped_rows),
        config: ConfigEcho::from(&cfg),
        result: ReductionSummary::new(&table, &result),
        verify,
        total_wall_ms: started.elapsed().as_millis() as u64,
    };
    write_report(&args.run.output, &report)
}

fn cmd_core(args: CoreArgs) -> Result<()> {
    let started = Instant::now();
    let (parsed, source) = load_table(&args.schema)?;
    let table = parsed.table;
    let cfg = reduction_config(&args.run)?;
    let g = build_granularity(&table);
    let (core, significance) = engine::compute_core(&g, &cfg)?;

    let verify = if args.verify {
        let full = AttributeSubset::full(table.n_condition_attrs());
        let direct_full = measures::direct_evaluate(&table, &full, cfg.metric)?;
        let mut max_abs_diff = (direct_full - significance.baseline_theta).abs();
        for record in &significance.records {
            let probed =
                measures::direct_evaluate(&table, &full.without(record.attribute), cfg.metric)?;
            max_abs_diff = max_abs_diff.max((probed - record.theta_probed).abs());
        }
        if max_abs_diff > VERIFY_TOLERANCE {
            return Err(Error::domain(format!(
                "verification failed: object-level oracle differs by {max_abs_diff:e}"
            )));
        }
        Some(VerifySummary {
            checks: significance.records.len() + 1,
            max_abs_diff,
            tolerance: VERIFY_TOLERANCE,
        })
    } else {
        None
    };

    let report = CoreReport {
        dataset: DatasetSummary::new(&source, &table, &g, parsed.dropped_rows),
        config: ConfigEcho::from(&cfg),
        theta_full: significance.baseline_theta,
        core: attribute_refs(&table, core.iter()),
        significances: significance_entries(&table, &significance),
        verify,
        total_wall_ms: started.elapsed().as_millis() as u64,
    };
    write_report(&args.run.output, &report)
}

fn resolve_subset(table: &DecisionTable, spec: &str) -> Result<AttributeSubset> {
    let mut indices = Vec::new();
    for token in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match table.resolve_condition_attr(token) {
            Some(index) => indices.push(index),
            None => return Err(Error::domain(format!("unknown condition attribute {token:?}"))),
        }
    }
    Ok(AttributeSubset::new(indices))
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<()> {
    let (parsed, source) = load_table(&args.schema)?;
    let table = parsed.table;
    let metric: Metric = args.metric.parse()?;
    let cores = std::thread::available_parallelism().unwrap_or(NonZeroUsize::MIN);
    let chunks = match args.data_chunks {
        None => cores,
        Some(n) => NonZeroUsize::new(n).ok_or_else(|| Error::domain("--data-chunks must be at least 1"))?,
    };
    let subset = resolve_subset(&table, &args.attrs)?;
    let g = build_granularity(&table);
    let theta = engine::evaluate(&g, &subset, metric, chunks)?;

    let verify = if args.verify {
        let direct = measures::direct_evaluate(&table, &subset, metric)?;
        let abs_diff = (theta - direct).abs();
        if abs_diff > VERIFY_TOLERANCE {
            return Err(Error::domain(format!(
                "verification failed: decomposed {theta} vs object-level {direct} (|diff| = {abs_diff:e})"
            )));
        }
        Some(EvaluateVerify {
            direct_theta: direct,
            abs_diff,
            tolerance: VERIFY_TOLERANCE,
        })
    } else {
        None
    };

    let report = EvaluateReport {
        dataset: DatasetSummary::new(&source, &table, &g, parsed.dropped_rows),
        metric,
        subset: attribute_refs(&table, subset.iter()),
        theta,
        verify,
    };
    write_report(&args.output, &report)
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let spec = SyntheticSpec {
        n_objects: args.objects,
        n_attrs: args.attrs,
        values_per_attr: args.values,
        decision_classes: args.classes,
        seed: args.seed,
    };
    match &args.output {
        Some(path) => {
            let mut file = io::BufWriter::new(File::create(path)?);
            spec.write_csv(&mut file)?;
            file.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = io::BufWriter::new(stdout.lock());
            spec.write_csv(&mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn parse_count_list(spec: &str, what: &str) -> Result<Vec<NonZeroUsize>> {
    let mut out = Vec::new();
    for token in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let n: usize = token
            .parse()
            .map_err(|_| Error::domain(format!("{what} list entry {token:?} is not a number")))?;
        out.push(NonZeroUsize::new(n).ok_or_else(|| Error::domain(format!("{what} must be at least 1")))?);
    }
    if out.is_empty() {
        return Err(Error::domain(format!("{what} list is empty")));
    }
    Ok(out)
}

fn default_levels() -> Vec<NonZeroUsize> {
    let cores = std::thread::available_parallelism().unwrap_or(NonZeroUsize::MIN).get();
    let mut levels = Vec::new();
    let mut level = 1;
    while level < cores {
        levels.push(NonZeroUsize::new(level).expect("nonzero"));
        level *= 2;
    }
    levels.push(NonZeroUsize::new(cores).expect("nonzero"));
    levels
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let (parsed, source) = load_table(&args.schema)?;
    let table = parsed.table;
    let metric: Metric = args.metric.parse()?;
    let levels = match &args.levels {
        Some(spec) => parse_count_list(spec, "--levels")?,
        None => default_levels(),
    };
    let chunk_counts = parse_count_list(&args.chunks, "--chunks")?;
    if args.repeat == 0 {
        return Err(Error::domain("--repeat must be at least 1"));
    }

    let g = build_granularity(&table);
    let run_once = |level: NonZeroUsize, chunks: NonZeroUsize| -> Result<(engine::ReductResult, u64)> {
        let cfg = ReductionConfig {
            metric,
            epsilon: args.epsilon,
            stop_tolerance: args.stop_tol,
            model_parallelism_level: level,
            data_chunks: chunks,
            max_iterations: args.max_iterations,
        };
        let started = Instant::now();
        let result = if args.skip_core {
            engine::reduce_from(&g, AttributeSubset::empty(), &cfg)?
        } else {
            engine::reduce(&g, &cfg)?
        };
        Ok((result, started.elapsed().as_millis() as u64))
    };

    let mut rows: Vec<BenchRow> = Vec::new();
    let mut reference_reduct: Option<Vec<usize>> = None;
    for &chunks in &chunk_counts {
        let mut baseline_total: Option<(usize, u64)> = None;
        for &level in &levels {
            let mut best: Option<(engine::ReductResult, u64)> = None;
            for _ in 0..args.repeat {
                let (result, total_ms) = run_once(level, chunks)?;
                if best.as_ref().is_none_or(|(_, t)| total_ms < *t) {
                    best = Some((result, total_ms));
                }
            }
            let (result, total_ms) = best.expect("at least one repetition ran");

            match &reference_reduct {
                None => reference_reduct = Some(result.reduct.clone()),
                Some(reference) => {
                    if reference != &result.reduct {
                        return Err(Error::domain(format!(
                            "determinism violation: level {level} chunks {chunks} selected {:?}, expected {reference:?}",
                            result.reduct
                        )));
                    }
                }
            }

            let baseline = match &baseline_total {
                None => {
                    baseline_total = Some((level.get(), total_ms));
                    total_ms
                }
                Some((_, t)) => *t,
            };
            rows.push(BenchRow {
                model_parallelism: level.get(),
                data_chunks: chunks.get(),
                iteration_ms: result.iterations.iter().map(|it| it.wall.as_millis() as u64).collect(),
                total_ms,
                speedup_vs_level1: baseline.max(1) as f64 / total_ms.max(1) as f64,
                reduct: attribute_refs(&table, result.reduct.iter().copied()),
            });
        }
    }

    let report = BenchReport {
        dataset: DatasetSummary::new(&source, &table, &g, parsed.dropped_rows),
        metric,
        epsilon: args.epsilon,
        stop_tolerance: args.stop_tol,
        skip_core: args.skip_core,
        max_iterations: args.max_iterations,
        repeats: args.repeat,
        rows,
    };
    write_report(&args.output, &report)
}
