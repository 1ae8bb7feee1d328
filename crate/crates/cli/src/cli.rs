use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use parroteval_core::experiments::{self, Metric, RetrievalDirection, RetrievalRequest, DEFAULT_MAX_REFS};
use parroteval_core::metrics::MetricReport;
use parroteval_core::{Corpus, ParrotConfig, ParrotMode, Position, Source};
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::exec::Parallel;
use crate::formats::{self, Loaded, DEFAULT_TWITTER_THRESHOLD};
use crate::report::{num, OutputDir};

const ABOUT: &str = "Score parroting baselines on paraphrase corpora with multi-reference BLEU, METEOR and TER";

const LONG_ABOUT: &str = "\
Score parroting baselines on paraphrase corpora with multi-reference BLEU, METEOR and TER.

Typical flow:
  parroteval ingest --source quora --in quora_duplicate_questions.tsv --out quora.jsonl
  parroteval eval --corpus quora.jsonl --mode full --out-dir results/

All randomness derives from --seed (default 0). Results do not depend on --workers.
Every command writes <name>.csv and <name>.json into --out-dir; JSON documents carry
a \"schema_version\" field.";

#[derive(Debug, Parser)]
#[command(name = "parroteval", version, about = ABOUT, long_about = LONG_ABOUT)]
pub struct Cli {
    /// Worker threads for per-entry evaluation
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,

    /// Seed for every random draw (positions, samples, distractors)
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Convert a raw dataset into the normalized JSON-lines corpus
    #[command(after_help = "Prints the reference-count histogram of the resulting corpus.")]
    Ingest(IngestArgs),
    /// Reference-count histogram of a corpus
    #[command(after_help = "stats.csv columns: ref_count,entries,percent")]
    Stats(CorpusArgs),
    /// Aggregate BLEU / METEOR / TER of one parroting configuration
    #[command(after_help = "eval.csv columns: metric,value (rows: bleu, meteor, ter, entries)")]
    Eval(EvalArgs),
    /// Full parroting on repeated random test sets
    #[command(after_help = "sample_eval.csv columns: metric,average,stddev,max,min,runs\n\
                            sample_eval_runs.csv columns: run,seed,bleu,meteor,ter")]
    SampleEval(SampleArgs),
    /// Full-parrot scores per number of references
    #[command(after_help = "refcurve.csv columns: ref_count,pooled_tail,entries,bleu,meteor,ter")]
    Refcurve(RefcurveArgs),
    /// Partial-parrot scores over a grid of modification ratios
    #[command(after_help = "sweep_<mode>_<position>.csv columns: \
                            nominal_ratio,realized_ratio,entries,bleu,meteor,ter")]
    Sweep(SweepArgs),
    /// Sentence-BLEU buckets for references and random non-reference sentences
    #[command(after_help = "retrieval.csv columns: bucket_lower,bucket_upper,score,is_reference,text")]
    Retrieval(RetrievalArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum SourceArg {
    Quora,
    Twitter,
    Mscoco,
    Generic,
}

impl From<SourceArg> for Source {
    fn from(s: SourceArg) -> Source {
        match s {
            SourceArg::Quora => Source::Quora,
            SourceArg::Twitter => Source::Twitter,
            SourceArg::Mscoco => Source::Mscoco,
            SourceArg::Generic => Source::Generic,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Full,
    Cut,
    Replace,
}

impl From<ModeArg> for ParrotMode {
    fn from(m: ModeArg) -> ParrotMode {
        match m {
            ModeArg::Full => ParrotMode::Full,
            ModeArg::Cut => ParrotMode::Cut,
            ModeArg::Replace => ParrotMode::Replace,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PartialModeArg {
    Cut,
    Replace,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PositionArg {
    Head,
    Tail,
    Random,
}

impl From<PositionArg> for Position {
    fn from(p: PositionArg) -> Position {
        match p {
            PositionArg::Head => Position::Head,
            PositionArg::Tail => Position::Tail,
            PositionArg::Random => Position::Random,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DirectionArg {
    /// Pool sentence as hypothesis, input as the single reference
    InputAsReference,
    /// Input as hypothesis, pool sentence as the single reference
    InputAsHypothesis,
}

#[derive(Debug, Args)]
struct IngestArgs {
    /// Dataset layout of --in
    #[arg(long, value_enum)]
    source: SourceArg,
    /// Raw dataset file
    #[arg(long = "in", value_name = "PATH")]
    input: PathBuf,
    /// Normalized corpus to write (JSON lines)
    #[arg(long = "out", value_name = "PATH")]
    output: PathBuf,
    /// Twitter: minimum annotator votes, or score, counted as a paraphrase
    #[arg(long, default_value_t = DEFAULT_TWITTER_THRESHOLD)]
    twitter_threshold: u32,
}

#[derive(Debug, Args)]
struct CorpusArgs {
    /// Normalized corpus (JSON lines)
    #[arg(long, value_name = "PATH")]
    corpus: PathBuf,
    /// Drop entries with fewer references than this
    #[arg(long, default_value_t = 1)]
    min_refs: usize,
    /// Directory for CSV and JSON results
    #[arg(long, value_name = "DIR", default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long, value_enum, default_value = "full")]
    mode: ModeArg,
    /// Which words cut/replace modes modify
    #[arg(long, value_enum, default_value = "head")]
    position: PositionArg,
    /// Fraction of each input's words to modify (cut/replace)
    #[arg(long, default_value_t = 0.0)]
    ratio: f64,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Entries per sampled test set
    #[arg(long)]
    size: usize,
    /// Number of test sets; run r uses seed + r
    #[arg(long)]
    runs: usize,
}

#[derive(Debug, Args)]
struct RefcurveArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Entries with this many references or more share one bucket
    #[arg(long, default_value_t = DEFAULT_MAX_REFS)]
    max_refs: usize,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long, value_enum)]
    mode: PartialModeArg,
    #[arg(long, value_enum, default_value = "head")]
    position: PositionArg,
    /// Grid spacing from 0 to 1
    #[arg(long, default_value_t = 0.02)]
    step: f64,
    /// Explicit comma-separated ratios (overrides --step)
    #[arg(long, value_delimiter = ',')]
    ratios: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
struct RetrievalArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Id of the entry whose input is scored against
    #[arg(long)]
    entry: String,
    #[arg(long, default_value_t = 5)]
    num_references: usize,
    #[arg(long, default_value_t = 100)]
    num_distractors: usize,
    /// Comma-separated LOWER:UPPER intervals; default 0:0.15 then 0.05 steps to 1
    #[arg(long, value_delimiter = ',', value_parser = parse_bucket)]
    buckets: Option<Vec<(f64, f64)>>,
    #[arg(long, value_enum, default_value = "input-as-reference")]
    direction: DirectionArg,
}

fn parse_bucket(s: &str) -> std::result::Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected LOWER:UPPER, got {s:?}"))?;
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
    Ok((parse(lo)?, parse(hi)?))
}

/// Configuration echoed into every JSON document.
#[derive(Debug, Serialize)]
struct RunConfig<'a> {
    command: &'a str,
    dataset_path: String,
    source: Source,
    parrot: Option<ParrotConfig>,
    seed: u64,
    filters: Filters,
}

#[derive(Debug, Serialize)]
struct Filters {
    min_refs: usize,
}

struct Session {
    exec: Parallel,
    seed: u64,
}

pub fn dispatch(cli: Cli) -> Result<()> {
    let exec = Parallel::new(cli.workers).map_err(|e| CliError::Usage(e.to_string()))?;
    let session = Session { exec, seed: cli.seed };
    match cli.command {
        Command::Ingest(args) => ingest(&args),
        Command::Stats(args) => stats(&session, &args),
        Command::Eval(args) => eval(&session, &args),
        Command::SampleEval(args) => sample_eval(&session, &args),
        Command::Refcurve(args) => refcurve(&session, &args),
        Command::Sweep(args) => sweep(&session, &args),
        Command::Retrieval(args) => retrieval(&session, &args),
    }
}

fn warn_skipped(skipped: usize, path: &Path) {
    if skipped > 0 {
        eprintln!("warning: skipped {skipped} unreadable record(s) in {}", path.display());
    }
}

fn print_histogram(corpus: &Corpus) {
    let stats = corpus.stats();
    println!("entries: {}", stats.total_entries);
    println!("{:>10} {:>10} {:>8}", "refs", "entries", "percent");
    for (refs, n, pct) in stats.percentages() {
        println!("{refs:>10} {n:>10} {pct:>7.2}%");
    }
    let single = stats.single_reference_share();
    if single > 0.0 {
        eprintln!(
            "warning: {:.2}% of entries have a single reference; use --min-refs 2 to score only multi-reference entries",
            100.0 * single
        );
    }
}

fn ingest(args: &IngestArgs) -> Result<()> {
    let loaded = match args.source {
        SourceArg::Quora => formats::read_quora(&args.input)?,
        SourceArg::Twitter => formats::read_twitter(&args.input, args.twitter_threshold)?,
        SourceArg::Mscoco => formats::read_mscoco(&args.input)?,
        SourceArg::Generic => formats::read_generic_pairs(&args.input)?,
    };
    warn_skipped(loaded.skipped, &args.input);
    if let Some(parent) = args.output.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|source| CliError::Write { path: parent.into(), source })?;
    }
    formats::write_corpus(&loaded.corpus, &args.output)?;
    println!("wrote {} ({} corpus)", args.output.display(), Source::from(args.source));
    print_histogram(&loaded.corpus);
    Ok(())
}

fn load(args: &CorpusArgs) -> Result<Corpus> {
    if args.min_refs == 0 {
        return Err(CliError::Usage("--min-refs must be at least 1".into()));
    }
    let Loaded { corpus, skipped } = formats::read_corpus(&args.corpus)?;
    warn_skipped(skipped, &args.corpus);
    Ok(corpus.filter_min_refs(args.min_refs)?)
}

fn run_config<'a>(
    command: &'a str,
    args: &CorpusArgs,
    corpus: &Corpus,
    parrot: Option<ParrotConfig>,
    seed: u64,
) -> RunConfig<'a> {
    RunConfig {
        command,
        dataset_path: args.corpus.display().to_string(),
        source: corpus.source(),
        parrot,
        seed,
        filters: Filters { min_refs: args.min_refs },
    }
}

fn report_row(report: &MetricReport) -> [String; 4] {
    [report.entry_count.to_string(), num(report.bleu.value), num(report.meteor.value), num(report.ter.value)]
}

fn print_report(report: &MetricReport) {
    println!("entries: {}", report.entry_count);
    println!("BLEU   {:>8.2}", report.bleu.value);
    println!("METEOR {:>8.2}", report.meteor.value);
    println!("TER    {:>8.2}", report.ter.value);
}

fn stats(_session: &Session, args: &CorpusArgs) -> Result<()> {
    let corpus = load(args)?;
    let out = OutputDir::create(&args.out_dir)?;
    let rows: Vec<Vec<String>> = corpus
        .stats()
        .percentages()
        .into_iter()
        .map(|(refs, n, pct)| vec![refs.to_string(), n.to_string(), num(pct)])
        .collect();
    out.write_csv("stats.csv", &["ref_count", "entries", "percent"], &rows)?;
    let config = run_config("stats", args, &corpus, None, 0);
    out.write_json("stats.json", "stats", &config, corpus.stats())?;
    print_histogram(&corpus);
    Ok(())
}

fn eval(session: &Session, args: &EvalArgs) -> Result<()> {
    let corpus = load(&args.corpus)?;
    let parrot = ParrotConfig::new(args.mode.into(), args.position.into(), args.ratio, session.seed)?;
    let report = experiments::full_eval(&session.exec, &corpus, &parrot)?;
    let out = OutputDir::create(&args.corpus.out_dir)?;
    let rows = vec![
        vec!["bleu".into(), num(report.bleu.value)],
        vec!["meteor".into(), num(report.meteor.value)],
        vec!["ter".into(), num(report.ter.value)],
        vec!["entries".into(), report.entry_count.to_string()],
    ];
    out.write_csv("eval.csv", &["metric", "value"], &rows)?;
    let config = run_config("eval", &args.corpus, &corpus, Some(parrot), session.seed);
    out.write_json("eval.json", "eval", &config, &report)?;
    print_report(&report);
    Ok(())
}

fn sample_eval(session: &Session, args: &SampleArgs) -> Result<()> {
    let corpus = load(&args.corpus)?;
    let sampled = experiments::sampled_eval(&session.exec, &corpus, args.size, args.runs, session.seed)?;
    let out = OutputDir::create(&args.corpus.out_dir)?;
    let rows: Vec<Vec<String>> = sampled
        .stats
        .iter()
        .map(|s| {
            vec![
                s.metric.to_string(),
                num(s.average),
                s.stddev.map(num).unwrap_or_default(),
                num(s.max),
                num(s.min),
                s.runs.to_string(),
            ]
        })
        .collect();
    out.write_csv("sample_eval.csv", &["metric", "average", "stddev", "max", "min", "runs"], &rows)?;
    let run_rows: Vec<Vec<String>> = sampled
        .per_run
        .iter()
        .enumerate()
        .map(|(run, r)| {
            let mut row = vec![run.to_string(), session.seed.wrapping_add(run as u64).to_string()];
            row.extend(Metric::ALL.iter().map(|m| num(m.of(r))));
            row
        })
        .collect();
    out.write_csv("sample_eval_runs.csv", &["run", "seed", "bleu", "meteor", "ter"], &run_rows)?;
    let config = run_config("sample-eval", &args.corpus, &corpus, Some(ParrotConfig::full()), session.seed);
    out.write_json("sample_eval.json", "sample-eval", &config, &sampled)?;
    println!("{} runs of {} entries (seeds {}..)", sampled.runs, sampled.size, session.seed);
    for s in &sampled.stats {
        let sd = s.stddev.map(|v| format!("{v:.2}")).unwrap_or_else(|| "-".into());
        println!(
            "{:<7} avg {:>7.2}  sd {:>5}  max {:>7.2}  min {:>7.2}",
            s.metric.to_string(),
            s.average,
            sd,
            s.max,
            s.min
        );
    }
    Ok(())
}

fn refcurve(session: &Session, args: &RefcurveArgs) -> Result<()> {
    let corpus = load(&args.corpus)?;
    let points = experiments::refcount_curve(&session.exec, &corpus, args.max_refs)?;
    let out = OutputDir::create(&args.corpus.out_dir)?;
    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|p| {
            let mut row = vec![p.ref_count.to_string(), p.pooled_tail.to_string()];
            row.extend(report_row(&p.report));
            row
        })
        .collect();
    out.write_csv("refcurve.csv", &["ref_count", "pooled_tail", "entries", "bleu", "meteor", "ter"], &rows)?;
    let config = run_config("refcurve", &args.corpus, &corpus, Some(ParrotConfig::full()), 0);
    out.write_json("refcurve.json", "refcurve", &config, &points)?;
    println!("{:>6} {:>8} {:>8} {:>8} {:>8}", "refs", "entries", "bleu", "meteor", "ter");
    for p in &points {
        let label = if p.pooled_tail { format!("{}+", p.ref_count) } else { p.ref_count.to_string() };
        let r = &p.report;
        println!("{label:>6} {:>8} {:>8.2} {:>8.2} {:>8.2}", r.entry_count, r.bleu.value, r.meteor.value, r.ter.value);
    }
    Ok(())
}

fn sweep(session: &Session, args: &SweepArgs) -> Result<()> {
    let corpus = load(&args.corpus)?;
    let mode = match args.mode {
        PartialModeArg::Cut => ParrotMode::Cut,
        PartialModeArg::Replace => ParrotMode::Replace,
    };
    let position: Position = args.position.into();
    let ratios = match &args.ratios {
        Some(r) => r.clone(),
        None => {
            if !(args.step > 0.0 && args.step <= 1.0) {
                return Err(CliError::Usage(format!("--step must be in (0, 1], got {}", args.step)));
            }
            experiments::ratio_grid(args.step)
        }
    };
    let points = experiments::modification_sweep(&session.exec, &corpus, mode, position, &ratios, session.seed)?;
    let out = OutputDir::create(&args.corpus.out_dir)?;
    let name = format!("sweep_{mode}_{position}");
    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|p| {
            let mut row = vec![num(p.nominal_ratio), num(p.realized_ratio)];
            row.extend(report_row(&p.report));
            row
        })
        .collect();
    out.write_csv(
        &format!("{name}.csv"),
        &["nominal_ratio", "realized_ratio", "entries", "bleu", "meteor", "ter"],
        &rows,
    )?;
    let parrot = ParrotConfig::new(mode, position, 0.0, session.seed)?;
    let config = run_config("sweep", &args.corpus, &corpus, Some(parrot), session.seed);
    out.write_json(&format!("{name}.json"), "sweep", &config, &points)?;
    println!("{} points, {mode}/{position}", points.len());
    println!("{:>8} {:>8} {:>8} {:>8} {:>8}", "nominal", "realized", "bleu", "meteor", "ter");
    for p in &points {
        let r = &p.report;
        println!(
            "{:>8.3} {:>8.3} {:>8.2} {:>8.2} {:>8.2}",
            p.nominal_ratio, p.realized_ratio, r.bleu.value, r.meteor.value, r.ter.value
        );
    }
    Ok(())
}

fn retrieval(session: &Session, args: &RetrievalArgs) -> Result<()> {
    let corpus = load(&args.corpus)?;
    let buckets = args.buckets.clone().unwrap_or_else(experiments::default_buckets);
    let request = RetrievalRequest {
        entry_id: &args.entry,
        num_references: args.num_references,
        num_distractors: args.num_distractors,
        seed: session.seed,
        buckets: &buckets,
        direction: match args.direction {
            DirectionArg::InputAsReference => RetrievalDirection::InputAsReference,
            DirectionArg::InputAsHypothesis => RetrievalDirection::InputAsHypothesis,
        },
    };
    let result = experiments::bleu_retrieval(&corpus, &request)?;
    let out = OutputDir::create(&args.corpus.out_dir)?;
    let mut rows = Vec::new();
    for bucket in result.iter().rev() {
        for s in &bucket.sentences {
            rows.push(vec![
                num(bucket.lower),
                num(bucket.upper),
                num(s.score),
                s.is_reference.to_string(),
                s.text.clone(),
            ]);
        }
    }
    out.write_csv("retrieval.csv", &["bucket_lower", "bucket_upper", "score", "is_reference", "text"], &rows)?;

    #[derive(Serialize)]
    struct Results<'a> {
        input: String,
        request: &'a RetrievalRequest<'a>,
        buckets: &'a [experiments::RetrievalBucket],
    }
    let entry = corpus.get(&args.entry).expect("retrieval succeeded for this id");
    let config = run_config("retrieval", &args.corpus, &corpus, None, session.seed);
    let results = Results { input: entry.input.join(), request: &request, buckets: &result };
    out.write_json("retrieval.json", "retrieval", &config, &results)?;

    println!("input: {}", entry.input.join());
    for bucket in result.iter().rev() {
        println!("{:.2} - {:.2}", bucket.lower, bucket.upper);
        if bucket.sentences.is_empty() {
            println!("    (none)");
        }
        for s in &bucket.sentences {
            let marker = if s.is_reference { "*" } else { " " };
            println!("  {marker} {:.3}  {}", s.score, s.text);
        }
    }
    Ok(())
}
