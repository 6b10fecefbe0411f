//! Command-line entry point.
//!
//! Subcommands mirror the pipeline: `ingest` (verify sources, build derived
//! resources), `gen-data` (build task datasets), `verify-icl`, `induce`,
//! `exec-acc` (the three experiments), `ref-score`, `tally`, and `report`.
//! Exit codes: 0 success, 1 run failure, 2 usage error. Hard errors print
//! one machine-parseable line: `error[<category>]: <message>`.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use induct::corpus::{
    build_cen, build_rhyme_groups, pluralize, CefrLevel, FrequencyTable, Lexicon, NounRecord,
    PronDict, SourceManifest,
};
use induct::error::{Error, Result};
use induct::evalrunner::{
    load_instructions, run_execution_accuracy, run_icl_verification, run_induction,
    score_against_references, tally_instructions, ExternalProcessScorer, RunConfig, RunWriter,
    SimilarityScorer, UnigramF1Scorer,
};
use induct::model::{Backend, Cache, HttpBackend, ModelClient, OracleBackend, StaticBackend};
use induct::prompting::PromptTemplate;
use induct::report::{build_report, render, render_chart_data, ReportFormat};
use induct::taskgen::{
    export_dataset, generate_task, import_dataset, sample_induction_examples, TaskDataset, TaskId,
};

#[derive(Parser)]
#[command(
    name = "induct",
    version,
    about = "Instruction-induction benchmark harness"
)]
struct Cli {
    /// JSON config file supplying flag defaults (flags win over the file).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify manifest digests and build the derived lexical resources.
    Ingest(IngestArgs),
    /// Generate task datasets as JSONL files.
    GenData(GenDataArgs),
    /// In-context learning verification over a generated dataset.
    VerifyIcl(VerifyIclArgs),
    /// Induce instructions from sampled demonstration sets.
    Induce(InduceArgs),
    /// Execution accuracy of instructions over the execute split.
    ExecAcc(ExecAccArgs),
    /// Score candidate instructions against gold references.
    RefScore(RefScoreArgs),
    /// Score prediction/gold pairs from a JSONL file with one task metric.
    Score(ScoreArgs),
    /// Frequency table of normalized instructions.
    Tally(TallyArgs),
    /// Render a per-task report over run directories.
    Report(ReportArgs),
}

/// Flags shared by every experiment command.
#[derive(Args, Clone)]
struct BackendArgs {
    /// Completion backend: oracle, static, or http.
    #[arg(long)]
    backend: Option<String>,
    /// Model identifier recorded in requests and cache keys.
    #[arg(long)]
    model: Option<String>,
    /// Completion endpoint URL (http backend).
    #[arg(long)]
    url: Option<String>,
    /// Fixed completion text (static backend).
    #[arg(long)]
    static_text: Option<String>,
    /// Max simultaneous backend calls.
    #[arg(long)]
    max_in_flight: Option<usize>,
    /// Cache file path (default: <out>/cache.jsonl).
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Disable the completion cache.
    #[arg(long)]
    no_cache: bool,
}

#[derive(Args)]
struct IngestArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Directory for derived-resource exports (omit to only verify).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Frequency cut for the common-noun list.
    #[arg(long, default_value_t = 10_000)]
    top_k: usize,
    /// Minimum common-noun length.
    #[arg(long, default_value_t = 3)]
    min_len: usize,
}

#[derive(Args)]
struct GenDataArgs {
    #[arg(long)]
    task: Option<String>,
    #[arg(long)]
    all_tasks: bool,
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyIclArgs {
    #[arg(long)]
    task: String,
    /// Dataset JSONL produced by gen-data.
    #[arg(long)]
    data: PathBuf,
    /// In-context trials (default 100, capped at the execute-set size).
    #[arg(long)]
    n_icl: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    backend: BackendArgs,
}

#[derive(Args)]
struct InduceArgs {
    #[arg(long)]
    task: String,
    #[arg(long)]
    data: PathBuf,
    /// Induction prompt template JSON (default: bundled template).
    #[arg(long)]
    template: Option<PathBuf>,
    /// Number of induction examples.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    backend: BackendArgs,
}

#[derive(Args)]
struct ExecAccArgs {
    #[arg(long)]
    task: String,
    #[arg(long)]
    data: PathBuf,
    /// Instruction file: plain text (one per line, '#' comments) or an
    /// instructions.jsonl from an induce run.
    #[arg(long)]
    instructions: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    backend: BackendArgs,
}

#[derive(Args)]
struct RefScoreArgs {
    /// Candidate instructions (plain text or instructions.jsonl).
    #[arg(long)]
    candidates: PathBuf,
    /// Reference instructions: one per line, '#' comments.
    #[arg(long)]
    references: PathBuf,
    /// External scorer command (JSONL pairs on stdin, scores on stdout);
    /// default is the built-in unigram-F1 scorer.
    #[arg(long)]
    scorer_cmd: Option<String>,
    /// Write per-candidate scores as JSONL here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record the mean as ref_score in this run directory's summary.
    #[arg(long)]
    run: Option<PathBuf>,
    /// Task row to update in the run summary.
    #[arg(long)]
    task: Option<String>,
}

#[derive(Args)]
struct ScoreArgs {
    /// JSONL input: one {"prediction": ..., "gold": [...]} per line.
    #[arg(long)]
    input: PathBuf,
    /// Metric kind, or a task name to use its metric.
    #[arg(long)]
    metric: String,
    /// Write per-item scores as JSONL here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TallyArgs {
    /// Instruction file (plain text or instructions.jsonl).
    #[arg(long)]
    input: PathBuf,
    /// Show only the most common N entries.
    #[arg(long)]
    top: Option<usize>,
}

#[derive(Args)]
struct ReportArgs {
    /// Run directories to merge.
    #[arg(long, num_args = 1.., required = true)]
    runs: Vec<PathBuf>,
    #[arg(long, default_value = "md")]
    format: String,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write per-task bar-chart values (TSV) here.
    #[arg(long)]
    chart_data: Option<PathBuf>,
}

/// Optional JSON config file; any present field becomes the default for
/// the matching flag.
#[derive(Default, serde::Deserialize)]
struct FileConfig {
    backend: Option<String>,
    model: Option<String>,
    url: Option<String>,
    seed: Option<u64>,
    max_in_flight: Option<usize>,
    template: Option<PathBuf>,
    manifest: Option<PathBuf>,
    n_icl: Option<usize>,
    n_induction: Option<usize>,
}

impl FileConfig {
    fn load(path: Option<&Path>) -> Result<FileConfig> {
        match path {
            None => Ok(FileConfig::default()),
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                serde_json::from_str(&text).map_err(|e| Error::parse(path, 1, e.to_string()))
            }
        }
    }
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(match run(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error[{}]: {err}", err.category());
            match err {
                Error::InvalidArgument(_) => 2,
                _ => 1,
            }
        }
    });
}

fn run(cli: Cli) -> Result<()> {
    let file_config = FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Ingest(args) => ingest(args),
        Command::GenData(args) => gen_data(args, &file_config),
        Command::VerifyIcl(args) => verify_icl(args, &file_config),
        Command::Induce(args) => induce(args, &file_config),
        Command::ExecAcc(args) => exec_acc(args, &file_config),
        Command::RefScore(args) => ref_score(args),
        Command::Score(args) => score_items(args),
        Command::Tally(args) => tally(args),
        Command::Report(args) => report(args),
    }
}

fn parse_task(name: &str) -> Result<TaskId> {
    name.parse()
}

fn ingest(args: IngestArgs) -> Result<()> {
    let manifest = SourceManifest::load(&args.manifest)?;
    manifest.verify_all()?;
    println!("verified {} sources", manifest.entries.len());

    let Some(out) = args.out else { return Ok(()) };
    std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;

    // Common nouns.
    let (freq_path, freq_text) = manifest.read("freq_table")?;
    let freq = FrequencyTable::parse(&freq_text, &freq_path)?;
    let (nouns_path, nouns_text) = manifest.read("nouns")?;
    let nouns = NounRecord::parse_tsv(&nouns_text, &nouns_path)?;
    let cen = build_cen(&freq, &nouns, args.top_k, args.min_len)?;
    let cen_lines: Vec<String> = cen
        .iter()
        .map(|w| serde_json::json!({"word": w}).to_string())
        .collect();
    write_lines(&out.join("cen.jsonl"), &cen_lines)?;
    println!("cen: {} nouns", cen.len());

    // Singular/plural pairs over the common nouns.
    let (_, mass_text) = manifest.read("mass_nouns")?;
    let mass: std::collections::HashSet<String> = induct::corpus::parse_word_list(&mass_text)
        .into_iter()
        .collect();
    let pairs: Vec<String> = cen
        .iter()
        .filter(|w| !mass.contains(*w))
        .map(|w| (w, pluralize(w)))
        .filter(|(_, plural)| freq.count(plural) >= induct::taskgen::PLURAL_MIN_FREQ)
        .map(|(w, plural)| serde_json::json!({"singular": w, "plural": plural}).to_string())
        .collect();
    write_lines(&out.join("plural_pairs.jsonl"), &pairs)?;
    println!("plural pairs: {}", pairs.len());

    // Rhyme groups over the CEFR lexicon.
    let (lex_path, lex_text) = manifest.read("cefr_lexicon")?;
    let lexicon = Lexicon::parse(&lex_text, &lex_path)?;
    let eligible = Lexicon {
        items: lexicon
            .items
            .into_iter()
            .filter(|e| matches!(e.cefr, CefrLevel::A1 | CefrLevel::A2 | CefrLevel::B1))
            .collect(),
    };
    let (dict_path, dict_text) = manifest.read("pron_dict")?;
    let dict = PronDict::parse(&dict_text, &dict_path)?;
    let (groups, diagnostics) = build_rhyme_groups(&dict, &eligible);
    let group_lines: Vec<String> = groups
        .groups
        .iter()
        .enumerate()
        .map(|(i, g)| serde_json::json!({"group": i, "words": g}).to_string())
        .collect();
    write_lines(&out.join("rhyme_groups.jsonl"), &group_lines)?;
    println!(
        "rhyme groups: {} ({} lexicon words missing from the dictionary)",
        groups.groups.len(),
        diagnostics.missing.len()
    );
    Ok(())
}

fn write_lines(path: &Path, lines: &[String]) -> Result<()> {
    let mut text = lines.join("\n");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn gen_data(args: GenDataArgs, file_config: &FileConfig) -> Result<()> {
    let tasks: Vec<TaskId> = if args.all_tasks {
        TaskId::ALL.to_vec()
    } else {
        match &args.task {
            Some(name) => vec![parse_task(name)?],
            None => {
                return Err(Error::InvalidArgument(
                    "pass --task <name> or --all-tasks".into(),
                ))
            }
        }
    };
    let seed = args.seed.or(file_config.seed).unwrap_or(0);
    let manifest_path = args
        .manifest
        .clone()
        .or_else(|| file_config.manifest.clone());
    let manifest = match &manifest_path {
        Some(path) => Some(SourceManifest::load(path)?),
        None => None,
    };
    std::fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;

    let empty = SourceManifest::empty();
    for task in tasks {
        let manifest = match &manifest {
            Some(m) => m,
            None if task.required_sources().is_empty() => &empty,
            None => {
                return Err(Error::InvalidArgument(format!(
                    "task '{task}' needs --manifest (sources: {})",
                    task.required_sources().join(", ")
                )))
            }
        };
        let ds = generate_task(task, manifest, seed)?;
        let path = args.out.join(format!("{task}.jsonl"));
        export_dataset(&ds, &path)?;
        println!(
            "{task}: induce {} / execute {} -> {}",
            ds.induce.len(),
            ds.execute.len(),
            path.display()
        );
    }
    Ok(())
}

/// Shared experiment setup: dataset, backend, client, writer.
struct ExperimentContext {
    ds: TaskDataset,
    client: ModelClient,
    cfg: RunConfig,
}

fn build_backend(
    task: TaskId,
    ds: &TaskDataset,
    args: &BackendArgs,
    file_config: &FileConfig,
) -> Result<Arc<dyn Backend>> {
    let kind = args
        .backend
        .clone()
        .or_else(|| file_config.backend.clone())
        .unwrap_or_else(|| "oracle".to_string());
    match kind.as_str() {
        "oracle" => Ok(Arc::new(OracleBackend::new(task).with_dataset(ds))),
        "static" => {
            let text = args.static_text.clone().ok_or_else(|| {
                Error::InvalidArgument("static backend needs --static-text".into())
            })?;
            Ok(Arc::new(StaticBackend::new(text)))
        }
        "http" => {
            let url = args
                .url
                .clone()
                .or_else(|| file_config.url.clone())
                .ok_or_else(|| Error::InvalidArgument("http backend needs --url".into()))?;
            Ok(Arc::new(HttpBackend::new(url)?))
        }
        other => Err(Error::InvalidArgument(format!(
            "unknown backend '{other}' (valid: oracle, static, http)"
        ))),
    }
}

fn setup(
    task_name: &str,
    data: &Path,
    out: &Path,
    seed: Option<u64>,
    backend_args: &BackendArgs,
    file_config: &FileConfig,
) -> Result<ExperimentContext> {
    let task = parse_task(task_name)?;
    let ds = import_dataset(data)?;
    if ds.task != task {
        return Err(Error::InvalidArgument(format!(
            "dataset {} holds task '{}', not '{task}'",
            data.display(),
            ds.task
        )));
    }
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;

    let mut cfg = RunConfig::new(out);
    cfg.tasks = vec![task];
    cfg.seed = seed.or(file_config.seed).unwrap_or(0);
    cfg.backend = backend_args
        .backend
        .clone()
        .or_else(|| file_config.backend.clone())
        .unwrap_or_else(|| "oracle".to_string());
    cfg.model = backend_args
        .model
        .clone()
        .or_else(|| file_config.model.clone())
        .unwrap_or_else(|| cfg.backend.clone());
    if let Some(n) = backend_args.max_in_flight.or(file_config.max_in_flight) {
        cfg.max_in_flight = n.max(1);
    }

    let backend = build_backend(task, &ds, backend_args, file_config)?;
    let mut client = ModelClient::new(backend);
    if !backend_args.no_cache {
        let cache_path = backend_args
            .cache
            .clone()
            .unwrap_or_else(|| out.join("cache.jsonl"));
        client = client.with_cache(Cache::open(&cache_path)?);
    }
    Ok(ExperimentContext { ds, client, cfg })
}

fn verify_icl(args: VerifyIclArgs, file_config: &FileConfig) -> Result<()> {
    let mut ctx = setup(
        &args.task,
        &args.data,
        &args.out,
        args.seed,
        &args.backend,
        file_config,
    )?;
    ctx.cfg.n_icl = args
        .n_icl
        .or(file_config.n_icl)
        .unwrap_or(100)
        .min(ctx.ds.execute.len());
    let mut writer = RunWriter::create(&args.out, ctx.cfg.clone())?;
    let score = run_icl_verification(&ctx.ds, &ctx.client, &ctx.cfg, &mut writer)?;
    writer.finish()?;
    println!(
        "{}: icl accuracy {:.1} over {} trials",
        score.task,
        score.mean * 100.0,
        score.n_items
    );
    Ok(())
}

fn induce(args: InduceArgs, file_config: &FileConfig) -> Result<()> {
    let mut ctx = setup(
        &args.task,
        &args.data,
        &args.out,
        args.seed,
        &args.backend,
        file_config,
    )?;
    ctx.cfg.n_induction = args.n.or(file_config.n_induction).unwrap_or(100);
    let template = match args
        .template
        .clone()
        .or_else(|| file_config.template.clone())
    {
        Some(path) => PromptTemplate::load(&path)?,
        None => PromptTemplate::default_induction(),
    };
    ctx.cfg.template_name = template.name.clone();

    let examples = sample_induction_examples(&ctx.ds, ctx.cfg.n_induction, ctx.cfg.seed)?;
    let mut writer = RunWriter::create(&args.out, ctx.cfg.clone())?;
    writer.save_dataset(&ctx.ds)?;
    let instructions = run_induction(&examples, &template, &ctx.client, &ctx.cfg, &mut writer)?;
    writer.finish()?;
    println!(
        "{}: induced {} instructions -> {}",
        ctx.ds.task,
        instructions.len(),
        args.out.join("instructions.jsonl").display()
    );
    Ok(())
}

/// Read instructions from a plain text file ('#' comments) or an
/// instructions.jsonl produced by an induce run.
fn read_instructions(path: &Path) -> Result<Vec<String>> {
    if path.extension().and_then(|e| e.to_str()) == Some("jsonl") {
        let dir = path.parent().unwrap_or_else(|| Path::new("."));
        if path.file_name().and_then(|n| n.to_str()) == Some("instructions.jsonl") {
            return Ok(load_instructions(dir)?.into_iter().map(|r| r.raw).collect());
        }
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let instructions: Vec<String> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.to_string())
        .collect();
    if instructions.is_empty() {
        return Err(Error::EmptyResult(format!(
            "no instructions in {}",
            path.display()
        )));
    }
    Ok(instructions)
}

fn exec_acc(args: ExecAccArgs, file_config: &FileConfig) -> Result<()> {
    let ctx = setup(
        &args.task,
        &args.data,
        &args.out,
        args.seed,
        &args.backend,
        file_config,
    )?;
    let instructions = read_instructions(&args.instructions)?;
    let mut writer = RunWriter::create(&args.out, ctx.cfg.clone())?;
    let score = run_execution_accuracy(&instructions, &ctx.ds, &ctx.client, &ctx.cfg, &mut writer)?;
    writer.finish()?;
    println!(
        "{}: execution accuracy {:.1} over {} instructions x {} items",
        score.task,
        score.mean * 100.0,
        score.per_instruction.len(),
        score.n_items
    );
    Ok(())
}

fn ref_score(args: RefScoreArgs) -> Result<()> {
    let candidates = read_instructions(&args.candidates)?;
    let references = induct::evalrunner::load_reference_file(&args.references)?;
    let scorer: Box<dyn SimilarityScorer> = match &args.scorer_cmd {
        Some(cmd) => Box::new(ExternalProcessScorer {
            command: cmd.split_whitespace().map(|s| s.to_string()).collect(),
        }),
        None => Box::new(UnigramF1Scorer),
    };
    let scores = score_against_references(&candidates, &references, scorer.as_ref())?;
    let mean = scores.iter().sum::<f64>() / scores.len().max(1) as f64;

    if let Some(out) = &args.out {
        let lines: Vec<String> = candidates
            .iter()
            .zip(&scores)
            .map(|(c, s)| serde_json::json!({"candidate": c, "score": s}).to_string())
            .collect();
        write_lines(out, &lines)?;
    }
    if let Some(run_dir) = &args.run {
        let task = args.task.as_deref().ok_or_else(|| {
            Error::InvalidArgument("--run also needs --task to name the summary row".into())
        })?;
        let task = parse_task(task)?;
        update_ref_score(run_dir, task, mean)?;
    }
    println!(
        "ref score: mean {:.1} over {} candidates ({})",
        mean * 100.0,
        scores.len(),
        scorer.name()
    );
    Ok(())
}

/// Record a reference-scoring mean into an existing run summary.
fn update_ref_score(run_dir: &Path, task: TaskId, mean: f64) -> Result<()> {
    let path = run_dir.join("summary.json");
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let mut summary: induct::evalrunner::RunSummary =
        serde_json::from_str(&text).map_err(|e| Error::parse(&path, 1, e.to_string()))?;
    summary
        .tasks
        .entry(task.name().to_string())
        .or_default()
        .ref_score = Some(mean);
    summary.compute_averages();
    let mut text = serde_json::to_string_pretty(&summary).unwrap();
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

fn score_items(args: ScoreArgs) -> Result<()> {
    #[derive(serde::Deserialize)]
    struct Item {
        prediction: String,
        gold: Vec<String>,
    }
    let metric = induct::scoring::parse_metric(&args.metric)
        .or_else(|_| parse_task(&args.metric).map(induct::scoring::MetricKind::for_task))
        .map_err(|_| {
            Error::InvalidArgument(format!(
                "'{}' is neither a metric kind nor a task name",
                args.metric
            ))
        })?;
    let text = std::fs::read_to_string(&args.input).map_err(|e| Error::io(&args.input, e))?;
    let items: Vec<Item> = induct::corpus::parse_jsonl(&text, &args.input)?;
    let mut lines = Vec::with_capacity(items.len());
    let mut total = 0.0;
    for (i, item) in items.iter().enumerate() {
        let score = induct::scoring::score_outputs(metric, &item.prediction, &item.gold);
        total += score;
        lines.push(serde_json::json!({"item": i, "score": score}).to_string());
    }
    match &args.out {
        Some(path) => write_lines(path, &lines)?,
        None => lines.iter().for_each(|l| println!("{l}")),
    }
    eprintln!(
        "{}: mean {:.3} over {} items",
        metric.name(),
        total / items.len().max(1) as f64,
        items.len()
    );
    Ok(())
}

fn tally(args: TallyArgs) -> Result<()> {
    let instructions = read_instructions(&args.input)?;
    let table = tally_instructions(&instructions);
    let total = instructions.len();
    let shown = args.top.unwrap_or(table.len());
    for (instruction, count) in table.iter().take(shown) {
        println!(
            "{count}\t{:.0}%\t{instruction}",
            *count as f64 / total as f64 * 100.0
        );
    }
    Ok(())
}

fn report(args: ReportArgs) -> Result<()> {
    let format = ReportFormat::parse(&args.format)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown format '{}'", args.format)))?;
    let dirs: Vec<&Path> = args.runs.iter().map(|p| p.as_path()).collect();
    let (table, warnings) = build_report(&dirs)?;
    for warning in warnings {
        eprintln!("warning: {warning}");
    }
    let rendered = render(&table, format);
    match &args.out {
        Some(path) => std::fs::write(path, &rendered).map_err(|e| Error::io(path, e))?,
        None => print!("{rendered}"),
    }
    if let Some(path) = &args.chart_data {
        std::fs::write(path, render_chart_data(&table)).map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}
