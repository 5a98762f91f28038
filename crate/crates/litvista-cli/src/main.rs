//! `litvista`: validate, convert, score, run, and analyze narrative graphs.
//!
//! Data always goes to stdout (or the file named by `--out`); diagnostics go
//! to stderr through the logger. Exit codes: 0 success, 1 content failure
//! (invalid graphs, unparseable tables, bad model config), 2 usage error,
//! 3 filesystem or network trouble.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use litvista::analysis::{
    corpus_stats, corpus_stats_csv, distance_csv, distance_histogram, emit_svg,
    lexical_role_space, lexicon_csv, scatter_from_lexicon, scatter_from_shape, shape_csv,
    story_shape_export, CorpusStats, EdgeClassify, Plot, SvgError, DEFAULT_BUCKET_EDGES,
};
use litvista::format::{
    graph_from_json, graph_from_rows, graph_to_json, load_graph, parse_inline,
    parse_model_output_tolerant, parse_prediction_table, prediction_rows_from_graph,
    serialize_inline, serialize_prediction_table, CandidateList, DatasetError, IndexPolicy,
    PredictionRow, TagMap,
};
use litvista::runner::{
    heuristic_baseline, run_evaluation, DocStatus, ExecError, ModelConfig, RunMode, RunOptions,
    RunnerError,
};
use litvista::scoring::{results_csv, score_run, Aggregation, MatchConfig, SpanMatch};
use litvista::topology::{validate as validate_graph, DeltaConfig, Mode, NarrativeGraph};

#[derive(Parser)]
#[command(
    name = "litvista",
    version,
    about = "Narrative topology toolkit",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check graph files against the edge rules.
    Validate(ValidateArgs),
    /// Convert between graph JSON, five-column tables, and tagged text.
    Convert(ConvertArgs),
    /// Score a directory of prediction tables against gold graphs.
    Score(ScoreArgs),
    /// Run a configured model over a dataset split and score the result.
    Run(RunArgs),
    /// Corpus statistics for dataset splits or individual files.
    Stats(StatsArgs),
    /// Distance histograms, role lexicon coordinates, and story shapes.
    #[command(subcommand)]
    Analyze(AnalyzeCmd),
    /// Score the deterministic reference predictor on a split.
    Baseline(BaselineArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CliMode {
    Strict,
    Relaxed,
}

impl CliMode {
    fn to_mode(self) -> Mode {
        match self {
            CliMode::Strict => Mode::Strict,
            CliMode::Relaxed => Mode::Relaxed,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CliRunMode {
    /// Classify pre-identified anchors.
    Oracle,
    /// Identify and classify in one pass.
    E2e,
}

impl CliRunMode {
    fn to_mode(self) -> RunMode {
        match self {
            CliRunMode::Oracle => RunMode::Oracle,
            CliRunMode::E2e => RunMode::EndToEnd,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CliFormat {
    Tsv,
    Inline,
    Graph,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CliIndexPolicy {
    All,
    Minimal,
}

impl CliIndexPolicy {
    fn to_policy(self) -> IndexPolicy {
        match self {
            CliIndexPolicy::All => IndexPolicy::All,
            CliIndexPolicy::Minimal => IndexPolicy::Minimal,
        }
    }
}

#[derive(Args)]
struct ValidateArgs {
    /// Graph JSON files to check.
    #[arg(required = true)]
    files: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = CliMode::Strict)]
    mode: CliMode,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConvertArgs {
    input: PathBuf,
    #[arg(long, value_enum)]
    from: CliFormat,
    #[arg(long, value_enum)]
    to: CliFormat,
    /// Document text backing a table input (tables carry no text).
    #[arg(long)]
    text: Option<PathBuf>,
    /// Defaults to the input file stem.
    #[arg(long)]
    doc_id: Option<String>,
    /// Read tables with the tolerant reader instead of the strict parser.
    #[arg(long)]
    tolerant: bool,
    /// Where inline output places explicit head indexes.
    #[arg(long, value_enum, default_value_t = CliIndexPolicy::All)]
    index_policy: CliIndexPolicy,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MatchFlags {
    /// Match spans by equal word within a start-offset window instead of exactly.
    #[arg(long, value_name = "CHARS")]
    window: Option<usize>,
    /// Count an anchor as matched even when its role differs.
    #[arg(long)]
    role_free: bool,
    /// Require equal child roles on matched edges.
    #[arg(long)]
    labeled_deps: bool,
    /// Drop root attachments from the edge score.
    #[arg(long)]
    exclude_root_edges: bool,
    /// Drop Impulse-to-Impulse backbone links from the edge score.
    #[arg(long)]
    exclude_backbone_edges: bool,
    /// Average per-document scores instead of pooling counts.
    #[arg(long = "macro")]
    macro_avg: bool,
}

impl MatchFlags {
    fn to_config(&self) -> MatchConfig {
        MatchConfig {
            span_match: match self.window {
                Some(k) => SpanMatch::WordWindow(k),
                None => SpanMatch::Exact,
            },
            role_required_for_anchor: !self.role_free,
            dep_labeled: self.labeled_deps,
            include_root_edges: !self.exclude_root_edges,
            include_backbone_edges: !self.exclude_backbone_edges,
            aggregation: if self.macro_avg {
                Aggregation::Macro
            } else {
                Aggregation::Micro
            },
        }
    }
}

#[derive(Args)]
struct ScoreArgs {
    /// Directory of `<doc_id>.tsv` prediction tables.
    #[arg(long)]
    pred: PathBuf,
    /// Directory of gold graph JSON files.
    #[arg(long)]
    gold: PathBuf,
    /// Label for the results row.
    #[arg(long, default_value = "model")]
    model: String,
    /// Read predictions with the tolerant reader.
    #[arg(long)]
    tolerant: bool,
    #[command(flatten)]
    matching: MatchFlags,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// Model config TOML.
    #[arg(long)]
    model: PathBuf,
    /// Dataset root containing split directories.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "test")]
    split: String,
    #[arg(long, value_enum, default_value_t = CliRunMode::Oracle)]
    mode: CliRunMode,
    #[arg(long, default_value = ".litvista-cache")]
    cache_dir: PathBuf,
    /// Persist predictions, manifest, and results here.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    run_id: Option<String>,
    /// Worker threads; overrides the config's parallelism.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    /// Dataset root; reports every split directory present.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Restrict --data to one split.
    #[arg(long)]
    split: Option<String>,
    /// Explicit graph files, reported as one row.
    files: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum AnalyzeCmd {
    /// Histogram of child-head start distances.
    Distances(DistancesArgs),
    /// Word coordinates in the role plane.
    Lexicon(LexiconArgs),
    /// Spatial coordinates for one document.
    Shape(ShapeArgs),
}

#[derive(Args)]
struct DistancesArgs {
    /// Directory of graph files (optionally with --split).
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    split: Option<String>,
    files: Vec<PathBuf>,
    /// Comma-separated ascending bucket edges starting at 0.
    #[arg(long)]
    buckets: Option<String>,
    /// Bucket by child-head role pair instead of child role alone.
    #[arg(long)]
    by_pair: bool,
    /// Also render a heatmap here.
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LexiconArgs {
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    split: Option<String>,
    files: Vec<PathBuf>,
    /// Keep words with at least this many event occurrences.
    #[arg(long, default_value_t = 1)]
    min_freq: u64,
    /// Also render a scatter plot here.
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ShapeArgs {
    /// Graph JSON file.
    file: PathBuf,
    /// Lateral step per Pause in the dependent subtree, in (0, 1).
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    /// Also render a scatter plot here.
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BaselineArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "test")]
    split: String,
    #[arg(long, value_enum, default_value_t = CliRunMode::Oracle)]
    mode: CliRunMode,
    /// Build the role lexicon from this split (for example, train).
    #[arg(long)]
    lexicon_split: Option<String>,
    /// Minimum word frequency for the lexicon.
    #[arg(long, default_value_t = 1)]
    min_freq: u64,
    /// Persist per-document prediction tables here.
    #[arg(long)]
    pred_dir: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    /// Content failures: invalid graphs, bad tables, bad configs.
    Invalid(String),
    /// Argument combinations clap cannot express.
    Usage(String),
    /// Filesystem or network trouble.
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Invalid(msg) | CliError::Usage(msg) | CliError::Io(msg) => f.write_str(msg),
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn invalid(err: impl std::fmt::Display) -> CliError {
    CliError::Invalid(err.to_string())
}

fn from_dataset(err: DatasetError) -> CliError {
    match err {
        DatasetError::Io { .. } | DatasetError::MissingSplit { .. } => CliError::Io(err.to_string()),
        other => CliError::Invalid(other.to_string()),
    }
}

fn from_runner(err: RunnerError) -> CliError {
    match err {
        RunnerError::Io { .. } => CliError::Io(err.to_string()),
        RunnerError::Exec(
            ref exec @ (ExecError::InvalidEndpoint { .. } | ExecError::MissingApiKey { .. }),
        ) => {
            let _ = exec;
            CliError::Invalid(err.to_string())
        }
        RunnerError::Exec(_) => CliError::Io(err.to_string()),
        other => CliError::Invalid(other.to_string()),
    }
}

fn from_svg(err: SvgError) -> CliError {
    match err {
        SvgError::Io { .. } => CliError::Io(err.to_string()),
        other => CliError::Invalid(other.to_string()),
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_out(out: Option<&Path>, data: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, data)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{data}");
            Ok(())
        }
    }
}

fn stem_of(path: &Path) -> String {
    path.file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("doc")
        .to_string()
}

fn sanitize(doc_id: &str) -> String {
    doc_id
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Loads every `*.json` graph in one directory, sorted by file name.
fn load_graph_dir(dir: &Path) -> Result<Vec<NarrativeGraph>, CliError> {
    let entries =
        std::fs::read_dir(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|r| r.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut graphs = Vec::with_capacity(paths.len());
    for p in &paths {
        let graph = load_graph(p).map_err(from_dataset)?;
        graphs.push(graph);
    }
    if graphs.is_empty() {
        return Err(CliError::Invalid(format!(
            "no graph files (*.json) in {}",
            dir.display()
        )));
    }
    Ok(graphs)
}

fn load_graph_files(files: &[PathBuf]) -> Result<Vec<NarrativeGraph>, CliError> {
    files
        .iter()
        .map(|p| load_graph(p).map_err(from_dataset))
        .collect()
}

/// Shared input selection for stats-like commands: a directory or files.
fn gather_graphs(
    data: Option<&Path>,
    split: Option<&str>,
    files: &[PathBuf],
) -> Result<Vec<NarrativeGraph>, CliError> {
    match (data, files.is_empty()) {
        (Some(root), true) => {
            let dir = match split {
                Some(name) => root.join(name),
                None => root.to_owned(),
            };
            load_graph_dir(&dir)
        }
        (None, false) => load_graph_files(files),
        (Some(_), false) => Err(usage("pass either --data or graph files, not both")),
        (None, true) => Err(usage("pass --data DIR (optionally --split NAME) or graph files")),
    }
}

/// Gold graphs must satisfy the relaxed rules before scoring against them.
fn require_relaxed(graphs: &[NarrativeGraph]) -> Result<(), CliError> {
    for g in graphs {
        let report = validate_graph(g, Mode::Relaxed);
        if let Some(first) = report.violations.first() {
            return Err(CliError::Invalid(format!(
                "gold graph {} fails relaxed validation: {first}",
                g.doc_id()
            )));
        }
    }
    Ok(())
}

fn parse_rows(text: &str, tolerant: bool, origin: &str) -> Result<Vec<PredictionRow>, CliError> {
    if tolerant {
        let (rows, diag) = parse_model_output_tolerant(text);
        if diag.fatal {
            return Err(CliError::Invalid(format!(
                "{origin}: no table rows recovered"
            )));
        }
        if diag.skipped_lines > 0 || diag.repaired_rows > 0 {
            log::warn!(
                "{origin}: tolerant parse skipped {} line(s), repaired {} row(s)",
                diag.skipped_lines,
                diag.repaired_rows
            );
        }
        Ok(rows)
    } else {
        parse_prediction_table(text)
            .map_err(|e| CliError::Invalid(format!("{origin}: {e}")))
    }
}

fn parse_buckets(arg: &str) -> Result<Vec<usize>, CliError> {
    let edges: Result<Vec<usize>, _> = arg
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect();
    let edges =
        edges.map_err(|_| usage("--buckets must be a comma-separated list of integers"))?;
    if edges.first() != Some(&0) {
        return Err(usage("--buckets must start at 0"));
    }
    if !edges.windows(2).all(|w| w[0] < w[1]) {
        return Err(usage("--buckets must increase strictly"));
    }
    Ok(edges)
}

fn cmd_validate(args: ValidateArgs) -> Result<(), CliError> {
    let mode = args.mode.to_mode();
    let mut buf = String::new();
    let mut failed = 0usize;
    for file in &args.files {
        let graph = load_graph(file).map_err(from_dataset)?;
        let report = validate_graph(&graph, mode);
        if report.is_valid() {
            let _ = writeln!(buf, "{}: valid ({mode} mode)", file.display());
        } else {
            failed += 1;
            let _ = writeln!(
                buf,
                "{}: {} violation(s) ({mode} mode)",
                file.display(),
                report.violations.len()
            );
            for v in &report.violations {
                let _ = writeln!(buf, "  {v}");
            }
        }
        for note in &report.notes {
            let _ = writeln!(buf, "  note: {note}");
        }
    }
    write_out(args.out.as_deref(), &buf)?;
    if failed > 0 {
        return Err(CliError::Invalid(format!(
            "{failed} of {} file(s) failed {mode} validation",
            args.files.len()
        )));
    }
    Ok(())
}

fn cmd_convert(args: ConvertArgs) -> Result<(), CliError> {
    let input = read_file(&args.input)?;
    let origin = args.input.display().to_string();
    let doc_id = args.doc_id.clone().unwrap_or_else(|| stem_of(&args.input));
    let tags = TagMap::standard();

    // Table to table round-trips rows directly; no text is needed.
    if args.from == CliFormat::Tsv && args.to == CliFormat::Tsv {
        let rows = parse_rows(&input, args.tolerant, &origin)?;
        return write_out(args.out.as_deref(), &serialize_prediction_table(&rows));
    }

    let graph = match args.from {
        CliFormat::Graph => graph_from_json(&input).map_err(from_dataset)?,
        CliFormat::Inline => parse_inline(&input, &doc_id, &tags).map_err(invalid)?,
        CliFormat::Tsv => {
            let text_path = args
                .text
                .as_deref()
                .ok_or_else(|| usage("--text FILE is required when converting from tsv"))?;
            let text = read_file(text_path)?;
            let rows = parse_rows(&input, args.tolerant, &origin)?;
            graph_from_rows(&doc_id, &text, &rows).map_err(invalid)?
        }
    };

    let rendered = match args.to {
        CliFormat::Graph => graph_to_json(&graph),
        CliFormat::Tsv => serialize_prediction_table(&prediction_rows_from_graph(&graph)),
        CliFormat::Inline => {
            serialize_inline(&graph, args.index_policy.to_policy(), &tags).map_err(invalid)?
        }
    };
    write_out(args.out.as_deref(), &rendered)
}

fn cmd_score(args: ScoreArgs) -> Result<(), CliError> {
    let gold = load_graph_dir(&args.gold)?;
    require_relaxed(&gold)?;

    let entries = std::fs::read_dir(&args.pred)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.pred.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|r| r.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "tsv"))
        .collect();
    paths.sort();

    let mut predictions: BTreeMap<String, Vec<PredictionRow>> = BTreeMap::new();
    for p in &paths {
        let text = read_file(p)?;
        let rows = parse_rows(&text, args.tolerant, &p.display().to_string())?;
        predictions.insert(stem_of(p), rows);
    }

    let cfg = args.matching.to_config();
    let result = score_run(&predictions, &gold, &cfg);
    write_out(
        args.out.as_deref(),
        &results_csv(&[(args.model.as_str(), &result)]),
    )
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let gold = load_graph_dir(&args.data.join(&args.split))?;
    require_relaxed(&gold)?;

    let mut cfg = ModelConfig::load(&args.model).map_err(from_runner)?;
    if let Some(jobs) = args.jobs {
        if jobs == 0 {
            return Err(usage("--jobs must be at least 1"));
        }
        cfg.parallelism = jobs;
    }

    let opts = RunOptions {
        split: args.split.clone(),
        mode: args.mode.to_mode(),
        cache_dir: args.cache_dir.clone(),
        out_dir: args.out_dir.clone(),
        run_id: args.run_id.clone(),
    };
    let outcome =
        run_evaluation(&gold, &cfg, &MatchConfig::default(), &opts).map_err(from_runner)?;

    let failed = outcome
        .manifest
        .docs
        .values()
        .filter(|s| matches!(s, DocStatus::Failed { .. }))
        .count();
    if failed > 0 {
        log::warn!("{failed} document(s) failed; they score as empty predictions");
    }
    write_out(
        args.out.as_deref(),
        &results_csv(&[(cfg.name.as_str(), &outcome.result)]),
    )
}

fn cmd_stats(args: StatsArgs) -> Result<(), CliError> {
    let mut rows: Vec<(String, CorpusStats)> = Vec::new();
    match (&args.data, args.files.is_empty()) {
        (Some(root), true) => {
            let names: Vec<String> = match &args.split {
                Some(s) => vec![s.clone()],
                None => ["train", "val", "test"].iter().map(|s| s.to_string()).collect(),
            };
            let mut found = false;
            for name in names {
                let dir = root.join(&name);
                if !dir.is_dir() {
                    if args.split.is_some() {
                        return Err(CliError::Io(format!(
                            "missing split directory {}",
                            dir.display()
                        )));
                    }
                    continue;
                }
                found = true;
                let graphs = load_graph_dir(&dir)?;
                rows.push((name, corpus_stats(&graphs).map_err(invalid)?));
            }
            if !found {
                return Err(CliError::Io(format!(
                    "no split directories under {}",
                    root.display()
                )));
            }
        }
        (None, false) => {
            let graphs = load_graph_files(&args.files)?;
            rows.push(("files".to_string(), corpus_stats(&graphs).map_err(invalid)?));
        }
        _ => return Err(usage("pass either --data ROOT or graph files")),
    }
    let refs: Vec<(&str, &CorpusStats)> = rows.iter().map(|(n, s)| (n.as_str(), s)).collect();
    write_out(args.out.as_deref(), &corpus_stats_csv(&refs))
}

fn cmd_distances(args: DistancesArgs) -> Result<(), CliError> {
    let graphs = gather_graphs(args.data.as_deref(), args.split.as_deref(), &args.files)?;
    let edges = match &args.buckets {
        Some(list) => parse_buckets(list)?,
        None => DEFAULT_BUCKET_EDGES.to_vec(),
    };
    let classify = if args.by_pair {
        EdgeClassify::RolePair
    } else {
        EdgeClassify::ChildRole
    };
    let table = distance_histogram(&graphs, &edges, classify);
    write_out(args.out.as_deref(), &distance_csv(&table))?;
    if let Some(svg_path) = &args.svg {
        let plot = Plot::Heatmap {
            title: "edge distance histogram",
            table: &table,
        };
        emit_svg(&plot, svg_path).map_err(from_svg)?;
    }
    Ok(())
}

fn cmd_lexicon(args: LexiconArgs) -> Result<(), CliError> {
    if args.min_freq == 0 {
        return Err(usage("--min-freq must be at least 1"));
    }
    let graphs = gather_graphs(args.data.as_deref(), args.split.as_deref(), &args.files)?;
    let stats = lexical_role_space(&graphs, args.min_freq);
    write_out(args.out.as_deref(), &lexicon_csv(&stats))?;
    if let Some(svg_path) = &args.svg {
        let points = scatter_from_lexicon(&stats);
        let plot = Plot::Scatter {
            title: "lexical role space",
            x_label: "(impulse - resonance) / total",
            y_label: "(pause - resonance) / total",
            points: &points,
        };
        emit_svg(&plot, svg_path).map_err(from_svg)?;
    }
    Ok(())
}

fn cmd_shape(args: ShapeArgs) -> Result<(), CliError> {
    let graph = load_graph(&args.file).map_err(from_dataset)?;
    let delta = DeltaConfig::new(args.delta).map_err(|e| usage(e.to_string()))?;
    let records = story_shape_export(&graph, &delta).map_err(invalid)?;
    write_out(args.out.as_deref(), &shape_csv(&records))?;
    if let Some(svg_path) = &args.svg {
        let points = scatter_from_shape(&records);
        let plot = Plot::Scatter {
            title: graph.doc_id(),
            x_label: "impulse index",
            y_label: "lateral depth",
            points: &points,
        };
        emit_svg(&plot, svg_path).map_err(from_svg)?;
    }
    Ok(())
}

fn cmd_baseline(args: BaselineArgs) -> Result<(), CliError> {
    if args.min_freq == 0 {
        return Err(usage("--min-freq must be at least 1"));
    }
    let gold = load_graph_dir(&args.data.join(&args.split))?;
    require_relaxed(&gold)?;

    let lexicon = match &args.lexicon_split {
        Some(name) => {
            let source = load_graph_dir(&args.data.join(name))?;
            Some(lexical_role_space(&source, args.min_freq))
        }
        None => None,
    };

    let mut predictions: BTreeMap<String, Vec<PredictionRow>> = BTreeMap::new();
    for doc in &gold {
        let candidates =
            (args.mode == CliRunMode::Oracle).then(|| CandidateList::from_graph(doc));
        let rows = heuristic_baseline(doc.text(), candidates.as_ref(), lexicon.as_deref());
        predictions.insert(doc.doc_id().to_string(), rows);
    }

    if let Some(dir) = &args.pred_dir {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        for (doc_id, rows) in &predictions {
            let path = dir.join(format!("{}.tsv", sanitize(doc_id)));
            std::fs::write(&path, serialize_prediction_table(rows))
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        }
    }

    let result = score_run(&predictions, &gold, &MatchConfig::default());
    write_out(args.out.as_deref(), &results_csv(&[("baseline", &result)]))
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Validate(args) => cmd_validate(args),
        Command::Convert(args) => cmd_convert(args),
        Command::Score(args) => cmd_score(args),
        Command::Run(args) => cmd_run(args),
        Command::Stats(args) => cmd_stats(args),
        Command::Analyze(AnalyzeCmd::Distances(args)) => cmd_distances(args),
        Command::Analyze(AnalyzeCmd::Lexicon(args)) => cmd_lexicon(args),
        Command::Analyze(AnalyzeCmd::Shape(args)) => cmd_shape(args),
        Command::Baseline(args) => cmd_baseline(args),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            if matches!(err, CliError::Usage(_)) {
                eprintln!("run 'litvista --help' for usage");
            }
            ExitCode::from(err.code())
        }
    }
}
