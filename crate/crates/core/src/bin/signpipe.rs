use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use url::Url;

use signpipe::gloss::{validate_sequence, GlossSequence, Provenance};
use signpipe::llm::LlmRequestConfig;
use signpipe::metrics::{
    coverage_curve, curves_to_csv, render_svg, retrieval_report, text_report, BleuSmoothing, CurveOptions,
    ExternalScores, RecallDefinition, SubsetPolicy,
};
use signpipe::pipeline::{
    compile_all, corpus_to_jsonl, load_gloss_source, sequences, translate_corpus, write_atomic, write_compiled,
    ConfigLayer, GlossRecord, PipelineConfig, TranslatorKind,
};
use signpipe::resolve::{FallbackOrder, VideoManifest};
use signpipe::service::{router, serve, AppState};
use signpipe::task::{load_tasks, validate_collection};
use signpipe::translate::GlossTranslator;

#[derive(Parser)]
#[command(name = "signpipe", version, about = "Instructions to ASL gloss and sign-video playlists")]
struct Cli {
    /// TOML config file; flags and env vars override it.
    #[arg(long, global = true, env = "SIGNPIPE_CONFIG")]
    config: Option<PathBuf>,
    #[arg(long, global = true, env = "SIGNPIPE_LOG")]
    log_level: Option<String>,
    /// Worker cap for per-task parallelism.
    #[arg(long, global = true, env = "SIGNPIPE_JOBS")]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Translate, resolve and stitch every task into CompiledTask JSON.
    Compile(CompileArgs),
    /// Gloss one sentence.
    Gloss(GlossArgs),
    /// Translate every task into a JSON Lines gloss corpus.
    Translate(TranslateArgs),
    /// Report glosses the manifest cannot serve, and task collection problems.
    Check(CheckArgs),
    #[command(subcommand)]
    Eval(EvalCmd),
    /// Serve compiled tasks over HTTP.
    Serve(ServeArgs),
    #[command(subcommand)]
    Manifest(ManifestCmd),
}

#[derive(Args, Default)]
struct TableArgs {
    #[arg(long, env = "SIGNPIPE_MANIFEST")]
    manifest: Option<PathBuf>,
    #[arg(long, env = "SIGNPIPE_SYNONYMS")]
    synonyms: Option<PathBuf>,
    /// Gloss frequencies used to rank synonym substitutes.
    #[arg(long, env = "SIGNPIPE_FREQUENCIES")]
    frequencies: Option<PathBuf>,
    #[arg(long, env = "SIGNPIPE_COMPOUNDS")]
    compounds: Option<PathBuf>,
}

#[derive(Args, Default)]
struct LlmArgs {
    /// Translation cache directory.
    #[arg(long, env = "SIGNPIPE_CACHE")]
    cache: Option<PathBuf>,
    /// Never call the endpoint; cache misses are errors.
    #[arg(long)]
    offline: bool,
    #[arg(long)]
    model: Option<String>,
}

#[derive(Args)]
struct CompileArgs {
    #[arg(long, env = "SIGNPIPE_TASKS")]
    tasks: Option<PathBuf>,
    #[command(flatten)]
    tables: TableArgs,
    #[arg(long, env = "SIGNPIPE_TRANSLATOR")]
    translator: Option<TranslatorKind>,
    #[command(flatten)]
    llm: LlmArgs,
    /// Hand-corrected translations that replace the translator per task.
    #[arg(long, env = "SIGNPIPE_CURATED")]
    curated: Option<PathBuf>,
    /// Try synonyms before fingerspelling.
    #[arg(long)]
    prefer_synonym: bool,
    /// Uppercase before tagging in the rule translator.
    #[arg(long)]
    faithful_case_order: bool,
    #[arg(long, env = "SIGNPIPE_OUT")]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[group(id = "strategy", required = true, multiple = false)]
struct Strategy {
    #[arg(long, group = "strategy")]
    rule: bool,
    #[arg(long, group = "strategy")]
    llm: bool,
}

#[derive(Args)]
struct GlossArgs {
    #[command(flatten)]
    strategy: Strategy,
    #[arg(long)]
    text: String,
    #[command(flatten)]
    llm: LlmArgs,
    #[arg(long)]
    faithful_case_order: bool,
}

#[derive(Args)]
struct TranslateArgs {
    #[command(flatten)]
    strategy: Strategy,
    #[arg(long, env = "SIGNPIPE_TASKS")]
    tasks: Option<PathBuf>,
    #[command(flatten)]
    llm: LlmArgs,
    #[arg(long, env = "SIGNPIPE_CURATED")]
    curated: Option<PathBuf>,
    #[arg(long)]
    faithful_case_order: bool,
    /// Corpus file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// Gloss corpus (JSON Lines) or a directory of compiled tasks.
    #[arg(long)]
    glosses: Option<PathBuf>,
    #[arg(long, env = "SIGNPIPE_MANIFEST")]
    manifest: Option<PathBuf>,
    #[arg(long, env = "SIGNPIPE_TASKS")]
    tasks: Option<PathBuf>,
    /// Exit nonzero when anything is reported.
    #[arg(long)]
    strict: bool,
}

#[derive(Subcommand)]
enum EvalCmd {
    /// Hit rate and Recall@1 of a gloss corpus against a manifest.
    Retrieval(RetrievalArgs),
    /// BLEU, ROUGE-L, chrF and WER between two aligned corpora.
    Text(TextArgs),
    /// Metrics over growing manifest subsets.
    Curve(CurveArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum RecallDef {
    /// hits over hits plus synonym-recoverable misses
    Recoverable,
    /// hits over every occurrence
    AllGlosses,
}

impl From<RecallDef> for RecallDefinition {
    fn from(d: RecallDef) -> Self {
        match d {
            RecallDef::Recoverable => RecallDefinition::Recoverable,
            RecallDef::AllGlosses => RecallDefinition::AllGlosses,
        }
    }
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct RetrievalArgs {
    #[arg(long)]
    glosses: PathBuf,
    #[command(flatten)]
    tables: TableArgs,
    #[arg(long)]
    recall_definition: Option<RecallDef>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Smoothing {
    None,
    Epsilon,
}

#[derive(Args)]
struct TextArgs {
    /// Hypothesis corpus: JSON Lines records or plain text, one line per pair.
    #[arg(long)]
    hyp: PathBuf,
    #[arg(long = "ref")]
    reference: PathBuf,
    #[arg(long, value_enum, default_value = "none")]
    smoothing: Smoothing,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// `NAME=FILE` with a JSON array of per-pair scores from another tool.
    #[arg(long)]
    external: Vec<String>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    Frequency,
    Random,
}

#[derive(Args)]
struct CurveArgs {
    /// `STRATEGY=PATH`, repeatable; a bare path is labelled by its file stem.
    #[arg(long, required = true)]
    glosses: Vec<String>,
    #[command(flatten)]
    tables: TableArgs,
    #[arg(long, value_enum, default_value = "frequency")]
    policy: Policy,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4")]
    seeds: Vec<u64>,
    #[arg(long, default_value_t = 10)]
    step: usize,
    #[arg(long)]
    recall_definition: Option<RecallDef>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG chart destination.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, env = "SIGNPIPE_COMPILED")]
    compiled: PathBuf,
    #[arg(long, env = "SIGNPIPE_PORT")]
    port: Option<u16>,
    #[arg(long, default_value = "127.0.0.1")]
    host: IpAddr,
    /// Base URL the playlist segment URIs are resolved against.
    #[arg(long, env = "SIGNPIPE_ASSET_BASE")]
    asset_base: Option<Url>,
    /// Static UI bundle served under /ui.
    #[arg(long)]
    ui: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ManifestCmd {
    /// Check that every entry's file exists under ROOT.
    Verify {
        #[arg(long, env = "SIGNPIPE_MANIFEST")]
        manifest: Option<PathBuf>,
        #[arg(long)]
        root: PathBuf,
    },
    /// Build a manifest from directories of `<GLOSS>.mp4` files.
    Scan {
        #[arg(long)]
        primary: PathBuf,
        #[arg(long)]
        backup: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// An error that carries a machine-readable payload for stderr.
#[derive(Debug)]
struct Reported {
    kind: &'static str,
    message: String,
    detail: Value,
}

impl std::fmt::Display for Reported {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Reported {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let file = match &cli.config {
        Some(p) => match ConfigLayer::load(p) {
            Ok(l) => l,
            Err(e) => return fail(&anyhow::Error::new(e)),
        },
        None => ConfigLayer::default(),
    };
    let level = cli
        .log_level
        .clone()
        .or_else(|| file.log_level.clone())
        .unwrap_or_else(|| "warn".into());
    tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_ansi(false)
        .with_env_filter(tracing_subscriber::EnvFilter::try_new(&level).unwrap_or_else(|_| "warn".into()))
        .init();
    match run(cli, file) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}

fn fail(e: &anyhow::Error) -> ExitCode {
    // reader went away, e.g. `| head`
    let broken_pipe = e
        .chain()
        .filter_map(|c| c.downcast_ref::<std::io::Error>())
        .any(|io| io.kind() == std::io::ErrorKind::BrokenPipe);
    if broken_pipe {
        return ExitCode::SUCCESS;
    }
    let body = match e.downcast_ref::<Reported>() {
        Some(r) => json!({ "error": r.message, "kind": r.kind, "detail": r.detail }),
        None => json!({ "error": format!("{e:#}"), "kind": "error" }),
    };
    eprintln!("{body}");
    ExitCode::FAILURE
}

fn tables_layer(t: TableArgs) -> ConfigLayer {
    ConfigLayer {
        manifest: t.manifest,
        synonyms: t.synonyms,
        frequencies: t.frequencies,
        compounds: t.compounds,
        ..Default::default()
    }
}

fn llm_layer(a: LlmArgs, file: &ConfigLayer) -> ConfigLayer {
    let llm = a.model.map(|model| LlmRequestConfig {
        model,
        ..file.llm.clone().unwrap_or_default()
    });
    ConfigLayer {
        cache: a.cache,
        offline: a.offline.then_some(true),
        llm,
        ..Default::default()
    }
}

fn strategy(s: &Strategy) -> TranslatorKind {
    if s.llm {
        TranslatorKind::Llm
    } else {
        TranslatorKind::Rule
    }
}

fn print_json(v: &impl serde::Serialize) -> Result<()> {
    writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(v)?)?;
    Ok(())
}

/// Writes `text` to `path`, or stdout.
fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => Ok(write_atomic(p, text.as_bytes())?),
        None => {
            std::io::stdout().lock().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn run(cli: Cli, file: ConfigLayer) -> Result<()> {
    let base = ConfigLayer {
        jobs: cli.jobs,
        log_level: cli.log_level,
        ..Default::default()
    };
    let build = |layer: ConfigLayer, file: ConfigLayer| -> Result<PipelineConfig> {
        Ok(PipelineConfig::from_layer(layer.over(base.clone()).over(file))?)
    };
    match cli.cmd {
        Cmd::Compile(a) => {
            let layer = ConfigLayer {
                tasks: a.tasks,
                translator: a.translator,
                curated: a.curated,
                fallback_order: a.prefer_synonym.then_some(FallbackOrder::PreferSynonym),
                faithful_case_order: a.faithful_case_order.then_some(true),
                out: a.out,
                ..llm_layer(a.llm, &file).over(tables_layer(a.tables))
            };
            let cfg = build(layer, file)?;
            compile(&cfg)
        }
        Cmd::Gloss(a) => {
            let layer = ConfigLayer {
                translator: Some(strategy(&a.strategy)),
                faithful_case_order: a.faithful_case_order.then_some(true),
                ..llm_layer(a.llm, &file)
            };
            let cfg = build(layer, file)?;
            gloss(&cfg, &a.text)
        }
        Cmd::Translate(a) => {
            let layer = ConfigLayer {
                tasks: a.tasks,
                translator: Some(strategy(&a.strategy)),
                curated: a.curated,
                faithful_case_order: a.faithful_case_order.then_some(true),
                ..llm_layer(a.llm, &file)
            };
            let cfg = build(layer, file)?;
            translate(&cfg, a.out.as_deref())
        }
        Cmd::Check(a) => {
            let layer = ConfigLayer {
                manifest: a.manifest,
                tasks: a.tasks,
                ..Default::default()
            };
            let cfg = build(layer, file)?;
            check(&cfg, a.glosses.as_deref(), a.strict)
        }
        Cmd::Eval(EvalCmd::Retrieval(a)) => {
            let layer = ConfigLayer {
                recall_definition: a.recall_definition.map(Into::into),
                ..tables_layer(a.tables)
            };
            let cfg = build(layer, file)?;
            eval_retrieval(&cfg, &a.glosses, a.format)
        }
        Cmd::Eval(EvalCmd::Text(a)) => eval_text(a),
        Cmd::Eval(EvalCmd::Curve(a)) => {
            let layer = ConfigLayer {
                recall_definition: a.recall_definition.map(Into::into),
                ..tables_layer(a.tables)
            };
            let cfg = build(layer, file)?;
            eval_curve(&cfg, &a.glosses, a.policy, a.seeds, a.step, a.out.as_deref(), a.plot.as_deref())
        }
        Cmd::Serve(a) => {
            let layer = ConfigLayer {
                port: a.port,
                asset_base: a.asset_base,
                ..Default::default()
            };
            let cfg = build(layer, file)?;
            let state = AppState::from_compiled_dir(&a.compiled, cfg.asset_base.clone())?;
            let app = router(state, a.ui.as_deref());
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(serve(app, SocketAddr::new(a.host, cfg.port)))?;
            Ok(())
        }
        Cmd::Manifest(ManifestCmd::Verify { manifest, root }) => {
            let cfg = build(
                ConfigLayer {
                    manifest,
                    ..Default::default()
                },
                file,
            )?;
            let report = cfg.load_manifest()?.verify(&root);
            print_json(&report)?;
            if !report.missing.is_empty() {
                let keys: Vec<&str> = report.missing.iter().map(|m| m.gloss_key.as_str()).collect();
                return Err(Reported {
                    kind: "missing_assets",
                    message: format!("{} video file(s) missing: {}", keys.len(), keys.join(", ")),
                    detail: serde_json::to_value(&report.missing)?,
                }
                .into());
            }
            Ok(())
        }
        Cmd::Manifest(ManifestCmd::Scan { primary, backup, out }) => {
            let m = VideoManifest::scan_dirs(&primary, backup.as_deref())?;
            emit(out.as_deref(), &(m.to_json() + "\n"))
        }
    }
}

fn compile(cfg: &PipelineConfig) -> Result<()> {
    let out = cfg
        .out
        .as_deref()
        .context("--out is required")?;
    let tasks = cfg.load_tasks()?;
    let tables = cfg.load_tables()?;
    let translator = cfg.translator()?;
    let crucial = cfg.crucial_policy();
    let compiled = compile_all(&tasks, translator.as_ref(), &tables, &crucial, cfg.fallback_order, cfg.jobs);
    let paths = write_compiled(out, &compiled)?;
    let summary: Vec<Value> = compiled
        .iter()
        .zip(&paths)
        .map(|(c, p)| {
            let failures: Vec<Value> = c
                .failures()
                .map(|(i, e)| json!({ "step_index": i, "error": e }))
                .collect();
            for f in &failures {
                tracing::warn!(task = c.task_id(), failure = %f, "step failed");
            }
            json!({ "task_id": c.task_id(), "path": p, "fully_signed": c.fully_signed(), "failures": failures })
        })
        .collect();
    print_json(&json!({ "translator": translator.name(), "tasks": summary }))
}

fn gloss(cfg: &PipelineConfig, text: &str) -> Result<()> {
    let seq: GlossSequence = match cfg.translator {
        TranslatorKind::Llm => {
            let doc = json!({ "task_id": "adhoc", "title": "adhoc", "steps": [{ "text": text }] });
            let task = load_tasks(doc.to_string().as_bytes(), signpipe::task::FORMAT_VERSION)?.remove(0);
            let t = cfg.llm_translator()?;
            t.translate_task(&task)?.remove(0)?
        }
        _ => {
            let glosses = cfg.rule_translator().translate_text(text)?;
            GlossSequence::new(0, glosses, Provenance::Rule)
        }
    };
    writeln!(std::io::stdout().lock(), "{}", seq.render())?;
    Ok(())
}

fn translate(cfg: &PipelineConfig, out: Option<&Path>) -> Result<()> {
    let tasks = cfg.load_tasks()?;
    let translator = cfg.translator()?;
    let (records, failures) = translate_corpus(&tasks, translator.as_ref(), cfg.jobs);
    emit(out, &corpus_to_jsonl(&records))?;
    if !failures.is_empty() {
        return Err(Reported {
            kind: "translation_failed",
            message: format!("{} translation failure(s)", failures.len()),
            detail: serde_json::to_value(&failures)?,
        }
        .into());
    }
    Ok(())
}

fn check(cfg: &PipelineConfig, glosses: Option<&Path>, strict: bool) -> Result<()> {
    let mut report = serde_json::Map::new();
    let mut count = 0;
    if let Some(path) = glosses {
        let manifest = cfg.load_manifest()?;
        let mut findings = Vec::new();
        for r in load_gloss_source(path)? {
            for f in validate_sequence(&r.sequence()?, &manifest) {
                findings.push(json!({ "task_id": r.task_id, "finding": f }));
            }
        }
        count += findings.len();
        report.insert("gloss_findings".into(), Value::Array(findings));
    }
    if cfg.tasks.is_some() {
        let v = validate_collection(&cfg.load_tasks()?);
        count += v.findings.len();
        report.insert("task_findings".into(), serde_json::to_value(&v.findings)?);
    }
    if report.is_empty() {
        bail!("nothing to check: pass --glosses and/or --tasks");
    }
    report.insert("total".into(), json!(count));
    print_json(&report)?;
    if strict && count > 0 {
        bail!("{count} finding(s)");
    }
    Ok(())
}

fn eval_retrieval(cfg: &PipelineConfig, glosses: &Path, format: Format) -> Result<()> {
    let seqs = sequences(&load_gloss_source(glosses)?)?;
    let manifest = cfg.load_manifest()?;
    let syn = cfg.load_synonyms()?;
    let r = retrieval_report(&seqs, &manifest, &syn, cfg.recall_definition)?;
    match format {
        Format::Json => print_json(&r),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(std::io::stdout());
            w.serialize(&r)?;
            w.flush()?;
            Ok(())
        }
    }
}

/// Rendered gloss strings: from JSON Lines records, or one line per pair.
fn read_lines(path: &Path) -> Result<Vec<(Option<(String, usize)>, String)>> {
    let text = std::fs::read_to_string(path).with_context(|| path.display().to_string())?;
    let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    if first.trim_start().starts_with('{') {
        text.lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                let r: GlossRecord = serde_json::from_str(l).with_context(|| path.display().to_string())?;
                Ok((Some((r.task_id, r.step_index)), r.glosses))
            })
            .collect()
    } else {
        Ok(text.lines().map(|l| (None, l.trim().to_string())).collect())
    }
}

fn eval_text(a: TextArgs) -> Result<()> {
    let hyp = read_lines(&a.hyp)?;
    let refs = read_lines(&a.reference)?;
    let keys = |v: &[(Option<(String, usize)>, String)]| v.iter().map(|(k, _)| k.clone()).collect::<Vec<_>>();
    if keys(&hyp) != keys(&refs) {
        bail!("hypothesis and reference corpora are not aligned");
    }
    let h: Vec<&str> = hyp.iter().map(|(_, s)| s.as_str()).collect();
    let r: Vec<&str> = refs.iter().map(|(_, s)| s.as_str()).collect();
    let smoothing = match a.smoothing {
        Smoothing::None => BleuSmoothing::None,
        Smoothing::Epsilon => BleuSmoothing::Epsilon(a.epsilon),
    };
    let mut report = text_report(&h, &r, smoothing)?;
    for spec in &a.external {
        let (name, path) = spec.split_once('=').context("--external expects NAME=FILE")?;
        let text = std::fs::read_to_string(path).with_context(|| path.to_string())?;
        let per_pair: Vec<f64> = serde_json::from_str(&text).with_context(|| path.to_string())?;
        report.fold_external(&ExternalScores {
            name: name.to_string(),
            per_pair,
        })?;
    }
    match a.format {
        Format::Json => print_json(&report),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(std::io::stdout());
            w.write_record(["metric", "value"])?;
            for (k, v) in [
                ("bleu_1", report.bleu_1),
                ("bleu_2", report.bleu_2),
                ("bleu_3", report.bleu_3),
                ("bleu_4", report.bleu_4),
                ("rouge_l_f1", report.rouge_l_f1),
                ("chrf", report.chrf),
                ("wer", report.wer),
            ] {
                w.write_record([k.to_string(), v.to_string()])?;
            }
            for (k, v) in &report.external {
                w.write_record([k.clone(), v.to_string()])?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

fn eval_curve(
    cfg: &PipelineConfig,
    sources: &[String],
    policy: Policy,
    seeds: Vec<u64>,
    step: usize,
    out: Option<&Path>,
    plot: Option<&Path>,
) -> Result<()> {
    let manifest = cfg.load_manifest()?;
    let syn = cfg.load_synonyms()?;
    let opts = CurveOptions {
        policy: match policy {
            Policy::Frequency => SubsetPolicy::FrequencyDescending,
            Policy::Random => SubsetPolicy::RandomSeeded,
        },
        seeds,
        step,
        recall_definition: cfg.recall_definition,
    };
    let mut curves = Vec::new();
    for src in sources {
        let (label, path) = match src.split_once('=') {
            Some((l, p)) => (l.to_string(), PathBuf::from(p)),
            None => {
                let p = PathBuf::from(src);
                let stem = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
                (stem, p)
            }
        };
        let seqs = sequences(&load_gloss_source(&path)?)?;
        curves.push(coverage_curve(&label, &seqs, &manifest, &syn, &opts)?);
    }
    emit(out, &curves_to_csv(&curves))?;
    if let Some(p) = plot {
        write_atomic(p, render_svg(&curves)?.as_bytes())?;
    }
    Ok(())
}
