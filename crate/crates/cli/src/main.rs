//! `synthqa` — generate, filter, inspect, export, and evaluate synthetic
//! question-answering datasets from the command line.
//!
//! Exit codes: 0 on success (including `--help`/`--version`), 1 for usage and
//! configuration errors caught before real work starts, 2 for runtime
//! failures (I/O, malformed data, provider errors).

mod config;

use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{ArgAction, Args, Parser, Subcommand};
use synthqa_core::embedding::HttpEmbeddingProvider;
use synthqa_core::error::{Error, Result};
use synthqa_core::llm::HttpLlmProvider;
use synthqa_core::metrics::{evaluate, EvalOptions, RougeVariant};
use synthqa_core::postprocess::RelatednessBasis;
use synthqa_core::prompting::PromptTemplate;
use synthqa_core::{
    compute_stats, export_finetune, generate_dataset, load_corpus, read_dataset, run_postprocess,
    split_by_id_lists, split_by_ratio, write_dataset, EmbeddingProvider, FilterConfig,
    FinetuneExportConfig, GenerationConfig, LlmProvider, MockEmbedding, MockLlm,
};

use config::{env_var, resolve_provider, FileConfig, ProviderSection};

#[derive(Parser)]
#[command(
    name = "synthqa",
    version,
    about = "Build and evaluate synthetic QA datasets from a document corpus"
)]
struct Cli {
    /// Path to a TOML configuration file (flags override its values).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Increase log verbosity (-v for info, -vv for debug).
    #[arg(short, long, global = true, action = ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

/// Offline-provider toggle shared by the network-using subcommands.
#[derive(Args, Clone)]
struct MockArgs {
    /// Use deterministic offline providers; no network traffic at all.
    #[arg(long)]
    mock: bool,

    /// Seed for the offline providers (only meaningful with --mock).
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Connection overrides for the text-generation provider.
#[derive(Args, Clone)]
struct LlmArgs {
    /// Completion endpoint URL (env: SYNTHQA_LLM_ENDPOINT).
    #[arg(long, value_name = "URL")]
    llm_endpoint: Option<String>,

    /// Bearer token for the completion endpoint (env: SYNTHQA_LLM_TOKEN).
    #[arg(long, value_name = "TOKEN")]
    llm_token: Option<String>,

    /// Model name sent with completion requests (env: SYNTHQA_LLM_MODEL).
    #[arg(long, value_name = "NAME")]
    llm_model: Option<String>,
}

/// Connection overrides for the embedding provider.
#[derive(Args, Clone)]
struct EmbArgs {
    /// Embedding endpoint URL (env: SYNTHQA_EMB_ENDPOINT).
    #[arg(long, value_name = "URL")]
    emb_endpoint: Option<String>,

    /// Bearer token for the embedding endpoint (env: SYNTHQA_EMB_TOKEN).
    #[arg(long, value_name = "TOKEN")]
    emb_token: Option<String>,

    /// Model name sent with embedding requests (env: SYNTHQA_EMB_MODEL).
    #[arg(long, value_name = "NAME")]
    emb_model: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate question/answer pairs from a JSONL document corpus.
    Generate {
        /// Corpus file: one JSON object per line with id, title, body.
        #[arg(long, value_name = "FILE")]
        corpus: PathBuf,

        /// Output dataset file (JSONL, one pair per line).
        #[arg(long, value_name = "FILE")]
        out: PathBuf,

        /// Optional telemetry sink for truncation/parse/failure events.
        #[arg(long, value_name = "FILE")]
        telemetry: Option<PathBuf>,

        /// Process only the first N corpus documents.
        #[arg(long, value_name = "N")]
        limit: Option<usize>,

        /// Questions requested per document.
        #[arg(long, value_name = "N")]
        max_questions: Option<usize>,

        /// Completion token budget per request.
        #[arg(long, value_name = "N")]
        max_tokens: Option<usize>,

        /// Sampling temperature sent to the provider.
        #[arg(long, value_name = "T")]
        temperature: Option<f64>,

        /// Documents processed in parallel.
        #[arg(long, value_name = "N")]
        concurrency: Option<usize>,

        /// Flush output and record resume state every N documents.
        #[arg(long, value_name = "N")]
        checkpoint_interval: Option<usize>,

        /// Whitespace-token budget before document bodies are truncated.
        #[arg(long, value_name = "N")]
        truncation_budget: Option<usize>,

        /// Seed forwarded with every completion request.
        #[arg(long, value_name = "N")]
        request_seed: Option<u64>,

        /// Override the built-in question prompt template.
        #[arg(long, value_name = "FILE")]
        question_template: Option<PathBuf>,

        /// Override the built-in answer prompt template.
        #[arg(long, value_name = "FILE")]
        answer_template: Option<PathBuf>,

        #[command(flatten)]
        mock: MockArgs,

        #[command(flatten)]
        llm: LlmArgs,
    },

    /// Filter a raw dataset: drop refusals and unrelated pairs, mark unfinished answers.
    Postprocess {
        /// Raw dataset produced by `generate`.
        #[arg(long, value_name = "FILE")]
        dataset: PathBuf,

        /// The corpus the dataset was generated from.
        #[arg(long, value_name = "FILE")]
        corpus: PathBuf,

        /// Output file for the accepted pairs.
        #[arg(long, value_name = "FILE")]
        out: PathBuf,

        /// Optional per-pair removal log (JSONL).
        #[arg(long, value_name = "FILE")]
        removals: Option<PathBuf>,

        /// Cosine similarity to the refusal sentinel at or above which an
        /// answer is dropped (0–1 exclusive).
        #[arg(long, value_name = "X")]
        sentinel_threshold: Option<f64>,

        /// Cosine similarity below which a pair is dropped as unrelated
        /// (0–1 exclusive).
        #[arg(long, value_name = "X")]
        relatedness_threshold: Option<f64>,

        /// What relatedness compares: answer_vs_question, answer_vs_context,
        /// or answer_vs_question_and_context.
        #[arg(long, value_name = "BASIS")]
        relatedness_basis: Option<String>,

        #[command(flatten)]
        mock: MockArgs,

        #[command(flatten)]
        emb: EmbArgs,
    },

    /// Print summary statistics (contexts, QAs per context, totals).
    Stats {
        /// Dataset file to summarize.
        #[arg(long, value_name = "FILE")]
        dataset: PathBuf,
    },

    /// Export fine-tuning records (JSONL prompt/answer pairs) plus a
    /// hyperparameter sidecar.
    Export {
        /// Dataset to export (usually postprocessed).
        #[arg(long, value_name = "FILE")]
        dataset: PathBuf,

        /// The corpus the dataset references.
        #[arg(long, value_name = "FILE")]
        corpus: PathBuf,

        /// Output records file; split names are inserted before the
        /// extension when splitting.
        #[arg(long, value_name = "FILE")]
        out: PathBuf,

        /// Few-shot examples prepended to each prompt (0 or 5).
        #[arg(long, default_value_t = 0, value_name = "N")]
        shots: usize,

        /// Omit document bodies from prompts.
        #[arg(long)]
        no_context: bool,

        /// Skip pairs whose answers are marked unfinished.
        #[arg(long)]
        drop_unfinished: bool,

        /// Random context-level splits, e.g. "train=0.8,dev=0.1,test=0.1".
        #[arg(long, value_name = "SPEC", conflicts_with = "split_ids")]
        split_ratios: Option<String>,

        /// Explicit context-level splits from id files, e.g.
        /// "train=train_ids.txt,dev=dev_ids.txt" (one context id per line).
        #[arg(long, value_name = "SPEC")]
        split_ids: Option<String>,
    },

    /// Score a predictions file against a references file.
    Evaluate {
        /// Predictions: JSONL with id and text fields.
        #[arg(long, value_name = "FILE")]
        predictions: PathBuf,

        /// References: JSONL with id and text fields, same id set.
        #[arg(long, value_name = "FILE")]
        references: PathBuf,

        /// Optional per-token log-probabilities (JSONL with id and logprobs)
        /// for perplexity.
        #[arg(long, value_name = "FILE")]
        logprobs: Option<PathBuf>,

        /// Write the full report as JSON in addition to the printed table.
        #[arg(long, value_name = "FILE")]
        report_out: Option<PathBuf>,

        /// ROUGE variant: l, 1, or 2.
        #[arg(long, default_value = "l", value_name = "VARIANT")]
        rouge_variant: String,

        /// Pool n-gram counts across the corpus instead of averaging
        /// per-example BLEU.
        #[arg(long)]
        corpus_bleu: bool,

        /// Skip embedding-based scores even if a provider is configured.
        #[arg(long)]
        no_bert: bool,

        #[command(flatten)]
        mock: MockArgs,

        #[command(flatten)]
        emb: EmbArgs,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // --help and --version are successful outcomes, not errors.
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };

    init_logging(cli.verbose);

    if let Err(err) = run(cli) {
        eprintln!("error: {err}");
        let mut source = std::error::Error::source(&err);
        while let Some(cause) = source {
            eprintln!("  caused by: {cause}");
            source = cause.source();
        }
        std::process::exit(exit_code(&err));
    }
}

fn init_logging(verbosity: u8) {
    let level = match verbosity {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
}

/// Usage and configuration mistakes exit 1; runtime failures exit 2.
/// Classification looks through document-context wrappers so a config-class
/// error surfacing mid-run still reports as one.
fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidConfig(_)
        | Error::UnknownPlaceholder { .. }
        | Error::UnsupportedShotCount(_)
        | Error::InvalidSplit(_) => 1,
        Error::Document { source, .. } => exit_code(source),
        _ => 2,
    }
}

fn run(cli: Cli) -> Result<()> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };

    match cli.command {
        Command::Generate {
            corpus,
            out,
            telemetry,
            limit,
            max_questions,
            max_tokens,
            temperature,
            concurrency,
            checkpoint_interval,
            truncation_budget,
            request_seed,
            question_template,
            answer_template,
            mock,
            llm,
        } => cmd_generate(
            &file,
            GenerateParams {
                corpus,
                out,
                telemetry,
                limit,
                max_questions,
                max_tokens,
                temperature,
                concurrency,
                checkpoint_interval,
                truncation_budget,
                request_seed,
                question_template,
                answer_template,
                mock,
                llm,
            },
        ),
        Command::Postprocess {
            dataset,
            corpus,
            out,
            removals,
            sentinel_threshold,
            relatedness_threshold,
            relatedness_basis,
            mock,
            emb,
        } => cmd_postprocess(
            &file,
            &dataset,
            &corpus,
            &out,
            removals.as_deref(),
            sentinel_threshold,
            relatedness_threshold,
            relatedness_basis.as_deref(),
            &mock,
            &emb,
        ),
        Command::Stats { dataset } => cmd_stats(&dataset),
        Command::Export {
            dataset,
            corpus,
            out,
            shots,
            no_context,
            drop_unfinished,
            split_ratios,
            split_ids,
        } => cmd_export(
            &dataset,
            &corpus,
            &out,
            shots,
            no_context,
            drop_unfinished,
            split_ratios.as_deref(),
            split_ids.as_deref(),
        ),
        Command::Evaluate {
            predictions,
            references,
            logprobs,
            report_out,
            rouge_variant,
            corpus_bleu,
            no_bert,
            mock,
            emb,
        } => cmd_evaluate(
            &file,
            &predictions,
            &references,
            logprobs.as_deref(),
            report_out.as_deref(),
            &rouge_variant,
            corpus_bleu,
            no_bert,
            &mock,
            &emb,
        ),
    }
}

// ---------------------------------------------------------------------------
// generate

struct GenerateParams {
    corpus: PathBuf,
    out: PathBuf,
    telemetry: Option<PathBuf>,
    limit: Option<usize>,
    max_questions: Option<usize>,
    max_tokens: Option<usize>,
    temperature: Option<f64>,
    concurrency: Option<usize>,
    checkpoint_interval: Option<usize>,
    truncation_budget: Option<usize>,
    request_seed: Option<u64>,
    question_template: Option<PathBuf>,
    answer_template: Option<PathBuf>,
    mock: MockArgs,
    llm: LlmArgs,
}

/// Offline stand-in for the completion service: answers every default answer
/// prompt with a fixed sentence and every default question prompt with a
/// fixed two-question list. Custom templates fall back to the mock's hashed
/// deterministic output.
fn demo_llm(seed: u64) -> MockLlm {
    MockLlm::new(seed)
        .respond("### Question: ", "The content states this directly.")
        .respond(
            "factoid questions",
            "1. What does the content describe?\n2. Which specific detail does the content state?",
        )
}

fn cmd_generate(file: &FileConfig, p: GenerateParams) -> Result<()> {
    let mut cfg = GenerationConfig::default();

    // File values first, then flags on top: flag > file > default.
    let g = &file.generation;
    if let Some(v) = g.max_questions {
        cfg.max_questions = v;
    }
    if let Some(v) = g.max_tokens {
        cfg.max_tokens = v;
    }
    if let Some(v) = g.temperature {
        cfg.temperature = v;
    }
    if let Some(v) = g.concurrency {
        cfg.concurrency = v;
    }
    if let Some(v) = g.checkpoint_interval {
        cfg.checkpoint_interval = v;
    }
    if let Some(v) = g.truncation_budget {
        cfg.truncation_budget = v;
    }
    if let Some(v) = p.max_questions {
        cfg.max_questions = v;
    }
    if let Some(v) = p.max_tokens {
        cfg.max_tokens = v;
    }
    if let Some(v) = p.temperature {
        cfg.temperature = v;
    }
    if let Some(v) = p.concurrency {
        cfg.concurrency = v;
    }
    if let Some(v) = p.checkpoint_interval {
        cfg.checkpoint_interval = v;
    }
    if let Some(v) = p.truncation_budget {
        cfg.truncation_budget = v;
    }
    cfg.seed = p.request_seed;
    if let Some(path) = &p.question_template {
        cfg.question_template =
            PromptTemplate::from_file("question", path, &["document", "max_questions"])?;
        // Surface unknown placeholders now, not on the first document.
        cfg.question_template
            .render(&[("document", ""), ("max_questions", "")])?;
    }
    if let Some(path) = &p.answer_template {
        cfg.answer_template = PromptTemplate::from_file("answer", path, &["document", "question"])?;
        cfg.answer_template
            .render(&[("document", ""), ("question", "")])?;
    }
    cfg.validate()?;

    let provider: Box<dyn LlmProvider> = if p.mock.mock {
        Box::new(demo_llm(p.mock.seed))
    } else {
        let http = resolve_provider(
            "llm",
            "SYNTHQA_LLM",
            p.llm.llm_endpoint.as_deref(),
            p.llm.llm_token.as_deref(),
            p.llm.llm_model.as_deref(),
            &file.llm,
        )?;
        Box::new(HttpLlmProvider::new(http)?)
    };

    let corpus = load_corpus(&p.corpus, p.limit)?;
    let outcome = generate_dataset(
        provider.as_ref(),
        &corpus,
        &cfg,
        &p.out,
        p.telemetry.as_deref(),
    )?;

    let s = outcome.stats;
    if let Some(at) = s.resumed_at {
        println!("resumed from document {at}");
    }
    println!(
        "generated {} pairs from {} documents ({} failed, {} truncated, {} parse failures) -> {}",
        s.pairs_generated,
        s.docs_total,
        s.docs_failed,
        s.truncated_docs,
        s.parse_failures,
        p.out.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// postprocess

#[allow(clippy::too_many_arguments)]
fn cmd_postprocess(
    file: &FileConfig,
    dataset: &Path,
    corpus_path: &Path,
    out: &Path,
    removals: Option<&Path>,
    sentinel_threshold: Option<f64>,
    relatedness_threshold: Option<f64>,
    relatedness_basis: Option<&str>,
    mock: &MockArgs,
    emb: &EmbArgs,
) -> Result<()> {
    let mut cfg = FilterConfig::default();
    let section = &file.postprocess;
    if let Some(v) = section.sentinel_threshold {
        cfg.sentinel_threshold = v;
    }
    if let Some(v) = section.relatedness_threshold {
        cfg.relatedness_threshold = v;
    }
    if let Some(name) = &section.relatedness_basis {
        cfg.relatedness_basis = RelatednessBasis::parse(name)?;
    }
    if let Some(v) = sentinel_threshold {
        cfg.sentinel_threshold = v;
    }
    if let Some(v) = relatedness_threshold {
        cfg.relatedness_threshold = v;
    }
    if let Some(name) = relatedness_basis {
        cfg.relatedness_basis = RelatednessBasis::parse(name)?;
    }
    cfg.validate()?;

    let embedder = make_embedder(file, mock, emb)?;
    let pairs = read_dataset(dataset)?;
    let corpus = load_corpus(corpus_path, None)?;

    let outcome = run_postprocess(&pairs, &corpus, embedder.as_ref(), None, &cfg)?;
    write_dataset(out, &outcome.accepted)?;
    if let Some(path) = removals {
        outcome.log.write(path)?;
    }

    let c = &outcome.log.counters;
    println!(
        "raw {} = accepted {} + removed_unanswered {} + removed_unrelated {} (marked_unfinished {})",
        c.raw, c.accepted, c.removed_unanswered, c.removed_unrelated, c.marked_unfinished
    );
    println!(
        "conservation {} -> {}",
        if c.conserved() { "holds" } else { "VIOLATED" },
        out.display()
    );
    Ok(())
}

/// Build the embedding provider for postprocess (always required there).
fn make_embedder(
    file: &FileConfig,
    mock: &MockArgs,
    emb: &EmbArgs,
) -> Result<Box<dyn EmbeddingProvider>> {
    if mock.mock {
        return Ok(Box::new(MockEmbedding::new(mock.seed)));
    }
    let http = resolve_provider(
        "embedding",
        "SYNTHQA_EMB",
        emb.emb_endpoint.as_deref(),
        emb.emb_token.as_deref(),
        emb.emb_model.as_deref(),
        &file.embedding,
    )?;
    Ok(Box::new(HttpEmbeddingProvider::new(http)?))
}

// ---------------------------------------------------------------------------
// stats

fn cmd_stats(dataset: &Path) -> Result<()> {
    let pairs = read_dataset(dataset)?;
    let stats = compute_stats(&pairs);
    println!("{}", stats.render_table());
    Ok(())
}

// ---------------------------------------------------------------------------
// export

#[allow(clippy::too_many_arguments)]
fn cmd_export(
    dataset: &Path,
    corpus_path: &Path,
    out: &Path,
    shots: usize,
    no_context: bool,
    drop_unfinished: bool,
    split_ratios: Option<&str>,
    split_ids: Option<&str>,
) -> Result<()> {
    let pairs = read_dataset(dataset)?;
    let corpus = load_corpus(corpus_path, None)?;
    let cfg = FinetuneExportConfig {
        shots,
        include_context: !no_context,
        drop_unfinished,
        ..FinetuneExportConfig::default()
    };

    let splits: Vec<(String, Vec<synthqa_core::QAPair>)> = match (split_ratios, split_ids) {
        (None, None) => {
            let summary = export_finetune(&pairs, &corpus, &cfg, out)?;
            println!(
                "wrote {} records -> {} (hyperparameters: {})",
                summary.records_written,
                summary.output_path.display(),
                summary.sidecar_path.display()
            );
            return Ok(());
        }
        (Some(spec), None) => split_by_ratio(&pairs, &parse_ratio_spec(spec)?)?
            .into_iter()
            .map(|s| (s.name, s.pairs))
            .collect(),
        (None, Some(spec)) => {
            let result = split_by_id_lists(&pairs, &parse_id_list_spec(spec)?)?;
            if !result.unlisted_contexts.is_empty() {
                eprintln!(
                    "note: {} context(s) appeared in no id list and fell back to the first split: {}",
                    result.unlisted_contexts.len(),
                    result.unlisted_contexts.join(", ")
                );
            }
            result.splits.into_iter().map(|s| (s.name, s.pairs)).collect()
        }
        (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
    };

    for (name, split_pairs) in &splits {
        let path = split_output_path(out, name);
        let summary = export_finetune(split_pairs, &corpus, &cfg, &path)?;
        println!(
            "split {name}: wrote {} records -> {}",
            summary.records_written,
            summary.output_path.display()
        );
    }
    Ok(())
}

/// Insert a split name before the output extension:
/// `out/records.jsonl` + `train` -> `out/records.train.jsonl`.
fn split_output_path(out: &Path, split: &str) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let file = match out.extension() {
        Some(ext) => format!("{stem}.{split}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{split}"),
    };
    out.with_file_name(file)
}

/// Parse "train=0.8,dev=0.1,test=0.1" into named ratios.
fn parse_ratio_spec(spec: &str) -> Result<Vec<(String, f64)>> {
    spec.split(',')
        .map(|part| {
            let (name, value) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidSplit(format!("expected name=fraction, got {part:?}")))?;
            let fraction: f64 = value.trim().parse().map_err(|_| {
                Error::InvalidSplit(format!("fraction {value:?} for split {name:?} is not a number"))
            })?;
            Ok((name.trim().to_string(), fraction))
        })
        .collect()
}

/// Parse "train=ids.txt,dev=more.txt" and read one context id per line from
/// each file (blank lines skipped).
fn parse_id_list_spec(spec: &str) -> Result<Vec<(String, Vec<String>)>> {
    spec.split(',')
        .map(|part| {
            let (name, path) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidSplit(format!("expected name=file, got {part:?}")))?;
            let path = Path::new(path.trim());
            let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            let ids: Vec<String> = raw
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(str::to_string)
                .collect();
            Ok((name.trim().to_string(), ids))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// evaluate

#[allow(clippy::too_many_arguments)]
fn cmd_evaluate(
    file: &FileConfig,
    predictions: &Path,
    references: &Path,
    logprobs: Option<&Path>,
    report_out: Option<&Path>,
    rouge_variant: &str,
    corpus_bleu: bool,
    no_bert: bool,
    mock: &MockArgs,
    emb: &EmbArgs,
) -> Result<()> {
    let options = EvalOptions {
        rouge_variant: RougeVariant::parse(rouge_variant)?,
        corpus_bleu,
    };

    // Embedding-based scores are optional: used with --mock or when an
    // embedding provider is configured anywhere, unless --no-bert.
    let embedder: Option<Box<dyn EmbeddingProvider>> = if no_bert {
        None
    } else if mock.mock {
        Some(Box::new(MockEmbedding::new(mock.seed)))
    } else if embedding_configured(emb, &file.embedding) {
        Some(make_embedder(file, mock, emb)?)
    } else {
        None
    };

    let report = evaluate(
        predictions,
        references,
        embedder.as_deref(),
        logprobs,
        &options,
    )?;
    println!("{}", report.render_table());

    if let Some(path) = report_out {
        let body = serde_json::to_string_pretty(&report)
            .map_err(|e| Error::InvalidConfig(format!("serializing report: {e}")))?;
        std::fs::write(path, body).map_err(|e| Error::io(path, e))?;
        println!("report -> {}", path.display());
    }
    Ok(())
}

fn embedding_configured(flags: &EmbArgs, section: &ProviderSection) -> bool {
    flags.emb_endpoint.is_some()
        || flags.emb_token.is_some()
        || flags.emb_model.is_some()
        || env_var("SYNTHQA_EMB_ENDPOINT").is_some()
        || env_var("SYNTHQA_EMB_TOKEN").is_some()
        || env_var("SYNTHQA_EMB_MODEL").is_some()
        || !section.is_empty()
}
