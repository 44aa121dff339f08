//! Two-stage dataset generation: one question-list completion per document,
//! then one answer completion per question. Output is written incrementally
//! with periodic checkpoints so an interrupted run can resume and produce a
//! byte-identical file.

use std::collections::HashSet;
use std::fs::OpenOptions;
use std::io::{BufWriter, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{Corpus, Document};
use crate::dataset::{read_dataset, QAPair};
use crate::error::{Error, Result};
use crate::llm::{CompletionRequest, LlmProvider};
use crate::prompting::{
    render_answer_prompt, render_question_prompt, truncate_body, PromptTemplate,
    DEFAULT_TRUNCATION_BUDGET,
};

/// Knobs for one generation run.
#[derive(Debug, Clone)]
pub struct GenerationConfig {
    /// Upper bound on questions kept per document.
    pub max_questions: usize,
    pub max_tokens: usize,
    pub temperature: f64,
    pub seed: Option<u64>,
    /// Documents processed in parallel.
    pub concurrency: usize,
    /// Documents per checkpoint; output and state are persisted at each
    /// boundary.
    pub checkpoint_interval: usize,
    /// Character budget for document bodies in prompts; longer tails are cut.
    pub truncation_budget: usize,
    pub question_template: PromptTemplate,
    pub answer_template: PromptTemplate,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig {
            max_questions: 10,
            max_tokens: 512,
            temperature: 0.0,
            seed: None,
            concurrency: 4,
            checkpoint_interval: 50,
            truncation_budget: DEFAULT_TRUNCATION_BUDGET,
            question_template: PromptTemplate::question_default(),
            answer_template: PromptTemplate::answer_default(),
        }
    }
}

impl GenerationConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("max_questions", self.max_questions),
            ("max_tokens", self.max_tokens),
            ("concurrency", self.concurrency),
            ("checkpoint_interval", self.checkpoint_interval),
            ("truncation_budget", self.truncation_budget),
        ] {
            if value == 0 {
                return Err(Error::InvalidConfig(format!("{name} must be at least 1")));
            }
        }
        if !self.temperature.is_finite() || self.temperature < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "temperature must be a finite non-negative number, got {}",
                self.temperature
            )));
        }
        Ok(())
    }

    /// Digest of everything that shapes the output, used to refuse resuming
    /// a checkpoint under a different run setup.
    fn fingerprint(&self, model: &str, corpus: &Corpus, telemetry: bool) -> String {
        let mut hasher = Sha256::new();
        for part in [
            model,
            &self.max_questions.to_string(),
            &self.max_tokens.to_string(),
            &format!("{}", self.temperature),
            &format!("{:?}", self.seed),
            &self.truncation_budget.to_string(),
            &telemetry.to_string(),
        ] {
            hasher.update(part.as_bytes());
            hasher.update([0]);
        }
        for template in [&self.question_template, &self.answer_template] {
            hasher.update(template.name().as_bytes());
            hasher.update([0]);
            hasher.update(template.body().as_bytes());
            hasher.update([0]);
        }
        for doc in corpus.documents() {
            hasher.update(doc.id.as_bytes());
            hasher.update([0]);
            hasher.update(doc.body.as_bytes());
            hasher.update([0]);
        }
        let digest: [u8; 32] = hasher.finalize().into();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// One observability line; the stream carries no timestamps so repeated runs
/// produce identical files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TelemetryEvent {
    pub context_id: String,
    pub event: String,
    pub detail: String,
}

impl TelemetryEvent {
    fn new(context_id: &str, event: &str, detail: impl Into<String>) -> Self {
        TelemetryEvent {
            context_id: context_id.to_string(),
            event: event.to_string(),
            detail: detail.into(),
        }
    }
}

/// Extract a question list from a completion.
///
/// Recognized line formats: `1. …`, `1) …`, and `- …`. Whatever follows the
/// marker must be at least three characters after trimming. Duplicates are
/// dropped case-insensitively, first occurrence wins, and at most
/// `max_questions` survive.
pub fn parse_questions(text: &str, max_questions: usize) -> Vec<String> {
    let mut seen: HashSet<String> = HashSet::new();
    let mut questions = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        let Some(residue) = strip_list_marker(line) else {
            continue;
        };
        let question = residue.trim();
        if question.chars().count() < 3 {
            continue;
        }
        if seen.insert(question.to_lowercase()) {
            questions.push(question.to_string());
            if questions.len() == max_questions {
                break;
            }
        }
    }
    questions
}

fn strip_list_marker(line: &str) -> Option<&str> {
    if let Some(rest) = line.strip_prefix("- ") {
        return Some(rest);
    }
    let digits = line.bytes().take_while(|b| b.is_ascii_digit()).count();
    if digits == 0 {
        return None;
    }
    let rest = &line[digits..];
    rest.strip_prefix('.').or_else(|| rest.strip_prefix(')'))
}

fn completion_request(prompt: String, cfg: &GenerationConfig) -> CompletionRequest {
    let mut request = CompletionRequest::new(prompt);
    request.max_tokens = cfg.max_tokens;
    request.temperature = cfg.temperature;
    request.seed = cfg.seed;
    request
}

/// Stage one: ask for a question list about `doc` and parse it. The document
/// body is used as given; apply any truncation beforehand.
pub fn generate_questions(
    provider: &dyn LlmProvider,
    doc: &Document,
    cfg: &GenerationConfig,
) -> Result<Vec<String>> {
    let prompt = render_question_prompt(&cfg.question_template, doc, cfg.max_questions)
        .map_err(|e| e.for_document(&doc.id))?;
    let completion = provider
        .complete(&completion_request(prompt, cfg))
        .map_err(|e| e.for_document(&doc.id))?;
    Ok(parse_questions(&completion.text, cfg.max_questions))
}

/// Stage two: ask for the answer to one question against `doc`.
pub fn generate_answer(
    provider: &dyn LlmProvider,
    doc: &Document,
    question: &str,
    cfg: &GenerationConfig,
) -> Result<String> {
    let prompt = render_answer_prompt(&cfg.answer_template, doc, question)
        .map_err(|e| e.for_document(&doc.id))?;
    let completion = provider
        .complete(&completion_request(prompt, cfg))
        .map_err(|e| e.for_document(&doc.id))?;
    Ok(completion.text.trim().to_string())
}

fn process_document(
    provider: &dyn LlmProvider,
    doc: &Document,
    cfg: &GenerationConfig,
) -> Result<(Vec<QAPair>, Vec<TelemetryEvent>)> {
    let mut events = Vec::new();
    let (body, truncated) = truncate_body(&doc.body, cfg.truncation_budget);
    if truncated {
        events.push(TelemetryEvent::new(
            &doc.id,
            "truncated",
            format!("body cut to {} chars", cfg.truncation_budget),
        ));
    }
    let prompt_doc = Document {
        id: doc.id.clone(),
        title: doc.title.clone(),
        body,
    };

    let questions = generate_questions(provider, &prompt_doc, cfg)?;
    if questions.is_empty() {
        events.push(TelemetryEvent::new(
            &doc.id,
            "parse_failure",
            "no questions parsed from completion",
        ));
        return Ok((Vec::new(), events));
    }

    let mut pairs = Vec::with_capacity(questions.len());
    for (k, question) in questions.iter().enumerate() {
        let answer = generate_answer(provider, &prompt_doc, question, cfg)?;
        if answer.is_empty() {
            events.push(TelemetryEvent::new(
                &doc.id,
                "empty_answer",
                question.clone(),
            ));
        }
        pairs.push(QAPair::new(
            format!("{}#{k}", doc.id),
            &doc.id,
            question,
            answer,
            provider.model(),
        ));
    }
    Ok((pairs, events))
}

/// Whether a per-document failure should end the run. Exhausted transient
/// failures skip just the document; anything structural (bad credential,
/// protocol mismatch, render or I/O bugs) aborts.
fn aborts_run(err: &Error) -> bool {
    match err.provider_kind() {
        Some(kind) => !kind.is_retryable(),
        None => true,
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CheckpointState {
    docs_done: usize,
    out_bytes: u64,
    telemetry_bytes: u64,
    fingerprint: String,
}

fn state_path(out_path: &Path) -> PathBuf {
    let mut name = out_path.as_os_str().to_owned();
    name.push(".state.json");
    PathBuf::from(name)
}

fn open_at(path: &Path, offset: u64) -> Result<std::fs::File> {
    let mut file = OpenOptions::new()
        .read(true)
        .write(true)
        .create(true)
        .open(path)
        .map_err(|e| Error::io(path, e))?;
    file.set_len(offset).map_err(|e| Error::io(path, e))?;
    file.seek(SeekFrom::End(0)).map_err(|e| Error::io(path, e))?;
    Ok(file)
}

/// Tallies for one [`generate_dataset`] call. Counters cover only the work
/// performed by this run; resumed documents are not re-counted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GenerationStats {
    pub docs_total: usize,
    pub docs_failed: usize,
    pub parse_failures: usize,
    pub truncated_docs: usize,
    /// Total pairs in the finished dataset, resumed documents included.
    pub pairs_generated: usize,
    /// Document index a resumed run continued from.
    pub resumed_at: Option<usize>,
}

/// A finished generation run: every pair in the output file plus run tallies.
#[derive(Debug, Clone)]
pub struct GenerationOutcome {
    pub pairs: Vec<QAPair>,
    pub stats: GenerationStats,
}

/// Run both generation stages over the whole corpus, writing pairs to
/// `out_path` as JSONL and (optionally) one telemetry line per notable event.
///
/// Every `checkpoint_interval` documents the output is flushed and a state
/// sidecar (`<out>.state.json`) records progress. When that sidecar exists at
/// startup the run resumes after the last completed checkpoint — provided the
/// corpus, provider model, and config still match — and the finished file is
/// byte-identical to an uninterrupted run. The sidecar is removed on
/// completion.
///
/// Document-level transient failures (retries exhausted) are skipped and
/// logged; structural failures abort the run with state preserved.
pub fn generate_dataset(
    provider: &dyn LlmProvider,
    corpus: &Corpus,
    cfg: &GenerationConfig,
    out_path: &Path,
    telemetry_path: Option<&Path>,
) -> Result<GenerationOutcome> {
    cfg.validate()?;
    let fingerprint = cfg.fingerprint(provider.model(), corpus, telemetry_path.is_some());
    let state_file = state_path(out_path);

    let mut stats = GenerationStats {
        docs_total: corpus.len(),
        ..GenerationStats::default()
    };

    let mut docs_done = 0usize;
    let mut out_bytes = 0u64;
    let mut telemetry_bytes = 0u64;
    if state_file.exists() {
        let raw = std::fs::read_to_string(&state_file).map_err(|e| Error::io(&state_file, e))?;
        let state: CheckpointState =
            serde_json::from_str(&raw).map_err(|e| Error::CheckpointMismatch {
                path: state_file.clone(),
                reason: format!("unreadable state: {e}"),
            })?;
        if state.fingerprint != fingerprint {
            return Err(Error::CheckpointMismatch {
                path: state_file.clone(),
                reason: "corpus, model, or configuration changed since the interrupted run".into(),
            });
        }
        if state.docs_done > corpus.len() {
            return Err(Error::CheckpointMismatch {
                path: state_file.clone(),
                reason: format!(
                    "state claims {} documents done but the corpus has {}",
                    state.docs_done,
                    corpus.len()
                ),
            });
        }
        if !out_path.exists() {
            return Err(Error::CheckpointMismatch {
                path: state_file.clone(),
                reason: "state exists but the output file does not".into(),
            });
        }
        docs_done = state.docs_done;
        out_bytes = state.out_bytes;
        telemetry_bytes = state.telemetry_bytes;
        stats.resumed_at = Some(docs_done);
        log::info!(
            "resuming generation at document {}/{} from {}",
            docs_done,
            corpus.len(),
            state_file.display()
        );
    }

    let mut out = BufWriter::new(open_at(out_path, out_bytes)?);
    let mut telemetry = match telemetry_path {
        Some(path) => Some(BufWriter::new(open_at(path, telemetry_bytes)?)),
        None => None,
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.concurrency)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;

    let remaining = &corpus.documents()[docs_done..];
    for chunk in remaining.chunks(cfg.checkpoint_interval) {
        let results: Vec<Result<(Vec<QAPair>, Vec<TelemetryEvent>)>> = pool.install(|| {
            chunk
                .par_iter()
                .map(|doc| process_document(provider, doc, cfg))
                .collect()
        });

        for (doc, result) in chunk.iter().zip(results) {
            let (pairs, mut events) = match result {
                Ok(outcome) => outcome,
                Err(err) if aborts_run(&err) => {
                    // Leave the last checkpoint in place for a later resume.
                    return Err(err);
                }
                Err(err) => {
                    stats.docs_failed += 1;
                    log::warn!("skipping document {}: {err}", doc.id);
                    (
                        Vec::new(),
                        vec![TelemetryEvent::new(&doc.id, "doc_failed", err.to_string())],
                    )
                }
            };
            stats.parse_failures += events
                .iter()
                .filter(|e| e.event == "parse_failure")
                .count();
            stats.truncated_docs += events.iter().filter(|e| e.event == "truncated").count();
            for pair in &pairs {
                let line = serde_json::to_string(pair)
                    .map_err(|e| Error::InvalidConfig(format!("serializing pair: {e}")))?;
                writeln!(out, "{line}").map_err(|e| Error::io(out_path, e))?;
            }
            if let Some(writer) = telemetry.as_mut() {
                for event in events.drain(..) {
                    let line = serde_json::to_string(&event)
                        .map_err(|e| Error::InvalidConfig(format!("serializing event: {e}")))?;
                    writeln!(writer, "{line}")
                        .map_err(|e| Error::io(telemetry_path.unwrap(), e))?;
                }
            }
        }

        docs_done += chunk.len();
        out.flush().map_err(|e| Error::io(out_path, e))?;
        out_bytes = out
            .get_mut()
            .stream_position()
            .map_err(|e| Error::io(out_path, e))?;
        if let Some(writer) = telemetry.as_mut() {
            writer.flush().map_err(|e| Error::io(telemetry_path.unwrap(), e))?;
            telemetry_bytes = writer
                .get_mut()
                .stream_position()
                .map_err(|e| Error::io(telemetry_path.unwrap(), e))?;
        }
        let state = CheckpointState {
            docs_done,
            out_bytes,
            telemetry_bytes,
            fingerprint: fingerprint.clone(),
        };
        let body = serde_json::to_string(&state)
            .map_err(|e| Error::InvalidConfig(format!("serializing state: {e}")))?;
        std::fs::write(&state_file, body).map_err(|e| Error::io(&state_file, e))?;
        log::info!("progress: {docs_done}/{} documents", corpus.len());
    }

    drop(out);
    drop(telemetry);
    if let Err(err) = std::fs::remove_file(&state_file) {
        if err.kind() != std::io::ErrorKind::NotFound {
            return Err(Error::io(&state_file, err));
        }
    }

    let pairs = read_dataset(out_path)?;
    stats.pairs_generated = pairs.len();
    Ok(GenerationOutcome { pairs, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llm::{Completion, MockLlm};
    use std::sync::Mutex;

    #[test]
    fn parses_numbered_dotted_parenthesized_and_dashed_lists() {
        let text = "1. What is the first thing?\n2) Where is the second thing?\n- Why a third thing?\nPlain prose line.\n12. What about двенадцать?";
        let questions = parse_questions(text, 10);
        assert_eq!(
            questions,
            vec![
                "What is the first thing?",
                "Where is the second thing?",
                "Why a third thing?",
                "What about двенадцать?",
            ]
        );
    }

    #[test]
    fn short_residue_and_duplicates_are_dropped() {
        let text = "1. ok\n2. What is it?\n3. WHAT IS IT?\n4. What else?";
        let questions = parse_questions(text, 10);
        assert_eq!(questions, vec!["What is it?", "What else?"]);
    }

    #[test]
    fn question_count_is_capped() {
        let text: String = (1..=12).map(|i| format!("{i}. Question number {i}?\n")).collect();
        assert_eq!(parse_questions(&text, 10).len(), 10);
    }

    #[test]
    fn prose_parses_to_nothing() {
        assert!(parse_questions("The passage discusses several topics.", 10).is_empty());
    }

    fn two_doc_corpus() -> Corpus {
        Corpus::from_documents([
            Document {
                id: "d1".into(),
                title: Some("One".into()),
                body: "alpha-one body".into(),
            },
            Document {
                id: "d2".into(),
                title: None,
                body: "beta-two body".into(),
            },
        ])
    }

    fn scripted_provider() -> MockLlm {
        MockLlm::new(5)
            // Answer prompts carry a "### Question:" line; match those first
            // so the body needles below never shadow them.
            .respond("### Question: What is alpha?", "Alpha is a letter.")
            .respond("### Question: Where is alpha?", "In the greek alphabet.")
            .respond("### Question: Why alpha?", "Because it comes first.")
            .respond("### Question: What is beta?", "Beta follows alpha.")
            .respond("### Question: Where is beta?", "  Right after alpha.  ")
            .respond(
                "alpha-one body",
                "1. What is alpha?\n2. Where is alpha?\n3. Why alpha?",
            )
            .respond("beta-two body", "1. What is beta?\n2. Where is beta?")
    }

    #[test]
    fn generates_sequential_ids_and_trimmed_answers() {
        let corpus = two_doc_corpus();
        let provider = scripted_provider();
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("dataset.jsonl");
        let cfg = GenerationConfig::default();
        let outcome = generate_dataset(&provider, &corpus, &cfg, &out, None).unwrap();

        let ids: Vec<&str> = outcome.pairs.iter().map(|p| p.id.as_str()).collect();
        assert_eq!(ids, vec!["d1#0", "d1#1", "d1#2", "d2#0", "d2#1"]);
        assert_eq!(outcome.pairs[4].answer, "Right after alpha.");
        assert_eq!(outcome.pairs[0].generator_model, "mock-llm");
        assert_eq!(outcome.stats.pairs_generated, 5);
        assert_eq!(outcome.stats.docs_failed, 0);
        assert!(!state_path(&out).exists());

        let on_disk = read_dataset(&out).unwrap();
        assert_eq!(on_disk, outcome.pairs);
    }

    #[test]
    fn unparseable_question_list_yields_telemetry_not_an_error() {
        let corpus = Corpus::from_documents([Document {
            id: "d1".into(),
            title: None,
            body: "gamma body".into(),
        }]);
        let provider = MockLlm::new(5).respond("gamma body", "No list here, just prose.");
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("dataset.jsonl");
        let tele = dir.path().join("telemetry.jsonl");
        let cfg = GenerationConfig::default();
        let outcome =
            generate_dataset(&provider, &corpus, &cfg, &out, Some(&tele)).unwrap();
        assert!(outcome.pairs.is_empty());
        assert_eq!(outcome.stats.parse_failures, 1);

        let telemetry = std::fs::read_to_string(&tele).unwrap();
        let event: TelemetryEvent =
            serde_json::from_str(telemetry.lines().next().unwrap()).unwrap();
        assert_eq!(event.context_id, "d1");
        assert_eq!(event.event, "parse_failure");
        let raw: serde_json::Value =
            serde_json::from_str(telemetry.lines().next().unwrap()).unwrap();
        let keys: Vec<&str> = raw.as_object().unwrap().keys().map(|k| k.as_str()).collect();
        assert_eq!(keys, vec!["context_id", "event", "detail"]);
    }

    /// Delegates to an inner provider until the call budget runs out, then
    /// fails with a non-retryable error.
    struct FailAfter {
        inner: MockLlm,
        budget: Mutex<usize>,
    }

    impl LlmProvider for FailAfter {
        fn complete(&self, request: &CompletionRequest) -> Result<Completion> {
            let mut budget = self.budget.lock().unwrap();
            if *budget == 0 {
                return Err(Error::provider(
                    crate::error::ProviderErrorKind::Auth,
                    "credential expired",
                ));
            }
            *budget -= 1;
            self.inner.complete(request)
        }

        fn model(&self) -> &str {
            self.inner.model()
        }
    }

    fn one_question_corpus_and_script(n_docs: usize) -> (Corpus, MockLlm) {
        let docs: Vec<Document> = (0..n_docs)
            .map(|i| Document {
                id: format!("d{i}"),
                title: None,
                body: format!("unique-body-{i} text"),
            })
            .collect();
        let mut script = MockLlm::new(11);
        for i in 0..n_docs {
            script.add_response(
                format!("### Question: What is item {i}?"),
                format!("Item {i} is a widget."),
            );
        }
        for i in 0..n_docs {
            script.add_response(
                format!("unique-body-{i} text"),
                format!("1. What is item {i}?"),
            );
        }
        (Corpus::from_documents(docs), script)
    }

    #[test]
    fn interrupted_run_resumes_to_a_byte_identical_file() {
        let cfg = GenerationConfig {
            checkpoint_interval: 1,
            concurrency: 1,
            ..GenerationConfig::default()
        };
        let dir = tempfile::tempdir().unwrap();

        // Uninterrupted baseline.
        let (corpus, provider) = one_question_corpus_and_script(5);
        let baseline = dir.path().join("baseline.jsonl");
        let tele_a = dir.path().join("baseline.telemetry.jsonl");
        generate_dataset(&provider, &corpus, &cfg, &baseline, Some(&tele_a)).unwrap();

        // Interrupted run: each doc costs 2 calls; budget 5 finishes two
        // documents and dies inside the third.
        let (corpus, inner) = one_question_corpus_and_script(5);
        let flaky = FailAfter {
            inner,
            budget: Mutex::new(5),
        };
        let out = dir.path().join("resumed.jsonl");
        let tele_b = dir.path().join("resumed.telemetry.jsonl");
        let err = generate_dataset(&flaky, &corpus, &cfg, &out, Some(&tele_b)).unwrap_err();
        assert_eq!(
            err.provider_kind(),
            Some(crate::error::ProviderErrorKind::Auth)
        );
        assert!(state_path(&out).exists(), "abort must leave the checkpoint");

        let (corpus, provider) = one_question_corpus_and_script(5);
        let outcome = generate_dataset(&provider, &corpus, &cfg, &out, Some(&tele_b)).unwrap();
        assert_eq!(outcome.stats.resumed_at, Some(2));
        assert_eq!(outcome.stats.pairs_generated, 5);
        assert!(!state_path(&out).exists());

        assert_eq!(
            std::fs::read(&baseline).unwrap(),
            std::fs::read(&out).unwrap()
        );
        assert_eq!(
            std::fs::read(&tele_a).unwrap(),
            std::fs::read(&tele_b).unwrap()
        );
    }

    #[test]
    fn resume_under_a_different_config_is_refused() {
        let cfg = GenerationConfig {
            checkpoint_interval: 1,
            concurrency: 1,
            ..GenerationConfig::default()
        };
        let dir = tempfile::tempdir().unwrap();
        let (corpus, inner) = one_question_corpus_and_script(5);
        let flaky = FailAfter {
            inner,
            budget: Mutex::new(5),
        };
        let out = dir.path().join("dataset.jsonl");
        generate_dataset(&flaky, &corpus, &cfg, &out, None).unwrap_err();

        let (corpus, provider) = one_question_corpus_and_script(5);
        let changed = GenerationConfig {
            max_questions: 3,
            ..cfg.clone()
        };
        let err = generate_dataset(&provider, &corpus, &changed, &out, None).unwrap_err();
        assert!(matches!(err, Error::CheckpointMismatch { .. }));

        // The original configuration still resumes cleanly.
        generate_dataset(&provider, &corpus, &cfg, &out, None).unwrap();
    }

    /// Fails every prompt mentioning the marker with a retryable error.
    struct FlakyDoc {
        inner: MockLlm,
        marker: &'static str,
    }

    impl LlmProvider for FlakyDoc {
        fn complete(&self, request: &CompletionRequest) -> Result<Completion> {
            if request.prompt.contains(self.marker) {
                return Err(Error::provider(
                    crate::error::ProviderErrorKind::Timeout,
                    "deadline exceeded",
                ));
            }
            self.inner.complete(request)
        }

        fn model(&self) -> &str {
            self.inner.model()
        }
    }

    #[test]
    fn transient_document_failures_are_skipped_and_logged() {
        let (corpus, inner) = one_question_corpus_and_script(3);
        let provider = FlakyDoc {
            inner,
            marker: "unique-body-1",
        };
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("dataset.jsonl");
        let tele = dir.path().join("telemetry.jsonl");
        let cfg = GenerationConfig::default();
        let outcome = generate_dataset(&provider, &corpus, &cfg, &out, Some(&tele)).unwrap();
        assert_eq!(outcome.stats.docs_failed, 1);
        let ids: Vec<&str> = outcome.pairs.iter().map(|p| p.id.as_str()).collect();
        assert_eq!(ids, vec!["d0#0", "d2#0"]);

        let telemetry = std::fs::read_to_string(&tele).unwrap();
        assert!(telemetry.contains("doc_failed"));
        assert!(telemetry.contains("deadline exceeded"));
    }

    #[test]
    fn truncation_is_applied_and_recorded() {
        let long_body = format!("needle-head {}", "x".repeat(200));
        let corpus = Corpus::from_documents([Document {
            id: "d1".into(),
            title: None,
            body: long_body,
        }]);
        let provider = MockLlm::new(5).respond("needle-head", "1. What is the needle?");
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("dataset.jsonl");
        let tele = dir.path().join("telemetry.jsonl");
        let cfg = GenerationConfig {
            truncation_budget: 40,
            ..GenerationConfig::default()
        };
        let outcome = generate_dataset(&provider, &corpus, &cfg, &out, Some(&tele)).unwrap();
        assert_eq!(outcome.stats.truncated_docs, 1);
        // The prompt saw only the head of the body.
        let prompts = provider.received_prompts();
        assert!(prompts[0].contains("needle-head"));
        assert!(!prompts[0].contains(&"x".repeat(50)));
        assert!(std::fs::read_to_string(&tele).unwrap().contains("truncated"));
    }

    #[test]
    fn config_validation_rejects_zeroes() {
        let cfg = GenerationConfig {
            max_questions: 0,
            ..GenerationConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = GenerationConfig {
            checkpoint_interval: 0,
            ..GenerationConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
