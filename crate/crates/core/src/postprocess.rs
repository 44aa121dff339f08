//! Dataset cleanup: sentinel-based unanswered removal, relatedness-based
//! unrelated removal, and unfinished-answer marking, in that fixed order.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::{Corpus, Document};
use crate::dataset::{QAPair, QAStatus};
use crate::embedding::{cosine_similarity, EmbeddingProvider};
use crate::error::{Error, Result};
use crate::llm::{CompletionRequest, LlmProvider};

pub use crate::prompting::SENTINEL_TEXT;

/// The label appended (after a space) to answers whose last sentence is
/// classified incomplete.
pub const UNFINISHED_MARKER: &str = "***unfinished***";

const MARKER_SUFFIX: &str = " ***unfinished***";

/// Which similarity the relatedness filter thresholds on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RelatednessBasis {
    AnswerVsQuestion,
    AnswerVsContext,
    /// The stricter of the two: an answer unrelated to either its question
    /// or its context fails.
    #[default]
    AnswerVsQuestionAndContext,
}

impl RelatednessBasis {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "answer_vs_question" => Ok(RelatednessBasis::AnswerVsQuestion),
            "answer_vs_context" => Ok(RelatednessBasis::AnswerVsContext),
            "answer_vs_question_and_context" => Ok(RelatednessBasis::AnswerVsQuestionAndContext),
            other => Err(Error::InvalidConfig(format!(
                "unknown relatedness basis {other:?}"
            ))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RelatednessBasis::AnswerVsQuestion => "answer_vs_question",
            RelatednessBasis::AnswerVsContext => "answer_vs_context",
            RelatednessBasis::AnswerVsQuestionAndContext => "answer_vs_question_and_context",
        }
    }
}

/// Thresholds and basis for the two similarity filters.
///
/// Boundary behavior is asymmetric by design: the unanswered check removes at
/// equality (`similarity >= sentinel_threshold`), the unrelated check keeps
/// at equality (`similarity < relatedness_threshold` removes).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterConfig {
    pub sentinel_threshold: f64,
    pub relatedness_threshold: f64,
    pub relatedness_basis: RelatednessBasis,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            sentinel_threshold: 0.85,
            relatedness_threshold: 0.30,
            relatedness_basis: RelatednessBasis::default(),
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("sentinel_threshold", self.sentinel_threshold),
            ("relatedness_threshold", self.relatedness_threshold),
        ] {
            if !(value > 0.0 && value < 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must lie strictly between 0 and 1, got {value}"
                )));
            }
        }
        Ok(())
    }
}

/// Verdict source for the unfinished check.
pub trait SentenceClassifier: Send + Sync {
    /// Whether `sentence` is a complete, finished sentence.
    fn is_finished(&self, sentence: &str) -> Result<bool>;
}

/// Adapter that asks a completion provider for a yes/no verdict.
pub struct LlmSentenceClassifier<'a> {
    provider: &'a dyn LlmProvider,
}

impl<'a> LlmSentenceClassifier<'a> {
    pub fn new(provider: &'a dyn LlmProvider) -> Self {
        LlmSentenceClassifier { provider }
    }
}

impl SentenceClassifier for LlmSentenceClassifier<'_> {
    fn is_finished(&self, sentence: &str) -> Result<bool> {
        let prompt = format!(
            "Decide whether the following sentence is grammatically complete. Reply with yes or no only.\n\nSentence: {sentence}"
        );
        let mut request = CompletionRequest::new(prompt);
        request.max_tokens = 4;
        let completion = self.provider.complete(&request)?;
        let verdict = completion.text.trim().to_ascii_lowercase();
        if verdict.starts_with("yes") {
            Ok(true)
        } else if verdict.starts_with("no") {
            Ok(false)
        } else {
            Err(Error::provider(
                crate::error::ProviderErrorKind::Malformed,
                format!("classifier verdict {:?} is not yes/no", completion.text),
            ))
        }
    }
}

/// The final segment of `text` after the last sentence boundary. A boundary
/// is `.`, `!`, or `?` (plus any closing quotes/brackets) followed by
/// whitespace.
fn last_sentence(text: &str) -> &str {
    let trimmed = text.trim_end();
    let chars: Vec<(usize, char)> = trimmed.char_indices().collect();
    let mut start = 0usize;
    let mut i = 0usize;
    while i < chars.len() {
        if matches!(chars[i].1, '.' | '!' | '?') {
            let mut j = i + 1;
            while j < chars.len() && matches!(chars[j].1, '"' | '\'' | ')' | ']') {
                j += 1;
            }
            if j < chars.len() && chars[j].1.is_whitespace() {
                let mut k = j;
                while k < chars.len() && chars[k].1.is_whitespace() {
                    k += 1;
                }
                if k < chars.len() {
                    start = chars[k].0;
                    i = k;
                    continue;
                }
            }
            i = j;
        } else {
            i += 1;
        }
    }
    trimmed[start..].trim_start()
}

const FINISHED_ENDINGS: [&str; 7] = [".", "!", "?", ".\"", "?\"", "!\"", ".)"];

fn heuristic_finished(sentence: &str) -> bool {
    FINISHED_ENDINGS
        .iter()
        .any(|ending| sentence.ends_with(ending))
}

/// Whether the answer's LAST sentence is incomplete. A classifier verdict
/// rules when one is supplied and reachable; provider failures fall back to
/// the punctuation heuristic with a warning.
pub fn check_unfinished(answer: &str, classifier: Option<&dyn SentenceClassifier>) -> bool {
    let sentence = last_sentence(answer);
    if sentence.is_empty() {
        return true;
    }
    if let Some(classifier) = classifier {
        match classifier.is_finished(sentence) {
            Ok(finished) => return !finished,
            Err(err) => {
                log::warn!("sentence classifier unavailable ({err}); using heuristic");
            }
        }
    }
    !heuristic_finished(sentence)
}

/// Whether the answer is a refusal: exactly the sentinel sentence, or close
/// enough to it in embedding space. Returns the similarity either way.
pub fn check_unanswered(
    answer: &str,
    emb: &dyn EmbeddingProvider,
    cfg: &FilterConfig,
) -> Result<(bool, f64)> {
    if answer == SENTINEL_TEXT {
        return Ok((true, 1.0));
    }
    let similarity = cosine_similarity(&emb.embed(answer)?, &emb.embed(SENTINEL_TEXT)?)?;
    Ok((similarity >= cfg.sentinel_threshold, similarity))
}

/// Whether the answer is semantically unrelated to its question/context per
/// the configured basis. Returns the thresholded similarity either way.
pub fn check_unrelated(
    pair: &QAPair,
    context: &Document,
    emb: &dyn EmbeddingProvider,
    cfg: &FilterConfig,
) -> Result<(bool, f64)> {
    let answer = emb.embed(&pair.answer)?;
    let vs_question = || -> Result<f64> {
        cosine_similarity(&answer, &emb.embed(&pair.question)?)
    };
    let vs_context = || -> Result<f64> {
        cosine_similarity(&answer, &emb.embed(&context.body)?)
    };
    let similarity = match cfg.relatedness_basis {
        RelatednessBasis::AnswerVsQuestion => vs_question()?,
        RelatednessBasis::AnswerVsContext => vs_context()?,
        RelatednessBasis::AnswerVsQuestionAndContext => vs_question()?.min(vs_context()?),
    };
    Ok((similarity < cfg.relatedness_threshold, similarity))
}

/// One audit line per check evaluated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RemovalEntry {
    pub pair_id: String,
    pub check: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub similarity: Option<f64>,
    pub decision: &'static str,
}

/// Per-check counters; conservation means every raw pair ends up accepted or
/// removed by exactly one check.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RemovalCounters {
    pub raw: usize,
    pub accepted: usize,
    pub removed_unanswered: usize,
    pub removed_unrelated: usize,
    pub marked_unfinished: usize,
}

impl RemovalCounters {
    pub fn conserved(&self) -> bool {
        self.accepted + self.removed_unanswered + self.removed_unrelated == self.raw
    }
}

/// Audit trail of one postprocess run.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RemovalLog {
    pub entries: Vec<RemovalEntry>,
    pub counters: RemovalCounters,
}

impl RemovalLog {
    /// Write entries as JSONL.
    pub fn write(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut writer = BufWriter::new(file);
        for entry in &self.entries {
            let line =
                serde_json::to_string(entry).map_err(|e| Error::InvalidConfig(e.to_string()))?;
            writeln!(writer, "{line}").map_err(|e| Error::io(path, e))?;
        }
        writer.flush().map_err(|e| Error::io(path, e))
    }
}

/// Everything a postprocess run produces: the accepted pairs (removed pairs
/// are dropped from the dataset) and the audit log.
#[derive(Debug, Clone)]
pub struct PostprocessOutcome {
    pub accepted: Vec<QAPair>,
    pub log: RemovalLog,
}

enum PairVerdict {
    Accepted(QAPair),
    Removed(QAStatus),
}

fn process_pair(
    pair: &QAPair,
    context: &Document,
    emb: &dyn EmbeddingProvider,
    classifier: Option<&dyn SentenceClassifier>,
    cfg: &FilterConfig,
) -> Result<(PairVerdict, Vec<RemovalEntry>)> {
    let mut entries = Vec::new();
    // Re-running on already-marked output must not stack markers, so checks
    // operate on the unmarked answer.
    let base_answer = pair
        .answer
        .strip_suffix(MARKER_SUFFIX)
        .unwrap_or(&pair.answer)
        .to_string();

    let (is_unanswered, sentinel_sim) = if base_answer.trim().is_empty() {
        // An empty answer answers nothing; treat it like a refusal.
        (true, 1.0)
    } else {
        check_unanswered(&base_answer, emb, cfg)?
    };
    entries.push(RemovalEntry {
        pair_id: pair.id.clone(),
        check: "unanswered",
        similarity: Some(sentinel_sim),
        decision: if is_unanswered { "removed" } else { "kept" },
    });
    if is_unanswered {
        return Ok((PairVerdict::Removed(QAStatus::RemovedUnanswered), entries));
    }

    let mut checked = pair.clone();
    checked.answer = base_answer.clone();
    let (is_unrelated, relatedness_sim) = check_unrelated(&checked, context, emb, cfg)?;
    entries.push(RemovalEntry {
        pair_id: pair.id.clone(),
        check: "unrelated",
        similarity: Some(relatedness_sim),
        decision: if is_unrelated { "removed" } else { "kept" },
    });
    if is_unrelated {
        return Ok((PairVerdict::Removed(QAStatus::RemovedUnrelated), entries));
    }

    let unfinished = check_unfinished(&base_answer, classifier);
    entries.push(RemovalEntry {
        pair_id: pair.id.clone(),
        check: "unfinished",
        similarity: None,
        decision: if unfinished { "marked" } else { "kept" },
    });

    let mut accepted = pair.clone();
    accepted.status = QAStatus::Accepted;
    accepted.sentinel_similarity = Some(sentinel_sim);
    accepted.relatedness_similarity = Some(relatedness_sim);
    accepted.unfinished = unfinished;
    accepted.answer = if unfinished {
        format!("{base_answer}{MARKER_SUFFIX}")
    } else {
        base_answer
    };
    Ok((PairVerdict::Accepted(accepted), entries))
}

/// Run the three checks over `raw` in order: unanswered removal, unrelated
/// removal, unfinished marking. Removed pairs never reach later checks.
///
/// Output order follows input order; the run is idempotent for a fixed
/// config and embedding provider.
pub fn run_postprocess(
    raw: &[QAPair],
    corpus: &Corpus,
    emb: &dyn EmbeddingProvider,
    classifier: Option<&dyn SentenceClassifier>,
    cfg: &FilterConfig,
) -> Result<PostprocessOutcome> {
    cfg.validate()?;
    let mut contexts: HashMap<&str, &Document> = HashMap::new();
    for pair in raw {
        let doc = corpus
            .get(&pair.context_id)
            .ok_or_else(|| Error::UnknownContext {
                pair_id: pair.id.clone(),
                context_id: pair.context_id.clone(),
            })?;
        contexts.insert(pair.context_id.as_str(), doc);
    }

    let outcomes: Vec<(PairVerdict, Vec<RemovalEntry>)> = raw
        .par_iter()
        .map(|pair| process_pair(pair, contexts[pair.context_id.as_str()], emb, classifier, cfg))
        .collect::<Result<_>>()?;

    let mut accepted = Vec::new();
    let mut log = RemovalLog::default();
    log.counters.raw = raw.len();
    for (verdict, entries) in outcomes {
        log.entries.extend(entries);
        match verdict {
            PairVerdict::Accepted(pair) => {
                log.counters.accepted += 1;
                if pair.unfinished {
                    log.counters.marked_unfinished += 1;
                }
                accepted.push(pair);
            }
            PairVerdict::Removed(QAStatus::RemovedUnanswered) => {
                log.counters.removed_unanswered += 1;
            }
            PairVerdict::Removed(QAStatus::RemovedUnrelated) => {
                log.counters.removed_unrelated += 1;
            }
            PairVerdict::Removed(_) => unreachable!("removal uses removed statuses only"),
        }
    }
    debug_assert!(log.counters.conserved());
    Ok(PostprocessOutcome { accepted, log })
}
