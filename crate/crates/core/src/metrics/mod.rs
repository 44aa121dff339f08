//! Reference-based evaluation: exact match, BLEU, ROUGE, BERTScore, and
//! perplexity, plus aggregation over prediction/reference files.

mod bert;
mod bleu;
mod files;
mod rouge;
mod tokenize;

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::embedding::EmbeddingProvider;
use crate::error::{Error, Result};

pub use bert::bert_score;
pub use bleu::{bleu, bleu_tokens, corpus_bleu, DEFAULT_MAX_N};
pub use files::{read_logprob_records, read_text_records};
pub use rouge::{rouge_l, rouge_l_tokens, rouge_n, PrfScore, RougeVariant};
pub use tokenize::tokenize;

/// Render a value with exactly three decimals, rounding halves up.
pub fn display_3dp(value: f64) -> String {
    if !value.is_finite() {
        return format!("{value}");
    }
    let negative = value < 0.0;
    let scaled = (value.abs() * 1000.0 + 0.5).floor();
    if scaled >= 1e18 {
        return format!("{value:.3}");
    }
    let scaled = scaled as u64;
    format!(
        "{}{}.{:03}",
        if negative { "-" } else { "" },
        scaled / 1000,
        scaled % 1000
    )
}

fn normalize_for_em(text: &str) -> String {
    text.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Exact match after trimming, case-folding, and collapsing whitespace runs.
/// Punctuation is retained.
pub fn exact_match(pred: &str, gold: &str) -> bool {
    normalize_for_em(pred) == normalize_for_em(gold)
}

/// Perplexity of a token log-probability sequence: `exp(-mean(logprobs))`.
///
/// The list must be non-empty and every value must be a finite non-positive
/// number.
pub fn perplexity(token_logprobs: &[f64]) -> Result<f64> {
    if token_logprobs.is_empty() {
        return Err(Error::EmptyInput);
    }
    for &lp in token_logprobs {
        if !lp.is_finite() || lp > 0.0 {
            return Err(Error::PositiveLogprob(lp));
        }
    }
    let mean = token_logprobs.iter().sum::<f64>() / token_logprobs.len() as f64;
    Ok((-mean).exp())
}

/// One aligned prediction/reference pair for evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    pub id: String,
    pub prediction: String,
    pub reference: String,
    pub logprobs: Option<Vec<f64>>,
}

/// Report-level switches.
#[derive(Debug, Clone, Copy, Default)]
pub struct EvalOptions {
    pub rouge_variant: RougeVariant,
    /// Aggregate BLEU by pooling n-gram counts over the corpus instead of
    /// averaging sentence scores.
    pub corpus_bleu: bool,
}

/// Per-example metric values.
#[derive(Debug, Clone, Serialize)]
pub struct ExampleMetrics {
    pub id: String,
    pub em: f64,
    pub bleu: f64,
    pub rouge_p: f64,
    pub rouge_r: f64,
    pub rouge_f: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bert_p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bert_r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bert_f1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perplexity: Option<f64>,
}

/// Aggregated evaluation results; aggregates are arithmetic means of the
/// per-example values, except perplexity, which pools tokens, and BLEU under
/// the corpus flag.
#[derive(Debug, Clone, Serialize)]
pub struct MetricReport {
    pub n_examples: usize,
    pub em: f64,
    pub bleu: f64,
    pub rouge_p: f64,
    pub rouge_r: f64,
    pub rouge_f: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bert_p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bert_r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bert_f1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perplexity: Option<f64>,
    pub per_example: Vec<ExampleMetrics>,
}

impl MetricReport {
    /// Human-readable table mirroring the usual EM / P / R / F1 / BLEU /
    /// ROUGE column layout; absent metrics show a dash.
    pub fn render_table(&self) -> String {
        let cell = |v: Option<f64>| match v {
            Some(v) => display_3dp(v),
            None => "-".to_string(),
        };
        let header = format!(
            "{:>8} {:>10} {:>8} {:>8} {:>8} {:>8} {:>10}",
            "EM", "Precision", "Recall", "F1", "BLEU", "ROUGE", "PPL"
        );
        let row = format!(
            "{:>8} {:>10} {:>8} {:>8} {:>8} {:>8} {:>10}",
            display_3dp(self.em),
            cell(self.bert_p),
            cell(self.bert_r),
            cell(self.bert_f1),
            display_3dp(self.bleu),
            display_3dp(self.rouge_f),
            cell(self.perplexity),
        );
        format!("examples: {}\n{header}\n{row}", self.n_examples)
    }
}

fn score_example(
    record: &EvalRecord,
    emb: Option<&dyn EmbeddingProvider>,
    options: &EvalOptions,
) -> Result<ExampleMetrics> {
    let pred_empty = tokenize(&record.prediction).is_empty();
    if tokenize(&record.reference).is_empty() {
        return Err(Error::IdMismatch(format!(
            "record {} has an empty reference",
            record.id
        )));
    }

    let (bleu_score, rouge_score, bert) = if pred_empty {
        // A degenerate prediction scores zero rather than poisoning the run.
        let bert = emb.map(|_| PrfScore::ZERO);
        (0.0, PrfScore::ZERO, bert)
    } else {
        let bleu_score = bleu(&record.prediction, &record.reference)?;
        let rouge_score = options
            .rouge_variant
            .score(&record.prediction, &record.reference)?;
        let bert = match emb {
            Some(emb) => Some(bert_score(&record.prediction, &record.reference, emb)?),
            None => None,
        };
        (bleu_score, rouge_score, bert)
    };

    let ppl = match &record.logprobs {
        Some(lps) => Some(perplexity(lps)?),
        None => None,
    };

    Ok(ExampleMetrics {
        id: record.id.clone(),
        em: if exact_match(&record.prediction, &record.reference) {
            1.0
        } else {
            0.0
        },
        bleu: bleu_score,
        rouge_p: rouge_score.precision,
        rouge_r: rouge_score.recall,
        rouge_f: rouge_score.f1,
        bert_p: bert.map(|s| s.precision),
        bert_r: bert.map(|s| s.recall),
        bert_f1: bert.map(|s| s.f1),
        perplexity: ppl,
    })
}

fn mean(values: impl Iterator<Item = f64>, n: usize) -> f64 {
    values.sum::<f64>() / n as f64
}

/// Evaluate aligned records. Records are processed in lexicographic id order
/// so aggregates never depend on input order.
pub fn evaluate_records(
    records: &[EvalRecord],
    emb: Option<&dyn EmbeddingProvider>,
    options: &EvalOptions,
) -> Result<MetricReport> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut ordered: Vec<&EvalRecord> = records.iter().collect();
    ordered.sort_by(|a, b| a.id.cmp(&b.id));

    let per_example: Vec<ExampleMetrics> = ordered
        .iter()
        .map(|r| score_example(r, emb, options))
        .collect::<Result<_>>()?;

    let n = per_example.len();
    let bleu_aggregate = if options.corpus_bleu {
        let pairs: Vec<(String, String)> = ordered
            .iter()
            .map(|r| (r.prediction.clone(), r.reference.clone()))
            .collect();
        corpus_bleu(&pairs)?
    } else {
        mean(per_example.iter().map(|e| e.bleu), n)
    };

    let with_bert = emb.is_some();
    let all_logprobs: Vec<f64> = ordered
        .iter()
        .filter_map(|r| r.logprobs.as_deref())
        .flatten()
        .copied()
        .collect();
    let pooled_ppl = if all_logprobs.is_empty() {
        None
    } else {
        Some(perplexity(&all_logprobs)?)
    };

    Ok(MetricReport {
        n_examples: n,
        em: mean(per_example.iter().map(|e| e.em), n),
        bleu: bleu_aggregate,
        rouge_p: mean(per_example.iter().map(|e| e.rouge_p), n),
        rouge_r: mean(per_example.iter().map(|e| e.rouge_r), n),
        rouge_f: mean(per_example.iter().map(|e| e.rouge_f), n),
        bert_p: with_bert.then(|| mean(per_example.iter().filter_map(|e| e.bert_p), n)),
        bert_r: with_bert.then(|| mean(per_example.iter().filter_map(|e| e.bert_r), n)),
        bert_f1: with_bert.then(|| mean(per_example.iter().filter_map(|e| e.bert_f1), n)),
        perplexity: pooled_ppl,
        per_example,
    })
}

fn alignment_error(
    only_pred: Vec<&String>,
    only_gold: Vec<&String>,
) -> Error {
    let list = |ids: &[&String]| {
        ids.iter()
            .take(10)
            .map(|s| s.as_str())
            .collect::<Vec<_>>()
            .join(", ")
    };
    let mut parts = Vec::new();
    if !only_pred.is_empty() {
        parts.push(format!(
            "{} id(s) only in predictions [{}]",
            only_pred.len(),
            list(&only_pred)
        ));
    }
    if !only_gold.is_empty() {
        parts.push(format!(
            "{} id(s) only in references [{}]",
            only_gold.len(),
            list(&only_gold)
        ));
    }
    Error::IdMismatch(parts.join("; "))
}

/// Evaluate prediction and reference files (JSONL `{id, text}`), with an
/// optional `{id, logprobs}` file enabling perplexity.
///
/// The id sets must match exactly; mismatches list the first ten offenders
/// from each side.
pub fn evaluate(
    pred_path: &Path,
    gold_path: &Path,
    emb: Option<&dyn EmbeddingProvider>,
    logprob_path: Option<&Path>,
    options: &EvalOptions,
) -> Result<MetricReport> {
    let preds: BTreeMap<String, String> = read_text_records(pred_path)?.into_iter().collect();
    let golds: BTreeMap<String, String> = read_text_records(gold_path)?.into_iter().collect();

    let only_pred: Vec<&String> = preds.keys().filter(|id| !golds.contains_key(*id)).collect();
    let only_gold: Vec<&String> = golds.keys().filter(|id| !preds.contains_key(*id)).collect();
    if !only_pred.is_empty() || !only_gold.is_empty() {
        return Err(alignment_error(only_pred, only_gold));
    }
    if preds.is_empty() {
        return Err(Error::EmptyInput);
    }

    let mut logprobs: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    if let Some(path) = logprob_path {
        logprobs = read_logprob_records(path)?.into_iter().collect();
        let only_lp: Vec<&String> = logprobs
            .keys()
            .filter(|id| !preds.contains_key(*id))
            .collect();
        let missing_lp: Vec<&String> = preds
            .keys()
            .filter(|id| !logprobs.contains_key(*id))
            .collect();
        if !only_lp.is_empty() || !missing_lp.is_empty() {
            return Err(alignment_error(only_lp, missing_lp));
        }
    }

    let records: Vec<EvalRecord> = preds
        .into_iter()
        .map(|(id, prediction)| {
            let reference = golds[&id].clone();
            let lps = logprobs.remove(&id);
            EvalRecord {
                id,
                prediction,
                reference,
                logprobs: lps,
            }
        })
        .collect();
    evaluate_records(&records, emb, options)
}
