//! Dataset persistence, Table-style statistics, context-level splits, and
//! fine-tuning export.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::metrics::display_3dp;
use crate::prompting::{
    build_k_shot_prompt, render_finetune_record, render_finetune_record_without_document,
    ShotExample,
};

/// Filter outcome attached to each pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QAStatus {
    Raw,
    Accepted,
    RemovedUnanswered,
    RemovedUnrelated,
}

impl QAStatus {
    pub fn is_removed(self) -> bool {
        matches!(self, QAStatus::RemovedUnanswered | QAStatus::RemovedUnrelated)
    }
}

/// One generated question/answer bound to its context document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QAPair {
    pub id: String,
    pub context_id: String,
    pub question: String,
    pub answer: String,
    pub status: QAStatus,
    #[serde(default)]
    pub unfinished: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentinel_similarity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relatedness_similarity: Option<f64>,
    #[serde(default)]
    pub generator_model: String,
    /// Fields this toolkit does not know about survive a read/write cycle.
    #[serde(flatten)]
    pub extra: serde_json::Map<String, serde_json::Value>,
}

impl QAPair {
    pub fn new(
        id: impl Into<String>,
        context_id: impl Into<String>,
        question: impl Into<String>,
        answer: impl Into<String>,
        generator_model: impl Into<String>,
    ) -> Self {
        QAPair {
            id: id.into(),
            context_id: context_id.into(),
            question: question.into(),
            answer: answer.into(),
            status: QAStatus::Raw,
            unfinished: false,
            sentinel_similarity: None,
            relatedness_similarity: None,
            generator_model: generator_model.into(),
            extra: serde_json::Map::new(),
        }
    }
}

/// Read a line-delimited dataset file, rejecting duplicate pair ids.
pub fn read_dataset(path: &Path) -> Result<Vec<QAPair>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut pairs = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let pair: QAPair = serde_json::from_str(&line).map_err(|e| Error::MalformedRecord {
            path: path.to_path_buf(),
            line: idx + 1,
            message: e.to_string(),
        })?;
        if !seen.insert(pair.id.clone()) {
            return Err(Error::DuplicateId {
                path: path.to_path_buf(),
                line: idx + 1,
                id: pair.id,
            });
        }
        pairs.push(pair);
    }
    Ok(pairs)
}

/// Write pairs as one JSON object per line.
pub fn write_dataset(path: &Path, pairs: &[QAPair]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = BufWriter::new(file);
    for pair in pairs {
        let line = serde_json::to_string(pair).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        writeln!(writer, "{line}").map_err(|e| Error::io(path, e))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

/// Counts for one slice of the dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubsetStats {
    /// Distinct context ids holding at least one pair in the subset.
    pub n_contexts: usize,
    /// `total_qa / n_contexts`; zero for an empty subset.
    pub avg_qa_per_context: f64,
    pub total_qa: usize,
}

impl SubsetStats {
    fn over(context_ids: impl Iterator<Item = String>) -> Self {
        let mut contexts = HashSet::new();
        let mut total = 0usize;
        for id in context_ids {
            contexts.insert(id);
            total += 1;
        }
        let n = contexts.len();
        SubsetStats {
            n_contexts: n,
            avg_qa_per_context: if n == 0 { 0.0 } else { total as f64 / n as f64 },
            total_qa: total,
        }
    }

    /// The average with the table's three-decimal half-up display.
    pub fn avg_display(&self) -> String {
        display_3dp(self.avg_qa_per_context)
    }
}

/// Table-1-shaped statistics: the whole dataset and its unfinished slice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DatasetStats {
    pub all: SubsetStats,
    pub unfinished: SubsetStats,
}

impl DatasetStats {
    /// Two-row table: All QA / Unfinished QA over contexts, average, total.
    pub fn render_table(&self) -> String {
        let row = |label: &str, s: &SubsetStats| {
            format!(
                "{label:<14} {:>10} {:>18} {:>10}",
                s.n_contexts,
                s.avg_display(),
                s.total_qa
            )
        };
        format!(
            "{:<14} {:>10} {:>18} {:>10}\n{}\n{}",
            "",
            "contexts",
            "avg QAs/context",
            "total QAs",
            row("All QA", &self.all),
            row("Unfinished QA", &self.unfinished),
        )
    }
}

/// Compute statistics over the dataset's kept pairs; removed pairs do not
/// count toward either subset.
pub fn compute_stats(pairs: &[QAPair]) -> DatasetStats {
    let kept = || pairs.iter().filter(|p| !p.status.is_removed());
    DatasetStats {
        all: SubsetStats::over(kept().map(|p| p.context_id.clone())),
        unfinished: SubsetStats::over(
            kept()
                .filter(|p| p.unfinished)
                .map(|p| p.context_id.clone()),
        ),
    }
}

/// One named output of a split operation.
#[derive(Debug, Clone)]
pub struct Split {
    pub name: String,
    pub pairs: Vec<QAPair>,
}

fn contexts_in_first_appearance_order(pairs: &[QAPair]) -> Vec<String> {
    let mut seen = HashSet::new();
    let mut ordered = Vec::new();
    for pair in pairs {
        if seen.insert(pair.context_id.as_str()) {
            ordered.push(pair.context_id.clone());
        }
    }
    ordered
}

fn partition_by_context(pairs: &[QAPair], assignment: &HashMap<String, usize>, n_splits: usize) -> Vec<Vec<QAPair>> {
    let mut buckets: Vec<Vec<QAPair>> = (0..n_splits).map(|_| Vec::new()).collect();
    for pair in pairs {
        let idx = assignment[&pair.context_id];
        buckets[idx].push(pair.clone());
    }
    buckets
}

/// Split by context id using named fractions, e.g. `[("train", 0.8), ("dev", 0.2)]`.
///
/// Contexts are taken in first-appearance order and cut at the cumulative
/// boundaries `round(cum_fraction * n_contexts)`, so the same input always
/// yields the same split. Pairs never straddle splits because assignment is
/// by context.
pub fn split_by_ratio(pairs: &[QAPair], ratios: &[(String, f64)]) -> Result<Vec<Split>> {
    if ratios.is_empty() {
        return Err(Error::InvalidSplit("no split ratios given".into()));
    }
    let mut names = HashSet::new();
    let mut sum = 0.0;
    for (name, ratio) in ratios {
        if name.is_empty() || !names.insert(name.as_str()) {
            return Err(Error::InvalidSplit(format!("split name {name:?} is empty or repeated")));
        }
        if !ratio.is_finite() || *ratio <= 0.0 {
            return Err(Error::InvalidSplit(format!("ratio for {name:?} must be positive, got {ratio}")));
        }
        sum += ratio;
    }
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidSplit(format!("ratios sum to {sum}, expected 1")));
    }

    let contexts = contexts_in_first_appearance_order(pairs);
    let n = contexts.len();
    let mut assignment = HashMap::new();
    let mut cumulative = 0.0;
    let mut start = 0usize;
    for (idx, (_, ratio)) in ratios.iter().enumerate() {
        cumulative += ratio;
        let end = if idx + 1 == ratios.len() {
            n
        } else {
            (((cumulative * n as f64) + 0.5).floor() as usize).min(n)
        };
        for context in &contexts[start..end] {
            assignment.insert(context.clone(), idx);
        }
        start = end;
    }

    let buckets = partition_by_context(pairs, &assignment, ratios.len());
    Ok(ratios
        .iter()
        .zip(buckets)
        .map(|((name, _), pairs)| Split {
            name: name.clone(),
            pairs,
        })
        .collect())
}

/// Result of an id-list split: the named splits plus any context ids that no
/// list claimed (they land in `train`, or the first list when none is named
/// `train`; callers should surface them as a warning).
#[derive(Debug, Clone)]
pub struct IdListSplit {
    pub splits: Vec<Split>,
    pub unlisted_contexts: Vec<String>,
}

/// Split by explicit per-split context id lists. Lists must be disjoint.
pub fn split_by_id_lists(pairs: &[QAPair], lists: &[(String, Vec<String>)]) -> Result<IdListSplit> {
    if lists.is_empty() {
        return Err(Error::InvalidSplit("no id lists given".into()));
    }
    let mut assignment: HashMap<String, usize> = HashMap::new();
    let mut names = HashSet::new();
    for (idx, (name, ids)) in lists.iter().enumerate() {
        if name.is_empty() || !names.insert(name.as_str()) {
            return Err(Error::InvalidSplit(format!("split name {name:?} is empty or repeated")));
        }
        for id in ids {
            if let Some(&other) = assignment.get(id) {
                if other != idx {
                    return Err(Error::InvalidSplit(format!(
                        "context {id:?} appears in both {:?} and {name:?}",
                        lists[other].0
                    )));
                }
            }
            assignment.insert(id.clone(), idx);
        }
    }

    let fallback = lists
        .iter()
        .position(|(name, _)| name == "train")
        .unwrap_or(0);
    let mut unlisted = Vec::new();
    for context in contexts_in_first_appearance_order(pairs) {
        if !assignment.contains_key(&context) {
            assignment.insert(context.clone(), fallback);
            unlisted.push(context);
        }
    }

    let buckets = partition_by_context(pairs, &assignment, lists.len());
    Ok(IdListSplit {
        splits: lists
            .iter()
            .zip(buckets)
            .map(|((name, _), pairs)| Split {
                name: name.clone(),
                pairs,
            })
            .collect(),
        unlisted_contexts: unlisted,
    })
}

/// Export settings plus the fine-tuning hyperparameters that are written to
/// the sidecar. The hyperparameters are metadata only; nothing here trains a
/// model.
#[derive(Debug, Clone, PartialEq)]
pub struct FinetuneExportConfig {
    pub shots: usize,
    pub include_context: bool,
    pub drop_unfinished: bool,
    pub lora_rank: u32,
    pub lora_alpha: u32,
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub quantization_bits: u8,
    pub optimizer: String,
}

impl Default for FinetuneExportConfig {
    fn default() -> Self {
        FinetuneExportConfig {
            shots: 0,
            include_context: true,
            drop_unfinished: false,
            lora_rank: 8,
            lora_alpha: 16,
            learning_rate: 5e-5,
            weight_decay: 0.01,
            quantization_bits: 4,
            optimizer: "8-bit AdamW".into(),
        }
    }
}

impl FinetuneExportConfig {
    pub fn validate(&self) -> Result<()> {
        if ![0, 1, 5].contains(&self.shots) {
            return Err(Error::UnsupportedShotCount(self.shots));
        }
        Ok(())
    }

    fn sidecar_body(&self, records: usize) -> String {
        format!(
            "lora_rank={}\nlora_alpha={}\nlearning_rate={}\nweight_decay={}\nquantization_bits={}\noptimizer={}\nshots={}\ninclude_context={}\ndrop_unfinished={}\nrecords={}\n",
            self.lora_rank,
            self.lora_alpha,
            self.learning_rate,
            self.weight_decay,
            self.quantization_bits,
            self.optimizer,
            self.shots,
            self.include_context,
            self.drop_unfinished,
            records,
        )
    }
}

/// One line of the export file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportRecord {
    pub id: String,
    pub prompt: String,
    pub answer: String,
}

#[derive(Debug, Clone)]
pub struct ExportSummary {
    pub records_written: usize,
    pub output_path: PathBuf,
    pub sidecar_path: PathBuf,
}

/// Write fine-tuning records for every kept pair.
///
/// Removed pairs are skipped; `drop_unfinished` also skips marked pairs. The
/// k-shot exemplar pool is the first `shots` exported records, reused for
/// every target. The hyperparameter sidecar lands next to the output as
/// `<output>.hyperparams`.
pub fn export_finetune(
    pairs: &[QAPair],
    corpus: &Corpus,
    cfg: &FinetuneExportConfig,
    path: &Path,
) -> Result<ExportSummary> {
    cfg.validate()?;
    let eligible: Vec<&QAPair> = pairs
        .iter()
        .filter(|p| !p.status.is_removed() && !(cfg.drop_unfinished && p.unfinished))
        .collect();
    if eligible.len() < cfg.shots {
        return Err(Error::InsufficientExemplars {
            shots: cfg.shots,
            available: eligible.len(),
        });
    }

    let mut documents = Vec::with_capacity(eligible.len());
    for pair in &eligible {
        if cfg.include_context {
            let doc = corpus
                .get(&pair.context_id)
                .ok_or_else(|| Error::UnknownContext {
                    pair_id: pair.id.clone(),
                    context_id: pair.context_id.clone(),
                })?;
            documents.push(Some(doc.body.clone()));
        } else {
            documents.push(None);
        }
    }

    let pool: Vec<ShotExample> = eligible
        .iter()
        .zip(&documents)
        .take(cfg.shots)
        .map(|(pair, document)| ShotExample {
            question: pair.question.clone(),
            document: document.clone(),
            answer: pair.answer.clone(),
        })
        .collect();

    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = BufWriter::new(file);
    for (pair, document) in eligible.iter().zip(&documents) {
        let target = match document {
            Some(body) => render_finetune_record(
                &pair.question,
                &crate::corpus::Document {
                    id: pair.context_id.clone(),
                    title: None,
                    body: body.clone(),
                },
            )?,
            None => render_finetune_record_without_document(&pair.question)?,
        };
        let record = ExportRecord {
            id: pair.id.clone(),
            prompt: build_k_shot_prompt(&pool, &target)?,
            answer: pair.answer.clone(),
        };
        let line = serde_json::to_string(&record).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        writeln!(writer, "{line}").map_err(|e| Error::io(path, e))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))?;

    let sidecar_path = PathBuf::from(format!("{}.hyperparams", path.display()));
    std::fs::write(&sidecar_path, cfg.sidecar_body(eligible.len()))
        .map_err(|e| Error::io(&sidecar_path, e))?;

    Ok(ExportSummary {
        records_written: eligible.len(),
        output_path: path.to_path_buf(),
        sidecar_path,
    })
}
