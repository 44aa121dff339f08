//! Synthetic QA dataset toolkit: corpus ingestion, two-stage question/answer
//! generation against an LLM provider, similarity-based filtering, dataset
//! bookkeeping, and reference-based evaluation metrics.

pub mod corpus;
pub mod dataset;
pub mod embedding;
pub mod error;
pub mod generation;
pub mod llm;
pub mod metrics;
pub mod postprocess;
pub mod prompting;
pub mod transport;

pub use corpus::{load_corpus, validate_corpus, Corpus, Document};
pub use dataset::{
    compute_stats, export_finetune, read_dataset, split_by_id_lists, split_by_ratio,
    write_dataset, DatasetStats, ExportRecord, ExportSummary, FinetuneExportConfig, IdListSplit,
    QAPair, QAStatus, Split,
};
pub use embedding::{cosine_similarity, EmbeddingProvider, EmbeddingVector, MockEmbedding};
pub use error::{Error, ProviderErrorKind, Result};
pub use generation::{generate_dataset, GenerationConfig, GenerationOutcome};
pub use llm::{Completion, CompletionRequest, LlmProvider, MockLlm};
pub use metrics::{evaluate, MetricReport};
pub use postprocess::{
    run_postprocess, FilterConfig, PostprocessOutcome, RelatednessBasis, RemovalLog,
    SentenceClassifier,
};
