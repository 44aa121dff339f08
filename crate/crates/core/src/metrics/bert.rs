//! BERTScore: greedy maximum-cosine matching between candidate and reference
//! token embeddings. No idf weighting, no baseline rescaling.

use crate::embedding::{cosine_similarity, EmbeddingProvider};
use crate::error::{Error, Result};
use crate::metrics::rouge::PrfScore;
use crate::metrics::tokenize::tokenize;

/// Score `pred` against `gold` with token embeddings from `emb`.
///
/// Precision averages, over candidate tokens, each token's best cosine
/// against any reference token; recall mirrors that over reference tokens;
/// F1 is their harmonic mean.
pub fn bert_score(pred: &str, gold: &str, emb: &dyn EmbeddingProvider) -> Result<PrfScore> {
    let pred_tokens = tokenize(pred);
    let gold_tokens = tokenize(gold);
    if pred_tokens.is_empty() || gold_tokens.is_empty() {
        return Err(Error::EmptyInput);
    }
    let pred_vectors = emb.embed_tokens(&pred_tokens)?;
    let gold_vectors = emb.embed_tokens(&gold_tokens)?;

    let mut similarity = vec![vec![0.0f64; gold_vectors.len()]; pred_vectors.len()];
    for (i, c) in pred_vectors.iter().enumerate() {
        for (j, r) in gold_vectors.iter().enumerate() {
            similarity[i][j] = cosine_similarity(c, r)?;
        }
    }

    let row_max = |row: &[f64]| row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let precision = similarity.iter().map(|row| row_max(row)).sum::<f64>()
        / pred_vectors.len() as f64;
    let recall = (0..gold_vectors.len())
        .map(|j| row_max(&similarity.iter().map(|row| row[j]).collect::<Vec<_>>()))
        .sum::<f64>()
        / gold_vectors.len() as f64;
    Ok(PrfScore::from_pr(precision, recall))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::MockEmbedding;

    fn approx(a: f64, b: f64, eps: f64) {
        assert!((a - b).abs() < eps, "{a} !~ {b}");
    }

    #[test]
    fn identity_scores_one() {
        let emb = MockEmbedding::new(5);
        let s = bert_score("the cat sat.", "the cat sat.", &emb).unwrap();
        approx(s.precision, 1.0, 1e-9);
        approx(s.recall, 1.0, 1e-9);
        approx(s.f1, 1.0, 1e-9);
    }

    #[test]
    fn single_token_pair_reports_the_pinned_cosine() {
        let emb = MockEmbedding::new(5);
        emb.force_similarity("gold", "pred", 0.5).unwrap();
        let s = bert_score("pred", "gold", &emb).unwrap();
        approx(s.precision, 0.5, 1e-9);
        approx(s.recall, 0.5, 1e-9);
        approx(s.f1, 0.5, 1e-9);
    }

    #[test]
    fn precision_averages_per_token_maxima() {
        let emb = MockEmbedding::new(5);
        // Two candidate tokens, each pinned against a distinct reference
        // token; cross similarities land far below the pinned ones.
        emb.force_similarity("left", "aa", 0.4).unwrap();
        emb.force_similarity("right", "bb", 0.8).unwrap();
        let s = bert_score("aa bb", "left right", &emb).unwrap();
        let cross_aa = cosine_similarity(
            &emb.embed("aa").unwrap(),
            &emb.embed("right").unwrap(),
        )
        .unwrap();
        let cross_bb = cosine_similarity(
            &emb.embed("bb").unwrap(),
            &emb.embed("left").unwrap(),
        )
        .unwrap();
        assert!(cross_aa < 0.4 && cross_bb < 0.8, "fixture assumption broke");
        approx(s.precision, 0.6, 1e-9);
    }

    #[test]
    fn extra_tokens_lower_precision_only() {
        let emb = MockEmbedding::new(5);
        let tight = bert_score("alpha beta", "alpha beta", &emb).unwrap();
        let padded = bert_score("alpha beta gamma", "alpha beta", &emb).unwrap();
        assert!(padded.precision < tight.precision);
        approx(padded.recall, 1.0, 1e-9);
    }

    #[test]
    fn empty_sides_are_rejected() {
        let emb = MockEmbedding::new(5);
        assert!(matches!(bert_score("", "x", &emb), Err(Error::EmptyInput)));
        assert!(matches!(bert_score("x", "", &emb), Err(Error::EmptyInput)));
    }

    #[test]
    fn deterministic_for_a_fixed_provider() {
        let emb = MockEmbedding::new(5);
        let a = bert_score("some answer text", "a reference text", &emb).unwrap();
        let b = bert_score("some answer text", "a reference text", &emb).unwrap();
        assert_eq!(a, b);
    }
}
