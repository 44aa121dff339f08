//! ROUGE-L (longest common subsequence) and ROUGE-N n-gram overlap.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::tokenize::tokenize;

/// Precision/recall/F1 triple shared by ROUGE and BERTScore.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrfScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl PrfScore {
    pub fn from_pr(precision: f64, recall: f64) -> Self {
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        PrfScore {
            precision,
            recall,
            f1,
        }
    }

    pub const ZERO: PrfScore = PrfScore {
        precision: 0.0,
        recall: 0.0,
        f1: 0.0,
    };
}

/// Which ROUGE statistic feeds the report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RougeVariant {
    #[default]
    RougeL,
    Rouge1,
    Rouge2,
}

impl RougeVariant {
    pub fn parse(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "l" | "rouge-l" | "rougel" => Ok(RougeVariant::RougeL),
            "1" | "rouge-1" | "rouge1" => Ok(RougeVariant::Rouge1),
            "2" | "rouge-2" | "rouge2" => Ok(RougeVariant::Rouge2),
            other => Err(Error::InvalidConfig(format!(
                "unknown rouge variant {other:?}; expected l, 1, or 2"
            ))),
        }
    }

    pub fn score(self, pred: &str, gold: &str) -> Result<PrfScore> {
        match self {
            RougeVariant::RougeL => rouge_l(pred, gold),
            RougeVariant::Rouge1 => rouge_n(pred, gold, 1),
            RougeVariant::Rouge2 => rouge_n(pred, gold, 2),
        }
    }
}

/// Length of the longest common subsequence, by dynamic programming over a
/// rolling row.
fn lcs_len(a: &[String], b: &[String]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut prev = vec![0usize; b.len() + 1];
    let mut current = vec![0usize; b.len() + 1];
    for token_a in a {
        for (j, token_b) in b.iter().enumerate() {
            current[j + 1] = if token_a == token_b {
                prev[j] + 1
            } else {
                prev[j + 1].max(current[j])
            };
        }
        std::mem::swap(&mut prev, &mut current);
    }
    prev[b.len()]
}

/// ROUGE-L over token slices.
pub fn rouge_l_tokens(pred: &[String], gold: &[String]) -> Result<PrfScore> {
    if pred.is_empty() || gold.is_empty() {
        return Err(Error::EmptyInput);
    }
    let lcs = lcs_len(pred, gold) as f64;
    Ok(PrfScore::from_pr(
        lcs / pred.len() as f64,
        lcs / gold.len() as f64,
    ))
}

/// ROUGE-L over raw strings.
pub fn rouge_l(pred: &str, gold: &str) -> Result<PrfScore> {
    rouge_l_tokens(&tokenize(pred), &tokenize(gold))
}

/// ROUGE-N: clipped n-gram overlap as precision against the prediction's
/// n-grams and recall against the reference's.
pub fn rouge_n(pred: &str, gold: &str, n: usize) -> Result<PrfScore> {
    if n == 0 {
        return Err(Error::InvalidConfig("rouge n must be at least 1".into()));
    }
    let pred = tokenize(pred);
    let gold = tokenize(gold);
    if pred.is_empty() || gold.is_empty() {
        return Err(Error::EmptyInput);
    }
    let grams = |tokens: &[String]| -> HashMap<Vec<String>, usize> {
        let mut counts = HashMap::new();
        if tokens.len() >= n {
            for start in 0..=(tokens.len() - n) {
                *counts.entry(tokens[start..start + n].to_vec()).or_insert(0) += 1;
            }
        }
        counts
    };
    let pred_grams = grams(&pred);
    let gold_grams = grams(&gold);
    let pred_total: usize = pred_grams.values().sum();
    let gold_total: usize = gold_grams.values().sum();
    if pred_total == 0 || gold_total == 0 {
        // Both sides are shorter than n; nothing overlaps by definition.
        return Ok(PrfScore::ZERO);
    }
    let matched: usize = pred_grams
        .iter()
        .map(|(gram, &count)| count.min(gold_grams.get(gram).copied().unwrap_or(0)))
        .sum();
    Ok(PrfScore::from_pr(
        matched as f64 / pred_total as f64,
        matched as f64 / gold_total as f64,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(a: f64, b: f64) {
        assert!((a - b).abs() < 1e-12, "{a} !~ {b}");
    }

    #[test]
    fn identity_scores_one() {
        let s = rouge_l("The cat sat.", "The cat sat.").unwrap();
        assert_eq!((s.precision, s.recall, s.f1), (1.0, 1.0, 1.0));
    }

    #[test]
    fn prefix_prediction() {
        let s = rouge_l("the cat", "the cat sat").unwrap();
        approx(s.precision, 1.0);
        approx(s.recall, 2.0 / 3.0);
        approx(s.f1, 0.8);
    }

    #[test]
    fn disjoint_tokens_score_zero() {
        let s = rouge_l("alpha beta", "gamma delta").unwrap();
        assert_eq!((s.precision, s.recall, s.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn swapping_sides_swaps_precision_and_recall() {
        let a = rouge_l("the cat sat on a mat", "a cat on the mat").unwrap();
        let b = rouge_l("a cat on the mat", "the cat sat on a mat").unwrap();
        approx(a.precision, b.recall);
        approx(a.recall, b.precision);
        approx(a.f1, b.f1);
    }

    #[test]
    fn subsequence_need_not_be_contiguous() {
        // LCS of [a b c d] and [a x b y d] is [a b d].
        let s = rouge_l("a b c d", "a x b y d").unwrap();
        approx(s.precision, 3.0 / 4.0);
        approx(s.recall, 3.0 / 5.0);
    }

    #[test]
    fn empty_inputs_are_rejected() {
        assert!(matches!(rouge_l("", "x"), Err(Error::EmptyInput)));
        assert!(matches!(rouge_l("x", ""), Err(Error::EmptyInput)));
    }

    #[test]
    fn rouge_one_counts_unigram_overlap() {
        let s = rouge_n("the cat", "the cat sat", 1).unwrap();
        approx(s.precision, 1.0);
        approx(s.recall, 2.0 / 3.0);
    }

    #[test]
    fn rouge_two_on_short_inputs_is_zero() {
        let s = rouge_n("one", "one", 2).unwrap();
        assert_eq!(s, PrfScore::ZERO);
    }

    #[test]
    fn variant_parsing() {
        assert_eq!(RougeVariant::parse("L").unwrap(), RougeVariant::RougeL);
        assert_eq!(RougeVariant::parse("rouge-2").unwrap(), RougeVariant::Rouge2);
        assert!(RougeVariant::parse("3").is_err());
    }
}
