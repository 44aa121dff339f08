//! Sentence-level BLEU with clipped n-gram precisions, add-one smoothing for
//! higher orders, and a brevity penalty.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::metrics::tokenize::tokenize;

pub const DEFAULT_MAX_N: usize = 4;

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts: HashMap<&[String], usize> = HashMap::new();
    if tokens.len() >= n {
        for start in 0..=(tokens.len() - n) {
            *counts.entry(&tokens[start..start + n]).or_insert(0) += 1;
        }
    }
    counts
}

/// Clipped match count and candidate n-gram total for one order.
fn clipped_precision_parts(pred: &[String], gold: &[String], n: usize) -> (usize, usize) {
    let pred_counts = ngram_counts(pred, n);
    let gold_counts = ngram_counts(gold, n);
    let matched = pred_counts
        .iter()
        .map(|(gram, &count)| count.min(gold_counts.get(gram).copied().unwrap_or(0)))
        .sum();
    let total = pred.len().saturating_sub(n - 1);
    (matched, total)
}

fn brevity_penalty(pred_len: usize, gold_len: usize) -> f64 {
    if pred_len > gold_len {
        1.0
    } else {
        (1.0 - gold_len as f64 / pred_len as f64).exp()
    }
}

/// BLEU over token slices, orders `1..=max_n`.
///
/// The order range shrinks to the shorter side's length so that a prediction
/// equal to its reference always scores exactly 1.0. When every raw clipped
/// count is positive, no smoothing is applied; otherwise orders two and up
/// get one added to numerator and denominator. A zero unigram count is never
/// smoothed and forces a score of 0.
pub fn bleu_tokens(pred: &[String], gold: &[String], max_n: usize) -> Result<f64> {
    if max_n == 0 {
        return Err(Error::InvalidConfig("max_n must be at least 1".into()));
    }
    if pred.is_empty() || gold.is_empty() {
        return Err(Error::EmptyInput);
    }
    let effective_n = max_n.min(pred.len()).min(gold.len());
    let parts: Vec<(usize, usize)> = (1..=effective_n)
        .map(|n| clipped_precision_parts(pred, gold, n))
        .collect();

    if parts[0].0 == 0 {
        return Ok(0.0);
    }
    let smooth = parts.iter().any(|&(matched, _)| matched == 0);

    let mut log_sum = 0.0;
    for (order, &(matched, total)) in parts.iter().enumerate() {
        let (num, den) = if smooth && order > 0 {
            (matched + 1, total + 1)
        } else {
            (matched, total)
        };
        log_sum += (num as f64 / den as f64).ln();
    }
    let geometric_mean = (log_sum / effective_n as f64).exp();
    Ok((brevity_penalty(pred.len(), gold.len()) * geometric_mean).clamp(0.0, 1.0))
}

/// Sentence BLEU over raw strings with the default order cap of 4.
pub fn bleu(pred: &str, gold: &str) -> Result<f64> {
    bleu_tokens(&tokenize(pred), &tokenize(gold), DEFAULT_MAX_N)
}

/// Corpus-level BLEU: n-gram counts and lengths pool over all pairs before
/// the precision, smoothing, and brevity computations.
pub fn corpus_bleu(pairs: &[(String, String)]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let tokenized: Vec<(Vec<String>, Vec<String>)> = pairs
        .iter()
        .map(|(p, g)| (tokenize(p), tokenize(g)))
        .collect();
    if tokenized.iter().any(|(p, g)| p.is_empty() || g.is_empty()) {
        return Err(Error::EmptyInput);
    }
    let effective_n = tokenized
        .iter()
        .map(|(p, g)| p.len().min(g.len()))
        .min()
        .unwrap()
        .min(DEFAULT_MAX_N);

    let mut matched = vec![0usize; effective_n];
    let mut total = vec![0usize; effective_n];
    let mut pred_len = 0usize;
    let mut gold_len = 0usize;
    for (pred, gold) in &tokenized {
        pred_len += pred.len();
        gold_len += gold.len();
        for n in 1..=effective_n {
            let (m, t) = clipped_precision_parts(pred, gold, n);
            matched[n - 1] += m;
            total[n - 1] += t;
        }
    }

    if matched[0] == 0 {
        return Ok(0.0);
    }
    let smooth = matched.iter().any(|&m| m == 0);
    let mut log_sum = 0.0;
    for order in 0..effective_n {
        let (num, den) = if smooth && order > 0 {
            (matched[order] + 1, total[order] + 1)
        } else {
            (matched[order], total[order])
        };
        log_sum += (num as f64 / den as f64).ln();
    }
    let geometric_mean = (log_sum / effective_n as f64).exp();
    Ok((brevity_penalty(pred_len, gold_len) * geometric_mean).clamp(0.0, 1.0))
}
