//! Deliberately naive reference implementations of the n-gram and LCS
//! metrics, used to cross-check the production kernels. Everything here
//! favors obvious correctness over speed: occurrence counting is positional
//! scanning, and the LCS is the textbook recursion with memoization.

#![allow(dead_code)]

/// Occurrences of `needle` in `haystack` by scanning every position.
pub fn count_occurrences(haystack: &[String], needle: &[String]) -> usize {
    if needle.is_empty() || haystack.len() < needle.len() {
        return 0;
    }
    (0..=haystack.len() - needle.len())
        .filter(|&i| &haystack[i..i + needle.len()] == needle.iter().as_slice())
        .count()
}

/// Clipped matches and total n-gram count for one order: every distinct
/// n-gram of `pred` contributes `min(count_in_pred, count_in_gold)`.
pub fn clipped_ngram_matches(pred: &[String], gold: &[String], n: usize) -> (usize, usize) {
    if n == 0 || pred.len() < n {
        return (0, 0);
    }
    let total = pred.len() + 1 - n;
    let mut clipped = 0;
    for i in 0..total {
        let ngram = &pred[i..i + n];
        let seen_before = (0..i).any(|j| &pred[j..j + n] == ngram);
        if seen_before {
            continue;
        }
        let in_pred = (0..total).filter(|&j| &pred[j..j + n] == ngram).count();
        let in_gold = if gold.len() >= n {
            (0..=gold.len() - n)
                .filter(|&j| &gold[j..j + n] == ngram)
                .count()
        } else {
            0
        };
        clipped += in_pred.min(in_gold);
    }
    (clipped, total)
}

/// Reference sentence BLEU. Orders run 1..=min(4, |pred|, |gold|); when
/// every raw clipped count is positive no smoothing is applied (so identity
/// comes out exactly 1), otherwise orders >= 2 get +1/+1 smoothing; a raw
/// unigram count of zero forces 0. Brevity penalty is
/// exp(1 - |gold|/|pred|) when |pred| <= |gold|, else 1.
pub fn oracle_bleu(pred: &[String], gold: &[String]) -> f64 {
    assert!(!pred.is_empty() && !gold.is_empty(), "oracle needs tokens");
    let max_n = 4.min(pred.len()).min(gold.len());
    let parts: Vec<(usize, usize)> = (1..=max_n)
        .map(|n| clipped_ngram_matches(pred, gold, n))
        .collect();
    if parts[0].0 == 0 {
        return 0.0;
    }
    let smooth = parts.iter().any(|&(clipped, _)| clipped == 0);
    let mut log_sum = 0.0;
    for (idx, &(clipped, total)) in parts.iter().enumerate() {
        let (num, den) = if idx > 0 && smooth {
            (clipped as f64 + 1.0, total as f64 + 1.0)
        } else {
            (clipped as f64, total as f64)
        };
        log_sum += (num / den).ln();
    }
    let brevity = if pred.len() <= gold.len() {
        (1.0 - gold.len() as f64 / pred.len() as f64).exp()
    } else {
        1.0
    };
    brevity * (log_sum / max_n as f64).exp()
}

/// Textbook recursive LCS with memoization.
pub fn oracle_lcs(a: &[String], b: &[String]) -> usize {
    fn go(
        a: &[String],
        b: &[String],
        i: usize,
        j: usize,
        memo: &mut Vec<Vec<Option<usize>>>,
    ) -> usize {
        if i == a.len() || j == b.len() {
            return 0;
        }
        if let Some(value) = memo[i][j] {
            return value;
        }
        let value = if a[i] == b[j] {
            1 + go(a, b, i + 1, j + 1, memo)
        } else {
            go(a, b, i + 1, j, memo).max(go(a, b, i, j + 1, memo))
        };
        memo[i][j] = Some(value);
        value
    }
    let mut memo = vec![vec![None; b.len()]; a.len()];
    go(a, b, 0, 0, &mut memo)
}

/// Reference ROUGE-L precision/recall/F1 from the recursive LCS.
pub fn oracle_rouge_l(pred: &[String], gold: &[String]) -> (f64, f64, f64) {
    assert!(!pred.is_empty() && !gold.is_empty(), "oracle needs tokens");
    let lcs = oracle_lcs(pred, gold) as f64;
    let precision = lcs / pred.len() as f64;
    let recall = lcs / gold.len() as f64;
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    (precision, recall, f1)
}
