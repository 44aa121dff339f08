//! Property-based invariants over the metric kernels, the filter chain, and
//! the split logic.

use proptest::prelude::*;

use synthqa_core::corpus::{Corpus, Document};
use synthqa_core::dataset::{split_by_ratio, QAPair, QAStatus};
use synthqa_core::embedding::{cosine_similarity, EmbeddingVector, MockEmbedding};
use synthqa_core::metrics::{bleu, exact_match, perplexity, rouge_l, tokenize};
use synthqa_core::postprocess::{run_postprocess, FilterConfig, SENTINEL_TEXT, UNFINISHED_MARKER};

const VOCAB: [&str; 8] = ["the", "cat", "sat", "on", "mat", "dog", "ran", "a"];

fn token_seq() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(
        prop::sample::select(VOCAB.to_vec()).prop_map(String::from),
        1..20,
    )
}

fn nonzero_vector() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-100.0f64..100.0, 2..16)
        .prop_filter("needs a usable norm", |v| {
            v.iter().map(|x| x * x).sum::<f64>().sqrt() > 1e-3
        })
}

proptest! {
    #[test]
    fn cosine_is_scale_invariant(a in nonzero_vector(), k in 0.001f64..1000.0) {
        let b: Vec<f64> = a.iter().map(|x| x * 0.5 + 1.0).collect();
        prop_assume!(b.iter().map(|x| x * x).sum::<f64>().sqrt() > 1e-3);
        let scaled: Vec<f64> = b.iter().map(|x| x * k).collect();
        let plain = cosine_similarity(&EmbeddingVector(a.clone()), &EmbeddingVector(b)).unwrap();
        let stretched = cosine_similarity(&EmbeddingVector(a), &EmbeddingVector(scaled)).unwrap();
        prop_assert!((plain - stretched).abs() < 1e-9);
    }

    #[test]
    fn bleu_stays_in_the_unit_interval(pred in token_seq(), gold in token_seq()) {
        let score = bleu(&pred.join(" "), &gold.join(" ")).unwrap();
        prop_assert!((0.0..=1.0).contains(&score), "bleu = {score}");
    }

    #[test]
    fn rouge_swaps_precision_and_recall(pred in token_seq(), gold in token_seq()) {
        let forward = rouge_l(&pred.join(" "), &gold.join(" ")).unwrap();
        let backward = rouge_l(&gold.join(" "), &pred.join(" ")).unwrap();
        prop_assert!((forward.precision - backward.recall).abs() < 1e-12);
        prop_assert!((forward.recall - backward.precision).abs() < 1e-12);
        prop_assert!((forward.f1 - backward.f1).abs() < 1e-12);
        for value in [forward.precision, forward.recall, forward.f1] {
            prop_assert!((0.0..=1.0).contains(&value));
        }
    }

    #[test]
    fn tokenizer_output_is_clean_and_stable(text in "\\PC{0,120}") {
        let tokens = tokenize(&text);
        for token in &tokens {
            prop_assert!(!token.is_empty());
            prop_assert!(!token.chars().any(char::is_whitespace), "token {token:?}");
            prop_assert_eq!(token.to_lowercase(), token.clone(), "token {:?} not case-folded", token);
        }
        // Re-tokenizing the joined tokens is a fixed point.
        let joined = tokens.join(" ");
        prop_assert_eq!(tokenize(&joined), tokens);
    }

    #[test]
    fn exact_match_is_reflexive_and_whitespace_blind(words in prop::collection::vec("[a-zA-Z0-9.,!?]{1,8}", 1..10)) {
        let text = words.join(" ");
        prop_assert!(exact_match(&text, &text));
        let padded = format!("  {}  ", words.join("   "));
        prop_assert!(exact_match(&text, &padded));
    }

    #[test]
    fn perplexity_of_valid_logprobs_is_at_least_one(logprobs in prop::collection::vec(-20.0f64..=0.0, 1..50)) {
        let ppl = perplexity(&logprobs).unwrap();
        prop_assert!(ppl.is_finite());
        prop_assert!(ppl >= 1.0 - 1e-12, "perplexity {ppl}");
    }

    #[test]
    fn constant_logprobs_invert_exactly(logprob in -20.0f64..0.0, n in 1usize..50) {
        let ppl = perplexity(&vec![logprob; n]).unwrap();
        let expected = (-logprob).exp();
        prop_assert!((ppl - expected).abs() <= expected * 1e-9);
    }
}

fn corpus_with_one_context() -> Corpus {
    Corpus::from_documents([Document {
        id: "ctx".into(),
        title: None,
        body: "A shared fixed context body.".into(),
    }])
}

fn arbitrary_pairs() -> impl Strategy<Value = Vec<QAPair>> {
    prop::collection::vec(
        (
            token_seq(),
            prop::bool::ANY,
            prop::bool::ANY,
        ),
        1..12,
    )
    .prop_map(|specs| {
        specs
            .into_iter()
            .enumerate()
            .map(|(idx, (words, sentinel, trail_off))| {
                let answer = if sentinel {
                    SENTINEL_TEXT.to_string()
                } else if trail_off {
                    format!("{} and then", words.join(" "))
                } else {
                    format!("{}.", words.join(" "))
                };
                QAPair::new(
                    format!("ctx#{idx}"),
                    "ctx",
                    format!("Question {idx}?"),
                    answer,
                    "m",
                )
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn postprocess_conserves_every_pair(pairs in arbitrary_pairs(), seed in 0u64..1000) {
        let corpus = corpus_with_one_context();
        let emb = MockEmbedding::new(seed);
        let outcome = run_postprocess(&pairs, &corpus, &emb, None, &FilterConfig::default()).unwrap();
        let c = outcome.log.counters;
        prop_assert!(c.conserved(), "counters not conserved: {c:?}");
        prop_assert_eq!(c.raw, pairs.len());
        prop_assert_eq!(c.accepted, outcome.accepted.len());
        for pair in &outcome.accepted {
            prop_assert_eq!(pair.status, QAStatus::Accepted);
            if pair.unfinished {
                prop_assert!(pair.answer.ends_with(UNFINISHED_MARKER));
                prop_assert_eq!(pair.answer.matches(UNFINISHED_MARKER).count(), 1);
            } else {
                prop_assert!(!pair.answer.contains(UNFINISHED_MARKER));
            }
        }
        // Every accepted id existed in the input.
        for pair in &outcome.accepted {
            prop_assert!(pairs.iter().any(|p| p.id == pair.id));
        }
    }

    #[test]
    fn raising_the_sentinel_threshold_is_monotone(
        sims in prop::collection::vec(0.0f64..1.0, 1..16),
        low in 0.05f64..0.9,
        bump in 0.01f64..0.09,
    ) {
        let high = low + bump;
        let corpus = corpus_with_one_context();
        let emb = MockEmbedding::new(7);
        let pairs: Vec<QAPair> = sims
            .iter()
            .enumerate()
            .map(|(idx, _)| {
                QAPair::new(format!("ctx#{idx}"), "ctx", format!("Q{idx}?"), format!("Answer {idx}."), "m")
            })
            .collect();
        for (pair, sim) in pairs.iter().zip(&sims) {
            emb.force_similarity(SENTINEL_TEXT, &pair.answer, *sim).unwrap();
        }
        let removed_at = |threshold: f64| {
            let cfg = FilterConfig { sentinel_threshold: threshold, ..FilterConfig::default() };
            run_postprocess(&pairs, &corpus, &emb, None, &cfg)
                .map(|o| o.log.counters.removed_unanswered)
        };
        let at_low = removed_at(low).unwrap();
        let at_high = removed_at(high).unwrap();
        prop_assert!(at_high <= at_low, "removed {at_high} at {high} > {at_low} at {low}");
    }

    #[test]
    fn ratio_splits_keep_contexts_whole_and_lose_nothing(
        context_sizes in prop::collection::vec(1usize..5, 2..9),
        cut in 0.1f64..0.9,
    ) {
        let mut pairs = Vec::new();
        for (c, size) in context_sizes.iter().enumerate() {
            for k in 0..*size {
                pairs.push(QAPair::new(
                    format!("c{c}#{k}"),
                    format!("c{c}"),
                    "Q?",
                    "A.",
                    "m",
                ));
            }
        }
        let splits = split_by_ratio(
            &pairs,
            &[("head".to_string(), cut), ("tail".to_string(), 1.0 - cut)],
        ).unwrap();
        prop_assert_eq!(splits.len(), 2);

        let head_contexts: std::collections::HashSet<&str> =
            splits[0].pairs.iter().map(|p| p.context_id.as_str()).collect();
        let tail_contexts: std::collections::HashSet<&str> =
            splits[1].pairs.iter().map(|p| p.context_id.as_str()).collect();
        prop_assert!(head_contexts.is_disjoint(&tail_contexts));

        let mut union: Vec<&str> = splits
            .iter()
            .flat_map(|s| s.pairs.iter().map(|p| p.id.as_str()))
            .collect();
        union.sort_unstable();
        let mut original: Vec<&str> = pairs.iter().map(|p| p.id.as_str()).collect();
        original.sort_unstable();
        prop_assert_eq!(union, original);
    }
}
