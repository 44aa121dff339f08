//! Microbenchmarks for the scoring primitives: tokenization, BLEU, ROUGE-L,
//! greedy-alignment BERTScore, and perplexity.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use synthqa_bench::WordStream;
use synthqa_core::metrics::{bert_score, bleu, perplexity, rouge_l, tokenize};
use synthqa_core::MockEmbedding;

fn text_pair(seed: u64, len: usize) -> (String, String) {
    let mut stream = WordStream::new(seed);
    (stream.sentence(len), stream.sentence(len))
}

fn bench_tokenize(c: &mut Criterion) {
    let text = WordStream::new(7).sentence(120);
    c.bench_function("tokenize/120-words", |b| {
        b.iter(|| tokenize(black_box(&text)))
    });
}

fn bench_bleu(c: &mut Criterion) {
    let mut group = c.benchmark_group("bleu");
    for len in [8usize, 64] {
        let (pred, gold) = text_pair(11, len);
        group.bench_with_input(BenchmarkId::from_parameter(len), &len, |b, _| {
            b.iter(|| bleu(black_box(&pred), black_box(&gold)))
        });
    }
    group.finish();
}

fn bench_rouge_l(c: &mut Criterion) {
    let mut group = c.benchmark_group("rouge_l");
    for len in [8usize, 64] {
        let (pred, gold) = text_pair(13, len);
        group.bench_with_input(BenchmarkId::from_parameter(len), &len, |b, _| {
            b.iter(|| rouge_l(black_box(&pred), black_box(&gold)))
        });
    }
    group.finish();
}

fn bench_bert_score(c: &mut Criterion) {
    let emb = MockEmbedding::new(3);
    let (pred, gold) = text_pair(17, 24);
    c.bench_function("bert_score/24-tokens", |b| {
        b.iter(|| bert_score(black_box(&pred), black_box(&gold), &emb).unwrap())
    });
}

fn bench_perplexity(c: &mut Criterion) {
    let logprobs: Vec<f64> = (0..512).map(|i| -0.1 - (i % 13) as f64 * 0.05).collect();
    c.bench_function("perplexity/512-tokens", |b| {
        b.iter(|| perplexity(black_box(&logprobs)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_tokenize,
    bench_bleu,
    bench_rouge_l,
    bench_bert_score,
    bench_perplexity
);
criterion_main!(benches);
