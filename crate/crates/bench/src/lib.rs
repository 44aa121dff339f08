//! Shared fixtures for the benchmark suite: deterministic word-salad text so
//! every run measures the same inputs without pulling in an RNG crate.

const WORDS: &[&str] = &[
    "the", "a", "model", "answers", "question", "context", "document", "filter", "token",
    "embedding", "similarity", "dataset", "pipeline", "batch", "metric", "score", "reads",
    "writes", "holds", "reports", "four", "nine", "seven", "green", "large", "small",
];

/// Deterministic pseudo-random stream (splitmix64) — stable across platforms.
pub struct WordStream {
    state: u64,
}

impl WordStream {
    pub fn new(seed: u64) -> Self {
        WordStream { state: seed }
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// A sentence of `len` dictionary words.
    pub fn sentence(&mut self, len: usize) -> String {
        let words: Vec<&str> = (0..len)
            .map(|_| WORDS[(self.next_u64() % WORDS.len() as u64) as usize])
            .collect();
        words.join(" ")
    }
}
