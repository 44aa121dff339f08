//! The shared metric tokenizer: case-folded, whitespace-split, with every
//! punctuation character detached as its own token.

/// Tokenize `text` for BLEU/ROUGE/BERTScore.
///
/// Characters are classified before case-folding: alphanumeric runs form one
/// token, whitespace separates, and any other character becomes a single-char
/// token on its own.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut word = String::new();
    for ch in text.chars() {
        if ch.is_whitespace() {
            if !word.is_empty() {
                tokens.push(std::mem::take(&mut word));
            }
        } else if ch.is_alphanumeric() {
            word.extend(ch.to_lowercase());
        } else {
            if !word.is_empty() {
                tokens.push(std::mem::take(&mut word));
            }
            tokens.push(ch.to_lowercase().collect());
        }
    }
    if !word.is_empty() {
        tokens.push(word);
    }
    tokens
}
