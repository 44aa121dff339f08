//! Prompt rendering: question generation, answer generation, the fine-tuning
//! record layout, and k-shot framing. All renders are pure functions of their
//! inputs.

use std::collections::BTreeSet;
use std::path::Path;

use crate::corpus::Document;
use crate::error::{Error, Result};

/// The escape sentence an answer model must emit verbatim for unanswerable
/// questions.
pub const SENTINEL_TEXT: &str =
    "There are no possible factual answers based on the given content.";

/// The line separating k-shot exemplars from each other and from the target.
pub const SHOT_DELIMITER: &str = "---";

/// Characters of document body kept when rendering prompts; the tail beyond
/// this budget is cut.
pub const DEFAULT_TRUNCATION_BUDGET: usize = 12_000;

pub const DEFAULT_QUESTION_TEMPLATE: &str = "\
Read the content below and write a numbered list of at most {max_questions} factoid questions about it.
Each question must ask for a short, specific fact that is stated in the content.
Do not write questions that cannot be answered from the content alone.

### Content: {document}";

pub const DEFAULT_ANSWER_TEMPLATE: &str = "\
Find the answer to the question in the given content and reply with a factual answer.
If the content does not contain the answer, reply with exactly this sentence:
There are no possible factual answers based on the given content.

### Question: {question}

### Content: {document}";

const FINETUNE_TEMPLATE: &str = "\
Find the answer to the question in the given document.

### Question: {question}

### Document: {document}";

const FINETUNE_TEMPLATE_NO_DOCUMENT: &str = "\
Find the answer to the question in the given document.

### Question: {question}";

/// A named template whose body carries `{placeholder}` slots.
///
/// Required placeholders must appear in the body; that is checked at
/// construction so a broken override file fails fast rather than producing
/// degenerate prompts.
#[derive(Debug, Clone, PartialEq)]
pub struct PromptTemplate {
    name: String,
    body: String,
    required: BTreeSet<String>,
}

fn placeholders_in(body: &str) -> BTreeSet<String> {
    let mut found = BTreeSet::new();
    let bytes = body.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'{' {
            if let Some(len) = placeholder_len(&body[i..]) {
                found.insert(body[i + 1..i + len - 1].to_string());
                i += len;
                continue;
            }
        }
        i += 1;
    }
    found
}

/// Length of a `{lower_snake_case}` token starting at the front of `s`, if
/// one starts there. Other brace content is literal text.
fn placeholder_len(s: &str) -> Option<usize> {
    let inner = s.strip_prefix('{')?;
    let end = inner.find('}')?;
    let name = &inner[..end];
    if !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_lowercase() || c == '_')
    {
        Some(end + 2)
    } else {
        None
    }
}

impl PromptTemplate {
    pub fn new(
        name: impl Into<String>,
        body: impl Into<String>,
        required: &[&str],
    ) -> Result<Self> {
        let template = PromptTemplate {
            name: name.into(),
            body: body.into(),
            required: required.iter().map(|s| s.to_string()).collect(),
        };
        let present = placeholders_in(&template.body);
        for name in &template.required {
            if !present.contains(name) {
                return Err(Error::InvalidConfig(format!(
                    "template {:?} is missing required placeholder {{{name}}}",
                    template.name
                )));
            }
        }
        Ok(template)
    }

    /// The built-in question-generation template.
    pub fn question_default() -> Self {
        PromptTemplate::new("question", DEFAULT_QUESTION_TEMPLATE, &["document", "max_questions"])
            .expect("built-in template is well-formed")
    }

    /// The built-in answer-generation template.
    pub fn answer_default() -> Self {
        PromptTemplate::new("answer", DEFAULT_ANSWER_TEMPLATE, &["document", "question"])
            .expect("built-in template is well-formed")
    }

    /// Load an override template from a plain UTF-8 text file.
    pub fn from_file(name: impl Into<String>, path: &Path, required: &[&str]) -> Result<Self> {
        let body = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        PromptTemplate::new(name, body, required)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// The raw body with placeholders unsubstituted.
    pub fn body(&self) -> &str {
        &self.body
    }

    /// Substitute every placeholder. Placeholders in the body that have no
    /// binding are an error, so no `{...}` token survives into the output.
    pub fn render(&self, bindings: &[(&str, &str)]) -> Result<String> {
        let mut out = String::with_capacity(self.body.len());
        let mut rest = self.body.as_str();
        while let Some(pos) = rest.find('{') {
            out.push_str(&rest[..pos]);
            rest = &rest[pos..];
            match placeholder_len(rest) {
                Some(len) => {
                    let name = &rest[1..len - 1];
                    let value = bindings
                        .iter()
                        .find(|(k, _)| *k == name)
                        .map(|(_, v)| *v)
                        .ok_or_else(|| Error::UnknownPlaceholder {
                            template: self.name.clone(),
                            placeholder: name.to_string(),
                        })?;
                    out.push_str(value);
                    rest = &rest[len..];
                }
                None => {
                    out.push('{');
                    rest = &rest[1..];
                }
            }
        }
        out.push_str(rest);
        Ok(out)
    }
}

/// Cut a document body down to `budget` characters, keeping the head.
/// Returns the (possibly shortened) text and whether anything was cut.
pub fn truncate_body(body: &str, budget: usize) -> (String, bool) {
    match body.char_indices().nth(budget) {
        Some((byte_idx, _)) => (body[..byte_idx].to_string(), true),
        None => (body.to_string(), false),
    }
}

/// Render the question-generation prompt for one document.
pub fn render_question_prompt(
    template: &PromptTemplate,
    doc: &Document,
    max_questions: usize,
) -> Result<String> {
    if max_questions == 0 {
        return Err(Error::InvalidConfig(
            "max_questions must be at least 1".into(),
        ));
    }
    let max = max_questions.to_string();
    template.render(&[("document", &doc.body), ("max_questions", &max)])
}

/// Render the answer-generation prompt for one (document, question) pair.
pub fn render_answer_prompt(
    template: &PromptTemplate,
    doc: &Document,
    question: &str,
) -> Result<String> {
    if question.trim().is_empty() {
        return Err(Error::InvalidConfig("question is empty".into()));
    }
    template.render(&[("document", &doc.body), ("question", question)])
}

/// Render one fine-tuning record: instruction line, question, document.
pub fn render_finetune_record(question: &str, doc: &Document) -> Result<String> {
    if question.trim().is_empty() {
        return Err(Error::InvalidConfig("question is empty".into()));
    }
    PromptTemplate::new("finetune", FINETUNE_TEMPLATE, &["question", "document"])?
        .render(&[("question", question), ("document", &doc.body)])
}

/// Render a fine-tuning record without the document section, for exports
/// framed in the no-context setting.
pub fn render_finetune_record_without_document(question: &str) -> Result<String> {
    if question.trim().is_empty() {
        return Err(Error::InvalidConfig("question is empty".into()));
    }
    PromptTemplate::new("finetune-no-context", FINETUNE_TEMPLATE_NO_DOCUMENT, &["question"])?
        .render(&[("question", question)])
}

/// One answered exemplar for k-shot prompts.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotExample {
    pub question: String,
    pub document: Option<String>,
    pub answer: String,
}

impl ShotExample {
    fn render(&self) -> Result<String> {
        let record = match &self.document {
            Some(body) => render_finetune_record(
                &self.question,
                &Document {
                    id: String::new(),
                    title: None,
                    body: body.clone(),
                },
            )?,
            None => render_finetune_record_without_document(&self.question)?,
        };
        if self.answer.trim().is_empty() {
            return Err(Error::InvalidConfig("shot answer is empty".into()));
        }
        Ok(format!("{record}\n\n### Answer: {}", self.answer))
    }
}

/// Frame `target` behind `shots` answered exemplars.
///
/// Exemplars appear in input order, each as a full record followed by its
/// answer, with a `---` line between blocks. Zero shots returns the target
/// unchanged.
pub fn build_k_shot_prompt(shots: &[ShotExample], target: &str) -> Result<String> {
    if ![0, 1, 5].contains(&shots.len()) {
        return Err(Error::UnsupportedShotCount(shots.len()));
    }
    if shots.is_empty() {
        return Ok(target.to_string());
    }
    let mut blocks = Vec::with_capacity(shots.len() + 1);
    for shot in shots {
        blocks.push(shot.render()?);
    }
    blocks.push(target.to_string());
    Ok(blocks.join(&format!("\n{SHOT_DELIMITER}\n")))
}
