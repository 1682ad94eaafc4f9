//! SQuAD v1.1 corpora: loading, validation, sentence segmentation and
//! saving, with every offset counted in Unicode code points.

use std::collections::{BTreeSet, HashSet};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adversary::DistractorRecord;
use crate::text::{is_abbreviation, CharIndex};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed corpus JSON at `{path}`: {message}")]
    Parse { path: String, message: String },
    #[error("corpus failed validation with {} finding(s); qa ids: {}", findings.len(), finding_ids(findings))]
    Validation { findings: Vec<Finding> },
    #[error("answer offset {offset} lies outside a context of {len} code points")]
    OffsetOutOfRange { offset: usize, len: usize },
}

fn finding_ids(findings: &[Finding]) -> String {
    let ids: BTreeSet<&str> = findings.iter().filter_map(|f| f.qa_id.as_deref()).collect();
    ids.into_iter().collect::<Vec<_>>().join(", ")
}

/// A whole dataset: titled articles, each made of paragraphs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub version: String,
    #[serde(rename = "data")]
    pub articles: Vec<Article>,
    /// Tool version and configuration that produced this file, if generated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Article {
    pub title: String,
    pub paragraphs: Vec<Paragraph>,
}

/// A context passage with its sentence segmentation and questions.
///
/// `sentences` is derived from `context` and never serialized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "ParagraphRepr", into = "ParagraphRepr")]
pub struct Paragraph {
    pub context: String,
    pub sentences: Vec<SentenceSpan>,
    pub qas: Vec<QA>,
}

#[derive(Serialize, Deserialize)]
struct ParagraphRepr {
    context: String,
    qas: Vec<QA>,
}

impl From<ParagraphRepr> for Paragraph {
    fn from(r: ParagraphRepr) -> Self {
        Paragraph::new(r.context, r.qas)
    }
}

impl From<Paragraph> for ParagraphRepr {
    fn from(p: Paragraph) -> Self {
        ParagraphRepr { context: p.context, qas: p.qas }
    }
}

/// Half-open sentence range `[start, end)` in code points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SentenceSpan {
    pub start: usize,
    pub end: usize,
}

impl SentenceSpan {
    pub fn contains(&self, offset: usize) -> bool {
        self.start <= offset && offset < self.end
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QA {
    pub id: String,
    pub question: String,
    pub answers: Vec<Answer>,
    #[serde(rename = "adversarial", default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<AdversarialMeta>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Answer {
    pub answer_start: usize,
    pub text: String,
}

/// Provenance attached to a generated variant question.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversarialMeta {
    pub variant_of: String,
    pub variant_index: u32,
    pub distractor: DistractorRecord,
}

/// Id of the `k`-th adversarial variant of `base` (`k >= 1`).
pub fn variant_id(base: &str, k: u32) -> String {
    format!("{base}-adv{k}")
}

/// Split a variant id back into its base id and variant index.
pub fn parse_variant_id(id: &str) -> Option<(&str, u32)> {
    let (base, k) = id.rsplit_once("-adv")?;
    if base.is_empty() || k.is_empty() || !k.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let k: u32 = k.parse().ok()?;
    (k >= 1).then_some((base, k))
}

impl QA {
    /// Base id this question groups under for worst-case evaluation.
    pub fn base_id(&self) -> &str {
        match &self.meta {
            Some(m) => &m.variant_of,
            None => parse_variant_id(&self.id).map_or(self.id.as_str(), |(b, _)| b),
        }
    }
}

impl Paragraph {
    pub fn new(context: String, qas: Vec<QA>) -> Self {
        let sentences = segment_sentences(&context);
        Paragraph { context, sentences, qas }
    }

    pub fn sentence_count(&self) -> usize {
        self.sentences.len()
    }

    /// Text of the sentence at 0-based position `i`.
    pub fn sentence_text(&self, i: usize) -> Option<&str> {
        let span = self.sentences.get(i)?;
        CharIndex::new(&self.context).slice(&self.context, span.start, span.end)
    }
}

impl Corpus {
    pub fn new(version: impl Into<String>) -> Self {
        Corpus { version: version.into(), articles: Vec::new(), provenance: None }
    }

    pub fn paragraphs(&self) -> impl Iterator<Item = &Paragraph> {
        self.articles.iter().flat_map(|a| a.paragraphs.iter())
    }

    /// Every question with the paragraph it belongs to.
    pub fn qas(&self) -> impl Iterator<Item = (&Paragraph, &QA)> {
        self.paragraphs().flat_map(|p| p.qas.iter().map(move |q| (p, q)))
    }

    pub fn qa_count(&self) -> usize {
        self.paragraphs().map(|p| p.qas.len()).sum()
    }

    pub fn paragraph_count(&self) -> usize {
        self.articles.iter().map(|a| a.paragraphs.len()).sum()
    }
}

/// Parse a SQuAD v1.1 JSON stream without checking answer offsets.
pub fn parse_corpus<R: Read>(mut source: R) -> Result<Corpus, CorpusError> {
    let mut buf = Vec::new();
    source.read_to_end(&mut buf)?;
    let de = &mut serde_json::Deserializer::from_slice(&buf);
    serde_path_to_error::deserialize(de).map_err(|e| CorpusError::Parse {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

/// Parse and validate a corpus; any validation finding is an error.
pub fn load_corpus<R: Read>(source: R) -> Result<Corpus, CorpusError> {
    let corpus = parse_corpus(source)?;
    let report = validate(&corpus);
    if report.is_empty() {
        Ok(corpus)
    } else {
        Err(CorpusError::Validation { findings: report.findings })
    }
}

/// Write `corpus` as compact JSON with a fixed field order.
pub fn save_corpus<W: Write>(corpus: &Corpus, mut sink: W) -> Result<(), CorpusError> {
    serde_json::to_writer(&mut sink, corpus).map_err(std::io::Error::from)?;
    sink.write_all(b"\n")?;
    sink.flush()?;
    Ok(())
}

const TERMINATORS: &[char] = &['.', '!', '?'];
const CLOSERS: &[char] = &['"', '\'', ')', ']', '”', '’', '»'];
const OPENERS: &[char] = &['"', '\'', '(', '[', '“', '‘', '«'];

/// Split `context` into sentences.
///
/// A boundary follows a run of `.`/`!`/`?` (plus closing quotes or brackets)
/// when it is followed by whitespace and then an uppercase letter or digit,
/// optionally behind an opening quote. A lone period after an abbreviation or
/// an initial does not end a sentence. Trailing unterminated text forms the
/// last sentence.
pub fn segment_sentences(context: &str) -> Vec<SentenceSpan> {
    let chars: Vec<char> = context.chars().collect();
    let n = chars.len();
    let mut spans = Vec::new();
    let mut start: Option<usize> = None;
    let mut i = 0;
    while i < n {
        let c = chars[i];
        if start.is_none() && !c.is_whitespace() {
            start = Some(i);
        }
        if !TERMINATORS.contains(&c) {
            i += 1;
            continue;
        }
        let mut j = i + 1;
        while j < n && TERMINATORS.contains(&chars[j]) {
            j += 1;
        }
        let lone_period = c == '.' && j == i + 1;
        while j < n && CLOSERS.contains(&chars[j]) {
            j += 1;
        }
        if j < n && chars[j].is_whitespace() {
            let mut k = j;
            while k < n && chars[k].is_whitespace() {
                k += 1;
            }
            let mut m = k;
            while m < n && OPENERS.contains(&chars[m]) {
                m += 1;
            }
            let next_ok = m < n && (chars[m].is_uppercase() || chars[m].is_ascii_digit());
            let abbreviated = lone_period && j == i + 1 && {
                let word_start = chars[..i]
                    .iter()
                    .rposition(|c| c.is_whitespace())
                    .map_or(0, |p| p + 1);
                let word: String = chars[word_start..=i].iter().collect();
                is_abbreviation(&word)
            };
            if next_ok && !abbreviated {
                let s = start.take().expect("sentence start set before terminator");
                spans.push(SentenceSpan { start: s, end: j });
                i = k;
                continue;
            }
        }
        i = j;
    }
    if let Some(s) = start {
        let end = chars.iter().rposition(|c| !c.is_whitespace()).map_or(s, |p| p + 1);
        if end > s {
            spans.push(SentenceSpan { start: s, end });
        }
    }
    spans
}

/// 1-based sentence position of `answer` from the front (`x`) and from the
/// back (`y = n - x`).
///
/// An answer starting in the whitespace between two sentences belongs to the
/// following sentence.
pub fn answer_sentence_index(
    paragraph: &Paragraph,
    answer: &Answer,
) -> Result<(usize, usize), CorpusError> {
    let len = CharIndex::new(&paragraph.context).len();
    let out_of_range = CorpusError::OffsetOutOfRange { offset: answer.answer_start, len };
    if answer.answer_start >= len {
        return Err(out_of_range);
    }
    let n = paragraph.sentences.len();
    let pos = paragraph
        .sentences
        .iter()
        .position(|s| answer.answer_start < s.end)
        .ok_or(out_of_range)?;
    let x = pos + 1;
    Ok((x, n - x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FindingKind {
    AnswerMismatch,
    EmptyAnswer,
    NoAnswers,
    DuplicateId,
    BadVariantId,
    UnknownBase,
}

/// One invariant violation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub qa_id: Option<String>,
    pub kind: FindingKind,
    pub article: usize,
    pub paragraph: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.findings.is_empty()
    }

    /// One JSON object per line.
    pub fn write_json_lines<W: Write>(&self, mut sink: W) -> std::io::Result<()> {
        for f in &self.findings {
            serde_json::to_writer(&mut sink, f)?;
            sink.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Check answer offsets, id uniqueness and the variant id scheme.
pub fn validate(corpus: &Corpus) -> ValidationReport {
    let mut findings = Vec::new();
    let mut seen = HashSet::new();
    let base_ids: HashSet<&str> =
        corpus.qas().filter(|(_, q)| q.meta.is_none()).map(|(_, q)| q.id.as_str()).collect();

    for (ai, article) in corpus.articles.iter().enumerate() {
        for (pi, para) in article.paragraphs.iter().enumerate() {
            let index = CharIndex::new(&para.context);
            for qa in &para.qas {
                let mut push = |kind, message: String| {
                    findings.push(Finding {
                        qa_id: Some(qa.id.clone()),
                        kind,
                        article: ai,
                        paragraph: pi,
                        message,
                    })
                };
                if !seen.insert(qa.id.as_str()) {
                    push(FindingKind::DuplicateId, format!("duplicate qa id `{}`", qa.id));
                }
                if qa.answers.is_empty() {
                    push(FindingKind::NoAnswers, "question has no gold answers".into());
                }
                for ans in &qa.answers {
                    if ans.text.is_empty() {
                        push(FindingKind::EmptyAnswer, "empty answer text".into());
                        continue;
                    }
                    let len = ans.text.chars().count();
                    let found = index.slice(&para.context, ans.answer_start, ans.answer_start + len);
                    if found != Some(ans.text.as_str()) {
                        push(
                            FindingKind::AnswerMismatch,
                            format!(
                                "answer `{}` not found at offset {} (context has {:?})",
                                ans.text, ans.answer_start, found
                            ),
                        );
                    }
                }
                if let Some(meta) = &qa.meta {
                    if meta.variant_index == 0 || qa.id != variant_id(&meta.variant_of, meta.variant_index) {
                        push(
                            FindingKind::BadVariantId,
                            format!(
                                "variant id `{}` does not match `{}`",
                                qa.id,
                                variant_id(&meta.variant_of, meta.variant_index)
                            ),
                        );
                    }
                    if !base_ids.is_empty() && !base_ids.contains(meta.variant_of.as_str()) {
                        push(
                            FindingKind::UnknownBase,
                            format!("variant of unknown base question `{}`", meta.variant_of),
                        );
                    }
                }
            }
        }
    }
    ValidationReport { findings }
}
