//! Distractor placement at sentence boundaries, whole-corpus generation and
//! mixing adversarial questions into training data.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adversary::{make_adversarial_variants, GenerationConfig, GenerationError, GenerationLog, Resources};
use crate::corpus::{segment_sentences, Answer, Article, Corpus, Paragraph};
use crate::rng::Rng;
use crate::text::{char_len, CharIndex};

/// Where the distractor goes. Slots are 1-based sentence positions in the
/// resulting paragraph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum PlacementStrategy {
    Append,
    Prepend,
    Middle,
    #[default]
    Random,
    FixedIndex(usize),
}

impl PlacementStrategy {
    /// Slot in `1..=n+1` for a paragraph of `n` sentences.
    pub fn slot(self, n: usize, rng: &mut Rng) -> usize {
        match self {
            PlacementStrategy::Append => n + 1,
            PlacementStrategy::Prepend => 1,
            PlacementStrategy::Middle => (n + 2) / 2,
            PlacementStrategy::Random => rng.random_range(1..=n + 1),
            PlacementStrategy::FixedIndex(k) => k.clamp(1, n + 1),
        }
    }
}

impl fmt::Display for PlacementStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlacementStrategy::Append => f.write_str("append"),
            PlacementStrategy::Prepend => f.write_str("prepend"),
            PlacementStrategy::Middle => f.write_str("middle"),
            PlacementStrategy::Random => f.write_str("random"),
            PlacementStrategy::FixedIndex(k) => write!(f, "fixed:{k}"),
        }
    }
}

impl FromStr for PlacementStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "append" => Ok(PlacementStrategy::Append),
            "prepend" => Ok(PlacementStrategy::Prepend),
            "middle" => Ok(PlacementStrategy::Middle),
            "random" => Ok(PlacementStrategy::Random),
            other => {
                let k = other
                    .strip_prefix("fixed:")
                    .and_then(|k| k.parse::<usize>().ok())
                    .ok_or_else(|| format!("unknown placement `{s}` (append|prepend|middle|random|fixed:<k>)"))?;
                if k == 0 {
                    return Err("fixed placement index must be >= 1".into());
                }
                Ok(PlacementStrategy::FixedIndex(k))
            }
        }
    }
}

impl TryFrom<String> for PlacementStrategy {
    type Error = String;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<PlacementStrategy> for String {
    fn from(p: PlacementStrategy) -> String {
        p.to_string()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlacementError {
    #[error("paragraph has no sentences")]
    EmptyParagraph,
    #[error("statement must be non-empty and end with sentence punctuation: `{0}`")]
    BadStatement(String),
    #[error("statement at slot {slot} does not re-segment as its own sentence")]
    Resegmentation { slot: usize },
    #[error("answer `{0}` no longer matches its offset after insertion")]
    AnswerShift(String),
}

/// Splice `statement` between sentences of `paragraph`. Returns the new
/// paragraph and the statement's 1-based sentence index.
///
/// Answers at or after the splice point shift by the statement length plus
/// the joining space.
pub fn insert_distractor(
    paragraph: &Paragraph,
    statement: &str,
    strategy: PlacementStrategy,
    rng: &mut Rng,
) -> Result<(Paragraph, usize), PlacementError> {
    let statement = statement.trim();
    if statement.is_empty() || !statement.ends_with(['.', '!', '?']) {
        return Err(PlacementError::BadStatement(statement.to_string()));
    }
    let n = paragraph.sentences.len();
    if n == 0 {
        return Err(PlacementError::EmptyParagraph);
    }
    let slot = strategy.slot(n, rng);
    let ctx = &paragraph.context;
    let idx = CharIndex::new(ctx);
    let shift = char_len(statement) + 1;

    let (splice, context) = if slot <= n {
        let at = paragraph.sentences[slot - 1].start;
        let b = idx.byte(at).expect("span start inside context");
        (at, format!("{}{statement} {}", &ctx[..b], &ctx[b..]))
    } else {
        let at = paragraph.sentences[n - 1].end;
        let b = idx.byte(at).expect("span end inside context");
        (at, format!("{} {statement}{}", &ctx[..b], &ctx[b..]))
    };
    let shifted = |a: &Answer| Answer {
        answer_start: if a.answer_start >= splice { a.answer_start + shift } else { a.answer_start },
        text: a.text.clone(),
    };
    let qas = paragraph
        .qas
        .iter()
        .map(|q| {
            let mut q = q.clone();
            q.answers = q.answers.iter().map(shifted).collect();
            q
        })
        .collect();
    let out = Paragraph { sentences: segment_sentences(&context), context, qas };

    if out.sentences.len() != n + 1 || out.sentence_text(slot - 1) != Some(statement) {
        return Err(PlacementError::Resegmentation { slot });
    }
    let out_idx = CharIndex::new(&out.context);
    for q in &out.qas {
        for a in &q.answers {
            let end = a.answer_start + char_len(&a.text);
            if out_idx.slice(&out.context, a.answer_start, end) != Some(a.text.as_str()) {
                return Err(PlacementError::AnswerShift(a.text.clone()));
            }
        }
    }
    Ok((out, slot))
}

/// One paragraph per generated variant, grouped under the source article's
/// title. Articles without any variant are omitted.
pub fn generate_adversarial_corpus(
    corpus: &Corpus,
    cfg: &GenerationConfig,
    res: Resources<'_>,
) -> Result<(Corpus, GenerationLog), GenerationError> {
    cfg.validate()?;
    let jobs: Vec<(usize, &Paragraph, usize)> = corpus
        .articles
        .iter()
        .enumerate()
        .flat_map(|(ai, a)| {
            a.paragraphs
                .iter()
                .flat_map(move |p| p.qas.iter().enumerate().map(move |(qi, _)| (ai, p, qi)))
        })
        .filter(|(_, p, qi)| p.qas[*qi].meta.is_none())
        .collect();
    let outcomes = jobs
        .par_iter()
        .map(|&(ai, p, qi)| make_adversarial_variants(p, &p.qas[qi], cfg, res).map(|o| (ai, o)))
        .collect::<Result<Vec<_>, _>>()?;

    let mut out = Corpus::new(corpus.version.clone());
    out.provenance = Some(serde_json::json!({
        "tool": "advqa",
        "version": crate::TOOL_VERSION,
        "config": cfg,
    }));
    let mut log = GenerationLog::default();
    let mut by_article: BTreeMap<usize, Vec<Paragraph>> = BTreeMap::new();
    for (ai, o) in outcomes {
        for (p, _, rec) in o.variants {
            by_article.entry(ai).or_default().push(p);
            log.records.push(rec);
        }
        log.skips.extend(o.skips);
    }
    for (ai, paragraphs) in by_article {
        out.articles.push(Article { title: corpus.articles[ai].title.clone(), paragraphs });
    }
    Ok((out, log))
}

#[derive(Debug, Error, PartialEq)]
pub enum MixError {
    #[error("adversarial fraction must be in [0, 1), got {0}")]
    Fraction(f64),
    #[error("mixing needs {required} adversarial questions but only {available} are available")]
    Insufficient { required: usize, available: usize },
}

/// Number of adversarial questions `a` to add to `original` questions so that
/// `a = round(fraction * (original + a))`; the smallest such `a`.
pub fn adversarial_target(original: usize, fraction: f64) -> usize {
    if fraction <= 0.0 {
        return 0;
    }
    let estimate = (fraction * original as f64 / (1.0 - fraction)).floor() as usize;
    let lo = estimate.saturating_sub(2);
    (lo..=estimate + 3)
        .find(|&a| (fraction * (original + a) as f64).round() as usize == a)
        .unwrap_or_else(|| (fraction * original as f64 / (1.0 - fraction)).round() as usize)
}

/// Add a uniformly sampled set of adversarial questions to `original` so
/// they make up `fraction` of the result, then shuffle paragraph order within
/// each article. Adversarial paragraphs join the article with the same title.
pub fn mix_training(
    original: &Corpus,
    adversarial: &Corpus,
    fraction: f64,
    rng: &mut Rng,
) -> Result<Corpus, MixError> {
    if !(0.0..1.0).contains(&fraction) || fraction.is_nan() {
        return Err(MixError::Fraction(fraction));
    }
    let required = adversarial_target(original.qa_count(), fraction);
    if required == 0 {
        return Ok(original.clone());
    }
    let pool: Vec<(&str, &Paragraph, usize)> = adversarial
        .articles
        .iter()
        .flat_map(|a| {
            a.paragraphs
                .iter()
                .flat_map(move |p| (0..p.qas.len()).map(move |qi| (a.title.as_str(), p, qi)))
        })
        .collect();
    if required > pool.len() {
        return Err(MixError::Insufficient { required, available: pool.len() });
    }
    let mut picked = index::sample(rng, pool.len(), required).into_vec();
    picked.sort_unstable();

    let mut out = original.clone();
    let mut titles: BTreeMap<String, usize> =
        out.articles.iter().enumerate().rev().map(|(i, a)| (a.title.clone(), i)).collect();
    for i in picked {
        let (title, p, qi) = pool[i];
        let mut single = p.clone();
        single.qas = vec![p.qas[qi].clone()];
        let ai = *titles.entry(title.to_string()).or_insert_with(|| {
            out.articles.push(Article { title: title.to_string(), paragraphs: Vec::new() });
            out.articles.len() - 1
        });
        out.articles[ai].paragraphs.push(single);
    }
    for a in &mut out.articles {
        a.paragraphs.shuffle(rng);
    }
    Ok(out)
}
