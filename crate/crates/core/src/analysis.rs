//! Sentence-position distributions and the suspicion score
//! `P_{s_a} = P(X = a) + P(Y = n - a)`.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{answer_sentence_index, Corpus, CorpusError};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("question `{0}` carries no distractor metadata")]
    MissingMetadata(String),
    #[error("no paragraphs of {0} sentences in the distribution")]
    MissingLength(usize),
    #[error("no paragraphs with at most {0} sentences")]
    NothingToAggregate(usize),
    #[error("sentence count must be at least 1")]
    ZeroLength,
    #[error("suspicion vector sums to zero")]
    ZeroVector,
    #[error("question `{qa_id}`: {source}")]
    Offset { qa_id: String, source: CorpusError },
    #[error("insertion index {index} of `{qa_id}` outside a {n}-sentence paragraph")]
    BadIndex { qa_id: String, index: usize, n: usize },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Subject {
    AnswerSentence,
    Distractor,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub x: BTreeMap<usize, u64>,
    pub y: BTreeMap<usize, u64>,
    pub total: u64,
}

impl Counts {
    fn add(&mut self, x: usize, y: usize) {
        *self.x.entry(x).or_default() += 1;
        *self.y.entry(y).or_default() += 1;
        self.total += 1;
    }

    fn px(&self, a: usize) -> f64 {
        ratio(self.x.get(&a).copied().unwrap_or(0), self.total)
    }

    fn py(&self, b: usize) -> f64 {
        ratio(self.y.get(&b).copied().unwrap_or(0), self.total)
    }
}

fn ratio(c: u64, total: u64) -> f64 {
    if total == 0 {
        0.0
    } else {
        c as f64 / total as f64
    }
}

/// Empirical X/Y tables, overall and per paragraph length `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacementDistribution {
    pub subject: Subject,
    pub marginal: Counts,
    pub by_n: BTreeMap<usize, Counts>,
}

impl PlacementDistribution {
    pub fn new(subject: Subject) -> Self {
        PlacementDistribution { subject, marginal: Counts::default(), by_n: BTreeMap::new() }
    }

    /// Record one observation at 1-based index `x` of `n`.
    pub fn add(&mut self, n: usize, x: usize) {
        debug_assert!(1 <= x && x <= n);
        self.marginal.add(x, n - x);
        self.by_n.entry(n).or_default().add(x, n - x);
    }

    pub fn total(&self) -> u64 {
        self.marginal.total
    }
}

/// Where answer sentences (first gold answer of every question) or inserted
/// distractors sit in their paragraphs.
pub fn location_distributions(corpus: &Corpus, subject: Subject) -> Result<PlacementDistribution, AnalysisError> {
    let mut d = PlacementDistribution::new(subject);
    for (p, qa) in corpus.qas() {
        let n = p.sentence_count();
        match subject {
            Subject::AnswerSentence => {
                let Some(a) = qa.answers.first() else { continue };
                let (x, _) = answer_sentence_index(p, a)
                    .map_err(|source| AnalysisError::Offset { qa_id: qa.id.clone(), source })?;
                d.add(n, x);
            }
            Subject::Distractor => {
                let meta = qa.meta.as_ref().ok_or_else(|| AnalysisError::MissingMetadata(qa.id.clone()))?;
                let x = meta.distractor.insertion_index;
                if x == 0 || x > n {
                    return Err(AnalysisError::BadIndex { qa_id: qa.id.clone(), index: x, n });
                }
                d.add(n, x);
            }
        }
    }
    Ok(d)
}

/// `values[a - 1] = P_{s_a}` for `a = 1..=n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuspicionVector {
    pub n: usize,
    pub values: Vec<f64>,
}

impl SuspicionVector {
    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// `P(X = a) + P(Y = n - a)` from the tables of paragraphs with exactly `n`
/// sentences (`conditioned`) or from the marginal tables.
pub fn sentence_suspicion(
    dist: &PlacementDistribution,
    n: usize,
    conditioned: bool,
) -> Result<SuspicionVector, AnalysisError> {
    if n == 0 {
        return Err(AnalysisError::ZeroLength);
    }
    let counts = if conditioned {
        dist.by_n.get(&n).ok_or(AnalysisError::MissingLength(n))?
    } else {
        &dist.marginal
    };
    let values = (1..=n).map(|a| counts.px(a) + counts.py(n - a)).collect();
    Ok(SuspicionVector { n, values })
}

/// Count-weighted mean of the conditional vectors for every `n <= n_max`,
/// each zero-padded to length `n_max`.
pub fn aggregate_suspicion(dist: &PlacementDistribution, n_max: usize) -> Result<SuspicionVector, AnalysisError> {
    if n_max == 0 {
        return Err(AnalysisError::ZeroLength);
    }
    let mut values = vec![0.0; n_max];
    let mut weight = 0u64;
    for (&n, counts) in dist.by_n.range(1..=n_max) {
        let v = sentence_suspicion(dist, n, true)?;
        for (slot, x) in values.iter_mut().zip(&v.values) {
            *slot += counts.total as f64 * x;
        }
        weight += counts.total;
    }
    if weight == 0 {
        return Err(AnalysisError::NothingToAggregate(n_max));
    }
    for v in &mut values {
        *v /= weight as f64;
    }
    Ok(SuspicionVector { n: n_max, values })
}

/// Total-variation distance between the normalized vector and uniform.
pub fn uniformity_score(v: &SuspicionVector) -> Result<f64, AnalysisError> {
    let sum = v.sum();
    if v.values.is_empty() || sum <= 0.0 {
        return Err(AnalysisError::ZeroVector);
    }
    let u = 1.0 / v.values.len() as f64;
    Ok(0.5 * v.values.iter().map(|x| (x / sum - u).abs()).sum::<f64>())
}

/// Number of paragraphs per sentence count.
pub fn paragraph_length_histogram(corpus: &Corpus) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for p in corpus.paragraphs() {
        *h.entry(p.sentence_count()).or_insert(0) += 1;
    }
    h
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuspicionRow {
    pub n: usize,
    pub a: usize,
    pub p_x: f64,
    pub p_y: f64,
    pub p_sa: f64,
}

/// One row per (n, a) for every paragraph length present.
pub fn suspicion_rows(dist: &PlacementDistribution, conditioned: bool) -> Vec<SuspicionRow> {
    let mut rows = Vec::new();
    for (&n, counts) in &dist.by_n {
        let c = if conditioned { counts } else { &dist.marginal };
        for a in 1..=n {
            let (p_x, p_y) = (c.px(a), c.py(n - a));
            rows.push(SuspicionRow { n, a, p_x, p_y, p_sa: p_x + p_y });
        }
    }
    rows
}

/// CSV with header `n,a,p_x,p_y,p_sa`.
pub fn write_suspicion_csv<W: Write>(rows: &[SuspicionRow], sink: W) -> Result<(), AnalysisError> {
    let mut w = csv::Writer::from_writer(sink);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
