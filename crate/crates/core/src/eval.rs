//! Answer scoring (normalized exact match and token F1), worst case over
//! adversarial variants, and a lexical-overlap baseline predictor.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, Paragraph, QA};
use crate::text::{is_stopword, tokenize, CharIndex, Token};

/// qa id → predicted answer text.
pub type PredictionSet = BTreeMap<String, String>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("variant `{variant}` refers to unknown base question `{base}`")]
    UnknownBase { variant: String, base: String },
}

/// Lowercase, drop ASCII punctuation, drop the articles a/an/the, collapse
/// whitespace.
pub fn normalize_answer(s: &str) -> String {
    let lower = s.to_lowercase();
    let no_punct: String = lower.chars().filter(|c| !c.is_ascii_punctuation()).collect();
    no_punct
        .split_whitespace()
        .filter(|t| !matches!(*t, "a" | "an" | "the"))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn em(pred: &str, gold: &str) -> f64 {
    f64::from(u8::from(normalize_answer(pred) == normalize_answer(gold)))
}

/// Harmonic mean of token-multiset precision and recall.
pub fn f1(pred: &str, gold: &str) -> f64 {
    let p = normalize_answer(pred);
    let g = normalize_answer(gold);
    let pt: Vec<&str> = p.split_whitespace().collect();
    let gt: Vec<&str> = g.split_whitespace().collect();
    if pt.is_empty() || gt.is_empty() {
        return f64::from(u8::from(pt.is_empty() && gt.is_empty()));
    }
    let mut counts: HashMap<&str, i64> = HashMap::new();
    for t in &gt {
        *counts.entry(t).or_default() += 1;
    }
    let mut common = 0i64;
    for t in &pt {
        if let Some(c) = counts.get_mut(t) {
            if *c > 0 {
                *c -= 1;
                common += 1;
            }
        }
    }
    if common == 0 {
        return 0.0;
    }
    let precision = common as f64 / pt.len() as f64;
    let recall = common as f64 / gt.len() as f64;
    2.0 * precision * recall / (precision + recall)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuestionScore {
    pub f1: f64,
    pub em: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstCase {
    pub f1: f64,
    pub em: f64,
    /// Variant with the lowest F1; `None` when a variant set had no
    /// variant for this question.
    pub variant: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub per_question: BTreeMap<String, QuestionScore>,
    pub macro_f1: f64,
    pub macro_em: f64,
    /// Questions without a prediction (scored 0).
    pub missing: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub worst_case: Option<BTreeMap<String, WorstCase>>,
}

fn score_qa(qa: &QA, preds: &PredictionSet) -> Option<QuestionScore> {
    let pred = preds.get(&qa.id)?;
    let best = |f: fn(&str, &str) -> f64| qa.answers.iter().map(|a| f(pred, &a.text)).fold(0.0, f64::max);
    Some(QuestionScore { f1: best(f1), em: best(em) })
}

fn mean(xs: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        s / n as f64
    }
}

/// Score every question of `corpus`, taking the best match over its gold
/// answers.
pub fn score(corpus: &Corpus, preds: &PredictionSet) -> EvalReport {
    let qas: Vec<&QA> = corpus.qas().map(|(_, q)| q).collect();
    let scored: Vec<(String, Option<QuestionScore>)> =
        qas.par_iter().map(|q| (q.id.clone(), score_qa(q, preds))).collect();
    let mut per_question = BTreeMap::new();
    let mut missing = Vec::new();
    for (id, s) in scored {
        if s.is_none() {
            missing.push(id.clone());
        }
        per_question.insert(id, s.unwrap_or(QuestionScore { f1: 0.0, em: 0.0 }));
    }
    missing.sort();
    EvalReport {
        macro_f1: mean(per_question.values().map(|s| s.f1)),
        macro_em: mean(per_question.values().map(|s| s.em)),
        per_question,
        missing,
        worst_case: None,
    }
}

/// Per base question, the minimum score over all of its adversarial variants
/// across every variant set. A base question that some set covers but
/// another does not scores 0 through the uncovering set. The un-attacked
/// base question is not part of the minimum.
pub fn worst_case_score(base: &Corpus, variant_sets: &[(Corpus, PredictionSet)]) -> Result<EvalReport, EvalError> {
    let base_ids: BTreeSet<&str> = base.qas().map(|(_, q)| q.id.as_str()).collect();
    let mut per_question = BTreeMap::new();
    let mut missing = Vec::new();
    // base id → per set: list of (variant id, score)
    let mut groups: BTreeMap<String, Vec<Vec<(String, QuestionScore)>>> = BTreeMap::new();
    for (si, (corpus, preds)) in variant_sets.iter().enumerate() {
        let report = score(corpus, preds);
        missing.extend(report.missing.iter().cloned());
        for (_, qa) in corpus.qas() {
            let b = qa.base_id();
            if !base_ids.contains(b) {
                return Err(EvalError::UnknownBase { variant: qa.id.clone(), base: b.to_string() });
            }
            let s = report.per_question[&qa.id];
            let sets = groups.entry(b.to_string()).or_insert_with(|| vec![Vec::new(); variant_sets.len()]);
            sets[si].push((qa.id.clone(), s));
            per_question.insert(qa.id.clone(), s);
        }
    }
    let mut worst = BTreeMap::new();
    for (b, sets) in groups {
        let w = if sets.iter().any(Vec::is_empty) {
            WorstCase { f1: 0.0, em: 0.0, variant: None }
        } else {
            let all = sets.iter().flatten();
            let (id, s) = all.clone().fold(None::<&(String, QuestionScore)>, |acc, x| match acc {
                Some(a) if a.1.f1 <= x.1.f1 => Some(a),
                _ => Some(x),
            }).expect("non-empty");
            let min_em = all.map(|(_, s)| s.em).fold(f64::INFINITY, f64::min);
            WorstCase { f1: s.f1, em: min_em, variant: Some(id.clone()) }
        };
        worst.insert(b, w);
    }
    missing.sort();
    missing.dedup();
    Ok(EvalReport {
        macro_f1: mean(worst.values().map(|w| w.f1)),
        macro_em: mean(worst.values().map(|w| w.em)),
        per_question,
        missing,
        worst_case: Some(worst),
    })
}

/// A predicted span in code points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictedSpan {
    pub start: usize,
    pub end: usize,
    pub text: String,
    /// 0-based index of the chosen sentence.
    pub sentence: usize,
}

const MAX_SPAN_TOKENS: usize = 15;

fn content_keys(tokens: &[Token<'_>]) -> BTreeSet<String> {
    tokens
        .iter()
        .filter(|t| !t.is_punct() && !is_stopword(t.text))
        .map(|t| t.text.to_lowercase())
        .collect()
}

/// Baseline span for one question: the sentence sharing the most distinct
/// content words with the question (first on ties), then the longest run of
/// at most 15 tokens containing no question word (first on ties).
pub fn overlap_baseline_span(paragraph: &Paragraph, question: &str) -> Option<PredictedSpan> {
    let qtoks = tokenize(question);
    let qkeys = content_keys(&qtoks);
    let qwords: BTreeSet<String> = qtoks.iter().map(|t| t.text.to_lowercase()).collect();
    let idx = CharIndex::new(&paragraph.context);

    let mut best: Option<(usize, usize)> = None;
    for (si, span) in paragraph.sentences.iter().enumerate() {
        let text = idx.slice(&paragraph.context, span.start, span.end)?;
        let overlap = content_keys(&tokenize(text)).intersection(&qkeys).count();
        if best.is_none_or(|(_, b)| overlap > b) {
            best = Some((si, overlap));
        }
    }
    let (si, _) = best?;
    let span = paragraph.sentences[si];
    let text = idx.slice(&paragraph.context, span.start, span.end)?;
    let toks = tokenize(text);

    let mut best_run: Option<(usize, usize)> = None;
    let mut i = 0;
    while i < toks.len() {
        if qwords.contains(&toks[i].text.to_lowercase()) || toks[i].is_punct() {
            i += 1;
            continue;
        }
        let mut j = i;
        while j < toks.len() && j - i < MAX_SPAN_TOKENS && !qwords.contains(&toks[j].text.to_lowercase()) {
            j += 1;
        }
        let mut end = j;
        while end > i && toks[end - 1].is_punct() {
            end -= 1;
        }
        if best_run.is_none_or(|(a, b)| end - i > b - a) {
            best_run = Some((i, end));
        }
        i = j.max(i + 1);
    }
    let (a, b) = best_run?;
    let start = span.start + toks[a].start;
    let end = span.start + toks[b - 1].end();
    Some(PredictedSpan { start, end, text: idx.slice(&paragraph.context, start, end)?.to_string(), sentence: si })
}

/// Baseline spans for every question of `corpus`.
pub fn overlap_baseline_spans(corpus: &Corpus) -> BTreeMap<String, PredictedSpan> {
    let qas: Vec<(&Paragraph, &QA)> = corpus.qas().collect();
    qas.par_iter()
        .filter_map(|(p, q)| overlap_baseline_span(p, &q.question).map(|s| (q.id.clone(), s)))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// Baseline predictions for every question of `corpus`.
pub fn overlap_baseline_predict(corpus: &Corpus) -> PredictionSet {
    overlap_baseline_spans(corpus).into_iter().map(|(id, s)| (id, s.text)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Answer, Article};

    #[test]
    fn normalization() {
        assert_eq!(normalize_answer("The Pack"), "pack");
        assert_eq!(normalize_answer("U.S."), "us");
        assert_eq!(normalize_answer("pack"), "pack");
        assert_eq!(normalize_answer("  a  cat,  an   owl "), "cat owl");
    }

    #[test]
    fn f1_values() {
        assert!((f1("in the pack", "the pack") - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(f1("pack", "pack"), 1.0);
        assert_eq!(f1("alpha", "beta"), 0.0);
        assert_eq!(f1("the", "a"), 1.0);
        assert_eq!(f1("the", "pack"), 0.0);
        assert_eq!(em("The Pack!", "pack"), 1.0);
    }

    fn corpus(qas: Vec<(&str, Vec<&str>)>) -> Corpus {
        let context = "alpha beta gamma pack";
        let qas = qas
            .into_iter()
            .map(|(id, golds)| QA {
                id: id.into(),
                question: "q".into(),
                answers: golds
                    .into_iter()
                    .map(|g| Answer { answer_start: context.find(g).unwrap(), text: g.into() })
                    .collect(),
                meta: None,
            })
            .collect();
        let mut c = Corpus::new("1.1");
        c.articles.push(Article { title: "t".into(), paragraphs: vec![Paragraph::new(context.into(), qas)] });
        c
    }

    fn preds(p: &[(&str, &str)]) -> PredictionSet {
        p.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    #[test]
    fn score_max_over_golds_and_missing() {
        let c = corpus(vec![("a", vec!["pack", "gamma pack"]), ("b", vec!["alpha"]), ("c", vec!["beta"])]);
        let r = score(&c, &preds(&[("a", "gamma pack"), ("b", "alpha beta")]));
        assert_eq!(r.per_question["a"].f1, 1.0);
        assert!((r.per_question["b"].f1 - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.per_question["c"].f1, 0.0);
        assert_eq!(r.missing, vec!["c".to_string()]);
        assert!((r.macro_f1 - (1.0 + 2.0 / 3.0) / 3.0).abs() < 1e-12);
        assert!((r.macro_em - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn worst_case_min_and_unknown_base() {
        let base = corpus(vec![("q", vec!["pack"])]);
        let v1 = corpus(vec![("q-adv1", vec!["pack"])]);
        let v2 = corpus(vec![("q-adv2", vec!["pack"])]);
        let r = worst_case_score(
            &base,
            &[(v1.clone(), preds(&[("q-adv1", "pack")])), (v2.clone(), preds(&[("q-adv2", "beta")]))],
        )
        .unwrap();
        let w = &r.worst_case.as_ref().unwrap()["q"];
        assert_eq!(w.f1, 0.0);
        assert_eq!(w.variant.as_deref(), Some("q-adv2"));
        let single = worst_case_score(&base, &[(v1.clone(), preds(&[("q-adv1", "gamma pack")]))]).unwrap();
        assert_eq!(single.macro_f1, score(&v1, &preds(&[("q-adv1", "gamma pack")])).macro_f1);
        let bad = corpus(vec![("z-adv1", vec!["pack"])]);
        assert!(matches!(worst_case_score(&base, &[(bad, PredictionSet::new())]), Err(EvalError::UnknownBase { .. })));
    }

    #[test]
    fn baseline_picks_overlap_sentence_and_run() {
        let p = Paragraph::new(
            "Tesla moved to Prague in 1880. Edison built a lab.".into(),
            vec![],
        );
        let s = overlap_baseline_span(&p, "Where did Tesla move in 1880?").unwrap();
        assert_eq!(s.sentence, 0);
        assert_eq!(s.text, "moved to Prague");
        let tie = Paragraph::new("Rain fell. Snow fell.".into(), vec![]);
        assert_eq!(overlap_baseline_span(&tie, "What fell?").unwrap().sentence, 0);
    }
}
