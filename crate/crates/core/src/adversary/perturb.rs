//! Semantics-altering question perturbations: antonym swaps for content
//! words, typed-pool swaps for named entities, numbers and dates.

use rand::seq::IndexedRandom;
use serde::{Deserialize, Serialize};

use crate::lexicon::{inflect, AnswerType, AnswerTyper, FakeAnswerPool, Lexicon};
use crate::rng::Rng;
use crate::text::{capitalize_first, is_stopword, starts_uppercase, tokenize, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PerturbationKind {
    AntonymSwap,
    EntitySwap,
    NumberSwap,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Perturbation {
    pub kind: PerturbationKind,
    pub original: String,
    pub replacement: String,
    /// Index of the (first) replaced token in the question's tokenization.
    pub position: usize,
}

pub type PerturbationLog = Vec<Perturbation>;

const RUN_CONNECTORS: &[&str] = &["of", "de", "da", "von", "van", "der", "del", "and", "&"];

fn is_cap(t: &str) -> bool {
    starts_uppercase(t)
}

fn is_digitish(t: &str) -> bool {
    t.chars().next().is_some_and(|c| c.is_ascii_digit())
        || (t.starts_with('$') && t.chars().nth(1).is_some_and(|c| c.is_ascii_digit()))
}

fn strip_possessive(t: &str) -> &str {
    t.strip_suffix("'s").or_else(|| t.strip_suffix("’s")).unwrap_or(t)
}

/// Length of the capitalized run starting at `i` (connectors allowed between
/// capitalized words).
fn cap_run(toks: &[Token<'_>], i: usize) -> usize {
    let mut j = i + 1;
    while j < toks.len() {
        let t = toks[j].text;
        if toks[j - 1].text != strip_possessive(toks[j - 1].text) {
            break;
        }
        if is_cap(t) {
            j += 1;
        } else if RUN_CONNECTORS.contains(&t.to_lowercase().as_str())
            && toks.get(j + 1).is_some_and(|n| is_cap(n.text))
        {
            j += 2;
        } else {
            break;
        }
    }
    j - i
}

/// Antonym replacement for `word`, re-inflected with the suffix the lookup
/// stripped. Falls back to the bare antonym when the inflected form would not
/// map back to it.
fn antonym_for(word: &str, lex: &Lexicon, rng: &mut Rng) -> Option<String> {
    let (key, suffix) = lex.analyze(word)?;
    let cands: Vec<&String> = lex.antonyms(key).iter().filter(|a| !a.contains(' ')).collect();
    let ant = (*cands.choose(rng)?).clone();
    let mut out = match suffix {
        Some(s) => {
            let inflected = inflect(&ant, s);
            if lex.lemma(&inflected) == Some(ant.as_str()) { inflected } else { ant }
        }
        None => ant,
    };
    if is_cap(word) {
        out = capitalize_first(&out);
    }
    (out.to_lowercase() != word.to_lowercase()).then_some(out)
}

fn pool_swap(original: &str, ty: AnswerType, pool: &FakeAnswerPool, rng: &mut Rng) -> Option<String> {
    pool.eligible(ty, &[original]).choose(rng).map(|s| s.to_string())
}

/// Apply every applicable swap to `question`. Returns the rewritten question
/// and the log; an empty log means the question is unchanged.
pub fn perturb_question(
    question: &str,
    lex: &Lexicon,
    typer: &AnswerTyper,
    pool: &FakeAnswerPool,
    rng: &mut Rng,
) -> (String, PerturbationLog) {
    let toks = tokenize(question);
    let mut log = PerturbationLog::new();
    // (byte_start, byte_end, replacement)
    let mut edits: Vec<(usize, usize, String)> = Vec::new();
    let mut i = 0;
    while i < toks.len() {
        let tok = toks[i];
        if tok.is_punct() {
            i += 1;
            continue;
        }

        if is_cap(tok.text) {
            let len = cap_run(&toks, i);
            let last = toks[i + len - 1];
            let end = last.byte_start + strip_possessive(last.text).len();
            let span = &question[tok.byte_start..end];
            let known = typer.is_person_name(span) || typer.is_location_name(span);
            if i > 0 || known {
                if let Ok(ty) = typer.classify(span) {
                    let kind = match ty {
                        AnswerType::Person | AnswerType::Location | AnswerType::Entity => {
                            Some(PerturbationKind::EntitySwap)
                        }
                        AnswerType::Date | AnswerType::Number => Some(PerturbationKind::NumberSwap),
                        AnswerType::Common => None,
                    };
                    if let Some(kind) = kind {
                        if let Some(rep) = pool_swap(span, ty, pool, rng) {
                            log.push(Perturbation {
                                kind,
                                original: span.to_string(),
                                replacement: rep.clone(),
                                position: i,
                            });
                            edits.push((tok.byte_start, end, rep));
                            i += len;
                            continue;
                        }
                    }
                }
                if i > 0 {
                    i += len;
                    continue;
                }
            }
        }

        if is_digitish(tok.text) {
            if let Ok(ty @ (AnswerType::Date | AnswerType::Number)) = typer.classify(tok.text) {
                if let Some(rep) = pool_swap(tok.text, ty, pool, rng) {
                    log.push(Perturbation {
                        kind: PerturbationKind::NumberSwap,
                        original: tok.text.to_string(),
                        replacement: rep.clone(),
                        position: i,
                    });
                    edits.push((tok.byte_start, tok.byte_end(), rep));
                }
            }
            i += 1;
            continue;
        }

        if !is_stopword(tok.text) {
            if let Some(rep) = antonym_for(tok.text, lex, rng) {
                log.push(Perturbation {
                    kind: PerturbationKind::AntonymSwap,
                    original: tok.text.to_string(),
                    replacement: rep.clone(),
                    position: i,
                });
                edits.push((tok.byte_start, tok.byte_end(), rep));
            }
        }
        i += 1;
    }

    let mut out = String::with_capacity(question.len());
    let mut cursor = 0;
    for (b0, b1, rep) in &edits {
        out.push_str(&question[cursor..*b0]);
        out.push_str(rep);
        cursor = *b1;
    }
    out.push_str(&question[cursor..]);
    (out, log)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::load_lexicon;
    use crate::rng::derive_rng;

    fn fixture_lex() -> Lexicon {
        load_lexicon("long\t\tshort\nbig\tlarge\tsmall\n".as_bytes()).unwrap().0
    }

    #[test]
    fn antonym_with_morphology() {
        let typer = AnswerTyper::bundled();
        let pool = FakeAnswerPool::default();
        let (q, log) = perturb_question("What is the longest river?", &fixture_lex(), &typer, &pool, &mut derive_rng(1, "q", 0));
        assert_eq!(q, "What is the shortest river?");
        assert_eq!(log.len(), 1);
        assert_eq!(log[0].kind, PerturbationKind::AntonymSwap);
        assert_eq!((log[0].original.as_str(), log[0].replacement.as_str(), log[0].position), ("longest", "shortest", 3));
    }

    #[test]
    fn entity_swap_uses_only_alternative() {
        let typer = AnswerTyper::bundled();
        let pool = FakeAnswerPool::from_answers(&typer, ["Tesla", "Edison"]).unwrap();
        let (q, log) = perturb_question("What city did Tesla move to?", &fixture_lex(), &typer, &pool, &mut derive_rng(1, "q", 0));
        assert_eq!(q, "What city did Edison move to?");
        assert_eq!(log[0].kind, PerturbationKind::EntitySwap);
        assert_eq!(log[0].position, 3);
    }

    #[test]
    fn possessive_and_numbers() {
        let typer = AnswerTyper::bundled();
        let pool = FakeAnswerPool::from_answers(&typer, ["Tesla", "Edison", "1881", "1901"]).unwrap();
        let (q, log) = perturb_question("Where was Tesla's lab in 1881?", &fixture_lex(), &typer, &pool, &mut derive_rng(1, "q", 0));
        assert_eq!(q, "Where was Edison's lab in 1901?");
        let kinds: Vec<_> = log.iter().map(|p| p.kind).collect();
        assert_eq!(kinds, [PerturbationKind::EntitySwap, PerturbationKind::NumberSwap]);
    }

    #[test]
    fn unperturbable_question() {
        let typer = AnswerTyper::bundled();
        let (q, log) = perturb_question("Why?", &fixture_lex(), &typer, &FakeAnswerPool::default(), &mut derive_rng(1, "q", 0));
        assert_eq!(q, "Why?");
        assert!(log.is_empty());
    }

    #[test]
    fn capitalization_preserved() {
        let typer = AnswerTyper::bundled();
        let (q, _) = perturb_question("Long walls?", &fixture_lex(), &typer, &FakeAnswerPool::default(), &mut derive_rng(1, "q", 0));
        assert_eq!(q, "Short walls?");
    }
}
