//! Synonym/antonym indicator bits across the question/context boundary.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::lexicon::Lexicon;
use crate::text::{is_stopword, TOKENIZER_VERSION};

pub use crate::text::{tokenize, Token};

/// Bits for one question/context pair, aligned with [`tokenize`] output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenFeatures {
    pub tokenizer: String,
    pub q_syn: Vec<u8>,
    pub q_ant: Vec<u8>,
    pub c_syn: Vec<u8>,
    pub c_ant: Vec<u8>,
}

/// Sidecar keyed by qa id.
pub type FeatureSidecar = BTreeMap<String, TokenFeatures>;

/// Canonical key for a token: its lexicon lemma, else the lowercased form.
/// Stopwords and punctuation get none.
fn key(lex: &Lexicon, t: &Token<'_>) -> Option<String> {
    if t.is_punct() || is_stopword(t.text) {
        return None;
    }
    Some(lex.lemma(t.text).map_or_else(|| t.text.to_lowercase(), str::to_string))
}

fn bits(
    lex: &Lexicon,
    side: &[Option<String>],
    other: &BTreeSet<&str>,
) -> (Vec<u8>, Vec<u8>) {
    side.iter()
        .map(|k| match k {
            None => (0, 0),
            Some(k) => {
                let hit = |set: &BTreeSet<String>| u8::from(set.iter().any(|s| other.contains(s.as_str())));
                let e = lex.entry(k);
                (e.map_or(0, |e| hit(&e.synonyms)), e.map_or(0, |e| hit(&e.antonyms)))
            }
        })
        .unzip()
}

/// Bits for one pair: a question token's syn (ant) bit is set when some
/// context token is one of its synonyms (antonyms), and vice versa.
pub fn pair_features(lex: &Lexicon, question: &str, context: &str) -> TokenFeatures {
    let q: Vec<Option<String>> = tokenize(question).iter().map(|t| key(lex, t)).collect();
    let c: Vec<Option<String>> = tokenize(context).iter().map(|t| key(lex, t)).collect();
    let q_keys: BTreeSet<&str> = q.iter().flatten().map(String::as_str).collect();
    let c_keys: BTreeSet<&str> = c.iter().flatten().map(String::as_str).collect();
    let (q_syn, q_ant) = bits(lex, &q, &c_keys);
    let (c_syn, c_ant) = bits(lex, &c, &q_keys);
    TokenFeatures { tokenizer: TOKENIZER_VERSION.to_string(), q_syn, q_ant, c_syn, c_ant }
}

/// Features for every question of `corpus`, computed against its whole
/// context.
pub fn annotate_semantic_features(corpus: &Corpus, lex: &Lexicon) -> FeatureSidecar {
    let pairs: Vec<(&str, &str, &str)> = corpus
        .qas()
        .map(|(p, q)| (q.id.as_str(), q.question.as_str(), p.context.as_str()))
        .collect();
    pairs
        .par_iter()
        .map(|&(id, q, c)| (id.to_string(), pair_features(lex, q, c)))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::load_lexicon;

    fn lex() -> Lexicon {
        load_lexicon("long\t\tshort\nbig\tlarge\tsmall\n".as_bytes()).unwrap().0
    }

    #[test]
    fn antonym_bits() {
        let f = pair_features(&lex(), "long", "short wall");
        assert_eq!(f.q_ant, vec![1]);
        assert_eq!(f.c_ant, vec![1, 0]);
        assert_eq!(f.q_syn, vec![0]);
        assert_eq!(f.tokenizer, TOKENIZER_VERSION);
    }

    #[test]
    fn inflected_and_synonym_bits() {
        let f = pair_features(&lex(), "Which is the biggest?", "A large, small house.");
        assert_eq!(f.q_syn, vec![0, 0, 0, 1, 0]);
        assert_eq!(f.q_ant, vec![0, 0, 0, 1, 0]);
        assert_eq!(f.c_syn, vec![0, 1, 0, 0, 0, 0]);
        assert_eq!(f.c_ant, vec![0, 0, 0, 1, 0, 0]);
    }

    #[test]
    fn no_relation_all_zero() {
        let f = pair_features(&lex(), "Who built it?", "Tesla built a tower.");
        assert!(f.q_syn.iter().chain(&f.q_ant).chain(&f.c_syn).chain(&f.c_ant).all(|&b| b == 0));
        assert_eq!(f.q_syn.len(), 4);
        assert_eq!(f.c_syn.len(), 5);
    }
}
