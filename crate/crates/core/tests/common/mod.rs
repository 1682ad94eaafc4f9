//! Shared helpers: a template-driven synthetic corpus with a SQuAD-like spread
//! of paragraph lengths, plus owned resources.

#![allow(dead_code)]

use advqa_core::adversary::{Resources, StatementRules};
use advqa_core::lexicon::build_fake_answer_pool;
use advqa_core::{Answer, AnswerTyper, Article, Corpus, FakeAnswerPool, Lexicon, Paragraph, QA};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const PERSONS: &[&str] = &[
    "Nikola Tesla", "Thomas Edison", "Albert Einstein", "Isaac Newton", "Charles Darwin", "William Shakespeare",
    "Frédéric Chopin", "Abraham Lincoln", "Winston Churchill", "Marie Curie", "Alan Turing", "Ada Lovelace",
    "Grace Hopper", "Karl Marx", "Nelson Mandela", "Leonardo da Vinci", "Benjamin Franklin", "Julius Caesar",
];

pub const PLACES: &[&str] = &[
    "Chicago", "Prague", "Paris", "London", "Berlin", "Vienna", "Rome", "Madrid", "Lisbon", "Dublin", "Warsaw",
    "Budapest", "Kraków", "Geneva", "Zurich", "Amsterdam", "Tokyo", "Boston", "New York", "San Francisco",
];

const ADJECTIVES: &[&str] = &[
    "large", "small", "old", "new", "tall", "wide", "narrow", "deep", "heavy", "strong", "rich", "poor", "famous",
    "public", "private", "modern", "ancient",
];

const NOUNS: &[&str] = &["tower", "bridge", "library", "museum", "church", "factory", "garden", "theatre", "hall"];

const FIELDS: &[&str] = &[
    "physics", "chemistry", "music", "law", "medicine", "painting", "architecture", "engineering", "philosophy",
    "mathematics",
];

const FILLERS: &[&str] = &[
    "The {adj} {noun} still attracts many visitors.",
    "Its walls were painted white during the restoration.",
    "Local newspapers reported on the project for weeks.",
    "The {noun} was closed to the public for a decade.",
    "Critics praised the {adj} design of the building.",
    "Several smaller projects followed in the same district.",
    "A {adj} garden surrounds the site today.",
    "Historians still debate the details of its funding.",
    "Most of the original drawings were lost.",
    "The city council approved a second phase.",
];

/// Sentences per paragraph, roughly as in the SQuAD training set.
const LENGTH_WEIGHTS: &[(usize, u32)] =
    &[(1, 3), (2, 6), (3, 11), (4, 15), (5, 17), (6, 15), (7, 12), (8, 9), (9, 6), (10, 4), (11, 2)];

pub fn squad_like_length(rng: &mut impl Rng) -> usize {
    LENGTH_WEIGHTS.choose_weighted(rng, |w| w.1).expect("weights").0
}

fn fill(template: &str, adj: &str, noun: &str) -> String {
    template.replace("{adj}", adj).replace("{noun}", noun)
}

/// One answer sentence with the questions it supports:
/// (sentence, [(question, answer)]).
fn answer_sentence(rng: &mut ChaCha8Rng) -> (String, Vec<(String, String)>) {
    let p = *PERSONS.choose(rng).unwrap();
    let l = *PLACES.choose(rng).unwrap();
    let adj = *ADJECTIVES.choose(rng).unwrap();
    let noun = *NOUNS.choose(rng).unwrap();
    let year = rng.random_range(1700..2000).to_string();
    match rng.random_range(0..5) {
        0 => (
            format!("{p} built the {adj} {noun} in {l} in {year}."),
            vec![
                (format!("Who built the {adj} {noun} in {l}?"), p.to_string()),
                (format!("When did {p} build the {adj} {noun}?"), year),
            ],
        ),
        1 => (format!("{p} was born in {l} in {year}."), vec![(format!("Where was {p} born?"), l.to_string())]),
        2 => {
            let num = rng.random_range(2..90).to_string();
            (
                format!("{p} wrote {num} {adj} letters to friends in {l}."),
                vec![(format!("How many {adj} letters did {p} write?"), num)],
            )
        }
        3 => {
            let field = *FIELDS.choose(rng).unwrap();
            (
                format!("{p} studied {field} at the {adj} school in {l}."),
                vec![(format!("What did {p} study at the {adj} school?"), field.to_string())],
            )
        }
        _ => (
            format!("The {adj} {noun} was designed by {p} in {year}."),
            vec![(format!("Who designed the {adj} {noun}?"), p.to_string())],
        ),
    }
}

/// Deterministic synthetic corpus of `paragraphs` paragraphs spread over
/// articles of ten.
pub fn synthetic_corpus(seed: u64, paragraphs: usize) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut corpus = Corpus::new("1.1");
    for pi in 0..paragraphs {
        if pi % 10 == 0 {
            corpus.articles.push(Article { title: format!("Synthetic_{}", pi / 10), paragraphs: Vec::new() });
        }
        let n = squad_like_length(&mut rng);
        let answered = rng.random_range(1..=n.min(3));
        let mut sentences: Vec<(String, Vec<(String, String)>)> =
            (0..answered).map(|_| answer_sentence(&mut rng)).collect();
        for _ in answered..n {
            let adj = *ADJECTIVES.choose(&mut rng).unwrap();
            let noun = *NOUNS.choose(&mut rng).unwrap();
            sentences.push((fill(FILLERS.choose(&mut rng).unwrap(), adj, noun), Vec::new()));
        }
        sentences.shuffle(&mut rng);

        let mut context = String::new();
        let mut qas = Vec::new();
        for (sentence, questions) in sentences {
            if !context.is_empty() {
                context.push(' ');
            }
            let base = context.chars().count();
            for (question, answer) in questions {
                let byte = sentence.find(&answer).expect("answer inside its sentence");
                let start = base + sentence[..byte].chars().count();
                qas.push(QA {
                    id: format!("syn{pi:04}q{}", qas.len()),
                    question,
                    answers: vec![Answer { answer_start: start, text: answer }],
                    meta: None,
                });
            }
            context.push_str(&sentence);
        }
        corpus.articles.last_mut().unwrap().paragraphs.push(Paragraph::new(context, qas));
    }
    corpus
}

pub struct Owned {
    pub lexicon: Lexicon,
    pub typer: AnswerTyper,
    pub pool: FakeAnswerPool,
    pub rules: StatementRules,
}

impl Owned {
    pub fn for_corpus(corpus: &Corpus) -> Owned {
        let typer = AnswerTyper::bundled();
        let pool = build_fake_answer_pool(corpus, &typer);
        Owned { lexicon: Lexicon::bundled(), typer, pool, rules: StatementRules::default() }
    }

    pub fn resources(&self) -> Resources<'_> {
        Resources { lexicon: &self.lexicon, typer: &self.typer, pool: &self.pool, rules: &self.rules }
    }
}

pub fn fixture() -> Corpus {
    let text = include_str!("../../data/fixture_corpus.json");
    advqa_core::corpus::load_corpus(text.as_bytes()).expect("fixture loads")
}
