//! Adversarial data generation and robustness analysis for extractive
//! question-answering corpora in the SQuAD v1.1 format.
//!
//! The crate is organised as a pipeline:
//!
//! * [`corpus`] loads, validates, segments and saves corpora with exact
//!   code-point offset bookkeeping.
//! * [`lexicon`] provides synonym/antonym lookups, answer typing and the
//!   typed pool of candidate fake answers.
//! * [`adversary`] perturbs questions, picks fake answers and rewrites the
//!   perturbed question into a declarative distractor statement.
//! * [`placement`] splices distractors into contexts, builds whole adversarial
//!   corpora and mixes them into training data.
//! * [`analysis`] measures where answers and distractors sit inside
//!   paragraphs and how suspicious each sentence slot is.
//! * [`features`] computes synonym/antonym indicator bits between question and
//!   context tokens.
//! * [`eval`] scores predictions (token F1 / exact match), aggregates the
//!   worst case over adversarial variants and ships a lexical-overlap baseline.

pub mod adversary;
pub mod analysis;
pub mod corpus;
pub mod eval;
pub mod features;
pub mod lexicon;
pub mod placement;
pub mod rng;
pub mod text;

pub use adversary::{DistractorRecord, FakeAnswerMode, GenerationConfig, SkipPolicy};
pub use corpus::{Answer, Article, Corpus, Paragraph, SentenceSpan, QA};
pub use lexicon::{AnswerType, AnswerTyper, FakeAnswerPool, Lexicon};
pub use placement::PlacementStrategy;

/// Version string embedded in every artifact written by the pipeline.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
