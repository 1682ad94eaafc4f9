//! Distractor generation: perturb the question, pick a type-matched fake
//! answer, rewrite the pair as a statement and splice it into a copy of the
//! paragraph.

pub mod perturb;
pub mod synth;
pub mod verbs;

use std::collections::BTreeMap;
use std::io::{Read, Write};

use rand::seq::IndexedRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{variant_id, AdversarialMeta, Paragraph, QA};
use crate::lexicon::{AnswerType, AnswerTyper, FakeAnswerPool, Lexicon, LexiconError};
use crate::placement::{insert_distractor, PlacementStrategy};
use crate::rng::{derive_rng, Rng};

pub use perturb::{perturb_question, Perturbation, PerturbationKind, PerturbationLog};
pub use synth::{Rule, Statement, StatementRules};
pub use verbs::VerbTable;

/// Hard cap on variants generated per question.
pub const MAX_VARIANTS: u32 = 16;

#[derive(Debug, Error)]
pub enum GenerationError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("no eligible fake answer of type {ty} for `{answer}`")]
    NoFakeAnswer { answer: String, ty: AnswerType },
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FakeAnswerMode {
    Fixed,
    #[default]
    Dynamic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SkipPolicy {
    #[default]
    SkipAndLog,
    FallbackTemplate,
}

/// Per-type fake answers for [`FakeAnswerMode::Fixed`].
pub type FixedTable = BTreeMap<AnswerType, String>;

fn parse_table(src: &str) -> Result<FixedTable, GenerationError> {
    serde_json::from_str(src).map_err(|e| GenerationError::Config(format!("fake answer table: {e}")))
}

/// The bundled per-type table (a Chicago-for-every-location style set).
pub fn bundled_fixed_table() -> FixedTable {
    parse_table(include_str!("../../data/fixed_fake_answers.json")).expect("bundled table parses")
}

/// A second, disjoint per-type table.
pub fn alternate_fixed_table() -> FixedTable {
    parse_table(include_str!("../../data/alternate_fake_answers.json")).expect("bundled table parses")
}

/// Read a JSON object mapping type names (`PERSON`, `LOCATION`, ...) to strings.
pub fn load_fixed_table<R: Read>(mut source: R) -> Result<FixedTable, GenerationError> {
    let mut s = String::new();
    source.read_to_string(&mut s)?;
    parse_table(&s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerationConfig {
    pub variants_per_question: u32,
    pub strategy: PlacementStrategy,
    pub fake_answer_mode: FakeAnswerMode,
    pub seed: u64,
    pub skip_policy: SkipPolicy,
    /// Keep variants whose question could not be perturbed.
    pub keep_unperturbed: bool,
    /// Table for fixed mode; `None` uses [`bundled_fixed_table`].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed_table: Option<FixedTable>,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig {
            variants_per_question: 4,
            strategy: PlacementStrategy::Random,
            fake_answer_mode: FakeAnswerMode::Dynamic,
            seed: 0,
            skip_policy: SkipPolicy::SkipAndLog,
            keep_unperturbed: false,
            fixed_table: None,
        }
    }
}

impl GenerationConfig {
    pub fn validate(&self) -> Result<(), GenerationError> {
        if self.variants_per_question == 0 || self.variants_per_question > MAX_VARIANTS {
            return Err(GenerationError::Config(format!(
                "variants_per_question must be in 1..={MAX_VARIANTS}, got {}",
                self.variants_per_question
            )));
        }
        if let PlacementStrategy::FixedIndex(0) = self.strategy {
            return Err(GenerationError::Config("fixed placement index must be >= 1".into()));
        }
        Ok(())
    }

    pub fn table(&self) -> FixedTable {
        self.fixed_table.clone().unwrap_or_else(bundled_fixed_table)
    }
}

/// Provenance of one generated distractor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistractorRecord {
    pub base_qa_id: String,
    pub variant_index: u32,
    pub perturbed_question: String,
    pub fake_answer: String,
    pub fake_answer_type: AnswerType,
    pub statement: String,
    pub rule: Rule,
    pub strategy: PlacementStrategy,
    /// 1-based sentence index of the statement in the variant paragraph.
    pub insertion_index: usize,
    pub perturbations: PerturbationLog,
    /// Global generation seed.
    pub seed: u64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub unperturbed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkipReason {
    NoFakeAnswer,
    Unperturbed,
    NoRule,
    GoldLeak,
    Unsegmentable,
}

/// A variant that was not generated, and why.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkipRecord {
    pub qa_id: String,
    pub variant_index: u32,
    pub reason: SkipReason,
    pub detail: String,
}

/// Read-only resources shared by every generation call.
#[derive(Debug, Clone, Copy)]
pub struct Resources<'a> {
    pub lexicon: &'a Lexicon,
    pub typer: &'a AnswerTyper,
    pub pool: &'a FakeAnswerPool,
    pub rules: &'a StatementRules,
}

/// `table[t]`, or a configuration error when the table lacks `t`.
pub fn generate_fake_answer_fixed(t: AnswerType, table: &FixedTable) -> Result<String, GenerationError> {
    table
        .get(&t)
        .cloned()
        .ok_or_else(|| GenerationError::Config(format!("fixed fake answer table has no {t} entry")))
}

fn pick_dynamic(
    golds: &[&str],
    ty: AnswerType,
    pool: &FakeAnswerPool,
    rng: &mut Rng,
) -> Result<String, GenerationError> {
    let lowered: Vec<String> = golds.iter().map(|g| g.to_lowercase()).collect();
    let eligible: Vec<&str> = pool
        .eligible(ty, golds)
        .into_iter()
        .filter(|c| {
            let lc = c.to_lowercase();
            !lowered.iter().any(|g| lc.contains(g.as_str()))
        })
        .collect();
    eligible.choose(rng).map(|s| s.to_string()).ok_or_else(|| GenerationError::NoFakeAnswer {
        answer: golds.first().copied().unwrap_or_default().to_string(),
        ty,
    })
}

/// Uniform draw from the same-type pool entries that differ from `answer`.
pub fn generate_fake_answer_dynamic(
    answer: &str,
    typer: &AnswerTyper,
    pool: &FakeAnswerPool,
    rng: &mut Rng,
) -> Result<String, GenerationError> {
    let ty = typer.classify(answer)?;
    let eligible = pool.eligible(ty, &[answer]);
    eligible
        .choose(rng)
        .map(|s| s.to_string())
        .ok_or_else(|| GenerationError::NoFakeAnswer { answer: answer.to_string(), ty })
}

/// Rewrite `question` + `fake_answer` as a statement; `None` means skip.
pub fn synthesize_distractor(
    rules: &StatementRules,
    perturbed_question: &str,
    fake_answer: &str,
    fake_type: AnswerType,
    policy: SkipPolicy,
) -> Option<Statement> {
    rules.synthesize(perturbed_question, fake_answer, fake_type).or_else(|| match policy {
        SkipPolicy::SkipAndLog => None,
        SkipPolicy::FallbackTemplate => Some(rules.fallback(perturbed_question, fake_answer)),
    })
}

/// Variants generated for one question plus the attempts that were skipped.
#[derive(Debug, Clone, Default)]
pub struct VariantOutcome {
    pub variants: Vec<(Paragraph, QA, DistractorRecord)>,
    pub skips: Vec<SkipRecord>,
}

/// Build up to `cfg.variants_per_question` adversarial copies of `paragraph`,
/// each holding only `qa` (renamed `<id>-adv<k>`) and one distractor.
///
/// Variant `k` draws everything from a generator keyed by
/// `(cfg.seed, qa.id, k)`.
pub fn make_adversarial_variants(
    paragraph: &Paragraph,
    qa: &QA,
    cfg: &GenerationConfig,
    res: Resources<'_>,
) -> Result<VariantOutcome, GenerationError> {
    cfg.validate()?;
    let mut out = VariantOutcome::default();
    let skip = |k: u32, reason: SkipReason, detail: String| SkipRecord {
        qa_id: qa.id.clone(),
        variant_index: k,
        reason,
        detail,
    };
    let Some(gold) = qa.answers.first() else {
        return Ok(out);
    };
    let golds: Vec<&str> = qa.answers.iter().map(|a| a.text.as_str()).collect();
    let gold_type = res.typer.classify(&gold.text)?;
    let table = match cfg.fake_answer_mode {
        FakeAnswerMode::Fixed => Some(cfg.table()),
        FakeAnswerMode::Dynamic => None,
    };
    let mut single = paragraph.clone();
    single.qas = vec![QA { meta: None, ..qa.clone() }];

    for k in 1..=cfg.variants_per_question {
        let mut rng = derive_rng(cfg.seed, &qa.id, u64::from(k));
        let (perturbed, log) = perturb_question(&qa.question, res.lexicon, res.typer, res.pool, &mut rng);
        if log.is_empty() && !cfg.keep_unperturbed {
            out.skips.push(skip(k, SkipReason::Unperturbed, "no applicable swap".into()));
            continue;
        }
        let fake = match &table {
            Some(t) => generate_fake_answer_fixed(gold_type, t)?,
            None => match pick_dynamic(&golds, gold_type, res.pool, &mut rng) {
                Ok(f) => f,
                Err(e) => {
                    out.skips.push(skip(k, SkipReason::NoFakeAnswer, e.to_string()));
                    continue;
                }
            },
        };
        let Some(statement) = synthesize_distractor(res.rules, &perturbed, &fake, gold_type, cfg.skip_policy) else {
            out.skips.push(skip(k, SkipReason::NoRule, perturbed.clone()));
            continue;
        };
        let lower = statement.text.to_lowercase();
        if !statement.text.contains(&fake) || golds.iter().any(|g| lower.contains(&g.to_lowercase())) {
            out.skips.push(skip(k, SkipReason::GoldLeak, statement.text.clone()));
            continue;
        }
        let (mut variant, index) = match insert_distractor(&single, &statement.text, cfg.strategy, &mut rng) {
            Ok(v) => v,
            Err(e) => {
                out.skips.push(skip(k, SkipReason::Unsegmentable, e.to_string()));
                continue;
            }
        };
        let record = DistractorRecord {
            base_qa_id: qa.id.clone(),
            variant_index: k,
            perturbed_question: perturbed,
            fake_answer: fake,
            fake_answer_type: gold_type,
            statement: statement.text,
            rule: statement.rule,
            strategy: cfg.strategy,
            insertion_index: index,
            unperturbed: log.is_empty(),
            perturbations: log,
            seed: cfg.seed,
        };
        let mut vqa = variant.qas.pop().expect("single-question paragraph");
        vqa.id = variant_id(&qa.id, k);
        vqa.meta = Some(AdversarialMeta { variant_of: qa.id.clone(), variant_index: k, distractor: record.clone() });
        variant.qas = vec![vqa.clone()];
        out.variants.push((variant, vqa, record));
    }
    Ok(out)
}

/// Records and skips of a whole generation run, in corpus order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GenerationLog {
    pub records: Vec<DistractorRecord>,
    pub skips: Vec<SkipRecord>,
}

impl GenerationLog {
    /// One JSON object per line: every record, then every skip.
    pub fn write_json_lines<W: Write>(&self, mut sink: W) -> std::io::Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut sink, r)?;
            sink.write_all(b"\n")?;
        }
        for s in &self.skips {
            serde_json::to_writer(&mut sink, &serde_json::json!({ "skip": s }))?;
            sink.write_all(b"\n")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Answer;
    use crate::rng::derive_rng;

    #[test]
    fn dynamic_fake_answers() {
        let typer = AnswerTyper::bundled();
        let pool = FakeAnswerPool::from_answers(&typer, ["Prague", "Chicago"]).unwrap();
        let mut rng = derive_rng(1, "q", 1);
        assert_eq!(generate_fake_answer_dynamic("Prague", &typer, &pool, &mut rng).unwrap(), "Chicago");
        let only = FakeAnswerPool::from_answers(&typer, ["Prague"]).unwrap();
        assert!(matches!(
            generate_fake_answer_dynamic("Prague", &typer, &only, &mut rng),
            Err(GenerationError::NoFakeAnswer { .. })
        ));
        let big = FakeAnswerPool::from_answers(&typer, ["Prague", "Chicago", "Dublin", "Paris", "Rome"]).unwrap();
        let a = generate_fake_answer_dynamic("Prague", &typer, &big, &mut derive_rng(9, "x", 1)).unwrap();
        let b = generate_fake_answer_dynamic("Prague", &typer, &big, &mut derive_rng(9, "x", 1)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fixed_fake_answers() {
        let table = bundled_fixed_table();
        assert_eq!(generate_fake_answer_fixed(AnswerType::Location, &table).unwrap(), "Chicago");
        let mut partial = table.clone();
        partial.remove(&AnswerType::Date);
        assert!(matches!(generate_fake_answer_fixed(AnswerType::Date, &partial), Err(GenerationError::Config(_))));
        let mut custom = FixedTable::new();
        custom.insert(AnswerType::Person, "Grace Hopper".into());
        assert_eq!(generate_fake_answer_fixed(AnswerType::Person, &custom).unwrap(), "Grace Hopper");
    }

    #[test]
    fn config_limits_and_serde() {
        let mut cfg = GenerationConfig::default();
        assert_eq!(cfg.variants_per_question, 4);
        cfg.variants_per_question = 17;
        assert!(cfg.validate().is_err());
        let cfg: GenerationConfig = serde_json::from_str(r#"{"strategy":"fixed:6","fake_answer_mode":"fixed","seed":7}"#).unwrap();
        assert_eq!(cfg.strategy, PlacementStrategy::FixedIndex(6));
        assert_eq!(cfg.fake_answer_mode, FakeAnswerMode::Fixed);
        assert!(serde_json::from_str::<GenerationConfig>(r#"{"bogus":1}"#).is_err());
    }

    fn tesla() -> (Paragraph, QA) {
        let context = "Tesla was born in Smiljan. He moved to Prague in 1880. Tesla moved to New York in 1884.";
        let qa = QA {
            id: "q1".into(),
            question: "Where did Tesla move in 1884?".into(),
            answers: vec![Answer { answer_start: 70, text: "New York".into() }],
            meta: None,
        };
        (Paragraph::new(context.into(), vec![qa.clone()]), qa)
    }

    #[test]
    fn one_variant_end_to_end() {
        let (p, qa) = tesla();
        let typer = AnswerTyper::bundled();
        let pool = FakeAnswerPool::from_answers(&typer, ["New York", "Chicago", "Tesla", "Edison", "1884", "1901"]).unwrap();
        let lex = Lexicon::bundled();
        let rules = StatementRules::default();
        let res = Resources { lexicon: &lex, typer: &typer, pool: &pool, rules: &rules };
        let cfg = GenerationConfig { variants_per_question: 1, seed: 3, ..Default::default() };
        let out = make_adversarial_variants(&p, &qa, &cfg, res).unwrap();
        assert_eq!(out.variants.len(), 1, "{:?}", out.skips);
        let (vp, vqa, rec) = &out.variants[0];
        assert!(vp.context.contains(&rec.statement));
        assert_eq!(vqa.id, "q1-adv1");
        assert_eq!(vqa.question, qa.question);
        assert!(rec.statement.contains("Chicago"));
        let a = &vqa.answers[0];
        assert_eq!(crate::text::char_substring(&vp.context, a.answer_start, a.text.chars().count()), Some("New York"));
        assert_eq!(vp.sentence_text(rec.insertion_index - 1), Some(rec.statement.as_str()));
        let again = make_adversarial_variants(&p, &qa, &cfg, res).unwrap();
        assert_eq!(again.variants, out.variants);
    }

    #[test]
    fn unmatched_question_is_skipped() {
        let (p, mut qa) = tesla();
        qa.question = "Tesla 1884?".into();
        let typer = AnswerTyper::bundled();
        let pool = FakeAnswerPool::from_answers(&typer, ["New York", "Chicago", "Tesla", "Edison", "1884", "1901"]).unwrap();
        let lex = Lexicon::bundled();
        let rules = StatementRules::default();
        let res = Resources { lexicon: &lex, typer: &typer, pool: &pool, rules: &rules };
        let cfg = GenerationConfig { variants_per_question: 2, ..Default::default() };
        let out = make_adversarial_variants(&p, &qa, &cfg, res).unwrap();
        assert!(out.variants.is_empty());
        assert_eq!(out.skips.len(), 2);
        assert!(out.skips.iter().all(|s| s.reason == SkipReason::NoRule));
    }
}
