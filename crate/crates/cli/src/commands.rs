//! Subcommand implementations.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use advqa_core::adversary::{load_fixed_table, verbs, GenerationConfig, Resources, StatementRules, VerbTable};
use advqa_core::analysis::{
    aggregate_suspicion, location_distributions, paragraph_length_histogram, sentence_suspicion, suspicion_rows,
    uniformity_score, write_suspicion_csv, PlacementDistribution, Subject,
};
use advqa_core::corpus::{load_corpus, parse_corpus, save_corpus, validate, CorpusError};
use advqa_core::eval::{overlap_baseline_predict, score, worst_case_score, PredictionSet};
use advqa_core::features::annotate_semantic_features;
use advqa_core::lexicon::{build_fake_answer_pool, load_lexicon, BUNDLED_LOCATIONS, BUNDLED_PERSONS};
use advqa_core::placement::{generate_adversarial_corpus, mix_training, MixError};
use advqa_core::rng::stage_rng;
use advqa_core::{AnswerTyper, Article, Corpus, Lexicon, TOOL_VERSION};

use crate::config::{pick, RunConfig};
use crate::{Cli, Command, ResourceArgs, SubjectArg};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    MissingFile(PathBuf),
    Invalid(String),
    Other(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Other(_) => 1,
            CliError::Usage(_) => 2,
            CliError::MissingFile(_) => 3,
            CliError::Invalid(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::MissingFile(p) => write!(f, "no such file: {}", p.display()),
            CliError::Invalid(m) => write!(f, "invalid input: {m}"),
            CliError::Other(m) => f.write_str(m),
        }
    }
}

fn other(e: impl std::fmt::Display) -> CliError {
    CliError::Other(e.to_string())
}

pub fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    if !path.is_file() {
        return Err(CliError::MissingFile(path.to_path_buf()));
    }
    File::open(path).map(BufReader::new).map_err(other)
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Other(format!("cannot write {}: {e}", path.display())))
}

fn corpus_error(path: &Path, e: CorpusError) -> CliError {
    match e {
        CorpusError::Io(e) => CliError::Other(format!("{}: {e}", path.display())),
        e => CliError::Invalid(format!("{}: {e}", path.display())),
    }
}

fn read_corpus(path: &Path) -> Result<Corpus, CliError> {
    load_corpus(open(path)?).map_err(|e| corpus_error(path, e))
}

fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<(), CliError> {
    let mut text = serde_json::to_string(value).map_err(other)?;
    text.push('\n');
    match path {
        Some(p) => {
            let mut w = create(p)?;
            w.write_all(text.as_bytes()).map_err(other)?;
            w.flush().map_err(other)
        }
        None => std::io::stdout().write_all(text.as_bytes()).map_err(other),
    }
}

fn provenance(command: &str, config: Value) -> Value {
    json!({ "tool": "advqa", "version": TOOL_VERSION, "command": command, "config": config })
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

struct Loaded {
    lexicon: Lexicon,
    typer: AnswerTyper,
    rules: StatementRules,
}

fn load_resources(args: &ResourceArgs, run: &RunConfig) -> Result<Loaded, CliError> {
    let invalid = |p: &Path, e: &dyn std::fmt::Display| CliError::Invalid(format!("{}: {e}", p.display()));
    let lexicon = match pick(args.lexicon.clone(), &run.lexicon) {
        Some(p) => {
            let (lex, warnings) = load_lexicon(open(&p)?).map_err(|e| invalid(&p, &e))?;
            for w in warnings {
                log::warn!("{}: {w}", p.display());
            }
            lex
        }
        None => Lexicon::bundled(),
    };
    let persons = pick(args.persons.clone(), &run.persons);
    let locations = pick(args.locations.clone(), &run.locations);
    let typer = if persons.is_none() && locations.is_none() {
        AnswerTyper::bundled()
    } else {
        let read = |p: &Option<PathBuf>, bundled: &str| -> Result<String, CliError> {
            match p {
                Some(p) => std::fs::read_to_string(p).map_err(|_| CliError::MissingFile(p.clone())),
                None => Ok(bundled.to_string()),
            }
        };
        let (pe, lo) = (read(&persons, BUNDLED_PERSONS)?, read(&locations, BUNDLED_LOCATIONS)?);
        AnswerTyper::from_lists(pe.as_bytes(), lo.as_bytes()).map_err(other)?
    };
    let verbs = match pick(args.irregular_verbs.clone(), &run.irregular_verbs) {
        Some(p) => {
            let mut t = VerbTable::from_irregular_tsv(open(&p)?).map_err(|e| invalid(&p, &e))?;
            t.add_regular(verbs::BUNDLED_REGULAR.lines());
            t
        }
        None => VerbTable::bundled(),
    };
    Ok(Loaded { lexicon, typer, rules: StatementRules::new(verbs) })
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let run = RunConfig::load(cli.config.as_deref())?;
    match &cli.command {
        Command::Generate {
            input,
            output,
            log: log_path,
            pool,
            place,
            fake,
            fake_table,
            variants,
            seed,
            skip_policy,
            keep_unperturbed,
            resources,
        } => {
            let mut merged = run.clone();
            merged.strategy = pick(*place, &run.strategy);
            merged.fake_answer_mode = pick(fake.map(Into::into), &run.fake_answer_mode);
            merged.fake_table = pick(fake_table.clone(), &run.fake_table);
            merged.variants_per_question = pick(*variants, &run.variants_per_question);
            merged.seed = pick(*seed, &run.seed);
            merged.skip_policy = pick(skip_policy.map(Into::into), &run.skip_policy);
            merged.keep_unperturbed = if *keep_unperturbed { Some(true) } else { run.keep_unperturbed };
            merged.pool = pick(pool.clone(), &run.pool);
            merged.lexicon = pick(resources.lexicon.clone(), &run.lexicon);
            merged.persons = pick(resources.persons.clone(), &run.persons);
            merged.locations = pick(resources.locations.clone(), &run.locations);
            merged.irregular_verbs = pick(resources.irregular_verbs.clone(), &run.irregular_verbs);

            let defaults = GenerationConfig::default();
            let fixed_table = match &merged.fake_table {
                Some(p) => Some(load_fixed_table(open(p)?).map_err(|e| CliError::Invalid(format!("{}: {e}", p.display())))?),
                None => None,
            };
            let cfg = GenerationConfig {
                variants_per_question: merged.variants_per_question.unwrap_or(defaults.variants_per_question),
                strategy: merged.strategy.unwrap_or(defaults.strategy),
                fake_answer_mode: merged.fake_answer_mode.unwrap_or(defaults.fake_answer_mode),
                seed: merged.seed.unwrap_or(defaults.seed),
                skip_policy: merged.skip_policy.unwrap_or(defaults.skip_policy),
                keep_unperturbed: merged.keep_unperturbed.unwrap_or(defaults.keep_unperturbed),
                fixed_table,
            };
            cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;

            let loaded = load_resources(resources, &merged)?;
            let corpus = read_corpus(input)?;
            let pool_corpus = match &merged.pool {
                Some(p) => read_corpus(p)?,
                None => corpus.clone(),
            };
            let pool = build_fake_answer_pool(&pool_corpus, &loaded.typer);
            let res = Resources { lexicon: &loaded.lexicon, typer: &loaded.typer, pool: &pool, rules: &loaded.rules };
            let (mut out, gen_log) = generate_adversarial_corpus(&corpus, &cfg, res).map_err(other)?;
            out.provenance = Some(provenance(
                "generate",
                json!({ "input": path_str(input), "run": merged, "generation": cfg }),
            ));
            log::info!(
                "generated {} variants from {} questions ({} skipped attempts)",
                gen_log.records.len(),
                corpus.qa_count(),
                gen_log.skips.len()
            );
            save_corpus(&out, create(output)?).map_err(other)?;
            if let Some(p) = log_path {
                let mut w = create(p)?;
                gen_log.write_json_lines(&mut w).map_err(other)?;
                w.flush().map_err(other)?;
            }
            Ok(())
        }

        Command::Mix { original, adversarial, output, adv_fraction, seed } => {
            let fraction = pick(*adv_fraction, &run.adv_fraction).unwrap_or(0.2);
            let seed = pick(*seed, &run.seed).unwrap_or(0);
            let orig = read_corpus(original)?;
            let adv = read_corpus(adversarial)?;
            let mut rng = stage_rng(seed, "mix");
            let mut mixed = mix_training(&orig, &adv, fraction, &mut rng).map_err(|e| match e {
                MixError::Fraction(_) => CliError::Usage(e.to_string()),
                _ => other(e),
            })?;
            mixed.provenance = Some(provenance(
                "mix",
                json!({
                    "original": path_str(original),
                    "adversarial": path_str(adversarial),
                    "adv_fraction": fraction,
                    "seed": seed,
                }),
            ));
            log::info!("mixed {} original + {} adversarial questions", orig.qa_count(), mixed.qa_count() - orig.qa_count());
            save_corpus(&mixed, create(output)?).map_err(other)
        }

        Command::Analyze { input, subject, csv, summary, n_max, marginal } => {
            let n_max = pick(*n_max, &run.n_max).unwrap_or(7);
            let subject = match subject {
                SubjectArg::Answer => Subject::AnswerSentence,
                SubjectArg::Distractor => Subject::Distractor,
            };
            let corpus = read_corpus(input)?;
            let dist = location_distributions(&corpus, subject).map_err(|e| CliError::Invalid(e.to_string()))?;
            if let Some(p) = csv {
                write_suspicion_csv(&suspicion_rows(&dist, !marginal), create(p)?).map_err(other)?;
            }
            let mut by_strategy = BTreeMap::new();
            if subject == Subject::Distractor {
                // One sub-corpus per strategy; each source article maps to at
                // most one article per group.
                let mut groups: BTreeMap<String, (Corpus, usize)> = BTreeMap::new();
                for (ai, article) in corpus.articles.iter().enumerate() {
                    for p in &article.paragraphs {
                        for qa in &p.qas {
                            let key = qa.meta.as_ref().map_or(String::new(), |m| m.distractor.strategy.to_string());
                            let (c, last) = groups
                                .entry(key)
                                .or_insert_with(|| (Corpus::new(corpus.version.clone()), usize::MAX));
                            let mut single = p.clone();
                            single.qas = vec![qa.clone()];
                            if *last != ai {
                                c.articles.push(Article { title: article.title.clone(), paragraphs: Vec::new() });
                                *last = ai;
                            }
                            c.articles.last_mut().expect("pushed").paragraphs.push(single);
                        }
                    }
                }
                for (k, (c, _)) in groups {
                    let d = location_distributions(&c, subject).map_err(|e| CliError::Invalid(e.to_string()))?;
                    by_strategy.insert(k, stats(&d, n_max));
                }
            }
            let doc = json!({
                "provenance": provenance("analyze", json!({
                    "input": path_str(input),
                    "subject": subject,
                    "n_max": n_max,
                    "marginal_csv": marginal,
                })),
                "subject": subject,
                "total": dist.total(),
                "paragraph_lengths": paragraph_length_histogram(&corpus),
                "overall": stats(&dist, n_max),
                "by_strategy": by_strategy,
            });
            if let Some(agg) = doc["overall"]["aggregate"]["uniformity"].as_f64() {
                log::info!("aggregate uniformity (n <= {n_max}): {agg:.4}");
            }
            if summary.is_some() || csv.is_none() {
                write_json(&doc, summary.as_deref())?;
            }
            Ok(())
        }

        Command::Annotate { input, output, resources } => {
            let loaded = load_resources(resources, &run)?;
            let corpus = read_corpus(input)?;
            let sidecar = annotate_semantic_features(&corpus, &loaded.lexicon);
            write_json(&sidecar, Some(output))
        }

        Command::Evaluate { data, base, predictions, worst_case, output } => {
            let read_preds = |p: &Path| -> Result<PredictionSet, CliError> {
                serde_json::from_reader(open(p)?)
                    .map_err(|e| CliError::Invalid(format!("{}: {e}", p.display())))
            };
            let report = if worst_case.is_empty() {
                let Some(pred_path) = predictions else {
                    return Err(CliError::Usage("evaluate needs --predictions or --worst-case".into()));
                };
                if data.len() != 1 {
                    return Err(CliError::Usage("--predictions takes exactly one --data corpus".into()));
                }
                score(&read_corpus(&data[0])?, &read_preds(pred_path)?)
            } else {
                let Some(base) = base else {
                    return Err(CliError::Usage("--worst-case needs --base".into()));
                };
                if data.len() != 1 && data.len() != worst_case.len() {
                    return Err(CliError::Usage("give one --data per --worst-case file, or a single --data".into()));
                }
                let base = read_corpus(base)?;
                let mut sets = Vec::new();
                for (i, p) in worst_case.iter().enumerate() {
                    let d = &data[if data.len() == 1 { 0 } else { i }];
                    sets.push((read_corpus(d)?, read_preds(p)?));
                }
                worst_case_score(&base, &sets).map_err(|e| CliError::Invalid(e.to_string()))?
            };
            log::info!(
                "macro F1 {:.4}, EM {:.4}, {} missing predictions",
                report.macro_f1,
                report.macro_em,
                report.missing.len()
            );
            let mut doc = serde_json::to_value(&report).map_err(other)?;
            doc["provenance"] = provenance(
                "evaluate",
                json!({
                    "data": data.iter().map(|p| path_str(p)).collect::<Vec<_>>(),
                    "predictions": predictions.as_deref().map(path_str),
                    "worst_case": worst_case.iter().map(|p| path_str(p)).collect::<Vec<_>>(),
                }),
            );
            write_json(&doc, output.as_deref())
        }

        Command::Baseline { input, output } => {
            let corpus = read_corpus(input)?;
            write_json(&overlap_baseline_predict(&corpus), Some(output))
        }

        Command::Validate { input } => {
            let corpus = parse_corpus(open(input)?).map_err(|e| corpus_error(input, e))?;
            let report = validate(&corpus);
            report.write_json_lines(std::io::stdout().lock()).map_err(other)?;
            if report.is_empty() {
                Ok(())
            } else {
                Err(CliError::Invalid(format!("{} finding(s)", report.findings.len())))
            }
        }
    }
}

fn stats(d: &PlacementDistribution, n_max: usize) -> Value {
    let mut per_n = BTreeMap::new();
    for &n in d.by_n.keys() {
        let cond = sentence_suspicion(d, n, true).expect("length present");
        let marg = sentence_suspicion(d, n, false).expect("n >= 1");
        per_n.insert(
            n,
            json!({
                "count": d.by_n[&n].total,
                "conditional": cond.values,
                "marginal": marg.values,
                "uniformity_conditional": uniformity_score(&cond).ok(),
                "uniformity_marginal": uniformity_score(&marg).ok(),
            }),
        );
    }
    let aggregate = aggregate_suspicion(d, n_max)
        .ok()
        .map(|v| json!({ "values": v.values.clone(), "uniformity": uniformity_score(&v).ok() }));
    json!({ "total": d.total(), "per_n": per_n, "aggregate": aggregate })
}
