//! Lexical-semantic lookups, answer typing and the typed fake-answer pool.
//!
//! The lexicon is a lemma → (synonyms, antonyms) table read from a TSV file
//! (`lemma<TAB>syn1,syn2<TAB>ant1,ant2`). Answer typing uses gazetteers plus a
//! handful of surface patterns so that it is reproducible without a tagger.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Corpus;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed lexicon row at line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("cannot classify an empty answer")]
    EmptyAnswer,
    #[error("unknown answer type `{0}`")]
    UnknownType(String),
    #[error("pool entry `{text}` classifies as {actual}, not {bucket}")]
    PoolTypeMismatch { text: String, bucket: AnswerType, actual: AnswerType },
}

static EMPTY: BTreeSet<String> = BTreeSet::new();

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexEntry {
    pub synonyms: BTreeSet<String>,
    pub antonyms: BTreeSet<String>,
}

/// Lowercase lemma → synonyms and antonyms. Both relations are symmetric.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: BTreeMap<String, LexEntry>,
}

/// Problems tolerated while loading a lexicon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LexiconWarning {
    SelfRelation { line: usize, lemma: String, relation: &'static str },
}

impl fmt::Display for LexiconWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LexiconWarning::SelfRelation { line, lemma, relation } => {
                write!(f, "line {line}: dropped `{lemma}` listed as its own {relation}")
            }
        }
    }
}

/// Suffixes the lookup morphology knows how to strip and re-attach.
const SUFFIXES: &[&str] = &["est", "er", "ly"];

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u')
}

fn vowel_groups(s: &str) -> usize {
    let mut groups = 0;
    let mut prev = false;
    for c in s.chars() {
        let v = is_vowel(c);
        if v && !prev {
            groups += 1;
        }
        prev = v;
    }
    groups
}

/// Attach an inflectional suffix with the usual spelling repairs
/// (`big → biggest`, `happy → happiest`, `large → largest`).
pub fn inflect(base: &str, suffix: &str) -> String {
    let chars: Vec<char> = base.chars().collect();
    let n = chars.len();
    if n == 0 {
        return suffix.to_string();
    }
    let last = chars[n - 1];
    if last == 'e' && suffix.starts_with('e') {
        return format!("{}{}", &base[..base.len() - 1], suffix);
    }
    if last == 'y' && n >= 2 && !is_vowel(chars[n - 2]) {
        return format!("{}i{}", &base[..base.len() - 1], suffix);
    }
    let vowel_suffix = suffix.chars().next().is_some_and(is_vowel);
    if vowel_suffix
        && n >= 3
        && vowel_groups(base) == 1
        && !is_vowel(last)
        && !matches!(last, 'w' | 'x' | 'y')
        && is_vowel(chars[n - 2])
        && !is_vowel(chars[n - 3])
    {
        return format!("{base}{last}{suffix}");
    }
    format!("{base}{suffix}")
}

fn strip_candidates(stem: &str) -> Vec<String> {
    let mut out = vec![stem.to_string()];
    let chars: Vec<char> = stem.chars().collect();
    let n = chars.len();
    if n >= 2 && chars[n - 1] == chars[n - 2] && !is_vowel(chars[n - 1]) {
        out.push(chars[..n - 1].iter().collect());
    }
    if chars.last() == Some(&'i') {
        out.push(format!("{}y", &stem[..stem.len() - 1]));
    }
    out.push(format!("{stem}e"));
    out
}

impl Lexicon {
    /// The small lexicon bundled with the crate.
    pub fn bundled() -> Lexicon {
        let (lex, _) = load_lexicon(BUNDLED_LEXICON.as_bytes())
            .expect("bundled lexicon is well-formed");
        lex
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lemmas(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn entry(&self, lemma: &str) -> Option<&LexEntry> {
        self.entries.get(lemma)
    }

    /// Resolve a surface word to a lexicon key, case-folding and stripping
    /// `-est`/`-er`/`-ly` when the bare form is unknown. Returns the key and
    /// the stripped suffix.
    pub fn analyze(&self, word: &str) -> Option<(&str, Option<&'static str>)> {
        let lower = word.to_lowercase();
        if let Some((k, _)) = self.entries.get_key_value(&lower) {
            return Some((k.as_str(), None));
        }
        for &suffix in SUFFIXES {
            let Some(stem) = lower.strip_suffix(suffix) else { continue };
            if stem.chars().count() < 2 {
                continue;
            }
            for cand in strip_candidates(stem) {
                if let Some((k, _)) = self.entries.get_key_value(&cand) {
                    return Some((k.as_str(), Some(suffix)));
                }
            }
        }
        None
    }

    /// Lexicon key for `word`, if any.
    pub fn lemma(&self, word: &str) -> Option<&str> {
        self.analyze(word).map(|(k, _)| k)
    }

    pub fn synonyms(&self, word: &str) -> &BTreeSet<String> {
        self.lemma(word).and_then(|k| self.entries.get(k)).map_or(&EMPTY, |e| &e.synonyms)
    }

    pub fn antonyms(&self, word: &str) -> &BTreeSet<String> {
        self.lemma(word).and_then(|k| self.entries.get(k)).map_or(&EMPTY, |e| &e.antonyms)
    }
}

fn split_list(field: &str) -> impl Iterator<Item = String> + '_ {
    field
        .split(',')
        .map(|s| s.trim().to_lowercase().replace('_', " "))
        .filter(|s| !s.is_empty())
}

/// Read a lexicon TSV. Antonym and synonym relations are closed
/// symmetrically; self-relations are dropped with a warning.
pub fn load_lexicon<R: BufRead>(source: R) -> Result<(Lexicon, Vec<LexiconWarning>), LexiconError> {
    let mut entries: BTreeMap<String, LexEntry> = BTreeMap::new();
    let mut warnings = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(LexiconError::MalformedRow {
                line: line_no,
                reason: format!("expected 3 tab-separated fields, found {}", fields.len()),
            });
        }
        let lemma = fields[0].trim().to_lowercase().replace('_', " ");
        if lemma.is_empty() {
            return Err(LexiconError::MalformedRow { line: line_no, reason: "empty lemma".into() });
        }
        let mut entry = LexEntry::default();
        for (field, set, relation) in [
            (fields[1], &mut entry.synonyms, "synonym"),
            (fields[2], &mut entry.antonyms, "antonym"),
        ] {
            for item in split_list(field) {
                if item == lemma {
                    let w = LexiconWarning::SelfRelation { line: line_no, lemma: lemma.clone(), relation };
                    log::warn!("{w}");
                    warnings.push(w);
                } else {
                    set.insert(item);
                }
            }
        }
        let slot = entries.entry(lemma).or_default();
        slot.synonyms.extend(entry.synonyms);
        slot.antonyms.extend(entry.antonyms);
    }

    let mut closure: Vec<(String, String, bool)> = Vec::new();
    for (lemma, e) in &entries {
        closure.extend(e.antonyms.iter().map(|a| (a.clone(), lemma.clone(), true)));
        closure.extend(e.synonyms.iter().map(|s| (s.clone(), lemma.clone(), false)));
    }
    for (target, lemma, antonym) in closure {
        let slot = entries.entry(target).or_default();
        if antonym {
            slot.antonyms.insert(lemma);
        } else {
            slot.synonyms.insert(lemma);
        }
    }
    Ok((Lexicon { entries }, warnings))
}

/// Coarse answer category used to match fake answers to gold answers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AnswerType {
    Person,
    Location,
    Date,
    Number,
    Entity,
    Common,
}

impl AnswerType {
    pub const ALL: [AnswerType; 6] = [
        AnswerType::Person,
        AnswerType::Location,
        AnswerType::Date,
        AnswerType::Number,
        AnswerType::Entity,
        AnswerType::Common,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AnswerType::Person => "PERSON",
            AnswerType::Location => "LOCATION",
            AnswerType::Date => "DATE",
            AnswerType::Number => "NUMBER",
            AnswerType::Entity => "ENTITY",
            AnswerType::Common => "COMMON",
        }
    }
}

impl fmt::Display for AnswerType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AnswerType {
    type Err = LexiconError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AnswerType::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| LexiconError::UnknownType(s.to_string()))
    }
}

const MONTHS: &[&str] = &[
    "january", "february", "march", "april", "may", "june", "july", "august", "september",
    "october", "november", "december",
];
const WEEKDAYS: &[&str] = &["monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"];
const DATE_FILLERS: &[&str] = &[
    "the", "early", "late", "mid", "circa", "c.", "century", "centuries", "and", "to", "-", "–",
    "ad", "bc", "bce", "ce", "a.d.", "b.c.", "in", "of", "around", "about", "between", "from",
];
pub(crate) const NUMBER_WORDS: &[&str] = &[
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
    "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen",
    "nineteen", "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety",
    "hundred", "thousand", "million", "billion", "trillion", "dozen", "half", "first", "second",
    "third", "fourth", "fifth", "sixth", "seventh", "eighth", "ninth", "tenth",
];
const HONORIFICS: &[&str] = &[
    "mr.", "mrs.", "ms.", "dr.", "mr", "mrs", "ms", "dr", "sir", "lord", "lady", "king", "queen",
    "prince", "princess", "president", "pope", "general", "captain", "professor", "prof.",
    "emperor", "empress", "saint",
];
const LOCATION_CUES: &[&str] = &[
    "river", "lake", "mountain", "mountains", "island", "islands", "ocean", "sea", "bay", "valley",
    "county", "province", "city", "street", "square", "desert", "peninsula", "strait", "gulf",
    "canyon", "state", "republic", "kingdom",
];
const NAME_CONNECTORS: &[&str] = &["de", "da", "di", "von", "van", "der", "del", "la", "le", "of"];

fn clean(tok: &str) -> &str {
    tok.trim_matches(|c: char| !c.is_alphanumeric() && c != '.' && c != '%' && c != '$')
        .trim_end_matches([',', ';', ':'])
}

fn is_year(tok: &str) -> bool {
    tok.len() == 4 && tok.bytes().all(|b| b.is_ascii_digit())
}

fn is_decade(tok: &str) -> bool {
    let t = tok.trim_start_matches('\'');
    t.len() >= 3
        && t.ends_with('s')
        && t[..t.len() - 1].bytes().all(|b| b.is_ascii_digit())
        && t[..t.len() - 1].ends_with('0')
}

fn is_date_shape(tok: &str) -> bool {
    let parts: Vec<&str> = tok.split(['/', '-']).collect();
    parts.len() == 3 && parts.iter().all(|p| !p.is_empty() && p.len() <= 4 && p.bytes().all(|b| b.is_ascii_digit()))
}

fn is_ordinal_digits(tok: &str) -> bool {
    let lower = tok.to_lowercase();
    ["st", "nd", "rd", "th"].iter().any(|s| {
        lower
            .strip_suffix(s)
            .is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
    })
}

/// Digit strings with optional grouping, decimals, currency or percent.
pub(crate) fn is_numeric_token(tok: &str) -> bool {
    let t = tok.trim_start_matches(['$', '£', '€', '~', '+', '-']).trim_end_matches('%');
    !t.is_empty()
        && t.bytes().any(|b| b.is_ascii_digit())
        && t.bytes().all(|b| b.is_ascii_digit() || b == b',' || b == b'.')
}

pub(crate) fn is_number_word(tok: &str) -> bool {
    let lower = tok.to_lowercase();
    lower
        .split('-')
        .all(|part| NUMBER_WORDS.contains(&part))
}

fn is_capitalized(tok: &str) -> bool {
    tok.chars().next().is_some_and(char::is_uppercase)
}

/// Bundled person gazetteer.
pub const BUNDLED_PERSONS: &str = include_str!("../data/persons.txt");
/// Bundled location gazetteer.
pub const BUNDLED_LOCATIONS: &str = include_str!("../data/locations.txt");
/// Bundled lexicon TSV.
pub const BUNDLED_LEXICON: &str = include_str!("../data/lexicon.tsv");

/// Gazetteer-backed answer classifier.
#[derive(Debug, Clone, Default)]
pub struct AnswerTyper {
    persons: HashSet<String>,
    locations: HashSet<String>,
}

fn read_list<R: BufRead>(r: R) -> Result<HashSet<String>, LexiconError> {
    let mut out = HashSet::new();
    for line in r.lines() {
        let line = line?;
        let t = line.trim();
        if !t.is_empty() && !t.starts_with('#') {
            out.insert(t.to_lowercase());
        }
    }
    Ok(out)
}

impl AnswerTyper {
    /// Classifier over the bundled `persons.txt` / `locations.txt` lists.
    pub fn bundled() -> AnswerTyper {
        AnswerTyper::from_lists(BUNDLED_PERSONS.as_bytes(), BUNDLED_LOCATIONS.as_bytes())
        .expect("bundled gazetteers are readable")
    }

    pub fn from_lists<P: BufRead, L: BufRead>(persons: P, locations: L) -> Result<AnswerTyper, LexiconError> {
        Ok(AnswerTyper { persons: read_list(persons)?, locations: read_list(locations)? })
    }

    pub fn is_person_name(&self, s: &str) -> bool {
        self.persons.contains(&s.to_lowercase())
    }

    pub fn is_location_name(&self, s: &str) -> bool {
        self.locations.contains(&s.to_lowercase())
    }

    /// Total classification with precedence
    /// DATE > NUMBER > PERSON > LOCATION > ENTITY > COMMON.
    pub fn classify(&self, answer: &str) -> Result<AnswerType, LexiconError> {
        let s = answer.trim();
        if s.is_empty() {
            return Err(LexiconError::EmptyAnswer);
        }
        let toks: Vec<&str> = s.split_whitespace().map(clean).filter(|t| !t.is_empty()).collect();
        if toks.is_empty() {
            return Ok(AnswerType::Common);
        }
        let lower: Vec<String> = toks.iter().map(|t| t.to_lowercase()).collect();
        let lower_trimmed: Vec<&str> = lower.iter().map(|t| t.trim_end_matches('.')).collect();

        // DATE
        if lower_trimmed.iter().any(|t| MONTHS.contains(t) || WEEKDAYS.contains(t)) {
            return Ok(AnswerType::Date);
        }
        let date_anchor = |t: &str| is_year(t) || is_decade(t) || is_date_shape(t) || is_ordinal_digits(t);
        if toks.iter().any(|t| date_anchor(t))
            && toks.iter().zip(&lower).all(|(t, l)| date_anchor(t) || DATE_FILLERS.contains(&l.as_str()))
            && (toks.iter().any(|t| is_year(t) || is_decade(t) || is_date_shape(t))
                || lower.iter().any(|l| l.starts_with("centur")))
        {
            return Ok(AnswerType::Date);
        }

        // NUMBER
        let numeric = |t: &str| is_numeric_token(t) || is_number_word(t);
        if toks.iter().any(|t| numeric(t)) && !toks.iter().any(|t| is_capitalized(t) && !numeric(t)) {
            return Ok(AnswerType::Number);
        }

        let body = s.strip_prefix("the ").or_else(|| s.strip_prefix("The ")).unwrap_or(s);
        let body_lower = body.to_lowercase();
        let name_like = toks
            .iter()
            .zip(&lower)
            .all(|(t, l)| is_capitalized(t) || NAME_CONNECTORS.contains(&l.as_str()));

        // PERSON
        if self.persons.contains(&body_lower)
            || (toks.len() >= 2 && HONORIFICS.contains(&lower[0].as_str()) && is_capitalized(toks[1]))
            || (name_like
                && toks.len() >= 2
                && (self.persons.contains(&lower[0]) || self.persons.contains(lower.last().unwrap())))
        {
            return Ok(AnswerType::Person);
        }

        // LOCATION
        if self.locations.contains(&body_lower)
            || body
                .rsplit_once(',')
                .is_some_and(|(_, tail)| self.locations.contains(&tail.trim().to_lowercase()))
            || (name_like && toks.len() >= 2 && LOCATION_CUES.contains(&lower.last().unwrap().as_str()))
        {
            return Ok(AnswerType::Location);
        }

        if toks.iter().any(|t| t.chars().any(char::is_uppercase)) {
            return Ok(AnswerType::Entity);
        }
        Ok(AnswerType::Common)
    }
}

/// One distinct answer string and how many questions used it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolEntry {
    pub text: String,
    pub count: usize,
}

/// Every distinct gold answer of a corpus, bucketed by [`AnswerType`] and
/// sorted by text within each bucket.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FakeAnswerPool {
    buckets: BTreeMap<AnswerType, Vec<PoolEntry>>,
}

impl FakeAnswerPool {
    /// Add one occurrence of `text`, classified with `typer`.
    pub fn insert(&mut self, typer: &AnswerTyper, text: &str) -> Result<AnswerType, LexiconError> {
        let t = typer.classify(text)?;
        let text = text.trim();
        let bucket = self.buckets.entry(t).or_default();
        match bucket.binary_search_by(|e| e.text.as_str().cmp(text)) {
            Ok(i) => bucket[i].count += 1,
            Err(i) => bucket.insert(i, PoolEntry { text: text.to_string(), count: 1 }),
        }
        Ok(t)
    }

    /// Pool over an explicit list of answers.
    pub fn from_answers<'a>(
        typer: &AnswerTyper,
        answers: impl IntoIterator<Item = &'a str>,
    ) -> Result<Self, LexiconError> {
        let mut pool = FakeAnswerPool::default();
        for a in answers {
            pool.insert(typer, a)?;
        }
        Ok(pool)
    }

    pub fn bucket(&self, t: AnswerType) -> &[PoolEntry] {
        self.buckets.get(&t).map_or(&[], Vec::as_slice)
    }

    /// Bucket entries that differ (case-insensitively) from every string in
    /// `exclude`.
    pub fn eligible(&self, t: AnswerType, exclude: &[&str]) -> Vec<&str> {
        let exclude: Vec<String> = exclude.iter().map(|s| s.trim().to_lowercase()).collect();
        self.bucket(t)
            .iter()
            .map(|e| e.text.as_str())
            .filter(|s| !exclude.contains(&s.to_lowercase()))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.buckets.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Verify that every stored string classifies to its bucket.
    pub fn check(&self, typer: &AnswerTyper) -> Result<(), LexiconError> {
        for (&bucket, entries) in &self.buckets {
            for e in entries {
                let actual = typer.classify(&e.text)?;
                if actual != bucket {
                    return Err(LexiconError::PoolTypeMismatch { text: e.text.clone(), bucket, actual });
                }
            }
        }
        Ok(())
    }
}

/// Pool of every distinct gold answer among the corpus' base questions.
/// Repeated answers within one question count once.
pub fn build_fake_answer_pool(corpus: &Corpus, typer: &AnswerTyper) -> FakeAnswerPool {
    let mut pool = FakeAnswerPool::default();
    for (_, qa) in corpus.qas().filter(|(_, q)| q.meta.is_none()) {
        let distinct: BTreeSet<&str> =
            qa.answers.iter().map(|a| a.text.trim()).filter(|t| !t.is_empty()).collect();
        for text in distinct {
            pool.insert(typer, text).expect("non-empty answer always classifies");
        }
    }
    debug_assert!(pool.check(typer).is_ok());
    pool
}
