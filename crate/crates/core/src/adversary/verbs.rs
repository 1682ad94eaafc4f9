//! Verb inflection tables for statement synthesis.

use std::collections::{HashMap, HashSet};
use std::io::BufRead;

use super::GenerationError;

/// Known verbs: an irregular table (base, past, participle) plus a list of
/// regular base forms.
#[derive(Debug, Clone, Default)]
pub struct VerbTable {
    irregular: HashMap<String, (String, String)>,
    irregular_past: HashMap<String, String>,
    irregular_participle: HashMap<String, String>,
    regular: HashSet<String>,
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u')
}

fn doubles_final(base: &str) -> bool {
    let c: Vec<char> = base.chars().collect();
    let n = c.len();
    let groups = c.windows(2).filter(|w| !is_vowel(w[0]) && is_vowel(w[1])).count()
        + usize::from(c.first().is_some_and(|&x| is_vowel(x)));
    n >= 3
        && groups == 1
        && !is_vowel(c[n - 1])
        && !matches!(c[n - 1], 'w' | 'x' | 'y')
        && is_vowel(c[n - 2])
        && !is_vowel(c[n - 3])
}

/// Bundled irregular verb table.
pub const BUNDLED_IRREGULAR: &str = include_str!("../../data/irregular_verbs.tsv");
/// Bundled list of regular base verbs.
pub const BUNDLED_REGULAR: &str = include_str!("../../data/verbs.txt");

impl VerbTable {
    pub fn bundled() -> VerbTable {
        let mut t = VerbTable::from_irregular_tsv(BUNDLED_IRREGULAR.as_bytes())
            .expect("bundled irregular verb table is well-formed");
        t.add_regular(BUNDLED_REGULAR.lines());
        t
    }

    /// Parse `base<TAB>past<TAB>participle` rows.
    pub fn from_irregular_tsv<R: BufRead>(source: R) -> Result<VerbTable, GenerationError> {
        let mut t = VerbTable::default();
        for (i, line) in source.lines().enumerate() {
            let line = line?;
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let f: Vec<&str> = line.split('\t').map(str::trim).collect();
            if f.len() != 3 || f.iter().any(|s| s.is_empty()) {
                return Err(GenerationError::Config(format!(
                    "irregular verb table line {}: expected base, past, participle",
                    i + 1
                )));
            }
            let (base, past, part) = (f[0].to_lowercase(), f[1].to_lowercase(), f[2].to_lowercase());
            t.irregular_past.entry(past.clone()).or_insert_with(|| base.clone());
            t.irregular_participle.entry(part.clone()).or_insert_with(|| base.clone());
            t.irregular.insert(base, (past, part));
        }
        Ok(t)
    }

    pub fn add_regular<'a>(&mut self, words: impl IntoIterator<Item = &'a str>) {
        self.regular.extend(
            words
                .into_iter()
                .map(str::trim)
                .filter(|w| !w.is_empty() && !w.starts_with('#'))
                .map(str::to_lowercase),
        );
    }

    pub fn is_base(&self, w: &str) -> bool {
        let w = w.to_lowercase();
        self.irregular.contains_key(&w) || self.regular.contains(&w)
    }

    fn regular_ed_base(&self, w: &str) -> Option<String> {
        let stem = w.strip_suffix("ed")?;
        let mut cands = vec![stem.to_string(), format!("{stem}e")];
        if let Some(s) = stem.strip_suffix('i') {
            cands.push(format!("{s}y"));
        }
        let c: Vec<char> = stem.chars().collect();
        if c.len() >= 2 && c[c.len() - 1] == c[c.len() - 2] {
            cands.push(c[..c.len() - 1].iter().collect());
        }
        cands.into_iter().find(|b| self.regular.contains(b))
    }

    /// Base form of a past-tense or past-participle word, if recognised.
    pub fn base_of_past(&self, w: &str) -> Option<String> {
        let w = w.to_lowercase();
        if let Some(b) = self.irregular_past.get(&w).or_else(|| self.irregular_participle.get(&w)) {
            return Some(b.clone());
        }
        self.regular_ed_base(&w)
    }

    /// Past participle test used to spot passives ("was founded", "were built").
    pub fn is_participle(&self, w: &str) -> bool {
        let lower = w.to_lowercase();
        self.irregular_participle.contains_key(&lower)
            || self.regular_ed_base(&lower).is_some()
            || (lower.len() > 4 && lower.ends_with("ed") && w.chars().all(|c| c.is_lowercase()))
    }

    /// Base, past or third-person form of a known verb.
    pub fn is_verb_form(&self, w: &str) -> bool {
        let lower = w.to_lowercase();
        if self.is_base(&lower) || self.base_of_past(&lower).is_some() {
            return true;
        }
        let third = [lower.strip_suffix("ies").map(|s| format!("{s}y")), lower.strip_suffix("es").map(str::to_string), lower.strip_suffix('s').map(str::to_string)];
        third.into_iter().flatten().any(|b| self.is_base(&b))
    }

    pub fn past(&self, base: &str) -> String {
        let lower = base.to_lowercase();
        if let Some((past, _)) = self.irregular.get(&lower) {
            return past.clone();
        }
        regular_suffix(&lower, "ed")
    }

    pub fn third_person(&self, base: &str) -> String {
        let lower = base.to_lowercase();
        match lower.as_str() {
            "be" => return "is".into(),
            "have" => return "has".into(),
            _ => {}
        }
        if ["s", "x", "z", "ch", "sh", "o"].iter().any(|s| lower.ends_with(s)) {
            return format!("{lower}es");
        }
        let c: Vec<char> = lower.chars().collect();
        if c.len() >= 2 && c[c.len() - 1] == 'y' && !is_vowel(c[c.len() - 2]) {
            return format!("{}ies", &lower[..lower.len() - 1]);
        }
        format!("{lower}s")
    }
}

fn regular_suffix(base: &str, suffix: &str) -> String {
    let c: Vec<char> = base.chars().collect();
    let n = c.len();
    if n == 0 {
        return suffix.to_string();
    }
    if c[n - 1] == 'e' {
        return format!("{base}{}", &suffix[1..]);
    }
    if n >= 2 && c[n - 1] == 'y' && !is_vowel(c[n - 2]) {
        return format!("{}i{suffix}", &base[..base.len() - 1]);
    }
    if doubles_final(base) {
        return format!("{base}{}{suffix}", c[n - 1]);
    }
    format!("{base}{suffix}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn past_forms() {
        let v = VerbTable::bundled();
        assert_eq!(v.past("move"), "moved");
        assert_eq!(v.past("invent"), "invented");
        assert_eq!(v.past("study"), "studied");
        assert_eq!(v.past("stop"), "stopped");
        assert_eq!(v.past("play"), "played");
        assert_eq!(v.past("build"), "built");
        assert_eq!(v.past("win"), "won");
        assert_eq!(v.past("visit"), "visited");
        assert_eq!(v.past("open"), "opened");
    }

    #[test]
    fn third_person_forms() {
        let v = VerbTable::bundled();
        assert_eq!(v.third_person("go"), "goes");
        assert_eq!(v.third_person("carry"), "carries");
        assert_eq!(v.third_person("watch"), "watches");
        assert_eq!(v.third_person("have"), "has");
        assert_eq!(v.third_person("live"), "lives");
    }

    #[test]
    fn recognition() {
        let v = VerbTable::bundled();
        assert!(v.is_base("move"));
        assert!(v.is_verb_form("invented"));
        assert!(v.is_verb_form("invents"));
        assert!(v.is_verb_form("wrote"));
        assert!(v.is_participle("founded"));
        assert!(v.is_participle("built"));
        assert!(!v.is_participle("tower"));
        assert_eq!(v.base_of_past("studied").as_deref(), Some("study"));
        assert!(!v.is_verb_form("city"));
    }

    #[test]
    fn malformed_table() {
        assert!(VerbTable::from_irregular_tsv("go\twent\n".as_bytes()).is_err());
    }
}
