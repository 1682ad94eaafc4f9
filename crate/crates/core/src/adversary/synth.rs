//! Rule table that rewrites a (perturbed) question plus a fake answer into a
//! declarative statement.
//!
//! | rule | question shape | statement |
//! |------|----------------|-----------|
//! | R1 | wh-object with do/does/did or a modal: "What city did X move to in 1881?" | "X moved to the city of A in 1881." |
//! | R2 | wh-subject: "Who invented the telephone?" | "A invented the telephone." |
//! | R3 | copular: "What is the capital of France?", "What year was X founded?" | "The capital of France is A.", "X was founded in A." |
//! | R4 | when/where adjunct: "When did X die?", "Where is X?" | "X died in A.", "X is in A." |
//!
//! Anything else (why/how questions, questions without a wh-word) yields no
//! statement.

use serde::{Deserialize, Serialize};

use super::verbs::VerbTable;
use crate::lexicon::AnswerType;
use crate::text::{capitalize_first, tokenize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rule {
    R1,
    R2,
    R3,
    R4,
    Fallback,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Statement {
    pub text: String,
    pub rule: Rule,
}

const AUX_DO: &[&str] = &["do", "does", "did"];
const COPULAS: &[&str] = &["is", "are", "was", "were"];
const MODALS: &[&str] = &[
    "has", "have", "had", "can", "could", "will", "would", "should", "may", "might", "must", "shall",
];
const PREPOSITIONS: &[&str] = &[
    "in", "on", "at", "to", "from", "by", "with", "for", "of", "about", "into", "onto", "after",
    "before", "during", "under", "over", "through", "between", "against", "among", "upon",
    "within", "without", "since", "until", "near", "behind", "toward", "towards", "across",
    "along", "around", "like", "up", "out",
];
const PRONOUNS: &[&str] = &["he", "she", "it", "they", "we", "you", "i"];
const DETERMINERS: &[&str] = &[
    "the", "a", "an", "his", "her", "their", "its", "this", "that", "these", "those", "our", "my",
    "your", "some", "each", "every", "any",
];
const CONNECTORS: &[&str] = &["of", "de", "da", "von", "van", "der", "del", "the", "and", "&"];

fn is_lower_word(t: &str) -> bool {
    t.chars().next().is_some_and(char::is_lowercase)
}

fn is_cap_word(t: &str) -> bool {
    t.chars().next().is_some_and(|c| c.is_uppercase() || c.is_ascii_digit())
}

fn is_aux(lw: &str) -> bool {
    AUX_DO.contains(&lw) || COPULAS.contains(&lw) || MODALS.contains(&lw)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Wh {
    Who,
    What,
    When,
    Where,
    Quantity,
}

#[derive(Clone, Copy)]
enum VerbMode {
    Base,
    Any,
}

/// Joins tokens back into prose, attaching punctuation and clitics.
pub(crate) fn join_tokens<S: AsRef<str>>(tokens: &[S]) -> String {
    let mut out = String::new();
    let mut open_quote = false;
    let mut no_space_next = true;
    for t in tokens {
        let t = t.as_ref();
        if t.is_empty() {
            continue;
        }
        let attach_left = matches!(t, "," | "." | ";" | ":" | "!" | "?" | ")" | "]" | "%" | "'s" | "’s" | "n't")
            || (t == "\"" && open_quote);
        if !no_space_next && !attach_left {
            out.push(' ');
        }
        out.push_str(t);
        no_space_next = matches!(t, "(" | "[" | "$") || (t == "\"" && !open_quote);
        if t == "\"" {
            open_quote = !open_quote;
        }
    }
    out
}

/// Single terminal period, collapsed whitespace and an uppercase first
/// letter (unless the statement opens with a mixed-case fake answer).
pub(crate) fn cleanup(s: &str, answer: &str) -> String {
    let collapsed = s.split_whitespace().collect::<Vec<_>>().join(" ");
    let trimmed = collapsed.trim_end_matches(|c: char| matches!(c, '.' | '?' | '!' | ',' | ';' | ':') || c.is_whitespace());
    // Keep lowercase-initial brand names ("eBay") intact when they open the
    // statement.
    let keep = trimmed.starts_with(answer) && answer.chars().skip(1).any(char::is_uppercase);
    let body = if keep { trimmed.to_string() } else { capitalize_first(trimmed) };
    format!("{body}.")
}

/// Statement synthesis rules over a verb table.
#[derive(Debug, Clone)]
pub struct StatementRules {
    verbs: VerbTable,
}

impl Default for StatementRules {
    fn default() -> Self {
        StatementRules::new(VerbTable::bundled())
    }
}

impl StatementRules {
    pub fn new(verbs: VerbTable) -> Self {
        StatementRules { verbs }
    }

    pub fn verbs(&self) -> &VerbTable {
        &self.verbs
    }

    fn is_verbish(&self, t: &str) -> bool {
        is_lower_word(t) && self.verbs.is_verb_form(t)
    }

    /// Length of a noun phrase at the start of `body`, without verb help.
    fn np_len(body: &[&str]) -> Option<usize> {
        let first = body.first()?;
        let lf = first.to_lowercase();
        if PRONOUNS.contains(&lf.as_str()) {
            return Some(1);
        }
        if is_cap_word(first) {
            let mut r = 1;
            while r < body.len() {
                let l = body[r].to_lowercase();
                if is_cap_word(body[r]) || body[r] == "'s" {
                    r += 1;
                } else if CONNECTORS.contains(&l.as_str()) && body.get(r + 1).is_some_and(|t| is_cap_word(t)) {
                    r += 2;
                } else {
                    break;
                }
            }
            return Some(r);
        }
        if DETERMINERS.contains(&lf.as_str()) && body.len() >= 2 {
            return Some(2);
        }
        Some(1)
    }

    /// Split `body` into subject and the verb that follows it; returns the
    /// subject length.
    fn subject_len(&self, body: &[&str], mode: VerbMode) -> Option<usize> {
        if body.len() < 2 {
            return None;
        }
        if PRONOUNS.contains(&body[0].to_lowercase().as_str()) {
            return Some(1);
        }
        for j in 1..body.len() {
            let t = body[j];
            let prev = body[j - 1].to_lowercase();
            let is_verb = is_lower_word(t)
                && match mode {
                    VerbMode::Base => self.verbs.is_base(t),
                    VerbMode::Any => self.verbs.is_base(t) || self.verbs.is_participle(t),
                };
            if is_verb
                && !DETERMINERS.contains(&prev.as_str())
                && !PREPOSITIONS.contains(&prev.as_str())
                && !matches!(prev.as_str(), "and" | "or")
            {
                return Some(j);
            }
        }
        let n = Self::np_len(body)?;
        (n < body.len()).then_some(n)
    }

    /// Place `filler` at the wh-trace inside `tail` (the material after the
    /// main verb). The closure learns whether the trace follows a stranded
    /// preposition.
    fn insert_trace(tail: &[&str], filler: impl Fn(bool) -> String) -> Vec<String> {
        let is_prep = |t: &str| PREPOSITIONS.contains(&t.to_lowercase().as_str());
        let mut out: Vec<String> = Vec::new();
        if tail.is_empty() {
            out.push(filler(false));
        } else if is_prep(tail[0]) && (tail.len() == 1 || is_prep(tail[1]) || tail[1] == ",") {
            out.push(tail[0].to_string());
            out.push(filler(true));
            out.extend(tail[1..].iter().map(|s| s.to_string()));
        } else if is_prep(tail[tail.len() - 1]) {
            out.extend(tail.iter().map(|s| s.to_string()));
            out.push(filler(true));
        } else {
            out.push(filler(false));
            out.extend(tail.iter().map(|s| s.to_string()));
        }
        out
    }

    /// Rewrite `question` into a declarative statement carrying `answer`, or
    /// `None` when no rule matches.
    pub fn synthesize(&self, question: &str, answer: &str, ty: AnswerType) -> Option<Statement> {
        let mut toks: Vec<&str> = tokenize(question).iter().map(|t| t.text).collect();
        while toks.last().is_some_and(|t| matches!(*t, "?" | "." | "!")) {
            toks.pop();
        }
        if toks.len() < 2 {
            return None;
        }
        let lw: Vec<String> = toks.iter().map(|t| t.to_lowercase()).collect();

        let mut w = 0;
        let mut lead_prep: Option<&str> = None;
        if PREPOSITIONS.contains(&lw[0].as_str()) && matches!(lw[1].as_str(), "what" | "which" | "whom") {
            lead_prep = Some(toks[0]);
            w = 1;
        }

        let (wh, cat_end) = match lw[w].as_str() {
            "who" | "whom" => (Wh::Who, w + 1),
            "what" | "which" => (Wh::What, self.category_end(&toks, &lw, w + 1)),
            "when" => (Wh::When, w + 1),
            "where" => (Wh::Where, w + 1),
            "how" if matches!(lw.get(w + 1).map(String::as_str), Some("many" | "much")) => {
                let end = self.category_end(&toks, &lw, w + 2);
                if end == w + 2 {
                    return None;
                }
                (Wh::Quantity, end)
            }
            _ => return None,
        };
        let cat_start = if wh == Wh::Quantity { w + 2 } else { w + 1 };
        let category = if matches!(wh, Wh::What | Wh::Quantity) { join_tokens(&toks[cat_start..cat_end]) } else { String::new() };
        let rest = &toks[cat_end..];
        let lrest = &lw[cat_end..];
        if rest.is_empty() {
            return None;
        }

        let object_filler = |after_prep: bool| -> String {
            match wh {
                Wh::Quantity => format!("{answer} {category}"),
                _ if !category.is_empty() && ty == AnswerType::Location => format!("the {category} of {answer}"),
                _ if ty == AnswerType::Date && !after_prep => format!("in {answer}"),
                _ => answer.to_string(),
            }
        };
        let subject_filler = || -> String {
            match wh {
                Wh::Quantity => format!("{answer} {category}"),
                _ if category.contains(' ') && ty == AnswerType::Location => format!("the {category} of {answer}"),
                _ if category.contains(' ') => format!("the {category} {answer}"),
                _ => answer.to_string(),
            }
        };
        let adjunct = || -> Vec<String> {
            let prep = match (lead_prep, wh) {
                (Some(p), _) => p.to_lowercase(),
                (None, Wh::When) => {
                    let has_month_day = answer.chars().any(|c| c.is_ascii_digit())
                        && answer.split_whitespace().any(|t| is_cap_word(t) && !t.chars().all(|c| c.is_ascii_digit()));
                    if has_month_day { "on".into() } else { "in".into() }
                }
                (None, _) if ty == AnswerType::Location => "in".into(),
                (None, _) => "at".into(),
            };
            let filler = if lead_prep.is_some() && !category.is_empty() && ty == AnswerType::Location {
                format!("the {category} of {answer}")
            } else {
                answer.to_string()
            };
            vec![prep, filler]
        };
        let is_adjunct = matches!(wh, Wh::When | Wh::Where) || lead_prep.is_some();
        let subject_capable = matches!(wh, Wh::Who | Wh::What | Wh::Quantity) && lead_prep.is_none();

        let strs = |s: &[&str]| s.iter().map(|t| t.to_string()).collect::<Vec<_>>();
        let head = lrest[0].as_str();
        let (words, rule): (Vec<String>, Rule) = if AUX_DO.contains(&head) {
            let body = &rest[1..];
            let n = self.subject_len(body, VerbMode::Base)?;
            let verb = body[n];
            if !is_lower_word(verb) {
                return None;
            }
            let verb = match head {
                "did" => self.verbs.past(verb),
                "does" => self.verbs.third_person(verb),
                _ => verb.to_lowercase(),
            };
            let tail = &body[n + 1..];
            let mut words = strs(&body[..n]);
            words.push(verb);
            if is_adjunct {
                words.extend(strs(tail));
                words.extend(adjunct());
                (words, if lead_prep.is_some() { Rule::R1 } else { Rule::R4 })
            } else {
                words.extend(Self::insert_trace(tail, object_filler));
                (words, Rule::R1)
            }
        } else if COPULAS.contains(&head) {
            let cop = rest[0];
            let body = &rest[1..];
            if body.is_empty() {
                return None;
            }
            let part = body.iter().position(|t| is_lower_word(t) && self.verbs.is_participle(t));
            match part {
                Some(0) if subject_capable => {
                    let mut words = vec![subject_filler(), cop.to_string()];
                    words.extend(strs(body));
                    (words, Rule::R2)
                }
                Some(0) => return None,
                Some(p) => {
                    let mut words = strs(&body[..=p]);
                    words.insert(p, cop.to_string());
                    let tail = &body[p + 1..];
                    if is_adjunct {
                        words.extend(strs(tail));
                        words.extend(adjunct());
                        (words, Rule::R4)
                    } else {
                        words.extend(Self::insert_trace(tail, object_filler));
                        (words, Rule::R3)
                    }
                }
                None => {
                    let ends_in_prep = PREPOSITIONS.contains(&body[body.len() - 1].to_lowercase().as_str());
                    let words = if is_adjunct {
                        let mut w = strs(body);
                        w.push(cop.to_string());
                        w.extend(adjunct());
                        w
                    } else if wh == Wh::Quantity || !category.is_empty() {
                        let mut w = vec![subject_filler(), cop.to_string()];
                        w.extend(strs(body));
                        w
                    } else if ends_in_prep && body.len() >= 2 {
                        let n = Self::np_len(body)?.min(body.len() - 1);
                        let mut w = strs(&body[..n]);
                        w.push(cop.to_string());
                        w.extend(strs(&body[n..]));
                        w.push(answer.to_string());
                        w
                    } else {
                        let mut w = strs(body);
                        w.push(cop.to_string());
                        w.push(answer.to_string());
                        w
                    };
                    (words, if is_adjunct { Rule::R4 } else { Rule::R3 })
                }
            }
        } else if MODALS.contains(&head) {
            let modal = rest[0];
            let body = &rest[1..];
            if subject_capable && body.first().is_some_and(|t| self.is_verbish(t)) {
                let mut words = vec![subject_filler()];
                words.extend(strs(rest));
                (words, Rule::R2)
            } else {
                let n = self.subject_len(body, VerbMode::Any)?;
                let mut words = strs(&body[..n]);
                words.push(modal.to_string());
                words.push(body[n].to_string());
                let tail = &body[n + 1..];
                if is_adjunct {
                    words.extend(strs(tail));
                    words.extend(adjunct());
                    (words, Rule::R4)
                } else {
                    words.extend(Self::insert_trace(tail, object_filler));
                    (words, Rule::R1)
                }
            }
        } else if subject_capable
            && is_lower_word(rest[0])
            && !PREPOSITIONS.contains(&head)
            && !DETERMINERS.contains(&head)
        {
            let mut words = vec![subject_filler()];
            words.extend(strs(rest));
            (words, Rule::R2)
        } else {
            return None;
        };

        Some(Statement { text: cleanup(&join_tokens(&words), answer), rule })
    }

    /// End of the category noun phrase after "what"/"which"/"how many".
    fn category_end(&self, toks: &[&str], lw: &[String], start: usize) -> usize {
        let mut j = start;
        if let Some(first) = lw.get(start) {
            if is_aux(first) {
                return start;
            }
            let next_is_aux = lw.get(start + 1).is_some_and(|n| is_aux(n));
            if self.is_verbish(toks[start]) && !next_is_aux {
                return start;
            }
            j += 1;
        }
        while j < toks.len() && j < start + 4 {
            let l = lw[j].as_str();
            if is_aux(l) || self.is_verbish(toks[j]) && l != "of" {
                break;
            }
            j += 1;
        }
        j
    }

    /// Crude statement used by the fallback skip policy: the question without
    /// its wh-word, followed by the answer.
    pub fn fallback(&self, question: &str, answer: &str) -> Statement {
        let mut toks: Vec<&str> = tokenize(question).iter().map(|t| t.text).collect();
        while toks.last().is_some_and(|t| matches!(*t, "?" | "." | "!")) {
            toks.pop();
        }
        if toks.first().is_some_and(|t| {
            matches!(t.to_lowercase().as_str(), "what" | "which" | "who" | "whom" | "when" | "where" | "why" | "how")
        }) {
            toks.remove(0);
        }
        let mut words: Vec<String> = toks.iter().map(|t| t.to_string()).collect();
        words.push(answer.to_string());
        Statement { text: cleanup(&join_tokens(&words), answer), rule: Rule::Fallback }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn syn(q: &str, a: &str, t: AnswerType) -> Option<String> {
        StatementRules::default().synthesize(q, a, t).map(|s| s.text)
    }

    #[test]
    fn r1_object_wh_with_do_support() {
        assert_eq!(
            syn("What city did Tadakatsu move to in 1881?", "Chicago", AnswerType::Location).unwrap(),
            "Tadakatsu moved to the city of Chicago in 1881."
        );
        assert_eq!(
            syn("What did Tesla invent in 1888?", "the telephone", AnswerType::Common).unwrap(),
            "Tesla invented the telephone in 1888."
        );
        assert_eq!(
            syn("What year did the war end?", "1905", AnswerType::Date).unwrap(),
            "The war ended in 1905."
        );
        assert_eq!(
            syn("What does the end of the war cause?", "famine", AnswerType::Common).unwrap(),
            "The end of the war causes famine."
        );
        assert_eq!(
            syn("In what year did Tesla die?", "1905", AnswerType::Date).unwrap(),
            "Tesla died in 1905."
        );
    }

    #[test]
    fn r2_subject_wh() {
        assert_eq!(
            syn("Who invented the telephone?", "Edison", AnswerType::Person).unwrap(),
            "Edison invented the telephone."
        );
        assert_eq!(
            syn("What company developed Windows?", "Acme", AnswerType::Entity).unwrap(),
            "Acme developed Windows."
        );
        assert_eq!(
            syn("Who has won the most titles?", "Edison", AnswerType::Person).unwrap(),
            "Edison has won the most titles."
        );
        assert_eq!(
            syn("How many people were killed in the war?", "12", AnswerType::Number).unwrap(),
            "12 people were killed in the war."
        );
        assert_eq!(
            syn("What was invented by Tesla?", "radio", AnswerType::Common).unwrap(),
            "Radio was invented by Tesla."
        );
    }

    #[test]
    fn category_modifiers_survive() {
        assert_eq!(
            syn("Which old company built the tower?", "Acme", AnswerType::Entity).unwrap(),
            "The old company Acme built the tower."
        );
    }

    #[test]
    fn r3_copular() {
        assert_eq!(
            syn("What is the capital of France?", "Chicago", AnswerType::Location).unwrap(),
            "The capital of France is Chicago."
        );
        assert_eq!(
            syn("What year was the university founded?", "1905", AnswerType::Date).unwrap(),
            "The university was founded in 1905."
        );
        assert_eq!(
            syn("What is Tesla famous for?", "radio", AnswerType::Common).unwrap(),
            "Tesla is famous for radio."
        );
        assert_eq!(
            syn("Which river is the longest in Europe?", "Nile", AnswerType::Location).unwrap(),
            "Nile is the longest in Europe."
        );
    }

    #[test]
    fn r4_adjuncts() {
        assert_eq!(
            syn("When did Tesla move to New York?", "1905", AnswerType::Date).unwrap(),
            "Tesla moved to New York in 1905."
        );
        assert_eq!(
            syn("Where was Tesla born?", "Chicago", AnswerType::Location).unwrap(),
            "Tesla was born in Chicago."
        );
        assert_eq!(
            syn("Where is the Eiffel Tower?", "Chicago", AnswerType::Location).unwrap(),
            "The Eiffel Tower is in Chicago."
        );
        assert_eq!(
            syn("When was Tesla born?", "July 10, 1856", AnswerType::Date).unwrap(),
            "Tesla was born on July 10, 1856."
        );
    }

    #[test]
    fn skips() {
        assert_eq!(syn("Telephone?", "Edison", AnswerType::Person), None);
        assert_eq!(syn("Why did Tesla leave?", "Edison", AnswerType::Person), None);
        assert_eq!(syn("How did Tesla leave?", "Edison", AnswerType::Person), None);
        assert_eq!(syn("Who?", "Edison", AnswerType::Person), None);
    }

    #[test]
    fn fallback_template() {
        let r = StatementRules::default();
        assert_eq!(r.fallback("Why did Tesla leave?", "Chicago").text, "Did Tesla leave Chicago.");
    }

    #[test]
    fn cleanup_rules() {
        assert_eq!(cleanup("the  war ended in 1905 ..", "1905"), "The war ended in 1905.");
        assert_eq!(cleanup("eBay bought it?", "eBay"), "eBay bought it.");
        assert_eq!(join_tokens(&["Tesla", "'s", "lab", ",", "(", "NY", ")", "."]), "Tesla's lab, (NY).");
    }
}
