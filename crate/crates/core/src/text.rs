//! Shared text utilities: code-point offset mapping, the whitespace and
//! punctuation tokenizer, abbreviation and stopword tables.
//!
//! All public offsets in this crate count Unicode scalar values (code points),
//! matching the `answer_start` convention of SQuAD files. Rust strings index by
//! byte, so [`CharIndex`] converts between the two.

use std::collections::HashSet;
use std::sync::LazyLock;

/// Identifier of the tokenizer rules, embedded in feature sidecars.
pub const TOKENIZER_VERSION: &str = "ws-punct-1";

/// Abbreviations (lowercase, with their trailing period) that never end a
/// sentence and keep their period when tokenized.
pub const ABBREVIATIONS: &[&str] = &[
    "dr.", "mr.", "mrs.", "ms.", "prof.", "st.", "mt.", "ft.", "no.", "nos.", "jr.", "sr.",
    "gen.", "col.", "capt.", "lt.", "sgt.", "gov.", "sen.", "rep.", "rev.", "fr.", "u.s.",
    "u.k.", "u.n.", "u.s.a.", "e.g.", "i.e.", "etc.", "vs.", "cf.", "inc.", "ltd.", "co.",
    "corp.", "jan.", "feb.", "mar.", "apr.", "jun.", "jul.", "aug.", "sep.", "sept.", "oct.",
    "nov.", "dec.", "a.m.", "p.m.", "a.d.", "b.c.", "approx.", "ca.", "c.", "vol.", "pp.",
];

static ABBREVIATION_SET: LazyLock<HashSet<&'static str>> =
    LazyLock::new(|| ABBREVIATIONS.iter().copied().collect());

static STOPWORDS: LazyLock<HashSet<String>> = LazyLock::new(|| {
    include_str!("../data/stopwords.txt")
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
});

/// Whether `word` (any case) is in the bundled stopword list.
pub fn is_stopword(word: &str) -> bool {
    STOPWORDS.contains(&word.to_lowercase())
}

/// Whether a word ending in `.` is a known abbreviation or an initial.
///
/// `word` must include the trailing period. Leading brackets and quotes are
/// ignored.
pub fn is_abbreviation(word: &str) -> bool {
    let word = word.trim_start_matches(|c: char| LEADING_PUNCT.contains(&c));
    if !word.ends_with('.') {
        return false;
    }
    let lower = word.to_lowercase();
    if ABBREVIATION_SET.contains(lower.as_str()) {
        return true;
    }
    let body = &word[..word.len() - 1];
    let mut chars = body.chars();
    match (chars.next(), chars.next()) {
        // Single capital initial, "J."
        (Some(c), None) => c.is_uppercase(),
        // Dotted acronyms such as "U.S." or "e.g." that are not in the table.
        _ => body.contains('.') && body.chars().all(|c| c.is_alphabetic() || c == '.'),
    }
}

/// Maps code-point offsets to byte offsets (and back) for one string.
#[derive(Debug, Clone)]
pub struct CharIndex {
    bytes: Vec<usize>,
}

impl CharIndex {
    pub fn new(s: &str) -> Self {
        let mut bytes: Vec<usize> = s.char_indices().map(|(b, _)| b).collect();
        bytes.push(s.len());
        Self { bytes }
    }

    /// Number of code points.
    pub fn len(&self) -> usize {
        self.bytes.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Byte offset of code point `idx`; `idx == len()` maps to the string end.
    pub fn byte(&self, idx: usize) -> Option<usize> {
        self.bytes.get(idx).copied()
    }

    /// Code-point offset of a byte offset lying on a char boundary.
    pub fn char_of_byte(&self, byte: usize) -> Option<usize> {
        self.bytes.binary_search(&byte).ok()
    }

    /// Slice `s[start..end]` in code points.
    pub fn slice<'a>(&self, s: &'a str, start: usize, end: usize) -> Option<&'a str> {
        if start > end {
            return None;
        }
        Some(&s[self.byte(start)?..self.byte(end)?])
    }
}

/// Number of code points in `s`.
pub fn char_len(s: &str) -> usize {
    s.chars().count()
}

/// Convert a code-point offset into a byte offset, for tools that index bytes.
pub fn char_to_byte_offset(s: &str, char_offset: usize) -> Option<usize> {
    CharIndex::new(s).byte(char_offset)
}

/// Substring by code-point offset and code-point length.
pub fn char_substring(s: &str, start: usize, len: usize) -> Option<&str> {
    CharIndex::new(s).slice(s, start, start.checked_add(len)?)
}

const LEADING_PUNCT: &[char] = &['"', '\'', '(', '[', '{', '“', '‘', '«', '¿', '¡'];
const TRAILING_PUNCT: &[char] = &[
    '.', ',', ';', ':', '!', '?', '"', '\'', ')', ']', '}', '”', '’', '»',
];

/// One token of a text, with its offsets into the original string.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token<'a> {
    pub text: &'a str,
    /// Start offset in code points.
    pub start: usize,
    /// Start offset in bytes.
    pub byte_start: usize,
}

impl Token<'_> {
    pub fn byte_end(&self) -> usize {
        self.byte_start + self.text.len()
    }

    /// End offset in code points (exclusive).
    pub fn end(&self) -> usize {
        self.start + char_len(self.text)
    }

    pub fn is_punct(&self) -> bool {
        self.text.chars().all(|c| !c.is_alphanumeric())
    }
}

/// Split on whitespace and peel leading/trailing punctuation into their own
/// tokens. Periods that belong to an abbreviation ("U.S.", "Dr.") stay
/// attached.
pub fn tokenize(text: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut chunk_start: Option<(usize, usize)> = None;

    for (char_pos, (b, c)) in text.char_indices().enumerate() {
        if c.is_whitespace() {
            if let Some((b0, c0)) = chunk_start.take() {
                split_chunk(text, b0, c0, b, &mut out);
            }
        } else if chunk_start.is_none() {
            chunk_start = Some((b, char_pos));
        }
    }
    if let Some((b0, c0)) = chunk_start {
        split_chunk(text, b0, c0, text.len(), &mut out);
    }
    out
}

fn split_chunk<'a>(text: &'a str, b0: usize, c0: usize, b1: usize, out: &mut Vec<Token<'a>>) {
    let chunk = &text[b0..b1];
    let mut lead = Vec::new();
    let mut core_b = 0;
    for (i, c) in chunk.char_indices() {
        if LEADING_PUNCT.contains(&c) && i + c.len_utf8() < chunk.len() {
            lead.push((i, c.len_utf8()));
            core_b = i + c.len_utf8();
        } else {
            break;
        }
    }
    let mut core_e = chunk.len();
    let mut trail = Vec::new();
    while core_e > core_b {
        let last = chunk[core_b..core_e].chars().next_back().expect("non-empty core");
        if !TRAILING_PUNCT.contains(&last) {
            break;
        }
        let core = &chunk[core_b..core_e];
        if last == '.' && core.len() > 1 && is_abbreviation(core) {
            break;
        }
        if core.chars().count() == 1 {
            break;
        }
        core_e -= last.len_utf8();
        trail.push((core_e, last.len_utf8()));
    }

    let mut c = c0;
    for (i, l) in lead {
        out.push(Token { text: &chunk[i..i + l], start: c, byte_start: b0 + i });
        c += 1;
    }
    if core_e > core_b {
        let core = &chunk[core_b..core_e];
        out.push(Token { text: core, start: c, byte_start: b0 + core_b });
        c += char_len(core);
    }
    for (i, l) in trail.into_iter().rev() {
        out.push(Token { text: &chunk[i..i + l], start: c, byte_start: b0 + i });
        c += 1;
    }
}

/// Uppercase the first character of `s`.
pub fn capitalize_first(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

pub fn starts_uppercase(s: &str) -> bool {
    s.chars().next().is_some_and(char::is_uppercase)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<(&str, usize)> {
        tokenize(s).iter().map(|t| (t.text, t.start)).collect()
    }

    #[test]
    fn tokenize_splits_trailing_period() {
        assert_eq!(toks("Tesla moved."), vec![("Tesla", 0), ("moved", 6), (".", 11)]);
    }

    #[test]
    fn tokenize_empty() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("   \n ").is_empty());
    }

    #[test]
    fn tokenize_keeps_abbreviation() {
        assert_eq!(toks("U.S. grew"), vec![("U.S.", 0), ("grew", 5)]);
        assert_eq!(toks("Dr. Smith."), vec![("Dr.", 0), ("Smith", 4), (".", 9)]);
    }

    #[test]
    fn tokenize_peels_brackets_and_quotes() {
        assert_eq!(
            toks("(the \"best\"), ok?"),
            vec![
                ("(", 0),
                ("the", 1),
                ("\"", 5),
                ("best", 6),
                ("\"", 10),
                (")", 11),
                (",", 12),
                ("ok", 14),
                ("?", 16)
            ]
        );
    }

    #[test]
    fn tokenize_offsets_are_code_points() {
        let s = "Frédéric Chopin, né";
        for t in tokenize(s) {
            assert_eq!(char_substring(s, t.start, char_len(t.text)), Some(t.text));
            assert_eq!(&s[t.byte_start..t.byte_end()], t.text);
        }
    }

    #[test]
    fn abbreviation_detection() {
        assert!(is_abbreviation("Dr."));
        assert!(is_abbreviation("U.S."));
        assert!(is_abbreviation("J."));
        assert!(is_abbreviation("(e.g."));
        assert!(!is_abbreviation("rained."));
        assert!(!is_abbreviation("I"));
    }

    #[test]
    fn char_index_roundtrip() {
        let s = "aé🙂b";
        let idx = CharIndex::new(s);
        assert_eq!(idx.len(), 4);
        assert_eq!(idx.slice(s, 1, 3), Some("é🙂"));
        assert_eq!(idx.char_of_byte(idx.byte(3).unwrap()), Some(3));
        assert_eq!(idx.byte(5), None);
        assert_eq!(char_to_byte_offset(s, 2), Some(3));
    }
}
