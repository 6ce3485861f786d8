//! Words over a finite alphabet and antidictionaries: antifactorial sets of
//! minimal forbidden words (MFWs). An MFW of a string is a word that never
//! occurs in it while both of its maximal proper substrings (drop the first
//! symbol; drop the last symbol) do occur.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::Symbol;

/// A finite string of symbols. The empty word is allowed.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Symbol>);

impl Word {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Word(symbols)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn push(&mut self, s: Symbol) {
        self.0.push(s);
    }

    /// Error if any symbol is outside `[0, alphabet)`.
    pub fn check_alphabet(&self, alphabet: u16) -> Result<()> {
        for &s in &self.0 {
            if s >= alphabet {
                return Err(Error::SymbolOutOfRange { symbol: u32::from(s), alphabet });
            }
        }
        Ok(())
    }

    /// True if `needle` occurs in `self` as a contiguous substring.
    pub fn contains_word(&self, needle: &Word) -> bool {
        if needle.is_empty() {
            return true;
        }
        self.0.windows(needle.len()).any(|w| w == needle.symbols())
    }

    /// Word rendered with `.` between symbols, `lambda` when empty.
    /// Used by automaton and tree dumps.
    pub fn dotted(&self) -> String {
        if self.is_empty() {
            "lambda".to_string()
        } else {
            self.0.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(".")
        }
    }
}

impl From<&[Symbol]> for Word {
    fn from(s: &[Symbol]) -> Self {
        Word(s.to_vec())
    }
}

impl<const N: usize> From<[Symbol; N]> for Word {
    fn from(s: [Symbol; N]) -> Self {
        Word(s.to_vec())
    }
}

impl fmt::Display for Word {
    /// Space-separated decimal symbols; `lambda` for the empty word.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("lambda");
        }
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// The dictionary D(x): every substring of `x` of length at most `max_len`,
/// plus the empty word.
pub fn dictionary(x: &Word, max_len: usize) -> BTreeSet<Word> {
    let mut set = BTreeSet::new();
    set.insert(Word::empty());
    let s = x.symbols();
    for start in 0..s.len() {
        let end = (start + max_len).min(s.len());
        for stop in start + 1..=end {
            set.insert(Word::from(&s[start..stop]));
        }
    }
    set
}

/// All minimal forbidden words of `x` with length in `[1, max_len]`, possibly
/// none. Enumerates one-symbol extensions of the truncated dictionary and
/// keeps those whose drop-first substring also occurs while the extension
/// itself does not.
pub fn compute_mfw_words(x: &Word, alphabet: u16, max_len: usize) -> Result<BTreeSet<Word>> {
    assert!(max_len >= 1, "max_len must be at least 1");
    x.check_alphabet(alphabet)?;

    let s = x.symbols();
    let mut dict: HashSet<&[Symbol]> = HashSet::new();
    dict.insert(&[]);
    for start in 0..s.len() {
        let end = (start + max_len).min(s.len());
        for stop in start + 1..=end {
            dict.insert(&s[start..stop]);
        }
    }

    let mut found = BTreeSet::new();
    let mut candidate: Vec<Symbol> = Vec::with_capacity(max_len);
    for u in &dict {
        if u.len() + 1 > max_len {
            continue;
        }
        candidate.clear();
        candidate.extend_from_slice(u);
        candidate.push(0);
        for a in 0..alphabet {
            *candidate.last_mut().unwrap() = a;
            if !dict.contains(candidate.as_slice()) && dict.contains(&candidate[1..]) {
                found.insert(Word::new(candidate.clone()));
            }
        }
    }
    Ok(found)
}

/// As [`compute_mfw_words`], wrapped into a validated [`Antidictionary`].
/// Errors when no MFW of length `<= max_len` exists.
pub fn compute_mfws(x: &Word, alphabet: u16, max_len: usize) -> Result<Antidictionary> {
    let words = compute_mfw_words(x, alphabet, max_len)?;
    if words.is_empty() {
        return Err(Error::EmptyAntidictionary { max_len });
    }
    Antidictionary::new(alphabet, words)
}

/// One problem found by [`Antidictionary::validate_words`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidationIssue {
    EmptyWord,
    SymbolOutOfRange { word: Word, symbol: Symbol },
    NotAntifactorial { inner: Word, outer: Word },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationIssue::EmptyWord => f.write_str("contains the empty word"),
            ValidationIssue::SymbolOutOfRange { word, symbol } => {
                write!(f, "word '{word}' contains out-of-alphabet symbol {symbol}")
            }
            ValidationIssue::NotAntifactorial { inner, outer } => {
                write!(f, "'{inner}' is a substring of '{outer}'")
            }
        }
    }
}

/// An antifactorial set of non-empty forbidden words over `{0..alphabet-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Antidictionary {
    alphabet: u16,
    words: Vec<Word>, // sorted by (length, lexicographic)
}

impl Antidictionary {
    /// Build and validate. The word set must be non-empty, in-alphabet,
    /// free of the empty word and antifactorial.
    pub fn new<I: IntoIterator<Item = Word>>(alphabet: u16, words: I) -> Result<Self> {
        if alphabet < 1 {
            return Err(Error::InvalidAntidictionary("alphabet size must be >= 1".into()));
        }
        let set: BTreeSet<Word> = words.into_iter().collect();
        if set.is_empty() {
            return Err(Error::InvalidAntidictionary("no forbidden words".into()));
        }
        let mut sorted: Vec<Word> = set.into_iter().collect();
        sorted.sort_by(|a, b| (a.len(), a.symbols()).cmp(&(b.len(), b.symbols())));
        let ad = Antidictionary { alphabet, words: sorted };
        let issues = ad.validate_words();
        if let Some(first) = issues.first() {
            return Err(Error::InvalidAntidictionary(format!(
                "{first}{}",
                if issues.len() > 1 { format!(" (+{} more)", issues.len() - 1) } else { String::new() }
            )));
        }
        Ok(ad)
    }

    pub fn alphabet_size(&self) -> u16 {
        self.alphabet
    }

    /// Words in (length, lexicographic) order.
    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Length m of the longest member.
    pub fn max_len(&self) -> usize {
        self.words.iter().map(Word::len).max().unwrap_or(0)
    }

    /// Report every violation: empty members, out-of-alphabet symbols and
    /// antifactoriality breaches. Empty report means valid.
    pub fn validate_words(&self) -> Vec<ValidationIssue> {
        let mut issues = Vec::new();
        for w in &self.words {
            if w.is_empty() {
                issues.push(ValidationIssue::EmptyWord);
                continue;
            }
            if let Some(&bad) = w.symbols().iter().find(|&&s| s >= self.alphabet) {
                issues.push(ValidationIssue::SymbolOutOfRange { word: w.clone(), symbol: bad });
            }
        }
        for u in &self.words {
            for v in &self.words {
                if u != v && v.contains_word(u) {
                    issues.push(ValidationIssue::NotAntifactorial {
                        inner: u.clone(),
                        outer: v.clone(),
                    });
                }
            }
        }
        issues
    }

    /// True if `x` contains some member as a substring.
    pub fn forbids(&self, x: &Word) -> bool {
        self.words.iter().any(|w| x.contains_word(w))
    }

    /// Text format: `alphabet J` on the first line, then one word per line
    /// as space-separated decimal symbols.
    pub fn to_text(&self) -> String {
        let mut out = format!("alphabet {}\n", self.alphabet);
        for w in &self.words {
            out.push_str(&w.to_string());
            out.push('\n');
        }
        out
    }

    /// Parse the text format. Blank lines, `#` comments and `prob` lines
    /// (from source spec files) are ignored here.
    pub fn parse(text: &str) -> Result<Self> {
        let mut alphabet: Option<u16> = None;
        let mut words = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineno = idx + 1;
            if line.is_empty() || line.starts_with('#') || line.starts_with("prob ") {
                continue;
            }
            if let Some(rest) = line.strip_prefix("alphabet ") {
                if alphabet.is_some() {
                    return Err(Error::Parse { line: lineno, message: "duplicate alphabet line".into() });
                }
                let j: u16 = rest.trim().parse().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("invalid alphabet size '{}'", rest.trim()),
                })?;
                alphabet = Some(j);
                continue;
            }
            if alphabet.is_none() {
                return Err(Error::Parse {
                    line: lineno,
                    message: "expected 'alphabet J' before word lines".into(),
                });
            }
            let mut symbols = Vec::new();
            for tok in line.split_whitespace() {
                let s: Symbol = tok.parse().map_err(|_| Error::Parse {
                    line: lineno,
                    message: format!("invalid symbol '{tok}'"),
                })?;
                symbols.push(s);
            }
            words.push(Word::new(symbols));
        }
        let alphabet = alphabet.ok_or(Error::Parse { line: 0, message: "missing 'alphabet J' line".into() })?;
        Antidictionary::new(alphabet, words)
    }
}
