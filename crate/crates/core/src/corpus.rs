//! Tokenization, vocabularies, and the on-disk corpus formats.
//!
//! Two text formats are supported, both UTF-8 with LF line endings:
//!
//! * parallel TSV: one `source<TAB>target` pair per line;
//! * labelled two-column: one `token<TAB>label` line per token (label `c` or
//!   `i`), with a blank line after every sentence.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

const DETACHED_PUNCT: &[char] = &['.', ',', '!', '?', ';', ':', '\'', '"', '(', ')'];

/// An ordered, non-empty list of whitespace-free surface tokens.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sentence(Vec<String>);

impl Sentence {
    pub fn new(tokens: Vec<String>) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::EmptyInput("sentence has no tokens"));
        }
        if let Some(bad) = tokens
            .iter()
            .find(|t| t.is_empty() || t.chars().any(char::is_whitespace))
        {
            return Err(Error::config(format!("invalid token {bad:?}")));
        }
        Ok(Sentence(tokens))
    }

    /// Convenience for literals: `Sentence::from_words(&["a", "b"])`.
    pub fn from_words(words: &[&str]) -> Result<Self> {
        Sentence::new(words.iter().map(|w| w.to_string()).collect())
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_tokens(self) -> Vec<String> {
        self.0
    }
}

impl fmt::Display for Sentence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(" "))
    }
}

/// Splits on Unicode whitespace and peels leading/trailing punctuation off
/// each chunk as single-character tokens. Case is preserved.
pub fn tokenize(text: &str) -> Result<Sentence> {
    let mut tokens = Vec::new();
    for chunk in text.split_whitespace() {
        let chars: Vec<char> = chunk.chars().collect();
        let mut start = 0;
        let mut end = chars.len();
        while start < end && DETACHED_PUNCT.contains(&chars[start]) {
            start += 1;
        }
        while end > start && DETACHED_PUNCT.contains(&chars[end - 1]) {
            end -= 1;
        }
        tokens.extend(chars[..start].iter().map(|c| c.to_string()));
        if start < end {
            tokens.push(chars[start..end].iter().collect());
        }
        tokens.extend(chars[end..].iter().map(|c| c.to_string()));
    }
    if tokens.is_empty() {
        return Err(Error::EmptyInput("text contains no tokens"));
    }
    Ok(Sentence(tokens))
}

pub const PAD: usize = 0;
pub const UNK: usize = 1;
pub const BOS: usize = 2;
pub const EOS: usize = 3;
pub const RESERVED: [&str; 4] = ["<pad>", "<unk>", "<s>", "</s>"];

/// Token ↔ id map with four reserved ids (`PAD`, `UNK`, `BOS`, `EOS`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    id_of: HashMap<String, usize>,
    token_of: Vec<String>,
}

impl Vocabulary {
    /// Builds a vocabulary over tokens seen at least `min_count` times. Ids
    /// follow descending frequency, ties broken lexicographically.
    pub fn build<'a, I>(corpus: I, min_count: usize) -> Result<Self>
    where
        I: IntoIterator<Item = &'a Sentence>,
    {
        if min_count == 0 {
            return Err(Error::config("min_count must be at least 1"));
        }
        let mut counts: HashMap<&str, usize> = HashMap::new();
        let mut seen_any = false;
        for sentence in corpus {
            seen_any = true;
            for tok in sentence.tokens() {
                *counts.entry(tok.as_str()).or_default() += 1;
            }
        }
        if !seen_any {
            return Err(Error::EmptyInput("cannot build a vocabulary from an empty corpus"));
        }
        let mut ranked: Vec<(&str, usize)> = counts
            .into_iter()
            .filter(|(t, n)| *n >= min_count && !RESERVED.contains(t))
            .collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        Ok(Vocabulary::from_tokens(ranked.into_iter().map(|(t, _)| t.to_string())))
    }

    /// Rebuilds a vocabulary from its non-reserved tokens in id order.
    pub fn from_tokens<I: IntoIterator<Item = String>>(tokens: I) -> Self {
        let mut token_of: Vec<String> = RESERVED.iter().map(|s| s.to_string()).collect();
        token_of.extend(tokens);
        let id_of = token_of.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Vocabulary { id_of, token_of }
    }

    pub fn len(&self) -> usize {
        self.token_of.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn id(&self, token: &str) -> usize {
        match self.id_of.get(token) {
            Some(&id) if id >= RESERVED.len() => id,
            _ => UNK,
        }
    }

    pub fn token(&self, id: usize) -> Option<&str> {
        self.token_of.get(id).map(String::as_str)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.id(token) != UNK
    }

    pub fn encode(&self, sentence: &Sentence) -> Vec<usize> {
        sentence.tokens().iter().map(|t| self.id(t)).collect()
    }

    /// Non-reserved tokens in id order.
    pub fn tokens(&self) -> &[String] {
        &self.token_of[RESERVED.len()..]
    }
}

/// A clean source sentence and its (possibly) erroneous counterpart.
#[derive(Debug, Clone, PartialEq)]
pub struct ParallelPair {
    pub source: Sentence,
    pub target: Sentence,
    /// Joint log-probability of `target` under the generator, in nats.
    pub score: Option<f64>,
}

impl ParallelPair {
    pub fn new(source: Sentence, target: Sentence) -> Self {
        ParallelPair {
            source,
            target,
            score: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Correct,
    Incorrect,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Correct => "c",
            Label::Incorrect => "i",
        }
    }

    pub fn parse(s: &str) -> Option<Label> {
        match s {
            "c" => Some(Label::Correct),
            "i" => Some(Label::Incorrect),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabeledSentence {
    tokens: Vec<String>,
    labels: Vec<Label>,
}

impl LabeledSentence {
    pub fn new(tokens: Vec<String>, labels: Vec<Label>) -> Result<Self> {
        if tokens.len() != labels.len() {
            return Err(Error::config(format!(
                "{} tokens but {} labels",
                tokens.len(),
                labels.len()
            )));
        }
        if tokens.is_empty() {
            return Err(Error::EmptyInput("labelled sentence has no tokens"));
        }
        Ok(LabeledSentence { tokens, labels })
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn sentence(&self) -> Sentence {
        Sentence(self.tokens.clone())
    }
}

fn read_utf8(path: &Path) -> Result<String> {
    let text = fs::read_to_string(path)?;
    if text.starts_with('\u{feff}') {
        return Err(Error::parse(1, "byte-order mark is not allowed"));
    }
    Ok(text)
}

pub fn parse_parallel_tsv(text: &str) -> Result<Vec<ParallelPair>> {
    let mut pairs = Vec::new();
    for (n, line) in text.split('\n').enumerate() {
        let line_no = n + 1;
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split('\t');
        let (Some(src), Some(tgt), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::parse(line_no, "expected exactly one TAB"));
        };
        let side =
            |s: &str, which: &str| tokenize(s).map_err(|_| Error::parse(line_no, format!("{which} side is empty")));
        pairs.push(ParallelPair::new(side(src, "source")?, side(tgt, "target")?));
    }
    Ok(pairs)
}

pub fn read_parallel_tsv(path: impl AsRef<Path>) -> Result<Vec<ParallelPair>> {
    parse_parallel_tsv(&read_utf8(path.as_ref())?)
}

pub fn format_parallel_tsv(pairs: &[ParallelPair]) -> String {
    let mut out = String::new();
    for p in pairs {
        out.push_str(&p.source.to_string());
        out.push('\t');
        out.push_str(&p.target.to_string());
        out.push('\n');
    }
    out
}

pub fn write_parallel_tsv(pairs: &[ParallelPair], path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_parallel_tsv(pairs))?;
    Ok(())
}

/// Audit sidecar: `source<TAB>target<TAB>score` (empty score for human pairs).
pub fn write_scores_tsv(pairs: &[ParallelPair], path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    for p in pairs {
        let score = p.score.map(|s| s.to_string()).unwrap_or_default();
        writeln!(w, "{}\t{}\t{}", p.source, p.target, score)?;
    }
    w.flush()?;
    Ok(())
}

/// One plain sentence per line, tokenized.
pub fn read_sentences(path: impl AsRef<Path>) -> Result<Vec<Sentence>> {
    let text = read_utf8(path.as_ref())?;
    text.lines().filter(|l| !l.trim().is_empty()).map(tokenize).collect()
}

pub fn parse_labeled(text: &str) -> Result<Vec<LabeledSentence>> {
    let mut out = Vec::new();
    let mut tokens = Vec::new();
    let mut labels = Vec::new();
    for (n, line) in text.split('\n').enumerate() {
        let line_no = n + 1;
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            if !tokens.is_empty() {
                out.push(LabeledSentence::new(
                    std::mem::take(&mut tokens),
                    std::mem::take(&mut labels),
                )?);
            }
            continue;
        }
        let Some((tok, label)) = line.split_once('\t') else {
            return Err(Error::parse(line_no, "expected token<TAB>label"));
        };
        if tok.is_empty() || tok.chars().any(char::is_whitespace) {
            return Err(Error::parse(line_no, format!("invalid token {tok:?}")));
        }
        let label = Label::parse(label).ok_or_else(|| Error::parse(line_no, format!("unknown label {label:?}")))?;
        tokens.push(tok.to_string());
        labels.push(label);
    }
    if !tokens.is_empty() {
        out.push(LabeledSentence::new(tokens, labels)?);
    }
    Ok(out)
}

pub fn read_labeled(path: impl AsRef<Path>) -> Result<Vec<LabeledSentence>> {
    parse_labeled(&read_utf8(path.as_ref())?)
}

pub fn format_labeled(data: &[LabeledSentence]) -> String {
    let mut out = String::new();
    for s in data {
        for (t, l) in s.tokens.iter().zip(&s.labels) {
            out.push_str(t);
            out.push('\t');
            out.push_str(l.as_str());
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

pub fn write_labeled(data: &[LabeledSentence], path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_labeled(data))?;
    Ok(())
}
