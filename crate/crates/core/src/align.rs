//! Word-level Levenshtein alignment and error labelling of corrupted text.

use crate::corpus::{Label, LabeledSentence, Sentence};
use crate::error::{Error, Result};

/// One step of a word alignment. Indices are word positions in the source
/// (`i`) and target (`j`) sentences.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EditOp {
    Match(usize, usize),
    Substitute(usize, usize),
    /// Source word dropped from the target.
    Delete(usize),
    /// Target word with no source counterpart.
    Insert(usize),
}

impl EditOp {
    pub fn target_index(&self) -> Option<usize> {
        match *self {
            EditOp::Match(_, j) | EditOp::Substitute(_, j) | EditOp::Insert(j) => Some(j),
            EditOp::Delete(_) => None,
        }
    }

    pub fn source_index(&self) -> Option<usize> {
        match *self {
            EditOp::Match(i, _) | EditOp::Substitute(i, _) | EditOp::Delete(i) => Some(i),
            EditOp::Insert(_) => None,
        }
    }

    pub fn cost(&self) -> usize {
        usize::from(!matches!(self, EditOp::Match(..)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    pub ops: Vec<EditOp>,
    pub cost: usize,
}

/// Minimal unit-cost alignment with exact (case-sensitive) word equality.
/// Among equal-cost alignments the backtrace prefers
/// Match > Substitute > Delete > Insert at every cell.
pub fn word_align<S: AsRef<str>>(source: &[S], target: &[S]) -> Result<Alignment> {
    if source.is_empty() || target.is_empty() {
        return Err(Error::EmptyInput("alignment needs two non-empty sentences"));
    }
    let (n, m) = (source.len(), target.len());
    let width = m + 1;
    let mut dp = vec![0usize; (n + 1) * width];
    for i in 0..=n {
        dp[i * width] = i;
    }
    for (j, cell) in dp.iter_mut().take(width).enumerate() {
        *cell = j;
    }
    for i in 1..=n {
        for j in 1..=m {
            let same = source[i - 1].as_ref() == target[j - 1].as_ref();
            let diag = dp[(i - 1) * width + j - 1] + usize::from(!same);
            let del = dp[(i - 1) * width + j] + 1;
            let ins = dp[i * width + j - 1] + 1;
            dp[i * width + j] = diag.min(del).min(ins);
        }
    }

    let mut ops = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = dp[i * width + j];
        if i > 0 && j > 0 {
            let diag = dp[(i - 1) * width + j - 1];
            let same = source[i - 1].as_ref() == target[j - 1].as_ref();
            if same && here == diag {
                ops.push(EditOp::Match(i - 1, j - 1));
                i -= 1;
                j -= 1;
                continue;
            }
            if !same && here == diag + 1 {
                ops.push(EditOp::Substitute(i - 1, j - 1));
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if i > 0 && here == dp[(i - 1) * width + j] + 1 {
            ops.push(EditOp::Delete(i - 1));
            i -= 1;
        } else {
            ops.push(EditOp::Insert(j - 1));
            j -= 1;
        }
    }
    ops.reverse();
    Ok(Alignment {
        ops,
        cost: dp[n * width + m],
    })
}

/// Labels every target word `c` or `i` against the source:
///
/// 1. a word not aligned with itself (inserted or substituted) is `i`;
/// 2. else a word right after a dropped source word is `i`;
/// 3. else the last word is `i` when it is not aligned to the last source word;
/// 4. otherwise `c`.
pub fn label_tokens(source: &Sentence, target: &Sentence) -> Result<LabeledSentence> {
    let src = source.tokens();
    let tgt = target.tokens();
    let alignment = word_align(src, tgt)?;
    let mut labels = vec![Label::Correct; tgt.len()];
    let last = tgt.len() - 1;
    for (k, op) in alignment.ops.iter().enumerate() {
        let incorrect = match *op {
            EditOp::Delete(_) => continue,
            EditOp::Insert(_) | EditOp::Substitute(..) => true,
            EditOp::Match(i, j) if src[i] != tgt[j] => true,
            EditOp::Match(i, j) => {
                let after_gap = k > 0 && matches!(alignment.ops[k - 1], EditOp::Delete(_));
                after_gap || (j == last && i != src.len() - 1)
            }
        };
        if incorrect {
            labels[op.target_index().expect("non-delete op has a target index")] = Label::Incorrect;
        }
    }
    LabeledSentence::new(tgt.to_vec(), labels)
}

pub fn count_errors(sentence: &LabeledSentence) -> usize {
    sentence.labels().iter().filter(|&&l| l == Label::Incorrect).count()
}
