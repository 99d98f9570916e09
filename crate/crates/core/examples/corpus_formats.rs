//! Tokenization, vocabularies and the two corpus file formats.
//!
//!     cargo run --example corpus_formats

use wrongsmith::align::label_tokens;
use wrongsmith::corpus::{
    format_labeled, format_parallel_tsv, parse_labeled, parse_parallel_tsv, tokenize, Vocabulary, UNK,
};

pub fn run() -> wrongsmith::Result<()> {
    let clean = tokenize("She promised to turn over a new leaf.")?;
    let noisy = tokenize("She promissed to turn over a new leaf.")?;
    println!("{} tokens: {:?}", clean.len(), clean.tokens());

    let vocab = Vocabulary::build([&clean, &noisy], 2)?;
    println!("vocabulary (min_count 2): {:?}", vocab.tokens());
    let ids = vocab.encode(&noisy);
    println!("encoded corruption: {ids:?}");
    assert_eq!(ids[1], UNK);

    let mut pair = wrongsmith::corpus::ParallelPair::new(clean, noisy);
    pair.score = Some(-3.25);
    let tsv = format_parallel_tsv(std::slice::from_ref(&pair));
    print!("parallel TSV:\n{tsv}");
    assert_eq!(parse_parallel_tsv(&tsv)?[0].target, pair.target);

    let labelled = label_tokens(&pair.source, &pair.target)?;
    let text = format_labeled(std::slice::from_ref(&labelled));
    print!("labelled:\n{text}");
    assert_eq!(parse_labeled(&text)?, vec![labelled]);
    Ok(())
}

fn main() -> wrongsmith::Result<()> {
    run()
}
