//! Word alignment and c/i labelling of corruptions.
//!
//!     cargo run --example align_and_label

use wrongsmith::align::{count_errors, label_tokens, word_align};
use wrongsmith::corpus::tokenize;

pub fn run() -> wrongsmith::Result<()> {
    let cases = [
        (
            "She promised to turn over a new leaf.",
            "She promissed to turn over a new leaf.",
        ),
        ("At the moment I'm in Spain.", "During the moment I'm in Spain."),
        ("I want to go", "I want go"),
        ("I want to go", "I want to"),
        ("he listens to music .", "he listen at the music ."),
    ];
    for (u, v) in cases {
        let (source, target) = (tokenize(u)?, tokenize(v)?);
        let alignment = word_align(source.tokens(), target.tokens())?;
        let labelled = label_tokens(&source, &target)?;
        println!("{u}\n{v}");
        println!("  cost {}  ops {:?}", alignment.cost, alignment.ops);
        let tagged: Vec<String> = labelled
            .tokens()
            .iter()
            .zip(labelled.labels())
            .map(|(t, l)| format!("{t}/{}", l.as_str()))
            .collect();
        println!("  {}  ({} errors)\n", tagged.join(" "), count_errors(&labelled));
    }
    Ok(())
}

fn main() -> wrongsmith::Result<()> {
    run()
}
