//! How the temperature reshapes a next-word distribution.
//!
//!     cargo run --example temperature_sampling

use wrongsmith::decode::apply_temperature;
use wrongsmith::seq2seq::Distribution;

fn entropy(p: &Distribution) -> f64 {
    -p.probs().iter().filter(|&&x| x > 0.0).map(|x| x * x.ln()).sum::<f64>()
}

pub fn run() -> wrongsmith::Result<()> {
    let words = ["in", "on", "at", "to"];
    let p = Distribution::new(vec![0.55, 0.25, 0.15, 0.05])?;
    println!("{:>6}  {}", "tau", words.map(|w| format!("{w:>7}")).join(""));
    for tau in [2.0, 1.0, 0.5, 0.2, 0.05] {
        let q = apply_temperature(&p, tau)?;
        let row: String = q.probs().iter().map(|x| format!("{x:>7.4}")).collect();
        println!("{tau:>6}  {row}   entropy {:.3}", entropy(&q));
    }
    // Halving the temperature squares the probabilities before renormalizing.
    let q = apply_temperature(&Distribution::new(vec![0.5, 0.25, 0.25])?, 0.5)?;
    println!("[0.5, 0.25, 0.25] at tau 0.5 -> {:.4?}", q.probs());
    Ok(())
}

fn main() -> wrongsmith::Result<()> {
    run()
}
