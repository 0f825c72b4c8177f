//! Score a transcript with the bundled lexicon.
//!
//! Usage: `cargo run --example score_transcript [FILE]`; without a file a
//! short built-in passage is scored.

use semitrend::sentiment::{polarity, score, tokenize, Lexicon};

const SAMPLE: &str = "Demand for advanced nodes remained strong and margins improved, \
                      although customers were not confident about the second half.";

fn main() -> std::io::Result<()> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => SAMPLE.to_string(),
    };
    let lexicon = Lexicon::bundled();
    let tokens = tokenize(&text);
    for t in tokens.iter().filter(|t| lexicon.polarity_of(t).is_some() || lexicon.is_negator(t)) {
        println!("{t:>12} {:?}", lexicon.polarity_of(t));
    }
    println!("polarity {:.4}", polarity(&tokens, &lexicon));
    println!("score    {:.2}", score(&text, &lexicon).value());
    Ok(())
}
