//! Lexicon polarity scoring.
//!
//! Text is split into lowercase alphabetic tokens; each token found in the
//! lexicon contributes its polarity, negated when the token right before it
//! is a negator. The mean contribution `p ∈ [-1, 1]` maps to the score
//! `50 · (1 + p)`. Text without lexicon hits scores a neutral 50.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use thiserror::Error;

const BUNDLED_LEXICON: &str = include_str!("../data/lexicon.tsv");
const NEGATORS_SECTION: &str = "[negators]";

#[derive(Debug, Error)]
pub enum SentimentError {
    #[error("lexicon line {line}: {reason}")]
    Lexicon { line: usize, reason: String },
    #[error("score {0} is outside [0, 100]")]
    OutOfRange(f64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A sentiment score on the 0 (extremely negative) to 100 (extremely
/// positive) scale.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SentimentScore(f64);

impl SentimentScore {
    pub const NEUTRAL: SentimentScore = SentimentScore(50.0);

    pub fn new(value: f64) -> Result<Self, SentimentError> {
        if (0.0..=100.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(SentimentError::OutOfRange(value))
        }
    }

    /// Clamp any finite value into the scale. NaN maps to 0.
    pub fn clamped(value: f64) -> Self {
        Self(if value.is_nan() { 0.0 } else { value.clamp(0.0, 100.0) })
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    polarities: HashMap<String, f64>,
    negators: HashSet<String>,
}

impl Lexicon {
    /// The bundled financial lexicon.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_LEXICON).expect("bundled lexicon is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, SentimentError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Parse `token<TAB>polarity` lines. `#` starts a comment; lines after a
    /// `[negators]` header list one negator token each.
    pub fn parse(text: &str) -> Result<Self, SentimentError> {
        let mut lexicon = Self::default();
        let mut in_negators = false;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let bad = |reason: String| SentimentError::Lexicon { line: line_no, reason };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line == NEGATORS_SECTION {
                in_negators = true;
                continue;
            }
            if in_negators {
                check_token(line).map_err(bad)?;
                lexicon.negators.insert(line.to_string());
                continue;
            }
            let (token, value) = line
                .split_once('\t')
                .ok_or_else(|| bad("expected `token<TAB>polarity`".into()))?;
            let token = token.trim();
            check_token(token).map_err(bad)?;
            let value: f64 = value.trim().parse().map_err(|_| bad(format!("`{}` is not a number", value.trim())))?;
            if !(-1.0..=1.0).contains(&value) {
                return Err(bad(format!("polarity {value} is outside [-1, 1]")));
            }
            if lexicon.polarities.insert(token.to_string(), value).is_some() {
                return Err(bad(format!("duplicate token `{token}`")));
            }
        }
        Ok(lexicon)
    }

    pub fn from_entries<'a>(
        entries: impl IntoIterator<Item = (&'a str, f64)>,
        negators: impl IntoIterator<Item = &'a str>,
    ) -> Result<Self, SentimentError> {
        let mut lexicon = Self::default();
        for (token, value) in entries {
            check_token(token).map_err(|reason| SentimentError::Lexicon { line: 0, reason })?;
            if !(-1.0..=1.0).contains(&value) {
                return Err(SentimentError::Lexicon { line: 0, reason: format!("polarity {value} is outside [-1, 1]") });
            }
            lexicon.polarities.insert(token.to_string(), value);
        }
        for token in negators {
            check_token(token).map_err(|reason| SentimentError::Lexicon { line: 0, reason })?;
            lexicon.negators.insert(token.to_string());
        }
        Ok(lexicon)
    }

    pub fn polarity_of(&self, token: &str) -> Option<f64> {
        self.polarities.get(token).copied()
    }

    pub fn is_negator(&self, token: &str) -> bool {
        self.negators.contains(token)
    }

    pub fn len(&self) -> usize {
        self.polarities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polarities.is_empty()
    }
}

fn check_token(token: &str) -> Result<(), String> {
    if token.is_empty() || !token.chars().all(char::is_alphabetic) {
        return Err(format!("token `{token}` must be non-empty and alphabetic"));
    }
    if token.to_lowercase() != token {
        return Err(format!("token `{token}` must be lowercase"));
    }
    Ok(())
}

/// Maximal runs of alphabetic characters, lowercased, in document order.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphabetic())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Mean polarity of lexicon hits in `[-1, 1]`; 0 when nothing matches.
pub fn polarity<S: AsRef<str>>(tokens: &[S], lexicon: &Lexicon) -> f64 {
    let mut sum = 0.0;
    let mut hits = 0usize;
    for (i, token) in tokens.iter().enumerate() {
        if let Some(p) = lexicon.polarity_of(token.as_ref()) {
            let negated = i > 0 && lexicon.is_negator(tokens[i - 1].as_ref());
            sum += if negated { -p } else { p };
            hits += 1;
        }
    }
    if hits == 0 {
        0.0
    } else {
        (sum / hits as f64).clamp(-1.0, 1.0)
    }
}

pub fn score(text: &str, lexicon: &Lexicon) -> SentimentScore {
    SentimentScore::clamped(50.0 * (1.0 + polarity(&tokenize(text), lexicon)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lex() -> Lexicon {
        Lexicon::from_entries([("growth", 0.6), ("strong", 1.0), ("loss", -1.0), ("weak", -0.4)], ["not", "no"]).unwrap()
    }

    #[test]
    fn tokenizer_rules() {
        assert_eq!(tokenize("Net income ROSE 12%."), vec!["net", "income", "rose"]);
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("state-of-the-art"), vec!["state", "of", "the", "art"]);
        assert_eq!(tokenize("Café Übersee"), vec!["café", "übersee"]);
    }

    #[test]
    fn polarity_rules() {
        let l = lex();
        assert_eq!(polarity(&["growth"], &l), 0.6);
        assert_eq!(polarity(&["not", "growth"], &l), -0.6);
        assert_eq!(polarity::<&str>(&[], &l), 0.0);
        assert_eq!(polarity(&["unknown", "words"], &l), 0.0);
    }

    #[test]
    fn score_bounds() {
        let l = lex();
        assert_eq!(score("nothing to see here", &l).value(), 50.0);
        assert_eq!(score("strong strong", &l).value(), 100.0);
        assert_eq!(score("loss, loss!", &l).value(), 0.0);
        assert_eq!(score("", &l), SentimentScore::NEUTRAL);
    }

    #[test]
    fn bundled_lexicon_loads() {
        let l = Lexicon::bundled();
        assert!(l.len() >= 150, "{}", l.len());
        assert!(l.is_negator("not"));
        assert!(score("Revenue growth was strong and demand remained robust.", &l).value() > 50.0);
        assert!(score("We saw a sharp decline and weak demand.", &l).value() < 50.0);
    }

    #[test]
    fn lexicon_file_errors() {
        assert!(Lexicon::parse("Growth\t0.5").is_err());
        assert!(Lexicon::parse("growth\t1.5").is_err());
        assert!(Lexicon::parse("growth 0.5").is_err());
        assert!(Lexicon::parse("growth\t0.5\ngrowth\t0.4").is_err());
        let err = Lexicon::parse("# c\ngood\t0.1\nx1\t0.2").unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
        let l = Lexicon::parse("good\t0.5 # trailing\n[negators]\nnot\n").unwrap();
        assert_eq!(l.polarity_of("good"), Some(0.5));
        assert!(l.is_negator("not"));
    }

    fn word() -> impl Strategy<Value = &'static str> {
        prop::sample::select(vec!["growth", "strong", "loss", "weak", "not", "no", "the", "wafer", "quarter"])
    }

    proptest! {
        #[test]
        fn range_and_determinism(text in ".{0,200}") {
            let l = Lexicon::bundled();
            let a = score(&text, &l);
            prop_assert!((0.0..=100.0).contains(&a.value()));
            prop_assert_eq!(a.value().to_bits(), score(&text, &l).value().to_bits());
        }

        #[test]
        fn order_free_without_negators(words in prop::collection::vec(word(), 0..20), seed in any::<u64>()) {
            let l = lex();
            let plain: Vec<&str> = words.into_iter().filter(|w| !l.is_negator(w)).collect();
            let mut shuffled = plain.clone();
            // deterministic Fisher-Yates from the seed
            let mut rng = crate::neural::SplitMix64::new(seed);
            for i in (1..shuffled.len()).rev() {
                let j = (rng.next_u64() % (i as u64 + 1)) as usize;
                shuffled.swap(i, j);
            }
            prop_assert!((polarity(&plain, &l) - polarity(&shuffled, &l)).abs() < 1e-12);
        }

        #[test]
        fn appending_positive_token_raises_score(words in prop::collection::vec(word(), 0..20)) {
            let l = lex();
            prop_assume!(words.last().is_none_or(|w| !l.is_negator(w)));
            let text = words.join(" ");
            let before = score(&text, &l).value();
            prop_assume!(before < 100.0);
            let after = score(&format!("{text} strong"), &l).value();
            prop_assert!(after > before, "{before} -> {after}");
        }
    }
}
