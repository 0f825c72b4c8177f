//! Event calendars and multiplicative event intervention on sentiment.
//!
//! Each event carries a weight (> 1 for positive events, < 1 for negative
//! ones) and an inclusive range of quarters. The effective score of a
//! quarter is its base score times the product of the weights of all events
//! active in that quarter, clamped to `[0, 100]`.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::dataset::{parse_period, Period, QuarterlyRecord};
use crate::sentiment::SentimentScore;

const BUNDLED_CALENDAR: &str = include_str!("../data/events.cal");

#[derive(Debug, Error)]
pub enum EventError {
    #[error("event `{name}`: {reason}")]
    InvalidEvent { name: String, reason: String },
    #[error("duplicate event name `{0}`")]
    DuplicateName(String),
    #[error("calendar line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("{period}: base sentiment is absent")]
    MissingBase { period: Period },
    #[error("{period}: event `{name}` is not in the calendar")]
    UnknownEvent { period: Period, name: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    Internal,
    External,
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::Positive => "positive",
            Polarity::Negative => "negative",
        })
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scope::Internal => "internal",
            Scope::External => "external",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventSpec {
    name: String,
    polarity: Polarity,
    weight: f64,
    scope: Scope,
    start: Period,
    end: Period,
}

impl EventSpec {
    pub fn new(
        name: impl Into<String>,
        polarity: Polarity,
        weight: f64,
        scope: Scope,
        start: Period,
        end: Period,
    ) -> Result<Self, EventError> {
        let name = name.into();
        let invalid = |reason: &str| EventError::InvalidEvent { name: name.clone(), reason: reason.to_string() };
        if name.trim().is_empty() || name.trim() != name {
            return Err(invalid("name must be non-empty without surrounding spaces"));
        }
        if name.contains([';', ',', '\n', '\r', '=']) {
            return Err(invalid("name must not contain `;`, `,`, `=` or line breaks"));
        }
        if !weight.is_finite() || weight <= 0.0 {
            return Err(invalid("weight must be a positive number"));
        }
        match polarity {
            Polarity::Positive if weight <= 1.0 => return Err(invalid("positive events need weight > 1")),
            Polarity::Negative if weight >= 1.0 => return Err(invalid("negative events need weight < 1")),
            _ => {}
        }
        if start > end {
            return Err(invalid("start is after end"));
        }
        Ok(Self { name, polarity, weight, scope, start, end })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn polarity(&self) -> Polarity {
        self.polarity
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn scope(&self) -> Scope {
        self.scope
    }

    pub fn start(&self) -> Period {
        self.start
    }

    pub fn end(&self) -> Period {
        self.end
    }

    pub fn is_active(&self, p: Period) -> bool {
        self.start <= p && p <= self.end
    }
}

/// An ordered set of uniquely named events.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EventCalendar {
    events: Vec<EventSpec>,
}

impl EventCalendar {
    pub fn new(events: Vec<EventSpec>) -> Result<Self, EventError> {
        let mut names = HashSet::new();
        for e in &events {
            if !names.insert(e.name.as_str()) {
                return Err(EventError::DuplicateName(e.name.clone()));
            }
        }
        Ok(Self { events })
    }

    /// The bundled 1998 Q1 to 2023 Q4 calendar.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_CALENDAR).expect("bundled calendar is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, EventError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Parse blank-line separated blocks of `key=value` lines with keys
    /// `name`, `polarity`, `weight`, `scope`, `start` and `end`.
    pub fn parse(text: &str) -> Result<Self, EventError> {
        let mut events = Vec::new();
        for block in blocks(text) {
            events.push(parse_event(&block?)?);
        }
        Self::new(events)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, e) in self.events.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(&format!(
                "name={}\npolarity={}\nweight={}\nscope={}\nstart={}\nend={}\n",
                e.name, e.polarity, e.weight, e.scope, e.start, e.end
            ));
        }
        out
    }

    pub fn events(&self) -> &[EventSpec] {
        &self.events
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&EventSpec> {
        self.events.iter().find(|e| e.name == name)
    }

    /// Events whose range contains `p`, in calendar order.
    pub fn active_events(&self, p: Period) -> Vec<&EventSpec> {
        self.events.iter().filter(|e| e.is_active(p)).collect()
    }
}

/// Key/value lines of one block, with the line number of each.
type Block = Vec<(usize, String, String)>;

fn blocks(text: &str) -> impl Iterator<Item = Result<Block, EventError>> + '_ {
    let mut lines = text.lines().enumerate();
    std::iter::from_fn(move || {
        let mut block = Vec::new();
        for (idx, raw) in lines.by_ref() {
            let line = raw.trim();
            if line.starts_with('#') {
                continue;
            }
            if line.is_empty() {
                if block.is_empty() {
                    continue;
                }
                break;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Some(Err(EventError::Parse { line: idx + 1, reason: "expected `key=value`".into() }));
            };
            block.push((idx + 1, k.trim().to_string(), v.trim().to_string()));
        }
        (!block.is_empty()).then_some(Ok(block))
    })
}

fn parse_event(block: &Block) -> Result<EventSpec, EventError> {
    let first_line = block[0].0;
    let mut fields: [Option<(usize, &str)>; 6] = [None; 6];
    const KEYS: [&str; 6] = ["name", "polarity", "weight", "scope", "start", "end"];
    for (line, key, value) in block {
        let Some(slot) = KEYS.iter().position(|k| k == key) else {
            return Err(EventError::Parse { line: *line, reason: format!("unknown key `{key}`") });
        };
        if fields[slot].replace((*line, value.as_str())).is_some() {
            return Err(EventError::Parse { line: *line, reason: format!("repeated key `{key}`") });
        }
    }
    let get = |i: usize| {
        fields[i].ok_or_else(|| EventError::Parse { line: first_line, reason: format!("missing key `{}`", KEYS[i]) })
    };
    let (_, name) = get(0)?;
    let (line, polarity) = get(1)?;
    let polarity = match polarity {
        "positive" => Polarity::Positive,
        "negative" => Polarity::Negative,
        other => return Err(EventError::Parse { line, reason: format!("polarity `{other}` is not positive|negative") }),
    };
    let (line, weight) = get(2)?;
    let weight: f64 = weight
        .parse()
        .map_err(|_| EventError::Parse { line, reason: format!("weight `{weight}` is not a number") })?;
    let (line, scope) = get(3)?;
    let scope = match scope {
        "internal" => Scope::Internal,
        "external" => Scope::External,
        other => return Err(EventError::Parse { line, reason: format!("scope `{other}` is not internal|external") }),
    };
    let period = |i: usize| -> Result<Period, EventError> {
        let (line, text) = get(i)?;
        parse_period(text).map_err(|e| EventError::Parse { line, reason: e.to_string() })
    };
    EventSpec::new(name, polarity, weight, scope, period(4)?, period(5)?)
}

/// Product of the event weights; 1 for no events.
///
/// Weights are multiplied in ascending order so the result does not depend
/// on the order of `events`.
pub fn intervention_multiplier<'a>(events: impl IntoIterator<Item = &'a EventSpec>) -> f64 {
    let mut weights: Vec<f64> = events.into_iter().map(|e| e.weight).collect();
    weights.sort_by(f64::total_cmp);
    weights.into_iter().product()
}

pub fn apply_intervention<'a>(base: SentimentScore, events: impl IntoIterator<Item = &'a EventSpec>) -> SentimentScore {
    SentimentScore::clamped(base.value() * intervention_multiplier(events))
}

/// Label every record with its active events and compute its effective
/// sentiment from the base score.
///
/// Event labels already on a record must name calendar events; they are
/// then replaced by the calendar's labels for that quarter.
pub fn enrich(records: &[QuarterlyRecord], calendar: &EventCalendar) -> Result<Vec<QuarterlyRecord>, EventError> {
    records
        .iter()
        .map(|r| {
            if let Some(name) = r.events.iter().find(|n| calendar.get(n).is_none()) {
                return Err(EventError::UnknownEvent { period: r.period, name: name.clone() });
            }
            let base = r.base_sentiment.ok_or(EventError::MissingBase { period: r.period })?;
            let base = SentimentScore::new(base).map_err(|_| EventError::MissingBase { period: r.period })?;
            let active = calendar.active_events(r.period);
            let mut out = r.clone();
            out.events = active.iter().map(|e| e.name.clone()).collect();
            out.effective_sentiment = Some(apply_intervention(base, active).value());
            Ok(out)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::table2_records;
    use proptest::prelude::*;

    fn p(y: i32, q: u8) -> Period {
        Period::new(y, q).unwrap()
    }

    fn event(name: &str, weight: f64) -> EventSpec {
        let polarity = if weight > 1.0 { Polarity::Positive } else { Polarity::Negative };
        EventSpec::new(name, polarity, weight, Scope::External, p(2000, 1), p(2000, 4)).unwrap()
    }

    #[test]
    fn fixture_quarters() {
        let cal = EventCalendar::bundled();
        let names = |q| cal.active_events(q).iter().map(|e| e.name().to_string()).collect::<Vec<_>>();
        assert_eq!(names(p(2001, 1)), vec!["Internet Bubble", "9/11 Investigation", "0.13um Process"]);
        assert!(names(p(2002, 2)).is_empty());
        assert!(EventCalendar::default().active_events(p(2001, 1)).is_empty());
    }

    #[test]
    fn bundled_calendar_reproduces_sample_labels() {
        let cal = EventCalendar::bundled();
        for r in table2_records() {
            let names: Vec<&str> = cal.active_events(r.period).iter().map(|e| e.name()).collect();
            assert_eq!(names, r.events, "{}", r.period);
        }
    }

    #[test]
    fn bundled_weights() {
        let cal = EventCalendar::bundled();
        assert_eq!(cal.events().len(), 21);
        assert_eq!(cal.get("COVID-19").unwrap().weight(), 1.2);
        for e in cal.events() {
            match (e.polarity(), e.name()) {
                (Polarity::Positive, "COVID-19") => {}
                (Polarity::Positive, _) => assert_eq!(e.weight(), 1.1),
                (Polarity::Negative, _) => assert_eq!(e.weight(), 0.9),
            }
        }
    }

    #[test]
    fn multipliers() {
        assert_eq!(intervention_multiplier(&[]), 1.0);
        let cal = EventCalendar::bundled();
        assert_eq!(intervention_multiplier([cal.get("COVID-19").unwrap()]), 1.2);
        let pair = [cal.get("Internet Bubble").unwrap(), cal.get("0.18um Process").unwrap()];
        assert!((intervention_multiplier(pair) - 0.99).abs() < 1e-12);
    }

    #[test]
    fn intervention_examples() {
        let cal = EventCalendar::bundled();
        let base = SentimentScore::new(60.973).unwrap();
        let v = apply_intervention(base, [cal.get("0.25um Process").unwrap()]).value();
        assert!((v - 67.07).abs() < 0.01, "{v}");
        assert_eq!(apply_intervention(SentimentScore::new(64.0).unwrap(), &[]).value(), 64.0);
        let v = apply_intervention(SentimentScore::new(95.0).unwrap(), [cal.get("COVID-19").unwrap()]).value();
        assert_eq!(v, 100.0);
    }

    #[test]
    fn enrich_examples() {
        let cal = EventCalendar::bundled();
        let enriched = enrich(&table2_records(), &cal).unwrap();
        for r in &enriched {
            if r.events.is_empty() {
                assert_eq!(r.effective_sentiment, r.base_sentiment);
            }
        }
        let mut r = table2_records()[16].clone();
        r.period = p(2002, 4);
        r.events.clear();
        let neg = EventCalendar::new(vec![EventSpec::new("Slump", Polarity::Negative, 0.9, Scope::External, p(2002, 4), p(2002, 4)).unwrap()]).unwrap();
        r.base_sentiment = Some(50.0);
        assert_eq!(enrich(std::slice::from_ref(&r), &neg).unwrap()[0].effective_sentiment, Some(45.0));
        r.base_sentiment = Some(0.0);
        assert_eq!(enrich(&[r], &cal).unwrap()[0].effective_sentiment, Some(0.0));
    }

    #[test]
    fn enrich_errors() {
        let cal = EventCalendar::bundled();
        let mut r = table2_records()[0].clone();
        r.base_sentiment = None;
        let err = enrich(&[r], &cal).unwrap_err().to_string();
        assert!(err.contains("1998 Q1"), "{err}");

        let mut r = table2_records()[0].clone();
        r.events = vec!["0.25um Proces".into()];
        assert!(matches!(enrich(&[r], &cal), Err(EventError::UnknownEvent { .. })));
    }

    #[test]
    fn enrich_is_idempotent() {
        let cal = EventCalendar::bundled();
        let once = enrich(&table2_records(), &cal).unwrap();
        assert_eq!(enrich(&once, &cal).unwrap(), once);
    }

    #[test]
    fn invalid_events() {
        let q = p(2000, 1);
        assert!(EventSpec::new("X", Polarity::Positive, 0.9, Scope::Internal, q, q).is_err());
        assert!(EventSpec::new("X", Polarity::Negative, 1.1, Scope::Internal, q, q).is_err());
        assert!(EventSpec::new("X", Polarity::Positive, 1.1, Scope::Internal, q.succ(), q).is_err());
        assert!(EventSpec::new("A;B", Polarity::Positive, 1.1, Scope::Internal, q, q).is_err());
        assert!(EventCalendar::new(vec![event("A", 1.1), event("A", 0.9)]).is_err());
    }

    #[test]
    fn calendar_text_round_trip() {
        let cal = EventCalendar::bundled();
        assert_eq!(EventCalendar::parse(&cal.to_text()).unwrap(), cal);
    }

    #[test]
    fn calendar_parse_errors() {
        let err = EventCalendar::parse("name=A\npolarity=up\nweight=1.1\nscope=internal\nstart=2000 Q1\nend=2000 Q2\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 2"), "{err}");
        let err = EventCalendar::parse("name=A\nweight=1.1\n").unwrap_err().to_string();
        assert!(err.contains("polarity"), "{err}");
        assert!(EventCalendar::parse("name=A\nbogus\n").is_err());
        assert!(EventCalendar::parse("").unwrap().is_empty());
    }

    fn arb_event() -> impl Strategy<Value = EventSpec> {
        (any::<bool>(), 0.01f64..0.99, 1.01f64..2.0).prop_map(|(pos, lo, hi)| {
            if pos {
                event("e", hi)
            } else {
                event("e", lo)
            }
        })
    }

    proptest! {
        #[test]
        fn effective_stays_in_range(base in 0.0f64..=100.0, events in prop::collection::vec(arb_event(), 0..6)) {
            let v = apply_intervention(SentimentScore::new(base).unwrap(), &events).value();
            prop_assert!((0.0..=100.0).contains(&v));
        }

        #[test]
        fn multiplier_is_order_free(events in prop::collection::vec(arb_event(), 0..6)) {
            let mut rev = events.clone();
            rev.reverse();
            prop_assert_eq!(intervention_multiplier(&events).to_bits(), intervention_multiplier(&rev).to_bits());
        }

        #[test]
        fn direction_follows_polarity(base in 0.1f64..99.0, pos in any::<bool>(), n in 1usize..4, w in 0.01f64..0.5) {
            let weight = if pos { 1.0 + w } else { 1.0 - w };
            let events = vec![event("e", weight); n];
            let m = intervention_multiplier(&events);
            prop_assume!(base * m < 100.0 && base * m > 0.0);
            let v = apply_intervention(SentimentScore::new(base).unwrap(), &events).value();
            if pos { prop_assert!(v > base) } else { prop_assert!(v < base) }
        }
    }
}
